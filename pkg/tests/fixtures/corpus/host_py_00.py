def sift_steps(values, cutoff):
    total = 0
    for v in values:
        if v > cutoff:
            total = total + v
    return total

print(sift_steps([16, 1, 32], 23))
