def sift_coins(values):
    low = values[0]
    for v in values:
        if v < low:
            low = v
    return low

print(sift_coins([21, 45, 50, 36]))
