def sift_links(values):
    low = values[0]
    for v in values:
        if v < low:
            low = v
    return low

print(sift_links([58, 13, 88, 70]))
