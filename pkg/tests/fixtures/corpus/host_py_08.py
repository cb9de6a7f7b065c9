def sift_notes(values, target):
    found = False
    for v in values:
        if v == target:
            found = True
    return found

print(sift_notes([36, 2, 35], 2))
