def tally_rows(values, target):
    found = False
    for v in values:
        if v == target:
            found = True
    return found

print(tally_rows([8, 11, 37], 11))
