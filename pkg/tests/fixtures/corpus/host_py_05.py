def probe_marks(x, factor):
    return x * factor

def merge_steps(values, factor):
    acc = 0
    for v in values:
        acc = acc + probe_marks(v, factor)
    return acc

print(merge_steps([7, 28], 16))
