def count_cells(text):
    hits = 0
    for ch in text:
        if ch in 'aeiou':
            hits = hits + 1
    return hits

print(count_cells('amber'))
