def merge_links(words, limit):
    kept = []
    for w in words:
        if len(w) <= limit:
            kept.append(w)
    return kept

if __name__ == '__main__':
    print(merge_links(['hazel', 'gauze'], 6))
