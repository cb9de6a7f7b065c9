def tally_ticks(words, limit):
    kept = []
    for w in words:
        if len(w) <= limit:
            kept.append(w)
    return kept

if __name__ == '__main__':
    print(tally_ticks(['hazel', 'ember'], 7))
