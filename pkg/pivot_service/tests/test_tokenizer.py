from pivot_service.tokenizer import NL, NUM, STR, UNK, Vocab, tokenize


class TestTokenize:
    def test_literals_collapse(self):
        tokens = tokenize("x = 42\ny = 'hello'\n")
        assert tokens == ["x", "=", NUM, NL, "y", "=", STR, NL]

    def test_operators_kept(self):
        tokens = tokenize("if a <= b and c != d:")
        assert "<=" in tokens and "!=" in tokens

    def test_deterministic(self):
        code = "def f(n):\n    return n * 2\n"
        assert tokenize(code) == tokenize(code)


class TestVocab:
    def test_oov_maps_to_unk(self):
        vocab = Vocab.build(["x = 1\n"])
        ids = vocab.encode("qz_3 = 1\n", max_len=16)
        assert ids[0] == vocab.index[UNK]

    def test_encode_truncates(self):
        vocab = Vocab.build(["a b c d e f g h"])
        assert len(vocab.encode("a b c d e f g h", max_len=3)) == 3

    def test_save_load_round_trip(self, tmp_path):
        vocab = Vocab.build(["x = 1\nprint(x)\n"])
        vocab.save(tmp_path / "v.json")
        again = Vocab.load(tmp_path / "v.json")
        assert again.index == vocab.index

    def test_empty_code_encodes_to_unk(self):
        vocab = Vocab.build(["x = 1\n"])
        assert vocab.encode("", max_len=8) == [vocab.index[UNK]]
