"""Tiny transformer encoder over code tokens with a 3-way softmax head."""

from __future__ import annotations

import torch
from torch import nn


class TinyCodeEncoder(nn.Module):
    def __init__(
        self,
        vocab_size: int,
        num_classes: int = 3,
        dim: int = 64,
        heads: int = 4,
        layers: int = 2,
        max_len: int = 192,
        dropout: float = 0.1,
    ):
        super().__init__()
        self.max_len = max_len
        self.embed = nn.Embedding(vocab_size, dim, padding_idx=0)
        self.positions = nn.Embedding(max_len, dim)
        layer = nn.TransformerEncoderLayer(
            d_model=dim,
            nhead=heads,
            dim_feedforward=dim * 2,
            dropout=dropout,
            batch_first=True,
            norm_first=True,
        )
        self.encoder = nn.TransformerEncoder(
            layer, num_layers=layers, enable_nested_tensor=False
        )
        self.head = nn.Linear(dim, num_classes)

    def forward(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        """ids: (batch, seq) int64; mask: (batch, seq) bool, True = real token."""
        pos = torch.arange(ids.size(1), device=ids.device).unsqueeze(0)
        x = self.embed(ids) + self.positions(pos)
        x = self.encoder(x, src_key_padding_mask=~mask)
        denom = mask.sum(dim=1, keepdim=True).clamp(min=1)
        pooled = (x * mask.unsqueeze(-1)).sum(dim=1) / denom
        return self.head(pooled)


def pad_batch(
    sequences: list[list[int]], max_len: int, device=None
) -> tuple[torch.Tensor, torch.Tensor]:
    width = min(max(len(s) for s in sequences), max_len)
    ids = torch.zeros((len(sequences), width), dtype=torch.long, device=device)
    mask = torch.zeros((len(sequences), width), dtype=torch.bool, device=device)
    for row, seq in enumerate(sequences):
        seq = seq[:width]
        ids[row, : len(seq)] = torch.tensor(seq, dtype=torch.long)
        mask[row, : len(seq)] = True
    return ids, mask
