"""Desk-scale pivot classifier: train a small sequence model on a labeled
dead-code dataset and serve it over the classifier wire protocol."""

__version__ = "0.1.0"

LABELS = ("normal", "unused", "unreachable")
