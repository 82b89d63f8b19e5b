"""The bundled demo task and a generic CSV (input, output) loader."""
from __future__ import annotations

import csv

import numpy as np

VOWELS = set("aeiou")

DEMO_TEMPLATE = 'Count the vowels in "{input}". Even or odd? Answer: {output}'
DEMO_LABELS = ("even", "odd")


def demo_task(n_items: int, seed: int = 1234) -> list[tuple[str, str]]:
    """Vowel-parity items over pseudo-words of widely varying length.

    The length spread matters: the embedding-layer state of a prompt's
    final token varies only with sequence position, so diverse lengths
    keep that layer's point cloud non-degenerate.
    """
    rng = np.random.default_rng(seed)
    letters = np.array(list("abcdefghijklmnopqrstuvwxyz"))
    items = []
    for _ in range(n_items):
        length = int(rng.integers(4, 41))
        word = "".join(rng.choice(letters, size=length))
        n_vowels = sum(ch in VOWELS for ch in word)
        items.append((word, DEMO_LABELS[n_vowels % 2]))
    return items


def load_csv_dataset(path) -> list[tuple[str, str]]:
    """Rows of an (input, output) CSV with a header."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"input", "output"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected a CSV with 'input' and 'output' columns")
        return [(row["input"], row["output"]) for row in reader]


def split_pool_eval(items, n_eval: int):
    """Demo pool from the front of the list, eval items from the back."""
    if n_eval < 1 or n_eval >= len(items):
        raise ValueError(f"n_eval must be in [1, {len(items) - 1}], got {n_eval}")
    return items[: len(items) - n_eval], items[len(items) - n_eval :]


def label_set(items) -> list[str]:
    return sorted({output for _, output in items})
