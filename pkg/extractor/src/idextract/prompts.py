"""k-shot prompt construction from a demonstration pool.

A template is a format string with ``{input}`` and ``{output}`` slots.
Each prompt concatenates k filled demonstrations and the query item with
its output slot left empty, separated by blank lines. Demonstrations
within one prompt are always distinct; by default they may recur across
prompts, while ``unique_across_prompts`` partitions the pool so no
demonstration serves more than one prompt.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PoolExhaustedError

DEMO_SEPARATOR = "\n\n"


@dataclass
class PromptSpec:
    template: str
    k: int
    demo_pool: list[tuple[str, str]] = field(default_factory=list)
    unique_across_prompts: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")
        if "{input}" not in self.template:
            raise ValueError("template must contain an {input} slot")


def render_example(template: str, item_input: str, item_output: str = "") -> str:
    return template.format(input=item_input, output=item_output)


def build_prompts(spec: PromptSpec, eval_inputs: list[str]) -> list[str]:
    """One prompt per eval input, each with k seeded demonstrations."""
    n_eval = len(eval_inputs)
    pool = spec.demo_pool
    if spec.k > 0:
        if len(pool) < spec.k:
            raise PoolExhaustedError(f"pool of {len(pool)} cannot supply k={spec.k} demonstrations")
        if spec.unique_across_prompts and len(pool) < spec.k * n_eval:
            raise PoolExhaustedError(
                f"unique demonstrations need k*n_eval = {spec.k * n_eval} pool items, have {len(pool)}"
            )
    rng = np.random.default_rng(spec.seed)
    if spec.unique_across_prompts and spec.k > 0:
        order = rng.permutation(len(pool))
        picks = [order[i * spec.k : (i + 1) * spec.k] for i in range(n_eval)]
    else:
        picks = [rng.choice(len(pool), size=spec.k, replace=False) for _ in range(n_eval)]

    prompts = []
    for eval_input, chosen in zip(eval_inputs, picks):
        parts = [render_example(spec.template, *pool[j]) for j in chosen]
        parts.append(render_example(spec.template, eval_input, ""))
        prompts.append(DEMO_SEPARATOR.join(parts))
    return prompts
