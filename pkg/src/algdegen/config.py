"""Run configuration shared by the graph builder, the scripts and the CLI."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .groebner import Budget

ENV_BUDGET = "ALGDEGEN_GB_BUDGET"


def budget_from_env(default: Budget | None = None) -> Budget:
    """Groebner budget from ``ALGDEGEN_GB_BUDGET``, written as
    ``pairs=5000,degree=12,seconds=60`` (any subset of the keys)."""
    base = default or Budget(max_seconds=120)
    text = os.environ.get(ENV_BUDGET, "").strip()
    if not text:
        return base
    kw = {"max_pairs": base.max_pairs, "max_degree": base.max_degree, "max_seconds": base.max_seconds}
    keys = {"pairs": ("max_pairs", int), "degree": ("max_degree", int), "seconds": ("max_seconds", float)}
    for item in text.split(","):
        if not item.strip():
            continue
        k, _, v = item.partition("=")
        k = k.strip()
        if k not in keys or not v.strip():
            raise ValueError(f"bad {ENV_BUDGET} entry {item!r}; keys are {', '.join(keys)}")
        attr, conv = keys[k]
        kw[attr] = conv(v)
    return Budget(**kw)


@dataclass
class GraphConfig:
    """Which non-degeneration arguments the graph builder runs."""

    use_invariants: bool = True
    use_s_tuples: bool = True
    use_rsets: bool = True
    use_propagation: bool = True
    budget: Budget = field(default_factory=budget_from_env)
    seed: int = 0
