"""
Named random streams derived from one master seed.

Every consumer draws from its own generator so adding draws in one place
never shifts the numbers another place sees.
"""

from dataclasses import dataclass, fields

import numpy as np


@dataclass
class Streams:
    init: np.random.Generator
    approach: np.random.Generator
    sampling: np.random.Generator
    device: np.random.Generator
    evaluation: np.random.Generator
    baseline: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "Streams":
        children = np.random.SeedSequence(seed).spawn(len(fields(cls)))
        return cls(*(np.random.default_rng(child) for child in children))
