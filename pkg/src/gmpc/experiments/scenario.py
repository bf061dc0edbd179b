"""Scenario files: which protocol to run, at what size, against which attack."""
from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .. import params

PROTOCOLS = ("diameter", "election", "setup", "many", "general", "main", "shuffle")


@dataclass(frozen=True)
class Scenario:
    name: str
    protocol: str
    n: int
    kappa: int | None = None           # None: kappa_factor * ceil(log2 n)
    alpha: float = 0.1
    seed: int = 0
    trials: int = 10
    attack: str | None = None
    attack_params: dict = field(default_factory=dict)
    function: str = "concatenation"
    block_bytes: int = 8
    committees: str = "ideal"          # main protocol: "ideal" sampler or the "real" pipeline
    delta: int | None = None
    kappa_factor: int = 2              # c in kappa >= c * ceil(log2 n)
    bound: str | None = None           # named analytic bound for compare_bounds
    sweep: dict = field(default_factory=dict)    # parameter -> list of values
    options: dict = field(default_factory=dict)  # protocol-specific knobs
    record: str = "full"               # transcript mode

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}; known: {', '.join(PROTOCOLS)}")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        if not float(self.alpha) < 1 / 6:
            raise ValueError("alpha must be below 1/6")
        if self.sweep:
            return
        if self.kappa_value < self.kappa_factor * params.log2_ceil(self.n):
            raise ValueError(f"kappa={self.kappa_value} is below {self.kappa_factor} * ceil(log2 n) "
                             f"= {self.kappa_factor * params.log2_ceil(self.n)}")

    @property
    def kappa_value(self) -> int:
        return self.kappa if self.kappa is not None else self.kappa_factor * params.log2_ceil(self.n)

    def variants(self) -> list["Scenario"]:
        """One scenario per point of the sweep grid (itself if there is none)."""
        if not self.sweep:
            return [self]
        keys = sorted(self.sweep)
        return [replace(self, sweep={}, **dict(zip(keys, values)))
                for values in itertools.product(*(self.sweep[k] for k in keys))]

    def to_dict(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown scenario fields: {sorted(unknown)}")
        return cls(**data)


def load_scenario(path, *, seed: int | None = None, trials: int | None = None) -> Scenario:
    scenario = Scenario.from_dict(json.loads(Path(path).read_text()))
    changes = {k: v for k, v in (("seed", seed), ("trials", trials)) if v is not None}
    return replace(scenario, **changes) if changes else scenario


def trial_seed(scenario_seed: int, trial: int) -> int:
    """Independent 63-bit seed per trial, derived from the scenario seed."""
    words = [int(w) for w in np.random.SeedSequence([scenario_seed, trial]).generate_state(2)]
    return ((words[0] << 32) | words[1]) & ((1 << 63) - 1)
