"""Search and resource bounds used by the bounded decision procedures.

Every bounded verdict (Unknown, NoneWithinBounds) echoes the Bounds object it
was computed with, so reports are reproducible.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, asdict

DEFAULT_STEPS = 1_000_000

_override_steps = None


def _env_steps() -> int:
    raw = os.environ.get("DIAGCERT_BUDGET")
    if raw is None:
        return DEFAULT_STEPS
    try:
        value = int(raw)
    except ValueError:
        return DEFAULT_STEPS
    return value if value > 0 else DEFAULT_STEPS


def set_global_steps(value):
    """Override the global step budget (None restores the environment default)."""
    global _override_steps
    _override_steps = value


def current_steps() -> int:
    return _override_steps if _override_steps is not None else _env_steps()


@dataclass(frozen=True)
class Bounds:
    """Bounds for coefficient pools and search budgets.

    degree/height bound the coefficient pool used by element enumeration
    (monomial total degree <= degree, integer coefficients with |c| <= height).
    steps caps Groebner reduction steps; search_nodes caps the elementary
    operation search; iso_candidates caps the isomorphism candidate sweep;
    sample_elements caps annihilator-lattice sampling.
    """

    degree: int = 2
    height: int = 3
    steps: int = DEFAULT_STEPS
    search_nodes: int = 20_000
    iso_candidates: int = 4_000
    sample_elements: int = 500
    seed: int = 0

    def __post_init__(self):
        for name in ("degree", "height", "steps", "search_nodes",
                     "iso_candidates", "sample_elements"):
            if getattr(self, name) <= 0:
                raise ValueError(f"bound {name!r} must be positive")

    @staticmethod
    def default() -> "Bounds":
        return Bounds(steps=_env_steps())

    def to_json(self) -> dict:
        return asdict(self)
