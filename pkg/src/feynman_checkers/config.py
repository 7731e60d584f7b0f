"""Computation limits.

The defaults can be changed at runtime by mutating :data:`LIMITS`.  The CLI
also reads ``FEYNMAN_CHECKERS_TAU_MAX`` for its default ``--tau-max``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import ResourceLimitError

TAU_MAX_ENV = "FEYNMAN_CHECKERS_TAU_MAX"


@dataclass
class Limits:
    float_tau: int = 5000
    exact_tau: int = 500
    oracle_tau: int = 16

    def check(self, tau: int, mode: str) -> None:
        cap = {"float": self.float_tau, "exact": self.exact_tau, "oracle": self.oracle_tau}[mode]
        if tau > cap:
            raise ResourceLimitError(f"tau={tau} exceeds the {mode} limit {cap}")


LIMITS = Limits()


def env_tau_max(default: int) -> int:
    raw = os.environ.get(TAU_MAX_ENV)
    if not raw:
        return default
    return int(raw)
