"""Model parameters for the two-population entry/exit dynamics.

Each population i has an adjustment speed gamma_i, a tolerance level tau_i,
a population size N_i, and an entry cap K_i.  The caps define the rectangle
D = [0, K1] x [0, K2] that absorbs every orbit in one step.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

CANONICAL_GAMMA = 1.0
CANONICAL_TAU = 4.0
CANONICAL_N = 1.5


@dataclass(frozen=True)
class ModelParams:
    gamma1: float
    gamma2: float
    tau1: float
    tau2: float
    n1: float
    n2: float
    k1: float
    k2: float

    def __post_init__(self) -> None:
        for name in ("gamma1", "gamma2", "tau1", "tau2", "n1", "n2", "k1", "k2"):
            value = getattr(self, name)
            if not value > 0.0:
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        # caps above the population size would let the cap never bind; disallowed
        if self.k1 > self.n1:
            raise ValueError(f"k1 must satisfy k1 <= n1, got k1={self.k1!r} > n1={self.n1!r}")
        if self.k2 > self.n2:
            raise ValueError(f"k2 must satisfy k2 <= n2, got k2={self.k2!r} > n2={self.n2!r}")

    @property
    def symmetric(self) -> bool:
        """True when both groups share gamma, tau and N (caps may differ)."""
        return (
            self.gamma1 == self.gamma2
            and self.tau1 == self.tau2
            and self.n1 == self.n2
        )

    @property
    def fully_symmetric(self) -> bool:
        return self.symmetric and self.k1 == self.k2

    def swapped(self) -> "ModelParams":
        """Exchange the roles of the two groups."""
        return ModelParams(
            gamma1=self.gamma2, gamma2=self.gamma1,
            tau1=self.tau2, tau2=self.tau1,
            n1=self.n2, n2=self.n1,
            k1=self.k2, k2=self.k1,
        )

    def with_caps(self, k1: float, k2: float) -> "ModelParams":
        return replace(self, k1=k1, k2=k2)


def canonical(k1: float = 1.0, k2: float = 1.0) -> ModelParams:
    """Benchmark parameter set gamma=1, tau=4, N=1.5 with the given caps."""
    return ModelParams(
        gamma1=CANONICAL_GAMMA, gamma2=CANONICAL_GAMMA,
        tau1=CANONICAL_TAU, tau2=CANONICAL_TAU,
        n1=CANONICAL_N, n2=CANONICAL_N,
        k1=k1, k2=k2,
    )


def symmetric(k: float) -> ModelParams:
    """Canonical parameters with equal caps K1 = K2 = k."""
    return canonical(k, k)
