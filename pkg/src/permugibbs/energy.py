"""Potentials, window Hamiltonians, swap energetics and growth thresholds.

The potential family is V(x) = alpha |x|^p with p > 1 (symmetric, strictly
convex), plus the degenerate V = 0 admitted only for the uniform-measure
demonstration.  Energies of a permutation are always taken over a finite
volume: the sum of V(sigma(x) - x) over the points of the volume whose image
also lies in the volume.

All logarithms here are natural logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .permutation import WindowPermutation, PermutationError


class EnergyError(ValueError):
    """Raised for invalid potential parameters or queries."""


@dataclass(frozen=True)
class Potential:
    """Jump-length potential; ``zero`` kind is flagged degenerate."""

    kind: str
    alpha: float = 1.0
    p: float = 2.0

    def __post_init__(self):
        if self.kind not in ("power", "zero"):
            raise EnergyError(f"unknown potential kind {self.kind!r}")
        if self.kind == "power":
            if self.alpha <= 0:
                raise EnergyError("power potential needs alpha > 0")
            if self.p <= 1:
                raise EnergyError("power potential needs p > 1 for strict convexity")

    @property
    def degenerate(self) -> bool:
        return self.kind == "zero"

    def __call__(self, x: float) -> float:
        if self.kind == "zero":
            return 0.0
        if self.p == 2.0:
            return self.alpha * x * x
        return self.alpha * abs(x) ** self.p

    def describe(self) -> str:
        if self.kind == "zero":
            return "zero"
        return f"power(alpha={self.alpha:g}, p={self.p:g})"


def power(alpha: float = 1.0, p: float = 2.0) -> Potential:
    return Potential("power", alpha, p)


def zero() -> Potential:
    return Potential("zero")


def potential_value(V: Potential, x: float) -> float:
    return V(x)


def hamiltonian(sigma: WindowPermutation, volume, V: Potential) -> float:
    """Energy of sigma in the volume: sum of V over jumps staying inside it."""
    vol = set(float(x) for x in volume)
    if not vol <= set(sigma.window):
        raise PermutationError("volume must be contained in the stored window")
    total = 0.0
    for y in vol:
        x = sigma.preimage(y)
        if x in vol:
            total += V(y - x)
    return total


def swap_delta(sigma: WindowPermutation, x: float, y: float, V: Potential) -> float:
    """Energy drop H(sigma) - H(swap(sigma, x, y)) from exchanging two images."""
    sx, sy = sigma.image(x), sigma.image(y)
    return V(sx - x) + V(sy - y) - V(sx - y) - V(sy - x)


def psi(V: Potential, d: float, x: float) -> float:
    """Superlinear-growth functional (V(x) + V(0) - 2 V((x+d)/2)) / (x ln x)."""
    if V.degenerate:
        raise EnergyError("psi is undefined for the zero potential")
    if d < 0:
        raise EnergyError("psi needs d >= 0")
    if x <= 1.0:
        raise EnergyError("psi needs x > 1")
    return (V(x) + V(0.0) - 2.0 * V((x + d) / 2.0)) / (x * math.log(x))


PSI_FLOOR = 1.0 + 1e-6


@dataclass(frozen=True)
class PsiThreshold:
    """Threshold c with psi_d(x) >= N for all x >= c, plus how it was found."""

    d: float
    N: float
    c_psi: float
    bracket: tuple
    tolerance: float


def c_psi(V: Potential, d: float, N: float, tolerance: float = 1e-9) -> PsiThreshold:
    """Locate sup{x : psi_d(x) < N} by geometric scan plus bisection.

    The scan walks a geometric grid from just above 1; if no grid point has
    psi below N the threshold is the floor 1 + 1e-6.  Otherwise the last
    sub-level grid point and its successor bracket the final crossing, which
    bisection then pins down.
    """
    if V.degenerate:
        raise EnergyError("c_psi is undefined for the zero potential")
    grid = []
    x = PSI_FLOOR
    while x < 1e12:
        grid.append(x)
        x *= 1.1
    below = [i for i, t in enumerate(grid) if psi(V, d, t) < N]
    if not below:
        return PsiThreshold(d, N, PSI_FLOOR, (PSI_FLOOR, PSI_FLOOR), tolerance)
    last = below[-1]
    if last == len(grid) - 1:
        raise EnergyError("psi stays below N beyond the scan range")
    lo, hi = grid[last], grid[last + 1]
    bracket = (lo, hi)
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if psi(V, d, mid) < N:
            lo = mid
        else:
            hi = mid
    return PsiThreshold(d, N, max(hi, PSI_FLOOR), bracket, tolerance)


def swap_lower_bound(V: Potential, v: float, w: float, y: float, z: float,
                     y_prime: float, z_prime: float) -> float:
    """Guaranteed energy drop of swapping jump sources v and y.

    For a permutation containing jumps v -> w and y -> z with
    v < y' <= z' < w, y' <= y and z <= z', the swap releases at least
    2 min{y'-v, w-z'} psi_{z'-y'}(w-v) ln(w-v).  The degenerate boundary
    cases y' = v or z' = w are admitted with value 0.
    """
    if not (v <= y_prime <= z_prime <= w and y_prime <= y and z <= z_prime):
        raise EnergyError("swap bound geometry violated")
    m = min(y_prime - v, w - z_prime)
    if m == 0.0:
        return 0.0
    if w - v <= 1.0:
        raise EnergyError("swap bound needs w - v > 1")
    return 2.0 * m * psi(V, z_prime - y_prime, w - v) * math.log(w - v)


def min_energy_rearrangement(sigma: WindowPermutation, volume) -> WindowPermutation:
    """The unique compatible minimizer: sort the in-volume jumps increasingly.

    The increasing matching of the in-volume domain onto the in-volume image
    minimizes the volume energy for every symmetric strictly convex
    potential, so no potential argument is needed.
    """
    vol = set(float(x) for x in volume)
    if not vol <= set(sigma.window):
        raise PermutationError("volume must be contained in the stored window")
    domain = sorted(x for x in vol if sigma.image(x) in vol)
    image = sorted(sigma.image(x) for x in domain)
    fwd = dict(sigma.fwd)
    for x, y in zip(domain, image):
        fwd[x] = y
    return WindowPermutation(sigma.ps, sigma.boundary, sigma.window,
                             volume=sigma.volume, forward=fwd)
