"""Locally finite bi-infinite point sets on the real line.

A point set is addressed through a bi-infinite integer index: ``point_at(i)``
is strictly increasing in ``i`` and every bounded interval contains finitely
many points.  Four kinds are supported: the integer lattice, a scaled
lattice, a homogeneous Poisson process grown outward from the origin, and an
explicit finite list continued periodically by its listed gaps.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass

import numpy as np

KINDS = ("integer-lattice", "scaled-lattice", "poisson", "explicit")


class PointSetError(ValueError):
    """Raised for invalid point-set parameters or queries."""


@dataclass(frozen=True)
class DualPoint:
    """Midpoint between two consecutive points of the set."""

    value: float
    left: float
    right: float


@dataclass(frozen=True)
class RegularityConstants:
    """Separation and growth constants near a reference position.

    ``exact`` is set for lattice kinds, where the defining suprema are
    attained within one period of the scan; otherwise the values are
    truncated estimates over the radius ``truncation_radius``.
    ``still_growing`` flags a truncated growth estimate whose maximum sits at
    the scan edge, i.e. the reported value may still increase with a larger
    radius.
    """

    c_s: float
    c_g: float
    truncation_radius: float
    exact: bool
    still_growing: bool = False


class PointSet:
    """A simple, locally finite, bi-infinite subset of the line.

    Instances are immutable after construction.  Lattice and explicit kinds
    are closed-form; the Poisson kind memoizes inter-arrival sums under a
    lock, so sharing across threads is safe.
    """

    def __init__(self, kind, *, spacing=1.0, rate=None, seed=None,
                 points=None, window=(-20.0, 20.0)):
        if kind not in KINDS:
            raise PointSetError(f"unknown point-set kind {kind!r}")
        lo, hi = float(window[0]), float(window[1])
        if not lo < hi:
            raise PointSetError(f"empty window {window!r}")
        self.kind = kind
        self.window = (lo, hi)
        self.spacing = float(spacing)
        self.rate = rate
        self.seed = seed
        if kind == "scaled-lattice" and self.spacing <= 0:
            raise PointSetError("spacing must be positive")
        if kind == "poisson":
            if rate is None or rate <= 0:
                raise PointSetError("poisson rate must be positive")
            if seed is None:
                raise PointSetError("poisson point sets require a seed")
            self._lock = threading.Lock()
            # gap streams keyed by (seed, direction); stream position is the
            # gap index, so extension order never affects values
            self._right_rng = np.random.Generator(
                np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
            self._left_rng = np.random.Generator(
                np.random.Philox(key=np.array([seed, 1], dtype=np.uint64)))
            self._rights: list[float] = []   # i-th point right of 0 at index i-1
            self._lefts: list[float] = []    # i-th point left of 0 at index i-1
            self._extend_poisson_to(lo, hi)
        if kind == "explicit":
            if points is None or len(points) < 2:
                raise PointSetError("explicit point sets need at least 2 points")
            base = [float(p) for p in points]
            if any(nxt <= prv for prv, nxt in zip(base, base[1:])):
                raise PointSetError("explicit points must be strictly increasing")
            self._base = tuple(base)
            self._period = base[-1] - base[0]

    # -- integer indexing -------------------------------------------------

    def point_at(self, i: int) -> float:
        """The i-th point of the set under the internal bi-infinite index."""
        if self.kind == "integer-lattice":
            return float(i)
        if self.kind == "scaled-lattice":
            return i * self.spacing
        if self.kind == "explicit":
            q, r = divmod(i, len(self._base) - 1)
            return self._base[r] + q * self._period
        # poisson: index 1 is the first point right of 0, index 0 the first left
        if i >= 1:
            self._ensure_right(i)
            return self._rights[i - 1]
        self._ensure_left(1 - i)
        return self._lefts[-i]

    def first_index_gt(self, a: float) -> int:
        """Smallest index i with point_at(i) > a."""
        if self.kind == "integer-lattice":
            return math.floor(a) + 1
        if self.kind == "scaled-lattice":
            i = math.floor(a / self.spacing) + 1
        elif self.kind == "explicit":
            q = math.floor((a - self._base[0]) / self._period)
            i = q * (len(self._base) - 1)
        else:
            if a >= 0:
                i = 1
                while self.point_at(i) <= a:
                    i += 1
                return i
            i = 0
            while self.point_at(i) > a:
                i -= 1
            return i + 1
        while self.point_at(i) <= a:
            i += 1
        while i > -10 ** 12 and self.point_at(i - 1) > a:
            i -= 1
        return i

    def contains(self, x: float) -> bool:
        i = self.first_index_gt(x)
        return self.point_at(i - 1) == x

    def points_in(self, lo: float, hi: float) -> list[float]:
        """All points in the closed interval [lo, hi], increasing."""
        if lo > hi:
            return []
        i = self.first_index_gt(lo)
        if self.point_at(i - 1) == lo:
            i -= 1
        out = []
        while True:
            p = self.point_at(i)
            if p > hi:
                break
            out.append(p)
            i += 1
        return out

    # -- relative indexing a_k --------------------------------------------

    def index_from(self, a: float, k: int) -> float:
        """The k-th point strictly right (k>0) or left (k<0) of a; a for k=0.

        k = 0 is only defined when a itself belongs to the set.
        """
        j = self.first_index_gt(a)
        member = self.point_at(j - 1) == a
        if k == 0:
            if not member:
                raise PointSetError(f"index 0 undefined: {a!r} not in the set")
            return float(a)
        if k > 0:
            return self.point_at(j + k - 1)
        base = j - 2 if member else j - 1
        return self.point_at(base + k + 1)

    def dual_points(self, lo: float, hi: float) -> list[DualPoint]:
        """Midpoints of consecutive point pairs inside [lo, hi]."""
        pts = self.points_in(lo, hi)
        if len(pts) < 2:
            raise PointSetError("dual points need at least 2 points in the window")
        return [DualPoint((x + y) / 2.0, x, y) for x, y in zip(pts, pts[1:])]

    def window_by_index(self, i_lo: int, i_hi: int, origin: float = 0.0) -> list[float]:
        """Points a_k for k in [i_lo, i_hi] relative to ``origin``.

        Index 0 refers to the origin itself and is included only when the
        origin is a point of the set.
        """
        if i_lo > i_hi:
            raise PointSetError("empty index range")
        member = self.contains(origin)
        ks = [k for k in range(i_lo, i_hi + 1) if k != 0 or member]
        return [self.index_from(origin, k) for k in ks]

    # -- poisson internals -------------------------------------------------

    def _ensure_right(self, n: int) -> None:
        if len(self._rights) >= n:
            return
        with self._lock:
            while len(self._rights) < n:
                gap = self._right_rng.standard_exponential() / self.rate
                last = self._rights[-1] if self._rights else 0.0
                self._rights.append(last + gap)

    def _ensure_left(self, n: int) -> None:
        if len(self._lefts) >= n:
            return
        with self._lock:
            while len(self._lefts) < n:
                gap = self._left_rng.standard_exponential() / self.rate
                last = self._lefts[-1] if self._lefts else 0.0
                self._lefts.append(last - gap)

    def _extend_poisson_to(self, lo: float, hi: float) -> None:
        while not self._rights or self._rights[-1] <= max(hi, 0.0):
            self._ensure_right(len(self._rights) + 1)
        while not self._lefts or self._lefts[-1] >= min(lo, 0.0):
            self._ensure_left(len(self._lefts) + 1)

    def __repr__(self):
        extra = {
            "integer-lattice": "",
            "scaled-lattice": f", spacing={self.spacing}",
            "poisson": f", rate={self.rate}, seed={self.seed}",
            "explicit": f", base={getattr(self, '_base', None)}",
        }[self.kind]
        return f"PointSet({self.kind}{extra})"


def generate(kind: str, window=(-20.0, 20.0), seed=None, **params) -> PointSet:
    """Construct a point set of the given kind, materialized over ``window``."""
    return PointSet(kind, window=window, seed=seed, **params)


def separation_constant(ps: PointSet, a: float, n: int) -> float:
    """Smallest c >= 1 with all consecutive gaps of Lambda(a, n) in [1/c, c].

    Lambda(a, n) collects the points a_{-|n|-1}, ..., a_{|n|+1}; the index 0
    entry is present exactly when a lies in the set.
    """
    m = abs(int(n)) + 1
    member = ps.contains(a)
    ks = [k for k in range(-m, m + 1) if k != 0 or member]
    pts = [ps.index_from(a, k) for k in ks]
    gaps = [y - x for x, y in zip(pts, pts[1:])]
    return max(1.0, max(max(g, 1.0 / g) for g in gaps))


def _growth_scan(ps: PointSet, a: float, truncation: float):
    if truncation <= 0:
        raise PointSetError("truncation radius must be positive")
    lo, hi = a - truncation, a + truncation
    dists = sorted(abs(x - a) for x in ps.points_in(lo, hi) if x != a)
    if not dists:
        raise PointSetError("no points within the truncation radius")
    best, best_i, count, i = 0.0, 0, 0, 0
    while i < len(dists):
        t = dists[i]
        while i < len(dists) and dists[i] == t:
            i += 1
        count = i
        ratio = count / t
        if ratio > best:
            best, best_i = ratio, count
    return best, best_i == len(dists)


def growth_constant(ps: PointSet, a: float, truncation: float) -> float:
    """Minimal c with #{x : 0 < |x-a| <= t} <= c*t for all t in (0, truncation].

    The count-to-radius ratio only increases at the finitely many radii
    |x - a|, so the scan over those breakpoints is exact on the interval.
    """
    best, _ = _growth_scan(ps, a, truncation)
    return best


def regularity_constants(ps: PointSet, a: float, n: int,
                         truncation: float) -> RegularityConstants:
    """Bundle c_s(a, n) and the truncated growth constant near ``a``.

    When the growth maximum sits at the scan edge of a non-lattice set the
    estimate may still rise with a larger radius; this is reported as a
    warning plus the ``still_growing`` flag, not an error.
    """
    c_s = separation_constant(ps, a, n)
    c_g, at_edge = _growth_scan(ps, a, truncation)
    exact = ps.kind in ("integer-lattice", "scaled-lattice")
    still = (not exact) and at_edge
    if still:
        warnings.warn(
            f"growth constant near {a:g} is still increasing at radius "
            f"{truncation:g}; the estimate {c_g:g} is a lower bound",
            stacklevel=2)
    return RegularityConstants(
        c_s=c_s, c_g=c_g, truncation_radius=float(truncation),
        exact=exact, still_growing=still)
