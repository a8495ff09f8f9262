"""Permutations of a point set stored on a finite core window.

A :class:`WindowPermutation` holds an explicit forward/inverse map on a
finite core and equals an analytic boundary condition everywhere else.  Four
boundary kinds are supported: the n-shift (the ground states), reflection
about 0, the dyadic permutation of the integers, and a finite modification
of a shift.  On top of this the module computes flow through dual points,
truncated flow, a cycle/strand census, and the cut and pre-cut detectors.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .pointset import PointSet, PointSetError, DualPoint

INF = math.inf


class PermutationError(ValueError):
    """Raised for invalid permutation constructions or queries."""


# ---------------------------------------------------------------------------
# boundary conditions
# ---------------------------------------------------------------------------

class Boundary:
    """Analytic bijection of the point set used outside the core window."""

    kind = "abstract"

    def __init__(self, ps: PointSet):
        self.ps = ps

    def image(self, x: float) -> float:
        raise NotImplementedError

    def preimage(self, y: float) -> float:
        raise NotImplementedError

    def flow(self):
        """Common flow value: an integer, or +inf/-inf/nan for infinite flow."""
        raise NotImplementedError

    @property
    def finite_flow(self) -> bool:
        f = self.flow()
        return isinstance(f, int)

    def crossings_over(self, a: float, exclude=()):
        """All boundary jumps over ``a`` as (rightward, leftward) jump lists.

        Only defined for finite-flow kinds; sources listed in ``exclude`` are
        skipped (they are overridden by a core map).  Infinite-flow kinds
        raise, since their crossing sets are not finite.
        """
        raise PermutationError(
            f"crossing set over {a} is infinite for boundary kind {self.kind!r}")

    def describe(self) -> str:
        return self.kind


class ShiftBoundary(Boundary):
    """tau_n: every point maps to the n-th point to its right."""

    kind = "shift"

    def __init__(self, ps: PointSet, n: int):
        super().__init__(ps)
        self.n = int(n)

    def image(self, x):
        return x if self.n == 0 else self.ps.index_from(x, self.n)

    def preimage(self, y):
        return y if self.n == 0 else self.ps.index_from(y, -self.n)

    def flow(self):
        return self.n

    def crossings_over(self, a, exclude=()):
        right, left = [], []
        n = self.n
        if n > 0:
            for j in range(1, n + 1):
                x = self.ps.index_from(a, -j)
                if x not in exclude:
                    right.append((x, self.image(x)))
        elif n < 0:
            for j in range(1, -n + 1):
                x = self.ps.index_from(a, j)
                if x not in exclude:
                    left.append((x, self.image(x)))
        return right, left

    def describe(self):
        return f"shift({self.n})"


class ReflectionBoundary(Boundary):
    """x -> -x; requires the point set to be symmetric about 0."""

    kind = "reflection"

    def __init__(self, ps: PointSet, check_radius: float = None):
        super().__init__(ps)
        r = check_radius if check_radius is not None else max(
            abs(ps.window[0]), abs(ps.window[1]))
        pts = ps.points_in(-r, r)
        if set(pts) != {-p for p in pts}:
            raise PermutationError(
                "reflection boundary needs a point set symmetric about 0")

    def image(self, x):
        return -x

    def preimage(self, y):
        return -y

    def flow(self):
        # infinitely many crossings in both directions over every dual point
        return math.nan

    def describe(self):
        return "reflection"


def _dyadic_step(x: int) -> int:
    # largest power of 2 dividing |x|, for x != 0
    p = 1
    while (abs(x) // p) % 2 == 0:
        p *= 2
    return p


class DyadicBoundary(Boundary):
    """0 -> 0 and x -> x + 2 p_x with p_x the largest power of 2 dividing |x|."""

    kind = "dyadic"

    def __init__(self, ps: PointSet):
        super().__init__(ps)
        if ps.kind != "integer-lattice":
            raise PermutationError("dyadic boundary is defined on the integer lattice")

    def image(self, x):
        xi = int(x)
        if xi == 0:
            return 0.0
        return float(xi + 2 * _dyadic_step(xi))

    def preimage(self, y):
        yi = int(y)
        if yi == 0:
            return 0.0
        return float(yi - 2 * _dyadic_step(yi))

    def flow(self):
        # every jump is rightward, infinitely many cross each dual point
        return INF

    def describe(self):
        return "dyadic"


class FiniteModification(Boundary):
    """A shift remapped at finitely many points; stays a bijection."""

    kind = "finite-modification"

    def __init__(self, ps: PointSet, n: int, overrides: dict):
        super().__init__(ps)
        self.base = ShiftBoundary(ps, n)
        remap = {float(k): float(v) for k, v in overrides.items()}
        base_images = sorted(self.base.image(x) for x in remap)
        if base_images != sorted(remap.values()):
            raise PermutationError(
                "overrides must permute the base images of their sources")
        # drop no-op entries so functional equality matches entry equality
        self.overrides = {k: v for k, v in remap.items() if v != self.base.image(k)}
        self._inverse = {v: k for k, v in self.overrides.items()}

    @property
    def n(self):
        return self.base.n

    def image(self, x):
        if x in self.overrides:
            return self.overrides[x]
        return self.base.image(x)

    def preimage(self, y):
        if y in self._inverse:
            return self._inverse[y]
        return self.base.preimage(y)

    def flow(self):
        return self.base.n

    def crossings_over(self, a, exclude=()):
        skip = set(exclude) | set(self.overrides)
        right, left = self.base.crossings_over(a, exclude=skip)
        for x, y in self.overrides.items():
            if x in exclude:
                continue
            if x < a < y:
                right.append((x, y))
            elif y < a < x:
                left.append((x, y))
        return right, left

    def describe(self):
        ov = ",".join(f"{x:g}->{y:g}" for x, y in sorted(self.overrides.items()))
        return f"finite-modification(shift({self.base.n}); {ov})"


def boundary(kind: str, ps: PointSet, *, n: int = 0, overrides=None) -> Boundary:
    """Factory for boundary conditions by kind name."""
    if kind == "shift":
        return ShiftBoundary(ps, n)
    if kind == "reflection":
        return ReflectionBoundary(ps)
    if kind == "dyadic":
        return DyadicBoundary(ps)
    if kind == "finite-modification":
        return FiniteModification(ps, n, overrides or {})
    raise PermutationError(f"unknown boundary kind {kind!r}")


# ---------------------------------------------------------------------------
# window permutations
# ---------------------------------------------------------------------------

class WindowPermutation:
    """A bijection equal to the boundary outside a finite core window."""

    def __init__(self, ps: PointSet, bc: Boundary, window, volume=None,
                 forward: dict = None):
        self.ps = ps
        self.boundary = bc
        self.window = tuple(sorted(float(x) for x in window))
        if len(set(self.window)) != len(self.window):
            raise PermutationError("window contains duplicate points")
        vol = self.window if volume is None else tuple(sorted(float(x) for x in volume))
        if not set(vol) <= set(self.window):
            raise PermutationError("volume must be contained in the window")
        self.volume = vol
        if forward is None:
            self.fwd = {x: bc.image(x) for x in self.window}
        else:
            self.fwd = {float(k): float(v) for k, v in forward.items()}
            missing = set(self.window) - set(self.fwd)
            for x in missing:
                self.fwd[x] = bc.image(x)
        if len(set(self.fwd.values())) != len(self.fwd):
            raise PermutationError("forward map is not injective")
        # global bijectivity: the core must permute exactly the boundary's
        # image set, otherwise some point of X would lose its preimage
        if set(self.fwd.values()) != {bc.image(x) for x in self.fwd}:
            raise PermutationError(
                "core map must permute the boundary images of the window")
        self.inv = {v: k for k, v in self.fwd.items()}

    # full permutation of X: stored core map, boundary elsewhere
    def image(self, x: float) -> float:
        return self.fwd[x] if x in self.fwd else self.boundary.image(x)

    def preimage(self, y: float) -> float:
        return self.inv[y] if y in self.inv else self.boundary.preimage(y)

    def swap(self, x: float, y: float) -> "WindowPermutation":
        """Exchange the images of x and y; all other images unchanged."""
        if x not in self.fwd or y not in self.fwd:
            raise PermutationError("swap points must lie in the stored window")
        if x == y:
            return self
        fwd = dict(self.fwd)
        fwd[x], fwd[y] = fwd[y], fwd[x]
        out = object.__new__(WindowPermutation)
        out.ps, out.boundary = self.ps, self.boundary
        out.window, out.volume = self.window, self.volume
        out.fwd = fwd
        out.inv = {v: k for k, v in fwd.items()}
        return out

    def jumps(self):
        """The stored core jumps as (source, target) pairs."""
        return list(self.fwd.items())

    def __eq__(self, other):
        return (isinstance(other, WindowPermutation)
                and self.window == other.window
                and self.fwd == other.fwd
                and self.boundary is other.boundary)

    def __repr__(self):
        return (f"WindowPermutation({self.boundary.describe()}, "
                f"window=[{self.window[0]:g},{self.window[-1]:g}], "
                f"|W|={len(self.window)})")


def ground_state(ps: PointSet, n: int, window) -> WindowPermutation:
    """The n-shift restricted to the window, with matching boundary."""
    return WindowPermutation(ps, ShiftBoundary(ps, n), window)


def _boundaries_agree_outside(b1: Boundary, b2: Boundary, lo: float, hi: float) -> bool:
    """Whether two analytic boundaries coincide off the interval [lo, hi]."""
    def core(b):
        if isinstance(b, FiniteModification):
            outer = {x: y for x, y in b.overrides.items()
                     if not (lo <= x <= hi and lo <= y <= hi)}
            return ("shift", b.base.n, tuple(sorted(outer.items())))
        if isinstance(b, ShiftBoundary):
            return ("shift", b.n, ())
        return (b.kind,)
    return core(b1) == core(b2)


def is_compatible(sigma: WindowPermutation, bc: Boundary, volume) -> bool:
    """True iff sigma agrees with bc, in both directions, off the volume.

    Off the stored window sigma equals its own analytic boundary, so the
    check reduces to comparing the analytic parts plus the stored core maps.
    """
    vol = set(float(x) for x in volume)
    if not vol <= set(sigma.window):
        raise PermutationError("window too small to decide compatibility")
    if not _boundaries_agree_outside(bc, sigma.boundary,
                                     sigma.window[0], sigma.window[-1]):
        return False
    for x, y in sigma.fwd.items():
        if x not in vol and y != bc.image(x):
            return False
    for y, x in sigma.inv.items():
        if y not in vol and x != bc.preimage(y):
            return False
    return True


# ---------------------------------------------------------------------------
# flow
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FlowRecord:
    """Signed crossing counts of a permutation over one dual point.

    ``f_plus``/``f_minus`` are the rightward/leftward crossing counts; either
    may be ``inf`` when the boundary contributes infinitely many crossings.
    When a length cap was requested, ``truncated`` holds the always-finite
    signed count of crossings no longer than ``l_cap``.
    """

    f_plus: float
    f_minus: float
    l_cap: float = None
    truncated: int = None

    @property
    def finite(self) -> bool:
        return self.f_plus != INF and self.f_minus != INF

    @property
    def value(self):
        """F = F+ - F-, or the infinite marker when either side diverges."""
        if self.finite:
            return int(self.f_plus - self.f_minus)
        if self.f_plus == INF and self.f_minus == INF:
            return INF
        return INF if self.f_plus == INF else -INF


def _dual_value(a) -> float:
    return a.value if isinstance(a, DualPoint) else float(a)


def flow_at(sigma: WindowPermutation, a, l: float = None) -> FlowRecord:
    """Crossing counts of sigma over the dual point a.

    Core jumps are counted directly; the boundary's contribution comes from
    its closed form, so the result is exact for all four boundary kinds.
    Passing a length cap ``l`` additionally fills the truncated count.
    """
    av = _dual_value(a)
    plus = minus = 0
    for x, y in sigma.fwd.items():
        if x < av < y:
            plus += 1
        elif y < av < x:
            minus += 1
    trunc = None if l is None else truncated_flow(sigma, av, l)
    bc = sigma.boundary
    if bc.finite_flow:
        right, left = bc.crossings_over(av, exclude=sigma.fwd.keys())
        return FlowRecord(plus + len(right), minus + len(left), l, trunc)
    if bc.kind == "reflection":
        return FlowRecord(INF, INF, l, trunc)
    if bc.kind == "dyadic":
        # all dyadic jumps go right; leftward crossings come from the core only
        return FlowRecord(INF, minus, l, trunc)
    raise PermutationError(f"flow undecidable for boundary {bc.kind!r}")


def truncated_flow(sigma: WindowPermutation, a, l: float) -> int:
    """Signed count of crossings over a with Euclidean jump length <= l."""
    if l < 0:
        raise PermutationError("length cap must be nonnegative")
    av = _dual_value(a)
    plus = minus = 0
    for x in sigma.ps.points_in(av - l, av):
        if x < av:
            y = sigma.image(x)
            if y > av and y - x <= l:
                plus += 1
    for x in sigma.ps.points_in(av, av + l):
        if x > av:
            y = sigma.image(x)
            if y < av and x - y <= l:
                minus += 1
    return plus - minus


# ---------------------------------------------------------------------------
# cycles and strands
# ---------------------------------------------------------------------------

@dataclass
class CycleCensus:
    """Decomposition of the core window into cycles and crossing strands."""

    finite_lengths: Counter = field(default_factory=Counter)
    strands_left_to_right: int = 0
    strands_right_to_left: int = 0
    cycles: list = field(default_factory=list)  # (classification, points-in-core)

    @property
    def finite_cycle_count(self) -> int:
        return sum(self.finite_lengths.values())


def _escape_direction(bc: Boundary) -> int:
    """Forward escape direction outside the sentinels: +1 right, -1 left, 0 none."""
    if isinstance(bc, (ShiftBoundary, FiniteModification)):
        n = bc.flow()
        return (n > 0) - (n < 0)
    if isinstance(bc, DyadicBoundary):
        return 1
    return 0  # reflection closes every orbit


def cycle_census(sigma: WindowPermutation, step_cap: int = None) -> CycleCensus:
    """Trace every core point's orbit and classify it.

    Orbits are followed through the full map (core plus analytic boundary).
    Once an orbit leaves the region containing the core window and all
    modified points, shift-like boundaries move it monotonically, so it is
    classified as escaping; reflection orbits always close.  Exceeding the
    step cap signals a logic error, not a classification.
    """
    cap = step_cap if step_cap is not None else max(100, 10 * len(sigma.window))
    bc = sigma.boundary
    special = set(sigma.window) | set(sigma.fwd.values())
    if isinstance(bc, FiniteModification):
        special |= set(bc.overrides) | set(bc.overrides.values())
    lo_sent, hi_sent = min(special), max(special)
    direction = _escape_direction(bc)

    census = CycleCensus()
    seen = set()
    for start in sigma.window:
        if start in seen:
            continue
        orbit = [start]
        outside = False
        fwd_escape = bwd_escape = 0
        # forward walk
        cur = start
        for _ in range(cap):
            cur = sigma.image(cur)
            if cur == start:
                break
            if cur not in sigma.fwd:
                outside = True
            orbit.append(cur)
            if direction > 0 and cur > hi_sent:
                fwd_escape = 1
                break
            if direction < 0 and cur < lo_sent:
                fwd_escape = -1
                break
        else:
            raise PermutationError("orbit tracing exceeded the step cap")
        if fwd_escape != 0:
            # backward walk to collect the rest of the strand
            cur = start
            for _ in range(cap):
                cur = sigma.preimage(cur)
                if cur not in sigma.fwd:
                    outside = True
                orbit.append(cur)
                if direction > 0 and cur < lo_sent:
                    bwd_escape = -1
                    break
                if direction < 0 and cur > hi_sent:
                    bwd_escape = 1
                    break
            else:
                raise PermutationError("orbit tracing exceeded the step cap")
        core_points = [p for p in orbit if p in sigma.fwd]
        seen.update(core_points)
        if fwd_escape == 0:
            length = len(orbit)
            census.finite_lengths[length] += 1
            census.cycles.append(("finite" if not outside else "boundary-periodic",
                                  core_points))
        elif fwd_escape > 0:
            if bwd_escape >= 0:
                raise PermutationError("strand escapes rightward at both ends")
            census.strands_left_to_right += 1
            census.cycles.append(("escapes-right", core_points))
        else:
            if bwd_escape <= 0:
                raise PermutationError("strand escapes leftward at both ends")
            census.strands_right_to_left += 1
            census.cycles.append(("escapes-left", core_points))
    return census


# ---------------------------------------------------------------------------
# cuts and pre-cuts
# ---------------------------------------------------------------------------

def crossing_jumps(sigma: WindowPermutation, a):
    """All jumps of sigma over a as (rightward, leftward) lists.

    Complete for finite-flow boundaries: core jumps are scanned directly and
    the boundary supplies its finitely many crossings in closed form.
    """
    av = _dual_value(a)
    bc = sigma.boundary
    if not bc.finite_flow:
        raise PermutationError("cut detection needs a finite-flow boundary")
    right, left = bc.crossings_over(av, exclude=sigma.fwd.keys())
    for x, y in sigma.fwd.items():
        if x < av < y:
            right.append((x, y))
        elif y < av < x:
            left.append((x, y))
    return right, left


def is_cut(sigma: WindowPermutation, a) -> bool:
    """True iff the crossing pattern over a is exactly the n prescribed jumps.

    For flow n >= 0 these are a_{-n} -> a_1 through a_{-1} -> a_n with no
    leftward crossings; for n < 0 the directions are reversed.  For n = 0 a
    cut simply has no jumps over a at all.
    """
    av = _dual_value(a)
    right, left = crossing_jumps(sigma, av)
    n = sigma.boundary.flow()
    ps = sigma.ps
    if n >= 0:
        if len(left) != 0 or len(right) != n:
            return False
        required = {(ps.index_from(av, -j), ps.index_from(av, n + 1 - j))
                    for j in range(1, n + 1)}
        return {(x, y) for x, y in right} == required
    m = -n
    if len(right) != 0 or len(left) != m:
        return False
    required = {(ps.index_from(av, j), ps.index_from(av, -(m + 1 - j)))
                for j in range(1, m + 1)}
    return {(x, y) for x, y in left} == required


def is_pre_cut(sigma: WindowPermutation, a, k: int) -> bool:
    """True iff every a-relevant jump lies within {a_{-k}, ..., a_k}.

    Relevant jumps are those over a, those starting from the |n| points the
    prescribed cut jumps start from, and those ending at the |n| points they
    end at, where n is the flow.
    """
    if k < 1:
        raise PermutationError("pre-cut needs k >= 1")
    av = _dual_value(a)
    ps = sigma.ps
    n = sigma.boundary.flow()
    if not isinstance(n, int):
        raise PermutationError("pre-cut detection needs a finite-flow boundary")
    lo, hi = ps.index_from(av, -k), ps.index_from(av, k)
    right, left = crossing_jumps(sigma, av)
    relevant = list(right) + list(left)
    js = range(1, abs(n) + 1)
    if n >= 0:
        sources = [ps.index_from(av, -j) for j in js]
        targets = [ps.index_from(av, j) for j in js]
    else:
        sources = [ps.index_from(av, j) for j in js]
        targets = [ps.index_from(av, -j) for j in js]
    relevant += [(x, sigma.image(x)) for x in sources]
    relevant += [(sigma.preimage(y), y) for y in targets]
    return all(lo <= x <= hi and lo <= y <= hi for x, y in relevant)
