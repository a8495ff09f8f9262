"""Exact enumeration and swap-Metropolis sampling of finite-volume laws.

Conditioned on a boundary condition off a finite volume, a permutation is
free exactly on the in-volume domain D (volume points whose boundary image
stays in the volume), which it must biject onto the in-volume image set I.
Small domains are enumerated exactly, with weights handled in the log
domain; larger ones are sampled by a Metropolis chain whose proposal swaps
the images of a uniformly chosen ordered pair of domain points.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .energy import Potential
from .permutation import Boundary, WindowPermutation

ENUMERATION_CAP = 9


class SamplerError(ValueError):
    """Raised for invalid sampler configuration or oversized enumerations."""


def compatible_domain_image(bc: Boundary, volume):
    """Domain D and image I of the free part of boundary-compatible maps."""
    vol = sorted(float(x) for x in volume)
    lo, hi = vol[0], vol[-1]
    vset = set(vol)
    domain = tuple(x for x in vol if lo <= bc.image(x) <= hi and bc.image(x) in vset)
    image = tuple(y for y in vol if lo <= bc.preimage(y) <= hi and bc.preimage(y) in vset)
    return domain, image


class TableState:
    """Read-only view of one enumerated permutation."""

    def __init__(self, table: "SpecificationTable", idx: int):
        self._t = table
        self.index = idx
        self._state = table.states[idx]
        self._inv = None

    def image_of(self, x: float) -> float:
        pos = self._t._dpos.get(x)
        if pos is None:
            return self._t.boundary.image(x)
        return self._t.image[self._state[pos]]

    def preimage_of(self, y: float) -> float:
        ipos = self._t._ipos.get(y)
        if ipos is None:
            return self._t.boundary.preimage(y)
        if self._inv is None:
            inv = [0] * len(self._state)
            for i, j in enumerate(self._state):
                inv[j] = i
            self._inv = inv
        return self._t.domain[self._inv[ipos]]

    @property
    def assignment(self) -> dict:
        return {x: self._t.image[j] for x, j in zip(self._t.domain, self._state)}


@dataclass
class SpecificationTable:
    """Every boundary-compatible permutation of a volume, with exact weights.

    States are image-index tuples against the sorted image set, listed in
    lexicographic order; probabilities are normalized in the log domain.
    """

    boundary: Boundary
    volume: tuple
    potential: Potential
    domain: tuple
    image: tuple
    states: list
    energies: np.ndarray
    log_z: float
    probabilities: np.ndarray
    _dpos: dict = field(repr=False, default=None)
    _ipos: dict = field(repr=False, default=None)

    def __post_init__(self):
        self._dpos = {x: i for i, x in enumerate(self.domain)}
        self._ipos = {y: j for j, y in enumerate(self.image)}

    @property
    def z(self) -> float:
        return math.exp(self.log_z)

    @property
    def flow(self):
        return self.boundary.flow()

    def state_view(self, idx: int) -> TableState:
        return TableState(self, idx)

    def distribution(self) -> dict:
        return {s: float(p) for s, p in zip(self.states, self.probabilities)}

    def probability_of(self, predicate) -> float:
        """Total probability of states satisfying the predicate."""
        total = 0.0
        for idx in range(len(self.states)):
            if predicate(self.state_view(idx)):
                total += self.probabilities[idx]
        return float(total)

    def permutation_at(self, idx: int) -> WindowPermutation:
        """Materialize state idx as a full window permutation."""
        fwd = {x: self.boundary.image(x) for x in self.volume}
        fwd.update(self.state_view(idx).assignment)
        return WindowPermutation(self.boundary.ps, self.boundary, self.volume,
                                 volume=self.volume, forward=fwd)


def _logsumexp(a: np.ndarray) -> float:
    m = float(np.max(a))
    if not math.isfinite(m):
        return m
    return m + math.log(float(np.sum(np.exp(a - m))))


def enumerate_compatible(bc: Boundary, volume, V: Potential,
                         cap: int = ENUMERATION_CAP) -> SpecificationTable:
    """Build the full specification table for the volume.

    Raises when the free domain exceeds ``cap`` points (cap! states).
    """
    domain, image = compatible_domain_image(bc, volume)
    if len(domain) != len(image):
        raise SamplerError("domain and image sizes differ; boundary is inconsistent")
    m = len(domain)
    if m > cap:
        raise SamplerError(
            f"domain has {m} points; exact enumeration is capped at {cap} "
            f"({math.factorial(cap)} states)")
    d_arr = np.array(domain, dtype=float)
    i_arr = np.array(image, dtype=float)
    states = list(itertools.permutations(range(m)))
    if m == 0:
        energies = np.zeros(1)
        states = [()]
    else:
        perm_matrix = np.array(states, dtype=np.int64)
        jumps = i_arr[perm_matrix] - d_arr[None, :]
        if V.kind == "zero":
            energies = np.zeros(len(states))
        elif V.p == 2.0:
            energies = V.alpha * np.sum(jumps * jumps, axis=1)
        else:
            energies = V.alpha * np.sum(np.abs(jumps) ** V.p, axis=1)
    logw = -energies
    log_z = _logsumexp(logw)
    probs = np.exp(logw - log_z)
    return SpecificationTable(
        boundary=bc, volume=tuple(sorted(float(x) for x in volume)),
        potential=V, domain=domain, image=image, states=states,
        energies=energies, log_z=log_z, probabilities=probs)


def exact_probability(table: SpecificationTable, predicate) -> float:
    return table.probability_of(predicate)


# ---------------------------------------------------------------------------
# empirical distributions
# ---------------------------------------------------------------------------

class EmpiricalDistribution:
    """Keyed sample frequencies with batch-means error estimates."""

    def __init__(self, batches=None, batch_totals=None):
        self.batches: list[Counter] = batches or []
        self.batch_totals: list[int] = batch_totals or [sum(b.values()) for b in self.batches]

    @property
    def total(self) -> int:
        return sum(self.batch_totals)

    @property
    def counts(self) -> Counter:
        merged = Counter()
        for b in self.batches:
            merged.update(b)
        return merged

    def freq(self, key) -> float:
        n = self.total
        return sum(b.get(key, 0) for b in self.batches) / n if n else 0.0

    def distribution(self) -> dict:
        n = self.total
        return {k: v / n for k, v in self.counts.items()}

    def stderr(self, key) -> float:
        """Batch-means standard error of the frequency of ``key``."""
        ps = [b.get(key, 0) / n for b, n in zip(self.batches, self.batch_totals) if n]
        if len(ps) < 2:
            return float("inf")
        mean = sum(ps) / len(ps)
        var = sum((p - mean) ** 2 for p in ps) / (len(ps) - 1)
        return math.sqrt(var / len(ps))

    def effective_samples(self, key) -> float:
        """Autocorrelation-adjusted sample count for one frequency."""
        p = self.freq(key)
        se = self.stderr(key)
        if se == 0.0 or p in (0.0, 1.0):
            return float(self.total)
        return min(float(self.total), p * (1.0 - p) / (se * se))

    def merge(self, other: "EmpiricalDistribution") -> "EmpiricalDistribution":
        return EmpiricalDistribution(self.batches + other.batches,
                                     self.batch_totals + other.batch_totals)


def tv_distance(p, q) -> float:
    """Total variation distance between two keyed distributions.

    Inputs are mappings from keys to nonnegative weights; each side is
    normalized by its own total mass.
    """
    sp, sq = sum(p.values()), sum(q.values())
    if sp <= 0 or sq <= 0:
        raise SamplerError("tv_distance needs nonempty distributions")
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0) / sp - q.get(k, 0) / sq) for k in keys)


# ---------------------------------------------------------------------------
# Metropolis swap chain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainConfig:
    """Swap-chain run length, seeded deterministically."""

    seed: int
    steps: int
    burn_in: int = 0
    thinning: int = 1
    batches: int = 20

    def __post_init__(self):
        if self.burn_in < 0 or self.steps <= self.burn_in:
            raise SamplerError("need steps > burn_in >= 0")
        if self.thinning < 1:
            raise SamplerError("thinning must be >= 1")
        if self.batches < 2:
            raise SamplerError("need at least 2 batches")

    @property
    def kept(self) -> int:
        return (self.steps - self.burn_in) // self.thinning


class ChainState:
    """Read-only view of the running chain handed to observables."""

    def __init__(self, domain, image, boundary):
        self.domain = domain
        self.image = image
        self.boundary = boundary
        self.perm = list(range(len(domain)))
        self.inv = list(range(len(domain)))
        self._dpos = {x: i for i, x in enumerate(domain)}
        self._ipos = {y: j for j, y in enumerate(image)}

    def image_of(self, x: float) -> float:
        pos = self._dpos.get(x)
        if pos is None:
            return self.boundary.image(x)
        return self.image[self.perm[pos]]

    def preimage_of(self, y: float) -> float:
        ipos = self._ipos.get(y)
        if ipos is None:
            return self.boundary.preimage(y)
        return self.domain[self.inv[ipos]]

    def key(self) -> tuple:
        """The state as an image-index tuple, matching table state keys."""
        return tuple(self.perm)


def state_key(state: ChainState) -> tuple:
    """Default observable: the full assignment as an index tuple."""
    return state.key()


def mcmc_run(bc: Boundary, volume, V: Potential, cfg: ChainConfig,
             observables=None) -> dict:
    """Run the swap chain and tally observables over kept samples.

    The chain starts from the boundary restriction (always compatible),
    proposes a uniform ordered pair of domain points, and accepts the image
    swap with the Metropolis probability for the energy difference of the
    four affected jumps.  Transpositions generate all bijections and
    rejections make the chain aperiodic, so the empirical law converges to
    the exact specification.  Runs are reproducible from the seed.

    Returns a dict mapping observable names to EmpiricalDistributions.
    """
    domain, image = compatible_domain_image(bc, volume)
    if len(domain) < 2:
        raise SamplerError("need at least 2 free domain points to sample")
    obs = observables if observables is not None else {"state": state_key}
    state = ChainState(domain, image, bc)
    # initial assignment = boundary restriction
    for i, x in enumerate(domain):
        state.perm[i] = state._ipos[bc.image(x)]
    for i, j in enumerate(state.perm):
        state.inv[j] = i

    m = len(domain)
    d = [float(x) for x in domain]
    ivals = [float(y) for y in image]
    perm, inv = state.perm, state.inv
    quad = V.kind == "power" and V.p == 2.0
    alpha = V.alpha
    vfun = V

    rng = np.random.default_rng(cfg.seed)
    kept_total = cfg.kept
    base, extra = divmod(kept_total, cfg.batches)
    batch_sizes = [base + (1 if b < extra else 0) for b in range(cfg.batches)]
    tallies = {name: [Counter() for _ in range(cfg.batches)] for name in obs}

    kept = 0
    batch_idx = 0
    batch_fill = 0
    step = 0
    block = 1 << 15
    while step < cfg.steps:
        nb = min(block, cfg.steps - step)
        ii = rng.integers(0, m, size=nb)
        jj = rng.integers(0, m, size=nb)
        with np.errstate(divide="ignore"):
            lu = np.log(rng.random(size=nb))
        for t in range(nb):
            a = ii[t]
            b = jj[t]
            if a != b:
                pa = perm[a]
                pb = perm[b]
                xa = d[a]
                xb = d[b]
                ya = ivals[pa]
                yb = ivals[pb]
                if quad:
                    de = alpha * ((yb - xa) ** 2 + (ya - xb) ** 2
                                  - (ya - xa) ** 2 - (yb - xb) ** 2)
                else:
                    de = (vfun(yb - xa) + vfun(ya - xb)
                          - vfun(ya - xa) - vfun(yb - xb))
                if de <= 0.0 or lu[t] < -de:
                    perm[a] = pb
                    perm[b] = pa
                    inv[pb] = a
                    inv[pa] = b
            step += 1
            if step > cfg.burn_in and (step - cfg.burn_in) % cfg.thinning == 0:
                if kept < kept_total:
                    for name, fn in obs.items():
                        tallies[name][batch_idx][fn(state)] += 1
                    kept += 1
                    batch_fill += 1
                    if batch_fill >= batch_sizes[batch_idx] and batch_idx < cfg.batches - 1:
                        batch_idx += 1
                        batch_fill = 0
    out = {}
    for name in obs:
        sizes = [sum(c.values()) for c in tallies[name]]
        out[name] = EmpiricalDistribution(tallies[name], sizes)
    return out
