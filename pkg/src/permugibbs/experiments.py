"""Named verification checks, volume/coupling scans and cut statistics.

Each named check reproduces one finite-volume statement exactly where
enumeration is possible and by seeded Monte Carlo where it is not, and
returns a :class:`CheckReport` with one row per tested instance.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from . import pointset as pset
from .energy import Potential, power, zero, c_psi
from .permutation import (WindowPermutation, boundary, crossing_jumps,
                          flow_at, is_cut, is_pre_cut)
from .sampler import (ChainConfig, compatible_domain_image,
                      enumerate_compatible, mcmc_run, tv_distance,
                      ENUMERATION_CAP)

EQUALITY_TOL = 1e-12


class ExperimentError(ValueError):
    """Raised for unknown checks or invalid experiment parameters."""


@dataclass(frozen=True)
class CheckInstance:
    description: str
    bound: float
    observed: float
    margin: float
    passed: bool


@dataclass
class CheckReport:
    check_id: str
    params: dict
    instances: list = field(default_factory=list)
    runtime_s: float = 0.0
    seed: int = 0

    @property
    def passed(self) -> bool:
        return all(inst.passed for inst in self.instances)

    @property
    def worst_margin(self) -> float:
        return min((inst.margin for inst in self.instances), default=math.inf)

    def add(self, description, bound, observed, margin, passed):
        self.instances.append(CheckInstance(description, float(bound),
                                            float(observed), float(margin),
                                            bool(passed)))


def _merge(defaults: dict, params) -> dict:
    out = dict(defaults)
    for key, value in (params or {}).items():
        if key not in defaults:
            raise ExperimentError(f"unknown parameter {key!r}")
        out[key] = value
    return out


def _lattice(radius: float = 64.0) -> pset.PointSet:
    return pset.generate("integer-lattice", window=(-radius, radius))


def _volume(ps, lo: int, hi: int):
    return tuple(ps.window_by_index(int(lo), int(hi)))


def _jump_marginals(table):
    """Single and pairwise jump probabilities of an enumerated table."""
    single: dict = {}
    joint: dict = {}
    dom, img = table.domain, table.image
    for idx, state in enumerate(table.states):
        p = float(table.probabilities[idx])
        jumps = [(dom[i], img[state[i]]) for i in range(len(dom))]
        for j1 in jumps:
            single[j1] = single.get(j1, 0.0) + p
        for a in range(len(jumps)):
            for b in range(len(jumps)):
                if a != b:
                    key = (jumps[a], jumps[b])
                    joint[key] = joint.get(key, 0.0) + p
    return single, joint


# ---------------------------------------------------------------------------
# named checks
# ---------------------------------------------------------------------------

def _check_v0_uniform(report, params):
    ps = _lattice()
    vol = _volume(ps, *params["volume"])
    table = enumerate_compatible(boundary("shift", ps, n=0), vol, zero())
    target = 1.0 / len(table.states)
    tol = params["tolerance"]
    for idx, prob in enumerate(table.probabilities):
        dev = abs(float(prob) - target)
        report.add(f"state {idx} uniform", tol, dev, tol - dev, dev <= tol)


def _check_ground_state(report, params):
    ps = _lattice()
    for n in params["n_values"]:
        bc = boundary("shift", ps, n=n)
        for alpha in params["alphas"]:
            V = power(alpha=alpha, p=params["p"])
            for size in params["sizes"]:
                vol = tuple(float(x) for x in range(size))
                table = enumerate_compatible(bc, vol, V)
                ground = tuple(range(len(table.domain)))
                ground_idx = table.states.index(ground)
                e0 = float(table.energies[ground_idx])
                gaps = [float(e) - e0 for i, e in enumerate(table.energies)
                        if i != ground_idx]
                observed = min(gaps) if gaps else math.inf
                report.add(f"n={n} alpha={alpha:g} |vol|={size}",
                           0.0, observed, observed, observed > 0.0)


def _check_nested_jump(report, params):
    ps = _lattice()
    V = power(alpha=params["alpha"], p=params["p"])
    vol = _volume(ps, *params["volume"])
    table = enumerate_compatible(boundary("shift", ps, n=0), vol, V)
    _, joint = _jump_marginals(table)
    thresholds = {}
    tol = params["tolerance"]
    pts = list(vol)
    for x in pts:
        for y in pts:
            if y < x:
                continue
            d = y - x
            if d not in thresholds:
                thresholds[d] = c_psi(V, d, params["psi_level"]).c_psi
            l0 = thresholds[d]
            for v in pts:
                if v > x - 1:
                    continue
                for w in pts:
                    if w < y + 1 or w - v < l0:
                        continue
                    observed = joint.get(((x, y), (v, w)), 0.0)
                    bound = 1.0 / (w - v) ** 5
                    report.add(f"x={x:g} y={y:g} v={v:g} w={w:g}",
                               bound, observed, bound - observed,
                               observed <= bound + tol)


def _check_long_jump(report, params):
    ps = _lattice()
    V = power(alpha=params["alpha"], p=params["p"])
    vol = _volume(ps, *params["volume"])
    bc = boundary("shift", ps, n=0)
    table = enumerate_compatible(bc, vol, V)
    single, joint = _jump_marginals(table)
    tol = params["tolerance"]
    pts = list(vol)
    n = abs(bc.flow())
    for x in pts:
        span = ps.index_from(x, n) - ps.index_from(x, -n) if n else 0.0
        c_s = pset.separation_constant(ps, x, n)
        l0 = max(span + 1.0, c_psi(V, span, 2.0 * c_s).c_psi)
        for v in pts:
            if v > x:
                continue
            for w in pts:
                if w < x or w - v < l0:
                    continue
                p_vw = single.get((v, w), 0.0)
                p_wv = single.get((w, v), 0.0)
                p_both = joint.get(((v, w), (w, v)), 0.0)
                observed = p_vw + p_wv - p_both
                bound = 2.0 / (w - v) ** 3
                report.add(f"x={x:g} v={v:g} w={w:g}",
                           bound, observed, bound - observed,
                           observed <= bound + tol)


def _check_reflection_restriction(report, params):
    ps = _lattice()
    vol = _volume(ps, *params["volume"])
    if sorted(-x for x in vol) != list(vol):
        raise ExperimentError("reflection restriction needs a symmetric volume")
    V = power(alpha=params["alpha"], p=params["p"])
    t_refl = enumerate_compatible(boundary("reflection", ps), vol, V)
    t_tau0 = enumerate_compatible(boundary("shift", ps, n=0), vol, V)
    if t_refl.domain != t_tau0.domain or t_refl.image != t_tau0.image:
        raise ExperimentError("restricted state spaces unexpectedly differ")
    observed = tv_distance(t_refl.distribution(), t_tau0.distribution())
    tol = params["tolerance"]
    report.add("restricted law equals the 0-shift law", tol, observed,
               tol - observed, observed <= tol)


def _check_dyadic_decay(report, params):
    ps = _lattice(radius=max(64.0, 4.0 * 2 ** max(params["levels"])))
    V = power(alpha=params["alpha"], p=params["p"])
    bc = boundary("dyadic", ps)
    estimates = []
    step_table = params["steps"] if isinstance(params["steps"], dict) else {}
    for j in params["levels"]:
        r = 2 ** j
        vol = _volume(ps, -r, r)
        # TOML tables key by string, so accept either key type
        steps = step_table.get(j, step_table.get(str(j)))
        dom, _ = compatible_domain_image(bc, vol)
        if steps is None and len(dom) <= ENUMERATION_CAP:
            table = enumerate_compatible(bc, vol, V)
            value = table.probability_of(lambda s: s.image_of(0.0) == 0.0)
            estimates.append((j, value, 0.0, math.inf))
        else:
            if steps is None:
                steps = 4_000_000
            cfg = ChainConfig(seed=report.seed + j, steps=int(steps),
                              burn_in=params["burn_in"],
                              thinning=max(1, len(dom) // 2))
            obs = mcmc_run(bc, vol, V, cfg,
                           {"origin-fixed": lambda s: s.image_of(0.0) == 0.0})
            dist = obs["origin-fixed"]
            value = dist.freq(True)
            se = dist.stderr(True)
            ess = dist.effective_samples(True)
            estimates.append((j, value, se, ess))
            report.add(f"level {j}: effective samples", params["min_effective"],
                       ess, ess - params["min_effective"],
                       ess >= params["min_effective"])
    for (j1, v1, s1, _), (j2, v2, s2, _) in zip(estimates, estimates[1:]):
        sigma = math.hypot(s1, s2)
        decrease = v1 - v2
        report.add(f"origin-fixed probability drops {j1}->{j2} beyond 2 sigma",
                   2.0 * sigma, decrease, decrease - 2.0 * sigma,
                   decrease > 2.0 * sigma)


CHECKS = {
    "v0-uniform": (_check_v0_uniform, {
        "volume": (-2, 2), "tolerance": EQUALITY_TOL}),
    "ground-state": (_check_ground_state, {
        "n_values": (-2, -1, 0, 1, 2), "alphas": (0.5, 1.0), "p": 2.0,
        "sizes": (2, 3, 4, 5, 6, 7)}),
    "nested-jump": (_check_nested_jump, {
        "alpha": 10.0, "p": 2.0, "volume": (-3, 3), "psi_level": 3.0,
        "tolerance": EQUALITY_TOL}),
    "long-jump": (_check_long_jump, {
        "alpha": 10.0, "p": 2.0, "volume": (-3, 3), "tolerance": EQUALITY_TOL}),
    "reflection-restriction": (_check_reflection_restriction, {
        "volume": (-2, 2), "alpha": 1.0, "p": 2.0, "tolerance": EQUALITY_TOL}),
    "dyadic-decay": (_check_dyadic_decay, {
        "levels": (2, 3, 4), "alpha": 0.1, "p": 2.0,
        "steps": {3: 6_000_000, 4: 18_000_000}, "burn_in": 20_000,
        "min_effective": 100_000.0}),
}

CHECK_IDS = tuple(CHECKS)


def named_check(check_id: str, params=None, seed: int = 0) -> CheckReport:
    """Run one registered check and report per-instance margins."""
    if check_id not in CHECKS:
        raise ExperimentError(f"unknown check id {check_id!r}")
    fn, defaults = CHECKS[check_id]
    merged = _merge(defaults, params)
    report = CheckReport(check_id=check_id, params=merged, seed=seed)
    start = time.perf_counter()
    fn(report, merged)
    report.runtime_s = time.perf_counter() - start
    return report


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

@dataclass
class ScanResult:
    labels: list
    tvs: list
    stderrs: list
    exact: list
    support_sizes: list

    @property
    def final_tv(self) -> float:
        return self.tvs[-1] if self.tvs else 0.0


def _marginal_key(state, window_pts):
    return tuple((state.image_of(x), state.preimage_of(x)) for x in window_pts)


def _exact_marginal(table, window_pts) -> dict:
    out: dict = {}
    for idx in range(len(table.states)):
        key = _marginal_key(table.state_view(idx), window_pts)
        out[key] = out.get(key, 0.0) + float(table.probabilities[idx])
    return out


def _estimate_marginal(bc, vol, V, cfg, window_pts):
    """Window marginal of the volume law: exact table when small, else MCMC."""
    from .sampler import compatible_domain_image
    dom, _ = compatible_domain_image(bc, vol)
    if len(dom) <= ENUMERATION_CAP:
        table = enumerate_compatible(bc, vol, V)
        return _exact_marginal(table, window_pts), None
    obs = mcmc_run(bc, vol, V, cfg,
                   {"marginal": lambda s: _marginal_key(s, window_pts)})
    return obs["marginal"].distribution(), obs["marginal"]


def _tv_with_stderr(distA, empA, distB, empB):
    tv = tv_distance(distA, distB)
    var = 0.0
    for dist, emp, other in ((distA, empA, distB), (distB, empB, distA)):
        if emp is None or len(emp.batches) < 2:
            continue
        nb = len(emp.batches)
        # delete-one-batch jackknife against the other side held fixed
        tvs = []
        totals = emp.batch_totals
        full = sum(totals)
        merged = emp.counts
        for b_idx in range(nb):
            if totals[b_idx] == 0:
                continue
            rest = {k: merged.get(k, 0) - emp.batches[b_idx].get(k, 0)
                    for k in merged}
            denom = full - totals[b_idx]
            rest = {k: v / denom for k, v in rest.items() if v > 0}
            tvs.append(tv_distance(rest, other))
        if len(tvs) < 2:
            continue
        mean = sum(tvs) / len(tvs)
        var += (len(tvs) - 1) / len(tvs) * sum((t - mean) ** 2 for t in tvs)
    return tv, math.sqrt(var)


def _validate_nested(volumes):
    vols = [tuple(sorted(float(x) for x in v)) for v in volumes]
    for small, big in zip(vols, vols[1:]):
        if not set(small) <= set(big):
            raise ExperimentError("volumes must be nested by inclusion")
    return vols


def _per_volume_configs(cfg, count):
    """Accept one ChainConfig for all volumes or one per volume."""
    if isinstance(cfg, ChainConfig):
        return [cfg] * count
    cfgs = list(cfg)
    if len(cfgs) != count:
        raise ExperimentError("need one chain config per volume")
    return cfgs


def volume_scan(bc, volumes, window_pts, V: Potential, cfg) -> ScanResult:
    """Window marginals per volume and TVs between successive volumes.

    ``cfg`` is a ChainConfig shared by every volume or a sequence with one
    config per volume; seeds are offset per volume either way.
    """
    vols = _validate_nested(volumes)
    cfgs = _per_volume_configs(cfg, len(vols))
    window_pts = tuple(float(x) for x in window_pts)
    if not set(window_pts) <= set(vols[0]):
        raise ExperimentError("observation window must sit inside the smallest volume")
    marginals = []
    names = []
    exact_flags = []
    sizes = []
    for i, vol in enumerate(vols):
        base = cfgs[i]
        cfg_i = ChainConfig(seed=base.seed + i, steps=base.steps,
                            burn_in=base.burn_in, thinning=base.thinning,
                            batches=base.batches)
        dist, emp = _estimate_marginal(bc, vol, V, cfg_i, window_pts)
        marginals.append((dist, emp))
        names.append(f"[{vol[0]:g},{vol[-1]:g}]")
        exact_flags.append(emp is None)
        sizes.append(len(dist))
    result = ScanResult([], [], [], [], [])
    for i, ((dA, eA), (dB, eB)) in enumerate(zip(marginals, marginals[1:])):
        tv, se = _tv_with_stderr(dA, eA, dB, eB)
        result.labels.append(f"{names[i]}->{names[i + 1]}")
        result.tvs.append(tv)
        result.stderrs.append(se)
        result.exact.append(exact_flags[i] and exact_flags[i + 1])
        result.support_sizes.append(max(sizes[i], sizes[i + 1]))
    return result


def coupling_scan(bc_a, bc_b, volumes, window_pts, V: Potential,
                  cfg) -> ScanResult:
    """Per-volume TV between the window marginals of two boundary conditions.

    Both boundaries must carry the same finite flow; with different flows the
    laws converge to distinct limits and the comparison is rejected.  ``cfg``
    is shared or per-volume as in :func:`volume_scan`.
    """
    fa, fb = bc_a.flow(), bc_b.flow()
    if not (isinstance(fa, int) and isinstance(fb, int)):
        raise ExperimentError("coupling scan needs finite-flow boundaries")
    if fa != fb:
        raise ExperimentError(
            f"flows differ ({fa} vs {fb}); the volume laws converge to "
            "distinct limits, so a coupling comparison is meaningless")
    vols = _validate_nested(volumes)
    cfgs = _per_volume_configs(cfg, len(vols))
    window_pts = tuple(float(x) for x in window_pts)
    if not set(window_pts) <= set(vols[0]):
        raise ExperimentError("observation window must sit inside the smallest volume")
    result = ScanResult([], [], [], [], [])
    for i, vol in enumerate(vols):
        base = cfgs[i]
        cfg_a = ChainConfig(seed=base.seed + 2 * i, steps=base.steps,
                            burn_in=base.burn_in, thinning=base.thinning,
                            batches=base.batches)
        cfg_b = ChainConfig(seed=base.seed + 2 * i + 1, steps=base.steps,
                            burn_in=base.burn_in, thinning=base.thinning,
                            batches=base.batches)
        dA, eA = _estimate_marginal(bc_a, vol, V, cfg_a, window_pts)
        dB, eB = _estimate_marginal(bc_b, vol, V, cfg_b, window_pts)
        tv, se = _tv_with_stderr(dA, eA, dB, eB)
        result.labels.append(f"[{vol[0]:g},{vol[-1]:g}]")
        result.tvs.append(tv)
        result.stderrs.append(se)
        result.exact.append(eA is None and eB is None)
        result.support_sizes.append(max(len(dA), len(dB)))
    return result


# ---------------------------------------------------------------------------
# cut statistics
# ---------------------------------------------------------------------------

@dataclass
class CutStatistics:
    n: int
    samples: int
    flow_constant_everywhere: bool
    strand_counts_match: bool
    fraction_cut_left_half: float
    fraction_cut_right_half: float
    fraction_cut_both_halves: float
    mean_cut_count: float
    mean_precut_count: float


def count_strands_between(sigma: WindowPermutation, a, b, step_cap=10_000) -> int:
    """Number of distinct orbits crossing both dual points a < b.

    Requires both points to be cuts, so that orbits cannot recross either
    one; each crossing jump over the entry side is then traced forward until
    it clears the far side.  For flow n >= 0 strands enter rightward over a;
    for n < 0 they enter leftward over b.
    """
    av = a.value if hasattr(a, "value") else float(a)
    bv = b.value if hasattr(b, "value") else float(b)
    if av >= bv:
        raise ExperimentError("need a < b")
    n = flow_at(sigma, av).value
    if not isinstance(n, int):
        raise ExperimentError("strand counting needs finite flow")
    if n >= 0:
        entries = [x for x, _ in crossing_jumps(sigma, av)[0]]
        exited = lambda cur: cur > bv
        recrossed = lambda cur: cur < av
    else:
        entries = [x for x, _ in crossing_jumps(sigma, bv)[1]]
        exited = lambda cur: cur < av
        recrossed = lambda cur: cur > bv
    strands = 0
    for x in entries:
        cur = x
        for _ in range(step_cap):
            cur = sigma.image(cur)
            if exited(cur):
                strands += 1
                break
            if recrossed(cur):
                raise ExperimentError("orbit recrossed a supposed cut")
        else:
            raise ExperimentError("strand tracing exceeded the step cap")
    return strands


def cut_statistics(bc, volume, V: Potential, cfg: ChainConfig, k: int = 5,
                   halves=None) -> CutStatistics:
    """Sampled cut/pre-cut positions and strand counts for a finite-flow boundary."""
    n = bc.flow()
    if not isinstance(n, int):
        raise ExperimentError("cut statistics need a finite-flow boundary")
    vol = tuple(sorted(float(x) for x in volume))
    ps = bc.ps
    duals = [d for d in ps.dual_points(vol[0], vol[-1])]
    interior = [d for d in duals
                if vol[0] < d.value < vol[-1]]
    if halves is None:
        span = vol[-1] - vol[0]
        halves = ((vol[0], vol[0] + span / 4.0), (vol[-1] - span / 4.0, vol[-1]))

    def summary(state):
        fwd = {x: state.image_of(x) for x in vol}
        sigma = WindowPermutation(ps, bc, vol, forward=fwd)
        flows = [flow_at(sigma, d).value for d in interior]
        flow_ok = all(f == n for f in flows)
        cuts = tuple(d.value for d in interior if is_cut(sigma, d))
        precuts = tuple(d.value for d in interior
                        if vol[0] < ps.index_from(d.value, -k)
                        and ps.index_from(d.value, k) < vol[-1]
                        and is_pre_cut(sigma, d, k))
        strands_ok = True
        for i in range(len(cuts)):
            for j in range(i + 1, len(cuts)):
                if count_strands_between(sigma, cuts[i], cuts[j]) != abs(n):
                    strands_ok = False
        left = any(halves[0][0] <= c <= halves[0][1] for c in cuts)
        right = any(halves[1][0] <= c <= halves[1][1] for c in cuts)
        return (flow_ok, strands_ok, left, right, len(cuts), len(precuts))

    obs = mcmc_run(bc, vol, V, cfg, {"cuts": summary})["cuts"]
    total = obs.total
    flow_all = strand_all = True
    left_hits = right_hits = both_hits = 0
    cut_sum = precut_sum = 0
    for key, cnt in obs.counts.items():
        flow_ok, strands_ok, left, right, n_cuts, n_precuts = key
        flow_all &= flow_ok
        strand_all &= strands_ok
        left_hits += cnt * left
        right_hits += cnt * right
        both_hits += cnt * (left and right)
        cut_sum += cnt * n_cuts
        precut_sum += cnt * n_precuts
    return CutStatistics(
        n=n, samples=total,
        flow_constant_everywhere=flow_all,
        strand_counts_match=strand_all,
        fraction_cut_left_half=left_hits / total,
        fraction_cut_right_half=right_hits / total,
        fraction_cut_both_halves=both_hits / total,
        mean_cut_count=cut_sum / total,
        mean_precut_count=precut_sum / total)


# ---------------------------------------------------------------------------
# pre-cut window size
# ---------------------------------------------------------------------------

def k_threshold(n: int, c_n: float, V: Potential) -> int:
    """Smallest admissible pre-cut radius for flow n and regularity bound c_n.

    Evaluates the five-term maximum over the growth thresholds of the
    potential and returns its integer ceiling.
    """
    if V.degenerate:
        raise ExperimentError("k threshold is undefined for the zero potential")
    n = abs(int(n))
    terms = (
        n + 1,
        c_n * c_psi(V, n * c_n, 2.0 * c_n).c_psi,
        c_n * c_psi(V, 0.0, 2.0 * c_n).c_psi + n * c_n ** 2,
        24.0 * c_n ** 3,
        33.0 * n * c_n ** 2 + 1.0,
    )
    return int(math.ceil(max(terms) - 1e-9))
