"""Configuration-driven command line entry point.

Subcommands wrap the library: ``points`` writes the point set, ``enumerate``
the exact specification table, ``sample`` an empirical law, ``verify`` runs
named checks, ``scan`` runs a volume or coupling scan.  Exit codes: 0 all
requested assertions passed, 1 a check failed, 2 configuration or usage
error.  A manifest records every output with the master seed and a config
hash, and identical config plus seed yields byte-identical files.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import serialize
from .energy import power, zero
from .experiments import (CHECK_IDS, ExperimentError, coupling_scan,
                          named_check, volume_scan)
from .permutation import PermutationError, boundary
from .pointset import PointSetError, generate
from .sampler import ChainConfig, SamplerError, enumerate_compatible, mcmc_run


class ConfigError(ValueError):
    """Raised when a configuration file fails validation."""


_POINTSET_KEYS = {"kind", "spacing", "rate", "seed", "points", "window"}
_DEFAULTS = {
    "pointset": {"kind": "integer-lattice", "window": (-64.0, 64.0)},
    "potential": {"kind": "power", "alpha": 1.0, "p": 2.0},
    "boundary": {"kind": "shift", "n": 0},
    "sampler": {"steps": 200_000, "burn_in": 5_000, "thinning": 1, "batches": 20},
    "run": {"master_seed": 0, "out": "out", "volumes": [[-4, 4]],
            "window": [-1, 1], "checks": [], "enumerate_cap": 9},
}


def load_config(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with p.open("rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    return validate_config(raw)


def validate_config(raw: dict) -> dict:
    cfg = {}
    known = set(_DEFAULTS) | {"check"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    for section, defaults in _DEFAULTS.items():
        merged = dict(defaults)
        extra = raw.get(section, {})
        if not isinstance(extra, dict):
            raise ConfigError(f"section [{section}] must be a table")
        bad = set(extra) - (set(defaults) | (_POINTSET_KEYS if section == "pointset" else set()))
        if section == "boundary":
            bad -= {"overrides"}
        if bad:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(bad)}")
        merged.update(extra)
        cfg[section] = merged
    cfg["check"] = raw.get("check", {})
    if not isinstance(cfg["check"], dict):
        raise ConfigError("section [check] must be a table of tables")
    for cid in cfg["run"]["checks"]:
        if cid not in CHECK_IDS:
            raise ConfigError(
                f"unknown check id {cid!r}; known: {', '.join(CHECK_IDS)}")
    for cid in cfg["check"]:
        if cid not in CHECK_IDS:
            raise ConfigError(f"parameters given for unknown check id {cid!r}")
    vols = cfg["run"]["volumes"]
    if not vols or not all(len(v) == 2 and v[0] <= v[1] for v in vols):
        raise ConfigError("run.volumes must be a list of [lo, hi] index ranges")
    if cfg["potential"]["kind"] not in ("power", "zero"):
        raise ConfigError(f"unknown potential kind {cfg['potential']['kind']!r}")
    return cfg


def config_hash(cfg: dict) -> str:
    canon = repr(sorted((k, sorted(v.items(), key=str) if isinstance(v, dict) else v)
                        for k, v in cfg.items()))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def job_seed(master_seed: int, name: str) -> int:
    digest = hashlib.sha256(f"{master_seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "big") % (2 ** 63)


def _build_pointset(cfg):
    ps_cfg = dict(cfg["pointset"])
    kind = ps_cfg.pop("kind")
    window = tuple(ps_cfg.pop("window"))
    if kind == "poisson" and "seed" not in ps_cfg:
        ps_cfg["seed"] = job_seed(cfg["run"]["master_seed"], "pointset")
    return generate(kind, window=window, **ps_cfg)


def _build_potential(cfg):
    pot = cfg["potential"]
    if pot["kind"] == "zero":
        return zero()
    return power(alpha=pot["alpha"], p=pot["p"])


def _build_boundary(cfg, ps):
    b = cfg["boundary"]
    overrides = None
    if "overrides" in b:
        overrides = {float(src): float(img) for src, img in b["overrides"]}
    return boundary(b["kind"], ps, n=int(b.get("n", 0)), overrides=overrides)


def _volume_points(ps, index_range):
    lo, hi = int(index_range[0]), int(index_range[1])
    return tuple(ps.window_by_index(lo, hi))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PERMUGIBBS_THREADS", "1")))
    except ValueError:
        return 1


def _chain_config(cfg, seed):
    s = cfg["sampler"]
    return ChainConfig(seed=seed, steps=int(s["steps"]), burn_in=int(s["burn_in"]),
                       thinning=int(s["thinning"]), batches=int(s["batches"]))


def cmd_points(cfg, out_dir):
    ps = _build_pointset(cfg)
    lo, hi = cfg["pointset"]["window"]
    path = out_dir / "points.csv"
    serialize.write_points_csv(path, ps.points_in(float(lo), float(hi)))
    return [path], True


def cmd_enumerate(cfg, out_dir):
    ps = _build_pointset(cfg)
    bc = _build_boundary(cfg, ps)
    vol = _volume_points(ps, cfg["run"]["volumes"][0])
    table = enumerate_compatible(bc, vol, _build_potential(cfg),
                                 cap=int(cfg["run"]["enumerate_cap"]))
    path = out_dir / "table.csv"
    serialize.write_table_csv(path, table)
    return [path], True


def cmd_sample(cfg, out_dir):
    ps = _build_pointset(cfg)
    bc = _build_boundary(cfg, ps)
    vol = _volume_points(ps, cfg["run"]["volumes"][0])
    chain = _chain_config(cfg, job_seed(cfg["run"]["master_seed"], "sample"))
    dists = mcmc_run(bc, vol, _build_potential(cfg), chain)
    path = out_dir / "empirical.csv"
    serialize.write_empirical_csv(path, "state", dists["state"])
    return [path], True


def cmd_verify(cfg, out_dir):
    ids = list(cfg["run"]["checks"]) or list(CHECK_IDS)
    master = cfg["run"]["master_seed"]

    def run_one(cid):
        return named_check(cid, cfg["check"].get(cid), seed=job_seed(master, cid))

    workers = min(_threads(), len(ids))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run_one, ids))
    else:
        reports = [run_one(cid) for cid in ids]
    path = out_dir / "report.csv"
    serialize.write_report_csv(path, reports)
    for rep in reports:
        status = "pass" if rep.passed else "FAIL"
        print(f"{rep.check_id}: {status} "
              f"(instances={len(rep.instances)}, worst_margin={rep.worst_margin:.3g}, "
              f"runtime={rep.runtime_s:.2f}s)")
    return [path], all(rep.passed for rep in reports)


def cmd_scan(cfg, out_dir):
    ps = _build_pointset(cfg)
    bc = _build_boundary(cfg, ps)
    volumes = [_volume_points(ps, rng) for rng in cfg["run"]["volumes"]]
    window = _volume_points(ps, cfg["run"]["window"])
    chain = _chain_config(cfg, job_seed(cfg["run"]["master_seed"], "scan"))
    scan = volume_scan(bc, volumes, window, _build_potential(cfg), chain)
    path = out_dir / "scan.csv"
    serialize.write_scan_csv(path, scan)
    return [path], True


_COMMANDS = {
    "points": cmd_points,
    "enumerate": cmd_enumerate,
    "sample": cmd_sample,
    "verify": cmd_verify,
    "scan": cmd_scan,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="permugibbs",
        description="Gibbs permutations of 1D point sets: enumeration, "
                    "sampling and verification")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="TOML configuration file")
    parser.add_argument("--seed", type=int, default=None,
                        help="override run.master_seed")
    parser.add_argument("--out", default=None, help="override run.out directory")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg["run"]["master_seed"] = args.seed
    out_dir = Path(args.out if args.out is not None else cfg["run"]["out"])

    try:
        files, ok = _COMMANDS[args.command](cfg, out_dir)
    except (ConfigError, ExperimentError, PointSetError, PermutationError,
            SamplerError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    serialize.write_manifest(out_dir, files, cfg["run"]["master_seed"],
                             config_hash(cfg))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
