"""CSV emission for point sets, tables, empirical laws, reports and scans.

All files use '.' decimals, LF newlines and UTF-8 headers; identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import math
from pathlib import Path


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(x)


def _open(path):
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p.open("w", encoding="utf-8", newline="\n")


def write_points_csv(path, points) -> None:
    with _open(path) as fh:
        fh.write("coord\n")
        for p in points:
            fh.write(_fmt(float(p)) + "\n")


def write_permutation_csv(path, sigma) -> None:
    """Core window dump, preceded by a comment naming the boundary."""
    with _open(path) as fh:
        fh.write(f"# boundary: {sigma.boundary.describe()}\n")
        fh.write("x,sigma_x\n")
        for x in sigma.window:
            fh.write(f"{_fmt(x)},{_fmt(sigma.fwd[x])}\n")


def write_table_csv(path, table) -> None:
    with _open(path) as fh:
        fh.write("state_id,energy,probability,flow\n")
        flow = _fmt(table.flow) if isinstance(table.flow, int) else _fmt(float(table.flow))
        for idx in range(len(table.states)):
            fh.write(f"{idx},{_fmt(float(table.energies[idx]))},"
                     f"{_fmt(float(table.probabilities[idx]))},{flow}\n")


def write_empirical_csv(path, name, dist) -> None:
    with _open(path) as fh:
        fh.write("observable,value,count,freq,stderr\n")
        counts = dist.counts
        for key in sorted(counts, key=str):
            fh.write(f"{name},\"{key}\",{counts[key]},"
                     f"{_fmt(dist.freq(key))},{_fmt(dist.stderr(key))}\n")


def write_report_csv(path, reports) -> None:
    with _open(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["check_id", "params", "bound", "observed", "margin", "pass"])
        for rep in reports:
            pstr = ";".join(f"{k}={v}" for k, v in sorted(rep.params.items(), key=str))
            for inst in rep.instances:
                writer.writerow([rep.check_id, f"{pstr}|{inst.description}",
                                 _fmt(inst.bound), _fmt(inst.observed),
                                 _fmt(inst.margin), str(inst.passed).lower()])


def write_scan_csv(path, scan) -> None:
    with _open(path) as fh:
        fh.write("pair,tv,stderr,exact,support\n")
        for label, tv, se, ex, size in zip(scan.labels, scan.tvs, scan.stderrs,
                                           scan.exact, scan.support_sizes):
            fh.write(f"\"{label}\",{_fmt(tv)},{_fmt(se)},{str(ex).lower()},{size}\n")


def file_sha256(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def write_manifest(out_dir, files, master_seed, config_hash) -> Path:
    """Checksum every produced file; the manifest itself is written last."""
    out = Path(out_dir)
    path = out / "manifest.csv"
    with _open(path) as fh:
        fh.write("file,sha256,master_seed,config_hash\n")
        for f in sorted(files, key=str):
            p = Path(f)
            try:
                rel = p.relative_to(out)
            except ValueError:
                rel = Path(p.name)
            fh.write(f"{rel},{file_sha256(out / rel)},{master_seed},{config_hash}\n")
    return path
