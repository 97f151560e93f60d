"""Command-line front end.

Matrices are given by their row-major upper triangle, e.g. in JSON::

    {"pairs": [{"X": {"p": 3, "upper": [15, 0, 0, 5, 0, 1]},
                "Y": {"p": 3, "upper": [7, 0, 0, 12, 0, 8]}}]}

or as CSV rows holding the upper triangles of X then Y (6 values for 2x2
pairs, 12 for 3x3 pairs; one triangle per row for ``versions``).

Exit codes: 0 ok, 2 parse error, 3 domain error, 4 convergence error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError, InvalidInput, MultiplicityError
from .group import enumerate_versions
from .interp import SCHEMES, make_trajectory
from .manifold import MetricConfig
from .matcore import as_spd, sym_from_upper, upper_of, vee
from .srdist import k_sweep, sr_distance

FA_NOTE = {
    3: "standard 3x3 fractional anisotropy",
    2: "2x2 extension: sqrt(2) * ||lam - mean(lam)|| / ||lam||",
}

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 2, 3, 4


class ParseError(Exception):
    pass


def fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


# --------------------------------------------------------------------------- #
# input
# --------------------------------------------------------------------------- #


def _matrix_from_obj(obj: Any, where: str) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object with 'p' and 'upper'")
    if "upper" not in obj:
        if "matrix" in obj or "full" in obj:
            raise ParseError(f"{where}: full-matrix input is not accepted; give 'upper'")
        raise ParseError(f"{where}: missing field 'upper'")
    upper = obj["upper"]
    if not isinstance(upper, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in upper
    ):
        raise ParseError(f"{where}.upper: expected a list of numbers")
    p = obj.get("p")
    want = {2: 3, 3: 6}.get(p)
    if want is None:
        raise ParseError(f"{where}.p: must be 2 or 3, got {p!r}")
    if len(upper) != want:
        raise ParseError(f"{where}.upper: p={p} needs {want} values, got {len(upper)}")
    if not all(math.isfinite(v) for v in upper):
        raise ParseError(f"{where}.upper: non-finite value")
    return sym_from_upper(upper)


def _csv_rows(text: str) -> List[tuple]:
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [c.strip() for c in row]
        if not cells or all(c == "" for c in cells) or cells[0].startswith("#"):
            continue
        try:
            vals = [float(c) for c in cells if c != ""]
        except ValueError:
            if not rows and lineno == 1:
                continue  # header
            raise ParseError(f"line {lineno}: non-numeric field")
        if not all(math.isfinite(v) for v in vals):
            raise ParseError(f"line {lineno}: non-finite value")
        rows.append((lineno, vals))
    return rows


def _is_json(path: str, text: str) -> bool:
    if path.lower().endswith(".json"):
        return True
    if path.lower().endswith(".csv"):
        return False
    return text.lstrip().startswith(("{", "["))


def read_pairs(path: str) -> List[tuple]:
    text = _read(path)
    if _is_json(path, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"line {e.lineno} column {e.colno}: {e.msg}")
        items = data.get("pairs") if isinstance(data, dict) else data
        if not isinstance(items, list) or not items:
            raise ParseError("expected a non-empty list under 'pairs'")
        out = []
        for i, item in enumerate(items):
            if not isinstance(item, dict) or "X" not in item or "Y" not in item:
                raise ParseError(f"pairs[{i}]: expected an object with 'X' and 'Y'")
            X = _matrix_from_obj(item["X"], f"pairs[{i}].X")
            Y = _matrix_from_obj(item["Y"], f"pairs[{i}].Y")
            if X.shape != Y.shape:
                raise ParseError(f"pairs[{i}]: X and Y have different sizes")
            out.append((X, Y))
        return out
    out = []
    for lineno, vals in _csv_rows(text):
        if len(vals) not in (6, 12):
            raise ParseError(f"line {lineno}: expected 6 or 12 values, got {len(vals)}")
        h = len(vals) // 2
        out.append((sym_from_upper(vals[:h]), sym_from_upper(vals[h:])))
    if not out:
        raise ParseError("no pairs found")
    return out


def read_matrices(path: str) -> List[np.ndarray]:
    text = _read(path)
    if _is_json(path, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"line {e.lineno} column {e.colno}: {e.msg}")
        items = data.get("matrices") if isinstance(data, dict) else data
        if not isinstance(items, list) or not items:
            raise ParseError("expected a non-empty list under 'matrices'")
        return [_matrix_from_obj(m, f"matrices[{i}]") for i, m in enumerate(items)]
    out = []
    for lineno, vals in _csv_rows(text):
        if len(vals) not in (3, 6):
            raise ParseError(f"line {lineno}: expected 3 or 6 values, got {len(vals)}")
        out.append(sym_from_upper(vals))
    if not out:
        raise ParseError("no matrices found")
    return out


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}")


def _check_domain(pairs) -> None:
    for i, (X, Y) in enumerate(pairs):
        for name, M in (("X", X), ("Y", Y)):
            try:
                as_spd(M, name)
            except (DomainError, InvalidInput) as e:
                raise DomainError(f"record {i}: {e}")


# --------------------------------------------------------------------------- #
# per-record work (top-level so it pickles for process pools)
# --------------------------------------------------------------------------- #


def _frame_dict(f) -> Dict[str, Any]:
    return {"U": f.U.tolist(), "d": f.d.tolist()}


def _blocks_1based(c):
    return [[i + 1 for i in b] for b in c.blocks]


def distance_record(args) -> Dict[str, Any]:
    i, X, Y, cfg = args
    r = sr_distance(X, Y, cfg)
    c = r.curve
    curve = {"U": c.U.tolist(), "d": c.d.tolist(), "l": c.l.tolist(),
             "rotation_angle": c.rotation_angle, "scaling_norm": c.scaling_norm}
    if c.p == 3:
        curve["axis_angle"] = vee(c.A).tolist()
    else:
        curve["angle"] = vee(c.A)
    return {
        "index": i,
        "p": int(X.shape[0]),
        "distance": r.distance,
        "class_x": r.class_x.kind,
        "class_y": r.class_y.kind,
        "partition_x": _blocks_1based(r.class_x),
        "partition_y": _blocks_1based(r.class_y),
        "pair": {"X": _frame_dict(r.pair[0]), "Y": _frame_dict(r.pair[1])},
        "curve": curve,
        "ties": len(r.ties),
        "n_minimal": r.n_minimal,
        "involution": r.involution_flag,
        "near_multiplicity": r.near_multiplicity,
    }


def trajectory_record(args):
    i, X, Y, scheme, n, cfg = args
    return i, scheme, make_trajectory(X, Y, scheme, n, cfg)


def ksweep_record(args):
    i, X, Y, ks, cfg = args
    return i, k_sweep(X, Y, ks, cfg)


def _map(fn, jobs):
    try:
        workers = int(os.environ.get("SPDSR_THREADS", "1"))
    except ValueError:
        workers = 1
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


# --------------------------------------------------------------------------- #
# commands
# --------------------------------------------------------------------------- #


def _emit(text: str, out_dir, name: str) -> None:
    if out_dir is None:
        sys.stdout.write(text)
        return
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    (d / name).write_text(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _write_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def cmd_distance(ns, cfg) -> int:
    pairs = read_pairs(ns.input)
    _check_domain(pairs)
    recs = _map(distance_record, [(i, X, Y, cfg) for i, (X, Y) in enumerate(pairs)])
    if ns.format == "json":
        _emit(_json({"k": cfg.k, "results": recs}), ns.output, "distance.json")
        return EXIT_OK
    header = ["index", "p", "distance", "class_x", "class_y", "rotation_angle",
              "a1", "a2", "a3", "l1", "l2", "l3", "n_minimal", "involution",
              "near_multiplicity"]
    rows = []
    for r in recs:
        c = r["curve"]
        a = c["axis_angle"] if r["p"] == 3 else [c["angle"], "", ""]
        l = c["l"] + [""] * (3 - len(c["l"]))
        rows.append([r["index"], r["p"], r["distance"], r["class_x"], r["class_y"],
                     c["rotation_angle"], *a, *l, r["n_minimal"],
                     int(r["involution"]), int(r["near_multiplicity"])])
    _emit(_write_csv(header, rows), ns.output, "distance.csv")
    return EXIT_OK


def trajectory_columns(p: int) -> List[str]:
    entries = ["m11", "m12", "m13", "m22", "m23", "m33"] if p == 3 else ["m11", "m12", "m22"]
    return ["t", *entries, "det", "fa", "md", "angle"]


def trajectory_rows(traj) -> List[List[float]]:
    rows = []
    for j in range(len(traj)):
        rows.append([float(traj.t[j]), *map(float, upper_of(traj.matrices[j])),
                     float(traj.det[j]), float(traj.fa[j]), float(traj.md[j]),
                     float(traj.angle[j])])
    return rows


def cmd_interpolate(ns, cfg) -> int:
    if ns.output is None:
        raise ParseError("interpolate needs --output DIR")
    schemes = _schemes(ns.schemes)
    pairs = read_pairs(ns.input)
    _check_domain(pairs)
    jobs = [(i, X, Y, s, ns.samples, cfg) for i, (X, Y) in enumerate(pairs) for s in schemes]
    out = Path(ns.output)
    out.mkdir(parents=True, exist_ok=True)
    for i, scheme, traj in _map(trajectory_record, jobs):
        cols = trajectory_columns(traj.p)
        rows = trajectory_rows(traj)
        stem = f"pair{i:03d}_{scheme}"
        if ns.format == "csv":
            (out / f"{stem}.csv").write_text(_write_csv(cols, rows))
        else:
            recs = [
                {c: (None if isinstance(v, float) and math.isnan(v) else v)
                 for c, v in zip(cols, row)}
                for row in rows
            ]
            (out / f"{stem}.json").write_text(
                _json({"pair": i, "scheme": scheme, "p": traj.p,
                       "fa_definition": FA_NOTE[traj.p], "samples": recs})
            )
    return EXIT_OK


def cmd_versions(ns, cfg) -> int:
    mats = read_matrices(ns.input)
    for i, M in enumerate(mats):
        try:
            as_spd(M, "matrix")
        except (DomainError, InvalidInput) as e:
            raise DomainError(f"record {i}: {e}")
    recs = []
    for i, M in enumerate(mats):
        try:
            vs = enumerate_versions(M, cfg.tol_eq)
        except MultiplicityError as e:
            recs.append({"index": i, "p": int(M.shape[0]), "infinite_fiber": True,
                         "partition": [[j + 1 for j in b] for b in e.partition]})
            continue
        recs.append({"index": i, "p": int(M.shape[0]), "count": len(vs),
                     "versions": [_frame_dict(v) for v in vs]})
    if ns.format == "json":
        _emit(_json({"results": recs}), ns.output, "versions.json")
        return EXIT_OK
    header = ["index", "version", "U", "d", "partition"]
    rows = []
    for r in recs:
        if r.get("infinite_fiber"):
            part = "|".join(" ".join(str(j) for j in b) for b in r["partition"])
            rows.append([r["index"], "infinite", "", "", part])
            continue
        for j, v in enumerate(r["versions"]):
            U = " ".join(fmt(x) for row in v["U"] for x in row)
            rows.append([r["index"], j, U, " ".join(fmt(x) for x in v["d"]), ""])
    _emit(_write_csv(header, rows), ns.output, "versions.csv")
    return EXIT_OK


def parse_k_grid(text: str) -> List[float]:
    """``start:stop:step`` (inclusive of stop) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, step = (float(s) for s in text.split(":"))
            if step <= 0:
                raise ParseError("--k-grid step must be positive")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            ks = [round(start + j * step, 12) for j in range(n)]
        else:
            ks = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ParseError(f"--k-grid: cannot parse {text!r}")
    if not ks:
        raise ParseError("--k-grid is empty")
    if any(not (k > 0 and math.isfinite(k)) for k in ks):
        raise ParseError("--k-grid values must be positive")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ParseError("--k-grid must be strictly increasing")
    return ks


def cmd_ksweep(ns, cfg) -> int:
    ks = parse_k_grid(ns.k_grid)
    pairs = read_pairs(ns.input)
    _check_domain(pairs)
    res = _map(ksweep_record, [(i, X, Y, ks, cfg) for i, (X, Y) in enumerate(pairs)])
    if ns.format == "json":
        out = [{"index": i, "rows": [r.__dict__ for r in rows]} for i, rows in res]
        _emit(_json({"results": out}), ns.output, "ksweep.json")
        return EXIT_OK
    header = ["index", "k", "distance", "rotation", "scaling", "character"]
    body = [[i, r.k, r.distance, r.rotation, r.scaling, r.character]
            for i, rows in res for r in rows]
    _emit(_write_csv(header, body), ns.output, "ksweep.csv")
    return EXIT_OK


def _schemes(text: str) -> List[str]:
    out = [s.strip().upper() for s in text.split(",") if s.strip()]
    if not out:
        raise ParseError("--schemes is empty")
    bad = [s for s in out if s not in SCHEMES]
    if bad:
        raise ParseError(f"--schemes: unknown scheme(s) {bad}")
    return list(dict.fromkeys(out))


# --------------------------------------------------------------------------- #
# entry point
# --------------------------------------------------------------------------- #


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spdsr", description="Scaling-rotation distance and interpolation of SPD matrices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--input", required=True, help="JSON or CSV input file")
        sp.add_argument("--k", type=float, default=1.0, help="weight of the rotation term")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--output", default=None, help="output directory (default: stdout)")
        sp.add_argument("--tol-eq", type=float, default=1e-8)
        sp.add_argument("--tol-tie", type=float, default=1e-9)
        sp.add_argument("--tol-g", type=float, default=1e-12)

    common(sub.add_parser("distance", help="minimal pairs and distances"))
    sp = sub.add_parser("interpolate", help="sampled interpolation trajectories")
    common(sp)
    sp.add_argument("--samples", type=int, default=101)
    sp.add_argument("--schemes", default="SR,E,LE,AI")
    common(sub.add_parser("versions", help="list all eigen-decompositions"))
    sp = sub.add_parser("ksweep", help="distance as a function of k")
    common(sp)
    sp.add_argument("--k-grid", default="0.05:1.0:0.005")
    return parser


COMMANDS = {
    "distance": cmd_distance,
    "interpolate": cmd_interpolate,
    "versions": cmd_versions,
    "ksweep": cmd_ksweep,
}


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as e:  # usage errors and --help
        return int(e.code or 0)
    try:
        if getattr(ns, "samples", 2) < 2:
            raise ParseError("--samples must be at least 2")
        try:
            cfg = MetricConfig(k=ns.k, tol_eq=ns.tol_eq, tol_tie=ns.tol_tie, tol_g=ns.tol_g)
        except InvalidInput as e:
            raise ParseError(str(e))
        return COMMANDS[ns.command](ns, cfg)
    except ParseError as e:
        print(f"spdsr: parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as e:
        print(f"spdsr: domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as e:
        print(f"spdsr: convergence error: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
