"""Command-line interface: ``higgs-s2 {energies,coeffs,eval,overlap,verify}``.

Exit codes: 0 success, 2 numerical check failure, 3 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

from . import verification
from .basis import (Basis, BasisState, ModelParams, energy, enumerate_level, epsilon,
                    eval_wavefunction, wavefunction_s1)
from .geometry import AnglePair, CoordinateSingularity, OutOfDomain, System
from .interbasis import PHASE_BRANCH, coefficient_matrix
from .quadrature import NotConverged, integrate_hemisphere

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 2, 3
ROUTE_NAMES = {"closed": "closed_form", "cg": "cg", "numeric": "numeric"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    alpha: float = 1.0
    radius: float = 1.0
    nmax: int = 4
    quad_order: int = 256
    fmt: str = "json"
    out: Optional[str] = None
    tol_closed: float = 1e-10
    tol_numeric: float = 1e-8
    phase_branch: int = PHASE_BRANCH

    def validate(self) -> None:
        if not (self.alpha > 0 and self.radius > 0):
            raise ConfigError("alpha and radius must be positive")
        if not 0 <= self.nmax <= 12:
            raise ConfigError("nmax must lie in 0..12")
        if not 32 <= self.quad_order <= 1024:
            raise ConfigError("quad-order must lie in 32..1024")
        if self.phase_branch not in (1, -1):
            raise ConfigError("phase-branch must be +1 or -1")

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.alpha, self.radius)


def cplx(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def parse_state(text: str) -> BasisState:
    """``B1:n_r,m``, ``B2:n1,n2`` or ``B3:l1,l2``."""
    try:
        tag, nums = text.split(":")
        q1, q2 = (int(x) for x in nums.split(","))
        return BasisState(Basis(tag.strip().upper()), q1, q2)
    except ValueError as exc:
        raise ConfigError(f"bad state {text!r}: expected e.g. B2:0,1") from exc


def _emit(cfg: RunConfig, payload, csv_rows=None, csv_header=None) -> None:
    if cfg.fmt == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(csv_header)
        w.writerows(csv_rows)
        text = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_energies(cfg: RunConfig) -> int:
    p = cfg.params
    rows = []
    for n in range(cfg.nmax + 1):
        sizes = {t.value: len(enumerate_level(n, t)) for t in Basis}
        rows.append({"n": n, "energy": energy(n, p), "epsilon": epsilon(n, p),
                     "level_size": sizes})
    payload = {"alpha": cfg.alpha, "radius": cfg.radius, "nu": p.nu, "levels": rows}
    _emit(cfg, payload,
          [[r["n"], r["energy"], r["epsilon"], *r["level_size"].values()] for r in rows],
          ["n", "energy", "epsilon", "size_B1", "size_B2", "size_B3"])
    return EXIT_OK


def cmd_coeffs(cfg: RunConfig, n: int, from_tag: str, to_tag: str, route: str) -> int:
    nu = cfg.params.nu
    if not 0 <= n <= cfg.nmax:
        raise ConfigError(f"n={n} exceeds nmax={cfg.nmax}")
    routes = [ROUTE_NAMES[r] for r in ("closed", "cg", "numeric")] if route == "all" else [ROUTE_NAMES[route]]
    mats, failure = {}, None
    for r in routes:
        try:
            mats[r] = coefficient_matrix(n, from_tag, to_tag, nu, r, cfg.phase_branch, cfg.quad_order)
        except NotConverged as exc:
            failure = f"{r}: {exc}"
    payload = {"alpha": cfg.alpha, "radius": cfg.radius, "nu": nu,
               "matrices": [m.to_dict() for m in mats.values()]}
    if len(mats) > 1:
        keys = list(mats)
        payload["route_differences"] = {
            f"{a}-{b}": float(abs(mats[a].entries - mats[b].entries).max())
            for i, a in enumerate(keys) for b in keys[i + 1:]
        }
    if failure:
        payload["error"] = failure
    rows = []
    for m in mats.values():
        for i, rs in enumerate(m.rows):
            for j, cs in enumerate(m.cols):
                z = m.entries[i, j]
                rows.append([m.route, rs.label(), cs.label(), float(z.real), float(z.imag)])
    _emit(cfg, payload, rows, ["route", "row", "col", "re", "im"])
    return EXIT_FAIL if failure else EXIT_OK


def read_points(path: str) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["system", "angle1", "angle2"]:
            raise ConfigError('points file needs header "system,angle1,angle2"')
        return [{k.strip(): v.strip() for k, v in row.items()} for row in reader]


def cmd_eval(cfg: RunConfig, state: BasisState, points_path: str) -> int:
    p = cfg.params
    out = []
    for row in read_points(points_path):
        rec = {"system": row["system"], "angle1": row["angle1"], "angle2": row["angle2"]}
        try:
            pt = AnglePair(row["system"].upper(), float(row["angle1"]), float(row["angle2"]))
            if pt.system is System.S1:
                # periodic azimuth
                pt = AnglePair(pt.system, pt.first, pt.second % (2 * math.pi))
            rec["value"] = cplx(eval_wavefunction(state, p, pt))
            rec["error"] = None
        except (OutOfDomain, CoordinateSingularity, ValueError) as exc:
            rec["value"] = None
            rec["error"] = str(exc)
        out.append(rec)
    payload = {"state": state.label(), "nu": p.nu, "points": out}
    _emit(cfg, payload,
          [[r["system"], r["angle1"], r["angle2"],
            r["value"]["re"] if r["value"] else "", r["value"]["im"] if r["value"] else "",
            r["error"] or ""] for r in out],
          ["system", "angle1", "angle2", "re", "im", "error"])
    return EXIT_OK


def cmd_overlap(cfg: RunConfig, bra: BasisState, ket: BasisState) -> int:
    nu = cfg.params.nu

    def integrand(theta, phi):
        return wavefunction_s1(bra, nu, theta, phi).conjugate() * wavefunction_s1(ket, nu, theta, phi)

    res = integrate_hemisphere(integrand, cfg.quad_order, check=False)
    payload = {"bra": bra.label(), "ket": ket.label(), "nu": nu, "value": cplx(res.value),
               "error_estimate": res.error, "order": res.order, "converged": res.converged}
    _emit(cfg, payload, [[bra.label(), ket.label(), res.value.real, res.value.imag, res.error]],
          ["bra", "ket", "re", "im", "error_estimate"])
    return EXIT_OK if res.converged else EXIT_FAIL


def cmd_verify(cfg: RunConfig) -> int:
    results = verification.run_all(cfg.params, cfg.nmax, cfg.quad_order, cfg.phase_branch,
                                   cfg.tol_closed, cfg.tol_numeric)
    ok = all(r.passed for r in results)
    payload = {"alpha": cfg.alpha, "radius": cfg.radius, "nu": cfg.params.nu, "nmax": cfg.nmax,
               "phase_branch": cfg.phase_branch, "passed": ok,
               "checks": [r.to_dict() for r in results]}
    _emit(cfg, payload, [[r.name, r.observed, r.threshold, r.passed] for r in results],
          ["name", "observed", "threshold", "passed"])
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=1.0)
    common.add_argument("--radius", type=float, default=1.0)
    common.add_argument("--nmax", type=int, default=4)
    common.add_argument("--quad-order", type=int, default=256)
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None)
    common.add_argument("--tol-closed", type=float, default=1e-10)
    common.add_argument("--tol-numeric", type=float, default=1e-8)
    common.add_argument("--phase-branch", type=int, default=PHASE_BRANCH,
                        help="branch of (-1)^x = exp(i*b*pi*x); -1 is a negative control")

    parser = argparse.ArgumentParser(prog="higgs-s2", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("energies", parents=[common])
    c = sub.add_parser("coeffs", parents=[common])
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--from", dest="from_tag", choices=[b.value for b in Basis], default="B2")
    c.add_argument("--to", dest="to_tag", choices=[b.value for b in Basis], default="B1")
    c.add_argument("--route", choices=("closed", "cg", "numeric", "all"), default="closed")
    e = sub.add_parser("eval", parents=[common])
    e.add_argument("--state", required=True, help="e.g. B1:0,1 (n_r,m), B2:1,0 (n1,n2), B3:0,2 (l1,l2)")
    e.add_argument("--points", required=True, help='CSV with header "system,angle1,angle2"')
    o = sub.add_parser("overlap", parents=[common])
    o.add_argument("--bra", required=True)
    o.add_argument("--ket", required=True)
    sub.add_parser("verify", parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    cfg = RunConfig(args.alpha, args.radius, args.nmax, args.quad_order, args.fmt, args.out,
                    args.tol_closed, args.tol_numeric, args.phase_branch)
    try:
        cfg.validate()
        if args.command == "energies":
            return cmd_energies(cfg)
        if args.command == "coeffs":
            return cmd_coeffs(cfg, args.n, args.from_tag, args.to_tag, args.route)
        if args.command == "eval":
            return cmd_eval(cfg, parse_state(args.state), args.points)
        if args.command == "overlap":
            return cmd_overlap(cfg, parse_state(args.bra), parse_state(args.ket))
        return cmd_verify(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
