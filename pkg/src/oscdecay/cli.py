"""Command line front end: subcommands over the library, JSON and CSV reports.

Every run echoes its full configuration into the report, so a report is
reproducible from its own `config` block.  Exit codes: 0 success / all
verdicts PASS, 1 a verdict FAILed or a computation refused, 2 usage.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

from .decay import (
    check_dual_domination,
    dual_lambda_grid,
    fit_decay,
    sharpness_test,
    summation_oracle,
)
from .exponent import ExponentQuery, sharp_exponent
from .nondegen import check_nondegeneracy
from .oscint import CutoffSpec, TestFunctionSpec, lambda_grid, lambda_sweep
from .phase import parse_phase, reduce_phase
from .polytope import (
    build_polyhedron,
    dual_polyhedron,
    dual_to_json_dict,
    same_vertex_set,
    to_json_dict,
)


class CliError(ValueError):
    """Configuration or argument problem; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on, echoed verbatim into every report."""

    phase: str = ""
    dimension: int = 0            # 0 means infer from the expression
    p: tuple[str, ...] = ()       # per-factor integrability, "inf" allowed
    lam_lo: float = 64.0
    lam_hi: float = 4096.0
    lam_count: int = 13
    box_scale: str = "1/4"        # starting half-width for sharpness boxes
    grid: int = 64                # nondegeneracy samples per axis
    eta: float = 1e-3
    starts: int = 8
    levels: int = 12              # cutoff octaves, also certificate truncation
    orthant: bool = True          # sweep over the positive orthant only
    sharpness: bool = False       # run the box-family check inside verify
    sharpness_count: int = 6
    fit_tol: float = 0.05
    witness_tol: float = 1e-8
    z: tuple[str, ...] = ()       # summation weights
    e_lo: int = 4                 # summation frequency exponents, powers of 2
    e_hi: int = 24
    e_step: int = 2
    seed: int = 0
    out_json: str = ""
    out_csv: str = ""

    def validate(self) -> None:
        if self.fit_tol <= 0 or self.witness_tol <= 0 or self.eta <= 0:
            raise CliError("tolerances must be positive")
        if self.lam_count < 1 or self.grid < 2 or self.levels < 1:
            raise CliError("grid sizes must be positive")
        if Fraction(self.box_scale) <= 0:
            raise CliError("box scale must be positive")
        if self.e_step < 1 or self.e_hi < self.e_lo:
            raise CliError("bad summation exponent range")

    def to_json_dict(self) -> dict:
        out = asdict(self)
        out["p"] = list(self.p)
        out["z"] = list(self.z)
        return out


def _parse_tuple(raw: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in raw.split(",") if s.strip())


_COERCE = {
    "phase": str, "dimension": int, "p": _parse_tuple, "lam_lo": float,
    "lam_hi": float, "lam_count": int, "box_scale": str, "grid": int,
    "eta": float, "starts": int, "levels": int,
    "orthant": lambda s: s.lower() in ("1", "true", "yes", "on"),
    "sharpness": lambda s: s.lower() in ("1", "true", "yes", "on"),
    "sharpness_count": int, "fit_tol": float, "witness_tol": float,
    "z": _parse_tuple, "e_lo": int, "e_hi": int, "e_step": int, "seed": int,
    "out_json": str, "out_csv": str,
}


def load_config_file(path: str) -> dict:
    """key=value lines, # comments; keys are RunConfig field names."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise CliError(f"cannot read config file: {e}") from None
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            raise CliError(f"{path}:{lineno}: expected key=value")
        key, _, value = s.partition("=")
        key = key.strip()
        if key not in _COERCE:
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _COERCE[key](value.strip())
    return out


def assemble_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then config file entries, then explicit flags."""
    values = {f.name: getattr(RunConfig(), f.name) for f in fields(RunConfig)}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    for name in _COERCE:
        got = getattr(args, name, None)
        if got is None:
            continue
        if isinstance(got, str) and not isinstance(values[name], str):
            got = _COERCE[name](got)  # string-valued flags like --orthant on
        values[name] = got
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _infer_dimension(text: str) -> int:
    indices = [int(m) for m in re.findall(r"x(\d+)", text)]
    if not indices:
        raise CliError("cannot infer dimension; pass --dim")
    return max(indices)


def _build_inputs(cfg: RunConfig):
    if not cfg.phase:
        raise CliError("--phase is required")
    dim = cfg.dimension or _infer_dimension(cfg.phase)
    p = reduce_phase(parse_phase(cfg.phase, dim))
    n = build_polyhedron(p)
    q = ExponentQuery.of(cfg.p) if cfg.p else ExponentQuery.all_inf(dim)
    if q.dimension != dim:
        raise CliError(f"--p needs {dim} entries")
    return p, n, q


def _report(command: str, cfg: RunConfig, **parts) -> dict:
    base = {
        "schema": "report/1",
        "command": command,
        "config": cfg.to_json_dict(),
        "polyhedron": None,
        "exponent": None,
        "nondegeneracy": None,
        "decay_fit": None,
        "sharpness": None,
        "summation": None,
        "sweep": None,
        "verdicts": [],
    }
    base.update(parts)
    return base


def _emit(report: dict, cfg: RunConfig) -> int:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.out_json:
        Path(cfg.out_json).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if all(v["verdict"] == "PASS" for v in report["verdicts"]) else 1


def _verdict(name: str, ok: bool, detail: str) -> dict:
    return {"name": name, "verdict": "PASS" if ok else "FAIL", "detail": detail}


def _envelope(exponent_report, lam: float) -> float:
    inv = 1.0 / float(exponent_report.nu)
    return lam ** -inv * math.log(2.0 + lam) ** exponent_report.m


def _sweep_rows(results, exp_rep) -> list[dict]:
    return [{
        "lam": r.lam,
        "re": r.value.real,
        "im": r.value.imag,
        "abs": abs(r.value),
        "err": r.error,
        "nodes": r.nodes,
        "low_confidence": r.low_confidence,
        "certificate": r.certificate,
        "envelope": _envelope(exp_rep, r.lam),
    } for r in results]


CSV_COLUMNS = ["lam", "re", "im", "abs", "err", "nodes", "low_confidence",
               "certificate", "envelope"]


def _write_csv(rows: list[dict], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def _run_sweep(cfg: RunConfig, p, n, q, lam_override: float | None):
    if lam_override is not None:
        grid = (float(lam_override),)
        cfg = replace(cfg, lam_lo=grid[0], lam_hi=grid[0], lam_count=1)
    elif cfg.lam_count == 1:
        grid = (cfg.lam_lo,)
    else:
        grid = lambda_grid(cfg.lam_lo, cfg.lam_hi, cfg.lam_count)
    chi = CutoffSpec(positive_orthant=cfg.orthant, levels=cfg.levels)
    results = lambda_sweep(p, TestFunctionSpec.ones(p.dimension), chi, grid,
                           certify=True, query=q, n=n)
    return cfg, results


# ---------------------------------------------------------------------------
# subcommand handlers

def cmd_polyhedron(args, cfg: RunConfig) -> int:
    _, n, _ = _build_inputs(cfg)
    rep = _report("polyhedron", cfg,
                  polyhedron={"primal": to_json_dict(n), "dual": None,
                              "domination": None})
    return _emit(rep, cfg)


def cmd_dual(args, cfg: RunConfig) -> int:
    _, n, q = _build_inputs(cfg)
    dual = dual_polyhedron(n)
    ok, table = check_dual_domination(n, q)
    dom = [{"w": [str(x) for x in w], "pairing": str(val)} for w, val in table]
    double = same_vertex_set(dual_polyhedron(dual), n)
    rep = _report("dual", cfg,
                  polyhedron={"primal": to_json_dict(n),
                              "dual": dual_to_json_dict(dual),
                              "domination": dom},
                  verdicts=[_verdict("double-dual", double,
                                     "dual of dual equals the primal"),
                            _verdict("dual-domination", ok,
                                     "query point clears every dual vertex")])
    return _emit(rep, cfg)


def cmd_exponent(args, cfg: RunConfig) -> int:
    _, n, q = _build_inputs(cfg)
    er = sharp_exponent(n, q)
    rep = _report("exponent", cfg, exponent=er.to_json_dict())
    return _emit(rep, cfg)


def cmd_check(args, cfg: RunConfig) -> int:
    p, n, _ = _build_inputs(cfg)
    nd = check_nondegeneracy(p, n, grid=cfg.grid, eta=cfg.eta,
                             starts=cfg.starts, degen_tol=cfg.witness_tol)
    rep = _report("check", cfg, nondegeneracy=nd.to_json_dict(),
                  verdicts=[_verdict("nondegeneracy",
                                     nd.verdict == "nondegenerate",
                                     nd.verdict)])
    return _emit(rep, cfg)


def cmd_integrate(args, cfg: RunConfig) -> int:
    p, n, q = _build_inputs(cfg)
    cfg, results = _run_sweep(cfg, p, n, q, args.lam)
    er = sharp_exponent(n, q)
    rows = _sweep_rows(results, er)
    if cfg.out_csv:
        _write_csv(rows, cfg.out_csv)
    rep = _report("integrate", cfg, exponent=er.to_json_dict(), sweep=rows)
    return _emit(rep, cfg)


def cmd_verify(args, cfg: RunConfig) -> int:
    p, n, q = _build_inputs(cfg)
    er = sharp_exponent(n, q)
    nd = check_nondegeneracy(p, n, grid=cfg.grid, eta=cfg.eta,
                             starts=cfg.starts, degen_tol=cfg.witness_tol)
    cfg, results = _run_sweep(cfg, p, n, q, None)
    fit = fit_decay(results, er, tol=cfg.fit_tol)
    rows = _sweep_rows(results, er)
    if cfg.out_csv:
        _write_csv(rows, cfg.out_csv)
    certified = all(abs(r.value) <= r.certificate
                    for r in results if not r.low_confidence)
    verdicts = [
        _verdict("nondegeneracy", nd.verdict == "nondegenerate", nd.verdict),
        _verdict("decay-fit", fit.passed,
                 f"pinned 1/nu gap {fit.inv_nu_gap:.6f} vs tol {fit.tol}"),
        _verdict("certificate", certified,
                 "per-box bound sum dominates every clean sweep point"),
    ]
    sharp_part = None
    if cfg.sharpness:
        sharp_part = []
        all_ok = True
        for w in dual_polyhedron(n).vertices:
            wit = sharpness_test(p, n, q, w, Fraction(cfg.box_scale),
                                 dual_lambda_grid(w, count=cfg.sharpness_count),
                                 chi=CutoffSpec(levels=cfg.levels))
            sharp_part.append(wit.to_json_dict())
            all_ok = all_ok and wit.passed
        verdicts.append(_verdict("sharpness", all_ok,
                                 "measured mass in band at every dual vertex"))
    rep = _report("verify", cfg,
                  polyhedron={"primal": to_json_dict(n), "dual": None,
                              "domination": None},
                  exponent=er.to_json_dict(),
                  nondegeneracy=nd.to_json_dict(),
                  decay_fit=fit.to_json_dict(),
                  sharpness=sharp_part,
                  sweep=rows,
                  verdicts=verdicts)
    return _emit(rep, cfg)


def cmd_sum_oracle(args, cfg: RunConfig) -> int:
    _, n, _ = _build_inputs(cfg)
    if not cfg.z:
        raise CliError("--z is required for sum-oracle")
    z = tuple(Fraction(x) for x in cfg.z)
    lams = [2.0 ** e for e in range(cfg.e_lo, cfg.e_hi + 1, cfg.e_step)]
    sr = summation_oracle(n, z, lams)
    rep = _report("sum-oracle", cfg, summation=sr.to_json_dict(),
                  verdicts=[_verdict(
                      "summation-envelope", sr.passed,
                      f"normalized spread {sr.spread:.6f} vs {sr.bound_factor}")])
    return _emit(rep, cfg)


HANDLERS = {
    "polyhedron": cmd_polyhedron,
    "dual": cmd_dual,
    "exponent": cmd_exponent,
    "check": cmd_check,
    "integrate": cmd_integrate,
    "verify": cmd_verify,
    "sum-oracle": cmd_sum_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscdecay",
        description="Decay-rate toolkit for separable oscillatory forms.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        sp = sub.add_parser(name)
        sp.add_argument("--phase", help="polynomial, e.g. 'x1^2*x2^2 + x1^5*x2'")
        sp.add_argument("--dim", type=int, dest="dimension")
        sp.add_argument("--p", type=_parse_tuple,
                        help="comma list of integrabilities, e.g. inf,2")
        sp.add_argument("--config", help="key=value file, overridden by flags")
        sp.add_argument("--out", dest="out_json", help="report path (else stdout)")
        sp.add_argument("--seed", type=int)
        if name in ("integrate", "verify"):
            sp.add_argument("--lam-lo", type=float, dest="lam_lo")
            sp.add_argument("--lam-hi", type=float, dest="lam_hi")
            sp.add_argument("--lam-count", type=int, dest="lam_count")
            sp.add_argument("--levels", type=int)
            sp.add_argument("--orthant", choices=["on", "off"])
            sp.add_argument("--csv", dest="out_csv")
        if name == "integrate":
            sp.add_argument("--lam", type=float, help="single frequency")
        if name == "verify":
            sp.add_argument("--sharpness", action="store_const", const=True,
                            default=None)
            sp.add_argument("--fit-tol", type=float, dest="fit_tol")
            sp.add_argument("--box-scale", dest="box_scale")
        if name == "check" or name == "verify":
            sp.add_argument("--grid", type=int)
            sp.add_argument("--eta", type=float)
            sp.add_argument("--starts", type=int)
            sp.add_argument("--witness-tol", type=float, dest="witness_tol")
        if name == "sum-oracle":
            sp.add_argument("--z", type=_parse_tuple,
                            help="comma list of weights, e.g. 1,1")
            sp.add_argument("--e-lo", type=int, dest="e_lo")
            sp.add_argument("--e-hi", type=int, dest="e_hi")
            sp.add_argument("--e-step", type=int, dest="e_step")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = assemble_config(args)
        return HANDLERS[args.command](args, cfg)
    except CliError as e:
        print(f"usage error: {e}", file=sys.stderr)
        print(f"run 'oscdecay {args.command} --help' for the grammar",
              file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
