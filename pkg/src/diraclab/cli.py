"""Command-line front end: reproducible runs of every experiment.

Subcommands: spectrum, bracket, stretch, vary, flow, certify.  Every run
reads a JSON config (validated against the schemas module), writes its report
into ``--out`` as CSV (tables) or JSON (full manifest with config, seed, and
package version echoed), and exits 0 on success, 1 when a checked
invariant fails (including truncation-risk refusals), 2 on bad input.
Identical config and seed produce byte-identical outputs: reports carry no
timestamps, JSON keys are sorted, and floats are written with full repr
precision.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .assemble import assemble_spectrum
from .bracketing import run_random_cases
from .catalog import existence_certificate
from .circle import CircleDiracModel, annihilation_flow, bg_first_variation
from .errors import DiracLabError, UsageError
from .metrics import _resolve_m
from .profiles import WarpingProfile, exponential_profile
from .schemas import (BRACKET_CONFIG_SCHEMA, CERTIFY_CONFIG_SCHEMA,
                      FLOW_CONFIG_SCHEMA, SPECTRUM_CONFIG_SCHEMA,
                      STRETCH_CONFIG_SCHEMA, VARY_CONFIG_SCHEMA,
                      validate_config)
from .stretch import run_stretch_sweep, sobolev_growth_fit
from .transverse import TransverseSpectrum, circle_spectrum
from .util import random_trig_polynomial

__all__ = ["main"]


# ---------------------------------------------------------------------------
# deterministic writers
# ---------------------------------------------------------------------------

def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(x) for x in row])
    return path


def _write_json(path: Path, doc: dict) -> Path:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def _envelope(command: str, seed: int, config: dict, result: dict) -> dict:
    return {"command": command, "version": __version__, "seed": seed,
            "config": config, "result": result}


def _emit(args, config: dict, name: str, result_doc: dict, header, rows) -> Path:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        return _write_csv(out_dir / f"{name}.csv", header, rows)
    doc = _envelope(name, args.seed, config, result_doc)
    return _write_json(out_dir / f"{name}.json", doc)


def _load_config(args, schema, label: str):
    path = Path(args.config)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    validate_config(doc, schema, label)
    return doc, path.parent


def _spectrum_from_source(source: dict, base_dir: Path) -> TransverseSpectrum:
    if "circle" in source:
        c = source["circle"]
        return circle_spectrum(c["length"], float(c["delta"]), c["truncation"])
    if "file" in source:
        path = Path(source["file"])
        if not path.is_absolute():
            path = base_dir / path
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read spectrum file {path}: {exc}")
        except json.JSONDecodeError as exc:
            raise UsageError(f"spectrum file {path} is not valid JSON: {exc}")
        return TransverseSpectrum.from_dict(doc)
    return TransverseSpectrum.from_dict(source)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_spectrum(args) -> int:
    cfg, base = _load_config(args, SPECTRUM_CONFIG_SCHEMA, "spectrum")
    profile = WarpingProfile.from_dict(cfg["profile"])
    spectrum = _spectrum_from_source(cfg["spectrum"], base)
    t = float(cfg.get("t", profile.domain_length))
    m = _resolve_m(profile, cfg.get("m"))
    mesh = args.mesh or cfg.get("mesh", 2048)
    assembled = assemble_spectrum(
        profile, spectrum, t, m, cfg["count"], mesh,
        strict_truncation=cfg.get("strict_truncation", True))
    header, rows = assembled.to_rows()
    path = _emit(args, cfg, "spectrum", assembled.to_dict(), header, rows)
    print(f"wrote {path}")
    return 0


def _cmd_bracket(args) -> int:
    cfg, _ = _load_config(args, BRACKET_CONFIG_SCHEMA, "bracket")
    mesh = args.mesh or cfg.get("mesh", 768)
    reports, all_passed = run_random_cases(
        args.seed, cfg.get("cases", 100), cfg.get("j_count", 8), mesh)
    header = ["case_index", "t", "n_cuts", "n_pieces_used", "min_margin",
              "passed"]
    rows = [[r.case_index, r.t, len(r.cuts), len(r.subset),
             float(np.min(r.margins)), r.passed] for r in reports]
    result = {"all_passed": all_passed, "cases": len(reports),
              "reports": [r.to_dict() for r in reports]}
    path = _emit(args, cfg, "bracket", result, header, rows)
    print(f"wrote {path}")
    if not all_passed:
        print("bracketing inequality violated in at least one case",
              file=sys.stderr)
        return 1
    return 0


def _cmd_stretch(args) -> int:
    cfg, base = _load_config(args, STRETCH_CONFIG_SCHEMA, "stretch")
    spectrum = _spectrum_from_source(cfg["spectrum"], base)
    t_values = cfg["t_values"]
    profile = exponential_profile(cfg["m"], t_values[0])
    mesh = args.mesh or cfg.get("mesh", 2048)
    report = run_stretch_sweep(
        profile, spectrum, t_values, mesh=mesh,
        tolerance=cfg.get("tolerance", 1e-6),
        norm_ks=cfg.get("norm_ks", [0, 1, 2]))
    fits = []
    if "growth" in cfg:
        fits = [sobolev_growth_fit(k, cfg["growth"]["t_values"], cfg["m"])
                for k in cfg["growth"]["k_values"]]
    header, rows = report.to_rows()
    result = {"sweep": report.to_dict(), "growth": [f.to_dict() for f in fits]}
    path = _emit(args, cfg, "stretch", result, header, rows)
    print(f"wrote {path}")
    if not (report.passed and all(f.within_limit for f in fits)):
        print("stretch-sweep invariant failed", file=sys.stderr)
        return 1
    return 0


def _cmd_vary(args) -> int:
    cfg, _ = _load_config(args, VARY_CONFIG_SCHEMA, "vary")
    n = cfg.get("n_grid", 2048)
    delta = float(cfg.get("delta", 0.5))
    modes = cfg.get("modes", 5)
    perturbations = cfg.get("perturbations", 10)
    h_fd = cfg.get("h_fd", 1e-4)
    rel_tol = cfg.get("rel_tol", 1e-4)
    rng = np.random.default_rng(args.seed)

    f_scale = cfg.get("f_scale", 0.0)
    f_doc = {"kind": "constant", "value": 1.0}
    if f_scale > 0:
        poly = random_trig_polynomial(rng, 2.0 * math.pi, degree=3,
                                      scale=f_scale,
                                      offset=cfg.get("f_offset", 1.0))
        f_vals = poly(np.linspace(0.0, 2.0 * math.pi, n, endpoint=False))
        if np.any(f_vals <= 0):
            raise UsageError("drawn metric density is not positive; lower "
                             "f_scale or raise f_offset")
        model = CircleDiracModel(f_vals, delta, n)
        f_doc = {"kind": "trig_polynomial", **poly.to_dict()}
    else:
        model = CircleDiracModel(np.ones(n), delta, n)

    rows = []
    records = []
    all_passed = True
    for j in range(modes):
        for case in range(perturbations):
            kappa = random_trig_polynomial(rng, 2.0 * math.pi,
                                           degree=cfg.get("kappa_degree", 4),
                                           scale=cfg.get("kappa_scale", 1.0))
            res = bg_first_variation(model, kappa, j, h_fd)
            tol = rel_tol * (1.0 + abs(res.formula_value))
            ok = res.defect <= tol
            all_passed &= ok
            rows.append([j, case, res.formula_value, res.fd_value,
                         res.defect, tol, ok])
            records.append({**res.to_dict(), "case": case, "tolerance": tol,
                            "passed": ok,
                            "kappa": kappa.to_dict()})
    header = ["mode", "case", "formula", "fd", "defect", "tolerance", "passed"]
    result = {"all_passed": all_passed, "n_grid": n, "delta": delta,
              "h_fd": h_fd, "rel_tol": rel_tol, "f": f_doc, "records": records}
    path = _emit(args, cfg, "vary", result, header, rows)
    print(f"wrote {path}")
    if not all_passed:
        print("variation formula and finite difference disagree",
              file=sys.stderr)
        return 1
    return 0


def _cmd_flow(args) -> int:
    cfg, _ = _load_config(args, FLOW_CONFIG_SCHEMA, "flow")
    n = cfg.get("n_grid", 1024)
    model = CircleDiracModel(np.ones(n), float(cfg.get("delta", 0.5)), n)
    trace = annihilation_flow(model, cfg.get("steps", 10),
                              cfg.get("epsilon", 1e-12))
    header, rows = trace.to_rows()
    path = _emit(args, cfg, "flow", trace.to_dict(), header, rows)
    print(f"wrote {path}")
    if not trace.monotone:
        print("flow failed to decrease the lowest eigenvalue monotonically",
              file=sys.stderr)
        return 1
    return 0


def _cmd_certify(args) -> int:
    cfg, _ = _load_config(args, CERTIFY_CONFIG_SCHEMA, "certify")
    cert = existence_certificate(cfg["m"])
    if cert.applicable:
        rows = [[i, d, "reduce along the geodesic-sphere boundary"]
                for i, d in enumerate(cert.chain[:-1])]
        rows.append([len(cert.chain) - 1, cert.base_dimension,
                     f"Berger zero mode on S^{cert.base_sphere_dim}, "
                     f"k={cert.base_k}, T={cert.base_T}"])
    else:
        rows = [[0, cert.m, f"not applicable: {cert.reason}"]]
    header = ["position", "dimension", "note"]
    path = _emit(args, cfg, "certify", cert.to_dict(), header, rows)
    print(f"wrote {path}")
    return 0


_HANDLERS = {
    "spectrum": (_cmd_spectrum, "assemble a cylinder Dirichlet spectrum"),
    "bracket": (_cmd_bracket, "run seeded domain-decomposition bound checks"),
    "stretch": (_cmd_stretch, "run the neck-stretching collapse sweep"),
    "vary": (_cmd_vary, "check the eigenvalue first-variation formula"),
    "flow": (_cmd_flow, "run the eigenvalue annihilation flow"),
    "certify": (_cmd_certify, "emit a harmonic-spinor existence certificate"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diraclab",
        description="spectral experiments on warped cylinders and circles")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in _HANDLERS.items():
        s = sub.add_parser(name, help=help_text)
        s.add_argument("--config", required=True, help="JSON config path")
        s.add_argument("--out", default=".", help="output directory")
        s.add_argument("--format", choices=("csv", "json"), default="json")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--mesh", type=int, default=None,
                       help="override the config's mesh size")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        handler, _ = _HANDLERS[args.command]
        return handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DiracLabError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
