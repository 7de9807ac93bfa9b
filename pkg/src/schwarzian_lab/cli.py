"""Command-line entry point.

Exit codes: 0 completed, 2 usage/config error, 3 inconclusive numeric run,
4 internal evaluation failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import criteria, geometry, schwarzian
from .errors import SchwarzianLabError, UsageError
from .maps import HarmonicMap, parse_map

EXIT_OK, EXIT_USAGE, EXIT_INCONCLUSIVE, EXIT_FAILURE = 0, 2, 3, 4

CHECKS = ("thm3", "thm4", "lemma", "identity", "affine", "root")


@dataclass
class RunConfig:
    command: str
    map_spec: dict | None = None
    grid: schwarzian.GridSpec = field(default_factory=schwarzian.GridSpec)
    refinements: int = 0
    seed: int = 0
    output_path: Path | None = None
    format: str = "json"
    resolution: int = 400
    delta: float = 0.05
    samples: int = 4096
    check: str | None = None
    alphas: tuple = ()
    tolerance: float = criteria.DEFAULT_TOL

    def build_map(self) -> HarmonicMap:
        if self.map_spec is None:
            raise UsageError(f"{self.command} needs --map")
        return parse_map(self.map_spec)


def _load_map_arg(text: str | None) -> dict | None:
    if text is None:
        return None
    path = Path(text)
    if not text.lstrip().startswith("{") and path.exists():
        text = path.read_text()
    try:
        desc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--map is neither JSON nor a readable file: {exc}") from exc
    if not isinstance(desc, dict):
        raise UsageError("--map must be a JSON object")
    return desc


def _dump_json(obj) -> str:
    # repr-based floats: shortest round-trip decimal, at most 17 significant digits
    return json.dumps(obj, indent=2) + "\n"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path is None:
        sys.stdout.write(text)
    else:
        cfg.output_path.write_text(text)


# commands -------------------------------------------------------------------


def cmd_norm(cfg: RunConfig) -> int:
    est = schwarzian.schwarzian_norm_estimate(cfg.build_map(), cfg.grid, cfg.refinements)
    report = {"map": cfg.map_spec, **est.to_dict()}
    _emit(cfg, _dump_json(report))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    if not cfg.alphas:
        raise UsageError("sweep needs --alphas")
    if any(a < 1 for a in cfg.alphas):
        raise UsageError("sweep is defined for alpha >= 1")
    from .maps import make_f_alpha

    rows = ["alpha,norm_estimate,paper_bound"]
    for a in cfg.alphas:
        est = schwarzian.schwarzian_norm_estimate(make_f_alpha(a), cfg.grid, cfg.refinements)
        bound = schwarzian.norm_bound_f_alpha(a)
        rows.append(f"{a:.12g},{est.lower_bound:.12g},{bound:.12g}")
    _emit(cfg, "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_criteria(cfg: RunConfig) -> int:
    check = cfg.check
    if check == "root":
        c = criteria.solve_c()
        report = {
            "criterion": "root",
            "c": c,
            "residual": abs(2 * c * np.tan(c) - 1),
            "two_c_squared": 2 * c * c,
        }
        _emit(cfg, _dump_json(report))
        return EXIT_OK
    if check in ("thm3", "thm4"):
        fn = criteria.thm3_check if check == "thm3" else criteria.thm4_check
        verdict = fn(cfg.build_map(), cfg.grid, cfg.tolerance)
        _emit(cfg, _dump_json({"map": cfg.map_spec, **verdict.to_dict()}))
        return EXIT_INCONCLUSIVE if verdict.inconclusive else EXIT_OK
    if check == "lemma":
        if cfg.map_spec is not None:
            verdict = criteria.lemma_check(cfg.build_map().dilatation, cfg.grid, cfg.tolerance)
            _emit(cfg, _dump_json({"map": cfg.map_spec, **verdict.to_dict()}))
            return EXIT_INCONCLUSIVE if verdict.inconclusive else EXIT_OK
        _emit(cfg, _dump_json(criteria.lemma_suite(cfg.seed)))
        return EXIT_OK
    if check == "identity":
        _emit(cfg, _dump_json(criteria.identity_suite(cfg.seed)))
        return EXIT_OK
    if check == "affine":
        _emit(cfg, _dump_json(criteria.affine_suite(cfg.seed)))
        return EXIT_OK
    raise UsageError(f"unknown check {check!r}; choose from {', '.join(CHECKS)}")


def cmd_scan(cfg: RunConfig) -> int:
    report = geometry.injectivity_scan(cfg.build_map(), cfg.resolution, cfg.delta)
    _emit(cfg, _dump_json({"map": cfg.map_spec, **report.to_dict()}))
    return EXIT_INCONCLUSIVE if report.verdict == "inconclusive" else EXIT_OK


def cmd_render(cfg: RunConfig) -> int:
    if cfg.format != "svg":
        raise UsageError("render writes svg only")
    f = cfg.build_map()
    if not f.closed_disk:
        raise UsageError("map does not extend continuously to the closed disk")
    curve = geometry.boundary_curve(f, cfg.samples)
    crossings = geometry.self_intersections(curve).points()
    thetas = geometry.cusp_candidates(f, max(cfg.samples, 256))
    cusps = curve.source(np.array(thetas)) if thetas else []
    _emit(cfg, geometry.render_svg([curve], list(crossings), list(cusps)))
    return EXIT_OK


COMMANDS = {
    "norm": cmd_norm,
    "sweep": cmd_sweep,
    "criteria": cmd_criteria,
    "scan": cmd_scan,
    "render": cmd_render,
}

DEFAULT_FORMAT = {"norm": "json", "sweep": "csv", "criteria": "json", "scan": "json", "render": "svg"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--map", help="JSON map description or path to a JSON file")
    common.add_argument("--grid-levels", type=int, default=14, help="radial levels K")
    common.add_argument("--grid-rmax", type=float, default=1 - 1e-4, help="outermost sampling radius")
    common.add_argument("--grid-angular", type=int, default=64, help="angular base count")
    common.add_argument("--refinements", type=int, default=0)
    common.add_argument("--resolution", type=int, default=400)
    common.add_argument("--delta", type=float, default=0.05)
    common.add_argument("--samples", type=int, default=4096, help="boundary samples for render")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=criteria.DEFAULT_TOL)
    common.add_argument("--out", type=Path)
    common.add_argument("--format", choices=("json", "csv", "svg"))
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="schwarzian-lab",
        description="Schwarzian derivatives and univalence diagnostics for harmonic maps of the disk.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("norm", parents=[common], help="lower bound for the Schwarzian norm")
    sw = sub.add_parser("sweep", parents=[common], help="norm estimate vs bound over f_alpha")
    sw.add_argument("--alphas", required=True, help="comma-separated alpha values >= 1")
    cr = sub.add_parser("criteria", parents=[common], help="univalence criteria and property suites")
    cr.add_argument("check", choices=CHECKS)
    sub.add_parser("scan", parents=[common], help="collision search")
    sub.add_parser("render", parents=[common], help="SVG of the boundary image")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fmt = ns.format or DEFAULT_FORMAT[ns.command]
    if fmt != DEFAULT_FORMAT[ns.command]:
        raise UsageError(f"{ns.command} writes {DEFAULT_FORMAT[ns.command]}, not {fmt}")
    alphas = ()
    if getattr(ns, "alphas", None):
        try:
            alphas = tuple(float(a) for a in ns.alphas.split(","))
        except ValueError as exc:
            raise UsageError(f"bad --alphas: {exc}") from exc
    if ns.seed < 0:
        raise UsageError("--seed must be nonnegative")
    return RunConfig(
        command=ns.command,
        map_spec=_load_map_arg(ns.map),
        grid=schwarzian.GridSpec(ns.grid_levels, ns.grid_rmax, ns.grid_angular),
        refinements=ns.refinements,
        seed=ns.seed,
        output_path=ns.out,
        format=fmt,
        resolution=ns.resolution,
        delta=ns.delta,
        samples=ns.samples,
        check=getattr(ns, "check", None),
        alphas=alphas,
        tolerance=ns.tol,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, ValueError) as exc:
        # DomainError is a ValueError: bad parameters in the map description
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchwarzianLabError as exc:
        print(f"evaluation failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
