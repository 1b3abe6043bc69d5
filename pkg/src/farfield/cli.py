"""Command-line front end: scenario JSON in, CSV/JSON artifacts out.

Subcommands: ``bound`` tabulates the truncation-error bound, ``sweep`` runs
the empirical error sweep, ``radiate`` exports a sampled far-field pattern,
and ``project`` band-limits a previously exported pattern.  Exit codes:
0 success, 2 invalid scenario or input, 3 non-converged norm estimate
(partial output is still written).
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import analysis, plots, radiation
from .context import FrequencyContext, effective_bandwidth, make_context
from .discretization import (
    CurrentEnsemble,
    dipole_at_origin,
    load_ensemble,
    random_current_ensemble,
    sphere_grid,
)
from .errors import ScenarioError
from .expansion import project_onto_VL

THREADS_ENV = "FARFIELD_THREADS"


@dataclass(frozen=True)
class Scenario:
    frequency_hz: float
    radius_m: float
    source: dict
    l_min: int
    l_max: int
    seed: int
    out: str | None = None

    def context(self) -> FrequencyContext:
        return make_context(self.frequency_hz, self.radius_m)

    def ensemble(self) -> CurrentEnsemble:
        kind = self.source.get("kind")
        if kind == "random":
            return random_current_ensemble(
                self.radius_m, int(self.source["count"]), int(self.source["seed"])
            )
        if kind == "file":
            return load_ensemble(self.source["path"])
        if kind == "dipole":
            moment = np.asarray(self.source.get("moment_re", [0.0, 0.0, 1.0]), dtype=float)
            moment = moment + 1j * np.asarray(
                self.source.get("moment_im", [0.0, 0.0, 0.0]), dtype=float
            )
            return dipole_at_origin(moment)
        raise ScenarioError(f"unknown source kind {kind!r}")


def load_scenario(path) -> Scenario:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    try:
        scen = Scenario(
            frequency_hz=float(doc["frequency_hz"]),
            radius_m=float(doc["radius_m"]),
            source=dict(doc["source"]),
            l_min=int(doc.get("L_min", 0)),
            l_max=int(doc["L_max"]),
            seed=int(doc.get("seed", 0)),
            out=doc.get("out"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from exc
    if scen.frequency_hz <= 0.0:
        raise ScenarioError("frequency_hz must be positive")
    if scen.radius_m <= 0.0:
        raise ScenarioError("radius_m must be positive")
    if not (0 <= scen.l_min <= scen.l_max):
        raise ScenarioError("need 0 <= L_min <= L_max")
    return scen


def _resolve_threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ScenarioError(f"{THREADS_ENV} must be an integer, got {env!r}") from exc
    return 1


def _write_text(path, text: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)


def cmd_bound(args) -> int:
    scen = load_scenario(args.scenario)
    ctx = scen.context()
    bound = analysis.error_bound(ctx)
    l_b = effective_bandwidth(ctx)
    print(f"L_B = {l_b}")
    print(f"alpha = {bound.alpha:.17g}")
    print("L,beta,bound")
    rows = []
    for L in range(l_b, scen.l_max + 1):
        rows.append((L, bound.beta(L), bound.evaluate(L)))
        print(f"{L},{rows[-1][1]:.17g},{rows[-1][2]:.17g}")
    if args.out:
        lines = ["L,beta,bound"]
        lines += [f"{L},{b:.17g},{v:.17g}" for L, b, v in rows]
        _write_text(args.out, "\n".join(lines) + "\n")
    if args.figure:
        plots.render_bound_figure(bound, scen.l_max, args.figure)
    return 0


def cmd_sweep(args) -> int:
    scen = load_scenario(args.scenario)
    ctx = scen.context()
    ens = scen.ensemble()
    threads = _resolve_threads(args)
    sweep = analysis.error_sweep(
        ctx, ens, scen.l_min, scen.l_max, seed=scen.seed, threads=threads
    )
    out = args.out or scen.out
    csv_text = analysis.sweep_to_csv(sweep)
    if out:
        _write_text(out, csv_text)
    else:
        sys.stdout.write(csv_text)
    if args.json:
        _write_text(args.json, json.dumps(analysis.sweep_to_dict(sweep), indent=1) + "\n")
    if args.figure:
        plots.render_sweep_figure(sweep, args.figure)
    if not all(r.converged for r in sweep.records):
        print("warning: operator-norm estimate did not converge for every degree",
              file=sys.stderr)
        return 3
    return 0


def cmd_radiate(args) -> int:
    scen = load_scenario(args.scenario)
    ctx = scen.context()
    ens = scen.ensemble()
    grid = sphere_grid(scen.l_max)
    fld = radiation.direct_far_field(ens, grid, ctx)
    out = args.out or scen.out
    csv_text = radiation.field_to_csv(fld)
    if out:
        _write_text(out, csv_text)
    else:
        sys.stdout.write(csv_text)
    if args.figure:
        plots.render_pattern_figure(fld, args.figure)
    return 0


def cmd_project(args) -> int:
    with open(args.input) as fh:
        fld = radiation.field_from_csv(fh.read())
    projected = project_onto_VL(fld, args.degree)
    csv_text = radiation.field_to_csv(projected)
    if args.out:
        _write_text(args.out, csv_text)
    else:
        sys.stdout.write(csv_text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="farfield",
        description="Far-field truncation-error analysis of current ensembles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            p.add_argument("--scenario", required=True, help="scenario JSON path")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--figure", help="also render a figure to this path")
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker threads (default: ${THREADS_ENV} or 1)")

    p_bound = sub.add_parser("bound", help="tabulate the truncation-error bound")
    common(p_bound)
    p_bound.set_defaults(func=cmd_bound)

    p_sweep = sub.add_parser("sweep", help="empirical error sweep over degrees")
    common(p_sweep)
    p_sweep.add_argument("--json", help="also write the JSON mirror of the records")
    p_sweep.set_defaults(func=cmd_sweep)

    p_rad = sub.add_parser("radiate", help="export the sampled far-field pattern")
    common(p_rad)
    p_rad.set_defaults(func=cmd_radiate)

    p_proj = sub.add_parser("project", help="band-limit an exported pattern")
    p_proj.add_argument("--input", required=True, help="field CSV to project")
    p_proj.add_argument("--degree", type=int, required=True, help="projection degree L")
    p_proj.add_argument("--out", help="output CSV path (default: stdout)")
    p_proj.set_defaults(func=cmd_project)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
