"""frame-sync command line.

Subcommands: cost, scaling, sync-sim, teleport-demo, witness, align.
Reports are CSV on stdout (or --out) with a '#'-prefixed metadata block, or
the same content as JSON with --json.  Exit codes: 0 success, 1 usage or
config error, 2 self-check failure (a computed invariant out of tolerance).
Angles cross the boundary in radians unless --degrees is given.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import (COST_N_CAP, DEMO_N_CAP, RunConfig, UsageError, cost_from_spec,
                     cost_label, frame_state_from_spec, ket_from_spec,
                     merge_file_config, parse_n_range, resource_from_spec)
from .core import ContractViolation, Generator, RandomSource
from .estimation import brute_force_min_cost, min_joint_cost
from .protocols import (GroupTable, sector_form_residual, fidelity_after_relay,
                        finite_group_align, frameness, monte_carlo_cost,
                        no_go_witness, teleport_with_mismatch)
from .states import optimal_frameness_state

TWO_PI = 2.0 * math.pi


@dataclass
class ReportTable:
    """Rectangular result rows plus a reproducible metadata echo."""

    columns: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    exit_code: int = 0

    def add(self, *values):
        if len(values) != len(self.columns):
            raise AssertionError("row width does not match the columns")
        self.rows.append(list(values))


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(float(value))   # normalizes numpy scalars to plain repr
    return str(value)


def render_csv(table: ReportTable) -> str:
    out = io.StringIO()
    out.write(f"# frame-sync {__version__}\n")
    for key, value in table.metadata.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        out.write(f"# {key}: {value}\n")
    for note in table.notes:
        out.write(f"# note: {note}\n")
    out.write(",".join(table.columns) + "\n")
    for row in table.rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")
    return out.getvalue()


def render_json(table: ReportTable) -> str:
    doc = {
        "tool": f"frame-sync {__version__}",
        "metadata": table.metadata,
        "notes": table.notes,
        "columns": table.columns,
        "rows": table.rows,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(table: ReportTable, cfg: RunConfig) -> int:
    text = render_json(table) if cfg.json_out else render_csv(table)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return table.exit_code


def _angle_out(phi: float, cfg: RunConfig) -> float:
    return math.degrees(phi) if cfg.degrees else phi


def _state_label(cfg: RunConfig) -> str:
    if cfg.state is None:
        return "flat"
    if isinstance(cfg.state, str):
        return cfg.state
    return cfg.state.get("family", "custom") if isinstance(cfg.state, dict) else "custom"


def cmd_cost(cfg: RunConfig) -> ReportTable:
    state = frame_state_from_spec(cfg.state, cfg.n if cfg.n is not None else 4,
                                  cfg.cost, n_cap=COST_N_CAP)
    cost = cost_from_spec(cfg.cost, state.total)
    value = min_joint_cost(state.magnitudes(), cost)

    columns = ["state", "N", "cost_type", "min_cost", "frameness"]
    if cfg.oracle:
        columns += ["oracle_cost", "oracle_gap"]
    table = ReportTable(columns, metadata={"command": "cost", "config": cfg.echo()})

    row = [_state_label(cfg), state.total, cost_label(cfg.cost), value,
           frameness(state, cost)]
    if cfg.oracle:
        oracle = brute_force_min_cost(state.amps, cost,
                                      rng=RandomSource(cfg.seed).split(0))
        row += [oracle, oracle - value]
    table.add(*row)

    if _state_label(cfg) == "sine-paper":
        best = min_joint_cost(
            optimal_frameness_state(state.total, cost).magnitudes(), cost)
        if value > best + 1e-12:
            table.notes.append(
                f"sine-paper profile is not the minimizer at N={state.total}: "
                f"cost {value:.6f} exceeds optimal {best:.6f}")
    return table


def cmd_scaling(cfg: RunConfig) -> ReportTable:
    lo, hi = parse_n_range(cfg.n_range or "8..256")
    if hi > COST_N_CAP:
        raise UsageError(f"N range capped at {COST_N_CAP}")
    families = (cfg.state if isinstance(cfg.state, str) else None) or "flat,sine-paper,optimal"
    family_list = [f.strip() for f in families.split(",") if f.strip()]

    table = ReportTable(["family", "N", "min_cost"],
                        metadata={"command": "scaling", "config": cfg.echo()})
    slopes = []
    for family in family_list:
        points = []
        for n in range(lo, hi + 1):
            state = frame_state_from_spec(family, n, cfg.cost, n_cap=COST_N_CAP)
            cost = cost_from_spec(cfg.cost, n)
            value = min_joint_cost(state.magnitudes(), cost)
            table.add(family, n, value)
            points.append((n, value))
        upper = [(n, v) for n, v in points if n >= (lo + hi) / 2 and v > 0]
        if len(upper) >= 2:
            xs = np.log([n for n, _ in upper])
            ys = np.log([v for _, v in upper])
            slope = float(np.polyfit(xs, ys, 1)[0])
            slopes.append((family, slope))
        else:
            slopes.append((family, float("nan")))
    for family, slope in slopes:
        table.add(family, "slope", slope)
    return table


def cmd_sync_sim(cfg: RunConfig) -> ReportTable:
    if cfg.n_range:
        lo, hi = parse_n_range(cfg.n_range)
        n_values = list(range(lo, hi + 1))
    else:
        n_values = [cfg.n if cfg.n is not None else 4]
    trials = cfg.trials if cfg.trials is not None else 10000

    table = ReportTable(
        ["N", "state", "analytic_min_cost", "mc_mean", "std_error", "z_score",
         "sector_form_residual"],
        metadata={"command": "sync-sim", "config": cfg.echo()})
    root = RandomSource(cfg.seed)
    worst_z = 0.0
    for n in n_values:
        if n > DEMO_N_CAP:
            raise UsageError(f"sync-sim N capped at {DEMO_N_CAP}")
        state = frame_state_from_spec(cfg.state, n, cfg.cost)
        cost = cost_from_spec(cfg.cost, state.total)
        analytic = min_joint_cost(state.magnitudes(), cost)
        mean, sem = monte_carlo_cost(state, cost, trials, root.split(n),
                                     threads=cfg.threads)
        z = (mean - analytic) / sem if sem > 0 else 0.0
        worst_z = max(worst_z, abs(z))
        table.add(state.total, _state_label(cfg), analytic, mean, sem, z,
                  sector_form_residual(state))
    if worst_z > 5.0:
        table.notes.append(f"self-check failed: |z| = {worst_z:.2f} exceeds 5")
        table.exit_code = 2
    return table


def cmd_teleport_demo(cfg: RunConfig) -> ReportTable:
    psi, _ = ket_from_spec(cfg.state if cfg.state is not None else cfg.psi0)
    points = max(2, cfg.grid)
    table = ReportTable(
        ["phi", "ui_fidelity", "si_fidelity"],
        metadata={"command": "teleport-demo", "config": cfg.echo(),
                  "angle_unit": "degrees" if cfg.degrees else "radians"})
    total = 0.0
    for j in range(points):
        phi = TWO_PI * j / points
        rho = teleport_with_mismatch(psi, phi, resource_dim=psi.dim)
        ui = float(np.real(np.vdot(psi.amplitudes, rho.entries @ psi.amplitudes)))
        si = fidelity_after_relay(psi.amplitudes, phi)
        total += ui
        table.add(_angle_out(phi, cfg), ui, si)
    table.add("average", total / points, 1.0)
    return table


def cmd_witness(cfg: RunConfig) -> ReportTable:
    psi0, gen_s = ket_from_spec(cfg.psi0)
    resource, gen_a, gen_b = resource_from_spec(cfg.state, cfg.n, cfg.cost)
    if psi0.dim * resource.dim > (DEMO_N_CAP + 1) ** 3:
        raise UsageError("witness problem size is capped; reduce the dimensions")
    report = no_go_witness(psi0, gen_s, resource, gen_a, gen_b)

    table = ReportTable(["quantity", "value"],
                        metadata={"command": "witness", "config": cfg.echo()})
    table.add("level_differences", " ".join(str(l) for l in report.levels))
    table.add("weights", " ".join(repr(w) for w in report.weights))
    table.add("l_max", report.l_max)
    table.add("invariance_residual", report.invariance_residual)
    table.add("input_ui_norm", report.input_ui_norm)
    if not report.passes(1e-10):
        table.notes.append(
            f"self-check failed: top component residual {report.invariance_residual:.3e}")
        table.exit_code = 2
    return table


def cmd_align(cfg: RunConfig) -> ReportTable:
    order = cfg.group_order if cfg.group_order is not None else 2
    if not 2 <= order <= DEMO_N_CAP:
        raise UsageError(f"group order must be in 2..{DEMO_N_CAP}")
    trials = cfg.trials if cfg.trials is not None else 1000
    if trials < 1:
        raise UsageError("align needs at least one trial")
    group = GroupTable.cyclic(order)
    root = RandomSource(cfg.seed)

    table = ReportTable(["g", "trials", "errors"],
                        metadata={"command": "align", "config": cfg.echo()})
    total_errors = 0
    for g in range(order):
        errors = 0
        for t in range(trials):
            est = finite_group_align(group, g, root.split(g).split(t))
            if est != g:
                errors += 1
        total_errors += errors
        table.add(g, trials, errors)
    table.add("total", order * trials, total_errors)
    if total_errors:
        table.notes.append(f"self-check failed: {total_errors} misidentified trials")
        table.exit_code = 2
    return table


COMMANDS = {
    "cost": cmd_cost,
    "scaling": cmd_scaling,
    "sync-sim": cmd_sync_sim,
    "teleport-demo": cmd_teleport_demo,
    "witness": cmd_witness,
    "align": cmd_align,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frame-sync",
                     description="Phase-reference synchronization toolkit")
    parser.add_argument("--version", action="version",
                        version=f"frame-sync {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("cost", "optimal joint cost and frameness of a resource state"),
        ("scaling", "cost versus N for one or more state families"),
        ("sync-sim", "Monte Carlo of the one-way sync protocol vs the optimum"),
        ("teleport-demo", "teleportation fidelity under a frame mismatch"),
        ("witness", "level-difference witness for the classical no-go"),
        ("align", "exact alignment for a finite cyclic group"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--seed", type=int, default=None, help="master RNG seed (u64)")
        p.add_argument("--trials", type=int, default=None, help="Monte Carlo trials")
        p.add_argument("--N", dest="n", type=int, default=None, help="total level N")
        p.add_argument("--N-range", dest="n_range", default=None,
                       help="inclusive range a..b")
        p.add_argument("--state", default=None,
                       help="state family or spec path (teleport-demo: input ket)")
        p.add_argument("--cost", default=None,
                       help="variance | likelihood | cost spec path")
        p.add_argument("--psi0", default=None,
                       help="input ket name or spec path (witness)")
        p.add_argument("--oracle", action="store_true",
                       help="add the brute-force seed-search value")
        p.add_argument("--out", default=None, help="write the report to a file")
        p.add_argument("--degrees", action="store_true",
                       help="angles in degrees at the boundary")
        p.add_argument("--json", dest="json_out", action="store_true",
                       help="JSON report instead of CSV")
        p.add_argument("--grid", type=int, default=None,
                       help="phase grid points (teleport-demo)")
        p.add_argument("--d", dest="group_order", type=int, default=None,
                       help="cyclic group order (align)")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    merged = merge_file_config(vars(args), args.config)
    threads = merged.get("threads")
    env_threads = os.environ.get("FRAME_SYNC_THREADS")
    if threads is None and env_threads:
        try:
            threads = int(env_threads)
        except ValueError:
            raise UsageError(f"FRAME_SYNC_THREADS must be an integer, got {env_threads!r}")
    return RunConfig(
        command=merged["command"],
        seed=merged["seed"] if merged.get("seed") is not None else 0,
        trials=merged.get("trials"),
        n=merged.get("n"),
        n_range=merged.get("n_range"),
        state=merged.get("state"),
        cost=merged.get("cost"),
        psi0=merged.get("psi0"),
        oracle=bool(merged.get("oracle")),
        degrees=bool(merged.get("degrees")),
        json_out=bool(merged.get("json_out")),
        out=merged.get("out"),
        grid=merged["grid"] if merged.get("grid") is not None else 24,
        group_order=merged.get("group_order"),
        threads=threads,
    )


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = _config_from_args(args)
        table = COMMANDS[cfg.command](cfg)
        return _emit(table, cfg)
    except UsageError as exc:
        print(f"frame-sync: error: {exc}", file=sys.stderr)
        return 1
    except ContractViolation as exc:
        print(f"frame-sync: invalid input: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
