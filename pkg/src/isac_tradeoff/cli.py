"""Command-line front end: parameter sweeps, the pilot optimiser, and Monte Carlo validation.

Every command writes a CSV (header + rows) and a sidecar ``<csv>.config``
holding the fully resolved configuration, which can be fed back with
``--config`` to reproduce the run byte for byte.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from .capacity import capacity_at
from .errors import ConvergenceError, DegenerateInputError, DomainError
from .metrics import efficiency, feasible_pilot_set, optimize_pilot_length, utility_terms
from .montecarlo import mc_ergodic_capacity, mc_ergodic_crb
from .scenario import ConfigError, Scenario, dump, format_value, parse_config_text, parse_override, resolve
from .sensing import ergodic_crb, ergodic_crb_series

OUTPUT_DIR_ENV = "ISAC_TRADEOFF_OUTPUT_DIR"
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

# capacity agreement: within 0.5 % or 3 standard errors; CRB: 3 standard errors
CAPACITY_REL_TOL = 5e-3
Z_TOL = 3.0


class NumericalFailure(RuntimeError):
    pass


def _mc_spec(scn, offset):
    return replace(scn.mc, stream_id=scn.mc.stream_id + offset)


def _pilot_axis(scn, command):
    if scn.cfg["axis"] != "pilots":
        raise ConfigError(f"field 'axis': {command} only sweeps over pilots")
    return scn.axis_values()


def cmd_sweep_capacity(scn):
    form = scn.cfg["capacity_form"]
    rows = []
    for lp in _pilot_axis(scn, "sweep-capacity"):
        slot = scn.slot.with_pilots(lp)
        est = mc_ergodic_capacity(slot, scn.comm, _mc_spec(scn, lp), workers=scn.cfg["workers"])
        rows.append([lp, capacity_at(slot.L, lp, slot.B, scn.comm, form), est.mean, est.std_error])
    return ["L_p", "capacity_closed", "capacity_mc_mean", "capacity_mc_stderr"], rows


def cmd_sweep_crb(scn):
    rows = []
    for lp in _pilot_axis(scn, "sweep-crb"):
        est = mc_ergodic_crb(scn.sense, lp, _mc_spec(scn, lp), workers=scn.cfg["workers"])
        rows.append([lp, ergodic_crb(scn.sense, lp), ergodic_crb_series(scn.sense, lp, 50, check=False),
                     est.mean, est.std_error])
    return ["L_p", "ergodic_crb", "ergodic_crb_series", "crb_mc_mean", "crb_mc_stderr"], rows


def cmd_tradeoff(scn):
    form = scn.cfg["capacity_form"]
    rows = [[lp, capacity_at(scn.slot.L, lp, scn.slot.B, scn.comm, form), ergodic_crb(scn.sense, lp)]
            for lp in _pilot_axis(scn, "tradeoff")]
    return ["L_p", "capacity", "ergodic_crb"], rows


def _efficiency_at(scn, lp):
    c = capacity_at(scn.slot.L, lp, scn.slot.B, scn.comm, scn.cfg["capacity_form"])
    return efficiency(c, ergodic_crb(scn.sense, lp), scn.metric)


def cmd_sweep_efficiency(scn):
    rows = []
    cfg = scn.cfg
    if cfg["axis"] == "pilots":
        for lp in scn.axis_values():
            rows.append([lp, _efficiency_at(scn, lp), lp])
    else:
        mode = cfg["pilot_mode"]
        if mode != "optimal" and not 1 <= mode <= scn.slot.L - 1:
            raise ConfigError(f"field 'pilot_mode': fixed pilot count must lie in 1..{scn.slot.L - 1}")
        for snr in scn.axis_values():
            point = Scenario.from_config(cfg, snr_db=snr)
            if mode == "optimal":
                rep = optimize_pilot_length(point.slot, point.comm, point.sense, point.metric,
                                            form=cfg["capacity_form"])
                if not rep.converged:
                    raise NumericalFailure(f"optimize_pilot_length did not converge at snr_db={snr}")
                lp = rep.l_p_opt
            else:
                lp = mode
            rows.append([snr, _efficiency_at(point, lp), lp])
    return ["axis_value", "efficiency", "L_p_used"], rows


def cmd_sweep_utility(scn):
    feasible = feasible_pilot_set(scn.slot, scn.comm, scn.sense, scn.metric, scn.cfg["capacity_form"])
    rows = []
    for lp in _pilot_axis(scn, "sweep-utility"):
        u, cap_ratio, crb_ratio = utility_terms(scn.slot, scn.comm, scn.sense, scn.metric, lp,
                                                scn.cfg["capacity_form"])
        rows.append([lp, u, cap_ratio, crb_ratio, lp in feasible])
    return ["L_p", "utility", "capacity_ratio", "crb_ratio", "feasible"], rows


def cmd_optimize(scn):
    rep = optimize_pilot_length(scn.slot, scn.comm, scn.sense, scn.metric, form=scn.cfg["capacity_form"])
    if not rep.converged:
        raise NumericalFailure(f"optimize_pilot_length: no convergence in {rep.iterations} iterations")
    return ["L_p_opt", "q_star", "iterations", "converged"], [[rep.l_p_opt, rep.q_star, rep.iterations,
                                                             rep.converged]]


def cmd_mc_validate(scn):
    rows = []
    failures = 0
    workers = scn.cfg["workers"]
    for lp in _pilot_axis(scn, "mc-validate"):
        slot = scn.slot.with_pilots(lp)
        closed = capacity_at(slot.L, lp, slot.B, scn.comm)
        est = mc_ergodic_capacity(slot, scn.comm, _mc_spec(scn, lp), workers=workers)
        rel = (est.mean - closed) / closed
        z = est.z_score(closed)
        ok = abs(rel) <= CAPACITY_REL_TOL or abs(z) <= Z_TOL
        failures += not ok
        rows.append(["capacity", lp, closed, est.mean, est.std_error, rel, z, ok])
    for lp in _pilot_axis(scn, "mc-validate"):
        closed = ergodic_crb(scn.sense, lp)
        est = mc_ergodic_crb(scn.sense, lp, _mc_spec(scn, 1000 + lp), workers=workers)
        z = est.z_score(closed)
        ok = abs(z) <= Z_TOL
        failures += not ok
        rows.append(["crb", lp, closed, est.mean, est.std_error, (est.mean - closed) / closed, z, ok])
    header = ["quantity", "L_p", "closed_form", "mc_mean", "mc_stderr", "rel_error", "z_score", "agree"]
    return header, rows, failures


COMMANDS = {
    "sweep-capacity": cmd_sweep_capacity,
    "sweep-crb": cmd_sweep_crb,
    "tradeoff": cmd_tradeoff,
    "sweep-efficiency": cmd_sweep_efficiency,
    "sweep-utility": cmd_sweep_utility,
    "optimize": cmd_optimize,
    "mc-validate": cmd_mc_validate,
}


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(float(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def output_path(cfg, command) -> Path:
    if cfg["output"]:
        return Path(cfg["output"])
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"{command}.csv"


def build_parser():
    parser = argparse.ArgumentParser(
        prog="isac-tradeoff",
        description="Capacity / range-CRB trade-off of pilot-sharing ISAC slots.",
        epilog="Any configuration key can be overridden with --key=value, e.g. --snr_db=20 --L=10.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, help="key = value configuration file")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        file_values = {}
        if args.config is not None:
            try:
                text = args.config.read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
            file_values = parse_config_text(text, str(args.config))
        overrides = dict(parse_override(arg) for arg in extra)
        cfg = resolve(file_values, overrides)
        scn = Scenario.from_config(cfg)
        result = COMMANDS[args.command](scn)
    except ConfigError as exc:
        print(f"isac-tradeoff: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, DegenerateInputError, DomainError, OverflowError, NumericalFailure) as exc:
        print(f"isac-tradeoff: numerical failure in {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    header, rows = result[:2]
    path = output_path(cfg, args.command)
    write_atomic(path, render_csv(header, rows))
    write_atomic(path.with_name(path.name + ".config"), dump(cfg))
    print(f"wrote {len(rows)} rows to {path}", file=sys.stderr)
    if len(result) == 3 and result[2]:
        print(f"isac-tradeoff: mc-validate: {result[2]} of {len(rows)} checks disagree", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
