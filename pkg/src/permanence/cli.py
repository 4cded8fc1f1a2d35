"""Command line front end: ``permanence {analyze,simulate,sweep,models}``.

Exit codes: 0 when a verdict or data was produced (any outcome), 2 for
invalid input, 3 for an internal numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path

import numpy as np

from .certificates import analyze
from .lp import LPError
from .model import BUILTIN_FAMILIES, SpecError, SystemSpec, check
from .simulate import (
    IntegrationError,
    IntegratorOptions,
    empirical_permanence,
    integrate,
    interior_starts,
)

log = logging.getLogger("permanence")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


# -- configuration -------------------------------------------------------
def load_config(path):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    if "spec" not in data and "b" in data:
        data = {"spec": data}
    if "spec" not in data:
        raise ConfigError("config has no 'spec' block")
    return data


def config_spec(config):
    spec = SystemSpec.from_dict(config["spec"])
    return check(spec)


def integrator_options(config, **defaults):
    block = dict(defaults)
    block.update(config.get("integrator") or {})
    known = {f.name for f in fields(IntegratorOptions)}
    unknown = set(block) - known
    if unknown:
        raise ConfigError(f"unknown integrator options: {sorted(unknown)}")
    try:
        return IntegratorOptions(**block)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad integrator options: {exc}") from None


_PATH = re.compile(r"^(b)\[(\d+)\]\[(\d+)\]$|^(c)\[(\d+)\]$")


def parse_path(path, n):
    """``"b[i][j]"`` or ``"c[i]"`` (0-based) -> index tuple into (B, c)."""
    m = _PATH.match(path.replace(" ", ""))
    if not m:
        raise ConfigError(f"bad parameter path {path!r}")
    if m.group(1):
        idx = ("b", int(m.group(2)), int(m.group(3)))
        if max(idx[1:]) >= n:
            raise ConfigError(f"parameter path {path!r} is out of range for n={n}")
    else:
        idx = ("c", int(m.group(5)))
        if idx[1] >= n:
            raise ConfigError(f"parameter path {path!r} is out of range for n={n}")
    return idx


def apply_parameters(spec, assignments):
    """Copy of ``spec`` with ``{path_tuple: value}`` substituted."""
    B = np.array(spec.B)
    c = np.array(spec.c)
    for idx, value in assignments:
        if idx[0] == "b":
            B[idx[1], idx[2]] = value
        else:
            c[idx[1]] = value
    return SystemSpec(B, c, spec.family)


def sweep_grid(config, spec):
    block = config.get("sweep")
    if not isinstance(block, dict) or not block.get("parameters"):
        raise ConfigError("sweep needs a 'sweep.parameters' list")
    params = block["parameters"]
    if not 1 <= len(params) <= 2:
        raise ConfigError("sweep supports one or two parameters")
    axes = []
    for k, p in enumerate(params):
        paths = p.get("paths") or ([p["path"]] if "path" in p else [])
        if not paths:
            raise ConfigError(f"parameter {k} has no path")
        try:
            start, stop, steps = float(p["start"]), float(p["stop"]), int(p["steps"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f"parameter {k} needs numeric start, stop, steps") from None
        if not (np.isfinite(start) and np.isfinite(stop)):
            raise ConfigError(f"parameter {k} has a non-finite range")
        if steps < 1:
            raise ConfigError(f"parameter {k} needs steps >= 1")
        values = np.linspace(start, stop, steps) if steps > 1 else np.array([start])
        name = p.get("name") or paths[0]
        axes.append((name, [parse_path(q, spec.n) for q in paths], values))
    return axes


# -- commands ------------------------------------------------------------
def cmd_analyze(config, args):
    spec = config_spec(config)
    verdict = analyze(spec)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["outcome", "margin", "rho", "nu"])
        nu = [] if verdict.nu is None else verdict.nu
        w.writerow(_verdict_cells(verdict) + [" ".join(_fmt(v) for v in nu)])
        text = buf.getvalue()
    else:
        text = verdict.to_json(indent=2) + "\n"
    _emit(text, args.out, "verdict." + args.format)
    return EXIT_OK


def cmd_simulate(config, args):
    spec = config_spec(config)
    opts = integrator_options(config)
    starts = config.get("initial_conditions")
    if starts is None:
        starts = interior_starts(spec, int(config.get("samples", 5)), args.seed)
    starts = [np.asarray(x, dtype=float) for x in starts]
    for x in starts:
        if x.shape != (spec.n,) or np.any(x < 0) or not np.all(np.isfinite(x)):
            raise ConfigError(f"initial condition {x.tolist()} is not a nonnegative {spec.n}-vector")
    discard = float(config.get("discard", 0.5))
    out = Path(args.out or "simulate_out")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory: {exc}") from None
    runs = []
    lo, hi = [], []
    for k, x0 in enumerate(starts):
        entry = {"index": k, "x0": x0.tolist()}
        try:
            traj = integrate(spec, x0, opts)
        except IntegrationError as exc:
            entry["error"] = str(exc)
            runs.append(entry)
            continue
        name = f"trajectory_{k:03d}.csv"
        traj.to_csv(out / name)
        entry.update(file=name, flags=traj.flags, final=traj.final.tolist())
        keep = traj.times >= discard * opts.t_max
        logs = traj.log_states[keep]
        fin = logs[np.isfinite(logs)]
        if fin.size:
            lo.append(fin.min())
            hi.append(fin.max())
        runs.append(entry)
    summary = {
        "delta_hat": float(np.exp(min(lo))) if lo else None,
        "D_hat": float(np.exp(max(hi))) if hi else None,
        "runs": runs,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps({k: summary[k] for k in ("delta_hat", "D_hat")}))
    return EXIT_OK


def _fmt(v):
    return "" if v is None else repr(float(v))


def _verdict_cells(verdict):
    return [verdict.outcome, _fmt(verdict.margin), _fmt(verdict.rho)]


def _sweep_cell(task):
    spec, assignments, sim = task
    try:
        cell = apply_parameters(spec, assignments)
        check(cell)
        verdict = analyze(cell)
        row = _verdict_cells(verdict)
        if sim is not None:
            rep = empirical_permanence(cell, **sim)
            row.append(_fmt(rep.delta_hat))
        return row
    except (SpecError, LPError, IntegrationError, ValueError) as exc:
        log.info("sweep cell failed: %s", exc)
        return ["Error", "", ""] + ([""] if sim is not None else [])


def cmd_sweep(config, args):
    spec = config_spec(config)
    axes = sweep_grid(config, spec)
    sim = None
    block = config["sweep"]
    if block.get("simulate"):
        opts = integrator_options(config)
        sim = {"n_samples": int(block.get("samples", 5)), "opts": opts, "seed": args.seed}
    tasks, labels = [], []
    for combo in itertools.product(*[range(len(a[2])) for a in axes]):
        assignments, label = [], []
        for (name, paths, values), k in zip(axes, combo):
            label.append(values[k])
            assignments.extend((p, values[k]) for p in paths)
        tasks.append((spec, assignments, sim))
        labels.append(label)
    jobs = args.jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_cell, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        rows = [_sweep_cell(t) for t in tasks]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = [a[0] for a in axes] + ["outcome", "margin", "rho"]
    if sim is not None:
        header.append("delta_hat")
    w.writerow(header)
    for label, row in zip(labels, rows):
        w.writerow([_fmt(v) for v in label] + row)
    _emit(buf.getvalue(), args.out, "sweep.csv")
    return EXIT_OK


def models_listing():
    lines = [f"{fam.tag}: {fam.formula}" for fam in BUILTIN_FAMILIES]
    lines.append("all laws satisfy f(r,r) = 0 and df/dy < 0")
    return lines


def cmd_models(config, args):
    if args.format == "json":
        payload = [{"family": f.tag, "formula": f.formula} for f in BUILTIN_FAMILIES]
        text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    else:
        text = "\n".join(models_listing()) + "\n"
    _emit(text, args.out, "models." + ("json" if args.format == "json" else "txt"))
    return EXIT_OK


def _emit(text, out, filename):
    sys.stdout.write(text)
    if out:
        path = Path(out)
        try:
            path.mkdir(parents=True, exist_ok=True)
            (path / filename).write_text(text)
        except OSError as exc:
            raise ConfigError(f"cannot write output: {exc}") from None


COMMANDS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "models": cmd_models,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="permanence",
        description="Permanence verdicts for competitive Kolmogorov systems.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file ('-' for stdin)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--jobs", type=int, default=None, help="worker processes")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="permanence verdict as JSON")
    sub.add_parser("simulate", parents=[common], help="integrate orbits to CSV")
    sub.add_parser("sweep", parents=[common], help="verdicts over a parameter grid")
    sub.add_parser("models", parents=[common], help="list built-in growth laws")
    return parser


def _setup_logging():
    level = os.environ.get("PERMANENCE_LOG", "error").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    if args.format is None and args.command != "models":
        args.format = "csv" if args.command == "sweep" else "json"
    try:
        config = None
        if args.command != "models":
            if not args.config:
                raise ConfigError("--config is required")
            config = load_config(args.config)
        return COMMANDS[args.command](config, args)
    except (ConfigError, SpecError) as exc:
        msgs = exc.errors if isinstance(exc, SpecError) else [str(exc)]
        for m in msgs:
            print(f"error: {m}", file=sys.stderr)
        return EXIT_INVALID
    except (LPError, IntegrationError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
