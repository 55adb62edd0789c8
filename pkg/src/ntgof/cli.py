"""Command-line front end.

Four subcommands cover the operational surface:

    ntgof test      --kind KIND --input data.csv [flags]
    ntgof calibrate --kind KIND --input study.json [flags]
    ntgof power     --kind KIND --input study.json [flags]
    ntgof probe     --input study.json [flags]

``test`` reads observations from CSV (header required; ``x`` for
uniformity/deconvolution/composite, ``x,y`` for independence), runs the
data-driven test, calibrates a null distribution by Monte Carlo, and
writes a JSON report with the selected dimension, statistic, p-value,
critical value, and the full per-dimension series.  ``calibrate``,
``power``, and ``probe`` read study parameters (sample sizes,
alternatives, probe settings) from a small JSON file -- the flag set is
the same for every subcommand; what changes is what ``--input`` holds.

Flags: ``--kind {uniformity,independence,deconvolution,composite}``,
``--input PATH``, ``--penalty {schwarz|linear2k|table:<path>}``,
``--dmax {auto|<int>}``, ``--alpha``, ``--mc-reps``, ``--seed``,
``--out``.  A penalty table CSV has columns ``k,n,pi``.  The
environment variable ``NTGOF_THREADS`` caps Monte Carlo workers
(0 = auto); any worker count yields byte-identical output.

Exit codes: 0 = completed run (whatever the decision), 2 = input error
(malformed CSV or config, with a line number when it is a CSV), 3 =
numeric failure (singular normalizing matrix and friends).  All JSON
numbers carry 17 significant digits so reports round-trip losslessly
and repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from .basis import legendre_basis
from .catalog import (
    AlternativeSpec,
    TestSpec,
    composite_spec,
    contamination_alternative,
    deconvolution_spec,
    gaussian_noise,
    independence_spec,
    noisy_copy_pairs,
    run_test,
    uniformity_spec,
)
from .errors import InputError, NumericError
from .montecarlo import (
    MonteCarloConfig,
    consistency_probe,
    null_distribution,
    p_value,
    power_curve,
    tail_rate_probe,
)
from .selection import (
    PenaltySchedule,
    default_budget,
    fixed_budget,
    linear_schedule,
    schwarz_schedule,
    table_schedule,
)

CLI_KINDS = ("uniformity", "independence", "deconvolution", "composite")
_KIND_MAP = {"independence": "independence_rank"}


# ---------------------------------------------------------------------------
# JSON emission: deterministic, 17 significant digits


def _fmt(value, pieces: list) -> None:
    if value is None:
        pieces.append("null")
    elif isinstance(value, bool):
        pieces.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        pieces.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            raise ValueError(f"non-finite number in report: {v}")
        pieces.append("%.17g" % v)
    elif isinstance(value, str):
        pieces.append(json.dumps(value))
    elif isinstance(value, dict):
        pieces.append("{")
        for i, key in enumerate(sorted(value)):
            if i:
                pieces.append(",")
            pieces.append(json.dumps(str(key)) + ":")
            _fmt(value[key], pieces)
        pieces.append("}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        pieces.append("[")
        for i, item in enumerate(value):
            if i:
                pieces.append(",")
            _fmt(item, pieces)
        pieces.append("]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__} into a report")


def dump_report(obj: dict) -> str:
    """Deterministic JSON: sorted keys, %.17g floats, trailing newline."""
    pieces: list = []
    _fmt(obj, pieces)
    return "".join(pieces) + "\n"


# ---------------------------------------------------------------------------
# input readers


def _read_csv_columns(path: str, columns: tuple[str, ...]) -> np.ndarray:
    try:
        fh = open(path, newline="")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty CSV (missing header)") from None
        got = tuple(h.strip() for h in header)
        if got != columns:
            raise InputError(
                f"{path}, line 1: expected header {','.join(columns)!r}, "
                f"got {','.join(got)!r}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(columns):
                raise InputError(
                    f"{path}, line {lineno}: expected {len(columns)} fields, got {len(row)}"
                )
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                bad = next(c for c in row if not _is_number(c))
                raise InputError(
                    f"{path}, line {lineno}: could not parse {bad.strip()!r} as a number"
                ) from None
    if not rows:
        raise InputError(f"{path}: no data rows")
    data = np.array(rows, dtype=float)
    return data[:, 0] if len(columns) == 1 else data


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _read_penalty_table(path: str) -> PenaltySchedule:
    raw = _read_csv_columns(path, ("k", "n", "pi"))
    table = {}
    for row in np.atleast_2d(raw):
        k, n, pi = row
        if k != int(k) or n != int(n):
            raise InputError(f"{path}: k and n must be integers, got k={k}, n={n}")
        table[(int(k), int(n))] = float(pi)
    return table_schedule(table, name=f"table:{path}")


def _read_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e})") from None
    if not isinstance(cfg, dict):
        raise InputError(f"{path}: config must be a JSON object")
    return cfg


# ---------------------------------------------------------------------------
# spec assembly


def _parse_penalty(text: str) -> PenaltySchedule:
    if text == "schwarz":
        return schwarz_schedule()
    if text == "linear2k":
        return linear_schedule()
    if text.startswith("table:"):
        return _read_penalty_table(text[len("table:"):])
    raise InputError(
        f"unknown penalty {text!r}; expected schwarz, linear2k, or table:<path>"
    )


def _parse_budget(text: str, max_degree: int):
    if text == "auto":
        return default_budget(cap=min(12, max_degree))
    try:
        d = int(text)
    except ValueError:
        raise InputError(f"--dmax must be 'auto' or an integer, got {text!r}") from None
    if not 1 <= d <= max_degree:
        raise InputError(f"--dmax {d} outside 1..{max_degree}")
    return fixed_budget(d)


def _build_spec(kind: str, penalty, budget, config: dict) -> TestSpec:
    if kind == "uniformity":
        return uniformity_spec(penalty=penalty, budget=budget)
    if kind == "independence":
        return independence_spec(penalty=penalty, budget=budget)
    if kind == "deconvolution":
        sigma = float(config.get("noise_sigma", 0.25))
        if sigma <= 0:
            raise InputError("noise_sigma must be positive")
        return deconvolution_spec(
            noise=gaussian_noise(sigma),
            penalty=penalty,
            budget=budget,
            l_draws=int(config.get("l_draws", 200_000)),
            l_seed=int(config.get("l_seed", 0)),
            grid_points=int(config.get("grid_points", 2001)),
        )
    if kind == "composite":
        beta0 = config.get("beta0", [0.0])
        return composite_spec(beta0=np.asarray(beta0, dtype=float), penalty=penalty, budget=budget)
    raise InputError(f"unknown kind {kind!r}")


def _parse_alternative(kind: str, cfg: dict) -> AlternativeSpec:
    alt = cfg.get("alternative")
    if not isinstance(alt, dict) or "type" not in alt:
        raise InputError('config needs an "alternative" object with a "type"')
    if alt["type"] == "contamination":
        coeffs = alt.get("coefficients")
        if not isinstance(coeffs, dict) or not coeffs:
            raise InputError('contamination alternative needs a "coefficients" map')
        try:
            parsed = {int(j): float(c) for j, c in coeffs.items()}
        except (TypeError, ValueError):
            raise InputError("contamination coefficients must map degree -> value") from None
        return contamination_alternative(parsed)
    if alt["type"] == "noisy_copy":
        if kind != "independence":
            raise InputError("noisy_copy alternative only applies to --kind independence")
        return noisy_copy_pairs(float(alt.get("noise_sd", 0.5)))
    raise InputError(f"unknown alternative type {alt['type']!r}")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_test(args) -> dict:
    kind = args.kind
    columns = ("x", "y") if kind == "independence" else ("x",)
    data = _read_csv_columns(args.input, columns)
    n = int(data.shape[0])
    budget = _parse_budget(args.dmax, legendre_basis(12).max_degree)
    spec = _build_spec(kind, _parse_penalty(args.penalty), budget, {})
    try:
        outcome = run_test(data, spec)
    except ValueError as e:
        raise InputError(f"{args.input}: {e}") from e
    config = MonteCarloConfig(replications=args.mc_reps, seed=args.seed, alpha=args.alpha)
    calibration = null_distribution(spec, n, config)
    p = p_value(outcome.t_s, calibration)
    decision = "reject" if p <= args.alpha else "accept"
    series = [
        {
            "k": k + 1,
            "t": float(outcome.series[k]),
            "pi": float(outcome.penalties[k]),
            "penalized": float(outcome.penalized[k]),
        }
        for k in range(outcome.series.size)
    ]
    return {
        "command": "test",
        "kind": kind,
        "n": n,
        "s": outcome.s,
        "t_s": outcome.t_s,
        "p_value": p,
        "critical_value": calibration.critical_value,
        "alpha": args.alpha,
        "decision": decision,
        "penalty": args.penalty,
        "budget_dim": spec.budget.d(n),
        "mc_reps": args.mc_reps,
        "seed": args.seed,
        "series": series,
    }


def _cmd_calibrate(args) -> dict:
    cfg = _read_config(args.input)
    if "n" not in cfg:
        raise InputError(f'{args.input}: calibrate config needs "n"')
    n = int(cfg["n"])
    budget = _parse_budget(args.dmax, legendre_basis(12).max_degree)
    spec = _build_spec(args.kind, _parse_penalty(args.penalty), budget, cfg)
    config = MonteCarloConfig(replications=args.mc_reps, seed=args.seed, alpha=args.alpha)
    result = null_distribution(spec, n, config)
    out = result.as_dict()
    out.update(
        {
            "command": "calibrate",
            "kind": args.kind,
            "penalty": args.penalty,
            "budget_dim": spec.budget.d(n),
            "statistics": [float(t) for t in result.statistics],
        }
    )
    return out


def _cmd_power(args) -> dict:
    cfg = _read_config(args.input)
    grid = cfg.get("n_grid")
    if not isinstance(grid, list) or not grid:
        raise InputError(f'{args.input}: power config needs a non-empty "n_grid"')
    budget = _parse_budget(args.dmax, legendre_basis(12).max_degree)
    spec = _build_spec(args.kind, _parse_penalty(args.penalty), budget, cfg)
    alternative = _parse_alternative(args.kind, cfg)
    config = MonteCarloConfig(
        replications=args.mc_reps, seed=args.seed, alpha=args.alpha, n_grid=tuple(grid)
    )
    result = power_curve(spec, alternative, config)
    out = result.as_dict()
    out.update({"command": "power", "kind": args.kind, "penalty": args.penalty})
    return out


def _cmd_probe(args) -> dict:
    cfg = _read_config(args.input)
    which = cfg.get("probe")
    if which == "consistency":
        grid = cfg.get("n_grid")
        if not isinstance(grid, list) or not grid:
            raise InputError(f'{args.input}: probe config needs a non-empty "n_grid"')
        budget = _parse_budget(args.dmax, legendre_basis(12).max_degree)
        spec = _build_spec(args.kind, _parse_penalty(args.penalty), budget, cfg)
        alternative = _parse_alternative(args.kind, cfg)
        config = MonteCarloConfig(
            replications=args.mc_reps, seed=args.seed, alpha=args.alpha, n_grid=tuple(grid)
        )
        result = consistency_probe(
            spec, alternative, config, threshold=float(cfg.get("threshold", 0.8))
        )
    elif which == "tail_rate":
        sampler_cfg = cfg.get("sampler", {})
        stype = sampler_cfg.get("type", "rademacher") if isinstance(sampler_cfg, dict) else None
        if stype != "rademacher":
            raise InputError('tail_rate probe supports sampler {"type": "rademacher"}')
        grid = cfg.get("n_grid")
        if not isinstance(grid, list) or len(grid) < 2:
            raise InputError(f'{args.input}: tail_rate probe needs an "n_grid" of >= 2 sizes')
        result = tail_rate_probe(
            draw=lambda rng, m: 2.0 * rng.integers(0, 2, m) - 1.0,
            mean=0.0,
            sigma=float(cfg.get("sigma", 1.0)),
            y=float(cfg.get("y", 0.5)),
            n_grid=[int(v) for v in grid],
            replications=args.mc_reps,
            seed=args.seed,
            factor=float(cfg.get("factor", 2.0)),
        )
    else:
        raise InputError(f'{args.input}: "probe" must be "consistency" or "tail_rate"')
    out = result.as_dict()
    out.update({"command": "probe", "seed": args.seed, "replications": args.mc_reps})
    return out


# ---------------------------------------------------------------------------
# driver


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--kind", choices=CLI_KINDS, default="uniformity")
    sub.add_argument("--input", required=True, help="CSV data (test) or JSON study config")
    sub.add_argument("--penalty", default="schwarz", help="schwarz | linear2k | table:<path>")
    sub.add_argument("--dmax", default="auto", help="auto | largest dimension to consider")
    sub.add_argument("--alpha", type=float, default=0.05)
    sub.add_argument("--mc-reps", type=int, default=2000, dest="mc_reps")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default=None, help="report path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ntgof",
        description="Data-driven score tests with Monte Carlo calibration.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("test", _cmd_test),
        ("calibrate", _cmd_calibrate),
        ("power", _cmd_power),
        ("probe", _cmd_probe),
    ):
        sub = commands.add_parser(name)
        _add_common_flags(sub)
        sub.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not 0.0 < args.alpha < 1.0:
        print("ntgof: --alpha must lie strictly between 0 and 1", file=sys.stderr)
        return 2
    if args.command in ("calibrate", "power") and args.mc_reps < 100:
        print("ntgof: --mc-reps must be >= 100", file=sys.stderr)
        return 2
    try:
        report = args.fn(args)
    except InputError as e:
        print(f"ntgof: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"ntgof: {e}", file=sys.stderr)
        return 2
    except KeyError as e:
        # a user penalty table without an entry the run needs
        print(f"ntgof: {e.args[0] if e.args else e}", file=sys.stderr)
        return 2
    except NumericError as e:
        print(f"ntgof: numeric failure: {e}", file=sys.stderr)
        return 3
    text = dump_report(report)
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
