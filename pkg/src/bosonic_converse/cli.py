"""Command-line interface: ``bosonic-converse <command> [options]``.

Every command writes one table (CSV or JSON) whose header records the tool
version, the fully resolved configuration and numerical diagnostics.

Exit codes: 0 success, 1 invalid configuration, 2 verification failure,
3 numerical tolerance or truncation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .channels import additive_number_dist, loss_number_dist, thermal_number_dist, ChannelParams
from .converse import (
    CodebookSpec,
    ConverseEnvelope,
    DeltaSet,
    cap_upper_gio,
    cap_upper_gio_additive,
    cap_upper_ks,
    cap_upper_ks_additive,
    concentration_experiment,
    envelope_curve,
    mean_constraint_demo,
)
from .converse.bounds import (
    cap_lower_additive,
    cap_lower_thermal,
)
from .errors import InvalidArgumentError, MissingDeltaError, ToleranceError, TruncationError
from .io import render
from .verify import SUITES

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3

SLACK_DEFAULTS = {
    "d1": "root-exponential",
    "d2": 0.01,
    "d3": 0.01,
    "d4": "root-exponential",
    "d5": 0.01,
    "d6": "root-exponential",
    "delta": 0.01,
}

DEFAULTS = {
    "bounds": {
        "channel": "thermal",
        "grid": "point",
        "eta": 0.5,
        "n_s": 1.0,
        "n_b": 1.0,
        "n_bar": 1.0,
        "points": 20,
        "eta_min": 1e-3,
        "eta_max": 0.999,
        "photons_min": 1e-3,
        "photons_max": 50.0,
    },
    "envelope": {
        "theorem": 1,
        "channel": "thermal",
        "rate": None,
        "rate_offset": 0.2,
        "eta": 0.5,
        "n_s": 1.0,
        "n_b": 1.0,
        "n_bar": 1.0,
        "n_min": 1,
        "n_max": 10000,
        "step": 1,
        **SLACK_DEFAULTS,
    },
    "dist": {"channel": "thermal", "k": 0, "eta": 0.5, "n_b": 1.0, "n_bar": 1.0, "dim": 40},
    "verify:decompositions": {"tolerance": 1e-14},
    "verify:smoothing": {"instances": 10000, "tolerance": 1e-12},
    "verify:gentle": {"instances": 500, "tolerance": 1e-10},
    "verify:rank": {"n_max": 200, "densities": [0.5, 1.0, 5.0]},
    "verify:qubit": {"instances": 1000, "n_max": 8, "rates": [1.5, 2.0]},
    "demo:mean-constraint": {
        "n_modes": 1,
        "power": 2.0,
        "mix_p": 0.5,
        "n_s": None,
        "eta": 0.8,
        "n_b": 0.5,
        "dim": 40,
    },
    "demo:concentration": {
        "n_values": [50, 100, 200, 400],
        "photons_per_mode": 0,
        "eta": 0.5,
        "n_b": 1.0,
        "delta5": 0.1,
        "trials": 10000,
        "dim": None,
    },
}


class ConfigError(ValueError):
    pass


def _coerce(key, value, default):
    """Convert ``value`` to the type of ``default``; strings come from ``--set``."""
    if isinstance(value, str) and not isinstance(default, str):
        try:
            value = json.loads(value)
        except json.JSONDecodeError:
            if isinstance(default, list):
                value = [json.loads(v) for v in value.split(",")]
            elif default is not None:
                raise ConfigError(f"cannot parse {key}={value!r}") from None
    if default is None or value is None:
        return value
    try:
        if isinstance(default, bool):
            return bool(value)
        if isinstance(default, int):
            if float(value) != int(float(value)):
                raise ConfigError(f"{key} must be an integer")
            return int(value)
        if isinstance(default, float):
            return float(value)
        if isinstance(default, list):
            items = value if isinstance(value, list) else [value]
            kind = type(default[0]) if default else float
            return [kind(v) for v in items]
        if isinstance(default, str):
            return value if isinstance(value, dict) else str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return value


@dataclass
class RunConfig:
    """Resolved configuration of one CLI invocation."""

    command: str
    params: dict
    seed: int = 0
    output_path: str = None
    format: str = "csv"
    kind: str = None

    @property
    def key(self):
        return f"{self.command}:{self.kind}" if self.kind else self.command

    @classmethod
    def resolve(cls, command, kind=None, file_params=None, overrides=(), **kw):
        """Merge defaults, a config mapping and ``key=value`` overrides.

        Raises:
            ConfigError: on unknown keys or values of the wrong type.
        """
        key = f"{command}:{kind}" if kind else command
        if key not in DEFAULTS:
            raise ConfigError(f"unknown command {key!r}")
        defaults = DEFAULTS[key]
        merged = dict(defaults)
        supplied = dict(file_params or {})
        for item in overrides:
            name, sep, raw = item.partition("=")
            if not sep:
                raise ConfigError(f"--set expects key=value, got {item!r}")
            supplied[name.strip()] = raw.strip()
        unknown = sorted(set(supplied) - set(defaults))
        if unknown:
            raise ConfigError(f"unknown keys for {key}: {', '.join(unknown)}")
        for name, value in supplied.items():
            merged[name] = _coerce(name, value, defaults[name])
        return cls(command, merged, kind=kind, **kw)

    def describe(self):
        return {"command": self.key, "params": self.params, "seed": self.seed, "format": self.format}


@dataclass
class Table:
    columns: list
    rows: list
    diagnostics: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _log_grid(lo, hi, points):
    if points < 1 or not 0.0 < lo <= hi:
        raise ConfigError("grid needs points >= 1 and 0 < min <= max")
    return np.geomspace(lo, hi, points)


def cmd_bounds(cfg):
    p = cfg.params
    additive = p["channel"] == "additive"
    if p["channel"] not in ("thermal", "additive"):
        raise ConfigError("channel must be thermal or additive")
    if p["grid"] == "point":
        axes = [[p["n_s"]], [p["n_bar"]]] if additive else [[p["eta"]], [p["n_s"]], [p["n_b"]]]
    elif p["grid"] == "log":
        photons = _log_grid(p["photons_min"], p["photons_max"], p["points"])
        if additive:
            axes = [photons, photons]
        else:
            axes = [_log_grid(p["eta_min"], p["eta_max"], p["points"]), photons, photons]
    else:
        raise ConfigError("grid must be point or log")
    mesh = [m.ravel() for m in np.meshgrid(*axes, indexing="ij")]
    if additive:
        lower = cap_lower_additive(*mesh)
        gio = cap_upper_gio_additive(*mesh)
        ks = cap_upper_ks_additive(*mesh)
        columns = ["n_s", "n_bar"]
    else:
        lower = cap_lower_thermal(*mesh)
        gio = cap_upper_gio(*mesh)
        ks = cap_upper_ks(*mesh)
        columns = ["eta", "n_s", "n_b"]
    lower, gio, ks = (np.atleast_1d(v) for v in (lower, gio, ks))
    columns += ["lower", "upper_gio", "upper_ks", "gap_gio", "gap_ks"]
    data = np.column_stack(mesh + [lower, gio, ks, gio - lower, ks - lower])
    ordered = bool(np.all(lower <= np.minimum(gio, ks) + 1e-12))
    diag = {
        "rows": int(data.shape[0]),
        "ordered": ordered,
        "max_gap_gio": float(np.max(gio - lower)),
        "max_gap_ks": float(np.max(ks - lower)),
        "min_gap": float(np.min(np.minimum(gio, ks) - lower)),
    }
    return Table(columns, [tuple(float(v) for v in row) for row in data], diag)


def _envelope_setup(p):
    params = ChannelParams(eta=p["eta"], n_b=p["n_b"], n_bar=p["n_bar"])
    deltas = DeltaSet(**{k: p[k] for k in SLACK_DEFAULTS})
    additive = p["channel"] == "additive"
    if p["theorem"] == 1:
        ref = cap_upper_ks_additive(p["n_s"], p["n_bar"]) if additive else cap_upper_ks(p["eta"], p["n_s"], p["n_b"])
    else:
        ref = cap_upper_gio_additive(p["n_s"], p["n_bar"]) if additive else cap_upper_gio(p["eta"], p["n_s"], p["n_b"])
    rate = ref + p["rate_offset"] if p["rate"] is None else p["rate"]
    return ConverseEnvelope(rate, 1, params, p["n_s"], deltas, p["channel"]), ref


def cmd_envelope(cfg):
    p = cfg.params
    if p["theorem"] not in (1, 2):
        raise ConfigError("theorem must be 1 or 2")
    if p["channel"] not in ("thermal", "additive"):
        raise ConfigError("channel must be thermal or additive")
    if not 1 <= p["n_min"] <= p["n_max"] or p["step"] < 1:
        raise ConfigError("need 1 <= n_min <= n_max and step >= 1")
    env, ref = _envelope_setup(p)
    curve = envelope_curve(env, p["theorem"], range(p["n_min"], p["n_max"] + 1, p["step"]))
    rows = [(int(n), float(b), bool(v)) for n, b, v in zip(curve.ns, curve.bounds, curve.vacuous)]
    diag = {
        "rate": env.rate_R,
        "capacity_upper_bound": ref,
        "threshold_with_slack": curve.threshold,
        "deltas": env.deltas.describe(),
        "monotone_tail": curve.monotone_tail,
        "first_n_below_1e-3": curve.first_below(1e-3),
        "final_below_first": bool(curve.bounds[-1] < curve.bounds[0]),
    }
    return Table(["n", "bound", "vacuous"], rows, diag)


def cmd_dist(cfg):
    p = cfg.params
    k, dim = p["k"], p["dim"]
    if p["channel"] == "loss":
        dist = loss_number_dist(k, p["eta"], dim)
        expected = p["eta"] * k
    elif p["channel"] == "additive":
        dist = additive_number_dist(k, p["n_bar"], dim)
        expected = k + p["n_bar"]
    elif p["channel"] == "thermal":
        dist = thermal_number_dist(k, p["eta"], p["n_b"], dim)
        expected = p["eta"] * k + (1.0 - p["eta"]) * p["n_b"]
    else:
        raise ConfigError("channel must be loss, additive or thermal")
    mean = dist.mean()
    rows = [(k, l, float(prob), mean) for l, prob in enumerate(dist.probs)]
    diag = {"dim": dim, "tail": dist.tail, "expected_mean": expected, "mean_error": abs(mean - expected)}
    return Table(["k", "l", "prob", "mean"], rows, diag)


def cmd_verify(cfg):
    p, suite = cfg.params, cfg.kind
    if suite == "decompositions":
        res = SUITES[suite](tol=p["tolerance"])
    elif suite in ("smoothing", "gentle"):
        res = SUITES[suite](instances=p["instances"], seed=cfg.seed, tol=p["tolerance"])
    elif suite == "rank":
        res = SUITES[suite](n_max=p["n_max"], densities=tuple(p["densities"]))
    else:
        res = SUITES[suite](instances=p["instances"], n_max=p["n_max"], rates=tuple(p["rates"]), seed=cfg.seed)
    diag = {
        "suite": suite,
        "checks": len(res.rows),
        "failures": res.failures,
        "passed": res.passed,
        "tolerance": res.tolerance,
        "max_residual": res.max_residual,
    }
    return Table(list(res.columns), res.rows, diag, EXIT_OK if res.passed else EXIT_VERIFY)


def cmd_demo(cfg):
    p = cfg.params
    if cfg.kind == "mean-constraint":
        spec = CodebookSpec(p["n_modes"], p["power"], p["mix_p"], 2, p["n_s"])
        rep = mean_constraint_demo(spec, p["eta"], p["n_b"], p["dim"], seed=cfg.seed)
        columns = [
            "reference_success",
            "reference_error",
            "succ_mixed",
            "succ_pure_codeword_bound",
            "inequality_holds",
            "purified_mean_formula",
            "purified_mean_numeric",
        ]
        rows = [(rep.reference_success, rep.reference_error, rep.succ_mixed,
                 rep.succ_pure_codeword_bound, rep.inequality_holds,
                 rep.purified_mean_formula, rep.purified_mean_numeric)]
        diag = {"dim": rep.dim, "leakage": rep.leakage, "amplitudes_re": rep.amplitudes.real,
                "amplitudes_im": rep.amplitudes.imag}
        return Table(columns, rows, diag, EXIT_OK if rep.inequality_holds else EXIT_VERIFY)
    rows, dims, moment = [], [], []
    for n in p["n_values"]:
        rep = concentration_experiment([p["photons_per_mode"]] * n, p["eta"], p["n_b"], p["delta5"],
                                       p["trials"], seed=cfg.seed, dim=p["dim"])
        rows.append((n, rep.threshold, rep.empirical_fail_rate, rep.chebyshev_bound,
                     rep.sampling_slack, rep.holds))
        dims.append(rep.dim)
        moment.append(rep.moment_error)
    rates = [r[2] for r in rows]
    diag = {
        "dims": dims,
        "moment_errors": moment,
        "strictly_decreasing": all(b < a for a, b in zip(rates, rates[1:])),
        "all_hold": all(r[-1] for r in rows),
    }
    columns = ["n", "threshold", "empirical_fail_rate", "chebyshev_bound", "sampling_slack", "holds"]
    return Table(columns, rows, diag, EXIT_OK if diag["all_hold"] else EXIT_VERIFY)


COMMANDS = {
    "bounds": cmd_bounds,
    "envelope": cmd_envelope,
    "dist": cmd_dist,
    "verify": cmd_verify,
    "demo": cmd_demo,
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with parameter values")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override one parameter (repeatable)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-o", "--output", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="bosonic-converse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bounds", parents=[common], help="capacity bounds at a point or on a log grid")
    sub.add_parser("envelope", parents=[common], help="success-probability envelope versus n")
    sub.add_parser("dist", parents=[common], help="output photon-number law for a number-state input")
    verify = sub.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("suite", choices=sorted(SUITES))
    demo = sub.add_parser("demo", parents=[common], help="mean-constraint or concentration demo")
    demo.add_argument("kind", choices=("mean-constraint", "concentration"))
    return parser


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def run(cfg):
    """Execute a resolved configuration and return ``(text, exit_code)``."""
    table = COMMANDS[cfg.command](cfg)
    meta = {"tool": "bosonic-converse", "version": __version__, "config": cfg.describe(),
            "diagnostics": table.diagnostics}
    return render(table.columns, table.rows, meta, cfg.format), table.exit_code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.resolve(
            args.command,
            getattr(args, "suite", None) or getattr(args, "kind", None),
            _load_config(args.config),
            args.overrides,
            seed=args.seed,
            output_path=args.output,
            format=args.format,
        )
        text, code = run(cfg)
    except (ToleranceError, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, InvalidArgumentError, MissingDeltaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
