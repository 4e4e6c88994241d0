"""Command-line front end.

Subcommands::

    sqrs figure  --scenario fig5-multipass --trials 1000 --seed 7
    sqrs session --attack measure-resend --mu 100 --p 0.5
    sqrs estimate --mu 200 --phi 1.2
    sqrs attack --attack measure-resend --mu 20 --p 0.5 --trials 200
    sqrs info --kbar 0.1

Exit status: 0 success, 1 configuration error, 2 runtime error, 3 session
aborted because a fidelity check failed.
"""

from __future__ import annotations

import argparse
import ast
import configparser
import csv
import json
import math
import operator
import os
import sys
from dataclasses import fields
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import ConfigError, SqrsError
from .estimation import circular_summary, map_estimate
from .harness import ATTACKS, SCENARIOS, AggregateResult, ExperimentConfig, _build_attack, _secrets, run, trial_rng
from .information import cramer_rao, eve_split_qfi, general_cfi, splitting_ratio_bb84, splitting_ratio_sqrs
from .photonics import CoherentSource, exposure_report
from .protocol import AliceConfig, BobConfig, run_session

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_ABORT = 0, 1, 2, 3
OUTPUT_ENV = "SQRS_OUTPUT_DIR"

# config file layout: section -> keys, each key naming an ExperimentConfig field
CONFIG_SECTIONS: dict[str, tuple[str, ...]] = {
    "experiment": ("scenario", "trials", "master_seed", "true_phi", "phis", "n_phi", "mu", "qubits", "passes", "states"),
    "protocol": ("p_test", "epsilon", "epsilon_tilde", "eta", "random_secrets"),
    "attack": ("attack", "attack_fraction", "eve_delta", "eve_gamma"),
    "photonics": ("kbar", "f_e"),
    "estimation": ("k_bins",),
}

_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_angle(text: str) -> float:
    """Parse a number or a simple arithmetic expression in ``pi`` such as ``2*pi/5``."""

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(text)

    try:
        return ev(ast.parse(text.strip(), mode="eval").body)
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse number {text!r}") from None


def _parse_scalar(kind: str, text: str, key: str):
    text = text.strip()
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return parse_angle(text)
        if kind == "bool":
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
    except ValueError:
        raise ConfigError(f"bad value {text!r} for key {key!r}") from None
    return text


def parse_value(key: str, text: str):
    """Convert a config string to the type of ``ExperimentConfig.<key>``."""
    annotation = str(_FIELD_TYPES[key])
    if annotation.startswith("tuple"):
        inner = annotation[len("tuple[") : annotation.index(",")]
        items = [t for t in text.split(",") if t.strip()]
        return tuple(_parse_scalar(inner, t, key) for t in items)
    return _parse_scalar(annotation, text, key)


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read an INI config or a JSON summary/config; unknown keys are rejected."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if isinstance(data, dict) and isinstance(data.get("config"), dict):
            data = data["config"]
        unknown = sorted(set(data) - set(_FIELD_TYPES))
        if unknown:
            raise ConfigError(f"{path}: unknown config key {unknown[0]!r}")
        return {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    out: dict[str, Any] = {}
    for section in parser.sections():
        if section not in CONFIG_SECTIONS:
            raise ConfigError(f"{path}: unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in CONFIG_SECTIONS[section]:
                raise ConfigError(f"{path}: unknown key {key!r} in section [{section}]")
            out[key] = parse_value(key, raw)
    return out


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def emit(result: AggregateResult, fmt: str, path: str | Path) -> list[Path]:
    """Write ``result`` to ``path``; returns the files written.

    ``csv`` writes the table plus a JSON summary next to it (and a curves
    table when the scenario produces curves); ``json`` writes only the
    summary.
    """
    path = Path(path)
    written: list[Path] = []
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            csv_path = path.with_suffix(".csv")
            with open(csv_path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(result.columns)
                for row in result.rows:
                    w.writerow([_fmt(v) for v in row])
            written.append(csv_path)
            if result.curves:
                curve_path = path.with_name(path.stem + "_curves.csv")
                names = list(result.curves)
                k = len(next(iter(result.curves.values())))
                thetas = 2.0 * math.pi * np.arange(k) / k
                with open(curve_path, "w", newline="") as fh:
                    w = csv.writer(fh, lineterminator="\n")
                    w.writerow(["theta", *names])
                    for i in range(k):
                        w.writerow([_fmt(thetas[i]), *(_fmt(result.curves[n][i]) for n in names)])
                written.append(curve_path)
            json_path = path.with_suffix(".json")
            json_path.write_text(result.to_json() + "\n")
            written.append(json_path)
        elif fmt == "json":
            json_path = path.with_suffix(".json")
            json_path.write_text(result.to_json() + "\n")
            written.append(json_path)
        else:
            raise ConfigError(f"unknown output format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write output under {path}: {exc}") from exc
    return written


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _output_dir(args) -> Path:
    if args.output_dir:
        return Path(args.output_dir)
    return Path(os.environ.get(OUTPUT_ENV, "."))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sqrs", description="Secure quantum remote sensing simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="INI config, or a JSON summary whose config echo is rerun")
        p.add_argument("--output-dir", help=f"where to write files (default ${OUTPUT_ENV} or .)")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("figure", help="run a figure scenario")
    common(p)
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--trials", type=int)
    p.add_argument("--name", help="output file stem (default: scenario)")

    p = sub.add_parser("session", help="run one protocol session and write its transcript")
    common(p)
    p.add_argument("--attack", choices=ATTACKS, default=None)
    p.add_argument("--mu", type=int)
    p.add_argument("--p", type=float, dest="p_test")
    p.add_argument("--phi", type=parse_angle)
    p.add_argument("--passes", type=int)
    p.add_argument("--kbar", type=float, help="weak coherent source; omit for single photons")
    p.add_argument("--public", action="store_true", help="drop Alice's private labels from the transcript")

    p = sub.add_parser("estimate", help="honest session followed by Alice's phase estimate")
    common(p)
    p.add_argument("--mu", type=int)
    p.add_argument("--p", type=float, dest="p_test")
    p.add_argument("--phi", type=parse_angle)
    p.add_argument("--passes", type=int)

    p = sub.add_parser("attack", help="repeat attacked sessions and report abort statistics")
    common(p)
    p.add_argument("--attack", choices=ATTACKS, default=None)
    p.add_argument("--mu", type=int)
    p.add_argument("--p", type=float, dest="p_test")
    p.add_argument("--trials", type=int)

    p = sub.add_parser("info", help="print analytic information quantities")
    p.add_argument("--kbar", type=float, default=0.1)
    p.add_argument("--f-e", type=float, default=0.25, dest="f_e")
    p.add_argument("--alpha", type=parse_angle, default=math.pi / 2)
    p.add_argument("--gamma", type=parse_angle, default=math.pi / 2)
    p.add_argument("--zeta", type=parse_angle, default=math.pi / 2)
    p.add_argument("--mu", type=int, default=100)
    p.add_argument("--delta", type=parse_angle, default=math.pi / 2)
    return parser


def _experiment(args, scenario: str, cli_overrides: dict[str, Any]) -> ExperimentConfig:
    values: dict[str, Any] = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    file_scenario = values.pop("scenario", None)
    scenario = scenario or file_scenario
    if scenario is None:
        raise ConfigError("no scenario given (use --scenario or [experiment] scenario)")
    for k, v in cli_overrides.items():
        if v is not None:
            values[k] = v
    if getattr(args, "seed", None) is not None:
        values["master_seed"] = args.seed
    return ExperimentConfig.for_scenario(scenario, **values)


def _cmd_figure(args) -> int:
    cfg = _experiment(args, args.scenario, {"trials": args.trials})
    result = run(cfg)
    out = _output_dir(args) / (args.name or cfg.scenario)
    for f in emit(result, args.format, out):
        print(f)
    for note in result.notes:
        print(f"note: {note}", file=sys.stderr)
    return EXIT_OK


def _session_setup(args, scenario="custom"):
    overrides = {
        "mu": None if args.mu is None else (args.mu,),
        "p_test": None if args.p_test is None else (args.p_test,),
        "true_phi": getattr(args, "phi", None),
        "passes": None if getattr(args, "passes", None) is None else (args.passes,),
        "attack": getattr(args, "attack", None),
        "kbar": None if getattr(args, "kbar", None) is None else (args.kbar,),
        "trials": getattr(args, "trials", None),
    }
    return _experiment(args, scenario, overrides)


def _cmd_session(args) -> int:
    cfg = _session_setup(args)
    rng = trial_rng(cfg.master_seed, "session", 0, 0)
    mu, p = cfg.mu[0], cfg.p_test[0]
    eps, eps_t = _secrets(cfg, rng)
    alice = AliceConfig(eps, eps_t, cfg.eta)
    bob = BobConfig(p, cfg.passes[0], eps, eps_t)
    source = CoherentSource(cfg.kbar[0]) if getattr(args, "kbar", None) is not None else None
    attack = _build_attack(cfg, rng, mu, p)
    transcript = run_session(alice, bob, cfg.true_phi, mu, attack, rng, source)
    out_dir = _output_dir(args)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "session.jsonl"
    path.write_text("\n".join(transcript.to_lines(public=args.public)) + "\n")
    summary = {
        "master_seed": cfg.master_seed,
        "config": cfg.to_dict(),
        "qubits": len(transcript.records),
        "aborted": transcript.aborted,
        "abort": None if transcript.abort is None else {"id": transcript.abort.qubit_id, "reason": transcript.abort.reason},
        "checks": {k.value: v for k, v in transcript.check_counts().items()},
    }
    if source is not None:
        knowledge = getattr(attack, "knowledge", None)
        captures = None if knowledge is None else knowledge.captures
        rep = exposure_report(transcript.pulses, captures, cfg.kbar[0], cfg.f_e)
        summary["exposure"] = {
            "pulses": rep.pulses,
            "delivered": rep.delivered,
            "two_photon_captures": rep.two_photon_captures,
            "multi_photon_captures": rep.multi_photon_captures,
            "bound_bb84": rep.bound_bb84,
            "bound_sqrs": rep.bound_sqrs,
        }
    (out_dir / "session.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(path)
    if transcript.aborted:
        print(f"session aborted at qubit {transcript.abort.qubit_id}: {transcript.abort.reason}", file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def _cmd_estimate(args) -> int:
    cfg = _session_setup(args)
    rng = trial_rng(cfg.master_seed, "estimate", 0, 0)
    alice = AliceConfig(cfg.epsilon, cfg.epsilon_tilde, cfg.eta)
    bob = BobConfig(cfg.p_test[0], cfg.passes[0], cfg.epsilon, cfg.epsilon_tilde)
    transcript = run_session(alice, bob, cfg.true_phi, cfg.mu[0], None, rng)
    counts = transcript.alice_counts()
    result = AggregateResult(
        "estimate",
        ["mu", "p", "passes", "phi", "d1_count", "map", "mean_direction", "resultant_length", "circ_std"],
    )
    if counts.mu:
        grid = transcript.alice_likelihood(cfg.k_bins)
        s = circular_summary(grid)
        result.rows.append(
            [cfg.mu[0], cfg.p_test[0], cfg.passes[0], cfg.true_phi, counts.mu, map_estimate(grid),
             math.nan if s.mean_direction is None else s.mean_direction, s.resultant_length, s.circ_std]
        )
        result.curves["alice"] = grid.masses()
    result.config = cfg
    for f in emit(result, args.format, _output_dir(args) / "estimate"):
        print(f)
    return EXIT_OK


def _cmd_attack(args) -> int:
    cfg = _session_setup(args)
    result = run(cfg)
    for f in emit(result, args.format, _output_dir(args) / f"attack-{cfg.attack}"):
        print(f)
    return EXIT_OK


def _cmd_info(args) -> int:
    rows = {
        "general_cfi": general_cfi(args.alpha, args.gamma, args.zeta),
        "cramer_rao": cramer_rao(general_cfi(args.alpha, args.gamma, args.zeta), args.mu),
        "eve_split_qfi": eve_split_qfi(args.delta, 0.0, 0.0),
        "ratio_bb84": splitting_ratio_bb84(args.kbar),
        "ratio_sqrs": splitting_ratio_sqrs(args.kbar, args.f_e),
        "p_nonempty": CoherentSource(args.kbar).p_nonempty,
    }
    for k, v in rows.items():
        print(f"{k} {_fmt(v)}")
    return EXIT_OK


_COMMANDS = {
    "figure": _cmd_figure,
    "session": _cmd_session,
    "estimate": _cmd_estimate,
    "attack": _cmd_attack,
    "info": _cmd_info,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SqrsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
