"""Command-line front end: configuration, orchestration, deterministic seeding.

    manistoch <subcommand> [--config FILE] [--seed U64] [--threads N]
              [--out DIR] [--set key=value ...]

Subcommands run one experiment group each and write report.json plus one CSV
per result table into the output directory; exit status 0 means every verdict
passed, 1 an experiment failure, 2 an invalid configuration.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import fields as dc_fields

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from . import __version__
from .errors import ConfigError, ManistochError
from .experiments import (ExperimentConfig, default_config,
                          exp_density_moments, exp_distance_estimates,
                          exp_flow_demo, exp_geometry_cert,
                          exp_geometry_oracles, exp_maximal,
                          exp_mollified_flow_convergence,
                          exp_mollifier_norm_convergence,
                          exp_pushforward_constant, exp_quasi_invariance,
                          exp_quasi_invariance_identity_control, exp_stability,
                          exp_wong_zakai, merge_reports)

SUBCOMMANDS = {
    "geometry-cert": [exp_geometry_oracles, exp_geometry_cert],
    "mollify-conv": [exp_mollifier_norm_convergence, exp_mollified_flow_convergence],
    "maximal": [exp_maximal],
    "flow-demo": [exp_flow_demo],
    "quasi-invariance": [exp_quasi_invariance, exp_quasi_invariance_identity_control],
    "stability": [exp_stability],
    "wz-conv": [exp_wong_zakai],
    "density-moments": [exp_density_moments, exp_pushforward_constant],
    "distance-est": [exp_distance_estimates],
}

# configs these groups resolve from (density-moments also drives pushforward)
_CONFIG_KEY = {
    "quasi-invariance": "quasi-invariance",
    "geometry-cert": "geometry-cert",
    "mollify-conv": "mollify-conv",
    "maximal": "maximal",
    "flow-demo": "flow-demo",
    "stability": "stability",
    "wz-conv": "wz-conv",
    "density-moments": "density-moments",
    "distance-est": "distance-est",
}

_FIELD_NAMES = {f.name for f in dc_fields(ExperimentConfig)}


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _apply_overrides(cfg: ExperimentConfig, pairs) -> ExperimentConfig:
    updates, params = {}, dict(cfg.params)
    drift_params = dict(cfg.drift_params)
    for key, value in pairs:
        if key in ("params", "drift_params"):
            raise ConfigError("--set %s must use dotted keys" % key)
        if key.startswith("params."):
            params[key.split(".", 1)[1]] = value
        elif key.startswith("drift_params."):
            drift_params[key.split(".", 1)[1]] = value
        elif key in _FIELD_NAMES:
            current = getattr(cfg, key)
            if isinstance(current, int) and not isinstance(current, bool):
                value = int(value)
            elif isinstance(current, float):
                value = float(value)
            updates[key] = value
        else:
            raise ConfigError("unknown configuration key %r" % key)
    return cfg.with_updates(params=params, drift_params=drift_params, **updates)


def load_config(experiment: str, path: str | None, set_pairs, seed=None, threads=None,
                ) -> ExperimentConfig:
    cfg = default_config(_CONFIG_KEY.get(experiment, experiment))
    file_pairs = []
    if path is not None:
        try:
            with open(path, "rb") as fh:
                doc = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError("%s: no such config file" % path)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError("%s: %s" % (path, e))
        for section in ("common", experiment):
            for k, v in doc.get(section, {}).items():
                if isinstance(v, dict):
                    file_pairs.extend(("%s.%s" % (k, kk), vv) for kk, vv in v.items())
                else:
                    file_pairs.append((k, v))
    cfg = _apply_overrides(cfg, file_pairs)
    cfg = _apply_overrides(cfg, set_pairs)
    if seed is not None:
        cfg = cfg.with_updates(seed=int(seed))
    if threads is not None:
        cfg = cfg.with_updates(threads=int(threads))
    return cfg


def cmd_validate(args) -> int:
    any_problem = False
    for name in sorted(SUBCOMMANDS):
        try:
            cfg = load_config(name, args.config, args.set_pairs, args.seed, args.threads)
            problems, warnings = cfg.validate(check_sobolev=(name in
                                              ("mollify-conv", "stability")))
        except ConfigError as e:
            problems, warnings = [str(e)], []
        for p in problems:
            print("error [%s]: %s" % (name, p))
            any_problem = True
        for w in warnings:
            print("warning [%s]: %s" % (name, w))
    if not any_problem:
        print("configuration ok")
    return 2 if any_problem else 0


def run_group(name: str, cfg: ExperimentConfig):
    return [fn(cfg) for fn in SUBCOMMANDS[name]]


def cmd_run(args) -> int:
    names = sorted(SUBCOMMANDS) if args.subcommand == "all" else [args.subcommand]
    started = time.time()
    reports = []
    failed = False
    for name in names:
        try:
            cfg = load_config(name, args.config, args.set_pairs, args.seed, args.threads)
            cfg.require_valid()
        except ConfigError as e:
            print("error: %s" % e, file=sys.stderr)
            return 2
        try:
            reports.extend(run_group(name, cfg))
        except ManistochError as e:
            print("experiment %s failed: %s" % (name, e), file=sys.stderr)
            failed = True
            break
    timing = {"started_unix": started, "finished_unix": time.time(),
              "duration_s": time.time() - started, "version": __version__}
    payload = merge_reports(reports, args.out, timing=timing)
    n_verdicts = 0
    for r in reports:
        for vname, v in r.verdicts.items():
            n_verdicts += 1
            print("%-28s %-36s %s" % (r.experiment, vname,
                                      "PASS" if v.passed else "FAIL"))
    if failed or n_verdicts == 0:
        return 1
    return 0 if payload["passed"] else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="manistoch",
        description="Stochastic flows with rough drifts on S^2 and T^2: "
                    "verification experiments and reports.")
    parser.add_argument("subcommand",
                        choices=sorted(SUBCOMMANDS) + ["all", "validate"])
    parser.add_argument("--config", default=None, help="TOML configuration file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (1 = bit-exact mode)")
    parser.add_argument("--out", default="manistoch_out", help="output directory")
    parser.add_argument("--set", dest="set_pairs", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key (dotted "
                        "keys reach params.* and drift_params.*)")
    parser.add_argument("--version", action="version", version=__version__)
    args = parser.parse_args(argv)

    pairs = []
    for item in args.set_pairs:
        if "=" not in item:
            print("error: --set expects KEY=VALUE, got %r" % item, file=sys.stderr)
            return 2
        k, v = item.split("=", 1)
        pairs.append((k, _parse_value(v)))
    args.set_pairs = pairs

    if args.subcommand == "validate":
        return cmd_validate(args)
    try:
        return cmd_run(args)
    except ConfigError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
