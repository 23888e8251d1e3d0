"""Command-line front-end.

Subcommands: ``check`` (feasibility gate only), ``run`` (full experiment with
artifacts), ``converge`` (refinement study), ``metric-check`` (general-metric
conditions).  Exit codes: 0 pass, 1 checks failed, 2 config error,
3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys

import numpy as np

from .errors import (
    CflViolationError,
    ConfigError,
    NotHyperbolicError,
    TimecloakError,
)
from .experiment import ExperimentConfig, convergence_study, run_cloak_experiment
from .io import write_field_binary, write_json, write_trace_csv, atomic_write_text
from .symbol import (
    Metric,
    check_hyperbolic_general,
    check_timelike_boundary,
    elliptic_bound_check,
    hyperbolicity_margin,
    max_admissible_c0,
    transform_metric,
)

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _load_config(path: str, overrides) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    doc = copy.deepcopy(doc)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        dotted, raw_val = item.split("=", 1)
        try:
            value = json.loads(raw_val)
        except json.JSONDecodeError:
            value = raw_val
        node = doc
        keys = dotted.split(".")
        for key in keys[:-1]:
            node = node.setdefault(key, {})
        node[keys[-1]] = value
    return ExperimentConfig.from_dict(doc)


def _emit(obj, out_path=None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    print(text)
    if out_path:
        atomic_write_text(out_path, text + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_check(cfg: ExperimentConfig, out_dir) -> int:
    profile = cfg.profile()
    a = cfg.params.a
    feas = hyperbolicity_margin(profile, a)
    doc = feas.to_dict()
    doc["max_admissible_c0"] = max_admissible_c0(a, cfg.c1)
    doc["margin_floor"] = cfg.margin_floor
    _emit(doc, os.path.join(out_dir, "feasibility.json") if out_dir else None)
    return EXIT_OK if feas.admissible and feas.margin_min > cfg.margin_floor else EXIT_CHECKS_FAILED


def cmd_run(cfg: ExperimentConfig, out_dir) -> int:
    report, artifacts = run_cloak_experiment(cfg)
    out_dir = out_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    # effective config first, so a finished directory can reproduce the run
    write_json(os.path.join(out_dir, "config_effective.json"), cfg.raw)
    write_json(os.path.join(out_dir, "report.json"), report.to_dict())
    write_json(os.path.join(out_dir, "timings.json"), report.runtimes)
    write_trace_csv(os.path.join(out_dir, "traces_u.csv"), artifacts["trace_u"])
    write_trace_csv(os.path.join(out_dir, "traces_v.csv"), artifacts["trace_v"])
    u, v = artifacts["u"], artifacts["v"]
    write_field_binary(os.path.join(out_dir, "field_u.tclk"), u.values)
    write_field_binary(os.path.join(out_dir, "field_v.tclk"), v.values, v.mask)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK if report.all_checks_pass else EXIT_CHECKS_FAILED


def cmd_converge(cfg: ExperimentConfig, out_dir, n_levels) -> int:
    if n_levels:
        levels = [(cfg.points - 1) * 2 ** i + 1 for i in range(n_levels)]
    else:
        levels = None
    study = convergence_study(cfg, levels)
    out_dir = out_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    atomic_write_text(os.path.join(out_dir, "convergence.csv"), study.to_csv())
    write_json(os.path.join(out_dir, "convergence_orders.json"), study.slopes)
    print(study.to_csv())
    print(json.dumps(study.slopes, indent=2, sort_keys=True))
    return EXIT_OK if not study.flagged else EXIT_CHECKS_FAILED


def _cylinder_boundary_samples(cfg: ExperimentConfig, m: int = 16):
    """Spacetime boundary points with unit outward normals (nu0 = 0)."""
    L = cfg.extent
    samples = []
    if cfg.dim == 1:
        for x0 in (0.0, 0.5):
            samples.append(((x0, [-L]), [0.0, -1.0]))
            samples.append(((x0, [L]), [0.0, 1.0]))
        return samples
    ts = np.linspace(-L, L, m)
    for x0 in (0.0, 0.5):
        for t in ts:
            samples.append(((x0, [-L, t]), [0.0, -1.0, 0.0]))
            samples.append(((x0, [L, t]), [0.0, 1.0, 0.0]))
            samples.append(((x0, [t, -L]), [0.0, 0.0, -1.0]))
            samples.append(((x0, [t, L]), [0.0, 0.0, 1.0]))
    return samples


def cmd_metric_check(cfg: ExperimentConfig, out_dir) -> int:
    profile = cfg.profile()
    a = cfg.params.a
    if cfg.metric_preset == "minkowski":
        metric = Metric.minkowski(a, cfg.dim)
    elif cfg.metric_preset == "diagonal_demo":
        metric = Metric.diagonal_demo(cfg.dim)
    else:
        raise ConfigError(f"unknown metric preset {cfg.metric_preset!r}")

    general = check_hyperbolic_general(metric, profile)
    timelike = check_timelike_boundary(
        metric, _cylinder_boundary_samples(cfg), profile
    )
    elliptic = None
    g0 = metric.at(0.0, [0.0] * cfg.dim)
    if np.abs(g0[0, 1:]).max() < 1e-12:
        C0 = float(-np.max(np.linalg.eigvalsh(g0[1:, 1:])))
        elliptic = elliptic_bound_check(metric, C0, profile).to_dict()
        elliptic["C0"] = C0

    doc = {
        "preset": cfg.metric_preset,
        "hyperbolic_general": general.to_dict(),
        "timelike": timelike.to_dict(),
        "elliptic_bound": elliptic,
    }

    # consistency with the flat-case margin for the Minkowski preset
    if cfg.metric_preset == "minkowski":
        flat = hyperbolicity_margin(profile, a)
        doc["coincides_with_flat_margin"] = bool(
            abs(flat.margin_min - general.margin_min) <= 1e-12
        )

    # the transform is the identity when the time shift vanishes
    ident = CfgIdentityProbe(metric, cfg)
    doc["identity_when_c0_zero"] = ident.check()

    _emit(doc, os.path.join(out_dir, "metric_check.json") if out_dir else None)
    ok = general.admissible and timelike.timelike and timelike.transformed_timelike
    if doc.get("coincides_with_flat_margin") is False:
        ok = False
    return EXIT_OK if ok else EXIT_CHECKS_FAILED


class CfgIdentityProbe:
    """Checks transform_metric with a zero-amplitude profile is the exact
    identity at a few sample points."""

    def __init__(self, metric: Metric, cfg: ExperimentConfig):
        self.metric = metric
        self.cfg = cfg

    def check(self) -> bool:
        from .profile import CloakProfile

        flatprof = CloakProfile(c0=0.0, c1=self.cfg.c1, center=self.cfg.center,
                                dim=self.cfg.dim)
        rng = np.random.default_rng(0)
        for _ in range(8):
            x0 = float(rng.uniform(-1.0, 1.0))
            x = rng.uniform(-self.cfg.extent, self.cfg.extent, self.cfg.dim)
            g = self.metric.at(x0, x)
            ghat = transform_metric(self.metric, flatprof, (x0, x))
            if not np.array_equal(g, ghat):
                return False
        return True


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timecloak",
        description="Temporal-cloaking numerical laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("check", "feasibility gate only"),
        ("run", "full cloaking experiment with artifacts"),
        ("converge", "refinement study with fitted orders"),
        ("metric-check", "general-metric hyperbolicity and boundary conditions"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to JSON config")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument(
            "--set",
            action="append",
            dest="overrides",
            metavar="KEY=VALUE",
            help="dotted-key config override, e.g. profile.c0=0.05",
        )
        if name == "converge":
            p.add_argument("--levels", type=int, default=None,
                           help="number of doubling refinement levels")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config, args.overrides)
        if args.command == "check":
            return cmd_check(cfg, args.out)
        if args.command == "run":
            return cmd_run(cfg, args.out)
        if args.command == "converge":
            return cmd_converge(cfg, args.out, args.levels)
        return cmd_metric_check(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NotHyperbolicError, CflViolationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TimecloakError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
