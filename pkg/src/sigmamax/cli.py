"""Command-line front end: benchmark runs, config validation, classification.

Subcommands
-----------
run      --config PATH --out DIR [--group N]... [--scenario N]...
         [--method NAME]... [--seed U64] [--mc-runs N]
validate --config PATH
classify --config PATH --input PATH --out DIR

Exit codes: 0 success, 2 configuration/parse error, 3 numerical-failure
threshold exceeded (more than 5% of Monte Carlo runs excluded).  All
diagnostics go to stderr; output files are written atomically
(temp + rename), so partial outputs never persist.

Config format (TOML)
--------------------
Tracking configs::

    [run]
    mc_runs = 100            # Monte Carlo runs per (scenario, group)
    seed = 20260809          # master seed; per-run generators derive from it
    methods = ["imm", "himm"]            # default method set
    scenarios = [1, 2]                   # default scenario selection
    groups = [1, 2, 3, 4]                # default group selection

    [model]
    models = ["dwna", "dwpa"]            # bank, in mode order
    transition_probability = [[0.95, 0.05], [0.05, 0.95]]   # rows sum to 1
    transition_possibility = [[1.0, 0.5], [0.5, 1.0]]       # rows have max 1
    initial_mode_probability = [0.5, 0.5]   # optional, sums to 1
    initial_mode_possibility = [1.0, 1.0]   # optional, max 1

    [scenario.1]
    T = 0.2                  # sampling interval, seconds
    num_samples = 200
    initial_position = [12000.0, 8000.0, 1000.0]    # meters
    initial_velocity = [-100.0, -100.0, 0.0]        # m/s
    sigma_w = 3.0            # truth process noise, m/s^2
    maneuver = { start = 81, end = 130, acceleration = [-30.0, -50.0, 0.0] }
    sigma_az_deg = 0.1       # nominal sensor accuracy
    sigma_el_deg = 0.1
    sigma_range = 10.0       # meters
    alt_sigma_az_deg = 0.2   # degraded accuracy used by group 4's data side
    alt_sigma_el_deg = 0.2
    alt_sigma_range = 20.0

Classifier configs::

    [classifier]
    kind = "both"            # sigma | max | both
    patterns = ["a", "b"]
    features = ["f1", "f2"]
    symbols = ["s0", "s1", "s2"]
    pattern_given_feature = [[0.8, 0.2], [0.3, 0.7]]   # rows = features
    measurement_likelihood = [[0.6, 0.3, 0.1], [0.1, 0.4, 0.5]]
    prior = [0.5, 0.5]                        # optional, probability form
    pattern_given_feature_poss = [[...]]      # optional; default: row-ratio
    feature_predictive = [0.5, 0.5]           # optional, probability form

Methods: imm, himm, kalman-baseline (single extrapolating filter),
imm-maxout-baseline (IMM belief, highest-probability model's estimate
as output).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .classify import (
    MAX,
    SIGMA,
    ClassifierModel,
    ClassifierState,
    classify_step,
    initial_state,
    map_decision,
)
from .discrete import (
    NORM_TOL,
    POSSIBILITY,
    PROBABILITY,
    ConditionalTable,
    DiscretePossibility,
    DiscreteProbability,
    OutcomeSet,
    prob_to_poss,
)
from .scenario import (
    METHODS,
    MonteCarloReport,
    Phase,
    ScenarioConfig,
    SensorSpec,
    TrackerSpec,
    experiment_group,
    run_monte_carlo,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

EXCLUSION_LIMIT = 0.05


class ConfigError(Exception):
    """Anything wrong with a config file or the run manifest."""


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigmamax",
        description="Maneuvering-target benchmark and sequential classification tools")
    sub = parser.add_subparsers(required=True)

    run = sub.add_parser("run", help="run Monte Carlo tracking benchmarks")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True)
    run.add_argument("--group", action="append", type=int, default=None)
    run.add_argument("--scenario", action="append", type=int, default=None)
    run.add_argument("--method", action="append", default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--mc-runs", type=int, default=None)
    run.set_defaults(handler=cmd_run)

    val = sub.add_parser("validate", help="check config normalization invariants")
    val.add_argument("--config", required=True)
    val.set_defaults(handler=cmd_validate)

    cls = sub.add_parser("classify", help="run sequential classifiers on a symbol stream")
    cls.add_argument("--config", required=True)
    cls.add_argument("--input", required=True)
    cls.add_argument("--out", required=True)
    cls.set_defaults(handler=cmd_classify)
    return parser


def _load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# run


def _scenario_from_config(table: dict, name: str, mc_runs: int, seed: int) -> ScenarioConfig:
    try:
        T = float(table["T"])
        num_samples = int(table["num_samples"])
        pos = [float(v) for v in table["initial_position"]]
        vel = [float(v) for v in table["initial_velocity"]]
        sigma_w = float(table["sigma_w"])
        sensor = SensorSpec.from_degrees(float(table["sigma_az_deg"]),
                                         float(table["sigma_el_deg"]),
                                         float(table["sigma_range"]))
        alt = SensorSpec.from_degrees(float(table["alt_sigma_az_deg"]),
                                      float(table["alt_sigma_el_deg"]),
                                      float(table["alt_sigma_range"]))
    except KeyError as exc:
        raise ConfigError(f"scenario {name}: missing key {exc.args[0]!r}")
    if len(pos) != 3 or len(vel) != 3:
        raise ConfigError(f"scenario {name}: initial position/velocity must be 3-vectors")
    initial = np.zeros(9)
    initial[[0, 3, 6]] = pos
    initial[[1, 4, 7]] = vel

    phases = []
    maneuver = table.get("maneuver")
    if maneuver is None:
        phases.append(Phase(1, num_samples, (0.0, 0.0, 0.0)))
    else:
        try:
            start, end = int(maneuver["start"]), int(maneuver["end"])
            accel = tuple(float(a) for a in maneuver["acceleration"])
        except KeyError as exc:
            raise ConfigError(f"scenario {name}: maneuver missing key {exc.args[0]!r}")
        if start > 1:
            phases.append(Phase(1, start - 1, (0.0, 0.0, 0.0)))
        phases.append(Phase(start, end, accel))
        if end < num_samples:
            phases.append(Phase(end + 1, num_samples, (0.0, 0.0, 0.0)))
    try:
        return ScenarioConfig(T=T, num_samples=num_samples, initial_state=initial,
                              phases=tuple(phases), sigma_w=sigma_w, sensor=sensor,
                              alt_sensor=alt, mc_runs=mc_runs, seed=seed)
    except ValueError as exc:
        raise ConfigError(f"scenario {name}: {exc}")


def _tracker_from_config(model: dict) -> TrackerSpec:
    def maybe(key):
        value = model.get(key)
        return None if value is None else tuple(float(v) for v in value)

    try:
        return TrackerSpec(
            model_names=tuple(model.get("models", ("dwna", "dwpa"))),
            transition_probability=tuple(tuple(float(v) for v in row)
                                         for row in model["transition_probability"]),
            transition_possibility=tuple(tuple(float(v) for v in row)
                                         for row in model["transition_possibility"]),
            initial_mode_probability=maybe("initial_mode_probability"),
            initial_mode_possibility=maybe("initial_mode_possibility"),
        )
    except KeyError as exc:
        raise ConfigError(f"[model] missing key {exc.args[0]!r}")


def cmd_run(args) -> int:
    config = _load_toml(args.config)
    run_table = config.get("run", {})
    seed = args.seed if args.seed is not None else int(run_table.get("seed", 20260809))
    mc_runs = args.mc_runs if args.mc_runs is not None else int(run_table.get("mc_runs", 100))
    if mc_runs < 1:
        raise ConfigError("mc_runs must be at least 1")

    methods = tuple(args.method or run_table.get("methods", ["imm", "himm"]))
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; expected one of {', '.join(METHODS)}")
    if not methods:
        raise ConfigError("no methods selected")

    scenario_tables = config.get("scenario", {})
    if not scenario_tables:
        raise ConfigError("config has no [scenario.*] sections")
    available = sorted(scenario_tables)
    selected_scenarios = [str(s) for s in (args.scenario or run_table.get("scenarios", available))]
    for s in selected_scenarios:
        if s not in scenario_tables:
            raise ConfigError(f"scenario {s!r} not defined in the config "
                              f"(available: {', '.join(available)})")
    groups = [int(g) for g in (args.group or run_table.get("groups", [1]))]
    for g in groups:
        if g not in (1, 2, 3, 4):
            raise ConfigError(f"unknown group {g}; expected 1..4")

    tracker = _tracker_from_config(config.get("model", {}))
    try:
        os.makedirs(args.out, exist_ok=True)
        probe = os.path.join(args.out, ".probe")
        with open(probe, "w"):
            pass
        os.unlink(probe)
    except OSError as exc:
        raise ConfigError(f"output directory not writable: {exc}")

    summary_rows = []
    worst_fraction = 0.0
    for s in selected_scenarios:
        scenario = _scenario_from_config(scenario_tables[s], s, mc_runs, seed)
        for g in groups:
            group = experiment_group(g, scenario)
            report = run_monte_carlo(scenario, group, tracker, methods)
            total = report.completed_runs + report.excluded_runs
            fraction = report.excluded_runs / total
            worst_fraction = max(worst_fraction, fraction)
            print(f"scenario {s} group {g}: {report.completed_runs}/{total} runs, "
                  f"{report.runtime_seconds:.1f} s", file=sys.stderr)
            prefix = os.path.join(args.out, f"s{s}g{g}")
            _write_rmse_csv(f"{prefix}_rmse.csv", report)
            _write_beliefs_csv(f"{prefix}_mode_beliefs.csv", report)
            summary_rows.extend(_summary_rows(s, g, report))

    _write_summary(os.path.join(args.out, "summary.csv"),
                   os.path.join(args.out, "summary.txt"), summary_rows)
    if worst_fraction > EXCLUSION_LIMIT:
        print(f"error: {worst_fraction:.0%} of runs excluded for numerical failure",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _write_rmse_csv(path: str, report: MonteCarloReport) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["sample", "axis", "method", "rmse", "measurement_rmse"])
    for method in report.methods:
        rmse = report.rmse[method]
        for k in range(rmse.shape[0]):
            for a, axis in enumerate("xyz"):
                writer.writerow([k + 1, axis, method, repr(float(rmse[k, a])),
                                 repr(float(report.measurement_rmse[k, a]))])
    _atomic_write(path, buf.getvalue())


def _write_beliefs_csv(path: str, report: MonteCarloReport) -> None:
    # "selected" marks the hard-decision mode per step for methods that
    # make one; soft-mixing methods leave it empty
    hard = ("himm", "imm-maxout-baseline")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["sample", "run", "method", "mode", "belief", "selected"])
    for method in report.methods:
        beliefs = report.mode_beliefs[method]
        runs, samples, modes = beliefs.shape
        labels = report.model_labels if modes == len(report.model_labels) else \
            tuple(f"m{i}" for i in range(modes))
        chosen = np.argmax(beliefs, axis=2)
        for run in range(runs):
            for k in range(samples):
                for mode in range(modes):
                    selected = ""
                    if method in hard:
                        selected = 1 if chosen[run, k] == mode else 0
                    writer.writerow([k + 1, run, method, labels[mode],
                                     repr(float(beliefs[run, k, mode])), selected])
    _atomic_write(path, buf.getvalue())


def _summary_rows(scenario_name, group_number, report: MonteCarloReport) -> list:
    config = report.scenario
    switch = config.maneuver_start
    segments = {}
    norm = {m: np.linalg.norm(report.rmse[m], axis=1) for m in report.methods}
    start = report.start_sample + 1
    if switch is None:
        windows = {"steady": (start, config.num_samples)}
    else:
        end = max(p.end for p in config.phases if any(a != 0 for a in p.acceleration))
        windows = {"pre_maneuver": (start, switch - 1),
                   "maneuver": (switch, end),
                   "post_maneuver": (end + 1, config.num_samples)}
    rows = []
    for method in report.methods:
        for name, (lo, hi) in windows.items():
            segments[name] = float(norm[method][lo - 1:hi].mean()) if hi >= lo else math.nan
        cross = report.mean_cross_time[method]
        rows.append({
            "scenario": scenario_name,
            "group": group_number,
            "method": method,
            "mean_cross_time": "" if cross is None else repr(cross),
            **{f"rmse_{name}": repr(value) for name, value in segments.items()},
            "excluded_runs": report.excluded_runs,
        })
    return rows


def _write_summary(csv_path: str, text_path: str, rows: list) -> None:
    if not rows:
        return
    fields = list(rows[0].keys())
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields)
    writer.writeheader()
    writer.writerows(rows)
    _atomic_write(csv_path, buf.getvalue())

    display = [fields] + [[_short(row[f], f) for f in fields] for row in rows]
    widths = [max(len(line[i]) for line in display) for i in range(len(fields))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip()
             for line in display]
    _atomic_write(text_path, "\n".join(lines) + "\n")


def _short(value, field: str) -> str:
    if field.startswith("rmse_") or field == "mean_cross_time":
        try:
            return f"{float(value):.3f}"
        except (TypeError, ValueError):
            return str(value)
    return str(value)


# ---------------------------------------------------------------------------
# validate


def cmd_validate(args) -> int:
    config = _load_toml(args.config)
    violations = []
    model = config.get("model", {})
    _check_matrix(model, "transition_probability", "probability", violations, "model")
    _check_matrix(model, "transition_possibility", "possibility", violations, "model")
    _check_vector(model, "initial_mode_probability", "probability", violations, "model")
    _check_vector(model, "initial_mode_possibility", "possibility", violations, "model")

    classifier = config.get("classifier")
    if classifier is not None:
        kind = classifier.get("kind", "both")
        table_kind = "possibility" if kind == "max" else "probability"
        _check_matrix(classifier, "pattern_given_feature", table_kind,
                      violations, "classifier")
        if "pattern_given_feature_poss" in classifier:
            _check_matrix(classifier, "pattern_given_feature_poss", "possibility",
                          violations, "classifier")
        _check_vector(classifier, "prior", "probability", violations, "classifier")

    if not model and classifier is None:
        violations.append("config defines neither [model] nor [classifier]")
    for violation in violations:
        print(f"violation: {violation}", file=sys.stderr)
    if violations:
        return EXIT_CONFIG
    print("config valid", file=sys.stderr)
    return EXIT_OK


def _check_matrix(table, key, kind, violations, where) -> None:
    rows = table.get(key)
    if rows is None:
        return
    try:
        arr = np.array(rows, dtype=float)
    except ValueError:
        violations.append(f"{where}.{key}: not a numeric matrix")
        return
    if arr.ndim != 2:
        violations.append(f"{where}.{key}: not a matrix")
        return
    if np.any(arr < 0) or np.any(arr > 1 + NORM_TOL):
        violations.append(f"{where}.{key}: entries outside [0, 1]")
        return
    if kind == "probability":
        for i, total in enumerate(arr.sum(axis=1)):
            if abs(total - 1.0) > NORM_TOL:
                violations.append(f"{where}.{key}: row {i} sums to {total!r}, expected 1")
    else:
        for i, top in enumerate(arr.max(axis=1)):
            if abs(top - 1.0) > NORM_TOL:
                violations.append(f"{where}.{key}: row {i} has max {top!r}, expected 1")


def _check_vector(table, key, kind, violations, where) -> None:
    values = table.get(key)
    if values is None:
        return
    arr = np.atleast_2d(np.asarray(values, dtype=float))
    before = len(violations)
    _check_matrix({key: arr.tolist()}, key, kind, violations, where)
    # re-label row-wise messages for a vector
    for i in range(before, len(violations)):
        violations[i] = violations[i].replace("row 0 ", "")


# ---------------------------------------------------------------------------
# classify


def _classifier_models(table: dict):
    try:
        patterns = OutcomeSet(table["patterns"])
        features = OutcomeSet(table["features"])
        symbols = list(table["symbols"])
        prob_rows = np.array(table["pattern_given_feature"], dtype=float)
        lik_rows = np.array(table["measurement_likelihood"], dtype=float)
        kind = table.get("kind", "both")
    except KeyError as exc:
        raise ConfigError(f"[classifier] missing key {exc.args[0]!r}")
    if kind not in ("sigma", "max", "both"):
        raise ConfigError(f"classifier kind must be sigma, max or both, got {kind!r}")
    if lik_rows.shape != (len(features), len(symbols)):
        raise ConfigError("measurement_likelihood must be a features x symbols matrix")
    symbol_index = {s: i for i, s in enumerate(symbols)}

    def likelihood(z, f):
        return lik_rows[features.index(f), symbol_index[z]]

    models = {}
    priors = {}
    prior = table.get("prior")
    if kind in ("sigma", "both"):
        try:
            sig_table = ConditionalTable(features, patterns, prob_rows, PROBABILITY)
        except ValueError as exc:
            raise ConfigError(f"classifier.pattern_given_feature: {exc}")
        models["sigma"] = ClassifierModel(patterns, features, sig_table, likelihood, SIGMA)
        priors["sigma"] = None if prior is None else np.asarray(prior, dtype=float)
    if kind in ("max", "both"):
        poss_rows = table.get("pattern_given_feature_poss")
        if poss_rows is None:
            poss_rows = prob_rows / prob_rows.max(axis=1, keepdims=True)
        try:
            max_table = ConditionalTable(features, patterns, poss_rows, POSSIBILITY)
        except ValueError as exc:
            raise ConfigError(f"classifier.pattern_given_feature_poss: {exc}")
        models["max"] = ClassifierModel(patterns, features, max_table, likelihood, MAX)
        if prior is None:
            priors["max"] = None
        else:
            priors["max"] = prob_to_poss(
                DiscreteProbability(patterns, np.asarray(prior, dtype=float))).weights
    return models, priors, symbol_index


def cmd_classify(args) -> int:
    config = _load_toml(args.config)
    table = config.get("classifier")
    if table is None:
        raise ConfigError("config has no [classifier] section")
    models, priors, symbol_index = _classifier_models(table)

    predictive = table.get("feature_predictive")
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            stream = fh.read().split()
    except OSError as exc:
        raise ConfigError(f"cannot read measurement stream: {exc}")
    unknown = [z for z in stream if z not in symbol_index]
    if unknown:
        raise ConfigError(f"measurement stream contains unknown symbols: {unknown[:5]}")

    try:
        os.makedirs(args.out, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory: {exc}")

    belief_buf = io.StringIO()
    writer = csv.writer(belief_buf)
    writer.writerow(["step", "method", "pattern", "belief"])
    decisions = []
    for name, model in models.items():
        try:
            state = initial_state(model, priors[name])
        except ValueError as exc:
            raise ConfigError(f"classifier prior: {exc}")
        q = predictive
        if q is not None and model.kind == MAX:
            q = np.asarray(q, dtype=float)
            q = q / q.max()
        _write_belief_rows(writer, state, name, model)
        for z in stream:
            state = classify_step(state, z, model, feature_predictive=q)
            _write_belief_rows(writer, state, name, model)
        decisions.append((name, map_decision(state)))

    _atomic_write(os.path.join(args.out, "beliefs.csv"), belief_buf.getvalue())
    decisions_buf = io.StringIO()
    writer = csv.writer(decisions_buf)
    writer.writerow(["method", "decision"])
    writer.writerows(decisions)
    _atomic_write(os.path.join(args.out, "decisions.csv"), decisions_buf.getvalue())
    for name, decision in decisions:
        print(f"{name}: {decision}", file=sys.stderr)
    return EXIT_OK


def _write_belief_rows(writer, state: ClassifierState, method, model) -> None:
    for label, weight in zip(model.patterns.labels, state.belief.weights):
        writer.writerow([state.step, method, label, repr(float(weight))])


if __name__ == "__main__":
    sys.exit(main())
