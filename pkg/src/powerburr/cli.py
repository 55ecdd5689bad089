"""Command-line front end.

Subcommands: ``fit``, ``reserve``, ``study``, ``backtest`` and ``sample``.
Every command accepts ``--seed`` and is fully reproducible under it.

Option precedence: built-in defaults, then the ``--profile`` preset, then
explicit flags, then the config file (``--config``, TOML): the config file
overrides flags, flags override defaults.

Outputs: a structured ``report.toml`` (resolved configuration plus run
metadata) and companion CSV tables in the ``--out`` directory; the
human-readable summary goes to standard output.  CSV files contain no
timestamps, so identical seeds give byte-identical CSVs.

Exit codes: 0 success, 2 data/usage parse error, 3 fit failure, 4
configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import numpy as np

from . import __version__
from .claims import ClaimSample, ParseError, ingest
from .params import (
    DomainError,
    FAMILY_LABELS,
    FAMILY_ORDER,
    FamilyKind,
    FamilySpec,
    FitError,
    UnsupportedKindError,
)
from .distributions import family_quantile
from .fitting import OptimSettings, fit, fit_all
from .risk import PortfolioSpec, reserve_from_model
from .sampling import RngStream, draw_family
from .study import DEFAULT_TRUE_KINDS, REFERENCE_SPECS, StudyConfig, emit_table, run_study, study_csv
from .validation import BootstrapError, binomial_backtest

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_FIT = 3
EXIT_CONFIG = 4

PROFILES = {
    "desk": {"replications": 100, "m": 10_000},
    "full": {"replications": 1000, "m": 100_000},
}


class ConfigError(ValueError):
    pass


def _kind(name: str) -> FamilyKind:
    try:
        return FamilyKind(name.strip().lower())
    except ValueError:
        raise ConfigError(
            f"unknown family {name!r}; choose from {[k.value for k in FamilyKind]}"
        ) from None


def _parse_params(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.replace(" ", "").split(",") if part)
    except ValueError:
        raise ConfigError(f"cannot parse parameter list {text!r}") from None


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        text = repr(float(value))
        return text if any(c in text for c in ".einf") else text + ".0"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"unsupported report value {value!r}")


class RunReport:
    """Key-value run report with enough detail to reproduce the run."""

    def __init__(self, command: str):
        self.command = command
        self.started = time.time()
        self.config: dict[str, object] = {}
        self.results: dict[str, object] = {}
        self.tables: dict[str, str] = {}  # filename -> CSV content

    def to_toml(self) -> str:
        lines = [
            "[run]",
            f'command = {json.dumps(self.command)}',
            f'version = {json.dumps(__version__)}',
            f"wall_seconds = {time.time() - self.started:.3f}",
            "",
            "[config]",
        ]
        lines += [f"{key} = {_toml_value(val)}" for key, val in sorted(self.config.items())]
        if self.results:
            lines += ["", "[results]"]
            lines += [f"{key} = {_toml_value(val)}" for key, val in sorted(self.results.items())]
        return "\n".join(lines) + "\n"

    def write(self, out_dir: str | None):
        if out_dir is None:
            return
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / "report.toml").write_text(self.to_toml())
        for name, content in self.tables.items():
            (path / name).write_text(content)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powerburr",
        description="Heavy-tailed claim severity modelling: fitting, reserves, studies.",
    )
    parser.add_argument("--version", action="version", version=f"powerburr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=False):
        p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
        p.add_argument(
            "--threads",
            type=int,
            default=int(os.environ.get("POWERBURR_THREADS", "1")),
            help="worker threads (default $POWERBURR_THREADS or 1)",
        )
        p.add_argument("--profile", choices=sorted(PROFILES), default="desk")
        p.add_argument("--config", type=str, default=None, help="TOML config file; overrides flags")
        p.add_argument("--out", type=str, default=None, help="output directory for report + CSVs")
        if data:
            p.add_argument("--data", type=str, default=None, help="delimited claims file")
            p.add_argument("--column", type=str, default="0", help="column name or index (default 0)")
            p.add_argument("--delimiter", type=str, default=None)
            p.add_argument(
                "--deductible-subtracted",
                action="store_true",
                help="mark that deductibles were already subtracted",
            )

    p_fit = sub.add_parser("fit", help="maximum-likelihood fits with loglik ranking")
    common(p_fit, data=True)
    p_fit.add_argument("--family", action="append", default=None, help="repeatable; default all ten")

    p_res = sub.add_parser("reserve", help="Monte Carlo reserves for fitted or explicit models")
    common(p_res, data=True)
    p_res.add_argument("--family", action="append", default=None)
    p_res.add_argument("--params", type=str, default=None, help="explicit parameters, comma separated")
    p_res.add_argument("--lambda", dest="lambdas", action="append", type=float, default=None)
    p_res.add_argument("--epsilon", action="append", type=float, default=None)
    p_res.add_argument("--m", type=int, default=None, help="simulation count (profile default)")
    p_res.add_argument("--scale", type=float, default=None, help="also report reserves divided by this")

    p_study = sub.add_parser("study", help="bias/RMSE simulation study")
    common(p_study)
    p_study.add_argument("--family", action="append", default=None, help="fitted families")
    p_study.add_argument("--true-family", action="append", default=None, help="true families")
    p_study.add_argument("--n", type=int, action="append", default=None, help="sample sizes")
    p_study.add_argument("--replications", type=int, default=None)
    p_study.add_argument("--lambda", dest="lambdas", action="append", type=float, default=None)
    p_study.add_argument("--epsilon", action="append", type=float, default=None)
    p_study.add_argument("--m", type=int, default=None)
    p_study.add_argument("--truth-m", type=int, default=1_000_000)

    p_back = sub.add_parser("backtest", help="binomial back-test of quantile calibration")
    common(p_back, data=True)
    p_back.add_argument("--family", action="append", default=None)
    p_back.add_argument("--params", type=str, default=None)
    p_back.add_argument("--epsilon", action="append", type=float, default=None)
    p_back.add_argument("--threshold", action="append", type=float, default=None,
                        help="explicit thresholds paired with --epsilon, skipping fits")

    p_sample = sub.add_parser("sample", help="write synthetic claims to CSV")
    common(p_sample)
    p_sample.add_argument("--family", required=True)
    p_sample.add_argument("--params", type=str, default=None, help="default: reference values")
    p_sample.add_argument("-n", "--n", type=int, default=1000)

    return parser


def _apply_config(ns: argparse.Namespace) -> dict:
    """Merge the TOML config over the parsed flags; returns the raw config dict."""
    if not ns.config:
        return {}
    try:
        raw = tomllib.loads(Path(ns.config).read_text())
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {ns.config}: {exc}") from exc
    section = raw.get(ns.command, raw)
    for key, value in section.items():
        attr = key.replace("-", "_")
        if not hasattr(ns, attr):
            raise ConfigError(f"unknown config key {key!r} for command {ns.command!r}")
        setattr(ns, attr, value)
    return section


def _resolve_families(names, default) -> tuple[FamilyKind, ...]:
    if not names:
        return tuple(default)
    kinds = tuple(_kind(n) for n in names)
    order = {kind: i for i, kind in enumerate(FAMILY_ORDER)}
    return tuple(sorted(set(kinds), key=order.get))


def _load_sample(ns) -> ClaimSample:
    if not ns.data:
        raise ConfigError("this command needs --data")
    column = int(ns.column) if str(ns.column).lstrip("-").isdigit() else ns.column
    sample = ingest(
        ns.data,
        column=column,
        delimiter=ns.delimiter,
        deductible_subtracted=bool(getattr(ns, "deductible_subtracted", False)),
    )
    stats = sample.summary()
    print(
        f"loaded {len(sample)} claims from {sample.source} "
        f"(mean {stats['mean']:.6g}, sd {stats['sd']:.6g}, max {stats['max']:.6g})"
    )
    if sample.rejected_rows:
        rows = ", ".join(map(str, sample.rejected_rows[:20]))
        print(f"rejected {len(sample.rejected_rows)} non-positive rows at lines: {rows}")
    return sample


def _record_common(report: RunReport, ns):
    report.config["seed"] = ns.seed
    report.config["threads"] = ns.threads
    report.config["profile"] = ns.profile
    settings = OptimSettings()
    report.config["optimizer_max_iterations"] = settings.max_iterations
    report.config["optimizer_log_bound"] = settings.log_bound
    report.config["optimizer_gradient_tolerance"] = settings.gradient_tolerance
    if getattr(ns, "data", None):
        report.config["data"] = ns.data
        report.config["column"] = str(ns.column)
        report.config["delimiter"] = ns.delimiter or ""


def _fit_csv(results: dict[FamilyKind, object]) -> str:
    lines = ["family,label,loglik,converged,start_index,iterations,params"]
    for kind in FAMILY_ORDER:
        if kind not in results:
            continue
        r = results[kind]
        params = ";".join(f"{p:.12g}" for p in r.spec.params)
        lines.append(
            f"{kind.value},{FAMILY_LABELS[kind]},{r.loglik:.12g},{int(r.converged)},"
            f"{r.start_index},{r.iterations},{params}"
        )
    return "\n".join(lines) + "\n"


def cmd_fit(ns) -> int:
    report = RunReport("fit")
    _record_common(report, ns)
    sample = _load_sample(ns)
    kinds = _resolve_families(ns.family, FAMILY_ORDER)
    report.config["families"] = [k.value for k in kinds]
    results = fit_all(sample, kinds=kinds)
    report.tables["fits.csv"] = _fit_csv(results)
    print("\nfamily        loglik       converged  params")
    for kind, r in sorted(results.items(), key=lambda kv: -kv[1].loglik):
        params = ", ".join(f"{p:.4g}" for p in r.spec.params)
        print(f"{FAMILY_LABELS[kind]:10s} {r.loglik:14.4f}  {str(r.converged):9s}  ({params})")
    report.results["best_family"] = max(results, key=lambda k: results[k].loglik).value
    report.write(ns.out)
    return EXIT_OK


def cmd_reserve(ns) -> int:
    report = RunReport("reserve")
    _record_common(report, ns)
    epsilons = tuple(ns.epsilon or (0.05, 0.01))
    lambdas = tuple(ns.lambdas or (1000.0,))
    m = ns.m if ns.m is not None else PROFILES[ns.profile]["m"]
    report.config.update(
        {"epsilons": list(epsilons), "lambdas": list(lambdas), "m": m,
         "scale": ns.scale if ns.scale is not None else 0.0}
    )
    if ns.params is not None:
        names = ns.family or []
        if len(names) != 1:
            raise ConfigError("--params requires exactly one --family")
        specs = {_kind(names[0]): FamilySpec(_kind(names[0]), _parse_params(ns.params))}
        report.config["families"] = [k.value for k in specs]
        report.config["params"] = list(specs[_kind(names[0])].params)
    else:
        sample = _load_sample(ns)
        kinds = _resolve_families(ns.family, FAMILY_ORDER)
        report.config["families"] = [k.value for k in kinds]
        specs = {kind: r.spec for kind, r in fit_all(sample, kinds=kinds).items()}
    header = "family,lambda,epsilon,m,q_star" + (",q_star_scaled" if ns.scale else "")
    lines = [header]
    stream = RngStream(ns.seed)
    print(f"\n{header}")
    for index, (kind, spec) in enumerate(specs.items()):
        for lam_index, lam in enumerate(lambdas):
            totals_stream = stream.child(index, lam_index)
            for eps in epsilons:
                estimate = reserve_from_model(
                    PortfolioSpec.from_lambda(lam), spec, eps, m, totals_stream
                )
                row = f"{kind.value},{lam:.12g},{eps:.12g},{m},{estimate.q_star:.12g}"
                if ns.scale:
                    row += f",{estimate.q_star / ns.scale:.12g}"
                lines.append(row)
                print(row)
    report.tables["reserves.csv"] = "\n".join(lines) + "\n"
    report.write(ns.out)
    return EXIT_OK


def cmd_study(ns) -> int:
    report = RunReport("study")
    _record_common(report, ns)
    preset = PROFILES[ns.profile]
    replications = ns.replications if ns.replications is not None else preset["replications"]
    m = ns.m if ns.m is not None else preset["m"]
    epsilons = tuple(ns.epsilon or (0.05, 0.01))
    lambdas = tuple(ns.lambdas if ns.lambdas is not None else ())
    sizes = tuple(ns.n or (5000,))
    fitted = _resolve_families(ns.family, FAMILY_ORDER)
    true_kinds = _resolve_families(ns.true_family, DEFAULT_TRUE_KINDS)
    report.config.update(
        {
            "replications": replications,
            "m": m,
            "truth_m": ns.truth_m,
            "epsilons": list(epsilons),
            "lambdas": list(lambdas),
            "n": list(sizes),
            "families": [k.value for k in fitted],
            "true_families": [k.value for k in true_kinds],
        }
    )
    for n in sizes:
        columns = {}
        for true_kind in true_kinds:
            config = StudyConfig(
                true_spec=REFERENCE_SPECS[true_kind],
                n=n,
                num_replications=replications,
                lambdas=lambdas,
                epsilons=epsilons,
                m=m,
                master_seed=ns.seed,
                fitted_kinds=fitted,
                truth_m=ns.truth_m,
            )
            print(f"study column: true={true_kind.value} n={n}", file=sys.stderr)
            result = run_study(config, threads=ns.threads, progress=True)
            columns[FAMILY_LABELS[true_kind]] = result
            for target, value in result.truth.items():
                key = "truth_" + "_".join(str(t) for t in target) + f"_{true_kind.value}_n{n}"
                report.results[key.replace(".", "p")] = value
        sample_result = next(iter(columns.values()))
        for target in sample_result.config.targets():
            tag = f"n{n}_" + "_".join(
                str(t).replace(".", "p") for t in target
            )
            report.tables[f"study_{tag}.csv"] = study_csv(columns, target)
            print(emit_table(columns, target))
    report.write(ns.out)
    return EXIT_OK


def cmd_backtest(ns) -> int:
    report = RunReport("backtest")
    _record_common(report, ns)
    epsilons = tuple(ns.epsilon or ())
    if not epsilons:
        raise ConfigError("backtest needs at least one --epsilon")
    report.config["epsilons"] = list(epsilons)
    sample = _load_sample(ns)
    lines = ["family,epsilon,threshold,exceedances,expected,p_value"]
    entries: list[tuple[str, float, float]] = []
    if ns.threshold is not None:
        if len(ns.threshold) != len(epsilons):
            raise ConfigError("--threshold count must match --epsilon count")
        entries += [("explicit", eps, q) for eps, q in zip(epsilons, ns.threshold)]
    elif ns.params is not None:
        names = ns.family or []
        if len(names) != 1:
            raise ConfigError("--params requires exactly one --family")
        spec = FamilySpec(_kind(names[0]), _parse_params(ns.params))
        entries += [(spec.kind.value, eps, family_quantile(1 - eps, spec)) for eps in epsilons]
    else:
        kinds = _resolve_families(ns.family, FAMILY_ORDER)
        results = fit_all(sample, kinds=kinds)
        for kind in kinds:
            spec = results[kind].spec
            entries += [(kind.value, eps, family_quantile(1 - eps, spec)) for eps in epsilons]
    print("\nfamily,epsilon,threshold,exceedances,expected,p_value")
    for name, eps, threshold in entries:
        outcome = binomial_backtest(sample, threshold, eps)
        row = (
            f"{name},{eps:.12g},{threshold:.12g},{outcome.exceedances},"
            f"{outcome.expected:.12g},{outcome.p_value:.12g}"
        )
        lines.append(row)
        print(row)
    report.tables["backtest.csv"] = "\n".join(lines) + "\n"
    report.write(ns.out)
    return EXIT_OK


def cmd_sample(ns) -> int:
    report = RunReport("sample")
    _record_common(report, ns)
    kind = _kind(ns.family)
    spec = (
        FamilySpec(kind, _parse_params(ns.params))
        if ns.params is not None
        else REFERENCE_SPECS[kind]
    )
    if ns.n < 1:
        raise ConfigError("sample size must be positive")
    values = draw_family(RngStream(ns.seed), spec, ns.n)
    report.config.update(
        {"family": kind.value, "params": list(spec.params), "n": ns.n}
    )
    csv = "claim\n" + "\n".join(f"{v:.12g}" for v in values) + "\n"
    report.tables["claims.csv"] = csv
    if ns.out is None:
        sys.stdout.write(csv)
    report.write(ns.out)
    return EXIT_OK


_COMMANDS = {
    "fit": cmd_fit,
    "reserve": cmd_reserve,
    "study": cmd_study,
    "backtest": cmd_backtest,
    "sample": cmd_sample,
}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        _apply_config(ns)
        return _COMMANDS[ns.command](ns)
    except (ConfigError, UnsupportedKindError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, DomainError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FitError, BootstrapError) as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return EXIT_FIT


if __name__ == "__main__":
    sys.exit(main())
