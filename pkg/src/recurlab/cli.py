"""Config-driven experiment runner.

``recurlab run <config>`` executes every experiment (return sets over an
epsilon grid, density reports, a recurrence verdict) and every suite (named
theorem checks), writing diff-able text artifacts into the output directory:

* ``experiments/<name>/verdict.txt``      key = value verdict record
* ``experiments/<name>/window_<i>.txt``   return window, serialized
* ``experiments/<name>/density_<i>.txt``  columnar running/window densities
* ``suites/<name>.txt``                   check outcome record
* ``summary.txt``                         one line per item

Outputs are byte-identical across runs with the same config, seed and
precision.  Exit status: 0 all pass, 1 any failure, 2 configuration error.

``recurlab describe '<operator literal>'`` prints what the literal builds.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import checks as checks_mod
from .classify import classify
from .config import (ConfigError, ExperimentSpec, RunConfig, SuiteSpec,
                     describe_operator, parse_config, parse_scalar,
                     parse_set_expression)
from .operators import PrecisionError, SparseVector
from .orbits import return_set
from .rules import Rule
from .values import to_complex

__all__ = ["main", "run_config", "execute_experiment", "execute_suite"]


def _fmt(value, digits=None) -> str:
    if isinstance(value, float):
        return repr(value) if digits is None else f"{value:.{digits}g}"
    if isinstance(value, Fraction):
        return str(value)
    return str(value)


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def execute_experiment(spec: ExperimentSpec, precision: str = "exact") -> dict:
    """Run one experiment; returns a bundle of file contents to write."""
    op, x = spec.build()
    digits = None
    if precision.startswith("float"):
        x = _degrade_vector(x)
        digits = int(precision.split(":", 1)[1]) if ":" in precision else 12
    records = [return_set(op, x, eps, spec.seminorms, spec.horizon)
               for eps in sorted(spec.epsilons, reverse=True)]
    verdict = classify(records)
    files = {}
    verdict_lines = [
        f"experiment={spec.name}",
        f"operator={spec.operator_literal}",
        f"vector={spec.vector_literal}",
        f"horizon={spec.horizon}",
        f"seed={spec.seed}",
        f"label={verdict.label.name}",
        f"period={verdict.period if verdict.period is not None else '-'}",
        f"periodic_like={verdict.periodic_like if verdict.periodic_like is not None else '-'}",
    ]
    for ev in verdict.evidence:
        verdict_lines.append(
            f"evidence[eps={ev.epsilon}]="
            f"recurrent:{ev.recurrent},reiterative:{ev.reiterative},"
            f"upper_frequent:{ev.upper_frequent},frequent:{ev.frequent},"
            f"uniform:{ev.uniform},ip_star:{ev.ip_star},"
            f"full_ap:{ev.full_ap if ev.full_ap is not None else '-'}")
    th = verdict.thresholds
    verdict_lines.append(
        f"thresholds=delta_low:{th.delta_low},delta_up:{th.delta_up},"
        f"delta_bd:{th.delta_bd},m_min:{th.m_min},"
        f"censor_factor:{th.censor_factor},gap_cap_frac:{th.gap_cap_frac}")
    files["verdict.txt"] = "\n".join(verdict_lines) + "\n"
    for i, rec in enumerate(records):
        files[f"window_{i}.txt"] = rec.to_text(
            spec.operator_literal, spec.vector_literal)
        ev = verdict.evidence[i]
        rows = [f"# eps={rec.epsilon}"]
        if ev.report is not None:
            rep = ev.report
            rows.append(f"# lower={_fmt(rep.lower_est, digits)} "
                        f"upper={_fmt(rep.upper_est, digits)} "
                        f"banach={_fmt(rep.banach_upper_est, digits)}")
            rows.append("# running density: N value")
            rows.extend(f"{n} {_fmt(v, digits)}"
                        for n, v in rep.running_density_curve)
            rows.append("# window density: L value")
            rows.extend(f"{L} {_fmt(v, digits)}" for L, v in rep.banach_curve)
        else:
            rows.append("# too few returns for density estimation")
        files[f"density_{i}.txt"] = "\n".join(rows) + "\n"
    label = verdict.label.name
    return {"name": spec.name, "status": "ok", "label": label, "files": files}


def _degrade_vector(x):
    if isinstance(x, SparseVector):
        return SparseVector.from_pairs(
            x.space, ((i, complex(to_complex(v))) for i, v in x.entries))
    return x


def _experiment_task(args) -> dict:
    spec, precision = args
    try:
        return execute_experiment(spec, precision)
    except PrecisionError as err:
        return {"name": spec.name, "status": "failed",
                "label": f"precision: {err}", "files": {}}
    except Exception as err:           # isolate: one failure must not abort the run
        return {"name": spec.name, "status": "failed",
                "label": f"{type(err).__name__}: {err}",
                "files": {"error.txt": traceback.format_exc()}}


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def execute_suite(spec: SuiteSpec) -> checks_mod.CheckOutcome:
    kind = spec.check
    if kind == "kronecker":
        turns = [_parse_turn(t) for t in spec.get("turns", "").split(",") if t.strip()]
        if not turns:
            raise ConfigError(f"suite {spec.name!r} needs turns=")
        return checks_mod.kronecker_return_check(
            turns, float(Fraction(spec.get("epsilon", "1/2"))),
            int(spec.get("horizon", "10000")))
    if kind == "cut-shift-paste":
        return checks_mod.cut_shift_paste_check(
            spec.get("family", "syndetic"), int(spec.get("trials", "100")),
            int(spec.get("seed", "0")), int(spec.get("horizon", "20000")))
    if kind == "matrix-criterion":
        from .config import parse_operator
        mat = parse_operator(spec.get("operator", ""))
        eps = [Fraction(e) for e in spec.get("epsilons", "1/2,1/5").split(",")]
        return checks_mod.matrix_criterion_check(
            mat, eps, int(spec.get("horizon", "10000")))
    if kind == "diagonal-criterion":
        from .config import parse_operator
        diag = parse_operator(spec.get("operator", ""))
        eps = [Fraction(e) for e in spec.get("epsilons", "1/2,1/5").split(",")]
        return checks_mod.diagonal_criterion_check(
            diag, int(spec.get("sample", "4")), eps,
            int(spec.get("horizon", "10000")))
    if kind == "power-consistency":
        from .config import parse_operator, parse_vector
        op = parse_operator(spec.get("operator", ""))
        x = parse_vector(spec.get("vector", ""), op)
        eps = [Fraction(e) for e in spec.get("epsilons", "1/2,1/5").split(",")]
        sem = tuple(int(s) for s in spec.get("seminorms", "0").split(","))
        return checks_mod.power_consistency_check(
            op, x, int(spec.get("p", "2")), eps,
            int(spec.get("horizon", "10000")), seminorms=sem)
    if kind == "scaling-consistency":
        from .config import parse_operator, parse_vector
        op = parse_operator(spec.get("operator", ""))
        x = parse_vector(spec.get("vector", ""), op)
        eps = [Fraction(e) for e in spec.get("epsilons", "1/2,1/5").split(",")]
        sem = tuple(int(s) for s in spec.get("seminorms", "0").split(","))
        return checks_mod.scaling_consistency_check(
            op, x, parse_scalar(spec.get("factor", "rot(1/3)")), eps,
            int(spec.get("horizon", "10000")), seminorms=sem)
    if kind == "shift-series":
        horizon = int(spec.get("horizon", "10000"))
        support = parse_set_expression(
            spec.get("support", f"intervals(1-{horizon})"), horizon)
        return checks_mod.shift_series_check(
            Rule(spec.get("weights", "2")), support,
            float(spec.get("threshold", "10")))
    if kind == "translation-invariance":
        horizon = int(spec.get("horizon", "10000"))
        window = parse_set_expression(spec.get("window", "residue(3,0)"), horizon)
        return checks_mod.translation_invariance_check(
            window, int(spec.get("m", "7")))
    if kind == "minimality-separation":
        from .config import parse_operator, parse_vector
        op = parse_operator(spec.get("operator", ""))
        x = parse_vector(spec.get("vector", ""), op)
        y = parse_vector(spec.get("reference", ""), op)
        sem = int(spec.get("seminorm", "0"))
        return checks_mod.minimality_separation_check(
            op, x, y, int(spec.get("horizon", "10000")), seminorm_index=sem)
    if kind == "eigenvector-span":
        # diagonal operators carry their eigenvectors: unit coordinates
        from .config import parse_operator
        op = parse_operator(spec.get("operator", ""))
        if not isinstance(op, _diag_type()):
            raise ConfigError("eigenvector-span suites take a diag(...) operator")
        coeffs = [parse_scalar(c) for c in spec.get("coefficients", "1").split(",")]
        pairs = [(op.entry(k), SparseVector.unit(op.space, k))
                 for k in range(1, len(coeffs) + 1)]
        eps = [Fraction(e) for e in spec.get("epsilons", "1/2,1/5").split(",")]
        return checks_mod.eigenvector_span_check(
            op, pairs, coeffs, eps, int(spec.get("horizon", "10000")))
    raise ConfigError(f"unknown check kind {kind!r} in suite {spec.name!r}")


def _diag_type():
    from .operators import Diagonal
    return Diagonal


def _parse_turn(text: str):
    t = text.strip()
    if t.startswith("sqrt"):
        return float(Rule(t)(0)) % 1.0
    return Fraction(t) % 1


def _suite_task(spec: SuiteSpec):
    try:
        return execute_suite(spec)
    except ConfigError:
        raise
    except Exception as err:
        return checks_mod.CheckOutcome(
            name=spec.name, status="fail",
            metrics={}, witness={"error": f"{type(err).__name__}: {err}"})


def _outcome_text(name: str, out: checks_mod.CheckOutcome) -> str:
    lines = [f"suite={name}", f"check={out.name}", f"status={out.status}"]
    if out.seed is not None:
        lines.append(f"seed={out.seed}")
    lines.append(f"fingerprint={out.fingerprint}")
    for k in sorted(out.metrics):
        lines.append(f"metric.{k}={_fmt(out.metrics[k])}")
    if out.witness:
        for k in sorted(out.witness):
            lines.append(f"witness.{k}={_fmt(out.witness[k])}")
    if out.reason:
        lines.append(f"reason={out.reason}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

def run_config(config: RunConfig, out_dir: Path, workers: int = 1,
               precision: str = "exact", seed: int = 0) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    exp_args = [(spec, precision) for spec in config.experiments]
    if workers > 1 and exp_args:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            exp_results = list(pool.map(_experiment_task, exp_args))
    else:
        exp_results = [_experiment_task(a) for a in exp_args]

    suite_results = [(spec.name, _suite_task(spec)) for spec in config.suites]

    summary = []
    any_fail = False
    for spec, result in zip(config.experiments, exp_results):
        base = out_dir / "experiments" / spec.name
        base.mkdir(parents=True, exist_ok=True)
        for fname, content in sorted(result["files"].items()):
            (base / fname).write_text(content)
        status = result["status"]
        if status != "ok":
            any_fail = True
        summary.append(f"experiment {spec.name:<28} {status:<7} {result['label']}")
    for name, out in suite_results:
        base = out_dir / "suites"
        base.mkdir(parents=True, exist_ok=True)
        (base / f"{name}.txt").write_text(_outcome_text(name, out))
        if out.status == "fail":
            any_fail = True
        summary.append(f"suite      {name:<28} {out.status:<7} {out.name}")
    (out_dir / "summary.txt").write_text(
        "\n".join([f"# run seed={seed} precision={precision}", *summary]) + "\n")
    for line in summary:
        print(line)
    return 1 if any_fail else 0


def main(argv=None) -> int:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--precision", default="exact",
                        help="exact | float:<digits>")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--seed", type=int, default=0)
    parser = argparse.ArgumentParser(
        prog="recurlab",
        description="recurrence-in-linear-dynamics experiment runner",
        parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="execute a config file", parents=[common])
    run_p.add_argument("config", type=Path)
    desc_p = sub.add_parser("describe", help="describe an operator literal",
                            parents=[common])
    desc_p.add_argument("literal")
    args = parser.parse_args(argv)

    if args.precision != "exact":
        if not (args.precision.startswith("float:")
                and args.precision[6:].isdigit()):
            print(f"bad --precision {args.precision!r}", file=sys.stderr)
            return 2

    if args.command == "describe":
        try:
            print(describe_operator(args.literal))
        except Exception as err:
            print(f"configuration error: {err}", file=sys.stderr)
            return 2
        return 0

    try:
        text = args.config.read_text()
    except OSError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    out_dir = Path(args.out) if args.out else Path(config.output_dir)
    try:
        return run_config(config, out_dir, workers=args.workers,
                          precision=args.precision, seed=args.seed)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
