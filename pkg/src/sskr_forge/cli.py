"""Command-line front end: file-in/file-out workflows over the library.

Exit codes are stable: 0 success, 1 validation errors, 2 planning failure,
3 numerical failure, 4 usage or IO error. With --json a single JSON document
goes to stdout on every exit path; without it, results print as text and
error messages go to stderr. Commands never modify their input files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import mlme, simkit, sskr, transform
from .cma import (
    FRAMEWORKS,
    DdtMismatch,
    Planned,
    UnreachableFrameworks,
    UnresolvableRow,
    UntransformedStatements,
    load_rules,
    load_table,
    parse_statements,
    plan_to_jsonable,
    spec_dumps,
    spec_from_sskr,
    spec_to_jsonable,
)
from .cma import plan as plan_statements
from .cma.planner import DigestMismatch, RuleMissing
from .cma.statements import ArityMismatch, UnknownVerb
from .cma.ontology import UnknownTerm
from .expr.parser import ExprSyntaxError
from .expr.evaluate import EvalError

__all__ = ["main", "run"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we map to 4
        raise _UsageError(message)


# Known failure families, most specific first. Anything outside these is a
# bug and propagates as a traceback.
def _exit_code_for(exc: BaseException) -> int | None:
    planning = (
        DigestMismatch,
        RuleMissing,
        DdtMismatch,
        UnresolvableRow,
    )
    numerical = (
        simkit.NumericalBlowup,
        simkit.UnsupportedPde,
        simkit.UnsupportedFramework,
        simkit.UnresolvedParameter,
        mlme.NoPlausibleFound,
        mlme.PoolExhausted,
        mlme.SingleClassData,
        EvalError,
    )
    validation = (
        sskr.ValidationFailed,
        sskr.SchemaError,
        sskr.UnresolvableRef,
        transform.StepError,
        transform.NameCollision,
        transform.ParameterIdCollision,
        transform.IncompatibleDdt,
        transform.UnknownParameter,
        UnknownVerb,
        ArityMismatch,
        UnknownTerm,
        ExprSyntaxError,
    )
    usage = (
        mlme.ConfigError,
        mlme.GridMismatch,
        simkit.InvalidConfig,
        OSError,
        json.JSONDecodeError,
        ValueError,
        KeyError,
    )
    if isinstance(exc, planning):
        return 2
    if isinstance(exc, numerical):
        return 3
    if isinstance(exc, validation):
        return 1
    if isinstance(exc, usage):
        return 4
    return None


def _parse_assignments(pairs, what: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for pair in pairs or ():
        name, eq, value = pair.partition("=")
        if not eq or not name:
            raise _UsageError(f"bad {what} {pair!r}, expected name=value")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise _UsageError(f"bad {what} value in {pair!r}") from None
    return out


def _read_initial(spec_text: str) -> dict[str, float]:
    """--ic accepts either inline `S=0.99,I=0.01` or a two-column CSV file."""
    if os.path.exists(spec_text):
        out: dict[str, float] = {}
        with open(spec_text, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.lower() in ("variable,value", "name,value"):
                    continue
                name, _, value = line.partition(",")
                try:
                    out[name.strip()] = float(value)
                except ValueError:
                    raise _UsageError(f"bad initial-condition row {line!r}") from None
        return out
    return _parse_assignments(spec_text.split(","), "initial condition")


def _model_params(s, overrides: dict[str, float]) -> dict[str, float]:
    params = {p.id: float(p.value) for p in s.parameters if p.value is not None}
    params.update(overrides)
    return params


def _sim_config(args, s) -> simkit.SimConfig:
    return simkit.SimConfig(
        solver=args.solver,
        dt=args.dt,
        t_end=args.t_end,
        initial=_read_initial(args.ic),
        params=_model_params(s, _parse_assignments(args.param, "parameter")),
        stride=args.stride,
        knockouts=frozenset(args.knockout or ()),
    )


def _cell_text(cell) -> str:
    if cell.kind == sskr.PRESENT:
        return "present(%s)" % ", ".join(cell.params)
    return cell.kind


# ---------------------------------------------------------------- commands


def _cmd_validate(args):
    s = sskr.load(args.sskr)
    report = sskr.validate(s)
    human = [str(f) for f in report.findings]
    human.append(
        f"{s.name}: ok" if report.ok
        else f"{s.name}: {len(report.errors)} validation error(s)"
    )
    payload = {
        "model": s.name,
        "ok": report.ok,
        "findings": [
            {"severity": f.severity, "location": f.location, "message": f.message}
            for f in report.findings
        ],
    }
    return (0 if report.ok else 1), payload, human


def _cmd_simulate(args):
    s = sskr.load(args.sskr)
    spec = spec_from_sskr(s)
    cfg = _sim_config(args, s)
    model = simkit.compile(spec, cfg.params)
    traj = simkit.simulate(model, cfg)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(simkit.to_csv(traj))
    files = [args.output]
    if args.plot:
        from .plots import save_trajectory_plot

        png = os.path.splitext(args.output)[0] + ".png"
        save_trajectory_plot(traj, png)
        files.append(png)
    payload = {
        "model": s.name,
        "variables": list(traj.variables),
        "rows": len(traj.times),
        "t_end": traj.times[-1],
        "files": files,
    }
    human = [f"wrote {len(traj.times)} rows for {', '.join(traj.variables)} to {args.output}"]
    if args.plot:
        human.append(f"wrote figure {files[-1]}")
    return 0, payload, human


def _cmd_emit(args):
    s = sskr.load(args.sskr)
    spec = spec_from_sskr(s)
    cfg = _sim_config(args, s)
    text = simkit.emit_simulation_document(spec, cfg)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        return 0, {"model": s.name, "files": [args.output]}, [f"wrote document to {args.output}"]
    return 0, {"model": s.name, "document": text}, [text.rstrip("\n")]


def _cmd_plan(args):
    with open(args.statements, encoding="utf-8") as fh:
        statements = parse_statements(fh.read().splitlines())
    table = load_table(args.ontology)
    rules = load_rules(args.rules)
    outcome = plan_statements(statements, rules, table, args.goal)
    if isinstance(outcome, UntransformedStatements):
        payload = {
            "planned": False,
            "reason": "untransformed statements",
            "statements": list(outcome.indices),
        }
        human = ["planning failed; no rule matched statement(s) "
                 + ", ".join(str(i) for i in outcome.indices)]
        return 2, payload, human
    if isinstance(outcome, UnreachableFrameworks):
        reasons = {goal: list(msgs) for goal, msgs in outcome.missing.items()}
        payload = {"planned": False, "reason": "unreachable framework", "missing": reasons}
        human = ["planning failed:"] + [
            f"  {goal}: {msg}" for goal, msgs in reasons.items() for msg in msgs
        ]
        return 2, payload, human
    assert isinstance(outcome, Planned)
    if args.trace:
        doc = {
            "plan": plan_to_jsonable(outcome.plan),
            "spec": spec_to_jsonable(outcome.spec),
        }
        with open(args.trace, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, ensure_ascii=False)
            fh.write("\n")
    payload = {
        "planned": True,
        "goal": args.goal,
        "steps": len(outcome.plan.steps),
        "rules": [st.rule for st in outcome.plan.steps],
        "variables": list(outcome.spec.variables),
        "digest": outcome.plan.digest,
    }
    if args.trace:
        payload["files"] = [args.trace]
    human = [
        f"planned {len(outcome.plan.steps)} step(s); {outcome.spec.framework_name} "
        f"spec over {', '.join(outcome.spec.variables)}"
    ]
    if args.trace:
        human.append(f"wrote trace to {args.trace}")
    if not args.json:
        human.append(spec_dumps(outcome.spec).rstrip("\n"))
    return 0, payload, human


def _cmd_extend(args):
    s = sskr.load(args.sskr)
    script = transform.load_script(args.script)
    out = transform.apply(s, script)
    sskr.save(out, args.output)
    payload = {
        "model": out.name,
        "steps": len(script.steps),
        "rows": out.mrm.n_rows,
        "variables": out.mrm.n_cols,
        "files": [args.output],
    }
    human = [f"applied {len(script.steps)} step(s); wrote {out.name} "
             f"({out.mrm.n_rows}x{out.mrm.n_cols}) to {args.output}"]
    return 0, payload, human


def _cmd_decompose(args):
    s = sskr.load(args.sskr)
    sub = sskr.load(args.sub)
    outputs = {}
    for pair in args.output_map:
        param, eq, row = pair.partition("=")
        if not eq:
            raise _UsageError(f"bad --outputs entry {pair!r}, expected param=row-label")
        outputs[param.strip()] = row.strip()
    out = transform.decompose_parameter(s, args.param, sub, outputs)
    sskr.save(out, args.output)
    payload = {
        "model": out.name,
        "parameter": args.param,
        "rows": out.mrm.n_rows,
        "variables": out.mrm.n_cols,
        "files": [args.output],
    }
    human = [f"decomposed {args.param!r} into {sub.name}; wrote "
             f"{out.mrm.n_rows}x{out.mrm.n_cols} model to {args.output}"]
    return 0, payload, human


def _cmd_compare(args):
    a = sskr.load(args.a)
    b = sskr.load(args.b)
    diff = transform.compare(a, b, n=args.samples, seed=args.seed)
    verdicts = {}
    for row, v in diff.row_verdicts.items():
        if isinstance(v, transform.NotComparable):
            verdicts[row] = {"outcome": "NotComparable", "detail": v.reason}
        else:
            entry = {"outcome": v.outcome}
            if v.witness is not None:
                entry["witness"] = str(v.witness)
            verdicts[row] = entry
    payload = {
        "variables_only_in_a": diff.variables_only_in_a,
        "variables_only_in_b": diff.variables_only_in_b,
        "rows_only_in_a": diff.rows_only_in_a,
        "rows_only_in_b": diff.rows_only_in_b,
        "changed_rows": diff.changed_rows,
        "cell_diffs": [
            {"row": d.row, "variable": d.variable,
             "a": _cell_text(d.a), "b": _cell_text(d.b)}
            for d in diff.cell_diffs
        ],
        "row_verdicts": verdicts,
    }
    human = []

    def section(label, values):
        human.append(f"{label}: {', '.join(values) if values else '(none)'}")

    section("variables only in a", diff.variables_only_in_a)
    section("variables only in b", diff.variables_only_in_b)
    section("rows only in a", diff.rows_only_in_a)
    section("rows only in b", diff.rows_only_in_b)
    section("changed rows", diff.changed_rows)
    for d in diff.cell_diffs:
        human.append(f"  cell [{d.row}][{d.variable}]: {_cell_text(d.a)} -> {_cell_text(d.b)}")
    for row in diff.row_verdicts:
        entry = verdicts[row]
        line = f"  row {row}: {entry['outcome']}"
        if "witness" in entry:
            line += f" ({entry['witness']})"
        human.append(line)
    return 0, payload, human


def _cmd_compose(args):
    a = sskr.load(args.a)
    b = sskr.load(args.b)
    shared = []
    for pair in args.share or ():
        left, eq, right = pair.partition("=")
        if not eq:
            raise _UsageError(f"bad --share entry {pair!r}, expected A-var=B-var")
        shared.append((left.strip(), right.strip()))
    out = transform.compose(a, b, shared)
    sskr.save(out, args.output)
    payload = {
        "model": out.name,
        "rows": out.mrm.n_rows,
        "variables": out.mrm.n_cols,
        "shared": [list(p) for p in shared],
        "files": [args.output],
    }
    human = [f"composed {a.name} + {b.name} -> {out.name} "
             f"({out.mrm.n_rows}x{out.mrm.n_cols}) at {args.output}"]
    return 0, payload, human


def _cmd_calibrate(args):
    from .plots import save_ensemble_plot, save_fitness_plot

    exp, result = mlme.run_ga_experiment(args.config, args.results, seed=args.seed)
    curve_png = os.path.join(args.results, "fitness_curve.png")
    ensemble_png = os.path.join(args.results, "ensemble.png")
    save_fitness_plot(result.best_curve, curve_png)
    save_ensemble_plot(result.ensemble, exp.problem.param_ids, exp.problem.bounds, ensemble_png)
    if not result.plausible_found:
        # Artifacts above are still on disk for inspection.
        raise mlme.NoPlausibleFound(
            f"no plausible parameterization in {exp.ga.generations} generations"
        )
    files = [
        os.path.join(args.results, "ensemble.csv"),
        os.path.join(args.results, "fitness_curve.csv"),
        curve_png,
        ensemble_png,
    ]
    payload = {
        "parameters": list(exp.problem.param_ids),
        "ensemble_size": len(result.ensemble),
        "evaluations": result.evaluations,
        "best_fitness": result.best_curve[-1],
        "plausible_found": result.plausible_found,
        "files": files,
    }
    human = [
        f"calibrated {', '.join(exp.problem.param_ids)}: "
        f"{len(result.ensemble)} plausible set(s), best fitness {result.best_curve[-1]:g}",
        f"results in {args.results}",
    ]
    return 0, payload, human


def _cmd_learn(args):
    from .plots import save_accuracy_plot

    exp, result = mlme.run_al_experiment(args.config, args.results, seed=args.seed)
    png = os.path.join(args.results, "accuracy.png")
    save_accuracy_plot(result.labels_curve, result.accuracy_curve, png)
    files = [
        os.path.join(args.results, "accuracy.csv"),
        os.path.join(args.results, "weights.json"),
        png,
    ]
    payload = {
        "labels_used": result.labels_used,
        "rounds": len(result.accuracy_curve),
        "final_accuracy": result.final_accuracy,
        "stopping_accuracy": exp.al.stopping_accuracy,
        "reached_target": result.final_accuracy >= exp.al.stopping_accuracy,
        "files": files,
    }
    human = [
        f"trained plausibility classifier: accuracy {result.final_accuracy:.4f} "
        f"after {result.labels_used} label(s) in {len(result.accuracy_curve)} round(s)",
        f"results in {args.results}",
    ]
    return 0, payload, human


# ----------------------------------------------------------------- wiring


def _add_sim_flags(p) -> None:
    p.add_argument("--solver", choices=list(simkit.SOLVERS), default="rk4")
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--t-end", dest="t_end", type=float, required=True)
    p.add_argument("--ic", required=True,
                   help="initial conditions: inline S=0.99,I=0.01 or a name,value CSV file")
    p.add_argument("--param", action="append", metavar="ID=VALUE",
                   help="override a parameter value (repeatable)")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--knockout", action="append", metavar="VAR",
                   help="clamp a variable to zero (repeatable)")


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="emit a single JSON document on stdout")
    common.add_argument("--threads", type=int, default=None,
                        help="cap internal parallelism (default: SSKR_FORGE_THREADS or 1)")

    parser = _Parser(prog="sskr-forge", description=__doc__.splitlines()[0],
                     parents=[common])
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("validate", parents=[common], help="check a model file")
    p.add_argument("sskr")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("simulate", parents=[common], help="integrate a model to CSV")
    p.add_argument("sskr")
    _add_sim_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG next to the CSV")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("plan", parents=[common],
                       help="plan annotated statements into a model spec")
    p.add_argument("statements")
    p.add_argument("--rules", required=True)
    p.add_argument("--ontology", required=True)
    p.add_argument("--goal", choices=list(FRAMEWORKS), required=True)
    p.add_argument("--trace", help="write the plan + spec JSON here")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("extend", parents=[common], help="apply an extension script")
    p.add_argument("sskr")
    p.add_argument("--script", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_extend)

    p = sub.add_parser("decompose", parents=[common],
                       help="replace a parameter with a producing sub-model")
    p.add_argument("sskr")
    p.add_argument("--param", required=True)
    p.add_argument("--sub", required=True, help="sub-model SSKR file")
    p.add_argument("--outputs", dest="output_map", action="append", required=True,
                   metavar="PARAM=ROW", help="sub-model row producing the parameter")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("compare", parents=[common], help="diff two models")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("compose", parents=[common], help="merge two models")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--share", action="append", metavar="A-VAR=B-VAR",
                   help="identify a variable of b with one of a (repeatable)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_compose)

    p = sub.add_parser("calibrate", parents=[common],
                       help="run a calibration experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--results", required=True, help="output directory")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("learn", parents=[common],
                       help="run an active-learning experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--results", required=True, help="output directory")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("emit", parents=[common],
                       help="write the human-readable simulation document")
    p.add_argument("sskr")
    _add_sim_flags(p)
    p.add_argument("-o", "--output", help="file target (default: stdout)")
    p.set_defaults(func=_cmd_emit)

    return parser


def _resolve_threads(args) -> int:
    value = args.threads
    if value is None:
        raw = os.environ.get("SSKR_FORGE_THREADS", "1")
        try:
            value = int(raw)
        except ValueError:
            raise _UsageError(f"SSKR_FORGE_THREADS is not an integer: {raw!r}") from None
    if value < 1:
        raise _UsageError("--threads must be at least 1")
    return value


def _print_json(command, code, payload) -> None:
    doc = {
        "command": command,
        "status": "ok" if code == 0 else "error",
        "exit_code": code,
    }
    doc.update(payload)
    print(json.dumps(doc, indent=2, ensure_ascii=False, default=str))


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    json_mode = "--json" in argv
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a command is required")
        _resolve_threads(args)
    except _UsageError as exc:
        if json_mode:
            _print_json(None, 4, {"error": {"type": "usage", "message": str(exc)}})
        else:
            print(f"error: {exc}", file=sys.stderr)
            print(parser.format_usage().rstrip(), file=sys.stderr)
        return 4

    try:
        code, payload, human = args.func(args)
    except _UsageError as exc:
        if args.json:
            _print_json(args.command, 4, {"error": {"type": "usage", "message": str(exc)}})
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # noqa: BLE001 - mapped to stable exit codes
        code = _exit_code_for(exc)
        if code is None:
            raise
        if args.json:
            _print_json(args.command, code,
                        {"error": {"type": type(exc).__name__, "message": str(exc)}})
        else:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code

    if args.json:
        _print_json(args.command, code, payload)
    else:
        for line in human:
            print(line)
    return code


def main() -> None:
    raise SystemExit(run())
