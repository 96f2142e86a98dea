"""Command-line front end: load rules, build a goal, search, report."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..engine import RESOURCE_LIMIT, UNKNOWN, UNSAT, Solver, SolverError, format_clause
from ..engine.rules import RuleError
from ..frontend import ParseError, ValidationError, normalize, parse_goal, parse_rules
from ..frontend.ast import And, Atom, Leaf, Not, Var, conjoin
from ..solvers import load_builtin
from . import oracle
from .bench import BenchmarkError, gen_benchmark, parse_bench_spec

EXIT_OK = 0
EXIT_INPUT = 1       # unreadable file, parse or validation error
EXIT_USAGE = 2       # bad command line (argparse uses this too)
EXIT_LIMIT = 3       # resource limit reached
EXIT_UNSOUND = 4     # solver says UNSAT but the oracle found a model


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    solver: str = "builtin:bounds"
    goal_file: str = None
    expr: str = None
    bench: str = None
    heuristic: str = "vsids"
    seed: int = 0
    max_decisions: int = None
    max_clauses: int = None
    stats: bool = False
    trace: bool = False
    oracle: str = None
    json: bool = False
    dimacs: str = None
    extra: dict = field(default_factory=dict)

    def goal_sources(self) -> list:
        return [s for s in (self.goal_file, self.expr, self.bench) if s is not None]


def load_rules(source: str):
    if source.startswith("builtin:"):
        name = source[len("builtin:"):]
        try:
            return load_builtin(name)
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read solver file {source}: {exc.strerror}") from None
    return parse_rules(text)


def goal_text(config: RunConfig) -> str:
    sources = config.goal_sources()
    if len(sources) != 1:
        raise InputError("give exactly one of --goal, --expr, --bench")
    if config.goal_file is not None:
        try:
            return Path(config.goal_file).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read goal file {config.goal_file}: {exc.strerror}") from None
    if config.expr is not None:
        return config.expr
    name, params = parse_bench_spec(config.bench)
    return gen_benchmark(name, params)


def _model_formula(solver: Solver, model: dict):
    """The theory literals of a model as one conjunction."""
    parts = []
    for b in sorted(model):
        key = solver.var_atom.get(b)
        if key is None:
            continue
        pred, args = key
        atom = Atom(pred, tuple(Var(a) if isinstance(a, str) else a for a in args))
        parts.append(Leaf(atom) if model[b] else Not(Leaf(atom)))
    return conjoin(parts)


def equality_lines(solver: Solver, names) -> list:
    """``X = Y [b...]`` for each goal variable unified with an earlier one."""
    lines = []
    reps = []
    for n in names:
        for r in reps:
            just = solver.ask_eq_vars(r, n)
            if just is not None:
                lines.append(f"{r} = {n} [{','.join(f'b{b}' for b in sorted(just))}]")
                break
        else:
            reps.append(n)
    return lines


def solve_report(config: RunConfig) -> tuple:
    """Run one configuration; returns ``(exit status, report lines, json dict)``."""
    rules = load_rules(config.solver)
    formula = parse_goal(goal_text(config))
    goal = normalize(formula)
    lines = []
    solver = Solver(rules, heuristic=config.heuristic, seed=config.seed,
                    max_decisions=config.max_decisions, max_clauses=config.max_clauses,
                    trace=lines.append if config.trace else None)
    if config.trace:
        for b, atom in sorted(goal.atoms.items()):
            lines.append(f"atom b{b} <-> {atom}")
        lines.append("goal " + " ".join(format_clause(c) for c in goal.clauses))
    solver.load(goal)
    answer = solver.solve()
    stats = answer.stats
    lines.append(f"answer={answer.status}")
    if answer.status == UNKNOWN:
        for b in sorted(answer.model):
            if b in solver.var_atom:
                lines.append(f"b{b}: {solver.describe(b)} = {'true' if answer.model[b] else 'false'}")
        lines.extend(equality_lines(solver, oracle.goal_variables(formula)))
    status = EXIT_LIMIT if answer.status == RESOURCE_LIMIT else EXIT_OK
    report = {"answer": stats.answer, "clauses": stats.clauses, "fails": stats.fails,
              "decisions": stats.decisions, "time_ms": stats.time_ms}

    if config.oracle is not None:
        domain = oracle.parse_domain(config.oracle)
        verdict = oracle.brute_force_oracle(formula, domain)
        lines.append(f"oracle={verdict}")
        report["oracle"] = verdict
        if answer.status == UNSAT and verdict == oracle.SAT:
            lines.append("oracle disagrees: goal has a model in the domain")
            status = EXIT_UNSOUND
        elif answer.status == UNKNOWN:
            ground = oracle.find_model(_model_formula(solver, answer.model), domain)
            check = "ok" if ground is not None and oracle.evaluate(formula, ground) else "incomplete"
            lines.append(f"model-check={check}")
            report["model_check"] = check

    if config.dimacs is not None:
        Path(config.dimacs).write_text(solver.sat.to_dimacs(), encoding="utf-8")
    if config.stats:
        lines.append(stats.line())
    return status, lines, report


def _run_one(config: RunConfig) -> tuple:
    try:
        return solve_report(config)
    except InputError as exc:
        return EXIT_INPUT, [f"error: {exc}"], {"error": str(exc)}
    except ParseError as exc:
        return EXIT_INPUT, [f"parse error: {exc}"], {"error": str(exc)}
    except (ValidationError, RuleError) as exc:
        return EXIT_INPUT, [f"invalid rules: {exc}"], {"error": str(exc)}
    except BenchmarkError as exc:
        return EXIT_USAGE, [f"bad benchmark: {exc}"], {"error": str(exc)}
    except oracle.OracleError as exc:
        return EXIT_INPUT, [f"oracle error: {exc}"], {"error": str(exc)}
    except SolverError as exc:
        return EXIT_INPUT, [f"solver error: {exc}"], {"error": str(exc)}


def run(config: RunConfig, out=None) -> int:
    out = out or sys.stdout
    status, lines, report = _run_one(config)
    if config.json:
        out.write(json.dumps(report, sort_keys=True) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return status


def sweep(configs, jobs: int, out=None) -> int:
    """Run independent configurations in worker processes; reports keep input order."""
    out = out or sys.stdout
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, configs))
    else:
        results = [_run_one(c) for c in configs]
    worst = EXIT_OK
    for config, (status, lines, report) in zip(configs, results):
        if config.json:
            out.write(json.dumps(dict(report, bench=config.bench), sort_keys=True) + "\n")
        else:
            out.write(f"== {config.bench}\n" + "\n".join(lines) + "\n")
        worst = max(worst, status)
    return worst


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chrsat",
                                description="Decide goals modulo a CHR constraint solver.")
    p.add_argument("--solver", default="builtin:bounds", metavar="PATH|builtin:NAME",
                   help="rule file, or builtin:lt / builtin:leq / builtin:bounds")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--goal", dest="goal_file", metavar="PATH", help="goal formula file")
    src.add_argument("--expr", metavar="TEXT", help="goal formula inline")
    src.add_argument("--bench", action="append", metavar="NAME:P1,P2",
                     help="generated goal: cycle:N,PRED  queens:N  subsets:N,V (repeatable)")
    p.add_argument("--heuristic", choices=("vsids", "naive"), default="vsids")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-decisions", type=int, metavar="N")
    p.add_argument("--max-clauses", type=int, metavar="N")
    p.add_argument("--stats", action="store_true", help="print the statistics line")
    p.add_argument("--trace", action="store_true", help="print search and rule-firing events")
    p.add_argument("--oracle", metavar="LO..HI", help="cross-check by ground enumeration")
    p.add_argument("--jobs", type=int, default=1, metavar="N",
                   help="worker processes for a sweep of several --bench goals")
    p.add_argument("--json", action="store_true", help="print one JSON object per run")
    p.add_argument("--dimacs", metavar="PATH", help="write the final clause database")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    base = dict(solver=args.solver, goal_file=args.goal_file, expr=args.expr,
                heuristic=args.heuristic, seed=args.seed,
                max_decisions=args.max_decisions, max_clauses=args.max_clauses,
                stats=args.stats, trace=args.trace, oracle=args.oracle,
                json=args.json, dimacs=args.dimacs)
    benches = args.bench or []
    if len(benches) > 1:
        return sweep([RunConfig(bench=b, **base) for b in benches], args.jobs)
    return run(RunConfig(bench=benches[0] if benches else None, **base))


if __name__ == "__main__":
    sys.exit(main())
