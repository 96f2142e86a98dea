"""Goal generators for the cycle, queens and subsets benchmarks."""

from __future__ import annotations


class BenchmarkError(ValueError):
    pass


def cycle(n: int, pred: str = "lt") -> str:
    """``p(A0,A1) /\\ ... /\\ p(An,A0)``: n+1 atoms closing a ring."""
    if n < 1:
        raise BenchmarkError("cycle needs n >= 1")
    if not pred.isidentifier():
        raise BenchmarkError(f"bad predicate name {pred!r}")
    atoms = [f"{pred}(A{i},A{i + 1})" for i in range(n)]
    atoms.append(f"{pred}(A{n},A0)")
    return " /\\ ".join(atoms)


def queens(n: int) -> str:
    """One queen per column; ``Qi`` is the row of the queen in column ``i``."""
    if n < 1:
        raise BenchmarkError("queens needs n >= 1")
    parts = []
    for i in range(1, n + 1):
        parts.append("(" + " \\/ ".join(f"Q{i} = {k}" for k in range(1, n + 1)) + ")")
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            d = j - i
            parts.append(f"~(Q{i} = Q{j})")
            parts.append(f"~(Q{i} = Q{j} + {d})")
            parts.append(f"~(Q{j} = Q{i} + {d})")
    return " /\\ ".join(parts)


def subsets(n: int, v: int, item: int = 10) -> str:
    """Pick any subset of ``n`` items, each worth ``item``, summing to ``v``.

    ``Si`` is the contribution of item ``i`` (0 or ``item``); ``Tk`` is the
    running total of the first ``k`` items, chained with ``plus``.
    """
    if n < 1 or v < 0:
        raise BenchmarkError("subsets needs n >= 1 and v >= 0")
    parts = []
    for i in range(1, n + 1):
        parts.append(f"(S{i} = 0 \\/ S{i} = {item})")
        parts.append(f"S{i} >= 0 /\\ S{i} <= {item}")
    total = "S1"
    for k in range(2, n + 1):
        parts.append(f"plus(T{k},{total},S{k})")
        total = f"T{k}"
    parts.append(f"{total} = {v}")
    return " /\\ ".join(parts)


BENCHMARKS = {"cycle": cycle, "queens": queens, "subsets": subsets}


def gen_benchmark(name: str, params) -> str:
    """Goal text for ``name`` with integer (or, for cycle, predicate) parameters."""
    gen = BENCHMARKS.get(name)
    if gen is None:
        raise BenchmarkError(f"unknown benchmark {name!r}; choose from {', '.join(BENCHMARKS)}")
    params = list(params)
    try:
        if name == "cycle":
            if len(params) not in (1, 2):
                raise BenchmarkError("cycle takes n and an optional predicate")
            return cycle(int(params[0]), *(str(p) for p in params[1:]))
        if name == "queens":
            if len(params) != 1:
                raise BenchmarkError("queens takes n")
            return queens(int(params[0]))
        if len(params) != 2:
            raise BenchmarkError("subsets takes n and v")
        return subsets(int(params[0]), int(params[1]))
    except ValueError as exc:
        if isinstance(exc, BenchmarkError):
            raise
        raise BenchmarkError(f"bad parameters for {name}: {exc}") from None


def parse_bench_spec(spec: str):
    """``"queens:8"`` -> ``("queens", ["8"])``."""
    name, _, rest = spec.partition(":")
    return name.strip(), [p.strip() for p in rest.split(",") if p.strip()]
