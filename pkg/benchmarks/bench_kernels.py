"""Compare the compiled grid kernel against the numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--rounds N] [--seed S]

Generates random 8-bit constraint systems in the enumerator's regime
(up to 3 symbols), compiles each to the shared postfix program, runs
both kernels on the identical program, checks they return the same
first witness, and reports wall-clock totals.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from btsynth.symx import exprbuild as eb
from btsynth.symx.gridcompile import compile_query
from btsynth.symx.kernels import HAVE_COMPILED, available_kernels, run_grid
from btsynth.symx.values import Concrete, Symbol


_ARITH_OPS = ["add", "sub", "mul", "and", "or", "xor", "shl", "lshr", "udiv", "urem"]
_CMP_OPS = ["eq", "ne", "ult", "ule", "ugt", "uge"]


def random_term(rng: random.Random, syms: list[Symbol], depth: int):
    if depth <= 0 or rng.random() < 0.35:
        if rng.random() < 0.55:
            return rng.choice(syms)
        return Concrete(rng.randrange(256), 8)
    op = rng.choice(_ARITH_OPS)
    return eb.arith(op, random_term(rng, syms, depth - 1), random_term(rng, syms, depth - 1))


def random_query(rng: random.Random, max_syms: int) -> list:
    syms = [Symbol(name, 8) for name in ("a", "b", "c")[: rng.randint(1, max_syms)]]
    constraints = []
    for _ in range(rng.randint(1, 4)):
        lhs = random_term(rng, syms, 2)
        rhs = random_term(rng, syms, 2)
        constraints.append(eb.compare(rng.choice(_CMP_OPS), lhs, rhs))
    return constraints


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--rounds", type=int, default=150)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument(
        "--max-syms",
        type=int,
        default=2,
        choices=(1, 2, 3),
        help="3 sweeps a 16.7M-point grid per unsat query; expect minutes",
    )
    args = ap.parse_args()

    kernels = available_kernels()
    print(f"available kernels: {', '.join(kernels)}")
    if not HAVE_COMPILED:
        print("compiled extension missing; benchmarking numpy only")

    rng = random.Random(args.seed)
    programs = []
    while len(programs) < args.rounds:
        try:
            programs.append(compile_query(random_query(rng, args.max_syms)))
        except Exception:
            continue

    totals = {k: 0.0 for k in kernels}
    sat = 0
    mismatches = 0
    for prog in programs:
        results = {}
        for kernel in kernels:
            t0 = time.perf_counter()
            results[kernel] = run_grid(prog, kernel=kernel)
            totals[kernel] += time.perf_counter() - t0
        first = results[kernels[0]]
        if first is not None:
            sat += 1
        if any(results[k] != first for k in kernels[1:]):
            mismatches += 1

    print(f"{args.rounds} queries, {sat} satisfiable, {mismatches} witness mismatches")
    for kernel in kernels:
        print(f"  {kernel:>8}: {totals[kernel]:8.3f} s total, "
              f"{totals[kernel] / args.rounds * 1e3:7.2f} ms/query")
    if len(kernels) == 2 and totals["compiled"] > 0:
        print(f"  speedup: {totals['numpy'] / totals['compiled']:.1f}x "
              f"(compiled over numpy)")
    if mismatches:
        sys.exit(1)


if __name__ == "__main__":
    main()
