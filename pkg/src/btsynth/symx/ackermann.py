"""Reduce uninterpreted applications to fresh symbols plus congruence.

Each distinct application f(args...) becomes a symbol f#k (k by order of
first appearance, so naming is deterministic). For every pair of
applications of the same function, a congruence constraint is added:
argument-wise equality implies result equality. Identical applications are
structurally equal terms and simply share one symbol.
"""

from __future__ import annotations

from . import exprbuild as eb
from .values import Op, SymExpr, Symbol, TRUE, Uninterpreted, uninterpreted_of


def _rewrite(expr: SymExpr, mapping, memo: dict[int, SymExpr]) -> SymExpr:
    hit = memo.get(id(expr))
    if hit is not None:
        return hit
    if isinstance(expr, Uninterpreted):
        out = mapping[expr]
    elif isinstance(expr, Op):
        operands = tuple(_rewrite(a, mapping, memo) for a in expr.operands)
        out = expr if operands == expr.operands else Op(expr.op, operands, expr.width, expr.signed)
    else:
        out = expr
    memo[id(expr)] = out
    return out


def ackermannize(constraints: list[SymExpr]) -> list[SymExpr]:
    apps = uninterpreted_of(constraints)
    if not apps:
        return list(constraints)
    counters: dict[str, int] = {}
    mapping: dict[Uninterpreted, Symbol] = {}
    for app in apps:
        k = counters.get(app.fn, 0)
        counters[app.fn] = k + 1
        mapping[app] = Symbol(f"{app.fn}#{k}", app.width, app.signed)

    memo: dict[int, SymExpr] = {}
    # application arguments may themselves contain applications
    rewritten_args = {app: tuple(_rewrite(a, mapping, memo) for a in app.args) for app in apps}
    out = [_rewrite(c, mapping, memo) for c in constraints]

    by_fn: dict[tuple[str, int], list[Uninterpreted]] = {}
    for app in apps:
        by_fn.setdefault((app.fn, len(app.args)), []).append(app)
    for group in by_fn.values():
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                left, right = group[i], group[j]
                args_equal = TRUE
                for x, y in zip(rewritten_args[left], rewritten_args[right]):
                    args_equal = eb.band(args_equal, eb.eq(x, y))
                results_equal = eb.eq(mapping[left], mapping[right])
                out.append(eb.bor(eb.bnot(args_equal), results_equal))
    return out
