"""Concrete evaluation of symbolic terms under a model.

This is the reference semantics every backend must agree with:

- arithmetic is modulo 2**width; division and modulo are unsigned, with the
  SMT-LIB convention for zero divisors (x/0 = all-ones, x%0 = x);
- shifts are logical; a shift amount >= width yields 0;
- signed comparisons interpret operands as two's complement at their width;
- bswap reverses the bytes of its operand's width;
- booleans are width-0 terms holding 0 or 1.

Counterexample re-validation and constant folding both run through here.
"""

from __future__ import annotations

from .values import BOOL, Concrete, Op, SymExpr, Symbol, Uninterpreted


class MissingSymbol(KeyError):
    pass


def mask(width: int) -> int:
    return (1 << width) - 1 if width else 1


def to_signed(value: int, width: int) -> int:
    if width and value >= (1 << (width - 1)):
        return value - (1 << width)
    return value


def bswap(value: int, width: int) -> int:
    nbytes = width // 8
    out = 0
    for i in range(nbytes):
        out = (out << 8) | ((value >> (8 * i)) & 0xFF)
    return out


def eval_op(op: str, width: int, args: list[int], arg_widths: list[int]) -> int:
    m = mask(width)
    if op == "add":
        return (args[0] + args[1]) & m
    if op == "sub":
        return (args[0] - args[1]) & m
    if op == "mul":
        return (args[0] * args[1]) & m
    if op == "udiv":
        return m if args[1] == 0 else (args[0] // args[1]) & m
    if op == "urem":
        return args[0] if args[1] == 0 else (args[0] % args[1]) & m
    if op == "and":
        return args[0] & args[1]
    if op == "or":
        return args[0] | args[1]
    if op == "xor":
        return args[0] ^ args[1]
    if op == "shl":
        return 0 if args[1] >= width else (args[0] << args[1]) & m
    if op == "lshr":
        return 0 if args[1] >= width else args[0] >> args[1]
    if op == "neg":
        return (-args[0]) & m
    if op == "bitnot":
        return (~args[0]) & m
    if op == "bswap":
        return bswap(args[0], width)
    if op == "zext" or op == "trunc":
        return args[0] & m
    if op == "sext":
        return to_signed(args[0], arg_widths[0]) & m
    if op == "ite":
        return args[1] if args[0] else args[2]
    if op == "eq":
        return int(args[0] == args[1])
    if op == "ne":
        return int(args[0] != args[1])
    if op == "ult":
        return int(args[0] < args[1])
    if op == "ule":
        return int(args[0] <= args[1])
    if op == "ugt":
        return int(args[0] > args[1])
    if op == "uge":
        return int(args[0] >= args[1])
    w = arg_widths[0]
    if op == "slt":
        return int(to_signed(args[0], w) < to_signed(args[1], w))
    if op == "sle":
        return int(to_signed(args[0], w) <= to_signed(args[1], w))
    if op == "sgt":
        return int(to_signed(args[0], w) > to_signed(args[1], w))
    if op == "sge":
        return int(to_signed(args[0], w) >= to_signed(args[1], w))
    if op == "band":
        return int(bool(args[0]) and bool(args[1]))
    if op == "bor":
        return int(bool(args[0]) or bool(args[1]))
    if op == "bnot":
        return int(not args[0])
    raise ValueError(f"unknown operation {op!r}")


def evaluate(expr: SymExpr, model: dict[str, int], _memo: dict[int, int] | None = None) -> int:
    """Evaluate a term under a symbol assignment. Uninterpreted applications
    must have been reduced away first; seeing one here is a logic error."""
    if _memo is None:
        _memo = {}
    hit = _memo.get(id(expr))
    if hit is not None:
        return hit
    if isinstance(expr, Concrete):
        result = expr.value
    elif isinstance(expr, Symbol):
        try:
            result = model[expr.name] & mask(expr.width)
        except KeyError:
            raise MissingSymbol(expr.name) from None
    elif isinstance(expr, Op):
        args = [evaluate(a, model, _memo) for a in expr.operands]
        widths = [a.width for a in expr.operands]
        result = eval_op(expr.op, expr.width, args, widths)
    elif isinstance(expr, Uninterpreted):
        raise ValueError(f"uninterpreted application {expr.fn!r} reached concrete evaluation")
    else:
        raise TypeError(f"cannot evaluate {type(expr).__name__}")
    _memo[id(expr)] = result
    return result


def holds(constraints, model: dict[str, int]) -> bool:
    memo: dict[int, int] = {}
    return all(evaluate(c, model, memo) for c in constraints)
