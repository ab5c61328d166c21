"""Numpy fallback for the grid kernels.

Evaluates each compiled constraint over chunks of the flattened assignment
space, narrowing an active mask between constraints so later ones only run
when earlier ones still have candidates. Assignment order is lexicographic
over the symbol tuple, matching the compiled kernel exactly: both must find
the same first witness.
"""

from __future__ import annotations

import numpy as np

KERNEL_NAME = "numpy"

_CHUNK = 1 << 20

_U64 = np.uint64


def _mask(width: int) -> np.uint64:
    return _U64(0xFFFFFFFFFFFFFFFF if width >= 64 else (1 << width) - 1)


def _eval_constraint(ops, pa, pb, lo, hi, sym_vals):
    stack: list = []
    for i in range(lo, hi):
        op = ops[i]
        a = pa[i]
        b = pb[i]
        if op == 0:
            stack.append(_U64(a))
            continue
        if op == 1:
            stack.append(sym_vals[a])
            continue
        if op in (24, 25, 26, 27, 28, 29):
            x = stack.pop()
            if op == 24:
                stack.append((x == _U64(0)).astype(_U64))
            elif op == 25:
                stack.append((~x + _U64(1)) & _mask(a))
            elif op == 26:
                stack.append(~x & _mask(a))
            elif op == 27:
                nbytes = a // 8
                out = np.zeros_like(x) if isinstance(x, np.ndarray) else _U64(0)
                for k in range(nbytes):
                    byte = (x >> _U64(8 * k)) & _U64(0xFF)
                    out = out | (byte << _U64(8 * (nbytes - 1 - k)))
                stack.append(out)
            elif op == 28:
                sign = (x >> _U64(a - 1)) & _U64(1)
                ext = _mask(b) & ~_mask(a)
                stack.append(np.where(sign.astype(bool), x | ext, x) & _mask(b))
            else:  # 29 trunc/zext
                stack.append(x & _mask(a))
            continue
        if op == 30:
            e = stack.pop()
            t = stack.pop()
            c = stack.pop()
            stack.append(np.where(np.asarray(c).astype(bool), t, e).astype(_U64))
            continue
        y = stack.pop()
        x = stack.pop()
        m = _mask(a)
        if op == 2:
            r = (x + y) & m
        elif op == 3:
            r = (x - y) & m
        elif op == 4:
            r = (x * y) & m
        elif op == 5:
            safe = np.where(np.asarray(y) == _U64(0), _U64(1), y)
            r = np.where(np.asarray(y) == _U64(0), m, (x // safe) & m)
        elif op == 6:
            safe = np.where(np.asarray(y) == _U64(0), _U64(1), y)
            r = np.where(np.asarray(y) == _U64(0), x, (x % safe) & m)
        elif op == 7:
            r = x & y
        elif op == 8:
            r = x | y
        elif op == 9:
            r = x ^ y
        elif op == 10:
            amt = np.minimum(np.asarray(y), _U64(63))
            r = np.where(np.asarray(y) >= _U64(a), _U64(0), (x << amt) & m)
        elif op == 11:
            amt = np.minimum(np.asarray(y), _U64(63))
            r = np.where(np.asarray(y) >= _U64(a), _U64(0), x >> amt)
        elif op == 12:
            r = (x == y).astype(_U64)
        elif op == 13:
            r = (x != y).astype(_U64)
        elif op == 14:
            r = (x < y).astype(_U64)
        elif op == 15:
            r = (x <= y).astype(_U64)
        elif op == 16:
            r = (x > y).astype(_U64)
        elif op == 17:
            r = (x >= y).astype(_U64)
        elif op in (18, 19, 20, 21):
            flip = _U64(1 << (a - 1)) if a < 64 else _U64(1 << 63)
            xs = x ^ flip
            ys = y ^ flip
            if op == 18:
                r = (xs < ys).astype(_U64)
            elif op == 19:
                r = (xs <= ys).astype(_U64)
            elif op == 20:
                r = (xs > ys).astype(_U64)
            else:
                r = (xs >= ys).astype(_U64)
        elif op == 22:
            r = ((np.asarray(x) != _U64(0)) & (np.asarray(y) != _U64(0))).astype(_U64)
        elif op == 23:
            r = ((np.asarray(x) != _U64(0)) | (np.asarray(y) != _U64(0))).astype(_U64)
        else:
            raise ValueError(f"bad opcode {op}")
        stack.append(r)
    return stack.pop()


def run_grid(ops, pa, pb, starts, nsyms, domains):
    """Find the lexicographically first assignment satisfying every
    constraint. Returns a tuple of symbol values, or None."""
    ops = list(ops)
    pa = list(pa)
    pb = list(pb)
    dims = [int(d) for d in domains[:nsyms]] or [1]
    total = 1
    for d in dims:
        total *= d
    ncons = len(starts) - 1
    for lo in range(0, total, _CHUNK):
        hi = min(lo + _CHUNK, total)
        idx = np.arange(lo, hi, dtype=_U64)
        sym_vals = []
        rest = idx
        for d in reversed(dims):
            sym_vals.append(rest % _U64(d))
            rest = rest // _U64(d)
        sym_vals.reverse()
        active = np.ones(hi - lo, dtype=bool)
        for k in range(ncons):
            vals = _eval_constraint(ops, pa, pb, starts[k], starts[k + 1], sym_vals)
            vals = np.broadcast_to(np.asarray(vals, dtype=_U64), active.shape)
            active &= vals != _U64(0)
            if not active.any():
                break
        if active.any():
            offset = int(np.argmax(active))
            return tuple(int(sym_vals[s][offset]) for s in range(nsyms))
    return None
