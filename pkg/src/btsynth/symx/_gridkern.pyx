# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled grid kernel: sweeps the assignment space of up to three small
symbols, evaluating the compiled postfix constraints with early exit.
Opcode numbering matches gridcompile.py; the numpy fallback must return the
same first witness for any query."""

from libc.stdint cimport uint64_t, int64_t

KERNEL_NAME = "compiled"


cdef inline uint64_t _mask(int64_t width) nogil:
    if width >= 64:
        return <uint64_t>0xFFFFFFFFFFFFFFFFULL
    return (<uint64_t>1 << width) - <uint64_t>1


cdef inline uint64_t _bswap(uint64_t x, int64_t width) nogil:
    cdef int64_t nbytes = width // 8
    cdef uint64_t out = 0
    cdef int64_t k
    for k in range(nbytes):
        out = (out << 8) | ((x >> (8 * k)) & <uint64_t>0xFF)
    return out


cdef int _eval(const int64_t* ops, const uint64_t* pa, const uint64_t* pb,
               int64_t lo, int64_t hi, uint64_t* syms, uint64_t* stack) nogil:
    """Evaluates one constraint; returns 1 if it holds, 0 otherwise."""
    cdef int64_t sp = 0
    cdef int64_t i
    cdef int64_t op
    cdef uint64_t a, b, x, y, c, m, flip, sign, ext
    for i in range(lo, hi):
        op = ops[i]
        a = pa[i]
        b = pb[i]
        if op == 0:
            stack[sp] = a
            sp += 1
        elif op == 1:
            stack[sp] = syms[a]
            sp += 1
        elif op == 24:
            stack[sp - 1] = <uint64_t>1 if stack[sp - 1] == 0 else <uint64_t>0
        elif op == 25:
            stack[sp - 1] = (~stack[sp - 1] + <uint64_t>1) & _mask(<int64_t>a)
        elif op == 26:
            stack[sp - 1] = (~stack[sp - 1]) & _mask(<int64_t>a)
        elif op == 27:
            stack[sp - 1] = _bswap(stack[sp - 1], <int64_t>a)
        elif op == 28:
            x = stack[sp - 1]
            sign = (x >> (<int64_t>a - 1)) & <uint64_t>1
            ext = _mask(<int64_t>b) & ~_mask(<int64_t>a)
            stack[sp - 1] = ((x | ext) if sign else x) & _mask(<int64_t>b)
        elif op == 29:
            stack[sp - 1] = stack[sp - 1] & _mask(<int64_t>a)
        elif op == 30:
            y = stack[sp - 1]  # else branch
            x = stack[sp - 2]  # then branch
            c = stack[sp - 3]
            stack[sp - 3] = x if c != 0 else y
            sp -= 2
        else:
            y = stack[sp - 1]
            x = stack[sp - 2]
            sp -= 1
            m = _mask(<int64_t>a)
            if op == 2:
                stack[sp - 1] = (x + y) & m
            elif op == 3:
                stack[sp - 1] = (x - y) & m
            elif op == 4:
                stack[sp - 1] = (x * y) & m
            elif op == 5:
                stack[sp - 1] = m if y == 0 else (x / y) & m
            elif op == 6:
                stack[sp - 1] = x if y == 0 else (x % y) & m
            elif op == 7:
                stack[sp - 1] = x & y
            elif op == 8:
                stack[sp - 1] = x | y
            elif op == 9:
                stack[sp - 1] = x ^ y
            elif op == 10:
                stack[sp - 1] = <uint64_t>0 if y >= <uint64_t>a else (x << y) & m
            elif op == 11:
                stack[sp - 1] = <uint64_t>0 if y >= <uint64_t>a else x >> y
            elif op == 12:
                stack[sp - 1] = <uint64_t>1 if x == y else <uint64_t>0
            elif op == 13:
                stack[sp - 1] = <uint64_t>1 if x != y else <uint64_t>0
            elif op == 14:
                stack[sp - 1] = <uint64_t>1 if x < y else <uint64_t>0
            elif op == 15:
                stack[sp - 1] = <uint64_t>1 if x <= y else <uint64_t>0
            elif op == 16:
                stack[sp - 1] = <uint64_t>1 if x > y else <uint64_t>0
            elif op == 17:
                stack[sp - 1] = <uint64_t>1 if x >= y else <uint64_t>0
            elif op >= 18 and op <= 21:
                flip = <uint64_t>1 << (<int64_t>a - 1)
                x = x ^ flip
                y = y ^ flip
                if op == 18:
                    stack[sp - 1] = <uint64_t>1 if x < y else <uint64_t>0
                elif op == 19:
                    stack[sp - 1] = <uint64_t>1 if x <= y else <uint64_t>0
                elif op == 20:
                    stack[sp - 1] = <uint64_t>1 if x > y else <uint64_t>0
                else:
                    stack[sp - 1] = <uint64_t>1 if x >= y else <uint64_t>0
            elif op == 22:
                stack[sp - 1] = <uint64_t>1 if (x != 0 and y != 0) else <uint64_t>0
            elif op == 23:
                stack[sp - 1] = <uint64_t>1 if (x != 0 or y != 0) else <uint64_t>0
    return 1 if stack[sp - 1] != 0 else 0


def run_grid(int64_t[::1] ops, uint64_t[::1] pa, uint64_t[::1] pb,
             int64_t[::1] starts, int nsyms, domains):
    """Find the lexicographically first satisfying assignment, or None."""
    cdef uint64_t d0 = 1, d1 = 1, d2 = 1
    if nsyms > 0:
        d0 = <uint64_t>domains[0]
    if nsyms > 1:
        d1 = <uint64_t>domains[1]
    if nsyms > 2:
        d2 = <uint64_t>domains[2]
    cdef int64_t ncons = starts.shape[0] - 1
    cdef uint64_t syms[3]
    cdef uint64_t stack[64]
    cdef uint64_t v0, v1, v2
    cdef int64_t k
    cdef int good
    cdef const int64_t* ops_p = &ops[0]
    cdef const uint64_t* pa_p = &pa[0]
    cdef const uint64_t* pb_p = &pb[0]
    cdef const int64_t* starts_p = &starts[0]
    with nogil:
        for v0 in range(d0):
            syms[0] = v0
            for v1 in range(d1):
                syms[1] = v1
                for v2 in range(d2):
                    syms[2] = v2
                    good = 1
                    for k in range(ncons):
                        if not _eval(ops_p, pa_p, pb_p, starts_p[k], starts_p[k + 1],
                                     syms, stack):
                            good = 0
                            break
                    if good:
                        with gil:
                            return tuple(int(syms[s]) for s in range(nsyms))
    return None
