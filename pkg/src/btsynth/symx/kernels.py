"""Grid kernel selection: compiled extension when the build produced one,
numpy fallback otherwise. Both expose run_grid with identical semantics."""

from __future__ import annotations

import numpy as np

from . import gridkern_py
from .gridcompile import GridProgram

try:
    from . import _gridkern  # type: ignore[attr-defined]

    HAVE_COMPILED = True
except ImportError:
    _gridkern = None
    HAVE_COMPILED = False

DEFAULT_KERNEL = "compiled" if HAVE_COMPILED else "numpy"


def available_kernels() -> list[str]:
    return ["compiled", "numpy"] if HAVE_COMPILED else ["numpy"]


def run_grid(prog: GridProgram, kernel: str = "auto"):
    """Sweep the assignment grid; returns the first satisfying assignment as
    a dict of symbol name -> value, or None when none exists."""
    if kernel == "auto":
        kernel = DEFAULT_KERNEL
    nsyms = len(prog.sym_names)
    if kernel == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled grid kernel is not available")
        found = _gridkern.run_grid(
            np.asarray(prog.ops, dtype=np.int64),
            np.asarray(prog.pa, dtype=np.uint64),
            np.asarray(prog.pb, dtype=np.uint64),
            np.asarray(prog.starts, dtype=np.int64),
            nsyms,
            prog.domains,
        )
    elif kernel == "numpy":
        found = gridkern_py.run_grid(
            prog.ops, prog.pa, prog.pb, prog.starts, nsyms, prog.domains
        )
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    if found is None:
        return None
    return dict(zip(prog.sym_names, found))
