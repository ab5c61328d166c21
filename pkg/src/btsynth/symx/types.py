"""Kernel field widths and signedness used when materializing field reads.

Keys are dotted field paths as they appear after '->' in source, e.g.
"__sk_common.skc_dport". A field either has a fixed byte size (sizeof folds
to that constant) or is marked variable_size, in which case sizeof yields a
per-field metadata symbol constrained only by whatever the program itself
assumes about it. Socket addresses are variable-size here because the same
field holds 4 bytes for IPv4 and 16 for IPv6.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

ALLOWED_WIDTHS = (8, 16, 32, 64, 128)


@dataclass(frozen=True)
class FieldType:
    width: int = 64
    signed: bool = False
    size_bytes: int | None = None
    variable_size: bool = False

    def __post_init__(self):
        if self.width not in ALLOWED_WIDTHS:
            raise ValueError(f"field width must be one of {ALLOWED_WIDTHS}, got {self.width}")


_DEFAULT_ENTRIES = {
    "__sk_common.skc_dport": FieldType(16, False, size_bytes=2),
    "__sk_common.skc_num": FieldType(16, False, size_bytes=2),
    "__sk_common.skc_family": FieldType(16, False, size_bytes=2),
    "__sk_common.skc_rcv_saddr": FieldType(32, False, variable_size=True),
    "__sk_common.skc_daddr": FieldType(32, False, variable_size=True),
    "__sk_common.skc_state": FieldType(8, False, size_bytes=1),
}

_DEFAULT = FieldType()


class KernelTypeMap:
    def __init__(self, entries: dict[str, FieldType] | None = None):
        self.entries = dict(entries) if entries else {}

    @classmethod
    def default(cls) -> "KernelTypeMap":
        return cls(_DEFAULT_ENTRIES)

    @classmethod
    def from_file(cls, path) -> "KernelTypeMap":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        entries = {}
        for key, spec in raw.items():
            entries[key] = FieldType(
                width=spec.get("width", 64),
                signed=spec.get("signed", False),
                size_bytes=spec.get("size_bytes"),
                variable_size=spec.get("variable_size", False),
            )
        return cls(entries)

    def lookup(self, path: str) -> FieldType:
        return self.entries.get(path, _DEFAULT)
