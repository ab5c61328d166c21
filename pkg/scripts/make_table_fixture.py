"""Regenerate the 40-case metric fixtures under fixtures/eval/.

Run from the repository root:

    python3 scripts/make_table_fixture.py

Two datasets with scripted outcomes: one scoring 32 accurate / 1 false
positive / 7 false negative, one scoring 12 / 1 / 27. Sessions run with
direct annotation and no contracts, so each passing case consumes exactly
one scripted reply and each failing case burns all three trials on
unparseable replies. Labels come from manual_label judges, mirroring
hand-inspection of live runs.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from btsynth.evalharness import load_cases, run_eval  # noqa: E402
from btsynth.llm import ScriptedBackend  # noqa: E402
from btsynth.orchestrator import SessionConfig  # noqa: E402

FIXTURES = ROOT / "fixtures" / "eval"

GOOD_PROGRAM = """\
tracepoint:raw_syscalls:sys_enter
{
    @calls[pid] = @calls[pid] + 1;
}
"""

GOOD_REPLY = f"```bpftrace\n{GOOD_PROGRAM}```\n"
BAD_REPLY = "I am unable to produce a program for this request."

PROMPTS = [
    "count syscalls per process",
    "trace file opens",
    "watch tcp retransmits",
    "log setuid calls",
    "record page faults per pid",
    "trace context switches",
    "watch signal delivery",
    "count block io requests",
    "trace dns lookups",
    "monitor memory allocation",
]


def build(name: str, accurate: int, fp: int, fn: int, seed: int) -> None:
    outcomes = (
        [("accurate", True)] * accurate
        + [("fp", False)] * fp
        + [("fn", True)] * fn
    )
    random.Random(seed).shuffle(outcomes)

    lines = []
    replies = []
    for i, (kind, label) in enumerate(outcomes):
        case = {
            "id": f"c{i:02d}",
            "prompt": f"{PROMPTS[i % len(PROMPTS)]} (case {i})",
            "reference_program": GOOD_PROGRAM,
            "judge": {"kind": "manual_label", "correct": label, "source": "desk-labels"},
        }
        lines.append(json.dumps(case, sort_keys=True))
        if kind == "fn":
            replies.extend([BAD_REPLY] * 3)
        else:
            replies.append(GOOD_REPLY)

    dataset = FIXTURES / f"{name}.jsonl"
    dataset.write_text("\n".join(lines) + "\n", encoding="utf-8")
    (FIXTURES / f"{name}_replies.json").write_text(
        json.dumps(replies, indent=2) + "\n", encoding="utf-8"
    )

    cases = load_cases(dataset)
    cfg = SessionConfig(
        synthesis_llm=ScriptedBackend(replies), annotation="direct", max_trials=3
    )
    result = run_eval(cases, cfg, iterations=1, workers=1)
    m = result.metrics
    print(
        f"{name}: accuracy={m.accuracy} fp={m.fp} fn={m.fn} "
        f"n={m.n} judge_errors={result.judge_errors}"
    )


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    build("table_ken", accurate=32, fp=1, fn=7, seed=11)
    build("table_baseline", accurate=12, fp=1, fn=27, seed=23)


if __name__ == "__main__":
    main()
