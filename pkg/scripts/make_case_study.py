"""Regenerate the byte-order case-study fixtures under fixtures/case_study/.

Run from the repository root:

    python3 scripts/make_case_study.py

Produces scripted reply files for in-process tests, a replay directory for
offline CLI runs, and a config file wiring the replay backend to the
packaged contract data. The script replays the whole session both ways and
fails loudly if the flow does not go violation-then-verified in two trials.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from btsynth.contracts import load as load_contracts  # noqa: E402
from btsynth.llm import RecordingBackend, ReplayBackend, ScriptedBackend  # noqa: E402
from btsynth.orchestrator import SessionConfig, Success, run_session  # noqa: E402

FIXTURES = ROOT / "fixtures" / "case_study"
DATA = ROOT / "src" / "btsynth" / "data"

PROMPT = (
    "Write a bpftrace program to trace tcp_connect events for both IPv4 and "
    "IPv6 connection attempts, display the source and destination IP "
    "addresses and the source and destination ports in host byte order."
)

CANDIDATE_1 = """\
Here is a bpftrace program for that:

```bpftrace
kprobe:tcp_connect
{
    $sk = (struct sock *)arg0;
    $saddr = ntop(2, $sk->__sk_common.skc_rcv_saddr);
    $daddr = ntop(2, $sk->__sk_common.skc_daddr);
    $sport = $sk->__sk_common.skc_num;
    $dport = $sk->__sk_common.skc_dport;
    printf("TCP connect: %s:%d -> %s:%d\\n", $saddr, $sport, $daddr, $dport);
}
```
"""

ANNOTATED_1 = """\
```bpftrace
kprobe:tcp_connect
{
    $sk = (struct sock *)arg0;
    assume($sk != 0);
    assume($sk->__sk_common.skc_rcv_saddr != 0);
    assume($sk->__sk_common.skc_daddr != 0);
    assume($sk->__sk_common.skc_num >= 0);
    assume($sk->__sk_common.skc_dport >= 0);
    assume(sizeof($sk->__sk_common.skc_rcv_saddr) == 4 || sizeof($sk->__sk_common.skc_rcv_saddr) == 16);
    assume(sizeof($sk->__sk_common.skc_daddr) == 4 || sizeof($sk->__sk_common.skc_daddr) == 16);
    $saddr = ntop(2, $sk->__sk_common.skc_rcv_saddr);
    $daddr = ntop(2, $sk->__sk_common.skc_daddr);
    $sport = $sk->__sk_common.skc_num;
    $dport = $sk->__sk_common.skc_dport;
    printf("TCP connect: %s:%d -> %s:%d\\n", $saddr, $sport, $daddr, $dport);
    assert($dport == bswap($sk->__sk_common.skc_dport));
    assert($sport == bswap($sk->__sk_common.skc_num));
}
```
"""

CANDIDATE_2 = """\
The ports need a byte swap to be in host order:

```bpftrace
kprobe:tcp_connect
{
    $sk = (struct sock *)arg0;
    $saddr = ntop(2, $sk->__sk_common.skc_rcv_saddr);
    $daddr = ntop(2, $sk->__sk_common.skc_daddr);
    $sport = bswap($sk->__sk_common.skc_num);
    $dport = bswap($sk->__sk_common.skc_dport);
    printf("TCP connect: %s:%d -> %s:%d\\n", $saddr, $sport, $daddr, $dport);
}
```
"""

ANNOTATED_2 = """\
```bpftrace
kprobe:tcp_connect
{
    $sk = (struct sock *)arg0;
    assume($sk != 0);
    assume($sk->__sk_common.skc_rcv_saddr != 0);
    assume($sk->__sk_common.skc_daddr != 0);
    assume($sk->__sk_common.skc_num >= 0);
    assume($sk->__sk_common.skc_dport >= 0);
    assume(sizeof($sk->__sk_common.skc_rcv_saddr) == 4 || sizeof($sk->__sk_common.skc_rcv_saddr) == 16);
    assume(sizeof($sk->__sk_common.skc_daddr) == 4 || sizeof($sk->__sk_common.skc_daddr) == 16);
    $saddr = ntop(2, $sk->__sk_common.skc_rcv_saddr);
    $daddr = ntop(2, $sk->__sk_common.skc_daddr);
    $sport = bswap($sk->__sk_common.skc_num);
    $dport = bswap($sk->__sk_common.skc_dport);
    printf("TCP connect: %s:%d -> %s:%d\\n", $saddr, $sport, $daddr, $dport);
    assert($dport == bswap($sk->__sk_common.skc_dport));
    assert($sport == bswap($sk->__sk_common.skc_num));
}
```
"""


def session_config(synthesis_llm, comprehension_llm) -> SessionConfig:
    return SessionConfig(
        synthesis_llm=synthesis_llm,
        comprehension_llm=comprehension_llm,
        contracts=load_contracts(DATA / "contracts.json"),
        annotation="llm",
    )


def check_flow(result) -> None:
    assert isinstance(result.status, Success), result.status
    assert result.status.trial_count == 2, result.status.trial_count
    fb = result.trials[0].feedback
    assert fb is not None and fb.stage == "symexec", fb
    assert "bswap" in fb.message, fb.message
    print(f"  trial 1 feedback: {fb.message}")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    replay_dir = FIXTURES / "replay"
    replay_dir.mkdir(exist_ok=True)
    for old in replay_dir.iterdir():
        old.unlink()

    (FIXTURES / "prompt.txt").write_text(PROMPT + "\n", encoding="utf-8")
    (FIXTURES / "synthesis_replies.json").write_text(
        json.dumps([CANDIDATE_1, CANDIDATE_2], indent=2) + "\n", encoding="utf-8"
    )
    (FIXTURES / "comprehension_replies.json").write_text(
        json.dumps([ANNOTATED_1, ANNOTATED_2], indent=2) + "\n", encoding="utf-8"
    )

    print("recording replay fixtures:")
    cfg = session_config(
        RecordingBackend(ScriptedBackend([CANDIDATE_1, CANDIDATE_2]), replay_dir),
        RecordingBackend(ScriptedBackend([ANNOTATED_1, ANNOTATED_2]), replay_dir),
    )
    check_flow(run_session(PROMPT, cfg))
    print(f"  {len(list(replay_dir.iterdir()))} replay files")

    print("replaying from fixtures:")
    replay = ReplayBackend(replay_dir)
    check_flow(run_session(PROMPT, session_config(replay, replay)))

    config = {
        "llm": {"backend": "replay", "replay_dir": "fixtures/case_study/replay"},
        "contracts": "src/btsynth/data/contracts.json",
        "session": {"annotation": "llm"},
    }
    (FIXTURES / "config.json").write_text(
        json.dumps(config, indent=2) + "\n", encoding="utf-8"
    )
    print("wrote fixtures/case_study/config.json")


if __name__ == "__main__":
    main()
