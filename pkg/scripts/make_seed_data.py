"""Regenerate the package data files under src/btsynth/data/.

Run from the repository root:

    python3 scripts/make_seed_data.py

Every seed program is parsed before it is written, so the shipped store
only ever contains programs the package itself accepts.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from btsynth.contracts import loads, save  # noqa: E402
from btsynth.examplestore import ExampleStore  # noqa: E402
from btsynth.lang import parse  # noqa: E402

DATA = ROOT / "src" / "btsynth" / "data"

CONTRACTS = {
    "kretprobe:tcp_connect_init": {
        "pre": {"sk": "!=null"},
    },
    "kretprobe:vfs_read": {
        "pre": {"file": "!=null"},
        "post": {"retval": ">=-4095"},
        "semantics": "Read up to count bytes from a file into a buffer; returns bytes read or a negative errno.",
    },
    "kretprobe:vfs_write": {
        "pre": {"file": "!=null"},
        "post": {"retval": ">=-4095"},
        "semantics": "Write count bytes from a buffer to a file; returns bytes written or a negative errno.",
    },
    "kprobe:kfree_skb": {
        "pre": {"skb": "!=null"},
        "semantics": "Free a socket buffer that is being dropped.",
    },
    "kretprobe:inet_csk_accept": {
        "post": {"retval": ">=0"},
        "semantics": "Accept a queued connection on a listening socket; returns the new socket or NULL.",
    },
    "kretprobe:do_sys_openat2": {
        "post": {"retval": ">=-4095"},
        "semantics": "Open a file relative to a directory fd; returns the new fd or a negative errno.",
    },
}

SEED_EXAMPLES = [
    (
        "Trace every kill signal sent on the system: record which process "
        "sent which signal to which PID, and print the outcome when the "
        "syscall returns.",
        """tracepoint:syscalls:sys_enter_kill
{
    @tpid[tid] = args.pid;
    @tsig[tid] = args.sig;
}
tracepoint:syscalls:sys_exit_kill
/@tpid[tid]/
{
    time("%H:%M:%S ");
    printf("pid %d sent signal %d to pid %d, result %d\\n", pid, @tsig[tid], @tpid[tid], args.ret);
    delete(@tpid[tid]);
    delete(@tsig[tid]);
}
""",
    ),
    (
        "Trace tcp_connect events for both IPv4 and IPv6, printing the "
        "source and destination addresses and ports in host byte order.",
        """kprobe:tcp_connect
{
    $sk = (struct sock *)arg0;
    $saddr = ntop(2, $sk->__sk_common.skc_rcv_saddr);
    $daddr = ntop(2, $sk->__sk_common.skc_daddr);
    $sport = bswap($sk->__sk_common.skc_num);
    $dport = bswap($sk->__sk_common.skc_dport);
    printf("TCP connect: %s:%d -> %s:%d\\n", $saddr, $sport, $daddr, $dport);
}
""",
    ),
    (
        "Count system calls per process id.",
        """tracepoint:raw_syscalls:sys_enter
{
    @calls[pid] = @calls[pid] + 1;
}
""",
    ),
    (
        "Print the name of every file opened together with the process that "
        "opened it.",
        """tracepoint:syscalls:sys_enter_openat
{
    printf("%s opened %s\\n", comm, str(args.filename));
}
""",
    ),
    (
        "Count failed reads per command name.",
        """kretprobe:vfs_read
/retval < 0/
{
    @fails[comm] = @fails[comm] + 1;
}
""",
    ),
    (
        "Show every program executed on the system with its pid.",
        """tracepoint:syscalls:sys_enter_execve
{
    printf("%d %s\\n", pid, str(args.filename));
}
""",
    ),
    (
        "Print the remote address of every accepted TCP connection.",
        """kretprobe:inet_csk_accept
{
    $sk = (struct sock *)retval;
    if ($sk != 0) {
        printf("accepted from %s\\n", ntop(2, $sk->__sk_common.skc_daddr));
    }
}
""",
    ),
    (
        "Count dropped network packets.",
        """kprobe:kfree_skb
{
    @drops = @drops + 1;
}
""",
    ),
    (
        "Track how many bytes each process writes.",
        """kretprobe:vfs_write
/retval > 0/
{
    @bytes[pid] = @bytes[pid] + retval;
}
""",
    ),
    (
        "Alert when a process sends signal 9 to another process.",
        """tracepoint:syscalls:sys_enter_kill
{
    if (args.sig == 9) {
        printf("%s (%d) sent SIGKILL to pid %d\\n", comm, pid, args.pid);
    }
}
""",
    ),
]


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)

    store = loads(json.dumps(CONTRACTS))
    save(store, DATA / "contracts.json")
    print(f"contracts.json: {len(store)} entries")

    types = {
        "__sk_common.skc_dport": {"width": 16, "size_bytes": 2},
        "__sk_common.skc_num": {"width": 16, "size_bytes": 2},
        "__sk_common.skc_family": {"width": 16, "size_bytes": 2},
        "__sk_common.skc_rcv_saddr": {"width": 32, "variable_size": True},
        "__sk_common.skc_daddr": {"width": 32, "variable_size": True},
        "__sk_common.skc_state": {"width": 8, "size_bytes": 1},
    }
    (DATA / "kernel_types.json").write_text(
        json.dumps(types, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"kernel_types.json: {len(types)} entries")

    seed_path = DATA / "seed_examples.jsonl"
    if seed_path.exists():
        seed_path.unlink()
    examples = ExampleStore(seed_path)
    for prompt, program in SEED_EXAMPLES:
        parse(program)
        examples.add(examples.new_record(prompt, program, outcome="curated"))
    print(f"seed_examples.jsonl: {len(examples)} records")


if __name__ == "__main__":
    main()
