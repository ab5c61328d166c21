import os
import stat

import pytest

from btsynth.lang import (
    Assign,
    BuiltinVar,
    IntLit,
    ProbeClause,
    ProbeSpec,
    Program,
    ScratchVar,
    Unroll,
    parse,
)
from btsynth.safety import (
    AnnotationsPresent,
    ExternalToolMissing,
    SafetyReport,
    check,
)

CLEAN = """\
kprobe:vfs_read
{
    @c[tid] = @c[tid] + 1;
    unroll(4) {
        $x = $x + 1;
    }
}
"""


class TestBuiltinRules:
    def test_clean_program(self):
        report = check(parse(CLEAN))
        assert report.ok and report.messages == () and report.mode == "builtin"

    def test_map_key_field_dereference(self):
        report = check(parse("kprobe:f { @m[$p->inode] = 1; }"))
        assert not report.ok
        assert any("dereferences a pointer field" in m for m in report.messages)

    def test_map_key_reads_map(self):
        report = check(parse("kprobe:f { @a[@b[0]] = 1; }"))
        assert not report.ok
        assert any("reads another map" in m for m in report.messages)

    def test_map_read_keys_checked_in_expressions(self):
        report = check(parse("kprobe:f { $x = @a[$p->f]; }"))
        assert not report.ok

    def test_delete_keys_checked(self):
        report = check(parse("kprobe:f { delete(@a[$p->f]); }"))
        assert not report.ok

    def test_plain_value_keys_allowed(self):
        report = check(parse('kprobe:f { @m[tid, comm, 3, "x"] = 1; }'))
        assert report.ok

    def test_unknown_probe_kind(self):
        prog = Program(
            (
                ProbeClause(
                    (ProbeSpec("zprobe", "f"),),
                    None,
                    (Assign(ScratchVar("x"), IntLit(1)),),
                ),
            )
        )
        report = check(prog)
        assert not report.ok
        assert any("unknown probe kind 'zprobe'" in m for m in report.messages)

    def test_nonpositive_unroll(self):
        prog = Program(
            (
                ProbeClause(
                    (ProbeSpec("kprobe", "f"),),
                    None,
                    (Unroll(0, (Assign(ScratchVar("x"), IntLit(1)),)),),
                ),
            )
        )
        report = check(prog)
        assert not report.ok
        assert any("unroll bound" in m for m in report.messages)

    def test_write_through_builtin(self):
        prog = Program(
            (
                ProbeClause(
                    (ProbeSpec("kprobe", "f"),),
                    None,
                    (Assign(BuiltinVar("retval"), IntLit(1)),),
                ),
            )
        )
        report = check(prog)
        assert not report.ok
        assert any("only scratch variables and maps" in m for m in report.messages)

    def test_messages_carry_positions(self):
        report = check(parse("kprobe:f\n{\n    @m[$p->inode] = 1;\n}"))
        assert report.messages[0].startswith("3:")

    def test_multiple_findings_all_reported(self):
        report = check(parse("kprobe:f { @a[@b[0]] = 1; @c[$p->x] = 2; }"))
        assert len(report.messages) == 2

    def test_annotations_must_be_stripped(self):
        with pytest.raises(AnnotationsPresent):
            check(parse("kprobe:f { assume(pid > 0); $x = 1; }"))

    def test_predicate_scanned(self):
        report = check(parse("kprobe:f /@a[$p->x] == 1/ { $y = 1; }"))
        assert not report.ok


@pytest.fixture()
def tool(tmp_path):
    def make(script: str):
        path = tmp_path / "fake_dryrun.sh"
        path.write_text("#!/bin/sh\n" + script, encoding="utf-8")
        path.chmod(path.stat().st_mode | stat.S_IXUSR)
        return str(path)

    return make


class TestExternalMode:
    def test_exit_zero_is_safe(self, tool):
        cmd = [tool("exit 0"), "{file}"]
        report = check(parse(CLEAN), mode="external", command=cmd)
        assert report.ok and report.mode == "external"

    def test_nonzero_exit_with_stderr(self, tool):
        cmd = [tool('echo "loop may not terminate" >&2\nexit 1'), "{file}"]
        report = check(parse(CLEAN), mode="external", command=cmd)
        assert not report.ok
        assert report.messages == ("loop may not terminate",)

    def test_nonzero_exit_without_stderr(self, tool):
        cmd = [tool("exit 3"), "{file}"]
        report = check(parse(CLEAN), mode="external", command=cmd)
        assert not report.ok
        assert "status 3" in report.messages[0]

    def test_program_text_reaches_tool(self, tool, tmp_path):
        capture = tmp_path / "seen.bt"
        cmd = [tool(f'cat "$1" > {capture}\nexit 0'), "{file}"]
        report = check(parse(CLEAN), mode="external", command=cmd)
        assert report.ok
        assert "kprobe:vfs_read" in capture.read_text(encoding="utf-8")

    def test_command_string_form(self, tool):
        path = tool("exit 0")
        report = check(parse(CLEAN), mode="external", command=f"{path} {{file}}")
        assert report.ok

    def test_missing_tool(self):
        with pytest.raises(ExternalToolMissing):
            check(parse(CLEAN), mode="external", command=["/no/such/tool", "{file}"])

    def test_no_command_configured(self):
        with pytest.raises(ExternalToolMissing):
            check(parse(CLEAN), mode="external", command=None)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            check(parse(CLEAN), mode="fancy")


class TestReport:
    def test_failing_report_needs_messages(self):
        with pytest.raises(ValueError):
            SafetyReport(ok=False, messages=(), mode="builtin")
