import random

import pytest

from btsynth.lang import (
    Assert,
    Assign,
    Assume,
    Binary,
    Call,
    Cast,
    FieldChain,
    If,
    IntLit,
    MapAccess,
    MapAssign,
    ParseError,
    Printf,
    ScratchVar,
    Unroll,
    extract_probes,
    has_annotations,
    iter_annotations,
    parse,
    render,
    strip_annotations,
    walk_stmts,
)

from figures import ALL_FIGURE_PROGRAMS, CONNECT_ANNOTATED, KILL_TRACER
from genprog import gen_program


def roundtrip(text: str):
    first = parse(text)
    again = parse(render(first))
    assert again == first
    return first


class TestFigurePrograms:
    @pytest.mark.parametrize("text", ALL_FIGURE_PROGRAMS)
    def test_round_trip(self, text):
        roundtrip(text)

    def test_kill_tracer_shape(self):
        prog = parse(KILL_TRACER)
        assert len(prog.clauses) == 2
        enter, exit_ = prog.clauses
        assert enter.attach_points[0].key == "tracepoint:syscalls:sys_enter_kill"
        assert enter.predicate is None
        assert isinstance(enter.body[0], MapAssign)
        assert isinstance(exit_.predicate, MapAccess)
        assert exit_.predicate.name == "tpid"

    def test_annotated_connect_has_annotations(self):
        prog = parse(CONNECT_ANNOTATED)
        kinds = [type(n).__name__ for n in iter_annotations(prog)]
        assert kinds == ["Assume"] * 7 + ["Assert"] * 2


class TestParseBasics:
    def test_probe_kinds(self):
        prog = parse("kprobe:f,kretprobe:g { $x = 1; }")
        keys = [p.key for p in prog.clauses[0].attach_points]
        assert keys == ["kprobe:f", "kretprobe:g"]

    def test_predicate(self):
        prog = parse("kprobe:f /pid == 10/ { $x = 1; }")
        pred = prog.clauses[0].predicate
        assert isinstance(pred, Binary) and pred.op == "=="

    def test_field_chain_dotted(self):
        prog = parse("kprobe:f { $d = $sk->__sk_common.skc_dport; }")
        value = prog.clauses[0].body[0].value
        assert isinstance(value, FieldChain)
        assert value.fields == ("__sk_common.skc_dport",)
        assert isinstance(value.base, ScratchVar) and value.base.name == "sk"

    def test_nested_field_arrow(self):
        prog = parse("kprobe:f { $d = $a->b->c.d; }")
        value = prog.clauses[0].body[0].value
        assert isinstance(value, FieldChain)
        assert isinstance(value.base, ScratchVar)
        assert value.fields == ("b", "c.d")

    def test_cast(self):
        prog = parse("kprobe:f { $sk = (struct sock *)arg0; $n = (uint16)arg1; }")
        first, second = prog.clauses[0].body
        assert isinstance(first.value, Cast) and first.value.type_name == "struct sock *"
        assert isinstance(second.value, Cast) and second.value.type_name == "uint16"

    def test_hex_literal_renders_hex(self):
        prog = parse("kprobe:f { $x = 0x1A2B; }")
        lit = prog.clauses[0].body[0].value
        assert isinstance(lit, IntLit) and lit.value == 0x1A2B
        assert "0x1a2b" in render(prog).lower()

    def test_string_escapes(self):
        text = 'kprobe:f { printf("a\\n\\t\\"b\\"\\\\"); }'
        prog = roundtrip(text)
        stmt = prog.clauses[0].body[0]
        assert isinstance(stmt, Printf)
        assert stmt.fmt == 'a\n\t"b"\\'

    def test_precedence(self):
        prog = parse("kprobe:f { $x = 1 + 2 * 3; $y = (1 + 2) * 3; }")
        a, b = (s.value for s in prog.clauses[0].body)
        assert a.op == "+" and a.rhs.op == "*"
        assert b.op == "*" and b.lhs.op == "+"

    def test_unroll(self):
        prog = parse("kprobe:f { unroll(4) { $x = $x + 1; } }")
        u = prog.clauses[0].body[0]
        assert isinstance(u, Unroll) and u.count == 4

    def test_if_else(self):
        prog = parse("kprobe:f { if (pid > 1) { $x = 1; } else { $x = 2; } }")
        s = prog.clauses[0].body[0]
        assert isinstance(s, If) and len(s.then_body) == 1 and len(s.else_body) == 1

    def test_comments_skipped(self):
        text = """\
// leading comment
kprobe:f
{
    /* block */ $x = 1; // trailing
}
"""
        prog = parse(text)
        assert len(prog.clauses[0].body) == 1


class TestParseErrors:
    @pytest.mark.parametrize(
        "text,fragment",
        [
            ("", "no probe clause"),
            ("garbage", "attach point"),
            ("kprobe:f { comm = 1; }", "scratch variables and maps"),
            ("kprobe:f { $x = 1 }", "';'"),
            ("kprobe:f { unroll(0) { $x = 1; } }", "unroll"),
            ("zprobe:f { $x = 1; }", "unexpected character"),
            ("kprobe: { $x = 1; }", "empty target"),
            ("kprobe:f { $x = (1 + ; }", "expression"),
            ('kprobe:f { printf("unterminated); }', "string"),
        ],
    )
    def test_errors(self, text, fragment):
        with pytest.raises(ParseError) as err:
            parse(text)
        assert fragment in str(err.value)

    def test_error_position(self):
        with pytest.raises(ParseError) as err:
            parse("kprobe:f {\n  $x = ;\n}")
        assert err.value.line == 2


class TestStripAnnotations:
    def test_removes_all_and_only_annotations(self):
        prog = parse(CONNECT_ANNOTATED)
        stripped = strip_annotations(prog)
        assert not has_annotations(stripped)
        kept = [type(s).__name__ for s in walk_stmts(stripped.clauses[0].body)]
        assert "Assume" not in kept and "Assert" not in kept
        originals = [
            s
            for s in walk_stmts(prog.clauses[0].body)
            if not isinstance(s, (Assume, Assert))
        ]
        assert list(walk_stmts(stripped.clauses[0].body)) == originals

    def test_strips_inside_nested_bodies(self):
        text = """\
kprobe:f
{
    if (pid > 0) {
        assert(pid > 0);
        $x = 1;
    }
    unroll(2) {
        assume(tid != 0);
        $y = 2;
    }
}
"""
        stripped = strip_annotations(parse(text))
        assert not has_annotations(stripped)
        assert len(list(walk_stmts(stripped.clauses[0].body))) == 4

    def test_idempotent(self):
        prog = parse(CONNECT_ANNOTATED)
        once = strip_annotations(prog)
        assert strip_annotations(once) == once


class TestExtractProbes:
    def test_all_attach_points(self):
        prog = parse(KILL_TRACER)
        keys = [p.key for p in extract_probes(prog)]
        assert keys == [
            "tracepoint:syscalls:sys_enter_kill",
            "tracepoint:syscalls:sys_exit_kill",
        ]

    def test_multi_point_clause(self):
        prog = parse("kprobe:a,kprobe:b { $x = 1; }")
        assert [p.key for p in extract_probes(prog)] == ["kprobe:a", "kprobe:b"]


class TestGeneratedRoundTrip:
    def test_generated_programs_round_trip(self):
        rng = random.Random(424242)
        for _ in range(250):
            prog = gen_program(rng)
            text = render(prog)
            parsed = parse(text)
            assert parsed == prog, text

    def test_render_is_stable(self):
        rng = random.Random(7)
        for _ in range(50):
            prog = gen_program(rng)
            once = render(prog)
            assert render(parse(once)) == once
