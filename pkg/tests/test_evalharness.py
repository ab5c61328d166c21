import json

import pytest

from btsynth.evalharness import (
    ACCURATE,
    FALSE_NEGATIVE,
    FALSE_POSITIVE,
    JUDGE_ERROR,
    DatasetError,
    EvalCase,
    EvalRow,
    JudgeError,
    ManualLabel,
    Metrics,
    ProbeMatch,
    RegexChecks,
    compute_metrics,
    format_table,
    judge_program,
    load_cases,
    run_eval,
)
from btsynth.examplestore import ExampleStore
from btsynth.llm import ChatResponse, ScriptedBackend
from btsynth.orchestrator import SessionConfig

GOOD_F = "kprobe:f { @c[tid] = @c[tid] + 1; }"
GOOD_G = "kprobe:g { @c[tid] = @c[tid] + 1; }"


class KeyedBackend:
    """Replies keyed on which case prompt appears in the request, so the
    reply does not depend on scheduling order across threads."""

    def __init__(self, table):
        self.table = dict(table)
        self.backend_id = "keyed"

    def complete(self, req):
        for needle, text in self.table.items():
            if needle in req.user:
                return ChatResponse(text, self.backend_id, 0.0)
        raise AssertionError(f"no keyed reply for request: {req.user[:80]}")


def cfg(replies_or_backend, **kwargs):
    kwargs.setdefault("annotation", "direct")
    if isinstance(replies_or_backend, list):
        replies_or_backend = ScriptedBackend(replies_or_backend)
    return SessionConfig(synthesis_llm=replies_or_backend, **kwargs)


def case(case_id, prompt, judge):
    return EvalCase(case_id, prompt, "", judge)


def write_dataset(tmp_path, objs):
    path = tmp_path / "cases.jsonl"
    path.write_text("".join(json.dumps(o) + "\n" for o in objs), encoding="utf-8")
    return path


def case_obj(case_id="c1", prompt="count calls", judge=None, **extra):
    obj = {"id": case_id, "prompt": prompt}
    obj["judge"] = judge if judge is not None else {"kind": "manual_label", "correct": True}
    obj.update(extra)
    return obj


class TestJudges:
    def test_manual_label_ignores_program(self):
        assert judge_program(ManualLabel(True), "not even a program")
        assert not judge_program(ManualLabel(False), GOOD_F)

    def test_probe_match_exact(self):
        assert judge_program(ProbeMatch(("kprobe:f",)), GOOD_F)
        assert not judge_program(ProbeMatch(("kprobe:f",)), GOOD_G)

    def test_probe_match_is_set_comparison(self):
        text = "kprobe:f, kprobe:g { @c = 1; }"
        assert judge_program(ProbeMatch(("kprobe:g", "kprobe:f")), text)
        assert judge_program(ProbeMatch(("kprobe:f", "kprobe:g", "kprobe:f")), text)

    def test_probe_match_collects_all_clauses(self):
        text = "kprobe:f { @a = 1; } kretprobe:f { @b = 1; }"
        assert judge_program(ProbeMatch(("kprobe:f", "kretprobe:f")), text)
        assert not judge_program(ProbeMatch(("kprobe:f",)), text)

    def test_probe_match_unparseable_program(self):
        with pytest.raises(JudgeError, match="does not re-parse"):
            judge_program(ProbeMatch(("kprobe:f",)), "garbage {{{")

    def test_regex_all_must_match(self):
        judge = RegexChecks((r"kprobe:f", r"@c\[tid\]"))
        assert judge_program(judge, GOOD_F)
        assert not judge_program(RegexChecks((r"kprobe:f", r"ntop"),), GOOD_F)

    def test_regex_is_search_not_fullmatch(self):
        assert judge_program(RegexChecks((r"tid",)), GOOD_F)

    def test_regex_bad_pattern(self):
        with pytest.raises(JudgeError, match="bad pattern"):
            judge_program(RegexChecks(("(unclosed",)), GOOD_F)

    def test_regex_empty_pattern_list_passes(self):
        assert judge_program(RegexChecks(()), GOOD_F)


class TestLoadCases:
    def test_loads_all_judge_kinds(self, tmp_path):
        path = write_dataset(
            tmp_path,
            [
                case_obj("a", judge={"kind": "probe_match", "expected": ["kprobe:f"]}),
                case_obj("b", judge={"kind": "regex_checks", "patterns": ["@c"]}),
                case_obj(
                    "c",
                    judge={"kind": "manual_label", "correct": False, "source": "review"},
                ),
            ],
        )
        cases = load_cases(path)
        assert [c.id for c in cases] == ["a", "b", "c"]
        assert cases[0].judge == ProbeMatch(("kprobe:f",))
        assert cases[1].judge == RegexChecks(("@c",))
        assert cases[2].judge == ManualLabel(False, "review")

    def test_reference_program_defaults_empty(self, tmp_path):
        cases = load_cases(write_dataset(tmp_path, [case_obj()]))
        assert cases[0].reference_program == ""

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "cases.jsonl"
        path.write_text(
            json.dumps(case_obj("a")) + "\n\n  \n" + json.dumps(case_obj("b")) + "\n",
            encoding="utf-8",
        )
        assert [c.id for c in load_cases(path)] == ["a", "b"]

    def test_bad_json_reports_line_number(self, tmp_path):
        path = tmp_path / "cases.jsonl"
        path.write_text(json.dumps(case_obj()) + "\n{not json\n", encoding="utf-8")
        with pytest.raises(DatasetError, match="line 2: bad JSON"):
            load_cases(path)

    def test_unknown_top_level_field(self, tmp_path):
        path = write_dataset(tmp_path, [case_obj(expected_probes=["kprobe:f"])])
        with pytest.raises(DatasetError, match=r"line 1: unknown fields \['expected_probes'\]"):
            load_cases(path)

    @pytest.mark.parametrize("key", ["id", "prompt"])
    def test_missing_or_empty_required_field(self, tmp_path, key):
        obj = case_obj()
        obj[key] = ""
        with pytest.raises(DatasetError, match=f"missing or empty {key}"):
            load_cases(write_dataset(tmp_path, [obj]))
        del obj[key]
        with pytest.raises(DatasetError, match=f"missing or empty {key}"):
            load_cases(write_dataset(tmp_path, [obj]))

    def test_duplicate_case_id(self, tmp_path):
        path = write_dataset(tmp_path, [case_obj("dup"), case_obj("dup")])
        with pytest.raises(DatasetError, match="line 2: duplicate case id 'dup'"):
            load_cases(path)

    def test_missing_judge(self, tmp_path):
        obj = {"id": "a", "prompt": "p"}
        path = tmp_path / "cases.jsonl"
        path.write_text(json.dumps(obj) + "\n", encoding="utf-8")
        with pytest.raises(DatasetError, match="judge must be an object with a kind"):
            load_cases(path)

    def test_unknown_judge_kind_lists_known(self, tmp_path):
        path = write_dataset(tmp_path, [case_obj(judge={"kind": "vibes"})])
        with pytest.raises(DatasetError, match="unknown judge kind 'vibes'.*probe_match"):
            load_cases(path)

    @pytest.mark.parametrize(
        "judge,fragment",
        [
            ({"kind": "probe_match"}, "list of probe keys"),
            ({"kind": "probe_match", "expected": "kprobe:f"}, "list of probe keys"),
            ({"kind": "probe_match", "expected": [1]}, "list of probe keys"),
            ({"kind": "regex_checks"}, "list of patterns"),
            ({"kind": "regex_checks", "patterns": [None]}, "list of patterns"),
            ({"kind": "manual_label"}, "boolean 'correct'"),
            ({"kind": "manual_label", "correct": "yes"}, "boolean 'correct'"),
        ],
    )
    def test_judge_payload_validation(self, tmp_path, judge, fragment):
        with pytest.raises(DatasetError, match=fragment):
            load_cases(write_dataset(tmp_path, [case_obj(judge=judge)]))

    def test_extra_judge_fields_rejected(self, tmp_path):
        judge = {"kind": "manual_label", "correct": True, "reviewer": "me"}
        with pytest.raises(DatasetError, match=r"unknown judge fields \['reviewer'\]"):
            load_cases(write_dataset(tmp_path, [case_obj(judge=judge)]))


class TestMetrics:
    def test_exact_fractions(self):
        from fractions import Fraction

        rows = (
            [EvalRow("a", i, ACCURATE, 1, ()) for i in range(3)]
            + [EvalRow("b", 0, FALSE_POSITIVE, 1, ())]
            + [EvalRow("c", 0, FALSE_NEGATIVE, 2, ())]
        )
        metrics, errors = compute_metrics(rows)
        assert errors == 0
        assert metrics == Metrics(Fraction(3, 5), Fraction(1, 5), Fraction(1, 5), 5)

    def test_judge_errors_excluded_from_n(self):
        from fractions import Fraction

        rows = [
            EvalRow("a", 0, ACCURATE, 1, ()),
            EvalRow("b", 0, JUDGE_ERROR, 1, ("bad pattern",)),
        ]
        metrics, errors = compute_metrics(rows)
        assert errors == 1
        assert metrics.n == 1
        assert metrics.accuracy == Fraction(1)

    def test_all_rows_judge_errors(self):
        rows = [EvalRow("a", 0, JUDGE_ERROR, 1, ())]
        metrics, errors = compute_metrics(rows)
        assert errors == 1
        assert metrics.n == 0

    def test_fractions_must_sum_to_one(self):
        from fractions import Fraction

        with pytest.raises(ValueError, match="sum to 1"):
            Metrics(Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), 8)


class TestRunEval:
    def test_classification_totality(self):
        # one correct, one wrong-probe, one that never parses; ids are
        # deliberately unsorted to check the row ordering
        cases = [
            case("zeta", "count f calls", ProbeMatch(("kprobe:f",))),
            case("alpha", "count g calls", ProbeMatch(("kprobe:f",))),
            case("mid", "something else", ManualLabel(True)),
        ]
        config = cfg([GOOD_F, GOOD_G, "no program here"], max_trials=1)
        result = run_eval(cases, config)
        assert [(r.id, r.classification) for r in result.rows] == [
            ("alpha", FALSE_POSITIVE),
            ("mid", FALSE_NEGATIVE),
            ("zeta", ACCURATE),
        ]
        assert result.metrics.n == 3
        assert result.judge_errors == 0

    def test_false_negative_messages_and_trial_count(self):
        cases = [case("stuck", "do a thing", ManualLabel(True))]
        result = run_eval(cases, cfg(["nope", "still nope"], max_trials=2))
        row = result.rows[0]
        assert row.classification == FALSE_NEGATIVE
        assert row.trial_count == 2
        assert len(row.messages) == 2
        assert row.messages[0].startswith("[trial 1, parse]")
        assert row.messages[1].startswith("[trial 2, parse]")
        assert "does not parse" in row.messages[0]

    def test_judge_error_row(self):
        cases = [case("broken-judge", "count f calls", RegexChecks(("(oops",)))]
        result = run_eval(cases, cfg([GOOD_F]))
        row = result.rows[0]
        assert row.classification == JUDGE_ERROR
        assert row.trial_count == 1
        assert "bad pattern" in row.messages[0]
        assert result.judge_errors == 1
        assert result.metrics.n == 0

    def test_iterations_repeat_each_case(self):
        cases = [case("a", "count f calls", ProbeMatch(("kprobe:f",)))]
        result = run_eval(cases, cfg([GOOD_F, GOOD_F]), iterations=2)
        assert [(r.id, r.iteration) for r in result.rows] == [("a", 0), ("a", 1)]
        assert all(r.classification == ACCURATE for r in result.rows)

    def test_empty_dataset(self):
        with pytest.raises(DatasetError, match="dataset is empty"):
            run_eval([], cfg([]))

    def test_iterations_validated(self):
        cases = [case("a", "p", ManualLabel(True))]
        with pytest.raises(ValueError, match="iterations"):
            run_eval(cases, cfg([]), iterations=0)

    def test_workers_validated(self):
        cases = [case("a", "p", ManualLabel(True))]
        with pytest.raises(ValueError, match="workers"):
            run_eval(cases, cfg([]), workers=0)

    def test_store_frozen_during_run_and_thawed_after(self, tmp_path):
        store = ExampleStore(tmp_path / "ex.jsonl")
        observed = []

        class Probe(ScriptedBackend):
            def complete(self, req):
                observed.append(store.frozen)
                return super().complete(req)

        config = cfg(Probe([GOOD_F]), examples=store)
        run_eval([case("a", "count f calls", ManualLabel(True))], config)
        assert observed == [True]
        assert not store.frozen
        assert len(store) == 0

    def test_already_frozen_store_stays_frozen(self, tmp_path):
        store = ExampleStore(tmp_path / "ex.jsonl")
        store.freeze()
        config = cfg([GOOD_F], examples=store)
        run_eval([case("a", "count f calls", ManualLabel(True))], config)
        assert store.frozen

    def test_freeze_false_lets_sessions_record(self, tmp_path):
        store = ExampleStore(tmp_path / "ex.jsonl")
        config = cfg([GOOD_F], examples=store)
        run_eval([case("a", "count f calls", ManualLabel(True))], config, freeze=False)
        assert not store.frozen
        assert len(store) == 1

    def test_store_thawed_even_when_session_raises(self, tmp_path):
        from btsynth.llm import ScriptExhausted

        store = ExampleStore(tmp_path / "ex.jsonl")
        config = cfg([], examples=store)
        with pytest.raises(ScriptExhausted):
            run_eval([case("a", "p", ManualLabel(True))], config)
        assert not store.frozen

    def test_workers_two_matches_sequential(self):
        table = {"count f calls": GOOD_F, "count g calls": GOOD_G}
        cases = [
            case("one", "count f calls", ProbeMatch(("kprobe:f",))),
            case("two", "count g calls", ProbeMatch(("kprobe:g",))),
        ]
        sequential = run_eval(cases, cfg(KeyedBackend(table)), iterations=2)
        parallel = run_eval(cases, cfg(KeyedBackend(table)), iterations=2, workers=2)
        assert parallel.rows == sequential.rows
        assert parallel.metrics == sequential.metrics

    def test_report_file_shape(self, tmp_path):
        report = tmp_path / "report.json"
        cases = [case("a", "count f calls", ProbeMatch(("kprobe:f",)))]
        run_eval(cases, cfg([GOOD_F]), report_path=report)
        text = report.read_text(encoding="utf-8")
        assert text.endswith("\n")
        data = json.loads(text)
        assert data["summary"] == {
            "n": 1,
            "judge_errors": 0,
            "accuracy": "1",
            "fp": "0",
            "fn": "0",
        }
        assert data["rows"] == [
            {
                "id": "a",
                "iteration": 0,
                "classification": ACCURATE,
                "trial_count": 1,
                "messages": [],
            }
        ]

    def test_report_bytes_reproducible(self, tmp_path):
        cases = [
            case("ok", "count f calls", ProbeMatch(("kprobe:f",))),
            case("stuck", "other", ManualLabel(True)),
        ]

        def one_run(path):
            run_eval(cases, cfg([GOOD_F, "nope"], max_trials=1), report_path=path)
            return path.read_bytes()

        first = one_run(tmp_path / "r1.json")
        second = one_run(tmp_path / "r2.json")
        assert first == second


class TestFormatTable:
    def test_columns_align(self):
        rows = [
            EvalRow("tcp", 0, ACCURATE, 1, ()),
            EvalRow("longcase", 1, FALSE_NEGATIVE, 3, ("msg",)),
        ]
        assert format_table(rows) == (
            "case      iter  classification  trials\n"
            "tcp       0     accurate        1\n"
            "longcase  1     false_negative  3"
        )

    def test_single_row(self):
        table = format_table([EvalRow("a", 0, ACCURATE, 2, ())])
        lines = table.splitlines()
        assert lines[0].startswith("case")
        assert lines[1].split() == ["a", "0", "accurate", "2"]
