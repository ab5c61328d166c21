import pytest

from btsynth.examplestore import ExampleStore
from btsynth.lang import Program
from btsynth.llm import ScriptedBackend
from btsynth.synthesis import (
    FeedbackRecord,
    SynthesisParseError,
    SynthesisPrompt,
    build_prompt,
    synthesize,
)


class TestFeedbackRecord:
    def test_valid_stages(self):
        for stage in ("parse", "symexec", "safety_gate"):
            FeedbackRecord(stage, "msg", 0)

    def test_invalid(self):
        with pytest.raises(ValueError):
            FeedbackRecord("typecheck", "msg", 0)
        with pytest.raises(ValueError):
            FeedbackRecord("parse", "", 0)
        with pytest.raises(ValueError):
            FeedbackRecord("parse", "msg", -1)


class TestPromptRendering:
    def test_request_comes_first(self):
        p = SynthesisPrompt("sys", [], "trace tcp connects", [])
        assert p.render_user().startswith("trace tcp connects")

    def test_examples_labeled_and_fenced(self):
        p = SynthesisPrompt(
            "sys",
            [("count reads", "kprobe:vfs_read { @c = @c + 1; }")],
            "req",
            [],
        )
        text = p.render_user()
        assert "Example 1 of a correct request and program:" in text
        assert "Request: count reads" in text
        assert "```\nkprobe:vfs_read { @c = @c + 1; }\n```" in text

    def test_feedback_oldest_first_with_stage_labels(self):
        fb = [
            FeedbackRecord("symexec", "assert can fail", 0),
            FeedbackRecord("safety_gate", "unbounded loop", 1),
        ]
        p = SynthesisPrompt("sys", [], "req", fb)
        text = p.render_user()
        first = text.index("[trial 1, symexec] assert can fail")
        second = text.index("[trial 2, safety_gate] unbounded loop")
        assert first < second
        assert "oldest first" in text

    def test_no_feedback_section_when_clean(self):
        p = SynthesisPrompt("sys", [], "req", [])
        assert "Earlier attempts" not in p.render_user()

    def test_feedback_never_truncated(self):
        long_message = "x" * 20000
        p = SynthesisPrompt("sys", [], "req", [FeedbackRecord("parse", long_message, 0)])
        assert long_message in p.render_user()
        assert p.length > 20000


class TestBuildPrompt:
    def test_retrieves_k_examples(self, tmp_path):
        store = ExampleStore(tmp_path / "ex.jsonl")
        for i in range(4):
            store.add(store.new_record(f"prompt {i}", f"kprobe:f{i} {{ $x = 1; }}"))
        p = build_prompt("prompt", store, [], k=2)
        assert len(p.examples) == 2

    def test_no_store(self):
        p = build_prompt("req", None, [], k=3)
        assert p.examples == []

    def test_history_sorted_by_trial(self):
        history = [
            FeedbackRecord("safety_gate", "later", 2),
            FeedbackRecord("parse", "earlier", 0),
        ]
        p = build_prompt("req", None, history)
        assert [fb.trial_index for fb in p.feedback] == [0, 2]


class TestSynthesize:
    def test_parses_fenced_reply(self):
        llm = ScriptedBackend(["```\nkprobe:f { $x = 1; }\n```"])
        prog = synthesize(build_prompt("req", None, []), llm)
        assert isinstance(prog, Program)
        assert prog.clauses[0].attach_points[0].key == "kprobe:f"

    def test_unfenced_reply_accepted(self):
        llm = ScriptedBackend(["kprobe:f { $x = 1; }"])
        prog = synthesize(build_prompt("req", None, []), llm)
        assert isinstance(prog, Program)

    def test_unparseable_reply_raises(self):
        llm = ScriptedBackend(["this is prose, not a program"])
        with pytest.raises(SynthesisParseError) as err:
            synthesize(build_prompt("req", None, []), llm)
        assert "does not parse" in str(err.value)

    def test_temperature_and_model_forwarded(self):
        seen = {}

        class Spy:
            backend_id = "spy"

            def complete(self, req):
                seen["temperature"] = req.temperature
                seen["model"] = req.model
                from btsynth.llm import ChatResponse

                return ChatResponse("kprobe:f { $x = 1; }", "spy")

        synthesize(build_prompt("req", None, []), Spy(), temperature=0.7, model="m9")
        assert seen == {"temperature": 0.7, "model": "m9"}
