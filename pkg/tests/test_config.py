import json

import pytest

from btsynth.config import (
    DEFAULTS,
    ConfigError,
    build_llm,
    build_session,
    build_solver,
    load_config,
)
from btsynth.examplestore import ExampleStore
from btsynth.llm import HttpBackend, ReplayBackend, ScriptedBackend
from btsynth.symx import BitBlastBackend, EnumeratorBackend, ProcessBackend


def write_config(tmp_path, obj):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(obj), encoding="utf-8")
    return path


class TestLoadConfig:
    def test_no_file_gives_defaults(self):
        cfg = load_config(None)
        assert cfg == DEFAULTS

    def test_result_is_a_copy(self):
        cfg = load_config(None)
        cfg["session"]["max_trials"] = 99
        assert DEFAULTS["session"]["max_trials"] == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="config file not found"):
            load_config(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{oops", encoding="utf-8")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path)

    def test_partial_section_keeps_other_defaults(self, tmp_path):
        path = write_config(tmp_path, {"session": {"max_trials": 5}})
        cfg = load_config(path)
        assert cfg["session"]["max_trials"] == 5
        assert cfg["session"]["annotation"] == "llm"
        assert cfg["llm"]["backend"] == "http"

    def test_unknown_root_key(self, tmp_path):
        path = write_config(tmp_path, {"sesion": {}})
        with pytest.raises(ConfigError, match="unknown key 'sesion' under config root"):
            load_config(path)

    def test_unknown_nested_key_names_path(self, tmp_path):
        path = write_config(tmp_path, {"llm": {"endpont": "x"}})
        with pytest.raises(ConfigError, match="unknown key 'endpont' under llm"):
            load_config(path)

    def test_root_must_be_object(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError, match="config must be an object"):
            load_config(path)

    def test_section_must_be_object(self, tmp_path):
        path = write_config(tmp_path, {"session": 3})
        with pytest.raises(ConfigError, match="session must be an object"):
            load_config(path)

    @pytest.mark.parametrize(
        "obj,fragment",
        [
            ({"session": {"max_trials": "three"}}, "session.max_trials must be a number"),
            ({"session": {"max_trials": True}}, "session.max_trials must be a number"),
            ({"llm": {"model": 7}}, "llm.model must be a string"),
            ({"contracts": 1}, "contracts must be a string"),
        ],
    )
    def test_scalar_type_checks(self, tmp_path, obj, fragment):
        with pytest.raises(ConfigError, match=fragment):
            load_config(write_config(tmp_path, obj))

    def test_float_accepts_int(self, tmp_path):
        path = write_config(tmp_path, {"session": {"verify_budget": 10}})
        assert load_config(path)["session"]["verify_budget"] == 10

    def test_comprehension_llm_defaults_to_none(self):
        assert load_config(None)["comprehension_llm"] is None

    def test_comprehension_llm_merges_against_llm_defaults(self, tmp_path):
        path = write_config(tmp_path, {"comprehension_llm": {"model": "small"}})
        cfg = load_config(path)
        assert cfg["comprehension_llm"]["model"] == "small"
        assert cfg["comprehension_llm"]["backend"] == "http"

    def test_comprehension_llm_rejects_unknown_keys(self, tmp_path):
        path = write_config(tmp_path, {"comprehension_llm": {"modle": "x"}})
        with pytest.raises(ConfigError, match="under comprehension_llm"):
            load_config(path)


class TestBuildLlm:
    def test_http_backend(self):
        section = dict(load_config(None)["llm"])
        section["endpoint"] = "http://example.test/v1/chat/completions/"
        backend = build_llm(section)
        assert isinstance(backend, HttpBackend)
        assert backend.endpoint == "http://example.test/v1/chat/completions"
        assert backend.model == "default"

    def test_replay_backend(self, tmp_path):
        section = dict(load_config(None)["llm"])
        section["backend"] = "replay"
        section["replay_dir"] = str(tmp_path)
        assert isinstance(build_llm(section), ReplayBackend)

    def test_replay_needs_dir(self):
        section = dict(load_config(None)["llm"])
        section["backend"] = "replay"
        with pytest.raises(ConfigError, match="replay_dir"):
            build_llm(section)

    def test_scripted_backend(self, tmp_path):
        responses = tmp_path / "responses.json"
        responses.write_text(json.dumps(["a", "b"]), encoding="utf-8")
        section = dict(load_config(None)["llm"])
        section["backend"] = "scripted"
        section["responses_file"] = str(responses)
        backend = build_llm(section)
        assert isinstance(backend, ScriptedBackend)
        assert backend.responses == ["a", "b"]

    def test_scripted_needs_file(self):
        section = dict(load_config(None)["llm"])
        section["backend"] = "scripted"
        with pytest.raises(ConfigError, match="responses_file"):
            build_llm(section)

    def test_scripted_file_missing(self, tmp_path):
        section = dict(load_config(None)["llm"])
        section["backend"] = "scripted"
        section["responses_file"] = str(tmp_path / "nope.json")
        with pytest.raises(ConfigError, match="cannot read responses file"):
            build_llm(section)

    @pytest.mark.parametrize("payload", ['{"a": 1}', "[1, 2]", '"just a string"'])
    def test_scripted_file_must_be_string_list(self, tmp_path, payload):
        responses = tmp_path / "responses.json"
        responses.write_text(payload, encoding="utf-8")
        section = dict(load_config(None)["llm"])
        section["backend"] = "scripted"
        section["responses_file"] = str(responses)
        with pytest.raises(ConfigError, match="list of strings"):
            build_llm(section)

    def test_record_dir_wraps_backend(self, tmp_path):
        responses = tmp_path / "responses.json"
        responses.write_text(json.dumps(["a"]), encoding="utf-8")
        section = dict(load_config(None)["llm"])
        section["backend"] = "scripted"
        section["responses_file"] = str(responses)
        section["record_dir"] = str(tmp_path / "recorded")
        backend = build_llm(section)
        assert backend.backend_id == "recording:scripted"

    def test_unknown_backend(self):
        section = dict(load_config(None)["llm"])
        section["backend"] = "psychic"
        with pytest.raises(ConfigError, match="unknown llm backend 'psychic'"):
            build_llm(section)


class TestBuildSolver:
    def test_bitblast(self):
        assert isinstance(build_solver(load_config(None)["solver"]), BitBlastBackend)

    def test_enumerator_kernel_defaults_to_auto(self):
        section = dict(load_config(None)["solver"])
        section["backend"] = "enumerator"
        backend = build_solver(section)
        assert isinstance(backend, EnumeratorBackend)
        assert backend.kernel == "auto"

    def test_enumerator_kernel_passthrough(self):
        section = dict(load_config(None)["solver"])
        section["backend"] = "enumerator"
        section["kernel"] = "numpy"
        assert build_solver(section).kernel == "numpy"

    def test_process_splits_command(self):
        section = dict(load_config(None)["solver"])
        section["backend"] = "process"
        section["command"] = 'solver --flag "a b"'
        backend = build_solver(section)
        assert isinstance(backend, ProcessBackend)
        assert backend.command == ["solver", "--flag", "a b"]

    def test_process_needs_command(self):
        section = dict(load_config(None)["solver"])
        section["backend"] = "process"
        with pytest.raises(ConfigError, match="solver.command"):
            build_solver(section)

    def test_unknown_solver(self):
        section = dict(load_config(None)["solver"])
        section["backend"] = "quantum"
        with pytest.raises(ConfigError, match="unknown solver backend"):
            build_solver(section)


class TestBuildSession:
    def test_defaults(self):
        session = build_session(load_config(None))
        assert session.max_trials == 3
        assert session.k_examples == 3
        assert session.annotation == "llm"
        assert session.examples is None
        assert isinstance(session.synthesis_llm, HttpBackend)
        assert session.comprehension_llm is session.synthesis_llm
        assert isinstance(session.solver, BitBlastBackend)
        assert len(session.contracts) == 0

    def test_overrides(self):
        session = build_session(
            load_config(None), max_trials=5, annotation="direct", k_examples=1
        )
        assert session.max_trials == 5
        assert session.annotation == "direct"
        assert session.k_examples == 1

    def test_unknown_override(self):
        with pytest.raises(ConfigError, match="unknown override 'retries'"):
            build_session(load_config(None), retries=2)

    def test_contracts_path_loaded(self, tmp_path):
        path = tmp_path / "contracts.json"
        path.write_text('{"kprobe:f": {"pre": {"arg0": "!=0"}}}', encoding="utf-8")
        session = build_session(load_config(None), contracts_path=str(path))
        assert len(session.contracts) == 1

    def test_contracts_path_missing(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read contracts"):
            build_session(load_config(None), contracts_path=str(tmp_path / "nope.json"))

    def test_examples_path_opens_store(self, tmp_path):
        session = build_session(
            load_config(None), examples_path=str(tmp_path / "ex.jsonl")
        )
        assert isinstance(session.examples, ExampleStore)
        assert len(session.examples) == 0

    def test_separate_comprehension_backend(self, tmp_path):
        cfg = load_config(
            write_config(tmp_path, {"comprehension_llm": {"model": "small"}})
        )
        session = build_session(cfg)
        assert session.comprehension_llm is not session.synthesis_llm
        assert session.comprehension_llm.model == "small"

    def test_types_file(self, tmp_path):
        types = tmp_path / "types.json"
        types.write_text(
            json.dumps({"sock.state": {"width": 8, "signed": False}}), encoding="utf-8"
        )
        cfg = load_config(write_config(tmp_path, {"types": str(types)}))
        session = build_session(cfg)
        assert session.types.lookup("sock.state").width == 8

    def test_safety_overrides(self):
        session = build_session(
            load_config(None), safety_mode="external", safety_command="mytool {file}"
        )
        assert session.safety_mode == "external"
        assert session.safety_command == "mytool {file}"

    def test_bad_session_values_become_config_errors(self, tmp_path):
        cfg = load_config(write_config(tmp_path, {"session": {"max_trials": 0}}))
        with pytest.raises(ConfigError):
            build_session(cfg)

    def test_bad_annotation_becomes_config_error(self, tmp_path):
        cfg = load_config(write_config(tmp_path, {"session": {"annotation": "magic"}}))
        with pytest.raises(ConfigError):
            build_session(cfg)
