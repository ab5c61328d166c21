"""File-backed configuration with strict key checking.

A config file is a single JSON object. Every key has a default; unknown
keys anywhere in the tree are rejected so typos fail loudly instead of
silently running with defaults. Factories turn the merged config plus
command-line overrides into live backends, stores, and a SessionConfig.
"""

from __future__ import annotations

import json
from pathlib import Path

from .contracts import ContractStore, load as load_contracts
from .examplestore import ExampleStore
from .llm import HttpBackend, RecordingBackend, ReplayBackend, ScriptedBackend
from .orchestrator import SessionConfig
from .symx import (
    BitBlastBackend,
    EnumeratorBackend,
    KernelTypeMap,
    ProcessBackend,
)


class ConfigError(Exception):
    pass


DEFAULTS = {
    "llm": {
        "backend": "http",
        "endpoint": "http://localhost:8000/v1/chat/completions",
        "api_key_env": "BTSYNTH_API_KEY",
        "model": "default",
        "replay_dir": "",
        "responses_file": "",
        "record_dir": "",
    },
    "comprehension_llm": None,
    "contracts": "",
    "examples": "",
    "comp_examples": "",
    "types": "",
    "session": {
        "max_trials": 3,
        "verify_budget": 30.0,
        "k_examples": 3,
        "framework": "bpftrace",
        "annotation": "llm",
    },
    "safety": {
        "mode": "builtin",
        "command": "",
    },
    "solver": {
        "backend": "bitblast",
        "command": "",
        "kernel": "auto",
    },
}


def _merge(defaults, given, path: str):
    if isinstance(defaults, dict):
        if not isinstance(given, dict):
            raise ConfigError(f"{path or 'config'} must be an object")
        unknown = set(given) - set(defaults)
        if unknown:
            raise ConfigError(
                f"unknown key {sorted(unknown)[0]!r} under {path or 'config root'}"
            )
        merged = {}
        for key, dval in defaults.items():
            sub = f"{path}.{key}" if path else key
            if key in given:
                if dval is None and key == "comprehension_llm":
                    merged[key] = _merge(DEFAULTS["llm"], given[key], sub)
                else:
                    merged[key] = _merge(dval, given[key], sub)
            else:
                merged[key] = json.loads(json.dumps(dval)) if dval is not None else None
        return merged
    if defaults is None:
        return given
    if isinstance(defaults, bool) and not isinstance(given, bool):
        raise ConfigError(f"{path} must be a boolean")
    if isinstance(defaults, (int, float)) and not isinstance(defaults, bool):
        if isinstance(given, bool) or not isinstance(given, (int, float)):
            raise ConfigError(f"{path} must be a number")
        return given
    if isinstance(defaults, str) and not isinstance(given, str):
        raise ConfigError(f"{path} must be a string")
    return given


def load_config(path=None) -> dict:
    if path is None:
        return _merge(DEFAULTS, {}, "")
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    return _merge(DEFAULTS, obj, "")


def _scripted_responses(path: str) -> list[str]:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read responses file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"responses file is not valid JSON: {exc}") from exc
    if not isinstance(obj, list) or not all(isinstance(s, str) for s in obj):
        raise ConfigError("responses file must hold a JSON list of strings")
    return obj


def build_llm(section: dict):
    kind = section["backend"]
    if kind == "http":
        backend = HttpBackend(
            section["endpoint"],
            api_key_env=section["api_key_env"],
            model=section["model"],
        )
    elif kind == "replay":
        if not section["replay_dir"]:
            raise ConfigError("replay backend needs llm.replay_dir")
        backend = ReplayBackend(section["replay_dir"])
    elif kind == "scripted":
        if not section["responses_file"]:
            raise ConfigError("scripted backend needs llm.responses_file")
        backend = ScriptedBackend(_scripted_responses(section["responses_file"]))
    else:
        raise ConfigError(f"unknown llm backend {kind!r}")
    if section["record_dir"]:
        backend = RecordingBackend(backend, section["record_dir"])
    return backend


def build_solver(section: dict):
    kind = section["backend"]
    if kind == "bitblast":
        return BitBlastBackend()
    if kind == "enumerator":
        return EnumeratorBackend(kernel=section["kernel"] or "auto")
    if kind == "process":
        if not section["command"]:
            raise ConfigError("process solver needs solver.command")
        import shlex

        return ProcessBackend(shlex.split(section["command"]))
    raise ConfigError(f"unknown solver backend {kind!r}")


def build_session(config: dict, **overrides) -> SessionConfig:
    for key in overrides:
        if key not in (
            "max_trials",
            "verify_budget",
            "k_examples",
            "annotation",
            "safety_mode",
            "safety_command",
            "contracts_path",
            "examples_path",
        ):
            raise ConfigError(f"unknown override {key!r}")

    session = config["session"]
    safety = config["safety"]

    contracts_path = overrides.get("contracts_path") or config["contracts"]
    if contracts_path:
        try:
            contracts = load_contracts(contracts_path)
        except OSError as exc:
            raise ConfigError(f"cannot read contracts: {exc}") from exc
    else:
        contracts = ContractStore()

    examples_path = overrides.get("examples_path") or config["examples"]
    examples = ExampleStore(examples_path) if examples_path else None
    comp_examples = (
        ExampleStore(config["comp_examples"]) if config["comp_examples"] else None
    )
    types = KernelTypeMap.from_file(config["types"]) if config["types"] else None

    synthesis_llm = build_llm(config["llm"])
    comp_section = config["comprehension_llm"]
    comprehension_llm = build_llm(comp_section) if comp_section else None

    safety_mode = overrides.get("safety_mode") or safety["mode"]
    safety_command = overrides.get("safety_command") or (safety["command"] or None)

    try:
        return SessionConfig(
            synthesis_llm=synthesis_llm,
            comprehension_llm=comprehension_llm,
            contracts=contracts,
            examples=examples,
            comp_examples=comp_examples,
            max_trials=int(overrides.get("max_trials") or session["max_trials"]),
            verify_budget=float(
                overrides.get("verify_budget") or session["verify_budget"]
            ),
            k_examples=int(overrides.get("k_examples") or session["k_examples"]),
            framework=session["framework"],
            annotation=overrides.get("annotation") or session["annotation"],
            types=types,
            safety_mode=safety_mode,
            safety_command=safety_command,
            solver=build_solver(config["solver"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
