"""Command-line front end.

Subcommands: synthesize, verify, annotate, build-contracts, eval, and
examples store management. stdout carries artifacts only (programs,
verdict reports, tables); diagnostics go to stderr. Every command is
non-interactive when stdin is not a terminal.

Exit codes: 0 success, 1 configuration or parse error, 2 synthesis
failure (gave up), 3 backend or IO error, 4 assertion violation
(verify), 5 verification timeout (verify).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import config as config_mod
from .comprehension import (
    AlreadyAnnotated,
    AnnotationParseError,
    StructureViolated,
    annotate as llm_annotate,
    direct_annotate,
)
from .config import ConfigError
from .contracts import ContractStore, SchemaError, build_dataset, load as load_contracts
from .evalharness import DatasetError, format_table, load_cases, run_eval
from .examplestore import ExampleStore
from .lang import ParseError, has_annotations, parse, render
from .llm import HttpError, LlmError, ReplayMiss, ScriptExhausted
from .orchestrator import NeedsUserInfo, Success, run_session
from .safety import ExternalToolMissing
from .symx import KernelTypeMap, verify as symx_verify

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SYNTH = 2
EXIT_BACKEND = 3
EXIT_VIOLATION = 4
EXIT_TIMEOUT = 5

_BACKEND_ERRORS = (HttpError, ReplayMiss, ScriptExhausted, ExternalToolMissing, OSError)


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _session_overrides(args) -> dict:
    overrides = {}
    if getattr(args, "max_trials", None) is not None:
        overrides["max_trials"] = args.max_trials
    if getattr(args, "budget_seconds", None) is not None:
        overrides["verify_budget"] = args.budget_seconds
    if getattr(args, "k", None) is not None:
        overrides["k_examples"] = args.k
    if getattr(args, "annotation", None) is not None:
        overrides["annotation"] = args.annotation
    if getattr(args, "safety_mode", None) is not None:
        overrides["safety_mode"] = args.safety_mode
    if getattr(args, "contracts", None):
        overrides["contracts_path"] = args.contracts
    if getattr(args, "examples", None):
        overrides["examples_path"] = args.examples
    return overrides


def _load_merged_config(args) -> dict:
    cfg = config_mod.load_config(getattr(args, "config", None))
    if getattr(args, "replay", None):
        cfg["llm"]["backend"] = "replay"
        cfg["llm"]["replay_dir"] = args.replay
    if getattr(args, "scripted", None):
        cfg["llm"]["backend"] = "scripted"
        cfg["llm"]["responses_file"] = args.scripted
    if getattr(args, "backend", None):
        cfg["llm"]["backend"] = args.backend
    return cfg


def _read_prompt(args) -> str:
    if args.prompt:
        return args.prompt
    data = sys.stdin.read()
    if not data.strip():
        raise ConfigError("no prompt given and stdin is empty")
    return data.strip()


def cmd_synthesize(args) -> int:
    try:
        cfg = _load_merged_config(args)
        session = config_mod.build_session(cfg, **_session_overrides(args))
        request = _read_prompt(args)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG

    try:
        result = run_session(request, session)
        if isinstance(result.status, NeedsUserInfo) and sys.stdin.isatty():
            print(
                "The request needs more information to synthesize a program.",
                file=sys.stderr,
            )
            extra = input("Additional information: ").strip()
            if extra:
                request = f"{request}\nAdditional information: {extra}"
                result = run_session(request, session)
    except _BACKEND_ERRORS as exc:
        _err(str(exc))
        return EXIT_BACKEND

    if isinstance(result.status, Success):
        sys.stdout.write(render(result.status.program))
        print(
            f"synthesized in {result.status.trial_count} trial(s)", file=sys.stderr
        )
        return EXIT_OK
    for fb in result.status.history:
        print(f"[trial {fb.trial_index}, {fb.stage}] {fb.message}", file=sys.stderr)
    _err("gave up: the request needs more information")
    return EXIT_SYNTH


def _print_verdict(verdict) -> None:
    if verdict.kind == "verified":
        print("Verified")
        return
    print(verdict.message)
    if verdict.kind == "assert_violation" and verdict.counterexample:
        for name in sorted(verdict.counterexample):
            print(f"  {name} = {verdict.counterexample[name]}")


def cmd_verify(args) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        _err(str(exc))
        return EXIT_BACKEND
    try:
        program = parse(text)
    except ParseError as exc:
        _err(f"parse error: {exc}")
        return EXIT_CONFIG

    try:
        contracts = (
            load_contracts(args.contracts) if args.contracts else ContractStore()
        )
        types = KernelTypeMap.from_file(args.types) if args.types else None
    except OSError as exc:
        _err(str(exc))
        return EXIT_BACKEND
    except (SchemaError, ValueError) as exc:
        _err(str(exc))
        return EXIT_CONFIG

    if not has_annotations(program):
        program = direct_annotate(program, contracts).program
    elif args.direct_annotate:
        _err("file already contains assume/assert statements")
        return EXIT_CONFIG

    verdict = symx_verify(program, types=types, budget=args.budget_seconds or 30.0)
    _print_verdict(verdict)
    if verdict.kind == "verified":
        return EXIT_OK
    if verdict.kind == "assert_violation":
        return EXIT_VIOLATION
    if verdict.kind == "timeout":
        return EXIT_TIMEOUT
    return EXIT_BACKEND


def cmd_annotate(args) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
        program = parse(text)
    except OSError as exc:
        _err(str(exc))
        return EXIT_BACKEND
    except ParseError as exc:
        _err(f"parse error: {exc}")
        return EXIT_CONFIG

    try:
        contracts = (
            load_contracts(args.contracts) if args.contracts else ContractStore()
        )
        if args.direct:
            annotated = direct_annotate(program, contracts)
        else:
            cfg = _load_merged_config(args)
            session = config_mod.build_session(cfg)
            annotated = llm_annotate(
                program,
                args.request or "",
                contracts,
                session.comprehension_llm,
                session.comp_examples,
            )
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except (AnnotationParseError, StructureViolated, AlreadyAnnotated) as exc:
        _err(str(exc))
        return EXIT_SYNTH
    except _BACKEND_ERRORS as exc:
        _err(str(exc))
        return EXIT_BACKEND

    sys.stdout.write(render(annotated.program))
    return EXIT_OK


def cmd_build_contracts(args) -> int:
    try:
        cfg = _load_merged_config(args)
        llm = config_mod.build_llm(cfg["llm"])
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    try:
        store, report = build_dataset(args.corpus, args.out, llm)
    except _BACKEND_ERRORS as exc:
        _err(str(exc))
        return EXIT_BACKEND
    print(
        f"scanned {report.functions_found} function(s), "
        f"built {report.contracts_built} contract(s), "
        f"{len(report.malformed)} malformed",
        file=sys.stderr,
    )
    for name, reason in report.malformed:
        print(f"  skipped {name}: {reason}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        cfg = _load_merged_config(args)
        session = config_mod.build_session(cfg, **_session_overrides(args))
        cases = load_cases(args.dataset)
    except (ConfigError, DatasetError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except OSError as exc:
        _err(str(exc))
        return EXIT_BACKEND

    try:
        result = run_eval(
            cases,
            session,
            iterations=args.iterations,
            workers=args.workers,
            freeze=not args.no_freeze,
            report_path=args.report,
        )
    except _BACKEND_ERRORS as exc:
        _err(str(exc))
        return EXIT_BACKEND
    except (DatasetError, ValueError) as exc:
        _err(str(exc))
        return EXIT_CONFIG

    print(format_table(result.rows))
    m = result.metrics
    print(
        f"n={m.n} accuracy={float(m.accuracy):.3f} "
        f"fp={float(m.fp):.3f} fn={float(m.fn):.3f} "
        f"judge_errors={result.judge_errors}"
    )
    return EXIT_OK


def _examples_store(args) -> ExampleStore:
    path = args.store or config_mod.load_config(getattr(args, "config", None))["examples"]
    if not path:
        raise ConfigError("no example store path given (use --store or config)")
    return ExampleStore(path)


def cmd_examples(args) -> int:
    try:
        store = _examples_store(args)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG

    if args.action == "add":
        try:
            program = Path(args.program_file).read_text(encoding="utf-8")
        except OSError as exc:
            _err(str(exc))
            return EXIT_BACKEND
        rec = store.new_record(
            args.prompt, program, framework=args.framework, outcome=args.outcome
        )
        if not store.add(rec):
            _err("store is frozen; nothing added")
            return EXIT_CONFIG
        print(rec.id)
        return EXIT_OK
    if args.action == "query":
        for rec in store.query(args.prompt, k=args.k, include_failures=args.failures):
            print(f"{rec.id}\t{rec.outcome}\t{rec.prompt}")
        return EXIT_OK
    if args.action == "freeze":
        store.freeze(persist=args.persist)
        print(f"frozen ({len(store)} record(s))", file=sys.stderr)
        return EXIT_OK
    if args.action == "clear":
        store.clear()
        print("cleared", file=sys.stderr)
        return EXIT_OK
    _err(f"unknown action {args.action!r}")
    return EXIT_CONFIG


def _add_session_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-trials", type=int, default=None)
    p.add_argument("--budget-seconds", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--annotation", choices=("llm", "direct"), default=None)
    p.add_argument("--safety-mode", choices=("builtin", "external"), default=None)
    p.add_argument("--contracts", default=None)
    p.add_argument("--examples", default=None)


def _add_backend_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=("http", "replay", "scripted"), default=None)
    p.add_argument("--replay", metavar="DIR", default=None)
    p.add_argument("--scripted", metavar="FILE", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="btsynth",
        description="Synthesize and verify kernel tracing programs from English prompts.",
    )
    parser.add_argument("--config", default=None, help="JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="synthesize a program from a prompt")
    p.add_argument("prompt", nargs="?", default=None, help="request text (or stdin)")
    _add_backend_flags(p)
    _add_session_flags(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="verify a program's annotations")
    p.add_argument("file")
    p.add_argument("--contracts", default=None)
    p.add_argument("--types", default=None)
    p.add_argument("--budget-seconds", type=float, default=None)
    p.add_argument("--direct-annotate", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("annotate", help="add assume/assert statements to a program")
    p.add_argument("file")
    p.add_argument("--request", default="")
    p.add_argument("--contracts", default=None)
    p.add_argument("--direct", action="store_true", help="contract-only, no LLM")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("build-contracts", help="mine contracts from a source corpus")
    p.add_argument("corpus")
    p.add_argument("out")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_build_contracts)

    p = sub.add_parser("eval", help="run a labeled evaluation dataset")
    p.add_argument("dataset")
    p.add_argument("--report", default=None)
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-freeze", action="store_true")
    _add_backend_flags(p)
    _add_session_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("examples", help="manage the example store")
    p.add_argument("action", choices=("add", "query", "freeze", "clear"))
    p.add_argument("--store", default=None)
    p.add_argument("--prompt", default="")
    p.add_argument("--program-file", default=None)
    p.add_argument("--framework", default="bpftrace")
    p.add_argument("--outcome", default="curated")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--failures", action="store_true")
    p.add_argument("--persist", action="store_true")
    p.set_defaults(func=cmd_examples)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LlmError as exc:
        _err(str(exc))
        return EXIT_BACKEND
    except KeyboardInterrupt:
        _err("interrupted")
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
