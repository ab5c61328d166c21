"""Annotation of candidate programs with assume/assert conditions.

Two routes produce an AnnotatedProgram. annotate() asks an LLM, handing it
the candidate, the user's request, and the contract entries matched for
each probe; the reply must be the complete program with annotations added
and nothing else changed, which is enforced by stripping the reply and
comparing it structurally against the candidate. A bad reply gets one
silent retry before the error surfaces. direct_annotate() is the LLM-free
fallback: checkable contract pre-entries become assume statements at
clause entry and post-entries become trailing asserts.

Provenance: each assume is matched against the pre-entries of the looked-
up contracts and each assert against the post-entries; a hit tags the
annotation "contract", anything else is "prompt_inferred". Subjects in
contracts name bare kernel identifiers ("sk"), so a leading $ on the
program side is ignored when comparing.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import contracts as contracts_mod
from .contracts import Contract, ContractStore, lookup, parse_relation
from .lang import (
    Assert,
    Assume,
    Binary,
    BuiltinVar,
    FieldChain,
    IntLit,
    ParseError,
    ProbeClause,
    Program,
    ScratchVar,
    Unary,
    extract_probes,
    has_annotations,
    iter_annotations,
    parse,
    render,
    render_expr,
    stmt_exprs,
    strip_annotations,
    walk_exprs,
    walk_stmts,
)
from .llm import ChatRequest, complete, extract_code
from .prompts import COMPREHENSION_SYSTEM

CONTRACT = "contract"
PROMPT_INFERRED = "prompt_inferred"


class AnnotationParseError(Exception):
    pass


class StructureViolated(Exception):
    pass


class AlreadyAnnotated(Exception):
    pass


@dataclass
class AnnotatedProgram:
    program: Program
    provenance: tuple[tuple[object, str], ...]

    def tag_of(self, node) -> str | None:
        for candidate, tag in self.provenance:
            if candidate is node:
                return tag
        return None


def _matched_contracts(candidate: Program, store: ContractStore) -> list[Contract]:
    seen: dict[str, Contract] = {}
    for probe in extract_probes(candidate):
        for c in lookup(store, probe):
            seen.setdefault(c.probe_key, c)
    return list(seen.values())


def _rhs_literal(expr) -> int | None:
    if isinstance(expr, IntLit):
        return expr.value
    if isinstance(expr, Unary) and expr.op == "-" and isinstance(expr.operand, IntLit):
        return -expr.operand.value
    return None


def _literal_expr(value: int):
    if value < 0:
        return Unary("-", IntLit(-value))
    return IntLit(value)


def _condition_matches(cond, entry) -> bool:
    parsed = parse_relation(entry.relation)
    if parsed is None or not isinstance(cond, Binary):
        return False
    op, literal = parsed
    if cond.op != op or _rhs_literal(cond.rhs) != literal:
        return False
    lhs_text = render_expr(cond.lhs)
    return lhs_text == entry.subject or (
        lhs_text.startswith("$") and lhs_text[1:] == entry.subject
    )


def _tag_annotations(program: Program, matched: list[Contract]):
    entries = [e for c in matched for e in (*c.pre, *c.post)]
    provenance = []
    for node in iter_annotations(program):
        tag = (
            CONTRACT
            if any(_condition_matches(node.cond, e) for e in entries)
            else PROMPT_INFERRED
        )
        provenance.append((node, tag))
    return tuple(provenance)


def _contracts_json(matched: list[Contract]) -> str:
    view = ContractStore(entries={c.probe_key: c for c in matched})
    return contracts_mod.dumps(view)


def annotate(
    candidate: Program,
    user_request: str,
    store: ContractStore,
    llm,
    comp_store=None,
) -> AnnotatedProgram:
    if has_annotations(candidate):
        raise AlreadyAnnotated("candidate already contains assume/assert statements")
    candidate_text = render(candidate)
    matched = _matched_contracts(candidate, store)
    parts = [
        f"Request the program was written for: {user_request}",
        f"Program to annotate:\n```\n{candidate_text}\n```",
        f"Known conditions for the probed functions:\n{_contracts_json(matched)}",
    ]
    if comp_store is not None:
        for i, rec in enumerate(comp_store.query(candidate_text, k=2), 1):
            parts.append(
                f"Example annotation {i}:\nInput:\n```\n{rec.prompt}\n```\n"
                f"Output:\n```\n{rec.program}\n```"
            )
    req = ChatRequest(
        system=COMPREHENSION_SYSTEM,
        user="\n\n".join(parts),
        temperature=0.0,
    )
    last_error: Exception = AnnotationParseError("annotation never attempted")
    for _ in range(2):
        text = extract_code(complete(llm, req))
        try:
            annotated = parse(text)
        except ParseError as exc:
            last_error = AnnotationParseError(f"annotated reply does not parse: {exc}")
            continue
        if strip_annotations(annotated) != candidate:
            last_error = StructureViolated(
                "annotated reply does not preserve the candidate's statements"
            )
            continue
        if comp_store is not None and not comp_store.frozen:
            record = comp_store.new_record(candidate_text, render(annotated), outcome="success")
            try:
                comp_store.add(record)
            except Exception:
                pass
        return AnnotatedProgram(annotated, _tag_annotations(annotated, matched))
    raise last_error


def _scratch_names(clause: ProbeClause) -> set[str]:
    names = set()
    exprs = [clause.predicate] if clause.predicate is not None else []
    for s in walk_stmts(clause.body):
        exprs.extend(stmt_exprs(s))
    for e in exprs:
        for sub in walk_exprs(e):
            if isinstance(sub, ScratchVar):
                names.add(sub.name)
    return names


def _ground_subject(subject: str, clause: ProbeClause):
    parts = subject.split("->")
    base = parts[0].strip()
    if base.startswith("$"):
        base = base[1:]
    builtin_ok = base in ("tid", "pid", "comm", "retval") or (
        base.startswith("arg") and base[3:].isdigit()
    ) or base.startswith("args.")
    if base in _scratch_names(clause):
        root = ScratchVar(base)
    elif builtin_ok:
        root = BuiltinVar(base)
    else:
        return None
    if len(parts) == 1:
        return root
    return FieldChain(root, tuple(p.strip() for p in parts[1:]))


def direct_annotate(candidate: Program, store: ContractStore) -> AnnotatedProgram:
    if has_annotations(candidate):
        raise AlreadyAnnotated("candidate already contains assume/assert statements")
    new_clauses = []
    provenance = []
    for clause in candidate.clauses:
        best: Contract | None = None
        for probe in clause.attach_points:
            found = lookup(store, probe)
            if found:
                best = found[0]
                break
        assumes: list[Assume] = []
        asserts: list[Assert] = []
        if best is not None:
            for entry, bucket, node_type in (
                [(e, assumes, Assume) for e in best.pre]
                + [(e, asserts, Assert) for e in best.post]
            ):
                parsed = parse_relation(entry.relation)
                if parsed is None:
                    continue
                subject = _ground_subject(entry.subject, clause)
                if subject is None:
                    continue
                op, literal = parsed
                node = node_type(Binary(op, subject, _literal_expr(literal)))
                bucket.append(node)
                provenance.append((node, CONTRACT))
        new_clauses.append(
            ProbeClause(
                clause.attach_points,
                clause.predicate,
                tuple(assumes) + clause.body + tuple(asserts),
            )
        )
    return AnnotatedProgram(Program(tuple(new_clauses)), tuple(provenance))
