"""Prompt construction for levels A-E.

Levels are cumulative: A carries the method name/signature/body, B adds a
code summary, C adds input-output descriptions, D adds summaries of
invoked in-repo methods, and E prepends few-shot user/assistant example
pairs picked by cosine similarity. The final user message always carries
the candidate method; the system text carries the output-format contract
shared with the postprocessor.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .corpus import Corpus, MethodRecord
from .javasrc.lexer import IDENT, KEYWORD, tokenize
from .llm import LLMClient, ModelConfig, get_tokenizer
from .preprocess import PrunedMethod, prune
from .similarity import MethodVector

LEVELS = ("A", "B", "C", "D", "E")

SELF_SUMMARY = "self"
DEP_SUMMARY = "dependency"
IO_SUMMARY = "io"

_SUMMARY_SYSTEM = (
    "You are an expert Java developer. Summarize what the given method does "
    "in two or three plain sentences. Reply with the summary only."
)


class MissingContextError(ValueError):
    def __init__(self, piece: str):
        super().__init__(f"missing required prompt context: {piece}")
        self.piece = piece


class OverBudgetError(RuntimeError):
    def __init__(self, token_count: int, limit: int):
        super().__init__(
            f"prompt of {token_count} tokens exceeds budget {limit} with no "
            "few-shot examples left to drop"
        )
        self.token_count = token_count
        self.limit = limit


def system_instruction() -> str:
    return resources.files("assertify.assets").joinpath(
        "system_instruction.txt"
    ).read_text(encoding="utf-8")


@dataclass
class PromptBundle:
    level: str
    system_text: str
    messages: list[tuple[str, str]]  # (role, text); ends with a user message
    token_count: int
    examples_used: list[str]  # FSL record ids, descending similarity
    tokenizer_name: str = "fallback"

    def final_user_text(self) -> str:
        return self.messages[-1][1]


# -- summary cache -----------------------------------------------------------


@dataclass
class SummaryCache:
    entries: dict[tuple[str, str], str] = field(default_factory=dict)
    path: Path | None = None
    hits: int = 0
    misses: int = 0

    @classmethod
    def load(cls, path: str | Path) -> "SummaryCache":
        path = Path(path)
        cache = cls(path=path)
        if path.exists():
            with path.open(encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if not line:
                        continue
                    e = json.loads(line)
                    cache.entries[(e["method_id"], e["kind"])] = e["summary"]
        return cache

    def get(self, method_id: str, kind: str) -> str | None:
        return self.entries.get((method_id, kind))

    def put(self, method_id: str, kind: str, summary: str) -> None:
        self.entries[(method_id, kind)] = summary
        if self.path is not None:
            with self.path.open("a", encoding="utf-8") as f:
                f.write(
                    json.dumps(
                        {"method_id": method_id, "kind": kind, "summary": summary},
                        ensure_ascii=False,
                    )
                    + "\n"
                )


def summarize_method(
    method_id: str,
    method_text: str,
    signature: str,
    client: LLMClient,
    cache: SummaryCache,
    kind: str = SELF_SUMMARY,
) -> str:
    """LLM summary of one method; cache hits never touch the backend."""
    if not method_text.strip():
        raise ValueError(f"method {method_id} has empty text")
    cached = cache.get(method_id, kind)
    if cached is not None:
        cache.hits += 1
        return cached
    cache.misses += 1
    user = f"Signature: {signature}\n\nMethod:\n{method_text}"
    result = client.infer(_SUMMARY_SYSTEM, [("user", user)])
    summary = result.raw_text.strip()
    cache.put(method_id, kind, summary)
    return summary


# -- dependency extraction ---------------------------------------------------


def _called_names(body_text: str) -> list[str]:
    """Simple names of invoked methods, in first-call-site order."""
    try:
        toks = tokenize(body_text)
    except Exception:
        return []
    names: list[str] = []
    seen: set[str] = set()
    for i, t in enumerate(toks):
        if t.kind != IDENT or i + 1 >= len(toks) or toks[i + 1].text != "(":
            continue
        if i > 0 and toks[i - 1].kind == KEYWORD and toks[i - 1].text == "new":
            continue  # constructor call
        if t.text not in seen:
            seen.add(t.text)
            names.append(t.text)
    return names


def extract_dependencies(method: MethodRecord, corpus: Corpus) -> list[MethodRecord]:
    """Corpus records of in-repo methods the candidate invokes."""
    by_name: dict[str, list[MethodRecord]] = {}
    for m in corpus.methods:
        if m.repo_id == method.repo_id and m.record_id != method.record_id:
            by_name.setdefault(m.method_name, []).append(m)
    out: list[MethodRecord] = []
    for name in _called_names(method.body_text):
        candidates = by_name.get(name)
        if not candidates:
            continue  # externally defined / unresolvable
        same_class = [c for c in candidates if c.class_fqn == method.class_fqn]
        out.append(same_class[0] if same_class else candidates[0])
    return out


# -- I/O description ---------------------------------------------------------


def describe_io(method: MethodRecord, elaboration: str | None = None) -> str:
    """Deterministic parameter/return description from the signature."""
    lines = []
    if method.parameters:
        lines.append("Inputs:")
        for name, ptype in method.parameters:
            lines.append(f"  - {name}: {ptype}")
    else:
        lines.append("Inputs: none")
    ret = method.return_type if method.return_type else "(constructor)"
    lines.append(f"Output: {ret}")
    if elaboration:
        lines.append(f"Description: {elaboration}")
    return "\n".join(lines)


# -- few-shot rendering ------------------------------------------------------


def assertion_insertion_line(pruned: PrunedMethod, original_line: int) -> int:
    """Pruned-coordinate line at which a removed assertion re-inserts
    (the assertion becomes that line, pushing current lines down)."""
    for i, orig in enumerate(pruned.line_map):
        if orig > original_line:
            return i + 1
    return pruned.line_count  # before the closing brace


def expected_output_for(example: MethodRecord, pruned: PrunedMethod) -> str:
    """The example's developer assertions rendered in the reply format."""
    pairs = [
        {"line": assertion_insertion_line(pruned, a.line), "assertion": " ".join(a.text.split())}
        for a in example.assertions
    ]
    return "```json\n" + json.dumps(pairs, ensure_ascii=False) + "\n```"


# -- prompt assembly ---------------------------------------------------------


def _method_block(method: MethodRecord, pruned: PrunedMethod) -> str:
    return (
        f"Method name: {method.method_name}\n"
        f"Signature: {method.signature}\n"
        "Method (line numbers start at 1):\n"
        f"{pruned.text}"
    )


def _context_text(
    level: str,
    method: MethodRecord,
    pruned: PrunedMethod,
    self_summary: str | None,
    io_description: str | None,
    dep_summaries: list[tuple[str, str]] | None,
) -> str:
    parts = [_method_block(method, pruned)]
    if level >= "B":
        if self_summary is None:
            raise MissingContextError("code summary (level B)")
        parts.append(f"Code summary:\n{self_summary}")
    if level >= "C":
        if io_description is None:
            raise MissingContextError("input-output description (level C)")
        parts.append(f"Input-output description:\n{io_description}")
    if level >= "D":
        if dep_summaries is None:
            raise MissingContextError("dependency summaries (level D)")
        if dep_summaries:
            dep_lines = [
                f"  - {name}: {summary}" for name, summary in dep_summaries
            ]
            parts.append("Invoked dependencies:\n" + "\n".join(dep_lines))
        else:
            parts.append("Invoked dependencies: none")
    return "\n\n".join(parts)


@dataclass
class FewShotExample:
    record_id: str
    similarity: float
    method: MethodRecord
    pruned: PrunedMethod


def build_prompt(
    level: str,
    method: MethodRecord,
    pruned: PrunedMethod,
    model: ModelConfig,
    self_summary: str | None = None,
    io_description: str | None = None,
    dep_summaries: list[tuple[str, str]] | None = None,
    examples: list[FewShotExample] | None = None,
) -> PromptBundle:
    """Assemble the chat message sequence for one prompt level."""
    if level not in LEVELS:
        raise ValueError(f"unknown prompt level: {level}")
    system_text = system_instruction()
    final_user = _context_text(
        level, method, pruned, self_summary, io_description, dep_summaries
    )
    messages: list[tuple[str, str]] = []
    used: list[str] = []
    if level == "E":
        if examples is None:
            raise MissingContextError("few-shot examples (level E)")
        for ex in examples:
            ex_text = _method_block(ex.method, ex.pruned)
            messages.append(("user", ex_text))
            messages.append(("assistant", expected_output_for(ex.method, ex.pruned)))
            used.append(ex.record_id)
    messages.append(("user", final_user))
    name, counter = get_tokenizer(model.tokenizer)
    token_count = counter(system_text) + sum(counter(t) for _, t in messages)
    return PromptBundle(
        level=level,
        system_text=system_text,
        messages=messages,
        token_count=token_count,
        examples_used=used,
        tokenizer_name=name,
    )


def enforce_budget(bundle: PromptBundle, model: ModelConfig) -> PromptBundle:
    """Drop least-similar examples until the prompt plus response reserve
    fits the model's context limit."""
    name, counter = get_tokenizer(model.tokenizer)
    limit = model.context_limit - model.response_reserve
    messages = list(bundle.messages)
    used = list(bundle.examples_used)

    def count() -> int:
        return counter(bundle.system_text) + sum(counter(t) for _, t in messages)

    total = count()
    while total > limit and used:
        # examples precede the final user message as (user, assistant) pairs,
        # ordered by descending similarity: the last pair is least similar.
        del messages[2 * len(used) - 2 : 2 * len(used)]
        used.pop()
        total = count()
    if total > limit:
        raise OverBudgetError(total, limit)
    return PromptBundle(
        level=bundle.level,
        system_text=bundle.system_text,
        messages=messages,
        token_count=total,
        examples_used=used,
        tokenizer_name=name,
    )


# -- convenience: full context for one candidate -----------------------------


def prepare_examples(
    method: MethodRecord,
    corpus: Corpus,
    k: int = 3,
    threshold: float = 0.5,
) -> list[FewShotExample]:
    """Similarity-ranked few-shot examples from the FSL pool."""
    from .similarity import select_similar

    fsl_records = corpus.labeled("FSL")
    candidate_vec = MethodVector.from_text(method.body_text)
    fsl_vecs = [
        (m.record_id, MethodVector.from_text(m.body_text)) for m in fsl_records
    ]
    ranked = select_similar(candidate_vec, fsl_vecs, k=k, threshold=threshold)
    by_id = corpus.by_id()
    out = []
    for rid, sim in ranked:
        rec = by_id[rid]
        out.append(
            FewShotExample(
                record_id=rid, similarity=sim, method=rec, pruned=prune(rec)
            )
        )
    return out
