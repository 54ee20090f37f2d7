"""Evaluation: parse check, repository compile check, ROUGE-L, strength.

ROUGE-L treats the developer-written assertions as the reference document
and the generated ones as the candidate document, both rendered as Java
lexical token streams; the overlap is LCS length. The compile check is
compiler-agnostic: it runs a configured build command and classifies
failures by matching diagnostics against a pattern table.
"""

from __future__ import annotations

import json
import re
import subprocess
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ._kernels import lcs_length
from .javasrc.lexer import lex_tokens_loose
from .javasrc.syntax import validate_method_text

WEAKER = "weaker"
EQUAL = "equal"
STRONGER = "stronger"
INCOMPARABLE = "incomparable"
UNDEFINED = "undefined"


@dataclass
class ParseOutcome:
    ok: bool
    diagnostic: str | None = None

    def to_dict(self) -> dict:
        return {"ok": self.ok, "diagnostic": self.diagnostic}


@dataclass
class CompileOutcome:
    ok: bool
    exit_code: int
    error_class: str | None = None  # undefined_symbol | unreachable_statement
    #                                 | bad_operand_types | other
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "exit_code": self.exit_code,
            "error_class": self.error_class,
            "diagnostics": self.diagnostics,
        }


@dataclass
class RougeScore:
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass
class EvaluationRecord:
    method_id: str
    level: str
    model: str
    pairs_raw: int
    pairs_valid: int
    pairs_dropped: int
    parse: ParseOutcome
    compile: CompileOutcome | None
    rouge: RougeScore
    strength: str
    latency_ms: int = 0
    cost: float = 0.0
    failure: str | None = None  # over_budget, replay_miss, transport,
    #                             parse_response_empty, stale_span

    def to_dict(self) -> dict:
        return {
            "method_id": self.method_id,
            "level": self.level,
            "model": self.model,
            "pairs_raw": self.pairs_raw,
            "pairs_valid": self.pairs_valid,
            "pairs_dropped": self.pairs_dropped,
            "parse": self.parse.to_dict(),
            "compile": self.compile.to_dict() if self.compile else None,
            "rouge": self.rouge.to_dict(),
            "strength": self.strength,
            "latency_ms": self.latency_ms,
            "cost": self.cost,
            "failure": self.failure,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluationRecord":
        return cls(
            method_id=d["method_id"],
            level=d["level"],
            model=d["model"],
            pairs_raw=d["pairs_raw"],
            pairs_valid=d["pairs_valid"],
            pairs_dropped=d["pairs_dropped"],
            parse=ParseOutcome(**d["parse"]),
            compile=CompileOutcome(**d["compile"]) if d.get("compile") else None,
            rouge=RougeScore(**d["rouge"]),
            strength=d["strength"],
            latency_ms=d["latency_ms"],
            cost=d["cost"],
            failure=d.get("failure"),
        )


@dataclass
class ExperimentSummary:
    model: str
    level: str
    n_methods: int
    sne_rate: float
    sme_rate: float
    syntactic_accuracy: float
    semantic_accuracy: float
    mean_precision: float
    mean_recall: float
    mean_f1: float
    strength_histogram: dict[str, int]
    total_cost: float
    mean_latency_ms: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


# -- syntactic check ---------------------------------------------------------


def check_syntax(method_text: str) -> ParseOutcome:
    """Whether the text parses as a single Java method declaration."""
    diag = validate_method_text(method_text)
    return ParseOutcome(ok=diag is None, diagnostic=diag)


# -- compile check -----------------------------------------------------------


@dataclass
class BuildProfile:
    build_command: list[str]  # argv; run with cwd = snapshot root
    toolchain_version: str = ""
    timeout_seconds: int = 900

    @classmethod
    def from_dict(cls, d: dict) -> "BuildProfile":
        return cls(
            build_command=list(d["build_command"]),
            toolchain_version=d.get("toolchain_version", ""),
            timeout_seconds=d.get("timeout_seconds", 900),
        )


def default_diagnostic_patterns() -> list[tuple[str, str]]:
    """(substring pattern, error class) pairs; first match wins."""
    raw = resources.files("assertify.assets").joinpath(
        "diagnostic_patterns.json"
    ).read_text(encoding="utf-8")
    return [(e["pattern"], e["error_class"]) for e in json.loads(raw)]


def classify_diagnostics(
    diagnostics: list[str], patterns: list[tuple[str, str]] | None = None
) -> str:
    if patterns is None:
        patterns = default_diagnostic_patterns()
    joined = "\n".join(diagnostics)
    for pattern, error_class in patterns:
        if re.search(pattern, joined):
            return error_class
    return "other"


def check_semantics(
    snapshot: str | Path,
    build: BuildProfile,
    patterns: list[tuple[str, str]] | None = None,
) -> CompileOutcome:
    """Run the snapshot's build command; ok iff exit code 0."""
    if not build.build_command:
        raise ValueError("build profile has no build command")
    try:
        proc = subprocess.run(
            build.build_command,
            cwd=str(snapshot),
            capture_output=True,
            text=True,
            timeout=build.timeout_seconds,
        )
    except FileNotFoundError as e:
        raise RuntimeError(
            f"build command not executable: {build.build_command[0]}"
        ) from e
    except subprocess.TimeoutExpired:
        return CompileOutcome(
            ok=False, exit_code=-1, error_class="other", diagnostics=["build timed out"]
        )
    if proc.returncode == 0:
        return CompileOutcome(ok=True, exit_code=0)
    diagnostics = [
        ln for ln in (proc.stdout + "\n" + proc.stderr).splitlines() if ln.strip()
    ]
    return CompileOutcome(
        ok=False,
        exit_code=proc.returncode,
        error_class=classify_diagnostics(diagnostics, patterns),
        diagnostics=diagnostics,
    )


# -- ROUGE-L -----------------------------------------------------------------


def assertion_document_tokens(statements: list[str]) -> list[str]:
    """Lexical token stream of assertion statements joined by newlines."""
    return lex_tokens_loose("\n".join(statements))


def rouge_l(reference: list[str], candidate: list[str]) -> RougeScore:
    """ROUGE-L over token sequences: P = LCS/|cand|, R = LCS/|ref|."""
    if not reference or not candidate:
        return RougeScore(0.0, 0.0, 0.0)
    vocab: dict[str, int] = {}
    ref_ids = [vocab.setdefault(t, len(vocab)) for t in reference]
    cand_ids = [vocab.setdefault(t, len(vocab)) for t in candidate]
    lcs = lcs_length(ref_ids, cand_ids)
    p = lcs / len(candidate)
    r = lcs / len(reference)
    f1 = (2 * p * r / (p + r)) if (p + r) > 0 else 0.0
    return RougeScore(p, r, f1)


# -- strength ----------------------------------------------------------------


def normalize_assertion(text: str) -> str:
    """Whitespace collapse; drop the optional ': message' part and the
    trailing semicolon. Identifier case is preserved."""
    s = " ".join(text.split())
    if s.endswith(";"):
        s = s[:-1].rstrip()
    toks = lex_tokens_loose(s)
    # cut at the message separator (first top-level ':' outside a ternary)
    depth = 0
    pending = 0
    cut = None
    for i, t in enumerate(toks):
        if t in ("(", "[", "{"):
            depth += 1
        elif t in (")", "]", "}"):
            depth -= 1
        elif depth == 0 and t == "?":
            pending += 1
        elif depth == 0 and t == ":":
            if pending > 0:
                pending -= 1
            else:
                cut = i
                break
    if cut is not None:
        toks = toks[:cut]
    return " ".join(toks)


def classify_strength(original: set[str], generated: set[str]) -> str:
    """Set relation between normalized assertion sets."""
    if not original or not generated:
        return UNDEFINED
    if generated == original:
        return EQUAL
    if generated > original:
        return STRONGER
    if generated < original:
        return WEAKER
    return INCOMPARABLE


# -- aggregation -------------------------------------------------------------


def aggregate(records: list[EvaluationRecord]) -> ExperimentSummary:
    """Summary rates for one (model, prompt level) cell."""
    if not records:
        raise ValueError("cannot aggregate an empty record list")
    models = {r.model for r in records}
    levels = {r.level for r in records}
    if len(models) > 1 or len(levels) > 1:
        raise ValueError(
            f"records span multiple cells: models={models}, levels={levels}"
        )
    n = len(records)
    parse_fail = sum(1 for r in records if not r.parse.ok)
    compile_fail = sum(
        1 for r in records if r.parse.ok and r.compile is not None and not r.compile.ok
    )
    # rates and accuracies divide integer counts so that, e.g.,
    # 2 parse failures in 10 reports exactly 0.2 and 0.7
    sne = parse_fail / n
    sme = compile_fail / n
    hist = {k: 0 for k in (WEAKER, EQUAL, STRONGER, INCOMPARABLE, UNDEFINED)}
    for r in records:
        hist[r.strength] += 1
    return ExperimentSummary(
        model=records[0].model,
        level=records[0].level,
        n_methods=n,
        sne_rate=sne,
        sme_rate=sme,
        syntactic_accuracy=(n - parse_fail) / n,
        semantic_accuracy=(n - parse_fail - compile_fail) / n,
        mean_precision=sum(r.rouge.precision for r in records) / n,
        mean_recall=sum(r.rouge.recall for r in records) / n,
        mean_f1=sum(r.rouge.f1 for r in records) / n,
        strength_histogram=hist,
        total_cost=sum(r.cost for r in records),
        mean_latency_ms=sum(r.latency_ms for r in records) / n,
    )
