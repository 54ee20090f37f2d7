"""Method corpus: parse Java files into method records, persist, split.

The corpus is the unit of everything downstream: few-shot example pool,
evaluation set, and the byte spans used to splice generated methods back
into repository snapshots. Serialization is canonical (fixed field order,
records sorted by repo/file/span) so rebuilt corpora are byte-identical.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

from .javasrc.methods import JavaMethod, JavaParseError, extract_methods as _extract

log = logging.getLogger(__name__)

CORPUS_VERSION = 1

EVAL = "EVAL"
FSL = "FSL"
UNLABELED = "UNLABELED"


@dataclass
class AssertionRecord:
    text: str  # full statement including trailing ';'
    line: int  # 1-based file line
    condition: str
    message: str | None = None


@dataclass
class MethodRecord:
    repo_id: str
    file_path: str  # repo-relative, '/' separated
    class_fqn: str
    method_name: str
    signature: str
    parameters: list[tuple[str, str]]  # (name, declared type)
    return_type: str | None
    body_text: str  # full declaration text; empty for bodyless declarations
    start_line: int
    end_line: int
    byte_span: tuple[int, int]  # half-open byte offsets into the file
    assertions: list[AssertionRecord] = field(default_factory=list)
    doc_comment: str | None = None

    @property
    def record_id(self) -> str:
        return f"{self.repo_id}:{self.file_path}:{self.byte_span[0]}-{self.byte_span[1]}"

    def to_dict(self) -> dict:
        return {
            "repo_id": self.repo_id,
            "file_path": self.file_path,
            "class_fqn": self.class_fqn,
            "method_name": self.method_name,
            "signature": self.signature,
            "parameters": [list(p) for p in self.parameters],
            "return_type": self.return_type,
            "body_text": self.body_text,
            "start_line": self.start_line,
            "end_line": self.end_line,
            "byte_span": list(self.byte_span),
            "assertions": [
                {
                    "text": a.text,
                    "line": a.line,
                    "condition": a.condition,
                    "message": a.message,
                }
                for a in self.assertions
            ],
            "doc_comment": self.doc_comment,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MethodRecord":
        return cls(
            repo_id=d["repo_id"],
            file_path=d["file_path"],
            class_fqn=d["class_fqn"],
            method_name=d["method_name"],
            signature=d["signature"],
            parameters=[tuple(p) for p in d["parameters"]],
            return_type=d["return_type"],
            body_text=d["body_text"],
            start_line=d["start_line"],
            end_line=d["end_line"],
            byte_span=tuple(d["byte_span"]),
            assertions=[
                AssertionRecord(
                    text=a["text"],
                    line=a["line"],
                    condition=a["condition"],
                    message=a.get("message"),
                )
                for a in d["assertions"]
            ],
            doc_comment=d.get("doc_comment"),
        )


@dataclass
class CorpusStats:
    files: int = 0
    skipped_files: int = 0
    classes: int = 0
    methods: int = 0
    methods_with_assertions: int = 0
    assertions: int = 0
    anonymous_bodies_skipped: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class Corpus:
    repos: list[str]
    methods: list[MethodRecord]
    split: dict[str, str] = field(default_factory=dict)  # record id -> label
    stats: CorpusStats = field(default_factory=CorpusStats)

    def __post_init__(self):
        self._index: dict[tuple[str, str, tuple[int, int]], int] = {}
        for i, m in enumerate(self.methods):
            key = (m.repo_id, m.file_path, m.byte_span)
            if key in self._index:
                raise ValueError(f"duplicate method span: {key}")
            self._index[key] = i

    def get(self, record_id: str) -> MethodRecord:
        for m in self.methods:
            if m.record_id == record_id:
                return m
        raise KeyError(record_id)

    def by_id(self) -> dict[str, MethodRecord]:
        return {m.record_id: m for m in self.methods}

    def label_of(self, record_id: str) -> str:
        return self.split.get(record_id, UNLABELED)

    def labeled(self, label: str) -> list[MethodRecord]:
        return [m for m in self.methods if self.split.get(m.record_id) == label]

    def to_json(self) -> str:
        doc = {
            "version": CORPUS_VERSION,
            "repos": self.repos,
            "methods": [m.to_dict() for m in self.methods],
            "split": {k: self.split[k] for k in sorted(self.split)},
            "stats": self.stats.to_dict(),
        }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def from_json(cls, text: str) -> "Corpus":
        doc = json.loads(text)
        if doc.get("version") != CORPUS_VERSION:
            raise ValueError(f"unsupported corpus version: {doc.get('version')}")
        corpus = cls(
            repos=doc["repos"],
            methods=[MethodRecord.from_dict(d) for d in doc["methods"]],
            split=dict(doc.get("split", {})),
        )
        corpus.stats = CorpusStats(**doc.get("stats", {}))
        return corpus

    @classmethod
    def load(cls, path: str | Path) -> "Corpus":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def _byte_offsets(text: str) -> list[int]:
    """Cumulative UTF-8 byte offset for each character position."""
    offs = [0] * (len(text) + 1)
    total = 0
    for i, ch in enumerate(text):
        total += len(ch.encode("utf-8"))
        offs[i + 1] = total
    return offs


def _to_record(m: JavaMethod, repo_id: str, file_path: str, offs: list[int]) -> MethodRecord:
    start_b, end_b = offs[m.span[0]], offs[m.span[1]]
    return MethodRecord(
        repo_id=repo_id,
        file_path=file_path,
        class_fqn=m.class_fqn,
        method_name=m.method_name,
        signature=m.signature,
        parameters=m.parameters,
        return_type=m.return_type,
        body_text=m.text if m.has_body else "",
        start_line=m.start_line,
        end_line=m.end_line,
        byte_span=(start_b, end_b),
        assertions=[
            AssertionRecord(a.text, a.line, a.condition, a.message)
            for a in m.assertions
        ],
        doc_comment=m.doc_comment,
    )


def extract_file_methods(
    text: str, file_path: str, repo_id: str = ""
) -> list[MethodRecord]:
    """Method records for one source file (paths are repo-relative)."""
    methods = _extract(text, file_path)
    ascii_only = text.isascii()
    offs = None if ascii_only else _byte_offsets(text)
    out = []
    for m in methods:
        if ascii_only:
            rec = _to_record(m, repo_id, file_path, list(range(len(text) + 1)))
        else:
            rec = _to_record(m, repo_id, file_path, offs)
        out.append(rec)
    return out


def is_test_path(rel_path: str) -> bool:
    """Paths under test directories, mirroring the repository-screening rule."""
    parts = rel_path.replace("\\", "/").split("/")
    if any(p in ("test", "tests") for p in parts):
        return True
    return rel_path.replace("\\", "/").startswith("src/test")


def iter_java_files(root: Path):
    for p in sorted(root.rglob("*.java")):
        rel = p.relative_to(root).as_posix()
        if is_test_path(rel):
            continue
        yield p, rel


def build_corpus(snapshots: list[str | Path]) -> Corpus:
    """Parse every non-test Java file of every snapshot into one corpus."""
    if not snapshots:
        raise ValueError("build_corpus requires at least one snapshot root")
    records: list[MethodRecord] = []
    stats = CorpusStats()
    classes: set[str] = set()
    repos = []
    for root in snapshots:
        root = Path(root)
        repo_id = root.name
        repos.append(repo_id)
        for p, rel in iter_java_files(root):
            try:
                text = p.read_text(encoding="utf-8")
                methods = _extract(text, rel)
            except (JavaParseError, UnicodeDecodeError) as e:
                log.warning("skipping unparsable file %s: %s", rel, e)
                stats.skipped_files += 1
                continue
            stats.files += 1
            offs = (
                list(range(len(text) + 1)) if text.isascii() else _byte_offsets(text)
            )
            for m in methods:
                rec = _to_record(m, repo_id, rel, offs)
                classes.add(f"{repo_id}:{rec.class_fqn}")
                records.append(rec)
                stats.anonymous_bodies_skipped += m.anonymous_bodies
    records.sort(key=lambda m: (m.repo_id, m.file_path, m.byte_span[0]))
    stats.classes = len(classes)
    stats.methods = len(records)
    stats.methods_with_assertions = sum(1 for m in records if m.assertions)
    stats.assertions = sum(len(m.assertions) for m in records)
    corpus = Corpus(repos=sorted(set(repos)), methods=records)
    corpus.stats = stats
    return corpus


def split_dataset(corpus: Corpus, eval_fraction: float, seed: int) -> Corpus:
    """Label assertion-bearing records EVAL/FSL by a seeded shuffle."""
    if not (0.0 < eval_fraction < 1.0):
        raise ValueError(f"eval_fraction must be in (0,1), got {eval_fraction}")
    if not corpus.methods:
        raise ValueError("cannot split an empty corpus")
    candidates = [m.record_id for m in corpus.methods if m.assertions]
    rng = random.Random(seed)
    shuffled = candidates[:]
    rng.shuffle(shuffled)
    n_eval = round(eval_fraction * len(candidates))
    split = {}
    for rid in shuffled[:n_eval]:
        split[rid] = EVAL
    for rid in shuffled[n_eval:]:
        split[rid] = FSL
    corpus.split = split
    return corpus
