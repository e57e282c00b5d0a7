"""Data model and ingestion for monolingual code corpora.

Corpora are immutable after ingestion and always iterated in id-sorted
order: the matching algorithm's output depends on iteration order, so
ordering is pinned here once and for all.
"""

import json
import os
from dataclasses import dataclass, field, replace

from .lexer import LexerConfig, tokenize

__all__ = [
    "Document", "Corpus", "ProblemSetCorpus", "IngestError",
    "ingest_directory", "ingest_records", "export_records",
    "tokenize_corpus", "filter_by_token_count",
]


class IngestError(Exception):
    pass


@dataclass(frozen=True)
class Document:
    id: str
    language: str
    text: str
    problem_set: str | None = None
    tokens: tuple | None = None  # filled by tokenize_corpus

    def token_texts(self):
        if self.tokens is None:
            raise ValueError(f"document {self.id!r} is not tokenized")
        return [t.text for t in self.tokens]


@dataclass(frozen=True)
class Corpus:
    language: str
    documents: tuple = ()
    skipped: int = 0  # unreadable files skipped during ingestion

    def __post_init__(self):
        docs = tuple(sorted(self.documents, key=lambda d: d.id))
        ids = [d.id for d in docs]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise IngestError(f"duplicate document ids: {dup[:5]}")
        for d in docs:
            if d.language != self.language:
                raise IngestError(
                    f"document {d.id!r} has language {d.language!r}, "
                    f"corpus is {self.language!r}")
        object.__setattr__(self, "documents", docs)

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def ids(self):
        return [d.id for d in self.documents]

    def by_id(self, doc_id):
        for d in self.documents:
            if d.id == doc_id:
                return d
        raise KeyError(doc_id)


@dataclass(frozen=True)
class ProblemSetCorpus:
    """Per-problem, per-language corpus slices (CodeNet-style layout)."""
    problems: dict = field(default_factory=dict)  # label -> {lang: Corpus}

    @classmethod
    def from_corpora(cls, corpora):
        grouped = {}
        for corpus in corpora:
            for doc in corpus:
                if doc.problem_set is None:
                    raise IngestError(
                        f"document {doc.id!r} has no problem_set label")
                grouped.setdefault(doc.problem_set, {}).setdefault(
                    corpus.language, []).append(doc)
        problems = {
            label: {
                lang: Corpus(language=lang, documents=tuple(docs))
                for lang, docs in by_lang.items()
            }
            for label, by_lang in grouped.items()
        }
        return cls(problems=problems)

    def labels(self):
        return sorted(self.problems)


def _read_text(path):
    with open(path, "rb") as fh:
        return fh.read().decode("utf-8", errors="replace")


def ingest_directory(root, layout="flat", language=""):
    """Ingest a directory tree into a Corpus.

    layout="flat": every regular file under root becomes a document.
    layout="problem_set": expects root/<problem>/<language>/<file>; only
    files under subdirectories named ``language`` are taken, and the
    problem directory becomes the problem_set label.

    Unreadable files are skipped and counted, never fatal. Ids are
    root-relative POSIX paths, so ingestion is deterministic.
    """
    if not language:
        raise IngestError("language tag must be non-empty")
    if not os.path.isdir(root):
        raise IngestError(f"not a directory: {root}")
    if layout not in ("flat", "problem_set"):
        raise IngestError(f"unknown layout: {layout!r}")

    docs = []
    skipped = 0
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            path = os.path.join(dirpath, name)
            rel = os.path.relpath(path, root).replace(os.sep, "/")
            parts = rel.split("/")
            problem = None
            if layout == "problem_set":
                if len(parts) != 3 or parts[1] != language:
                    continue
                problem = parts[0]
            try:
                text = _read_text(path)
            except OSError:
                skipped += 1
                continue
            docs.append(Document(id=rel, language=language, text=text,
                                 problem_set=problem))
    return Corpus(language=language, documents=tuple(docs), skipped=skipped)


def ingest_records(lines, language=None):
    """Ingest line-delimited JSON records.

    Each line: {"id": str, "language": str, "text": str,
    "problem_set": str|null}. Malformed lines and duplicate ids are
    errors naming the line number.
    """
    if isinstance(lines, (str, os.PathLike)):
        with open(lines, "r", encoding="utf-8") as fh:
            return ingest_records(fh.readlines(), language=language)

    docs = []
    seen = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            doc = Document(id=rec["id"], language=rec["language"],
                           text=rec["text"],
                           problem_set=rec.get("problem_set"))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise IngestError(f"malformed record at line {lineno}: {exc}")
        if doc.id in seen:
            raise IngestError(f"duplicate id {doc.id!r} at line {lineno}")
        seen.add(doc.id)
        if language is None:
            language = doc.language
        elif doc.language != language:
            raise IngestError(
                f"mixed languages at line {lineno}: "
                f"{doc.language!r} vs {language!r}")
        docs.append(doc)
    return Corpus(language=language or "", documents=tuple(docs))


def export_records(corpus, path):
    """Write a corpus back to the line-delimited JSON record format."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus:
            fh.write(json.dumps({
                "id": doc.id,
                "language": doc.language,
                "text": doc.text,
                "problem_set": doc.problem_set,
            }, ensure_ascii=False) + "\n")


def tokenize_corpus(corpus, config=LexerConfig()):
    """Return a copy of ``corpus`` with token streams filled in."""
    docs = tuple(
        replace(doc, tokens=tuple(tokenize(doc.text, config)))
        for doc in corpus
    )
    return replace(corpus, documents=docs)


def filter_by_token_count(corpus, max_tokens):
    """Keep documents with strictly fewer than ``max_tokens`` tokens."""
    if max_tokens < 1:
        raise ValueError("max_tokens must be positive")
    for doc in corpus:
        if doc.tokens is None:
            raise ValueError("corpus must be tokenized before filtering")
    docs = tuple(d for d in corpus if len(d.tokens) < max_tokens)
    return replace(corpus, documents=docs)
