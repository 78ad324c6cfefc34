"""Directory-backed document store for the review service.

Layout, per document id:

* ``{id}.txt``       source text (never rewritten);
* ``{id}.xml``       the version-1 tree as canonical GEM XML, produced
  by the pipeline at ingest time (or supplied alongside the source);
* ``{id}.log.jsonl`` append-only correction log;
* ``{id}.accepted.xml`` canonical export snapshot written on accept.

The current tree is the version-1 tree with the log replayed over it;
replay is deterministic, so the store is fully human-inspectable and
recoverable from the files alone.  Writes are serialized per document.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from .corrections import (
    AdjustFrameEnd,
    Correction,
    CorrectionError,
    ReattachRecommendation,
    RelabelSegment,
    VersionConflict,
    apply_correction,
)
from .docmodel import Document, decode_source, parse_document
from .gemxml import emit, parse
from .lexicon import MarkerLexicon, load_lexicon
from .pipeline import run_pipeline
from .scope import ScopeTree
from .segmenter import SegmentKind


class UnknownDocument(KeyError):
    pass


def correction_to_json(correction: Correction) -> dict:
    if isinstance(correction, ReattachRecommendation):
        return {"kind": "reattach_recommendation",
                "recommendation_id": correction.recommendation_id,
                "new_parent_id": correction.new_parent_id,
                "base_version": correction.base_version}
    if isinstance(correction, AdjustFrameEnd):
        return {"kind": "adjust_frame_end",
                "condition_id": correction.condition_id,
                "new_end": correction.new_end,
                "base_version": correction.base_version}
    if isinstance(correction, RelabelSegment):
        return {"kind": "relabel_segment",
                "segment_id": correction.segment_id,
                "new_kind": correction.new_kind.value,
                "base_version": correction.base_version}
    raise CorrectionError(f"unknown correction kind {type(correction).__name__}")


def correction_from_json(payload: dict) -> Correction:
    kind = payload.get("kind")
    if kind == "reattach_recommendation":
        return ReattachRecommendation(payload["recommendation_id"],
                                      payload["new_parent_id"],
                                      payload["base_version"])
    if kind == "adjust_frame_end":
        return AdjustFrameEnd(payload["condition_id"], payload["new_end"],
                              payload["base_version"])
    if kind == "relabel_segment":
        return RelabelSegment(payload["segment_id"],
                              SegmentKind(payload["new_kind"]),
                              payload["base_version"])
    raise CorrectionError(f"unknown correction kind {kind!r}")


@dataclass
class _Entry:
    doc: Document
    tree: ScopeTree
    accepted: bool


class DocumentStore:
    """All documents under one directory, with per-document write locks."""

    def __init__(self, root: Path, lexicon: MarkerLexicon | None = None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.lexicon = lexicon if lexicon is not None else load_lexicon()
        self._entries: dict[str, _Entry] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._scan()

    def _scan(self) -> None:
        for source_path in sorted(self.root.glob("*.txt")):
            doc_id = source_path.stem
            text = decode_source(source_path.read_bytes())
            xml_path = self.root / f"{doc_id}.xml"
            if xml_path.exists():
                doc = parse_document(text, doc_id)
                tree = parse(xml_path.read_text("utf-8"))
            else:
                result = run_pipeline(text, doc_id, self.lexicon)
                doc, tree = result.doc, result.tree
                xml_path.write_text(result.xml, "utf-8")
            tree = self._replay(doc, tree)
            accepted = (self.root / f"{doc_id}.accepted.xml").exists()
            self._entries[doc_id] = _Entry(doc=doc, tree=tree, accepted=accepted)
            self._locks[doc_id] = threading.Lock()

    def _log_path(self, doc_id: str) -> Path:
        return self.root / f"{doc_id}.log.jsonl"

    def _replay(self, doc: Document, tree: ScopeTree) -> ScopeTree:
        log_path = self.root / f"{doc.id}.log.jsonl"
        if not log_path.exists():
            return tree
        for line in log_path.read_text("utf-8").splitlines():
            if line.strip():
                tree = apply_correction(tree, doc, correction_from_json(json.loads(line)))
        return tree

    def ids(self) -> list[str]:
        return sorted(self._entries)

    def _entry(self, doc_id: str) -> _Entry:
        try:
            return self._entries[doc_id]
        except KeyError:
            raise UnknownDocument(doc_id) from None

    def document(self, doc_id: str) -> Document:
        return self._entry(doc_id).doc

    def tree(self, doc_id: str) -> ScopeTree:
        return self._entry(doc_id).tree

    def is_accepted(self, doc_id: str) -> bool:
        return self._entry(doc_id).accepted

    def apply(self, doc_id: str, correction: Correction) -> ScopeTree:
        """Apply a correction transactionally; the log line is written
        only after the correction validated."""
        entry = self._entry(doc_id)
        with self._locks[doc_id]:
            new_tree = apply_correction(entry.tree, entry.doc, correction)
            with self._log_path(doc_id).open("a", encoding="utf-8") as log:
                log.write(json.dumps(correction_to_json(correction), ensure_ascii=False) + "\n")
            entry.tree = new_tree
            return new_tree

    def accept(self, doc_id: str, base_version: int | None = None) -> ScopeTree:
        entry = self._entry(doc_id)
        with self._locks[doc_id]:
            if base_version is not None and base_version != entry.tree.version:
                raise VersionConflict(entry.tree.version)
            (self.root / f"{doc_id}.accepted.xml").write_text(
                emit(entry.tree, entry.doc), "utf-8")
            entry.accepted = True
            return entry.tree

    def export_xml(self, doc_id: str) -> str:
        entry = self._entry(doc_id)
        return emit(entry.tree, entry.doc)
