"""HTTP review service: documents, trees, corrections, export.

Endpoints (JSON bodies, UTF-8; offsets are byte offsets into the UTF-8
source):

* ``GET  /api/docs``                    document list with versions;
* ``GET  /api/doc/{id}``                source text plus block map;
* ``GET  /api/tree/{id}``               tree, version and rule traces;
* ``POST /api/tree/{id}/corrections``   apply one correction;
* ``POST /api/tree/{id}/accept``        mark the current version accepted;
* ``GET  /api/tree/{id}/export``        canonical GEM XML.

A stale ``base_version`` answers 409 with the current version; an
invalid correction answers 422 naming the violated invariant.  The
review UI's static build is served at the root path when present.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal, Union

from fastapi import FastAPI, HTTPException, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .corrections import (
    AdjustFrameEnd,
    CorrectionError,
    ReattachRecommendation,
    RelabelSegment,
    VersionConflict,
)
from .docmodel import Document
from .lexicon import MarkerLexicon
from .scope import NodeKind, ScopeNode, ScopeTree
from .segmenter import SegmentKind
from .store import DocumentStore, UnknownDocument


class SpanModel(BaseModel):
    start: int
    end: int


class BlockModel(BaseModel):
    index: int
    kind: str
    level: int
    start: int
    end: int
    sentences: list[SpanModel]


class DocModel(BaseModel):
    id: str
    text: str
    blocks: list[BlockModel]


class DocSummary(BaseModel):
    id: str
    version: int
    accepted: bool
    conditions: int
    recommendations: int


class DocList(BaseModel):
    documents: list[DocSummary]


class TraceModel(BaseModel):
    rule: str
    detail: str


class NodeModel(BaseModel):
    kind: str
    id: str | None = None
    start: int | None = None
    end: int | None = None
    position: str | None = None
    rules: list[TraceModel] | None = None
    frame_start: int | None = None
    frame_end: int | None = None
    text: str | None = None
    children: list["NodeModel"] = Field(default_factory=list)


class TreeModel(BaseModel):
    doc_id: str
    version: int
    root: NodeModel


class ReattachModel(BaseModel):
    kind: Literal["reattach_recommendation"]
    recommendation_id: str
    new_parent_id: str
    base_version: int


class AdjustFrameEndModel(BaseModel):
    kind: Literal["adjust_frame_end"]
    condition_id: str
    new_end: int
    base_version: int


class RelabelModel(BaseModel):
    kind: Literal["relabel_segment"]
    segment_id: str
    new_kind: Literal["condition", "recommendation"]
    base_version: int


CorrectionModel = Union[ReattachModel, AdjustFrameEndModel, RelabelModel]


class CorrectionResult(BaseModel):
    doc_id: str
    version: int


class AcceptRequest(BaseModel):
    base_version: int | None = None


class AcceptResult(BaseModel):
    doc_id: str
    version: int
    accepted: bool


def _node_model(node: ScopeNode, doc: Document) -> NodeModel:
    model = NodeModel(kind=node.kind.value,
                      children=[_node_model(c, doc) for c in node.children])
    if node.span is not None:
        model.start, model.end = node.span.start, node.span.end
        model.text = doc.text(node.span)
    if node.segment is not None:
        model.id = node.segment.id
        if node.kind is NodeKind.CONDITION:
            model.position = node.segment.position.value
    if node.frame is not None:
        model.frame_start = node.frame.scope.start
        model.frame_end = node.frame.scope.end
        model.rules = [TraceModel(rule=t.rule, detail=t.detail) for t in node.frame.trace]
    return model


def _to_correction(model: CorrectionModel):
    if isinstance(model, ReattachModel):
        return ReattachRecommendation(model.recommendation_id, model.new_parent_id,
                                      model.base_version)
    if isinstance(model, AdjustFrameEndModel):
        return AdjustFrameEnd(model.condition_id, model.new_end, model.base_version)
    return RelabelSegment(model.segment_id, SegmentKind(model.new_kind), model.base_version)


def create_app(store_dir: Path, lexicon: MarkerLexicon | None = None,
               ui_dir: Path | None = None) -> FastAPI:
    store = DocumentStore(Path(store_dir), lexicon)
    app = FastAPI(title="gemframe review service")
    app.state.store = store

    def _tree_or_404(doc_id: str) -> ScopeTree:
        try:
            return store.tree(doc_id)
        except UnknownDocument:
            raise HTTPException(status_code=404, detail=f"unknown document {doc_id!r}")

    @app.get("/api/docs", response_model=DocList)
    def list_docs() -> DocList:
        documents = []
        for doc_id in store.ids():
            tree = store.tree(doc_id)
            documents.append(DocSummary(
                id=doc_id,
                version=tree.version,
                accepted=store.is_accepted(doc_id),
                conditions=len(tree.conditions()),
                recommendations=len(tree.recommendations()),
            ))
        return DocList(documents=documents)

    @app.get("/api/doc/{doc_id}", response_model=DocModel)
    def get_doc(doc_id: str) -> DocModel:
        _tree_or_404(doc_id)
        doc = store.document(doc_id)
        blocks = [
            BlockModel(index=i, kind=b.kind.value, level=b.level,
                       start=b.span.start, end=b.span.end,
                       sentences=[SpanModel(start=s.start, end=s.end) for s in b.sentences])
            for i, b in enumerate(doc.blocks)
        ]
        return DocModel(id=doc.id, text=doc.source, blocks=blocks)

    @app.get("/api/tree/{doc_id}", response_model=TreeModel)
    def get_tree(doc_id: str) -> TreeModel:
        tree = _tree_or_404(doc_id)
        doc = store.document(doc_id)
        return TreeModel(doc_id=tree.doc_id, version=tree.version,
                         root=_node_model(tree.root, doc))

    @app.post("/api/tree/{doc_id}/corrections", response_model=CorrectionResult)
    def post_correction(doc_id: str, correction: CorrectionModel) -> CorrectionResult:
        _tree_or_404(doc_id)
        try:
            tree = store.apply(doc_id, _to_correction(correction))
        except VersionConflict as exc:
            raise HTTPException(status_code=409, detail={
                "error": str(exc), "current_version": exc.current_version})
        except CorrectionError as exc:
            raise HTTPException(status_code=422, detail={"error": str(exc)})
        return CorrectionResult(doc_id=doc_id, version=tree.version)

    @app.post("/api/tree/{doc_id}/accept", response_model=AcceptResult)
    def accept(doc_id: str, request: AcceptRequest | None = None) -> AcceptResult:
        _tree_or_404(doc_id)
        base_version = request.base_version if request is not None else None
        try:
            tree = store.accept(doc_id, base_version)
        except VersionConflict as exc:
            raise HTTPException(status_code=409, detail={
                "error": str(exc), "current_version": exc.current_version})
        return AcceptResult(doc_id=doc_id, version=tree.version, accepted=True)

    @app.get("/api/tree/{doc_id}/export")
    def export(doc_id: str) -> Response:
        _tree_or_404(doc_id)
        return Response(content=store.export_xml(doc_id),
                        media_type="application/xml; charset=utf-8")

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
