"""GemFrame: structure clinical practice guidelines into condition /
recommendation frame trees, serialize them as GEM-style XML, and score
them against gold annotations."""

from .docmodel import (
    Block,
    BlockKind,
    Document,
    DocumentFormatError,
    EnumGroup,
    NoEnclosingUnitError,
    Span,
    decode_source,
    enclosing_unit,
    parse_document,
    split_sentences,
)
from .evaluation import (
    EvalReport,
    attachment_accuracy,
    attachment_pairs,
    cohen_kappa,
    evaluate,
    format_report,
    match_segments,
    pairwise_agreement,
    prf_from_counts,
    segment_prf,
)
from .gemxml import GemXmlError, emit, parse
from .lexicon import (
    LexiconError,
    MarkerClass,
    MarkerHit,
    MarkerLexicon,
    load_lexicon,
    match_markers,
)
from .pipeline import PipelineResult, run_pipeline
from .scope import (
    Frame,
    NodeKind,
    ScopeNode,
    ScopeTree,
    TraceEntry,
    apply_anaphora,
    apply_rupture,
    apply_title_redundancy,
    build_scope_tree,
    default_scope,
    trace_statistics,
)
from .segmenter import (
    Position,
    Segment,
    SegmentKind,
    classify_position,
    classify_units,
    extend_segments,
    make_segment,
    segment_document,
)

__version__ = "0.1.0"
