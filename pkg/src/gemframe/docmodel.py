"""Physical document model: blocks, sentences and byte spans.

Input convention (UTF-8 plain text):

* lines containing only whitespace separate blocks;
* a block whose first line starts with one or more ``#`` followed by a
  space is a title (level = number of ``#``, at most 6);
* a line starting with ``"- "``, ``"* "`` or ``"<digits>. "`` is an
  enumeration item; consecutive item blocks form one enumeration;
* a non-title, non-item block ending with ``:`` immediately before an
  enumeration is that enumeration's intro;
* everything else is a paragraph whose lines read as if joined by a
  single space.

All spans are byte offsets into the UTF-8 encoding of the source and
always fall on character boundaries.  Documents are immutable and safe
to share between threads.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from enum import Enum


class DocumentFormatError(ValueError):
    """Input text violates the document format."""

    def __init__(self, message: str, *, line: int | None = None, byte: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        if byte is not None:
            message = f"byte {byte}: {message}"
        super().__init__(message)
        self.line = line
        self.byte = byte


class NoEnclosingUnitError(LookupError):
    """A byte position does not fall inside any sentence."""


@dataclass(frozen=True, order=True)
class Span:
    """Half-open byte range [start, end) into the source text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if not 0 <= self.start <= self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end

    def contains_pos(self, pos: int) -> bool:
        return self.start <= pos < self.end

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end


class BlockKind(Enum):
    TITLE = "title"
    PARAGRAPH = "paragraph"
    ENUM_INTRO = "enum-intro"
    ENUM_ITEM = "enum-item"


@dataclass(frozen=True)
class Block:
    """A physical unit: title, paragraph, enumeration intro or item.

    ``span`` covers the block's source text including any title or item
    marker; ``sentences`` cover only the content (markers excluded) and
    are ordered, non-overlapping and contained in ``span``.
    """

    kind: BlockKind
    span: Span
    sentences: tuple[Span, ...]
    level: int = 0  # titles only

    def __post_init__(self) -> None:
        prev_end = self.span.start
        for s in self.sentences:
            if s.start < prev_end or s.end > self.span.end:
                raise ValueError("sentences must be ordered and contained in the block span")
            prev_end = s.end


@dataclass(frozen=True)
class EnumGroup:
    """One enumeration: optional intro block index plus item block indices."""

    intro: int | None
    items: tuple[int, ...]


@dataclass(frozen=True)
class Document:
    id: str
    source: str
    blocks: tuple[Block, ...]
    enum_groups: tuple[EnumGroup, ...]
    # char index -> byte offset of that char; one extra entry for end-of-text
    _byte_index: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index = [0]
        for ch in self.source:
            index.append(index[-1] + len(ch.encode("utf-8")))
        object.__setattr__(self, "_byte_index", tuple(index))

    @property
    def byte_length(self) -> int:
        return self._byte_index[-1]

    def char_to_byte(self, char_pos: int) -> int:
        return self._byte_index[char_pos]

    def byte_to_char(self, byte_pos: int) -> int:
        char_pos = bisect.bisect_left(self._byte_index, byte_pos)
        if self._byte_index[char_pos] != byte_pos:
            raise ValueError(f"byte offset {byte_pos} is not on a character boundary")
        return char_pos

    def text(self, span: Span) -> str:
        """Source slice covered by a byte span."""
        return self.source[self.byte_to_char(span.start):self.byte_to_char(span.end)]

    def enum_group_of(self, block_index: int) -> EnumGroup | None:
        for group in self.enum_groups:
            if group.intro == block_index or block_index in group.items:
                return group
        return None


DEFAULT_ABBREVIATIONS = (
    "cf.", "etc.", "p.", "ex.", "p.ex.", "env.", "min.", "max.",
    "nb.", "dr.", "pr.", "mme.",
)

_TERMINATORS = ".!?;"
_TITLE_RE = re.compile(r"^(#+) ")
_ENUM_ITEM_RE = re.compile(r"^(- |\* |\d+\. )")


def decode_source(raw: bytes) -> str:
    """Decode UTF-8 input, reporting the byte position on failure."""
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DocumentFormatError("invalid UTF-8 input", byte=exc.start) from exc


def _ends_abbreviation(text: str, dot_pos: int, abbreviations: tuple[str, ...]) -> bool:
    for abbr in abbreviations:
        start = dot_pos + 1 - len(abbr)
        if start < 0:
            continue
        if text[start:dot_pos + 1].lower() != abbr:
            continue
        if start == 0 or not (text[start - 1].isalnum() or text[start - 1] == "_"):
            return True
    return False


def _sentence_char_spans(text: str, abbreviations: tuple[str, ...]) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    n = len(text)
    start = 0
    while start < n and text[start].isspace():
        start += 1
    i = start
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS and (i + 1 == n or text[i + 1].isspace()):
            if not (ch == "." and _ends_abbreviation(text, i, abbreviations)):
                spans.append((start, i + 1))
                start = i + 1
                while start < n and text[start].isspace():
                    start += 1
                i = start
                continue
        i += 1
    if start < n:
        end = n
        while end > start and text[end - 1].isspace():
            end -= 1
        if end > start:
            spans.append((start, end))
    return spans


def split_sentences(block_text: str, abbreviations: tuple[str, ...] | None = None) -> list[Span]:
    """Split text into sentence spans (byte offsets relative to the text).

    A sentence ends at ``.``, ``!``, ``?`` or ``;`` followed by
    whitespace or end of text, unless the dot closes a listed
    abbreviation.  Leading and trailing whitespace is excluded from the
    spans.
    """
    abbrs = DEFAULT_ABBREVIATIONS if abbreviations is None else tuple(a.lower() for a in abbreviations)
    index = [0]
    for ch in block_text:
        index.append(index[-1] + len(ch.encode("utf-8")))
    return [Span(index[s], index[e]) for s, e in _sentence_char_spans(block_text, abbrs)]


def parse_document(text: str, doc_id: str = "doc",
                   abbreviations: tuple[str, ...] | None = None) -> Document:
    """Parse source text into an immutable :class:`Document`.

    Blocks partition all non-blank content; the parse is lossless:
    concatenating block spans plus the skipped whitespace reconstructs
    the source exactly.
    """
    abbrs = DEFAULT_ABBREVIATIONS if abbreviations is None else tuple(a.lower() for a in abbreviations)

    lines: list[tuple[int, str]] = []  # (char offset, text without newline)
    offset = 0
    for line in text.split("\n"):
        lines.append((offset, line))
        offset += len(line) + 1

    # Group lines into raw blocks; every enumeration item line is its own block.
    runs: list[tuple[str, list[tuple[int, int, str]]]] = []  # (hint, [(lineno, char start, text)])
    current: list[tuple[int, int, str]] = []
    for lineno, (char_start, line) in enumerate(lines, start=1):
        if not line.strip():
            if current:
                runs.append(("plain", current))
                current = []
        elif _ENUM_ITEM_RE.match(line):
            if current:
                runs.append(("plain", current))
                current = []
            runs.append(("item", [(lineno, char_start, line)]))
        else:
            current.append((lineno, char_start, line))
    if current:
        runs.append(("plain", current))

    blocks: list[Block] = []
    char_spans: list[tuple[int, int]] = []  # block spans in char offsets, same order
    sentence_spans: list[list[tuple[int, int]]] = []
    kinds: list[BlockKind] = []
    levels: list[int] = []

    for hint, run_lines in runs:
        first_lineno, first_start, first_text = run_lines[0]
        last_lineno, last_start, last_text = run_lines[-1]
        region_start = first_start
        region_end = last_start + len(last_text)
        region = text[region_start:region_end]
        # trim surrounding whitespace from the block span
        lead = len(region) - len(region.lstrip())
        trail = len(region) - len(region.rstrip())
        span_start = region_start + lead
        span_end = region_end - trail

        if hint == "item":
            marker = _ENUM_ITEM_RE.match(first_text)
            assert marker is not None
            content_start = span_start + marker.end()
            kind = BlockKind.ENUM_ITEM
            level = 0
        else:
            title = _TITLE_RE.match(first_text)
            if title:
                level = len(title.group(1))
                if level > 6:
                    raise DocumentFormatError(f"title level {level} exceeds 6", line=first_lineno)
                content_start = span_start + title.end()
                kind = BlockKind.TITLE
            else:
                content_start = span_start
                kind = BlockKind.PARAGRAPH
                level = 0

        content = text[content_start:span_end]
        sentences = [(content_start + s, content_start + e)
                     for s, e in _sentence_char_spans(content, abbrs)]
        kinds.append(kind)
        levels.append(level)
        char_spans.append((span_start, span_end))
        sentence_spans.append(sentences)

    # Resolve enumerations: maximal runs of consecutive item blocks; the
    # preceding paragraph becomes the intro when it ends with ':'.
    groups: list[EnumGroup] = []
    i = 0
    while i < len(kinds):
        if kinds[i] is BlockKind.ENUM_ITEM:
            j = i
            while j < len(kinds) and kinds[j] is BlockKind.ENUM_ITEM:
                j += 1
            intro: int | None = None
            if i > 0 and kinds[i - 1] is BlockKind.PARAGRAPH:
                prev_start, prev_end = char_spans[i - 1]
                if text[prev_start:prev_end].rstrip().endswith(":"):
                    kinds[i - 1] = BlockKind.ENUM_INTRO
                    intro = i - 1
            groups.append(EnumGroup(intro=intro, items=tuple(range(i, j))))
            i = j
        else:
            i += 1

    byte_index = [0]
    for ch in text:
        byte_index.append(byte_index[-1] + len(ch.encode("utf-8")))

    for kind, level, (cs, ce), sents in zip(kinds, levels, char_spans, sentence_spans):
        blocks.append(Block(
            kind=kind,
            level=level,
            span=Span(byte_index[cs], byte_index[ce]),
            sentences=tuple(Span(byte_index[s], byte_index[e]) for s, e in sents),
        ))

    return Document(id=doc_id, source=text, blocks=tuple(blocks), enum_groups=tuple(groups))


def enclosing_unit(doc: Document, pos: int) -> tuple[int, int]:
    """Return (block index, sentence index) of the sentence containing ``pos``.

    Raises :class:`NoEnclosingUnitError` when ``pos`` falls outside
    every sentence (inter-block whitespace, markers, past end of text).
    """
    for block_index, block in enumerate(doc.blocks):
        if not block.span.contains_pos(pos):
            continue
        for sentence_index, sentence in enumerate(block.sentences):
            if sentence.contains_pos(pos):
                return block_index, sentence_index
    raise NoEnclosingUnitError(f"no enclosing unit at byte {pos}")
