"""Configurable marker lexicon and sentence-level marker matching.

Lexicon file format (UTF-8): a line ``class_name:`` opens a class,
following lines indented by two spaces are entries, ``#`` starts a
comment.  Valid class names are the seven marker classes plus
``stopwords``.  A loaded config merges over the built-in default
profile (entries are added, never removed).

Matching is case-insensitive on word boundaries.  Deontic verbs are
matched as stems (the infinitive ending is stripped) followed by a
fixed set of French inflection suffixes; deontic adjectives accept the
plain agreement endings ``s``, ``e``, ``es``.  Multi-word entries
tolerate any whitespace run between words, so matches work across the
line breaks of a paragraph.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

from .docmodel import Span


class LexiconError(ValueError):
    """Lexicon config text is malformed or names an unknown class."""


class MarkerClass(Enum):
    CONDITION_TRIGGER = "condition_trigger"
    DEONTIC_VERB = "deontic_verb"
    DEONTIC_ADJECTIVE = "deontic_adjective"
    RUPTURE_CONTRAST = "rupture_contrast"
    RUPTURE_JUSTIFICATION = "rupture_justification"
    ANAPHORA_CUE = "anaphora_cue"
    DOMAIN_TERM = "domain_term"


ALL_CLASSES = frozenset(MarkerClass)
DEONTIC_CLASSES = frozenset({MarkerClass.DEONTIC_VERB, MarkerClass.DEONTIC_ADJECTIVE})

_FIELD_BY_CLASS = {
    MarkerClass.CONDITION_TRIGGER: "condition_triggers",
    MarkerClass.DEONTIC_VERB: "deontic_verbs",
    MarkerClass.DEONTIC_ADJECTIVE: "deontic_adjectives",
    MarkerClass.RUPTURE_CONTRAST: "rupture_contrast",
    MarkerClass.RUPTURE_JUSTIFICATION: "rupture_justification",
    MarkerClass.ANAPHORA_CUE: "anaphora_cues",
    MarkerClass.DOMAIN_TERM: "domain_terms",
}
_CLASS_FIELDS = tuple(_FIELD_BY_CLASS.values()) + ("stopwords",)

# Inflection suffixes accepted after a stripped verb stem.
_VERB_SUFFIXES = (
    "er", "re", "ir", "e", "es", "ent", "ez", "ons", "é", "ée", "és", "ées",
    "a", "ait", "aient", "ant", "era", "erait", "eront", "t", "te", "ts",
    "tes", "vent", "ra", "rait", "ront",
)
_ADJ_SUFFIXES = ("s", "e", "es")


@dataclass(frozen=True)
class MarkerHit:
    """One marker occurrence inside a sentence (document byte offsets)."""

    marker_class: MarkerClass
    span: Span
    pattern: str  # the lexicon entry that matched


@dataclass(frozen=True)
class MarkerLexicon:
    condition_triggers: tuple[str, ...]
    deontic_verbs: tuple[str, ...]
    deontic_adjectives: tuple[str, ...]
    rupture_contrast: tuple[str, ...]
    rupture_justification: tuple[str, ...]
    anaphora_cues: tuple[str, ...]
    domain_terms: tuple[str, ...]
    stopwords: tuple[str, ...]
    _patterns: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_patterns", {
            cls: [(entry, _entry_regex(cls, entry)) for entry in self.entries(cls)]
            for cls in MarkerClass
        })

    def entries(self, marker_class: MarkerClass) -> tuple[str, ...]:
        return getattr(self, _FIELD_BY_CLASS[marker_class])

    def dump(self) -> str:
        """Serialize to the lexicon file format (loadable back unchanged)."""
        out = []
        for name in _CLASS_FIELDS:
            out.append(f"{name}:")
            out.extend(f"  {entry}" for entry in getattr(self, name))
            out.append("")
        return "\n".join(out)


def _verb_stem(entry: str) -> str:
    for ending in ("er", "re", "ir"):
        if entry.endswith(ending) and len(entry) > len(ending) + 1:
            return entry[:-len(ending)]
    return entry


def _entry_regex(marker_class: MarkerClass, entry: str) -> re.Pattern:
    if marker_class is MarkerClass.DEONTIC_VERB:
        stem = _verb_stem(entry)
        if stem != entry:
            body = re.escape(stem) + "(?:" + "|".join(_VERB_SUFFIXES) + ")"
        else:
            body = re.escape(entry)
    elif marker_class is MarkerClass.DEONTIC_ADJECTIVE:
        body = re.escape(entry) + "(?:" + "|".join(_ADJ_SUFFIXES) + ")?"
    else:
        body = r"\s+".join(re.escape(word) for word in entry.split())
    prefix = r"(?<!\w)" if entry[:1].isalnum() or entry[:1] == "_" else ""
    suffix = r"(?!\w)" if entry[-1:].isalnum() or entry[-1:] == "_" else ""
    return re.compile(prefix + body + suffix, re.IGNORECASE)


def _parse_config(config_text: str) -> dict[str, list[str]]:
    classes: dict[str, list[str]] = {}
    current: str | None = None
    for lineno, line in enumerate(config_text.split("\n"), start=1):
        stripped = line.split("#", 1)[0].rstrip()
        if not stripped:
            continue
        if stripped.startswith("  "):
            if current is None:
                raise LexiconError(f"line {lineno}: entry before any class header")
            entry = stripped.strip().lower()
            if entry:
                classes[current].append(entry)
        elif stripped.endswith(":") and not stripped.startswith(" "):
            name = stripped[:-1].strip()
            if name not in _CLASS_FIELDS:
                raise LexiconError(f"line {lineno}: unknown marker class {name!r}")
            current = name
            classes.setdefault(name, [])
        else:
            raise LexiconError(f"line {lineno}: expected 'class_name:' or a two-space indented entry")
    return classes


def _default_config_text() -> str:
    return resources.files("gemframe.data").joinpath("default_lexicon.txt").read_text("utf-8")


def load_lexicon(config_text: str = "") -> MarkerLexicon:
    """Load a lexicon, merging ``config_text`` over the default profile."""
    merged = _parse_config(_default_config_text())
    for name, entries in _parse_config(config_text).items():
        merged.setdefault(name, []).extend(entries)
    deduped = {}
    for name in _CLASS_FIELDS:
        seen: dict[str, None] = {}
        for entry in merged.get(name, []):
            seen.setdefault(entry)
        deduped[name] = tuple(seen)
    return MarkerLexicon(**deduped)


def match_markers(sentence_text: str, sentence_span: Span, lexicon: MarkerLexicon,
                  classes: frozenset[MarkerClass] = ALL_CLASSES) -> list[MarkerHit]:
    """All marker hits in one sentence, ordered by start offset.

    ``sentence_text`` must be the exact source slice for
    ``sentence_span``.  Hits of the same class never overlap (longer
    entries win); hit spans are document byte offsets.
    """
    byte_at = [0]
    for ch in sentence_text:
        byte_at.append(byte_at[-1] + len(ch.encode("utf-8")))

    hits: list[MarkerHit] = []
    for marker_class in MarkerClass:
        if marker_class not in classes:
            continue
        candidates: list[tuple[int, int, str]] = []
        for entry, pattern in lexicon._patterns[marker_class]:
            for m in pattern.finditer(sentence_text):
                candidates.append((m.start(), m.end(), entry))
        candidates.sort(key=lambda c: (c[0], -(c[1] - c[0])))
        taken_until = -1
        for start, end, entry in candidates:
            if start < taken_until:
                continue
            taken_until = end
            hits.append(MarkerHit(
                marker_class=marker_class,
                span=Span(sentence_span.start + byte_at[start], sentence_span.start + byte_at[end]),
                pattern=entry,
            ))
    hits.sort(key=lambda h: (h.span.start, h.span.end, h.marker_class.value))
    return hits
