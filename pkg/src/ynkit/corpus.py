"""Dialogue corpus ingestion, tokenization, and label normalization.

Corpora arrive as one JSON object per line with fields
{id, conversation_id, speaker, text, ordinal? | reply_to?, meta?}.
Turn order within a conversation comes from explicit ordinals when every
turn has one, otherwise from the reply_to chain. Text is NFC-normalized
at load time so downstream keyword rules behave consistently across
corpus encodings.
"""

from __future__ import annotations

import enum
import json
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .errors import CorpusFormatError, UnmappedLabelError


class Label(str, enum.Enum):
    """Three-way interpretation of an answer to a yes-no question."""

    YES = "yes"
    NO = "no"
    MIDDLE = "middle"

    def __str__(self) -> str:  # keep "yes" rather than "Label.YES" in output
        return self.value


LABEL_ORDER = (Label.YES, Label.NO, Label.MIDDLE)


def parse_label(value: str) -> Label:
    try:
        return Label(value.lower())
    except ValueError:
        raise UnmappedLabelError(f"not a valid label: {value!r}") from None


@dataclass(frozen=True)
class Turn:
    """One utterance. Ordinal is the 0-based position within its dialogue."""

    turn_id: str
    dialogue_id: str
    ordinal: int
    speaker: str
    text: str
    dialogue_act: Optional[str] = None


@dataclass(frozen=True)
class Dialogue:
    dialogue_id: str
    turns: tuple[Turn, ...]


@dataclass(frozen=True)
class Corpus:
    dialogues: tuple[Dialogue, ...]

    def __iter__(self):
        return iter(self.dialogues)

    def __len__(self) -> int:
        return len(self.dialogues)

    @property
    def total_turns(self) -> int:
        return sum(len(d.turns) for d in self.dialogues)

    def turn_index(self) -> dict[str, Turn]:
        return {t.turn_id: t for d in self.dialogues for t in d.turns}


# Punctuation detached from word edges during tokenization. Apostrophes
# stay attached so contractions like "don't" remain single tokens.
_DETACHED_PUNCT = set("?.,!;:\"()[]")

_WS_RE = re.compile(r"\s+")
_SENT_SPLIT_RE = re.compile(r"(?<=[.?!]) ")


def tokenize(text: str) -> list[str]:
    """Split on whitespace, then detach leading/trailing punctuation.

    "Do you like Mexican food?" -> ["Do","you","like","Mexican","food","?"]
    Case is preserved; callers lowercase when they need to.
    """
    tokens: list[str] = []
    for chunk in text.split():
        lead: list[str] = []
        while chunk and chunk[0] in _DETACHED_PUNCT:
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail: list[str] = []
        while chunk and chunk[-1] in _DETACHED_PUNCT:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trail))
    return tokens


def split_sentences(text: str) -> list[str]:
    """Split at '.', '?', or '!' followed by whitespace or end of string.

    Whitespace is normalized first, so joining the result with single
    spaces reproduces the whitespace-normalized input. Terminators stay
    with their sentence; empty sentences are never returned.
    """
    normalized = _WS_RE.sub(" ", text).strip()
    if not normalized:
        return []
    return [part for part in _SENT_SPLIT_RE.split(normalized) if part]


def _normalize_text(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def _require(obj: dict, key: str, lineno: int):
    if key not in obj:
        raise CorpusFormatError(f"line {lineno}: missing key {key!r}")
    return obj[key]


def _order_by_reply_chain(raw_turns: list[dict], conversation_id: str) -> list[dict]:
    """Linearize a conversation whose turns carry reply_to references."""
    by_id = {t["id"]: t for t in raw_turns}
    roots = [t for t in raw_turns if t.get("reply_to") in (None, "")]
    if len(roots) != 1:
        raise CorpusFormatError(
            f"conversation {conversation_id!r}: expected exactly one root turn "
            f"(reply_to null), found {len(roots)}"
        )
    children: dict[str, list[str]] = {}
    for t in raw_turns:
        parent = t.get("reply_to")
        if parent in (None, ""):
            continue
        if parent not in by_id:
            raise CorpusFormatError(
                f"conversation {conversation_id!r}: turn {t['id']!r} replies to "
                f"unknown turn {parent!r}"
            )
        children.setdefault(parent, []).append(t["id"])
    ordered = [roots[0]]
    while True:
        nxt = children.get(ordered[-1]["id"], [])
        if not nxt:
            break
        if len(nxt) > 1:
            raise CorpusFormatError(
                f"conversation {conversation_id!r}: turn {ordered[-1]['id']!r} "
                f"has multiple replies; chain is not linear"
            )
        ordered.append(by_id[nxt[0]])
    if len(ordered) != len(raw_turns):
        missing = sorted(set(by_id) - {t["id"] for t in ordered})
        raise CorpusFormatError(
            f"conversation {conversation_id!r}: turn {missing[0]!r} is not "
            f"reachable from the root reply chain"
        )
    return ordered


def load_corpus(path: Union[str, Path], format: str = "utterance-jsonlines") -> Corpus:
    """Load an utterance-JSONL file into an immutable Corpus.

    Dialogues are ordered lexicographically by id, turns by ordinal.
    """
    if format != "utterance-jsonlines":
        raise CorpusFormatError(f"unsupported corpus format {format!r}")
    path = Path(path)
    seen_ids: set[str] = set()
    conversations: dict[str, list[dict]] = {}
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise CorpusFormatError(f"line {lineno}: expected a JSON object")
            turn_id = str(_require(obj, "id", lineno))
            conv_id = str(_require(obj, "conversation_id", lineno))
            speaker = str(_require(obj, "speaker", lineno))
            text = _normalize_text(str(_require(obj, "text", lineno)))
            if not text.strip():
                raise CorpusFormatError(f"line {lineno}: turn {turn_id!r} has empty text")
            if turn_id in seen_ids:
                raise CorpusFormatError(f"line {lineno}: duplicate turn id {turn_id!r}")
            seen_ids.add(turn_id)
            meta = obj.get("meta") or {}
            conversations.setdefault(conv_id, []).append(
                {
                    "id": turn_id,
                    "speaker": speaker,
                    "text": text,
                    "ordinal": obj.get("ordinal"),
                    "reply_to": obj.get("reply_to"),
                    "dialogue_act": meta.get("dialogue_act"),
                }
            )

    dialogues = []
    for conv_id in sorted(conversations):
        raw_turns = conversations[conv_id]
        if all(t["ordinal"] is not None for t in raw_turns):
            raw_turns = sorted(raw_turns, key=lambda t: int(t["ordinal"]))
            ordinals = [int(t["ordinal"]) for t in raw_turns]
            if ordinals != list(range(len(raw_turns))):
                raise CorpusFormatError(
                    f"conversation {conv_id!r}: ordinals must be consecutive "
                    f"from 0, got {ordinals}"
                )
        elif all(t["ordinal"] is None for t in raw_turns):
            raw_turns = _order_by_reply_chain(raw_turns, conv_id)
        else:
            raise CorpusFormatError(
                f"conversation {conv_id!r}: mixes explicit ordinals with "
                f"reply_to ordering"
            )
        turns = tuple(
            Turn(
                turn_id=t["id"],
                dialogue_id=conv_id,
                ordinal=i,
                speaker=t["speaker"],
                text=t["text"],
                dialogue_act=t["dialogue_act"],
            )
            for i, t in enumerate(raw_turns)
        )
        dialogues.append(Dialogue(dialogue_id=conv_id, turns=turns))
    return Corpus(dialogues=tuple(dialogues))


def save_corpus(corpus: Corpus, path: Union[str, Path]) -> None:
    """Write a Corpus back to utterance JSONL (the load_corpus schema)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for dialogue in corpus.dialogues:
            for turn in dialogue.turns:
                obj: dict = {
                    "id": turn.turn_id,
                    "conversation_id": turn.dialogue_id,
                    "speaker": turn.speaker,
                    "text": turn.text,
                    "ordinal": turn.ordinal,
                }
                if turn.dialogue_act is not None:
                    obj["meta"] = {"dialogue_act": turn.dialogue_act}
                handle.write(json.dumps(obj, ensure_ascii=False) + "\n")


# -- fine-grained label normalization --

_MAP_TARGETS = {"yes": Label.YES, "no": Label.NO, "middle": Label.MIDDLE, "discard": None}


@dataclass(frozen=True)
class FineLabelMap:
    """Maps source-corpus interpretation labels onto the 3-label scheme.

    A None target means the source label is discarded rather than mapped.
    """

    entries: dict[str, Optional[Label]] = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "FineLabelMap":
        entries: dict[str, Optional[Label]] = {}
        for source, target in pairs:
            key = target.strip().lower()
            if key not in _MAP_TARGETS:
                raise UnmappedLabelError(
                    f"label map target must be yes/no/middle/discard, got {target!r}"
                )
            entries[source] = _MAP_TARGETS[key]
        return cls(entries=entries)

    @classmethod
    def from_tsv(cls, path: Union[str, Path]) -> "FineLabelMap":
        """Read a two-column TSV: source_label TAB yes|no|middle|discard."""
        pairs = []
        with Path(path).open("r", encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise CorpusFormatError(
                        f"{path}: line {lineno}: expected 2 tab-separated columns"
                    )
                pairs.append((parts[0], parts[1]))
        return cls.from_pairs(pairs)

    def to_tsv(self, path: Union[str, Path]) -> None:
        with Path(path).open("w", encoding="utf-8") as handle:
            for source, target in self.entries.items():
                value = target.value if target is not None else "discard"
                handle.write(f"{source}\t{value}\n")


def normalize_label(source_label: str, label_map: FineLabelMap) -> Optional[Label]:
    """Map a fine-grained source label to Label, or None for Discard."""
    if source_label not in label_map.entries:
        raise UnmappedLabelError(f"no mapping for source label {source_label!r}")
    return label_map.entries[source_label]


def bundled_label_map(name: str) -> FineLabelMap:
    """Load one of the label maps shipped with the package ("circa", "swda_ia")."""
    data_dir = Path(__file__).parent / "data"
    path = data_dir / f"{name}_label_map.tsv"
    if not path.exists():
        available = sorted(p.stem.replace("_label_map", "") for p in data_dir.glob("*_label_map.tsv"))
        raise UnmappedLabelError(f"no bundled label map {name!r}; available: {available}")
    return FineLabelMap.from_tsv(path)
