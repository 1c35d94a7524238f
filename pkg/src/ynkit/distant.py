"""Distant supervision: strict matches -> weakly labeled training instances.

A direct answer whose first sentences contain only yes-polarity keywords
becomes a Yes instance, only no-polarity keywords a No instance; answers
showing both polarities (or neither) are dropped for precision. The polar
keyword is kept verbatim in the answer text.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from .corpus import Corpus, Label, parse_label, split_sentences, tokenize
from .errors import CorpusFormatError, MalformedMatchError, UnlabeledInstanceError
from .qid import QidMatch

DEFAULT_YES_KEYWORDS = frozenset({"yes", "yea", "yup", "yep", "yeah", "sure"})
DEFAULT_NO_KEYWORDS = frozenset({"no", "nope"})

# Keyword search window in sentences; mirrors the strict-rule direct-answer
# window so label_direct_answer never fires where has_direct_answer is false.
ANSWER_SENTENCE_WINDOW = 2


@dataclass(frozen=True)
class DistantConfig:
    yes_keywords: frozenset[str] = DEFAULT_YES_KEYWORDS
    no_keywords: frozenset[str] = DEFAULT_NO_KEYWORDS
    context_window: int = 1  # preceding turns included as context

    def __post_init__(self):
        overlap = self.yes_keywords & self.no_keywords
        if overlap:
            raise ValueError(f"yes_keywords and no_keywords overlap: {sorted(overlap)}")


@dataclass(frozen=True)
class QAInstance:
    """A (context, question, answer, label) record for training or evaluation.

    source is "gold" for human-annotated data and "distant" for
    keyword-harvested data; distant instances are never labeled Middle.
    """

    context: tuple[str, ...]
    question: str
    answer: str
    label: Optional[Label]
    source: str
    origin_ids: tuple[str, str, str]  # (dialogue_id, question_turn_id, answer_turn_id)

    def __post_init__(self):
        if not self.question or not self.answer:
            raise ValueError("question and answer must be non-empty")
        if self.source == "distant" and self.label not in (Label.YES, Label.NO):
            raise ValueError("distant instances must be labeled Yes or No")


def label_direct_answer(answer_text: str, config: DistantConfig = DistantConfig()) -> Optional[Label]:
    """Yes/No if exactly one polarity's keywords appear in the first two
    sentences; None when neither or both appear."""
    tokens = []
    for sentence in split_sentences(answer_text)[:ANSWER_SENTENCE_WINDOW]:
        tokens.extend(t.lower() for t in tokenize(sentence))
    saw_yes = any(t in config.yes_keywords for t in tokens)
    saw_no = any(t in config.no_keywords for t in tokens)
    if saw_yes and not saw_no:
        return Label.YES
    if saw_no and not saw_yes:
        return Label.NO
    return None


def extract_distant_instances(
    corpus: Corpus,
    matches: Iterable[QidMatch],
    config: DistantConfig = DistantConfig(),
) -> list[QAInstance]:
    """One distant QAInstance per match whose answer labels Yes or No.

    Context holds up to context_window turns preceding the question, most
    recent last. Matches without an answer turn are rejected.
    """
    by_dialogue = {d.dialogue_id: d for d in corpus}
    instances = []
    for match in matches:
        if match.answer is None:
            raise MalformedMatchError(
                f"match on turn {match.question.turn_id!r} has no answer turn"
            )
        label = label_direct_answer(match.answer.text, config)
        if label is None:
            continue
        dialogue = by_dialogue[match.question.dialogue_id]
        start = max(0, match.question.ordinal - config.context_window)
        context = tuple(t.text for t in dialogue.turns[start : match.question.ordinal])
        instances.append(
            QAInstance(
                context=context,
                question=match.question.text,
                answer=match.answer.text,
                label=label,
                source="distant",
                origin_ids=(
                    match.question.dialogue_id,
                    match.question.turn_id,
                    match.answer.turn_id,
                ),
            )
        )
    return instances


def balance_dataset(instances: list[QAInstance], seed: int) -> list[QAInstance]:
    """Downsample every label class to the minority count, then shuffle.

    Instances are put in canonical origin_ids order before any sampling so
    the result depends only on (input multiset, seed).
    """
    if not instances:
        return []
    if any(inst.label is None for inst in instances):
        raise UnlabeledInstanceError("balance_dataset requires labeled instances")
    ordered = sorted(instances, key=lambda inst: inst.origin_ids)
    groups: dict[Label, list[QAInstance]] = {}
    for inst in ordered:
        groups.setdefault(inst.label, []).append(inst)
    minority = min(len(g) for g in groups.values())
    rng = random.Random(seed)
    kept: list[QAInstance] = []
    for label in sorted(groups, key=lambda l: l.value):
        kept.extend(rng.sample(groups[label], minority))
    rng.shuffle(kept)
    return kept


# -- QAInstance interchange format (shared by gold and distant data) --


def instance_to_dict(inst: QAInstance) -> dict:
    return {
        "context": list(inst.context),
        "question": inst.question,
        "answer": inst.answer,
        "label": inst.label.value if inst.label is not None else None,
        "source": inst.source,
        "origin": {
            "dialogue_id": inst.origin_ids[0],
            "question_turn_id": inst.origin_ids[1],
            "answer_turn_id": inst.origin_ids[2],
        },
    }


def instance_from_dict(obj: dict) -> QAInstance:
    origin = obj.get("origin") or {}
    label = obj.get("label")
    return QAInstance(
        context=tuple(obj.get("context") or ()),
        question=obj["question"],
        answer=obj["answer"],
        label=parse_label(label) if label is not None else None,
        source=obj.get("source", "gold"),
        origin_ids=(
            origin.get("dialogue_id", ""),
            origin.get("question_turn_id", ""),
            origin.get("answer_turn_id", ""),
        ),
    )


def write_instances(instances: Iterable[QAInstance], path: Union[str, Path]) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for inst in instances:
            handle.write(json.dumps(instance_to_dict(inst), ensure_ascii=False) + "\n")


def read_instances(path: Union[str, Path]) -> list[QAInstance]:
    instances = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            try:
                instances.append(instance_from_dict(obj))
            except (KeyError, ValueError) as exc:
                raise CorpusFormatError(f"line {lineno}: bad instance record ({exc})") from None
    return instances
