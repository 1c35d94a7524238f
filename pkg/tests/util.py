"""Shared test helpers: small seeded random corpora."""

import random

from ynkit.corpus import Corpus, Dialogue, Turn

_WORDS = (
    "do", "did", "is", "are", "was", "have", "can", "could", "will", "would",
    "what", "when", "where", "who", "why", "how",
    "yes", "yeah", "yep", "sure", "no", "nope", "nobody", "noon",
    "you", "they", "we", "it", "the", "a", "plan", "game", "lunch", "story",
    "really", "still", "maybe", "later", "fine", "great", "think", "know",
)


def random_corpus(seed: int, n_dialogues: int = 3, max_turns: int = 5) -> Corpus:
    """Token soup with realistic trap words (aux, wh, keywords, 'nobody')."""
    rng = random.Random(seed)
    dialogues = []
    for d in range(n_dialogues):
        dialogue_id = f"r{seed}-{d}"
        turns = []
        for i in range(rng.randint(1, max_turns)):
            words = rng.choices(_WORDS, k=rng.randint(1, 9))
            text = " ".join(words) + rng.choice(["?", ".", "!", "", " ?", "? "])
            turns.append(
                Turn(
                    turn_id=f"{dialogue_id}-t{i}",
                    dialogue_id=dialogue_id,
                    ordinal=i,
                    speaker="AB"[i % 2],
                    text=text,
                )
            )
        dialogues.append(Dialogue(dialogue_id=dialogue_id, turns=tuple(turns)))
    return Corpus(dialogues=tuple(dialogues))
