"""ynkit: yes-no questions in dialogue, end to end.

Identify yes-no questions with high-precision rules, harvest distantly
supervised training instances from direct answers, build merge/blended
training curricula, train a deterministic linear answer-interpretation
classifier, and compute the usual evaluation statistics.
"""

from .corpus import Corpus, Dialogue, Label, Turn, load_corpus, save_corpus
from .distant import QAInstance, read_instances, write_instances
from .errors import YnkitError

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "Dialogue",
    "Label",
    "QAInstance",
    "Turn",
    "YnkitError",
    "load_corpus",
    "save_corpus",
    "read_instances",
    "write_instances",
    "__version__",
]
