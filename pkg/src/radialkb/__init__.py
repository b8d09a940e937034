"""Ambiguous radial keyboard toolkit.

Optimizes a one-dimensional ambiguous keyboard layout from eyes-free tap
data and a frequency lexicon, decodes noisy key sequences into ranked word
candidates, drives a gesture-based typing state machine with full session
logging, and measures text-entry performance.
"""

__version__ = "0.1.0"

from .corpus import (
    LetterFrequencyTable,
    Lexicon,
    LexiconEntry,
    PhraseSet,
    letter_frequencies,
    load_letter_frequencies,
    load_lexicon,
    load_phrases,
)
from .geometry import (
    ALPHABET,
    CalibrationProfile,
    ClusterKey,
    ClusterLayout,
    Foot,
    Keyboard,
    LetterLayout,
    Posture,
    angle_to_normalized,
    letter_to_key,
    load_keyboard,
    normalized_to_key,
    save_keyboard,
    uniform_cluster_layout,
    word_key_signature,
)

__all__ = [
    "ALPHABET",
    "CalibrationProfile",
    "ClusterKey",
    "ClusterLayout",
    "Foot",
    "Keyboard",
    "LetterFrequencyTable",
    "LetterLayout",
    "Lexicon",
    "LexiconEntry",
    "PhraseSet",
    "Posture",
    "angle_to_normalized",
    "letter_frequencies",
    "letter_to_key",
    "load_keyboard",
    "load_letter_frequencies",
    "load_lexicon",
    "load_phrases",
    "normalized_to_key",
    "save_keyboard",
    "uniform_cluster_layout",
    "word_key_signature",
]
