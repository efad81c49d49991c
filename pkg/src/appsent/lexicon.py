"""Lexicon-based polarity and subjectivity scoring.

A review is scanned left to right. Each sentiment word opens a chunk that
also takes up to two modifiers (intensifiers or negators) found right
before it; articles between a modifier and the word are skipped, so "not a
very great app" puts ``not``, ``very`` and ``great`` in one chunk.

Chunk polarity is the word's polarity times the product of intensities,
clamped to [-1, 1]. If the chunk holds a negator, it is instead the
polarity times -0.5 divided by the intensity product. Document scores are
the means over chunks.
"""
import enum
import hashlib
from dataclasses import dataclass
from importlib import resources

from appsent.sentiment import Sentiment
from appsent.textprep import LEXICON_PIPELINE, preprocess

NEGATION_FACTOR = -0.5
MAX_MODIFIERS = 2
TRANSPARENT = frozenset({"a", "an", "the"})


class Role(enum.Enum):
    Sentiment = "Sentiment"
    Intensifier = "Intensifier"
    Negator = "Negator"


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    polarity: float
    subjectivity: float
    intensity: float = 1.0
    role: Role = Role.Sentiment


@dataclass(frozen=True)
class SentimentScore:
    polarity: float
    subjectivity: float
    orientation: Sentiment


class Lexicon:
    """Word to :class:`LexiconEntry` mapping plus load diagnostics and a content digest."""

    def __init__(self, entries, diagnostics=(), digest=""):
        self.entries = dict(entries)
        self.diagnostics = list(diagnostics)
        self.digest = digest

    def __getitem__(self, word):
        return self.entries[word]

    def __contains__(self, word):
        return word in self.entries

    def __len__(self):
        return len(self.entries)

    def get(self, word, default=None):
        return self.entries.get(word, default)


def _parse_entry(fields):
    word, role, polarity, subjectivity, intensity = fields
    role = Role(role)
    polarity, subjectivity, intensity = float(polarity), float(subjectivity), float(intensity)
    if not -1.0 <= polarity <= 1.0:
        raise ValueError(f"polarity {polarity} outside [-1, 1]")
    if not 0.0 <= subjectivity <= 1.0:
        raise ValueError(f"subjectivity {subjectivity} outside [0, 1]")
    if intensity <= 0:
        raise ValueError(f"intensity {intensity} must be positive")
    if role is Role.Sentiment and intensity != 1.0:
        raise ValueError("sentiment entries carry intensity 1")
    if role is not Role.Sentiment and polarity != 0.0:
        raise ValueError("modifier entries carry polarity 0")
    return LexiconEntry(word.lower(), polarity, subjectivity, intensity, role)


def parse_lexicon(text):
    entries = {}
    diagnostics = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split()
        try:
            if len(fields) != 5:
                raise ValueError(f"expected 5 fields, got {len(fields)}")
            entry = _parse_entry(fields)
        except ValueError as err:
            diagnostics.append((lineno, str(err)))
            continue
        if entry.word in entries:
            diagnostics.append((lineno, f"duplicate word {entry.word!r}, last wins"))
        entries[entry.word] = entry
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return Lexicon(entries, diagnostics, digest)


def load_lexicon(path=None):
    """Load a lexicon TSV; ``None`` loads the shipped one."""
    if path is None:
        text = resources.files("appsent.data").joinpath("lexicon.tsv").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return parse_lexicon(text)


def orientation_of(polarity):
    if polarity > 0:
        return Sentiment.Positive
    if polarity < 0:
        return Sentiment.Negative
    return Sentiment.Neutral


def _clamp(x, lo, hi):
    return max(lo, min(hi, x))


def _modifiers_before(tokens, i, lexicon):
    mods = []
    j = i - 1
    while j >= 0 and len(mods) < MAX_MODIFIERS:
        entry = lexicon.get(tokens[j])
        if entry is not None and entry.role is not Role.Sentiment:
            mods.append(entry)
        elif tokens[j] not in TRANSPARENT:
            break
        j -= 1
    return mods


def chunk_polarity(base, modifiers):
    product = 1.0
    for m in modifiers:
        if m.role is Role.Intensifier:
            product *= m.intensity
    if any(m.role is Role.Negator for m in modifiers):
        return _clamp(base * NEGATION_FACTOR / product, -1.0, 1.0)
    return _clamp(base * product, -1.0, 1.0)


def score_text(tokens, lexicon):
    polarities = []
    subjectivities = []
    for i, tok in enumerate(tokens):
        entry = lexicon.get(tok)
        if entry is None or entry.role is not Role.Sentiment:
            continue
        polarities.append(chunk_polarity(entry.polarity, _modifiers_before(tokens, i, lexicon)))
        subjectivities.append(entry.subjectivity)
    if not polarities:
        return SentimentScore(0.0, 0.0, Sentiment.Neutral)
    polarity = sum(polarities) / len(polarities)
    subjectivity = sum(subjectivities) / len(subjectivities)
    return SentimentScore(polarity, subjectivity, orientation_of(polarity))


def score_document(text, lexicon):
    return score_text(preprocess(text, LEXICON_PIPELINE), lexicon)
