"""Text normalization and tokenization applied before featurization."""
import re
from dataclasses import dataclass, field
from importlib import resources

from appsent.porter import stem

_URL = re.compile(r"(?:[a-z][a-z0-9+.\-]*://|www\.)\S*")
_TAG = re.compile(r"<[^>]*>")
_APOSTROPHE = re.compile(r"['’‘`]")
_NON_ASCII = re.compile(r"[^\x00-\x7f]")
_NOT_LETTER = re.compile(r"[^a-z\s]")
_SPACES = re.compile(r"\s+")


def normalize(text):
    """Lowercase ``text`` and strip URLs, tags, digits, punctuation and non-ASCII.

    Apostrophes are deleted so contractions stay one word ("it's" -> "its").
    Every other removed character becomes a space.
    """
    text = _APOSTROPHE.sub("", text)
    text = _NON_ASCII.sub(" ", text).lower()
    text = _URL.sub(" ", text)
    text = _TAG.sub(" ", text)
    text = _NOT_LETTER.sub(" ", text)
    return _SPACES.sub(" ", text).strip()


def tokenize(text):
    return text.split(" ") if text else []


def remove_stopwords(tokens, stoplist):
    return [t for t in tokens if t not in stoplist]


def substitute(tokens, table):
    out = []
    for t in tokens:
        if t in table:
            out.extend(table[t])
        else:
            out.append(t)
    return out


def _data_lines(name):
    text = resources.files("appsent.data").joinpath(name).read_text(encoding="utf-8")
    return text.splitlines()


def read_stopwords(path=None):
    lines = (_data_lines("stopwords.txt") if path is None
             else open(path, encoding="utf-8").read().splitlines())
    return frozenset(ln.strip().lower() for ln in lines
                     if ln.strip() and not ln.startswith("#"))


def read_substitutions(path=None):
    """Parse a ``token<TAB>replacement`` table. Replacements may be several words."""
    lines = (_data_lines("substitutions.tsv") if path is None
             else open(path, encoding="utf-8").read().splitlines())
    table = {}
    for ln in lines:
        if not ln.strip() or ln.startswith("#"):
            continue
        token, _, replacement = ln.partition("\t")
        table[token.strip().lower()] = tokenize(normalize(replacement))
    return table


DEFAULT_STOPWORDS = read_stopwords()


@dataclass(frozen=True)
class PipelineConfig:
    remove_stopwords: bool = True
    apply_stemming: bool = True
    stopword_list: frozenset = DEFAULT_STOPWORDS
    substitutions: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        if any(w != w.lower() for w in self.stopword_list):
            raise ValueError("stopword_list entries must be lowercase")


# Lexicon scoring works on surface forms with every word kept.
LEXICON_PIPELINE = PipelineConfig(remove_stopwords=False, apply_stemming=False)


def preprocess(text, config=PipelineConfig()):
    tokens = tokenize(normalize(text))
    if config.substitutions:
        tokens = substitute(tokens, config.substitutions)
    if config.remove_stopwords:
        tokens = remove_stopwords(tokens, config.stopword_list)
    if config.apply_stemming:
        tokens = [stem(t) for t in tokens]
    return tokens
