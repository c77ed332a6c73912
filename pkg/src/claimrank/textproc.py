"""Deterministic tokenization and sentence segmentation.

Both operations are pure functions of their inputs, so indexes and feature
files built from them are reproducible bit-for-bit. The tokenizer
configuration is hashed and embedded in every downstream artifact to keep
differently-configured components from being mixed.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from importlib import resources

from . import porter

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_TERMINATORS = ".!?"
_CLOSERS = "\"')]’”"

STEMMERS = ("none", "porter")


def _load_resource_words(name: str) -> frozenset[str]:
    text = resources.files("claimrank.resources").joinpath(name).read_text("utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


def load_wordlist(path) -> frozenset[str]:
    """Read a plain-text word list, one entry per line, blank lines ignored."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip().lower() for line in fh if line.strip())


def default_stopwords() -> frozenset[str]:
    return _load_resource_words("stopwords.txt")


_ABBREVIATIONS = _load_resource_words("abbreviations.txt")


@dataclass(frozen=True)
class TokenizerConfig:
    """Tokenizer switches; the defaults leave terms raw for BM25.

    ``strip_punctuation`` on means tokens are maximal alphanumeric runs
    (Unicode-aware, underscore excluded); off means plain whitespace
    splitting with punctuation kept.
    """

    lowercase: bool = True
    strip_punctuation: bool = True
    stopwords: frozenset[str] | None = None
    stemmer: str = "none"

    def __post_init__(self):
        if self.stemmer not in STEMMERS:
            raise ValueError(f"unknown stemmer {self.stemmer!r}; expected one of {STEMMERS}")
        if self.stopwords is not None and not isinstance(self.stopwords, frozenset):
            object.__setattr__(self, "stopwords", frozenset(self.stopwords))

    def to_dict(self) -> dict:
        return {
            "lowercase": self.lowercase,
            "strip_punctuation": self.strip_punctuation,
            "stopwords": sorted(self.stopwords) if self.stopwords is not None else None,
            "stemmer": self.stemmer,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TokenizerConfig":
        stop = d.get("stopwords")
        return cls(
            lowercase=d.get("lowercase", True),
            strip_punctuation=d.get("strip_punctuation", True),
            stopwords=frozenset(stop) if stop is not None else None,
            stemmer=d.get("stemmer", "none"),
        )

    def config_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


DEFAULT_TOKENIZER = TokenizerConfig()


def tokenize(text: str, config: TokenizerConfig | None = None) -> list[str]:
    """Split ``text`` into tokens under ``config`` (defaults apply otherwise)."""
    cfg = config if config is not None else DEFAULT_TOKENIZER
    if cfg.strip_punctuation:
        tokens = _TOKEN_RE.findall(text)
    else:
        tokens = text.split()
    if cfg.lowercase:
        tokens = [t.lower() for t in tokens]
    if cfg.stopwords:
        tokens = [t for t in tokens if t not in cfg.stopwords]
    if cfg.stemmer == "porter":
        tokens = [porter.stem(t) for t in tokens]
    return tokens


def _preceding_word(text: str, boundary_start: int, dot_pos: int) -> str:
    w = dot_pos
    while w > boundary_start and not text[w - 1].isspace():
        w -= 1
    return text[w:dot_pos].lstrip("\"'([{“‘").lower()


def split_sentences(text: str) -> list[str]:
    """Segment ``text`` into sentences on ``. ! ?`` with an abbreviation guard.

    Every non-whitespace character of the input lands in exactly one
    returned sentence, so concatenating the output reconstructs the input
    modulo whitespace.
    """
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        if text[i] not in _TERMINATORS:
            i += 1
            continue
        run_end = i
        while run_end + 1 < n and text[run_end + 1] in _TERMINATORS:
            run_end += 1
        # trailing close-quotes/brackets belong to the sentence
        span_end = run_end
        while span_end + 1 < n and text[span_end + 1] in _CLOSERS:
            span_end += 1
        at_eot = span_end + 1 >= n
        before_space = not at_eot and text[span_end + 1].isspace()
        is_boundary = at_eot or before_space
        if is_boundary and run_end == i and text[i] == ".":
            if _preceding_word(text, start, i) in _ABBREVIATIONS:
                is_boundary = False
        if is_boundary:
            chunk = text[start : span_end + 1].strip()
            if chunk:
                sentences.append(chunk)
            start = span_end + 1
        i = span_end + 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences
