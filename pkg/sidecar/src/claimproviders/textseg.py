"""Sentence segmentation and tokenization.

The segmentation rules are kept in lockstep with the claim-matching engine
that consumes our output files: terminators ``. ! ?``, runs of terminators
collapse, trailing close-quotes/brackets stay attached, and a dot after a
known abbreviation does not end the sentence.  The contract tests pin the
agreement on a shared fixture corpus.
"""

from __future__ import annotations

import importlib.resources
import re

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_TERMINATORS = ".!?"
_CLOSERS = "\"')]’”"


def _load_abbreviations() -> frozenset[str]:
    ref = importlib.resources.files("claimproviders").joinpath("resources/abbreviations.txt")
    words = []
    for line in ref.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line.lower())
    return frozenset(words)


_ABBREVIATIONS = _load_abbreviations()


def tokens(text: str) -> list[str]:
    """Lowercased alphanumeric runs (underscore excluded)."""
    return [t.lower() for t in _TOKEN_RE.findall(text)]


def _preceding_word(text: str, boundary_start: int, dot_pos: int) -> str:
    w = dot_pos
    while w > boundary_start and not text[w - 1].isspace():
        w -= 1
    return text[w:dot_pos].lstrip("\"'([{“‘").lower()


def split_sentences(text: str) -> list[str]:
    """Segment ``text`` into sentences; concatenating the output reconstructs
    the input modulo whitespace."""
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
