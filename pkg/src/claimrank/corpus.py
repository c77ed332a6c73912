"""Dataset model, JSONL ingestion with validation, and train/test splits.

A loaded bundle is immutable: loading is the only writer, and readers may
share a bundle freely across threads.
"""

from __future__ import annotations

import datetime
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

CATEGORIES = ("clean", "clean-hard", "part-of", "context-dep", "unlabeled")
SPLIT_KINDS = ("chrono", "semi_chrono", "debate_random", "sentence_random")

# All seeded behaviour in the engine draws from numpy's PCG64 so that splits
# and subsamples are bit-reproducible across platforms.
def rng_from_seed(*entropy: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(entropy))))


class CorpusError(ValueError):
    """Raised on schema violations, dangling references or duplicate ids."""


@dataclass(frozen=True)
class VerifiedClaim:
    id: str
    ver_claim: str
    title: str
    body: str
    url: str | None = None
    date: str | None = None


@dataclass(frozen=True)
class TranscriptSentence:
    debate_id: str
    line_no: int
    speaker: str
    text: str
    resolved_text: str | None = None


@dataclass(frozen=True)
class Transcript:
    debate_id: str
    event_date: str | None
    sentences: tuple[TranscriptSentence, ...]

    def line_numbers(self) -> frozenset[int]:
        return frozenset(s.line_no for s in self.sentences)


@dataclass(frozen=True)
class ClaimPair:
    debate_id: str
    line_nos: tuple[int, ...]
    ver_claim_ids: tuple[str, ...]
    category: str = "unlabeled"

    @property
    def query_id(self) -> str:
        return f"{self.debate_id}:{'+'.join(str(n) for n in self.line_nos)}"


@dataclass(frozen=True)
class SplitSpec:
    kind: str
    train_ratio: float = 0.8
    seed: int | None = None
    chrono_train_debates: int = 50
    chrono_test_debates: int = 20

    def __post_init__(self):
        if self.kind not in SPLIT_KINDS:
            raise CorpusError(f"unknown split kind {self.kind!r}; expected one of {SPLIT_KINDS}")
        if not 0.0 < self.train_ratio < 1.0:
            raise CorpusError(f"train_ratio must be in (0,1), got {self.train_ratio}")
        if self.chrono_train_debates <= 0 or self.chrono_test_debates <= 0:
            raise CorpusError("chrono debate counts must be positive")
        if self.kind in ("semi_chrono", "debate_random", "sentence_random") and self.seed is None:
            raise CorpusError(f"split kind {self.kind!r} requires a seed")


@dataclass(frozen=True)
class DatasetBundle:
    claims: tuple[VerifiedClaim, ...]
    transcripts: tuple[Transcript, ...]
    pairs: tuple[ClaimPair, ...]
    claims_by_id: dict[str, VerifiedClaim] = field(repr=False, default_factory=dict)
    transcripts_by_id: dict[str, Transcript] = field(repr=False, default_factory=dict)

    def category_counts(self) -> dict[str, int]:
        counts = {c: 0 for c in CATEGORIES}
        for p in self.pairs:
            counts[p.category] += 1
        return counts


def _read_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{line_no}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise CorpusError(f"{path}:{line_no}: expected a JSON object")
            yield line_no, obj


def _require(obj, key, typ, path, line_no):
    if key not in obj:
        raise CorpusError(f"{path}:{line_no}: missing required field {key!r}")
    value = obj[key]
    if typ is int and isinstance(value, bool):
        raise CorpusError(f"{path}:{line_no}: field {key!r} must be an integer")
    if not isinstance(value, typ):
        raise CorpusError(f"{path}:{line_no}: field {key!r} has wrong type ({type(value).__name__})")
    return value


def _check_iso_date(value, where):
    try:
        datetime.date.fromisoformat(value)
    except ValueError as exc:
        raise CorpusError(f"{where}: not an ISO-8601 date: {value!r}") from exc


def _check_id(value, where, label):
    # ids end up in whitespace-delimited run files and colon/plus query ids
    if not value or any(ch.isspace() for ch in value):
        raise CorpusError(f"{where}: {label} must be non-empty and whitespace-free: {value!r}")


def _load_claims(path) -> tuple[VerifiedClaim, ...]:
    claims = []
    seen = set()
    for line_no, obj in _read_jsonl(path):
        cid = _require(obj, "id", str, path, line_no)
        _check_id(cid, f"{path}:{line_no}", "claim id")
        if cid in seen:
            raise CorpusError(f"{path}:{line_no}: duplicate claim id {cid!r}")
        seen.add(cid)
        ver_claim = _require(obj, "ver_claim", str, path, line_no)
        if not ver_claim.strip():
            raise CorpusError(f"{path}:{line_no}: ver_claim must be non-empty")
        title = _require(obj, "title", str, path, line_no)
        body = _require(obj, "body", str, path, line_no)
        url = obj.get("url")
        date = obj.get("date")
        if url is not None and not isinstance(url, str):
            raise CorpusError(f"{path}:{line_no}: field 'url' has wrong type")
        if date is not None:
            if not isinstance(date, str):
                raise CorpusError(f"{path}:{line_no}: field 'date' has wrong type")
            _check_iso_date(date, f"{path}:{line_no}")
        claims.append(VerifiedClaim(cid, ver_claim, title, body, url, date))
    return tuple(claims)


def _load_transcripts(path) -> tuple[Transcript, ...]:
    by_debate: dict[str, list[TranscriptSentence]] = {}
    dates: dict[str, str | None] = {}
    order: list[str] = []
    for line_no, obj in _read_jsonl(path):
        debate_id = _require(obj, "debate_id", str, path, line_no)
        _check_id(debate_id, f"{path}:{line_no}", "debate id")
        n = _require(obj, "line_no", int, path, line_no)
        if n <= 0:
            raise CorpusError(f"{path}:{line_no}: line_no must be positive")
        speaker = _require(obj, "speaker", str, path, line_no)
        text = _require(obj, "text", str, path, line_no)
        event_date = obj.get("event_date")
        if event_date is not None:
            if not isinstance(event_date, str):
                raise CorpusError(f"{path}:{line_no}: field 'event_date' has wrong type")
            _check_iso_date(event_date, f"{path}:{line_no}")
        if debate_id not in by_debate:
            by_debate[debate_id] = []
            dates[debate_id] = event_date
            order.append(debate_id)
        else:
            if event_date != dates[debate_id]:
                raise CorpusError(
                    f"{path}:{line_no}: event_date {event_date!r} disagrees with earlier "
                    f"lines of debate {debate_id!r} ({dates[debate_id]!r})"
                )
            prev = by_debate[debate_id][-1].line_no
            if n <= prev:
                raise CorpusError(
                    f"{path}:{line_no}: line_no {n} not strictly increasing "
                    f"within debate {debate_id!r} (previous {prev})"
                )
        by_debate[debate_id].append(TranscriptSentence(debate_id, n, speaker, text))
    return tuple(
        Transcript(d, dates[d], tuple(by_debate[d])) for d in order
    )


def _load_pairs(path, claims_by_id, transcripts_by_id) -> tuple[ClaimPair, ...]:
    pairs = []
    for line_no, obj in _read_jsonl(path):
        debate_id = _require(obj, "debate_id", str, path, line_no)
        if debate_id not in transcripts_by_id:
            raise CorpusError(f"{path}:{line_no}: unknown debate_id {debate_id!r}")
        line_nos = _require(obj, "line_nos", list, path, line_no)
        if not line_nos:
            raise CorpusError(f"{path}:{line_no}: line_nos must be non-empty")
        known_lines = transcripts_by_id[debate_id].line_numbers()
        for ln in line_nos:
            if isinstance(ln, bool) or not isinstance(ln, int):
                raise CorpusError(f"{path}:{line_no}: line_nos entries must be integers")
            if ln not in known_lines:
                raise CorpusError(
                    f"{path}:{line_no}: line_no {ln} not present in debate {debate_id!r}"
                )
        if len(set(line_nos)) != len(line_nos):
            raise CorpusError(f"{path}:{line_no}: duplicate entries in line_nos")
        line_nos = sorted(line_nos)
        cids = _require(obj, "ver_claim_ids", list, path, line_no)
        if not cids:
            raise CorpusError(f"{path}:{line_no}: ver_claim_ids must be non-empty")
        for cid in cids:
            if not isinstance(cid, str):
                raise CorpusError(f"{path}:{line_no}: ver_claim_ids entries must be strings")
            if cid not in claims_by_id:
                raise CorpusError(f"{path}:{line_no}: unknown ver_claim_id {cid!r}")
        category = obj.get("category", "unlabeled")
        if category is None:
            category = "unlabeled"
        if category not in CATEGORIES:
            raise CorpusError(
                f"{path}:{line_no}: unknown category {category!r}; expected one of {CATEGORIES}"
            )
        pairs.append(ClaimPair(debate_id, tuple(line_nos), tuple(cids), category))
    return tuple(pairs)


def load_corpus(claims_path, transcripts_path, pairs_path) -> DatasetBundle:
    """Load and cross-validate the three JSONL inputs into one bundle."""
    claims = _load_claims(claims_path)
    claims_by_id = {c.id: c for c in claims}
    transcripts = _load_transcripts(transcripts_path)
    transcripts_by_id = {t.debate_id: t for t in transcripts}
    pairs = _load_pairs(pairs_path, claims_by_id, transcripts_by_id)
    bundle = DatasetBundle(claims, transcripts, pairs, claims_by_id, transcripts_by_id)
    counts = bundle.category_counts()
    logger.info(
        "loaded %d claims, %d transcripts, %d pairs (%s)",
        len(claims),
        len(transcripts),
        len(pairs),
        ", ".join(f"{k}={v}" for k, v in counts.items() if v),
    )
    return bundle


def _ceil_ratio(ratio: float, n: int) -> int:
    # guard against float noise like 0.8 * 70 = 56.000000000000004
    return min(n, math.ceil(ratio * n - 1e-9))


def _pairs_by_debate(bundle: DatasetBundle) -> dict[str, list[int]]:
    out: dict[str, list[int]] = {t.debate_id: [] for t in bundle.transcripts}
    for i, p in enumerate(bundle.pairs):
        out[p.debate_id].append(i)
    return out


def _chrono_order(bundle: DatasetBundle, kind: str) -> list[Transcript]:
    for t in bundle.transcripts:
        if t.event_date is None:
            raise CorpusError(
                f"split kind {kind!r} requires event_date on every transcript; "
                f"debate {t.debate_id!r} has none"
            )
    return sorted(bundle.transcripts, key=lambda t: (t.event_date, t.debate_id))


def split(bundle: DatasetBundle, spec: SplitSpec) -> tuple[list[int], list[int]]:
    """Partition pair indices into (train, test) according to ``spec``.

    Debate-level kinds assign whole debates to one side, so no debate
    contributes pairs to both.
    """
    by_debate = _pairs_by_debate(bundle)

    def collect(debates) -> list[int]:
        out: list[int] = []
        for t in debates:
            out.extend(by_debate[t.debate_id])
        return sorted(out)

    if spec.kind == "chrono":
        ordered = _chrono_order(bundle, spec.kind)
        need = spec.chrono_train_debates + spec.chrono_test_debates
        if len(ordered) < need:
            raise CorpusError(
                f"chrono split needs at least {need} debates, corpus has {len(ordered)}"
            )
        train = collect(ordered[: spec.chrono_train_debates])
        test = collect(ordered[len(ordered) - spec.chrono_test_debates :])
        return train, test

    if spec.kind == "semi_chrono":
        ordered = _chrono_order(bundle, spec.kind)
        train: list[int] = []
        test: list[int] = []
        years = sorted({t.event_date[:4] for t in ordered})
        for year in years:
            group = [t for t in ordered if t.event_date.startswith(year)]
            n_train = _ceil_ratio(spec.train_ratio, len(group))
            train.extend(collect(group[:n_train]))
            test.extend(collect(group[n_train:]))
        return sorted(train), sorted(test)

    if spec.kind == "debate_random":
        rng = rng_from_seed(spec.seed)
        debates = list(bundle.transcripts)
        perm = rng.permutation(len(debates))
        shuffled = [debates[i] for i in perm]
        n_train = _ceil_ratio(spec.train_ratio, len(shuffled))
        return collect(shuffled[:n_train]), collect(shuffled[n_train:])

    # sentence_random: shuffle pairs directly
    rng = rng_from_seed(spec.seed)
    perm = rng.permutation(len(bundle.pairs))
    n_train = _ceil_ratio(spec.train_ratio, len(bundle.pairs))
    train_idx = sorted(int(i) for i in perm[:n_train])
    test_idx = sorted(int(i) for i in perm[n_train:])
    return train_idx, test_idx


def save_split(path, spec: SplitSpec, train: list[int], test: list[int]) -> None:
    payload = {
        "kind": spec.kind,
        "seed": spec.seed,
        "train": list(train),
        "test": list(test),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_split(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    for key in ("kind", "seed", "train", "test"):
        if key not in payload:
            raise CorpusError(f"{path}: split file missing key {key!r}")
    return payload
