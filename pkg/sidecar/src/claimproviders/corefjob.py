"""Coreference resolution jobs.

A resolver maps a document string to a list of non-overlapping replacement
edits ``(start, end, replacement)``.  Jobs concatenate a document's units
(transcript lines, or body + " " + claim), run the resolver over the whole
document so it sees full context, then split the edits back per unit by
offset — so re-concatenating the per-unit output reproduces the resolver's
full-document output exactly.

Two resolvers ship in-package: ``identity`` (no edits) and ``heuristic``
(replaces third-person pronouns with the most recent name-like span).
Neural backends can be registered alongside; resolution failure on one
document logs a warning and passes the raw text through, never aborting
the batch.
"""

from __future__ import annotations

import json
import logging
import re

logger = logging.getLogger(__name__)

Edit = tuple[int, int, str]


class CorefError(ValueError):
    pass


def apply_edits(text: str, edits: list[Edit]) -> str:
    """Apply replacement edits; edits must be in-bounds and non-overlapping."""
    pieces = []
    pos = 0
    for start, end, replacement in sorted(edits):
        if start < pos or end > len(text) or start > end:
            raise CorefError(f"edit ({start},{end}) overlaps or escapes the text")
        pieces.append(text[pos:start])
        pieces.append(replacement)
        pos = end
    pieces.append(text[pos:])
    return "".join(pieces)


class IdentityResolver:
    kind = "identity"

    def edits(self, text: str) -> list[Edit]:
        return []


_WORD_RE = re.compile(r"[A-Za-z][A-Za-z']*")
_PRONOUNS = frozenset({"he", "she", "it", "they", "him", "them"})
# capitalized words that never join a name span; sentence-initial adverbs
# and connectives are the usual false positives
_NON_NAME = frozenset("""
    the a an i and but or nor if when while so that this these those there
    then now here not no yes he she it they we you him them her his their
    its our your my mr mrs ms dr is was are were be been am do does did on
    in at to of for with as by from after afterwards again later earlier
    meanwhile however also still yet instead finally next soon today
    yesterday tomorrow perhaps though although because since before until
    during once
""".split())


class HeuristicResolver:
    """Replaces he/she/it/they/him/them with the last name-like span seen.

    A name-like span is a run of up to four capitalized words that are not
    common function words.  Crude, but deterministic and self-contained; it
    exists so the pipeline effect of coreference can be exercised without a
    neural model.
    """

    kind = "heuristic"
    max_span = 4

    def edits(self, text: str) -> list[Edit]:
        out: list[Edit] = []
        antecedent: str | None = None
        run: list[str] = []
        run_end = -2
        for m in _WORD_RE.finditer(text):
            word = m.group(0)
            lower = word.lower()
            name_like = word[0].isupper() and lower not in _NON_NAME

            if name_like:
                gap = text[run_end:m.start()]
                if run and gap.isspace():
                    # keep the most recent max_span words of a long run
                    run = (run + [word])[-self.max_span:]
                else:
                    run = [word]
                run_end = m.end()
                antecedent = " ".join(run)
                continue
            run = []

            if lower in _PRONOUNS and antecedent is not None:
                out.append((m.start(), m.end(), antecedent))
        return out


RESOLVERS = {"identity": IdentityResolver, "heuristic": HeuristicResolver}


def make_resolver(cfg: dict):
    kind = cfg.get("kind", "identity")
    if kind not in RESOLVERS:
        raise CorefError(
            f"unknown resolver kind {kind!r}; expected one of {sorted(RESOLVERS)}"
        )
    return RESOLVERS[kind]()


def resolve_units(resolver, units: list[str], separator: str, doc_label: str) -> list[str]:
    """Resolve a document given as units; return resolved units.

    The resolver sees the separator-joined document.  Edits are assigned to
    units by offset; an edit crossing a unit boundary (or a resolver crash)
    degrades that document to passthrough with a warning.
    """
    document = separator.join(units)
    try:
        edits = resolver.edits(document)
    except Exception as exc:
        logger.warning("resolution failed for %s: %s; passing raw text through",
                       doc_label, exc)
        return list(units)

    starts = []
    pos = 0
    for u in units:
        starts.append(pos)
        pos += len(u) + len(separator)

    per_unit: list[list[Edit]] = [[] for _ in units]
    for start, end, replacement in edits:
        placed = False
        for i, u in enumerate(units):
            if starts[i] <= start and end <= starts[i] + len(u):
                per_unit[i].append((start - starts[i], end - starts[i], replacement))
                placed = True
                break
        if not placed:
            logger.warning("edit (%d,%d) in %s crosses a unit boundary; "
                           "passing raw text through", start, end, doc_label)
            return list(units)
    try:
        return [apply_edits(u, e) for u, e in zip(units, per_unit)]
    except CorefError as exc:
        logger.warning("bad edits for %s: %s; passing raw text through", doc_label, exc)
        return list(units)


def _read_jsonl(path, required):
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorefError(f"{path}:{line_no}: invalid JSON ({exc.msg})") from exc
            for key in required:
                if key not in obj:
                    raise CorefError(f"{path}:{line_no}: missing field {key!r}")
            yield obj


def source_records(transcripts_path, resolver) -> list[dict]:
    """One record per transcript line, resolved with whole-debate context."""
    debates: dict[str, list[dict]] = {}
    for obj in _read_jsonl(transcripts_path, ("debate_id", "line_no", "text")):
        debates.setdefault(obj["debate_id"], []).append(obj)

    records = []
    for debate_id, lines in debates.items():
        units = [l["text"] for l in lines]
        resolved = resolve_units(resolver, units, "\n", f"debate {debate_id!r}")
        for line, text in zip(lines, resolved):
            records.append({
                "side": "source",
                "doc_id": debate_id,
                "unit": line["line_no"],
                "resolved_text": text,
            })
    return records


def target_records(claims_path, resolver) -> list[dict]:
    """Two records per claim (body, ver_claim), resolved jointly.

    The resolver runs over body + " " + ver_claim so the claim's pronouns
    can bind to antecedents in the body; the edits are split back at the
    recorded boundary offset.
    """
    records = []
    for obj in _read_jsonl(claims_path, ("id", "ver_claim", "body")):
        body, claim = resolve_units(
            resolver, [obj["body"], obj["ver_claim"]], " ", f"claim {obj['id']!r}"
        )
        records.append({"side": "target", "doc_id": obj["id"],
                        "unit": "body", "resolved_text": body})
        records.append({"side": "target", "doc_id": obj["id"],
                        "unit": "ver_claim", "resolved_text": claim})
    return records
