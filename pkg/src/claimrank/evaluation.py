"""Mean average precision evaluation, per category, plus TREC-style run I/O.

AP divides by the full relevant-set size, so golds missing from the ranked
list pull the score down — retrieval misses are penalized, not ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

CATEGORY_COLUMNS = ("clean", "clean-hard", "part-of", "context-dep")


class EvalError(ValueError):
    """Raised on malformed runs/qrels or contract violations."""


@dataclass(frozen=True)
class QueryRel:
    relevant: frozenset
    category: str = "unlabeled"

    def __post_init__(self):
        if not self.relevant:
            raise EvalError("relevant set must be non-empty")


def qrels_from_pairs(pairs) -> dict[str, QueryRel]:
    qrels = {}
    for p in pairs:
        qid = p.query_id
        if qid in qrels:
            raise EvalError(f"duplicate query id {qid!r} in pairs")
        qrels[qid] = QueryRel(frozenset(p.ver_claim_ids), p.category)
    return qrels


def average_precision(ranked_ids, relevant_set) -> float:
    if not relevant_set:
        raise EvalError("average_precision needs a non-empty relevant set")
    seen = set()
    hits = 0
    total = 0.0
    for rank, cid in enumerate(ranked_ids, start=1):
        if cid in seen:
            raise EvalError(f"duplicate id {cid!r} in ranked list")
        seen.add(cid)
        if cid in relevant_set:
            hits += 1
            total += hits / rank
    return total / len(relevant_set)


@dataclass(frozen=True)
class EvalReport:
    map_overall: float
    map_by_category: dict[str, float | None]
    per_query_ap: dict[str, float]
    n_queries: int
    n_misses: int

    def to_dict(self) -> dict:
        return {
            "map_overall": self.map_overall,
            "map_by_category": self.map_by_category,
            "per_query_ap": self.per_query_ap,
            "n_queries": self.n_queries,
            "n_misses": self.n_misses,
        }


def evaluate(run: dict, qrels: dict[str, QueryRel]) -> EvalReport:
    """Score a run against qrels.

    ``run`` maps query_id → ranked candidate ids.  Every run query must be
    in qrels; qrels queries absent from the run score 0 (nothing retrieved).
    """
    unknown = sorted(set(run) - set(qrels))
    if unknown:
        raise EvalError(f"run contains queries missing from qrels: {unknown[:5]}")
    per_query = {}
    misses = 0
    by_cat: dict[str, list[float]] = {c: [] for c in CATEGORY_COLUMNS}
    for qid in sorted(qrels):
        rel = qrels[qid]
        ranked = run.get(qid, [])
        ap = average_precision(ranked, rel.relevant)
        per_query[qid] = ap
        misses += len(rel.relevant - set(ranked))
        if rel.category in by_cat:
            by_cat[rel.category].append(ap)
    n = len(per_query)
    overall = sum(per_query.values()) / n if n else 0.0
    map_by_cat = {
        c: (sum(v) / len(v) if v else None) for c, v in by_cat.items()
    }
    return EvalReport(overall, map_by_cat, per_query, n, misses)


def mean_reciprocal_rank(run: dict, qrels: dict[str, QueryRel]) -> float:
    """Diagnostic MRR over the first relevant hit per qrels query."""
    unknown = sorted(set(run) - set(qrels))
    if unknown:
        raise EvalError(f"run contains queries missing from qrels: {unknown[:5]}")
    if not qrels:
        return 0.0
    total = 0.0
    for qid, rel in qrels.items():
        for rank, cid in enumerate(run.get(qid, []), start=1):
            if cid in rel.relevant:
                total += 1.0 / rank
                break
    return total / len(qrels)


# ---------------------------------------------------------------------------
# run-file and report I/O


def save_run(path, run: dict, tag: str = "claimrank") -> None:
    """Write ``query_id ver_claim_id rank score tag`` lines.

    Ids must be whitespace-free (enforced at corpus load) so the format
    stays line-splittable.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for qid in sorted(run):
            for rank, (cid, score) in enumerate(run[qid], start=1):
                fh.write(f"{qid} {cid} {rank} {float(score)!r} {tag}\n")


def load_run(path) -> dict[str, list[tuple[str, float]]]:
    """Read a run file back into query_id → [(ver_claim_id, score)] in rank order."""
    run: dict[str, list[tuple[str, float]]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 5:
                raise EvalError(f"{path}:{line_no}: expected 5 fields, got {len(parts)}")
            qid, cid, rank_s, score_s, _tag = parts
            try:
                rank = int(rank_s)
                score = float(score_s)
            except ValueError as exc:
                raise EvalError(f"{path}:{line_no}: bad rank/score") from exc
            entries = run.setdefault(qid, [])
            if rank != len(entries) + 1:
                raise EvalError(
                    f"{path}:{line_no}: rank {rank} out of order for query {qid!r}"
                )
            if cid in {c for c, _ in entries}:
                raise EvalError(f"{path}:{line_no}: duplicate candidate {cid!r}")
            entries.append((cid, score))
    return run


def ranked_ids(run: dict[str, list[tuple[str, float]]]) -> dict[str, list[str]]:
    return {qid: [cid for cid, _ in entries] for qid, entries in run.items()}


def format_table(rows: list[tuple[str, EvalReport]]) -> str:
    """Aligned text table: one row per configuration, MAP overall + categories."""
    headers = ["configuration", "overall", *CATEGORY_COLUMNS, "queries", "misses"]
    body = []
    for label, rep in rows:
        cells = [label, f"{rep.map_overall:.4f}"]
        for cat in CATEGORY_COLUMNS:
            v = rep.map_by_category.get(cat)
            cells.append("-" if v is None else f"{v:.4f}")
        cells.append(str(rep.n_queries))
        cells.append(str(rep.n_misses))
        body.append(cells)
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in body)) if body else len(headers[i])
        for i in range(len(headers))
    ]
    lines = []
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip())
    lines.append("  ".join("-" * widths[i] for i in range(len(headers))))
    for cells in body:
        lines.append(
            "  ".join(
                cells[i].ljust(widths[i]) if i == 0 else cells[i].rjust(widths[i])
                for i in range(len(cells))
            ).rstrip()
        )
    return "\n".join(lines) + "\n"


def save_report(path, report: EvalReport) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
