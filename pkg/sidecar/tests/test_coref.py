import logging

import pytest

from claimproviders import HeuristicResolver, IdentityResolver, apply_edits, resolve_units
from claimproviders.corefjob import CorefError, make_resolver, source_records, target_records
from providertestutil import write_jsonl


def heuristic_resolve(text):
    return apply_edits(text, HeuristicResolver().edits(text))


def test_apply_edits_basic():
    assert apply_edits("he spoke", [(0, 2, "Brook")]) == "Brook spoke"
    assert apply_edits("unchanged", []) == "unchanged"


def test_apply_edits_rejects_overlap_and_escape():
    with pytest.raises(CorefError):
        apply_edits("abcdef", [(0, 3, "x"), (2, 4, "y")])
    with pytest.raises(CorefError):
        apply_edits("abc", [(1, 9, "x")])


def test_identity_resolver_never_edits():
    assert IdentityResolver().edits("He said it. They agreed.") == []


def test_heuristic_replaces_pronoun_with_last_name_span():
    got = heuristic_resolve("Senator Brook spoke at length. Later he voted no.")
    assert got == "Senator Brook spoke at length. Later Senator Brook voted no."


def test_heuristic_without_antecedent_leaves_text():
    text = "he said the rate fell and they agreed"
    assert heuristic_resolve(text) == text


def test_heuristic_is_case_insensitive_on_pronouns():
    got = heuristic_resolve("Governor Hale won. He celebrated.")
    assert got == "Governor Hale won. Governor Hale celebrated."


def test_heuristic_ignores_capitalized_function_words():
    # "The" and "Then" never start a name span
    got = heuristic_resolve("The rate fell. Then it recovered.")
    assert got == "The rate fell. Then it recovered."


def test_heuristic_caps_name_span_length():
    text = "Alpha Beta Gamma Delta Epsilon spoke. Then he left."
    got = heuristic_resolve(text)
    # span holds the last four capitalized words
    assert "Then Beta Gamma Delta Epsilon left." in got


def test_heuristic_latest_antecedent_wins():
    got = heuristic_resolve("Mayor Cruz met Judge Osei. Afterwards she ruled.")
    assert got.endswith("Afterwards Judge Osei ruled.")


def test_resolve_units_splits_edits_by_offset():
    resolver = HeuristicResolver()
    units = ["Senator Brook objected.", "he filed a motion."]
    resolved = resolve_units(resolver, units, "\n", "doc")
    assert resolved == ["Senator Brook objected.", "Senator Brook filed a motion."]


class _Boom:
    def edits(self, text):
        raise RuntimeError("model exploded")


class _Crosser:
    def edits(self, text):
        return [(0, len(text), "X")]


def test_failing_resolver_passes_through_with_warning(caplog):
    units = ["line one.", "line two."]
    with caplog.at_level(logging.WARNING):
        resolved = resolve_units(_Boom(), units, "\n", "debate 'd9'")
    assert resolved == units
    assert "resolution failed for debate 'd9'" in caplog.text


def test_boundary_crossing_edit_passes_through_with_warning(caplog):
    units = ["aa", "bb"]
    with caplog.at_level(logging.WARNING):
        resolved = resolve_units(_Crosser(), units, " ", "claim 'c9'")
    assert resolved == units
    assert "crosses a unit boundary" in caplog.text


def test_make_resolver_registry():
    assert make_resolver({"kind": "heuristic"}).kind == "heuristic"
    assert make_resolver({}).kind == "identity"
    with pytest.raises(CorefError, match="unknown resolver"):
        make_resolver({"kind": "neural9000"})


def test_source_records_cover_every_line(corpus):
    records = source_records(corpus["transcripts"], IdentityResolver())
    keys = {(r["doc_id"], r["unit"]) for r in records}
    assert len(records) == corpus["n_lines"]
    assert ("d0", 1) in keys and ("d5", 5) in keys
    assert all(r["side"] == "source" for r in records)


def test_source_antecedent_carries_across_lines(corpus):
    records = source_records(corpus["transcripts"], HeuristicResolver())
    by_key = {(r["doc_id"], r["unit"]): r["resolved_text"] for r in records}
    # line 2 introduces Senator Brook; line 3's pronoun binds to it
    assert by_key[("d0", 3)].startswith("Senator Brook claims the economy rate")
    # line 1 precedes any antecedent and is untouched
    assert by_key[("d0", 1)] == "the moderator opened the round."


def test_target_records_two_units_per_claim(corpus):
    records = target_records(corpus["claims"], IdentityResolver())
    assert len(records) == corpus["n_claims"] * 2
    units = {(r["doc_id"], r["unit"]) for r in records}
    assert ("c0", "body") in units and ("c0", "ver_claim") in units
    assert all(r["side"] == "target" for r in records)


def test_target_pronoun_binds_to_body_antecedent(tmp_path):
    claims = write_jsonl(tmp_path / "claims.jsonl", [{
        "id": "c9",
        "ver_claim": "they overstated the figure",
        "title": "t",
        "body": "Campaign Staff produced the chart.",
    }])
    records = target_records(claims, HeuristicResolver())
    by_unit = {r["unit"]: r["resolved_text"] for r in records}
    assert by_unit["ver_claim"] == "Campaign Staff overstated the figure"
    assert by_unit["body"] == "Campaign Staff produced the chart."


def test_target_split_reconstructs_joint_resolution(corpus):
    import json

    resolver = HeuristicResolver()
    with open(corpus["claims"], encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            full = obj["body"] + " " + obj["ver_claim"]
            joint = apply_edits(full, resolver.edits(full))
            body, claim = resolve_units(
                resolver, [obj["body"], obj["ver_claim"]], " ", obj["id"]
            )
            assert body + " " + claim == joint
