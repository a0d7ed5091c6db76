"""Reference index construction, queries, and the binary file format."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hauser.index import (
    IndexFormatError,
    KBFormatError,
    ReferenceIndex,
    SimileTriple,
    read_kb_tsv,
)
from hauser.similes import extract_components, normalize_phrase

SENTENCES = [
    "He yelps and howls like a wolf.",
    "She howls like a wolf.",
    "They gleamed like sparks of fire.",
    "Her eyes gleamed like sparks of fire.",
    "He ran like the wind.",
    "He ran like the wind and jumped like a cat.",
]


def corpus():
    return [extract_components(s) for s in SENTENCES]


def brute_force_counts(similes):
    """Independent recount used as the oracle for build_from_corpus."""
    pair, veh = {}, {}
    for simile in similes:
        seen = set()
        for inst in simile.instances:
            v = normalize_phrase(inst.vehicle.text_in(simile.text))
            if not v:
                continue
            veh[v] = veh.get(v, 0) + 1
            if inst.topic is not None:
                t = normalize_phrase(inst.topic.text_in(simile.text))
                if t:
                    seen.add((t, v))
        for key in seen:
            pair[key] = pair.get(key, 0) + 1
    return pair, veh


def test_corpus_build_matches_brute_force():
    similes = corpus()
    index = ReferenceIndex.build_from_corpus(similes)
    pair, veh = brute_force_counts(similes)
    for (t, v), n in pair.items():
        assert index.pair_count(t, v) == n
    for v, n in veh.items():
        assert index.vehicle_count(v) == n
    assert index.pair_count("he", "wolf") == 1
    assert index.pair_count("she", "wolf") == 1
    assert index.vehicle_count("a wolf") == 2
    assert index.vehicle_count("sparks of fire") == 2
    assert index.vehicle_count("the wind") == 2


def test_corpus_build_dedupes_within_sentence():
    simile = extract_components("He ran like the wind, he ran like the wind.")
    assert len(simile.instances) == 2
    index = ReferenceIndex.build_from_corpus([simile])
    # one sentence, same normalized pair twice: counts once per sentence
    assert index.pair_count("he", "wind") == 1
    # vehicle occurrences stay per instance
    assert index.vehicle_count("wind") == 2


def test_corpus_build_skips_malformed():
    records = [
        extract_components("He ran like the wind."),
        "this is not json",
        {"text": "bad", "instances": [{}]},
    ]
    index = ReferenceIndex.build_from_corpus(records)
    assert index.meta["records"] == 1
    assert index.meta["skipped"] == 2


def test_queries_normalize_arguments():
    index = ReferenceIndex.build_from_corpus(corpus())
    assert index.pair_count("He", "a Wolf") == index.pair_count("he", "wolf")
    assert index.vehicle_count("The Wind!") == index.vehicle_count("wind")


def test_absent_keys_answer_zero():
    index = ReferenceIndex.build_from_corpus(corpus())
    assert index.pair_count("nobody", "nothing") == 0
    assert index.vehicle_count("a unicorn") == 0


def test_mode_mismatch_raises():
    corpus_index = ReferenceIndex.build_from_corpus(corpus())
    kb_index = ReferenceIndex.build_from_kb(
        [SimileTriple("eyes", "bright", "star", 3, 0.5)]
    )
    with pytest.raises(ValueError):
        corpus_index.pair_mass("he", "wolf")
    with pytest.raises(ValueError):
        kb_index.pair_count("eyes", "star")


def test_kb_mass_accumulates_over_properties():
    triples = [
        SimileTriple("eyes", "bright", "star", 3, 0.5),
        SimileTriple("eyes", "distant", "star", 2, 0.25),
        SimileTriple("eyes", "bright", "diamond", 1, 1.0),
        SimileTriple("heart", "heavy", "stone", 4, 0.75),
    ]
    index = ReferenceIndex.build_from_kb(triples)
    assert index.pair_mass("eyes", "star") == pytest.approx(3 * 0.5 + 2 * 0.25)
    assert index.pair_mass("eyes", "diamond") == pytest.approx(1.0)
    assert index.pair_mass("heart", "stone") == pytest.approx(3.0)
    assert index.pair_mass("heart", "star") == 0.0
    assert index.vehicle_count("star") == 5
    assert index.vehicle_count("stone") == 4


def test_kb_build_normalizes_keys():
    index = ReferenceIndex.build_from_kb(
        [
            SimileTriple("The Eyes", "bright", "a Star", 1, 0.5),
            SimileTriple("eyes", "shiny", "star", 1, 0.5),
        ]
    )
    assert index.pair_mass("eyes", "star") == pytest.approx(1.0)
    assert index.vehicle_count("star") == 2


@settings(max_examples=30, deadline=None)
@given(st.permutations(list(range(9))))
def test_kb_build_is_order_independent(order):
    base = [
        SimileTriple("eyes", f"p{i}", "star", i + 1, (i + 1) / 9.0) for i in range(6)
    ] + [
        SimileTriple("heart", f"p{i}", "stone", i, 0.1 * i) for i in range(3)
    ]
    shuffled = [base[i] for i in order]
    assert (
        ReferenceIndex.build_from_kb(shuffled).to_bytes()
        == ReferenceIndex.build_from_kb(base).to_bytes()
    )


def test_kb_mass_uses_exact_summation():
    # 0.1 summed ten times in float drifts; fsum keeps the exact decimal
    triples = [SimileTriple("t", f"p{i}", "v", 1, 0.1) for i in range(10)]
    index = ReferenceIndex.build_from_kb(triples)
    assert index.pair_mass("t", "v") == math.fsum([0.1] * 10)


def test_triple_validation():
    with pytest.raises(ValueError):
        SimileTriple("t", "p", "v", -1, 0.5)
    with pytest.raises(ValueError):
        SimileTriple("t", "p", "v", 1, 1.5)
    with pytest.raises(ValueError):
        SimileTriple("t", "p", "v", 1.0, 0.5)


# ---------------------------------------------------------------------------
# Binary round trip


def test_save_load_round_trip(tmp_path):
    for index in (
        ReferenceIndex.build_from_corpus(corpus(), source="unit"),
        ReferenceIndex.build_from_kb(
            [SimileTriple("eyes", "bright", "star", 3, 0.5)], source="unit"
        ),
    ):
        path = tmp_path / f"{index.mode}.hidx"
        index.save(path)
        loaded = ReferenceIndex.load(path)
        assert loaded == index
        assert loaded.meta["source"] == "unit"
        assert loaded.to_bytes() == index.to_bytes()


def test_serialization_is_deterministic():
    a = ReferenceIndex.build_from_corpus(corpus())
    b = ReferenceIndex.build_from_corpus(corpus())
    assert a.to_bytes() == b.to_bytes()


def test_load_rejects_bad_magic():
    blob = bytearray(ReferenceIndex.build_from_corpus(corpus()).to_bytes())
    blob[:4] = b"JUNK"
    with pytest.raises(IndexFormatError) as err:
        ReferenceIndex.from_bytes(bytes(blob))
    assert err.value.offset == 0


def test_load_rejects_bad_version():
    blob = bytearray(ReferenceIndex.build_from_corpus(corpus()).to_bytes())
    blob[4] = 99
    with pytest.raises(IndexFormatError) as err:
        ReferenceIndex.from_bytes(bytes(blob))
    assert err.value.offset == 4


def test_load_rejects_corruption():
    blob = bytearray(ReferenceIndex.build_from_corpus(corpus()).to_bytes())
    blob[len(blob) // 2] ^= 0xFF
    with pytest.raises(IndexFormatError, match="checksum"):
        ReferenceIndex.from_bytes(bytes(blob))


def test_load_rejects_truncation():
    blob = ReferenceIndex.build_from_corpus(corpus()).to_bytes()
    with pytest.raises(IndexFormatError):
        ReferenceIndex.from_bytes(blob[: len(blob) - 9])


def test_load_reports_offset_for_short_file():
    with pytest.raises(IndexFormatError):
        ReferenceIndex.from_bytes(b"HI")


# ---------------------------------------------------------------------------
# Knowledge base TSV


def test_read_kb_tsv(tmp_path):
    path = tmp_path / "kb.tsv"
    path.write_text(
        "# topic\tproperty\tvehicle\tfrequency\tplausibility\n"
        "\n"
        "eyes\tbright\tstar\t3\t0.5\n"
        "heart\theavy\tstone\t4\t0.75\n",
        encoding="utf-8",
    )
    triples = list(read_kb_tsv(path))
    assert triples == [
        SimileTriple("eyes", "bright", "star", 3, 0.5),
        SimileTriple("heart", "heavy", "stone", 4, 0.75),
    ]


def test_read_kb_tsv_rejects_wrong_arity(tmp_path):
    path = tmp_path / "kb.tsv"
    path.write_text("eyes\tbright\tstar\t3\n", encoding="utf-8")
    with pytest.raises(KBFormatError, match="line 1"):
        list(read_kb_tsv(path))


def test_read_kb_tsv_rejects_bad_numbers(tmp_path):
    path = tmp_path / "kb.tsv"
    path.write_text("eyes\tbright\tstar\tmany\t0.5\n", encoding="utf-8")
    with pytest.raises(KBFormatError, match="line 1"):
        list(read_kb_tsv(path))
    path.write_text("eyes\tbright\tstar\t3\t1.5\n", encoding="utf-8")
    with pytest.raises(KBFormatError, match="line 1"):
        list(read_kb_tsv(path))
