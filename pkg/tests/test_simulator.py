from __future__ import annotations

import json

import pytest

from bnsquat.corpus import Name, load_registrations
from bnsquat.ground_truth import AddressLabelSet
from bnsquat.simulator import ScenarioParams, synth_corpus, synth_transactions
from bnsquat.squat_detector import detect
from bnsquat.tx_analysis import (
    TxStore,
    common_senders,
    parse_transaction_record,
    parse_utxo_record,
    utxo_expand,
)
from bnsquat.typo_models import classify, damerau_distance


SMALL = ScenarioParams(n_legit=120, n_decoys=20, seed=7)


@pytest.fixture(scope="module")
def small_world():
    records, manifest = synth_corpus(SMALL)
    txs, utxos, prices = synth_transactions(records, manifest, SMALL)
    return records, manifest, txs, utxos, prices


def test_params_validation():
    with pytest.raises(ValueError):
        ScenarioParams(n_legit=-1)
    with pytest.raises(ValueError):
        ScenarioParams(style_i_fraction=0.9, style_ii_fraction=0.2)
    with pytest.raises(ValueError):
        ScenarioParams(models_enabled=("Teleportation",))
    with pytest.raises(ValueError):
        ScenarioParams(typo_event_rate=1.5)


def test_params_json_round_trip():
    params = ScenarioParams(n_legit=50, seed=3, models_enabled=("Swapping",))
    assert ScenarioParams.from_json(params.to_json()) == params


def test_seed_determinism():
    a = synth_corpus(SMALL)
    b = synth_corpus(SMALL)
    assert a[0] == b[0]
    assert a[1].to_dict() == b[1].to_dict()
    assert synth_transactions(*a, SMALL)[:2] == synth_transactions(*b, SMALL)[:2]


def test_different_seed_differs():
    other = ScenarioParams(n_legit=120, n_decoys=20, seed=8)
    assert synth_corpus(SMALL)[0] != synth_corpus(other)[0]


def test_zero_fractions_mean_no_squats():
    params = ScenarioParams(
        n_legit=30, n_decoys=5,
        style_i_fraction=0, style_ii_fraction=0, style_iii_fraction=0,
        n_defensive=0, seed=1,
    )
    records, manifest = synth_corpus(params)
    assert manifest.clusters == []
    assert len(records) == 35


def test_targets_pairwise_far_apart(small_world):
    _, manifest, *_ = small_world
    labels = [d.removesuffix(".eth") for d in manifest.targets]
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            assert damerau_distance(labels[i], labels[j]) >= 3


def test_manifest_squats_classify_against_their_target(small_world):
    _, manifest, *_ = small_world
    for cluster in manifest.clusters:
        target = cluster["target"].removesuffix(".eth")
        for squat in cluster["squats"]:
            label = squat["display"].removesuffix(".eth")
            models = classify(label, target)
            assert models, (label, target)
            assert squat["model"] in {m.value for m in models}


def test_decoys_are_true_negatives(small_world):
    _, manifest, *_ = small_world
    targets = [d.removesuffix(".eth") for d in manifest.targets]
    for decoy in manifest.decoys:
        label = decoy.removesuffix(".eth")
        assert all(damerau_distance(label, t) >= 2 for t in targets)


def test_detect_recovers_exactly_the_manifest(small_world):
    records, manifest, *_ = small_world
    ds = load_registrations(records)
    clusters = detect([Name(d.removesuffix(".eth"), "eth") for d in manifest.targets], ds)
    got = {
        c.target.name.display: (
            {e.registration.name.display for e in c.squats},
            {r.name.display for r in c.defensive},
        )
        for c in clusters
    }
    want = {
        c["target"]: ({s["display"] for s in c["squats"]}, set(c["defensive"]))
        for c in manifest.clusters
    }
    assert got == want


def test_planted_events_are_the_only_common_senders(small_world):
    records, manifest, txs, _, _ = small_world
    ds = load_registrations(records)
    store = TxStore([parse_transaction_record(t) for t in txs])
    labels = AddressLabelSet.from_records(manifest.labels)
    clusters = detect([Name(d.removesuffix(".eth"), "eth") for d in manifest.targets], ds)
    found = {
        (r.sender, r.target_name.display, r.typo_name.display)
        for c in clusters
        for r in common_senders(c, store, labels)
    }
    planted = {(e["sender"], e["target"], e["typo"]) for e in manifest.events}
    assert found == planted
    by_sender = {e["sender"]: e["sender_class"] for e in manifest.events}
    for c in clusters:
        for r in common_senders(c, store, labels):
            assert r.sender_class == by_sender[r.sender]


def test_event_count_override():
    params = ScenarioParams(n_legit=120, n_decoys=10, n_typo_events=3, seed=5)
    records, manifest = synth_corpus(params)
    synth_transactions(records, manifest, params)
    assert len(manifest.events) == 3


def test_prices_cover_every_tx_day(small_world):
    _, _, txs, utxos, prices = small_world
    priced_days = {row.split(",")[0] for row in prices[1:]}
    tx_days = {t["timestamp"][:10] for t in txs} | {u["timestamp"][:10] for u in utxos}
    assert tx_days <= priced_days
    assert all(float(row.rsplit(",", 1)[1]) > 0 for row in prices[1:])


def test_adah_namespace_emits_utxos():
    params = ScenarioParams(n_legit=60, n_decoys=5, namespace="adah", seed=2)
    records, manifest = synth_corpus(params)
    txs, utxos, _ = synth_transactions(records, manifest, params)
    assert txs == [] and utxos
    assert all(r["display"].startswith("$") for r in records)
    expanded = [t for u in utxos for t in utxo_expand(parse_utxo_record(u))]
    assert all(t.asset == "ADA" for t in expanded)


def test_records_are_valid_fixture_json(small_world):
    records, *_ = small_world
    for rec in records:
        json.dumps(rec)
    ds = load_registrations(records)
    assert len(ds) == len(records)
