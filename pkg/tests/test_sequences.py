import json
import math

import numpy as np
import pytest

from pulseforge import avgham, sequences
from pulseforge.avgham import Frame, PulseSequence
from pulseforge.sequences import (beta_from_map, from_file, load, names,
                                  sequence_from_json, sequence_to_json,
                                  to_file)


def test_registry_names():
    assert names() == ("WHH-4", "HoRD-qubit-5", "CYL-6", "HoZD-qutrit-12",
                       "HoRD-qutrit-8")


def test_load_is_case_and_dash_insensitive():
    a = load("WHH-4")
    assert load("whh4") is a
    assert load("Whh_4") is a
    assert load("hord-QUBIT-5").name == "HoRD-qubit-5"


def test_unknown_name_lists_known():
    with pytest.raises(KeyError, match="WHH-4"):
        load("nope")


def test_registry_shape():
    rows = {
        "WHH-4": (2, 5, 6, False),
        "HoRD-qubit-5": (2, 6, 6, False),
        "CYL-6": (3, 6, 6, True),
        "HoZD-qutrit-12": (3, 12, 12, False),
        "HoRD-qutrit-8": (3, 8, 12, False),
    }
    for name, (d, n_frames, total, reconstructed) in rows.items():
        ns = load(name)
        assert ns.d == d
        assert len(ns.frames) == n_frames
        assert ns.total_weight == total
        assert ns.reconstructed is reconstructed


def test_expected_beta_values():
    assert load("WHH-4").expected_beta == pytest.approx(1 / math.sqrt(3))
    assert load("HoRD-qubit-5").expected_beta == pytest.approx(1 / 3)
    assert load("CYL-6").expected_beta == pytest.approx(1 / math.sqrt(6))
    assert load("HoZD-qutrit-12").expected_beta == 0.0
    assert load("HoRD-qutrit-8").expected_beta == pytest.approx(1 / 3)


def test_h0_map_consistent_with_expected_beta():
    # sequences carrying a stated single-site average must agree with it
    checked = 0
    for name in names():
        ns = load(name)
        if ns.h0_map is None:
            continue
        beta, _ = beta_from_map(ns.h0_map, ns.d)
        assert beta == pytest.approx(ns.expected_beta, abs=1e-12)
        checked += 1
    assert checked >= 1


def test_named_sequence_duck_types_as_sequence():
    ns = load("HoRD-qutrit-8")
    assert ns.label == ns.name
    assert ns.weights == ns.sequence.weights
    rep_direct = avgham.verify(ns.sequence)
    rep_named = avgham.verify(ns)
    assert rep_named.zeeman_strength == rep_direct.zeeman_strength


def test_json_round_trip_words(tmp_path):
    ns = load("HoRD-qutrit-8")
    path = tmp_path / "seq.json"
    to_file(ns.sequence, path, name=ns.name)
    back = from_file(path)
    assert back.d == 3
    assert back.label == ns.name
    assert back.weights == ns.sequence.weights
    for fa, fb in zip(back.frames, ns.sequence.frames):
        assert np.array_equal(fa.unitary, fb.unitary)  # words re-evaluate bitwise


def test_json_round_trip_reproduces_beta_exactly(tmp_path):
    ns = load("HoRD-qutrit-8")
    path = tmp_path / "seq.json"
    to_file(ns.sequence, path, name=ns.name)
    a = avgham.verify(ns.sequence).zeeman_strength
    b = avgham.verify(from_file(path)).zeeman_strength
    assert a == b  # bit identical, not just approximately equal


def test_json_round_trip_raw_unitaries():
    u = np.array([[0, 1], [1, 0]], dtype=complex)
    seq = PulseSequence(d=2, frames=(Frame(np.eye(2), 2), Frame(u, 1)))
    data = sequence_to_json(seq, name="raw")
    assert "unitary" in data["frames"][0]
    back = sequence_from_json(data)
    assert back.weights == (2, 1)
    assert np.allclose(back.frames[1].unitary, u)


def test_from_file_diagnostics(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ValueError, match="not valid JSON"):
        from_file(str(bad))
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"d": 2}))
    with pytest.raises(ValueError, match="not a sequence file"):
        from_file(str(missing))


def test_cyl6_reconstruction_matches_tabulated_map():
    # the six-frame cycle was reconstructed from its stated average map;
    # its zeroth-order Zeeman average must reproduce that map exactly
    ns = load("CYL-6")
    assert ns.reconstructed
    rep = avgham.verify(ns.sequence)
    assert abs(rep.zeeman_strength - ns.expected_beta) < 1e-9
    assert not rep.clean_zeeman
