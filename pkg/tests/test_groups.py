import numpy as np
import pytest

from pulseforge.algebra import SIGMA_X, SIGMA_Y, SIGMA_Z, dagger, is_unitary
from pulseforge.groups import (GeneratorWord, Letter, evaluate_word,
                               phase_canonical, prune, qubit_cliffords,
                               qutrit_words, word, word_from_json,
                               word_to_json)
from pulseforge.model import build_dipolar, build_zeeman, pair_model


def test_letter_validation():
    with pytest.raises(ValueError):
        Letter(6, 0)
    with pytest.raises(ValueError):
        Letter(0, 4)
    with pytest.raises(ValueError):
        Letter(0, 0, 4)


def test_word_str_and_key():
    w = word((5, 0, 1), (0, 2, 3))
    assert str(w) == "(V5W0)_1(V0W2)_3"
    assert w.key() == ((5, 0, 1, False), (0, 2, 3, False))
    assert str(GeneratorWord(())) == "(V0W0)_1"


def test_generator_letters_match_quarter_turn_rotations():
    # W index 1 is R_x(pi/2) = cos(pi/4) I - i sin(pi/4) sigma_x
    c, s = np.cos(np.pi / 4), np.sin(np.pi / 4)
    assert np.allclose(evaluate_word(word((0, 1, 1)), 2), c * np.eye(2) - 1j * s * SIGMA_X)
    # V index 1 is R_z(pi/2), V index 5 is R_y(pi/2)
    assert np.allclose(evaluate_word(word((1, 0, 1)), 2), np.diag([np.exp(-1j * np.pi / 4), np.exp(1j * np.pi / 4)]))
    assert np.allclose(evaluate_word(word((5, 0, 1)), 2), c * np.eye(2) - 1j * s * SIGMA_Y)


def test_word_evaluation_order():
    # leftmost letter applied last: word(a, b) evaluates to U_a @ U_b
    a, b = word((1, 0, 1)), word((0, 1, 1))
    assert np.allclose(evaluate_word(a.concat(b), 2),
                       evaluate_word(a, 2) @ evaluate_word(b, 2))


def test_dagger_letter():
    w = word((2, 3, 1))
    wd = GeneratorWord((Letter(2, 3, 1, dag=True),))
    assert np.allclose(evaluate_word(wd, 2), dagger(evaluate_word(w, 2)))


def test_qubit_cliffords_count_and_distinct():
    cliffs = qubit_cliffords()
    assert len(cliffs) == 24
    canon = [np.round(phase_canonical(u), 9).tobytes() for _, u in cliffs]
    assert len(set(canon)) == 24


def test_qubit_cliffords_permute_paulis():
    # Clifford defining property: conjugation maps each Pauli to +-(a Pauli)
    paulis = (SIGMA_X, SIGMA_Y, SIGMA_Z)
    for _, u in qubit_cliffords():
        for p in paulis:
            q = dagger(u) @ p @ u
            hits = [np.allclose(q, sgn * t, atol=1e-9)
                    for t in paulis for sgn in (1, -1)]
            assert sum(hits) == 1


def test_qutrit_word_count_and_identity_first():
    gen = qutrit_words()
    first = next(gen)
    assert np.allclose(evaluate_word(first, 3), np.eye(3))
    assert sum(1 for _ in gen) == 13824 - 1


def test_random_words_are_unitary():
    rng = np.random.default_rng(11)
    for _ in range(25):
        letters = [(rng.integers(0, 6), rng.integers(0, 4), rng.integers(1, 4))
                   for _ in range(rng.integers(1, 4))]
        assert is_unitary(evaluate_word(word(*letters), 3))


def test_prune_qubit_class_count(qubit_dictionary):
    assert qubit_dictionary.raw_size == 24
    assert len(qubit_dictionary.entries) == 6
    assert sum(e.class_size for e in qubit_dictionary.entries) == 24


def test_prune_qutrit_class_count(qutrit_pruning):
    d, seconds = qutrit_pruning
    assert d.raw_size == 13824
    assert len(d.entries) == 558
    assert sum(e.class_size for e in d.entries) == 13824
    assert seconds < 60.0


def test_prune_representative_is_first_word(qubit_dictionary):
    # class representatives keep enumeration order; the identity leads
    first = qubit_dictionary.entries[0]
    assert np.allclose(first.unitary, np.eye(2))
    assert first.word.key() == ((0, 0, 1, False),)


def test_prune_classes_have_consistent_maps(qubit_dictionary):
    # every member of a class must map (H_Z, H_dd) like its representative;
    # spot-check by re-conjugating with each representative
    m = pair_model(2, j=1.0)
    hz, hdd = build_zeeman(m), build_dipolar(m)
    from pulseforge.algebra import project
    for e in qubit_dictionary.entries:
        uc = np.kron(e.unitary, e.unitary)
        assert np.allclose(project(dagger(uc) @ hz @ uc, 2, 2).coeffs,
                           e.hz_coeffs, atol=1e-9)
        assert np.allclose(project(dagger(uc) @ hdd @ uc, 2, 2).coeffs,
                           e.hdd_coeffs, atol=1e-9)


def test_prune_single_spin():
    words = [w for w, _ in qubit_cliffords()]
    from pulseforge.algebra import spin_operators
    sz = spin_operators(2)[2]
    pd = prune(words, sz, np.zeros((2, 2)), 2, n=1)
    # single-spin Zeeman map only distinguishes the 6 axis orientations
    assert len(pd.entries) == 6


def test_word_json_round_trip():
    w = word((5, 0, 1), (0, 2, 3))
    assert word_from_json(word_to_json(w)).key() == w.key()
    wd = GeneratorWord((Letter(1, 2, 2, dag=True),))
    back = word_from_json(word_to_json(wd))
    assert back.key() == wd.key()
    assert word_to_json(wd)[0][0].endswith("+")


def test_word_from_json_rejects_garbage():
    with pytest.raises(ValueError):
        word_from_json([["X1Y2", 1]])
