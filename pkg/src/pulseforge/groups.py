"""Clifford dictionaries for qubits and qutrits, and pruning to unique
Hamiltonian mappings.

Qubit rotations use R_k(theta) = exp(-i sigma_k theta/2).  The 24 Clifford
rotations are enumerated as products V_i W_j of the generator letters

    W = (I, X, X^2, Xbar),        X = R_x(pi/2), Xbar = R_x(-pi/2)
    V = (I, Z, Ybar, Z^2, Zbar, Y)

with V applied after W (matrix product V @ W).  Qutrit rotations replace the
Pauli generators with the su(2) subalgebra of one of the three two-level
subspaces, giving letters (V_i W_j)_k for subsystem k = 1, 2, 3; a qutrit
dictionary word is the product (V_i W_j)_1 (V_k W_l)_2 (V_m W_n)_3, for
24^3 = 13,824 words.

Pruning groups words by how they transform the model Hamiltonian: two words
are equivalent when the collectively conjugated (U (x) U) Zeeman and dipolar
parts both have identical basis projections after rounding to 9 decimals.
The qubit dictionary collapses 24 -> 6 classes and the qutrit dictionary
13,824 -> 558.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .algebra import (SIGMA_X, SIGMA_Y, SIGMA_Z, TRACE_NORM, dagger,
                      pauli_basis, project, subalgebra_generators)

N_V = 6
N_W = 4

# W letter table as (axis, angle-multiple-of-pi/2): I, X, X^2, Xbar
_W_SPEC = ((None, 0), ("x", 1), ("x", 2), ("x", -1))
# V letter table: I, Z, Ybar, Z^2, Zbar, Y
_V_SPEC = ((None, 0), ("z", 1), ("y", -1), ("z", 2), ("z", -1), ("y", 1))


@dataclass(frozen=True)
class Letter:
    """One dictionary letter V_v W_w acting on subsystem k (1-based)."""

    v: int
    w: int
    k: int = 1
    dag: bool = False

    def __post_init__(self):
        if not (0 <= self.v < N_V and 0 <= self.w < N_W):
            raise ValueError(f"invalid letter indices V{self.v}W{self.w}")
        if self.k not in (1, 2, 3):
            raise ValueError(f"invalid subsystem {self.k}")

    def __str__(self):
        return f"(V{self.v}W{self.w})_{self.k}" + ("^+" if self.dag else "")


@dataclass(frozen=True)
class GeneratorWord:
    """Ordered product of letters; leftmost letter is applied last."""

    letters: tuple

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))

    def __str__(self):
        return "".join(str(l) for l in self.letters) or "(V0W0)_1"

    def key(self):
        """Lexicographic sort key over (v, w, k, dag) per letter."""
        return tuple((l.v, l.w, l.k, l.dag) for l in self.letters)

    def concat(self, other):
        """Word for self @ other (other applied first)."""
        return GeneratorWord(self.letters + tuple(other.letters))


def word(*vwk):
    """Build a GeneratorWord from (v, w) or (v, w, k) tuples."""
    return GeneratorWord(tuple(Letter(*t) for t in vwk))


def _rot(gen, quarter_turns):
    # exp(-i * gen * (quarter_turns * pi/2) / 2) via eigendecomposition
    theta = quarter_turns * np.pi / 2.0
    vals, vecs = np.linalg.eigh(gen)
    return (vecs * np.exp(-0.5j * theta * vals)) @ vecs.conj().T


@lru_cache(maxsize=None)
def _letter_unitary(d, v, w, k):
    if d == 2:
        if k != 1:
            raise ValueError("qubit letters act on subsystem 1 only")
        gx, gy, gz = SIGMA_X, SIGMA_Y, SIGMA_Z
    elif d == 3:
        gx, gy, gz = subalgebra_generators(k)
    else:
        raise ValueError(f"unsupported qudit dimension {d}")
    gens = {"x": gx, "y": gy, "z": gz}
    axis_w, turns_w = _W_SPEC[w]
    axis_v, turns_v = _V_SPEC[v]
    uw = np.eye(d, dtype=complex) if axis_w is None else _rot(gens[axis_w], turns_w)
    uv = np.eye(d, dtype=complex) if axis_v is None else _rot(gens[axis_v], turns_v)
    return uv @ uw


def evaluate_word(w, d):
    """Evaluate a GeneratorWord to its d x d unitary matrix.

    Letters multiply left to right, so the rightmost letter acts first.
    Dagger-flagged letters contribute their conjugate transpose.
    """
    u = np.eye(d, dtype=complex)
    for letter in w.letters:
        lu = _letter_unitary(d, letter.v, letter.w, letter.k)
        u = u @ (dagger(lu) if letter.dag else lu)
    return u


def phase_canonical(u):
    """Rescale a unitary so its first nonzero entry is real positive."""
    u = np.asarray(u)
    flat = u.ravel()
    idx = np.argmax(np.abs(flat) > 1e-12)
    ph = flat[idx] / abs(flat[idx])
    return u / ph


def qubit_cliffords():
    """All 24 qubit Clifford rotations as (GeneratorWord, unitary) pairs.

    Enumerated in lexicographic (v, w) order; the 24 unitaries are pairwise
    distinct up to global phase.
    """
    out = []
    for v in range(N_V):
        for w_idx in range(N_W):
            gw = word((v, w_idx, 1))
            out.append((gw, evaluate_word(gw, 2)))
    return out


def qutrit_words():
    """Lazily enumerate all 13,824 three-letter qutrit words.

    Order is lexicographic over (i1, j1, i2, j2, i3, j3), so the first word
    is the identity.
    """
    for i1 in range(N_V):
        for j1 in range(N_W):
            for i2 in range(N_V):
                for j2 in range(N_W):
                    for i3 in range(N_V):
                        for j3 in range(N_W):
                            yield word((i1, j1, 1), (i2, j2, 2), (i3, j3, 3))


@dataclass(frozen=True)
class DictionaryEntry:
    """One pruned mapping class.

    ``hz_coeffs``/``hdd_coeffs`` are the basis projections of the collectively
    conjugated Zeeman and dipolar operators for the class representative;
    ``class_size`` counts the words sharing that mapping.
    """

    word: GeneratorWord
    unitary: np.ndarray = field(repr=False)
    hz_coeffs: np.ndarray = field(repr=False)
    hdd_coeffs: np.ndarray = field(repr=False)
    class_size: int = 1


@dataclass(frozen=True)
class PrunedDictionary:
    d: int
    n: int
    entries: tuple
    raw_size: int

    def __len__(self):
        return len(self.entries)


def _transfer_matrices(units):
    # T[b][r,s] = Tr(sigma_r U_b^dag sigma_s U_b) / 2, the single-qudit
    # adjoint action in the basis; real for Hermitian basis elements.
    d = units.shape[-1]
    sig = pauli_basis(d).stack()
    conj = np.einsum("bji,sjk,bkl->bsil", units.conj(), sig, units)
    t = np.einsum("ril,bsli->brs", sig, conj) / TRACE_NORM
    if np.max(np.abs(t.imag)) > 1e-10:
        raise RuntimeError("transfer matrices acquired an imaginary part")
    return t.real


def _round_key(vec, decimals=9):
    r = np.round(vec, decimals)
    r[r == 0.0] = 0.0  # fold -0.0 into +0.0 so keys hash identically
    return r.tobytes()


def prune(words, h_z, h_dd, d, n=2):
    """Group dictionary words into unique Hamiltonian-mapping classes.

    Each single-qudit word U acts collectively as U (x) ... (x) U on the
    n-spin space.  Words whose conjugated (H_Z, H_dd) basis projections agree
    after rounding to 9 decimals form one class; the representative is the
    first (lexicographically smallest) word encountered.

    Parameters
    ----------
    words : iterable of GeneratorWord
    h_z, h_dd : ndarray
        Zeeman and dipolar operators on the d^n space.
    d, n : int
        Qudit dimension and spin count.

    Returns
    -------
    PrunedDictionary
    """
    words = list(words)
    units = np.stack([evaluate_word(w, d) for w in words])
    t = _transfer_matrices(units)

    dd = d * d
    cz = project(h_z, d, n).coeffs.reshape((dd,) * n)
    cd = project(h_dd, d, n).coeffs.reshape((dd,) * n)
    if n == 1:
        hz_t = np.einsum("bra,a->br", t, cz)
        hdd_t = np.einsum("bra,a->br", t, cd)
    elif n == 2:
        hz_t = np.einsum("bra,ac,bsc->brs", t, cz, t).reshape(len(words), -1)
        hdd_t = np.einsum("bra,ac,bsc->brs", t, cd, t).reshape(len(words), -1)
    else:
        raise ValueError("pruning supports n = 1 or 2 spins")

    classes = {}
    order = []
    for idx, w in enumerate(words):
        key = _round_key(hz_t[idx]) + _round_key(hdd_t[idx])
        if key in classes:
            classes[key][1] += 1
        else:
            classes[key] = [idx, 1]
            order.append(key)

    entries = []
    for key in order:
        idx, size = classes[key]
        entries.append(DictionaryEntry(
            word=words[idx], unitary=units[idx],
            hz_coeffs=hz_t[idx].copy(), hdd_coeffs=hdd_t[idx].copy(),
            class_size=size,
        ))
    return PrunedDictionary(d=d, n=n, entries=tuple(entries),
                            raw_size=len(words))


def word_to_json(w):
    """Word as a JSON-ready list of [letter-string, subsystem] pairs."""
    out = []
    for letter in w.letters:
        s = f"V{letter.v}W{letter.w}" + ("+" if letter.dag else "")
        out.append([s, letter.k])
    return out


def word_from_json(items):
    """Parse the [["V4W2", 1], ...] word form."""
    letters = []
    for s, k in items:
        s = str(s)
        dag = s.endswith("+")
        if dag:
            s = s[:-1]
        if not (s.startswith("V") and "W" in s):
            raise ValueError(f"malformed letter {s!r}")
        v_part, w_part = s[1:].split("W")
        letters.append(Letter(int(v_part), int(w_part), int(k), dag))
    return GeneratorWord(tuple(letters))


def dictionary_to_json(pd):
    """Dictionary export: list of class records."""
    return [
        {
            "word": word_to_json(e.word),
            "class_size": e.class_size,
            "transformed_HZ_coeffs": [float(x) for x in e.hz_coeffs],
            "transformed_Hdd_coeffs": [float(x) for x in e.hdd_coeffs],
        }
        for e in pd.entries
    ]


def dump_dictionary(pd, path):
    with open(path, "w") as fh:
        json.dump(dictionary_to_json(pd), fh, indent=1)
