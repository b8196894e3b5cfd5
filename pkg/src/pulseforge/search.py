"""Pulse-sequence search: constraint assembly over a pruned dictionary,
MILP solve, decoding into a verified sequence, and clean-Zeeman recovery.

Variables are integer weights, one per dictionary class.  Writing c_k for
the transformed combined projection (Zeeman plus dipolar) of class k, the
targets are

- decouple-keep-zeeman: combined coefficients vanish on every row outside
  the Zeeman support (equalities), while on the support rows the weighted
  sum must reach at least one weight-unit of the bare Zeeman vector
  (written as -sum_k w_k c_k <= -c_HZ) and, optionally, at least beta_min
  of it per unit of total weight.
- decouple-zero-zeeman: every row is an equality against zero, with a
  nontriviality row sum_k w_k >= 1.
- clean-zeeman: keep-zeeman plus equality rows spanning the orthogonal
  complement of the Zeeman vector within its support, which forces the
  surviving single-site term to be proportional to S_z.

Dipolar rows are written for J = 1; the coupling scales every dipolar
coefficient uniformly, so a decoupling solution is J-independent.

Every solver result is re-verified through the average-Hamiltonian module
before being returned; a result that fails that oracle raises instead of
being reported as optimal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import avgham
from .algebra import dagger, project, spin_operators
from .groups import PrunedDictionary, evaluate_word, prune, qubit_cliffords, qutrit_words
from .milp import (DEFAULT_NODE_LIMIT, INTEGER, LinearProgram, Solution,
                   add_cardinality, solve_mip)
from .model import build_dipolar, build_zeeman, pair_model

KEEP_ZEEMAN = "decouple-keep-zeeman"
ZERO_ZEEMAN = "decouple-zero-zeeman"
CLEAN_ZEEMAN = "clean-zeeman"
TARGETS = (KEEP_ZEEMAN, ZERO_ZEEMAN, CLEAN_ZEEMAN)

DEFAULT_ALPHA = 0.5
DEFAULT_WEIGHT_CAP = 4
DEFAULT_BETA_MIN = 1.0 / 6.0
SUPPORT_TOL = 1e-12


def build_dictionary(d, j=1.0):
    """Pruned mapping dictionary for the standard two-spin pair model."""
    m = pair_model(d, j=j)
    h_z = build_zeeman(m)
    h_dd = build_dipolar(m)
    if d == 2:
        words = [w for w, _ in qubit_cliffords()]
    elif d == 3:
        words = qutrit_words()
    else:
        raise ValueError(f"no generator set for d = {d}")
    return prune(words, h_z, h_dd, d, n=2)


@dataclass(frozen=True)
class SearchProblem:
    """Assembled MILP plus the bookkeeping that produced it."""

    dictionary: PrunedDictionary
    target: str
    problem: LinearProgram
    m_eq: int            # equality rows kept after support/duplicate presolve
    m_eq_raw: int        # d^(2n) minus the inequality-row count
    m_ub: int
    support: tuple       # N: row indices where the Zeeman target is nonzero
    complement: tuple    # Z: all other row indices
    alpha: float
    weight_cap: int
    beta_min: float


@dataclass(frozen=True)
class SearchResult:
    weights: tuple
    sequence: avgham.PulseSequence
    report: avgham.AverageHamiltonianReport
    solver_status: str
    objective: float = None
    nodes: int = 0
    rotation: tuple = None       # recovery only: chosen rotation word key
    rotations: tuple = ()        # recovery only: all valid rotations, scan order
    kept: tuple = ()             # recovery only: surviving input frame indices


def _dedup_rows(a, b):
    """Drop duplicate and vacuous rows from (a, b); keeps first occurrence."""
    seen = {}
    for row, rhs in zip(a, b):
        if np.max(np.abs(row), initial=0.0) < SUPPORT_TOL and abs(rhs) < SUPPORT_TOL:
            continue
        key = tuple(np.round(row, 9)) + (round(float(rhs), 9),)
        if key not in seen:
            seen[key] = (row, rhs)
    if not seen:
        return np.zeros((0, a.shape[1])), np.zeros(0)
    rows = list(seen.values())
    return np.array([r for r, _ in rows]), np.array([v for _, v in rows])


def assemble(dictionary, target, alpha=DEFAULT_ALPHA, weight_cap=DEFAULT_WEIGHT_CAP,
             beta_min=DEFAULT_BETA_MIN, model=None):
    """Build the weighted-class MILP for one of the three search targets."""
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}; expected one of {TARGETS}")
    entries = dictionary.entries
    if not entries:
        raise ValueError("empty dictionary")
    d = dictionary.d
    m = pair_model(d, j=1.0) if model is None else model
    cz = project(build_zeeman(m), d, 2).coeffs
    n_rows = cz.size
    combined = np.array([e.hz_coeffs + e.hdd_coeffs for e in entries]).T  # rows x classes
    zeeman = np.array([e.hz_coeffs for e in entries]).T
    n_classes = len(entries)

    support = np.nonzero(np.abs(cz) > SUPPORT_TOL)[0]
    comp = np.setdiff1d(np.arange(n_rows), support)

    if target == ZERO_ZEEMAN:
        a_eq, b_eq = combined, np.zeros(n_rows)
        a_ub = -np.ones((1, n_classes))
        b_ub = np.array([-1.0])
    else:
        a_eq = combined[comp]
        b_eq = np.zeros(len(comp))
        if target == CLEAN_ZEEMAN and len(support) > 1:
            # orthogonal complement of cz within the support rows: pins the
            # surviving single-site term onto the S_z ray
            i0 = support[0]
            extra = np.array([cz[i0] * zeeman[i] - cz[i] * zeeman[i0]
                              for i in support[1:]])
            a_eq = np.vstack([a_eq, extra])
            b_eq = np.concatenate([b_eq, np.zeros(len(support) - 1)])
        # at least one weight-unit of the bare Zeeman vector on support rows;
        # note the overall minus sign turning >= into the <= convention
        a_ub = -combined[support]
        b_ub = -cz[support]
        if beta_min and beta_min > 0:
            # sum_k w_k (beta_min * cz[i] - c_k[i]) <= 0 per support row
            rows = beta_min * cz[support, None] - combined[support]
            a_ub = np.vstack([a_ub, rows])
            b_ub = np.concatenate([b_ub, np.zeros(len(support))])

    a_eq, b_eq = _dedup_rows(np.atleast_2d(a_eq), b_eq)
    base = LinearProgram(
        c=np.ones(n_classes),
        a_eq=a_eq, b_eq=b_eq, a_ub=a_ub, b_ub=b_ub,
        lb=np.zeros(n_classes), ub=np.full(n_classes, float(weight_cap)),
        integrality=(INTEGER,) * n_classes,
    )
    augmented = add_cardinality(base, alpha=alpha, u=float(weight_cap))
    return SearchProblem(
        dictionary=dictionary, target=target, problem=augmented,
        m_eq=a_eq.shape[0], m_eq_raw=n_rows - len(support),
        m_ub=len(support), support=tuple(int(i) for i in support),
        complement=tuple(int(i) for i in comp),
        alpha=alpha, weight_cap=weight_cap,
        beta_min=float(beta_min) if target != ZERO_ZEEMAN else 0.0,
    )


def decode_weights(dictionary, weights, label=""):
    """Build a PulseSequence from per-class integer weights (ascending index)."""
    words, wts = [], []
    for i, w in enumerate(weights):
        if w > 0:
            words.append(dictionary.entries[i].word)
            wts.append(int(w))
    if not words:
        raise ValueError("no nonzero weights to decode")
    return avgham.PulseSequence.from_words(dictionary.d, words, wts, label=label)


def _oracle_check(sp, result):
    """Mandatory independent verification of a decoded solver result."""
    rep = result.report
    problems = []
    if rep.dipolar_residual >= 1e-9:
        problems.append(f"dipolar residual {rep.dipolar_residual:.3e}")
    if sp.target == ZERO_ZEEMAN:
        if abs(rep.zeeman_strength) >= 1e-9:
            problems.append(f"zeeman strength {rep.zeeman_strength:.3e} != 0")
    else:
        if rep.beta_prime < 1.0 - 1e-6:
            problems.append(f"beta' {rep.beta_prime:.6f} below one weight-unit")
        if sp.beta_min and rep.zeeman_strength < sp.beta_min - 1e-6:
            problems.append(f"beta {rep.zeeman_strength:.6f} below {sp.beta_min}")
    if sp.target == CLEAN_ZEEMAN and not rep.clean_zeeman:
        problems.append("zeeman term not clean")
    if problems:
        raise RuntimeError("solver result failed oracle verification: "
                           + "; ".join(problems))


def _complementary_pair_incumbents(dictionary, weight_cap, max_units=6):
    """Feasible zero-Zeeman weight vectors built from complementary pairs.

    Two classes whose Zeeman maps are exact negatives cancel every Zeeman
    row when weighted equally, leaving only their summed dipolar maps.  A
    meet-in-the-middle scan over multisets of such pair units (up to
    ``max_units``) finds the ones whose dipolar sums vanish too; each is a
    feasible point of the zero-Zeeman program.  Deterministic; returns
    per-class weight vectors sorted by total weight, then support size,
    then class indices.
    """
    entries = dictionary.entries
    hz = np.array([e.hz_coeffs for e in entries])
    hd = np.array([e.hdd_coeffs for e in entries])
    key = lambda v: (np.round(v, 9) + 0.0).tobytes()

    groups = {}
    for i in range(len(entries)):
        groups.setdefault(key(hz[i]), []).append(i)
    units = []
    for k in sorted(groups):
        nk = key(-np.frombuffer(k))
        if nk in groups and k < nk:
            units.extend(itertools.product(groups[k], groups[nk]))
    if not units:
        return []
    dv = np.array([hd[i] + hd[j] for i, j in units])

    def sums(size):
        table = {}
        for combo in itertools.combinations_with_replacement(
                range(len(units)), size):
            table.setdefault(key(dv[list(combo)].sum(0)), []).append(combo)
        return table

    half = max_units // 2
    tables = {s: sums(s) for s in range(1, half + 1)}
    combos = set()
    for i in np.nonzero(np.max(np.abs(dv), axis=1) < 1e-9)[0]:
        combos.add((int(i),))
    for sa in range(1, half + 1):
        for sb in range(sa, max_units - sa + 1):
            if sb > half:
                break
            for k, ca in tables[sa].items():
                nk = key(-np.frombuffer(k))
                for a in ca:
                    for b in tables[sb].get(nk, ()):
                        combos.add(tuple(sorted(a + b)))

    out = []
    for combo in combos:
        w = np.zeros(len(entries))
        for u in combo:
            i, j = units[u]
            w[i] += 1.0
            w[j] += 1.0
        if np.max(w) <= weight_cap and \
                np.max(np.abs(dv[list(combo)].sum(0))) < 1e-9:
            out.append(w)
    order = lambda w: (w.sum(), np.count_nonzero(w),
                       tuple(np.nonzero(w)[0]), tuple(w[w > 0]))
    return sorted(out, key=order)


def run_search(sp, node_limit=DEFAULT_NODE_LIMIT):
    """Solve the assembled MILP and decode + verify the result."""
    if sp.target != ZERO_ZEEMAN and not sp.support:
        return SearchResult(weights=None, sequence=None, report=None,
                            solver_status="infeasible")
    warm = ()
    if sp.target == ZERO_ZEEMAN:
        warm = tuple(np.concatenate([w, (w > 0).astype(float)])
                     for w in _complementary_pair_incumbents(
                         sp.dictionary, sp.weight_cap))
    sol = solve_mip(sp.problem, node_limit=node_limit, warm=warm)
    if sol.x is None:
        return SearchResult(weights=None, sequence=None, report=None,
                            solver_status=sol.status, nodes=sol.nodes)
    n_classes = len(sp.dictionary.entries)
    weights = tuple(int(round(v)) for v in sol.x[:n_classes])
    seq = decode_weights(sp.dictionary, weights, label=sp.target)
    report = avgham.verify(seq)
    result = SearchResult(weights=weights, sequence=seq, report=report,
                          solver_status=sol.status, objective=sol.objective,
                          nodes=sol.nodes)
    _oracle_check(sp, result)
    return result


def _single_site_map(u, d):
    """Coefficient vector of U^dag S_z U over the traceless basis elements."""
    _, _, sz = spin_operators(d)
    return project(dagger(u) @ sz @ u, d, 1).coeffs


def _find_pairs(seq):
    """Group frames into (i, j) pairs whose S_z maps are opposite."""
    maps = [_single_site_map(f.unitary, seq.d) for f in seq.frames]
    unused = list(range(len(maps)))
    pairs = []
    while unused:
        i = unused.pop(0)
        partner = None
        for j in unused:
            if np.allclose(maps[i], -np.asarray(maps[j]), atol=1e-9):
                partner = j
                break
        if partner is None:
            raise ValueError(f"frame {i} has no opposite-map partner; "
                             "sequence frames must pair into +-S_z maps")
        unused.remove(partner)
        pairs.append((i, partner))
    return pairs, maps


def _proportional_to_sz(op, d, tol=1e-9):
    """Positive c with op == c * S_z, or None."""
    _, _, sz = spin_operators(d)
    idx = np.unravel_index(np.argmax(np.abs(sz)), sz.shape)
    c = (op[idx] / sz[idx]).real
    if c <= tol:
        return None
    if np.max(np.abs(op - c * sz)) > tol * max(1.0, abs(c)):
        return None
    return float(c)


def _sz_like_spectrum(op, tol=1e-9):
    """True when eigenvalues are proportional to (-1, 0, 1), nonzero."""
    vals = np.sort(np.linalg.eigvalsh(op))
    mid = len(vals) // 2
    return (abs(vals[mid]) < tol and vals[-1] > tol
            and abs(vals[-1] + vals[0]) < tol)


@lru_cache(maxsize=1)
def _rotation_table():
    words = tuple(qutrit_words())
    stack = np.stack([evaluate_word(w, 3) for w in words])
    return words, stack


def _valid_rotations(m_total, tol=1e-9):
    """All scan words U with U^dag m_total U a positive multiple of S_z."""
    words, stack = _rotation_table()
    _, _, sz = spin_operators(3)
    t = np.einsum("nji,jk,nkl->nil", stack.conj(), m_total, stack)
    c = t[:, 0, 0].real
    dev = np.max(np.abs(t - c[:, None, None] * sz), axis=(1, 2))
    ok = (c > tol) & (dev <= tol * np.maximum(1.0, np.abs(c)))
    return [words[i] for i in np.nonzero(ok)[0]]


def recover_clean_zeeman(base, pair_state=None, rotation=None):
    """Turn Zeeman pair terms on/off, then rotate the average back onto S_z.

    Pairs of frames with opposite S_z maps are toggled: +1 keeps the first
    member with doubled weight, -1 keeps the partner doubled, 0 keeps both
    (their Zeeman contributions cancel).  Either way the dipolar sum is
    unchanged.  States are tried by descending count of pairs turned on;
    for each state with an S_z-like surviving spectrum, the 13,824-word
    dictionary is scanned in enumeration order and every U with
    U^dag (sum of surviving maps) U equal to a positive multiple of S_z is
    collected.  The first hit is applied (right-multiplied onto every
    frame); the full hit list is returned since the choice among them is
    pure convention.

    ``pair_state`` fixes one on/off assignment instead of maximizing.
    ``rotation`` (a word key) overrides the first-hit choice; it must be
    one of the valid rotations for the surviving frame set.
    """
    seq = base.sequence if hasattr(base, "sequence") else base
    if seq.d != 3:
        raise ValueError("recovery rotation search is defined for qutrits")
    pairs, _ = _find_pairs(seq)
    _, _, sz = spin_operators(seq.d)

    if pair_state is not None:
        states = [tuple(pair_state)]
        if len(states[0]) != len(pairs):
            raise ValueError(f"pair_state needs {len(pairs)} entries")
    else:
        states = sorted(itertools.product((1, -1, 0), repeat=len(pairs)),
                        key=lambda s: -sum(v != 0 for v in s))

    for state in states:
        frames = []
        for (i, j), choice in zip(pairs, state):
            fi, fj = seq.frames[i], seq.frames[j]
            if choice == 1:
                frames.append((i, fi, 2 * fi.weight))
            elif choice == -1:
                frames.append((j, fj, 2 * fj.weight))
            else:
                frames.append((i, fi, fi.weight))
                frames.append((j, fj, fj.weight))
        frames.sort(key=lambda t: t[0])
        m_total = sum(w * (dagger(f.unitary) @ sz @ f.unitary)
                      for _, f, w in frames)
        if not _sz_like_spectrum(m_total):
            continue
        hits = _valid_rotations(m_total)
        if not hits:
            continue
        keys = tuple(tuple(l[:3] for l in w.key()) for w in hits)
        chosen = hits[0]
        if rotation is not None:
            want = tuple(tuple(l[:3]) for l in rotation)
            if want not in keys:
                raise ValueError("requested rotation does not map the "
                                 "surviving average onto S_z")
            chosen = hits[keys.index(want)]
        u = evaluate_word(chosen, 3)
        new_frames = tuple(
            avgham.Frame(unitary=f.unitary @ u, weight=int(wt),
                         word=f.word.concat(chosen) if f.word is not None else None)
            for _, f, wt in frames)
        new_seq = avgham.PulseSequence(d=3, frames=new_frames,
                                       label="clean-zeeman-recovery")
        report = avgham.verify(new_seq)
        return SearchResult(
            weights=tuple(int(wt) for _, _, wt in frames),
            sequence=new_seq, report=report,
            solver_status="recovered",
            rotation=tuple(l[:3] for l in chosen.key()),
            rotations=keys,
            kept=tuple(i for i, _, _ in frames))
    return SearchResult(weights=None, sequence=None, report=None,
                        solver_status="no-rotation-found")
