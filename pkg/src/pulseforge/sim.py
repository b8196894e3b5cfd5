"""Floquet-stroboscopic Ramsey simulation for pulsed spin ensembles.

One cycle of a sequence with delta pulses is the product of free evolutions
under the toggled Hamiltonians, last frame leftmost; because every cycle
ends with the closing pulse, that product already is the lab-frame
propagator, and n cycles are its n-th power.  Traces sample the readout at
cycle boundaries only, where average Hamiltonian theory applies.

The ensemble is a fresh spin pair per sample with couplings drawn from the
heavy-tailed distribution in the model module; each sample owns a generator
stream derived from (seed, sample index), so results do not depend on chunk
boundaries or worker count.  Reduction over samples uses compensated
summation per time point.

Readout convention: the observable is the x-type generator of the
preparation subspace on each spin (sigma_x for qubits, the +1/0 coupling
lambda_1 for SQ, the +1/-1 coupling lambda_3 for DQ), summed over spins and
normalized by its value at t = 0.  For qubits this equals the normalized
transverse magnetization; the DQ coherence precesses at twice the Zeeman
frequency.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import avgham
from .algebra import GELL_MANN, SIGMA_X, tensor
from .model import (DEFAULT_GAMMA_BZ, CouplingDistribution, EnsembleModel,
                    build_dipolar, build_hamiltonian, build_zeeman,
                    sample_coupling)

QUBIT = "qubit"
SQ = "sq"
DQ = "dq"
BASES = (QUBIT, SQ, DQ)

DEFAULT_CYCLES = 256
DEFAULT_SAMPLES = 10_000
FRINGE_POINTS = 20  # default tau puts this many stroboscopic points per fringe
THREADS_ENV = "PULSEFORGE_THREADS"

_SQRT2 = math.sqrt(2.0)

# per-spin preparation state and readout generator, by basis
_BASIS_TABLE = {
    QUBIT: (2, np.array([1.0, 1.0]) / _SQRT2, SIGMA_X),
    SQ: (3, np.array([1.0, 1.0, 0.0]) / _SQRT2, GELL_MANN[1]),
    DQ: (3, np.array([1.0, 0.0, 1.0]) / _SQRT2, GELL_MANN[3]),
}


@dataclass(frozen=True)
class SimConfig:
    """One Ramsey run: model, optional sequence, sampling plan.

    ``tau = None`` resolves to the fringe-sampling default (see
    default_tau); ``samples = None`` resolves to 10,000 when an ensemble
    scale is given and to a single deterministic run otherwise;
    ``gamma_param = None`` disables coupling draws and uses the model's
    couplings as they are.
    """

    model: object
    seq: object = None
    basis: str = QUBIT
    tau: float = None
    cycles: int = DEFAULT_CYCLES
    samples: int = None
    seed: int = 0
    gamma_param: float = None

    def __post_init__(self):
        basis = str(self.basis).lower()
        if basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}; expected one of {BASES}")
        object.__setattr__(self, "basis", basis)
        if _BASIS_TABLE[basis][0] != self.model.d:
            raise ValueError(f"basis {basis!r} needs d = {_BASIS_TABLE[basis][0]}, "
                             f"model has d = {self.model.d}")
        if self.seq is not None and self.seq.d != self.model.d:
            raise ValueError("sequence dimension does not match model")
        if not self.cycles >= 2:
            raise ValueError("cycles must be at least 2")
        if self.samples is not None and not self.samples >= 1:
            raise ValueError("samples must be at least 1")
        if self.tau is not None and not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.gamma_param is not None and not self.gamma_param > 0:
            raise ValueError("gamma_param must be positive")

    def resolved_samples(self):
        if self.samples is not None:
            return int(self.samples)
        return DEFAULT_SAMPLES if self.gamma_param is not None else 1

    def resolved_tau(self):
        if self.tau is not None:
            return float(self.tau)
        return default_tau(self.seq, gamma_Bz=self.model.gamma_Bz)


@dataclass(frozen=True)
class Trace:
    """Time series of the normalized readout plus the resolved config."""

    times: np.ndarray
    signal: np.ndarray
    metadata: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.signal, dtype=float)
        if t.shape != s.shape or t.ndim != 1:
            raise ValueError("times and signal must be equal-length vectors")
        if t.size >= 2 and np.min(np.diff(t)) <= 0:
            raise ValueError("times must be strictly increasing")
        if s.size and np.max(np.abs(s)) > 1.0 + 1e-9:
            raise ValueError("readout left the unit interval; broken propagator?")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "signal", s)


def default_tau(seq, gamma_Bz=DEFAULT_GAMMA_BZ):
    """Base interval giving FRINGE_POINTS stroboscopic points per fringe.

    Solves omega_0 * t_c * beta = 2 pi / FRINGE_POINTS with t_c the cycle
    time; sequences that suppress the Zeeman term entirely (beta = 0) have
    no fringe to resolve and fall back to beta = 1.
    """
    if seq is None:
        beta, total = 1.0, 1
    else:
        rep = avgham.verify(seq)
        beta, total = rep.zeeman_strength, seq.total_weight
    if beta <= 1e-12:
        beta = 1.0
    return 2.0 * math.pi / (FRINGE_POINTS * abs(gamma_Bz) * beta * total)


def _expm_herm(h, t):
    """e^{-i h t} for Hermitian h (or a stack of them) by eigendecomposition."""
    w, v = np.linalg.eigh(h)
    phase = np.exp(-1j * t * w)
    return np.einsum("...ij,...j,...kj->...ik", v, phase, v.conj())


def cycle_unitary(seq, model, tau):
    """Lab-frame propagator over one cycle.

    With no sequence this is one free interval e^{-iH tau}; otherwise the
    ordered product of free evolutions under the toggled Hamiltonians.  The
    closing pulse needs no separate factor: the cycle's pulse product is
    the identity, so the toggled product equals the lab propagator.
    """
    h = build_hamiltonian(model)
    if seq is None:
        return _expm_herm(h, tau)
    u = None
    for f, ht in zip(seq.frames, avgham.toggled_hamiltonians(seq, h)):
        step = _expm_herm(ht, f.weight * tau)
        u = step if u is None else step @ u
    return u


def _embedded_sum(op, d, n):
    eye = np.eye(d, dtype=complex)
    out = np.zeros((d ** n, d ** n), dtype=complex)
    for site in range(n):
        out += tensor([op if i == site else eye for i in range(n)])
    return out


def _pair_list(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _draw_couplings(dist, seed, s, n_pairs):
    rng = np.random.default_rng(np.random.SeedSequence((seed, s)))
    return np.array([sample_coupling(dist, rng) for _ in range(n_pairs)])


def _toggled_parts(seq, model):
    """Per-frame (Zeeman part, per-pair unit-coupling dipolar parts).

    The Hamiltonian is affine in the couplings, so each sample's toggled
    frame Hamiltonians assemble from these fixed pieces.
    """
    hz = build_zeeman(EnsembleModel(d=model.d, n=model.n,
                                    gamma_Bz=model.gamma_Bz))
    pair_ops = []
    for i, j in _pair_list(model.n):
        c = np.zeros((model.n, model.n))
        c[i, j] = c[j, i] = 1.0
        pair_ops.append(build_dipolar(
            EnsembleModel(d=model.d, n=model.n, gamma_Bz=model.gamma_Bz,
                          couplings=c)))

    def stack(ops):
        if ops:
            return np.stack(ops)
        return np.zeros((0, model.dim, model.dim), dtype=complex)

    if seq is None:
        return [hz], [stack(pair_ops)], [1]
    az = avgham.toggled_hamiltonians(seq, hz)
    per_pair = [avgham.toggled_hamiltonians(seq, op) for op in pair_ops]
    ad = [stack([pp[k] for pp in per_pair]) for k in range(len(az))]
    return az, ad, [f.weight for f in seq.frames]


def _resolve_threads(threads):
    if threads is None:
        threads = os.environ.get(THREADS_ENV, "1")
    threads = int(threads)
    return max(1, threads)


def ramsey(config, intra_cycle=False, threads=None):
    """Ensemble-averaged Ramsey trace.

    Prepares every spin in the basis superposition, evolves stroboscopically
    by powers of the cycle propagator (computed once per sample), and
    averages the normalized readout over coupling draws.  ``intra_cycle``
    additionally records each frame boundary inside every cycle; such
    traces are diagnostics and are rejected by spectrum() since their grid
    is not uniform.  ``threads`` chunks samples across workers (defaults to
    the PULSEFORGE_THREADS environment variable, then 1); results are
    independent of the worker count.
    """
    model = config.model
    tau = config.resolved_tau()
    n_samples = config.resolved_samples()
    d, psi_site, op_site = _BASIS_TABLE[config.basis]
    psi0 = tensor([psi_site.astype(complex).reshape(d, 1)] * model.n)[:, 0]
    obs = _embedded_sum(op_site, d, model.n)
    norm0 = float(np.real(psi0.conj() @ obs @ psi0))

    az, ad, weights = _toggled_parts(config.seq, model)
    taus = [w * tau for w in weights]
    t_c = sum(taus)
    pairs = _pair_list(model.n)
    dist = None if config.gamma_param is None else \
        CouplingDistribution(config.gamma_param)
    fixed_j = np.array([model.couplings[i, j] for i, j in pairs])

    if intra_cycle:
        boundary = np.cumsum([0.0] + taus)[1:]
        times = np.concatenate(
            [[0.0]] + [c * t_c + boundary for c in range(config.cycles)])
    else:
        times = t_c * np.arange(config.cycles)
    n_times = times.size
    per_sample = np.empty((n_samples, n_times))

    def block(lo, hi):
        js = np.empty((hi - lo, len(pairs)))
        for s in range(lo, hi):
            js[s - lo] = fixed_j if dist is None else \
                _draw_couplings(dist, config.seed, s, len(pairs))
        # per-frame propagators for the whole block at once
        steps = []
        for hz_k, hd_k, t_k in zip(az, ad, taus):
            hk = hz_k[None] + np.tensordot(js, hd_k, axes=(1, 0))
            steps.append(_expm_herm(hk, t_k))
        u = steps[0]
        for stp in steps[1:]:
            u = stp @ u
        psi = np.broadcast_to(psi0, (hi - lo, psi0.size)).copy()

        def read():
            return np.real(np.einsum("si,ij,sj->s", psi.conj(), obs, psi))

        col = 0
        if intra_cycle:
            per_sample[lo:hi, col] = read()
            col += 1
            for _ in range(config.cycles):
                for stp in steps:
                    psi = np.einsum("sij,sj->si", stp, psi)
                    per_sample[lo:hi, col] = read()
                    col += 1
        else:
            for _ in range(config.cycles):
                per_sample[lo:hi, col] = read()
                col += 1
                psi = np.einsum("sij,sj->si", u, psi)

    n_threads = min(_resolve_threads(threads), n_samples)
    if n_threads == 1:
        block(0, n_samples)
    else:
        bounds = np.linspace(0, n_samples, n_threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(lambda se: block(*se),
                          zip(bounds[:-1], bounds[1:])))

    # compensated, order-independent reduction over samples
    signal = np.array([math.fsum(per_sample[:, c]) for c in range(n_times)])
    signal /= n_samples * norm0

    meta = {
        "basis": config.basis,
        "d": model.d,
        "n": model.n,
        "gamma_Bz": model.gamma_Bz,
        "sequence": getattr(config.seq, "label", None) if config.seq else None,
        "tau": tau,
        "cycle_time": t_c,
        "cycles": config.cycles,
        "samples": n_samples,
        "seed": config.seed,
        "gamma_param": config.gamma_param,
        "intra_cycle": bool(intra_cycle),
    }
    return Trace(times=times, signal=signal, metadata=meta)


def spectrum(trace, omega0=None):
    """Magnitude spectrum of a stroboscopic trace.

    Plain DFT with the mean retained (a DC line is physics, not an
    artifact), 4x zero padding, no window; frequencies in units of
    omega_0.  Rejects non-uniform grids and traces shorter than 8 points.
    """
    t, s = trace.times, trace.signal
    if t.size < 8:
        raise ValueError("need at least 8 points for a spectrum")
    dt = np.diff(t)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * abs(dt[0]):
        raise ValueError("spectrum needs a uniform (stroboscopic) time grid")
    if omega0 is None:
        omega0 = trace.metadata.get("gamma_Bz", DEFAULT_GAMMA_BZ)
    n_fft = 4 * t.size
    mags = np.abs(np.fft.rfft(s, n=n_fft))
    freqs = 2.0 * math.pi * np.fft.rfftfreq(n_fft, d=float(dt[0])) / abs(omega0)
    return freqs, mags


def tail_envelope(trace, fraction=0.25):
    """Max |signal| over the trailing ``fraction`` of the trace."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    k = max(1, int(math.ceil(fraction * trace.signal.size)))
    return float(np.max(np.abs(trace.signal[-k:])))


def _format(x):
    return f"{x:.15g}"


def write_series(path, header, columns):
    """CSV writer used for traces and spectra: 15 significant digits."""
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", encoding="ascii") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*cols):
            fh.write(",".join(_format(v) for v in row) + "\n")


def read_series(path, expect=None):
    """Read a two-column CSV written by write_series; returns (header, cols)."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        if expect is not None and header != list(expect):
            raise ValueError(f"bad header {header}; expected {list(expect)}")
        data = [line.strip().split(",") for line in fh if line.strip()]
    if not data:
        raise ValueError(f"{path} has no data rows")
    cols = np.array([[float(v) for v in row] for row in data]).T
    return header, cols


def trace_to_csv(trace, path):
    write_series(path, ("time", "signal"), (trace.times, trace.signal))


def trace_from_csv(path, metadata=None):
    _, (t, s) = read_series(path, expect=("time", "signal"))
    return Trace(times=t, signal=s, metadata=dict(metadata or {}))
