import math

import numpy as np
import pytest

from pulseforge.model import (DEFAULT_GAMMA, DEFAULT_GAMMA_BZ,
                              CouplingDistribution, EnsembleModel,
                              build_dipolar, build_hamiltonian, build_zeeman,
                              coupling_cdf, pair_model, sample_coupling)


def test_zeeman_qubit_pair():
    m = pair_model(2, j=0.0, gamma_Bz=2.0)
    # 2 * (Sz x I + I x Sz) = diag(2, 0, 0, -2)
    assert np.allclose(build_zeeman(m), np.diag([2.0, 0.0, 0.0, -2.0]))


def test_dipolar_qubit_pair_matrix():
    # 3 SzSz - S.S for two spins 1/2 at unit coupling, worked by hand:
    # diagonal (1/2, -1/2, -1/2, 1/2), flip-flop -1/2 between |01> and |10>
    h = build_dipolar(pair_model(2, j=1.0))
    expect = np.array([
        [0.5, 0.0, 0.0, 0.0],
        [0.0, -0.5, -0.5, 0.0],
        [0.0, -0.5, -0.5, 0.0],
        [0.0, 0.0, 0.0, 0.5],
    ])
    assert np.allclose(h, expect, atol=1e-14)


def test_dipolar_scales_linearly_in_j():
    h1 = build_dipolar(pair_model(2, j=1.0))
    h3 = build_dipolar(pair_model(2, j=3.0))
    assert np.allclose(h3, 3.0 * h1)


def test_dipolar_qutrit_blocks_double_quantum_flip_flop():
    # |+1,-1> <-> |0,0> changes the total quadratic splitting sum Sz_i^2
    # (2 vs 0) and must be masked out; |+1,0> <-> |0,+1| is kept
    h = build_dipolar(pair_model(3, j=1.0))
    basis = {(p, q): 3 * p + q for p, q in
             [(i, j) for i in range(3) for j in range(3)]}
    # rows are ordered m = +1, 0, -1 per site
    plus_minus = basis[(0, 2)]
    zero_zero = basis[(1, 1)]
    plus_zero = basis[(0, 1)]
    zero_plus = basis[(1, 0)]
    assert h[plus_minus, zero_zero] == 0.0
    assert h[zero_zero, plus_minus] == 0.0
    assert abs(h[plus_zero, zero_plus]) > 0.1


@pytest.mark.parametrize("d", [2, 3])
def test_dipolar_conserves_sz_and_quadratic_splitting(d):
    from pulseforge.algebra import spin_operators, tensor
    _, _, sz = spin_operators(d)
    eye = np.eye(d)
    total_z = tensor([sz, eye]) + tensor([eye, sz])
    total_q = tensor([sz @ sz, eye]) + tensor([eye, sz @ sz])
    h = build_dipolar(pair_model(d, j=1.0))
    assert np.max(np.abs(h @ total_z - total_z @ h)) < 1e-12
    assert np.max(np.abs(h @ total_q - total_q @ h)) < 1e-12


def test_hamiltonian_is_sum_of_parts():
    m = pair_model(3, j=0.7)
    assert np.allclose(build_hamiltonian(m),
                       build_zeeman(m) + build_dipolar(m))


def test_model_validation():
    with pytest.raises(ValueError):
        EnsembleModel(d=2, n=2, couplings=np.ones((3, 3)))
    with pytest.raises(ValueError):
        EnsembleModel(d=2, n=2, couplings=np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ValueError):
        EnsembleModel(d=2, n=2, couplings=np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        EnsembleModel(d=2, gamma_Bz=float("nan"))


def test_model_defaults():
    m = EnsembleModel(d=3)
    assert m.n == 2 and m.dim == 9
    assert m.gamma_Bz == DEFAULT_GAMMA_BZ
    assert np.all(m.couplings == 0.0)
    assert pair_model(2, j=0.25).couplings[0, 1] == 0.25


def test_distribution_requires_positive_gamma():
    with pytest.raises(ValueError):
        CouplingDistribution(0.0)
    with pytest.raises(ValueError):
        CouplingDistribution(-1.0)


def test_coupling_cdf_shape_and_limits():
    dist = CouplingDistribution(DEFAULT_GAMMA)
    assert coupling_cdf(dist, 0.0) == 0.0
    assert coupling_cdf(dist, 1e9) > 0.999
    grid = np.array([0.001, 0.01, 0.1, 1.0])
    vals = coupling_cdf(dist, grid)
    assert vals.shape == grid.shape
    assert np.all(np.diff(vals) > 0)
    # closed form at J = Gamma: 1 - erf(1/sqrt 2)
    assert coupling_cdf(dist, dist.gamma_param) == pytest.approx(
        1.0 - math.erf(1.0 / math.sqrt(2.0)), abs=1e-15)


def test_sample_coupling_matches_cdf_at_gamma():
    # ensemble draw statistics against the analytic CDF, 1% absolute
    dist = CouplingDistribution(DEFAULT_GAMMA)
    rng = np.random.default_rng(12345)
    draws = np.array([sample_coupling(dist, rng) for _ in range(50_000)])
    assert np.all(draws > 0)
    emp = float(np.mean(draws <= dist.gamma_param))
    assert abs(emp - coupling_cdf(dist, dist.gamma_param)) < 0.01


def test_sample_coupling_matches_cdf_on_grid():
    dist = CouplingDistribution(1.0)
    rng = np.random.default_rng(99)
    draws = np.sort([sample_coupling(dist, rng) for _ in range(40_000)])
    for j in (0.5, 1.0, 2.0, 5.0):
        emp = np.searchsorted(draws, j) / draws.size
        assert abs(emp - coupling_cdf(dist, j)) < 0.012


def test_sample_coupling_seed_expansion():
    dist = CouplingDistribution(1.0)
    a = sample_coupling(dist, 7)
    b = sample_coupling(dist, 7)
    assert a == b  # int seeds expand deterministically
    assert a != sample_coupling(dist, 8)
