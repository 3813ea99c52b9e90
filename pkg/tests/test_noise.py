"""Noise parameters, effective readout rates, and coupling formulas."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syndromestat.noise import (
    NoiseParams,
    couplings_from_rates,
    effective_readout_rate,
    single_pauli_rates,
    site_weights,
)

rates_st = st.floats(0.0, 0.3, allow_nan=False)


def test_validation():
    with pytest.raises(ValueError):
        NoiseParams(px=0.5, py=0.4, pz=0.2)
    with pytest.raises(ValueError):
        NoiseParams(px=-0.1)
    with pytest.raises(ValueError):
        NoiseParams(q=0.5)
    with pytest.raises(ValueError):
        NoiseParams(lam=0.0)
    with pytest.raises(ValueError):
        NoiseParams(lam=1.5)


@given(rates_st, rates_st, rates_st)
@settings(max_examples=200, deadline=None)
def test_site_weights_definition(px, py, pz):
    w = site_weights(px, py, pz)
    # w indexed by 2*bx + bz: character sums of the single-site distribution
    rates = single_pauli_rates(px, py, pz)  # [1-sum, pz, px, py] by 2x+z
    for bx in (0, 1):
        for bz in (0, 1):
            total = 0.0
            for ex in (0, 1):
                for ez in (0, 1):
                    # character: commutation sign of W(bx,bz) with error (ex,ez)
                    sign = (-1) ** ((bx * ez + bz * ex) % 2)
                    total += sign * rates[2 * ex + ez]
            assert w[2 * bx + bz] == pytest.approx(total, abs=1e-14)


def test_weights_permutation_symmetry():
    """Relabeling (px,py,pz) permutes the weight triple (wX, wY, wZ)."""
    base = site_weights(0.05, 0.10, 0.20)
    swapped = site_weights(0.20, 0.10, 0.05)  # px <-> pz swaps wX=w[2], wZ=w[1]
    assert swapped[1] == pytest.approx(base[2])
    assert swapped[2] == pytest.approx(base[1])
    assert swapped[3] == pytest.approx(base[3])


def test_effective_readout_rate_limits():
    assert effective_readout_rate(0.1, 1.0) == pytest.approx(0.1)
    assert effective_readout_rate(0.0, 1.0) == 0.0
    # weak measurement adds flip probability even at q = 0
    assert effective_readout_rate(0.0, 0.5) > 0.0
    lam = 0.7
    q = 0.08
    expected = q * 2 * lam / (1 + lam**2) + 0.5 * (1 - lam) ** 2 / (1 + lam**2)
    assert effective_readout_rate(q, lam) == pytest.approx(expected)


def test_effective_rate_monotone_grids():
    qs = np.linspace(0.0, 0.49, 100)
    for lam in np.linspace(0.05, 1.0, 100):
        vals = [effective_readout_rate(q, lam) for q in qs]
        assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
        assert all(0.0 <= v <= 0.5 for v in vals)


def test_couplings_closed_form():
    px, py, pz = 0.04, 0.07, 0.12
    c = couplings_from_rates(NoiseParams(px=px, py=py, pz=pz, q=0.03), 1)
    wx = 1 - 2 * px - 2 * py
    wy = 1 - 2 * py - 2 * pz
    wz = 1 - 2 * px - 2 * pz
    assert c.jx == pytest.approx(-0.25 * math.log(wx * wz / wy))
    assert c.jy == pytest.approx(-0.25 * math.log(wx * wy / wz))
    assert c.jz == pytest.approx(-0.25 * math.log(wy * wz / wx))
    assert c.mu_q[0] == pytest.approx(-math.log(1 - 2 * 0.03))


@given(rates_st, rates_st, rates_st)
@settings(max_examples=200, deadline=None)
def test_couplings_reproduce_weights(px, py, pz):
    """The coupling parameterization must reproduce the channel weights:
    w(h) = prod over nonzero Paulis of exp(J_a * chi_a(h)) up to the
    common normalization factor."""
    w = site_weights(px, py, pz)
    if min(w[1], w[2], w[3]) <= 1e-9:
        return
    c = couplings_from_rates(NoiseParams(px=px, py=py, pz=pz), 1)
    # the four weights are exp(c.c + s_x jx + s_y jy + s_z jz) with signs
    # given by commutation of W(h) with X, Y, Z errors
    sign_table = {
        0: (1, 1, 1),
        1: (-1, -1, 1),  # h = Z anticommutes with X and Y errors
        2: (1, -1, -1),  # h = X anticommutes with Y and Z errors
        3: (-1, 1, -1),  # h = Y anticommutes with X and Z errors
    }
    for idx in range(4):
        sx, sy, sz = sign_table[idx]
        model = math.exp(c.c + sx * c.jx + sy * c.jy + sz * c.jz)
        assert model == pytest.approx(w[idx], rel=1e-10)


def test_negative_weight_rejected_with_names():
    with pytest.raises(ValueError):
        couplings_from_rates(NoiseParams(px=0.3, py=0.3, pz=0.0), 1)


def test_per_check_readout_rates():
    params = NoiseParams(px=0.01, q={0: 0.1, 2: 0.2})
    arr = params.readout_rates(3)
    assert arr[0] == pytest.approx(0.1)
    assert arr[1] == 0.0
    assert arr[2] == pytest.approx(0.2)
