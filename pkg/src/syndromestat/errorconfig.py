"""Error-configuration expansion: syndrome records, decoding sectors,
maximum-likelihood statistics, and the Fourier duality check.

An error configuration is T physical Pauli errors b_t plus T readout-flip
vectors eps_t.  The true syndrome accumulates m_t = m_{t-1} + <<a_i, b_t>>;
the record consists of the noisy outcomes m'_t = m_t + eps_t and the true
final syndrome m_T.  Configurations are binned on the fly by (record,
decoding sector kappa of the cumulative error), which collapses the
4^{NT} 2^{IT} configurations into a 2^{I(T+1)+2K} table: per round, the
distribution of (syndrome increment, sector increment) over the 4^N
single-round errors is XOR-convolved into the running record table.

This module never touches Boltzmann weights; the stat-mech side enters only
in fourier_duality_check, where both expansions are compared record by
record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as _np

from . import gf2
from .codes import CodeSpec
from .exact import SizeError, log_trace_moment, state_budget
from .gf2 import PauliWord
from .model import build_single_flavor
from .noise import NoiseParams, single_pauli_rates

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class ErrorConfig:
    """Physical errors b_t (PauliWords) and readout flips eps_t (I-bit ints),
    one of each per round t = 1..T."""

    b: tuple
    eps: tuple

    def __post_init__(self):
        if len(self.b) != len(self.eps):
            raise ValueError("b and eps must have equal length T")

    @property
    def T(self) -> int:
        return len(self.b)


@dataclass(frozen=True)
class SyndromeRecord:
    """Noisy outcomes m'_t (t = 1..T) and the true final syndrome m_T."""

    m_noisy: tuple
    m_final: int

    @property
    def T(self) -> int:
        return len(self.m_noisy)


def syndrome_of(cfg: ErrorConfig, code: CodeSpec) -> SyndromeRecord:
    """Cumulative-syndrome record of a configuration."""
    m = 0
    noisy = []
    for b, eps in zip(cfg.b, cfg.eps):
        inc = 0
        for i, a in enumerate(code.checks):
            inc |= gf2.symplectic_form(a, b) << i
        m ^= inc
        noisy.append(m ^ eps)
    return SyndromeRecord(tuple(noisy), m)


def config_probability(cfg: ErrorConfig, params: NoiseParams, code: CodeSpec,
                       perfect_final: bool = False) -> float:
    """Product of per-site Pauli rates and per-check readout-flip rates."""
    rates = single_pauli_rates(params.px, params.py, params.pz)
    qeff = params.readout_rates(code.num_checks)
    prob = 1.0
    for t, (b, eps) in enumerate(zip(cfg.b, cfg.eps), start=1):
        for r in range(code.n):
            xr = (b.x >> r) & 1
            zr = (b.z >> r) & 1
            prob *= rates[2 * xr + zr]
        if perfect_final and t == cfg.T:
            if eps:
                return 0.0
            continue
        for i in range(code.num_checks):
            e = (eps >> i) & 1
            prob *= qeff[i] if e else 1.0 - qeff[i]
    return prob


def sector_of(code: CodeSpec, word: PauliWord) -> int:
    """Decoding-sector bits of a (cumulative) error word.

    Bit k < K is the coefficient of logical-X_k, bit K+k of logical-Z_k,
    read off by pairing against the conjugate logicals.
    """
    k = code.k
    out = 0
    for j in range(k):
        out |= gf2.symplectic_form(word, code.logicals[k + j]) << j
        out |= gf2.symplectic_form(word, code.logicals[j]) << (k + j)
    return out


# ---------------------------------------------------------------------------
# record-binned enumeration
# ---------------------------------------------------------------------------


def _fwht_axis(a: _np.ndarray, axis: int) -> _np.ndarray:
    """Unnormalized Walsh-Hadamard transform along one power-of-two axis."""
    a = _np.moveaxis(a, axis, 0)
    n = a.shape[0]
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            top = a[start:start + h].copy()
            bot = a[start + h:start + 2 * h].copy()
            a[start:start + h] = top + bot
            a[start + h:start + 2 * h] = top - bot
        h *= 2
    return _np.moveaxis(a, 0, axis)


def step_increment_distribution(code: CodeSpec, params: NoiseParams):
    """Joint distribution D[minc, kinc] of the syndrome and sector increments
    of one round's physical error, over all 4^N single-round Paulis."""
    n = code.n
    if 2 * n > 40:
        raise SizeError(1 << (2 * n), state_budget(None))
    idx = _np.arange(1 << (2 * n), dtype=_np.uint64)
    bx = idx >> _np.uint64(n)
    bz = idx & _np.uint64((1 << n) - 1)
    rates = single_pauli_rates(params.px, params.py, params.pz)
    prob = _np.ones(idx.shape, dtype=_np.float64)
    for r in range(n):
        xr = ((bx >> _np.uint64(r)) & 1).astype(_np.int64)
        zr = ((bz >> _np.uint64(r)) & 1).astype(_np.int64)
        prob *= rates[2 * xr + zr]
    minc = _np.zeros(idx.shape, dtype=_np.int64)
    for i, a in enumerate(code.checks):
        par = (_np.bitwise_count(bz & _np.uint64(a.x))
               ^ _np.bitwise_count(bx & _np.uint64(a.z))) & 1
        minc |= par.astype(_np.int64) << i
    kinc = _np.zeros(idx.shape, dtype=_np.int64)
    k = code.k
    for j in range(k):
        wz = code.logicals[k + j]
        par = (_np.bitwise_count(bx & _np.uint64(wz.z))
               ^ _np.bitwise_count(bz & _np.uint64(wz.x))) & 1
        kinc |= par.astype(_np.int64) << j
        wx = code.logicals[j]
        par = (_np.bitwise_count(bx & _np.uint64(wx.z))
               ^ _np.bitwise_count(bz & _np.uint64(wx.x))) & 1
        kinc |= par.astype(_np.int64) << (k + j)
    D = _np.zeros((1 << code.num_checks, 1 << (2 * k)), dtype=_np.float64)
    _np.add.at(D, (minc, kinc), prob)
    return D


def _readout_distribution(code: CodeSpec, params: NoiseParams) -> _np.ndarray:
    """E[eps] over I-bit flip vectors (independent per-check flips)."""
    qeff = params.readout_rates(code.num_checks)
    E = _np.ones(1, dtype=_np.float64)
    for i in range(code.num_checks):
        E = _np.kron(_np.array([1.0 - qeff[i], qeff[i]]), E)
    return E


def record_distribution(code: CodeSpec, params: NoiseParams, T: int,
                        perfect_final: bool = True, budget=None) -> _np.ndarray:
    """Joint array P with axes (m'_1, ..., m'_T, m_T, kappa).

    P[record, kappa] = total probability of all configurations producing the
    record whose cumulative error lies in sector kappa (absolute labels,
    relative to the identity reference).
    """
    I = code.num_checks
    two_k = 2 * code.k
    cells = (T + 2) * I + two_k  # m'_1..m'_T, running m, kappa
    if (1 << cells) > state_budget(budget) or cells > 60:
        raise SizeError(1 << min(cells, 62), state_budget(budget))
    D = step_increment_distribution(code, params)
    Dh = _fwht_axis(_fwht_axis(D, 0), 1)
    E = _readout_distribution(code, params)
    xor_E = E[_np.bitwise_xor.outer(_np.arange(1 << I), _np.arange(1 << I))]
    # A axes: (m, m'_1, ..., m'_t, kappa)
    A = _np.zeros((1 << I, 1 << two_k))
    A[0, 0] = 1.0
    for t in range(1, T + 1):
        # XOR-convolve the running (m, kappa) axes with the step distribution
        Ah = _fwht_axis(_fwht_axis(A, 0), A.ndim - 1)
        shape = [1 << I] + [1] * (A.ndim - 2) + [1 << two_k]
        Ah = Ah * Dh.reshape(shape)
        A = _fwht_axis(_fwht_axis(Ah, 0), A.ndim - 1) / float((1 << I) * (1 << two_k))
        # attach the round's noisy outcome m'_t = m XOR eps as a new axis
        if perfect_final and t == T:
            # eps_T = 0: the outcome axis duplicates m
            A = _np.einsum("m...k,mo->m...ok", A, _np.eye(1 << I))
        else:
            A = _np.einsum("m...k,mo->m...ok", A, xor_E)
    # reorder to (m'_1..m'_T, m_T, kappa)
    A = _np.moveaxis(A, 0, -2)
    return A


def record_index(record: SyndromeRecord):
    return tuple(record.m_noisy) + (record.m_final,)


def reference_config(code: CodeSpec, record: SyndromeRecord,
                     perfect_final: bool = True) -> ErrorConfig:
    """Deterministic configuration reproducing the record.

    Places a single canonical error with syndrome m_T in round 1 (the GF(2)
    echelon solution, free variables zero) and accounts for every noisy
    outcome with readout flips.  Raises if the record is inconsistent.
    """
    rows = code.symplectic_rows()
    bits = [(record.m_final >> i) & 1 for i in range(code.num_checks)]
    v = gf2.solve(rows, 2 * code.n, bits)
    if v is None:
        raise ValueError("record is inconsistent: final syndrome unrealizable")
    w = PauliWord(code.n, v & ((1 << code.n) - 1), v >> code.n)
    T = record.T
    b = [w] + [PauliWord(code.n, 0, 0)] * (T - 1)
    eps = [m ^ record.m_final for m in record.m_noisy]
    if perfect_final and eps[-1] != 0:
        raise ValueError(
            "record is inconsistent with a perfect final round "
            "(last outcome differs from the final syndrome)"
        )
    return ErrorConfig(tuple(b), tuple(eps))


def z_prime(code: CodeSpec, params: NoiseParams, T: int,
            record: SyndromeRecord, perfect_final: bool = True,
            budget=None, reference: ErrorConfig | None = None):
    """Sector weights of one record: map kappa -> summed probability.

    Sector labels are relative to the reference configuration (the
    deterministic one from reference_config unless supplied), hence
    reference-dependent; the returned dict carries the reference under key
    'reference' in the companion metadata tuple (weights, meta).
    """
    if record.T != T:
        raise ValueError("record length differs from T")
    ref = reference if reference is not None else reference_config(
        code, record, perfect_final
    )
    check = syndrome_of(ref, code)
    if check != record:
        raise ValueError("supplied reference does not reproduce the record")
    cumulative = PauliWord(code.n, 0, 0, 0)
    for bw in ref.b:
        cumulative = PauliWord(code.n, cumulative.x ^ bw.x, cumulative.z ^ bw.z)
    ref_sector = sector_of(code, cumulative)
    P = record_distribution(code, params, T, perfect_final, budget)
    weights_abs = P[record_index(record)]
    weights = {
        kappa_abs ^ ref_sector: float(wv)
        for kappa_abs, wv in enumerate(weights_abs)
    }
    meta = {
        "reference": ref,
        "reference_sector_absolute": ref_sector,
        "record_probability": float(weights_abs.sum()),
        "labels": "relative-to-reference",
    }
    return weights, meta


def ml_statistics(code: CodeSpec, params: NoiseParams, T: int,
                  perfect_final: bool = True, budget=None) -> dict:
    """Average ML failure probability, sector conditional entropy, and the
    exact n -> 1 coherent information K log 2 - H(kappa | record)."""
    P = record_distribution(code, params, T, perfect_final, budget)
    flat = P.reshape(-1, P.shape[-1])
    rec_prob = flat.sum(axis=1)
    delta_bar = float(rec_prob.sum() - flat.max(axis=1).sum())
    nz = flat > 0.0
    h = -float(_np.sum(flat[nz] * _np.log(flat[nz])))
    hr = -float(_np.sum(rec_prob[rec_prob > 0] * _np.log(rec_prob[rec_prob > 0])))
    cond_entropy = h - hr
    if delta_bar > cond_entropy + 1e-12:
        raise AssertionError(
            f"ML bound violated: delta_bar {delta_bar} > H(kappa|record) {cond_entropy}"
        )
    return {
        "delta_bar": delta_bar,
        "conditional_entropy": cond_entropy,
        "ic_von_neumann": code.k * LOG2 - cond_entropy,
        "total_probability": float(rec_prob.sum()),
        "table": flat,
    }


# ---------------------------------------------------------------------------
# Fourier duality
# ---------------------------------------------------------------------------


def _exact_transformed_weights(model, shape) -> _np.ndarray:
    """Multi-axis Walsh-Hadamard transform of the Boltzmann weights in exact
    arithmetic (including the 2^-cells prefactor), rounded to float64 at the
    end.

    All rates are binary floats, hence dyadic rationals, so every weight and
    every transform coefficient is an integer over a power of two; this
    removes the catastrophic cancellation that floating point suffers on
    low-probability records.
    """
    from fractions import Fraction

    I, T, N = model.I, model.T, model.N
    sp_tabs, bond_tabs = [], []
    for t in range(1, T + 1):
        p = model.step_params[t - 1]
        px, py, pz = Fraction(p.px), Fraction(p.py), Fraction(p.pz)
        w4 = [Fraction(1), 1 - 2 * px - 2 * py,
              1 - 2 * py - 2 * pz, 1 - 2 * px - 2 * pz]
        sp = []
        for u in range(1 << I):
            acc = Fraction(1)
            for r in range(N):
                bx = bin(u & model.mask_x[r]).count("1") & 1
                bz = bin(u & model.mask_z[r]).count("1") & 1
                bx ^= (model.defect_x >> r) & 1
                bz ^= (model.defect_z >> r) & 1
                acc *= w4[2 * bx + bz]
            sp.append(acc)
        qeff = [Fraction(float(x)) for x in model.step_qeff[t - 1]]
        bond = []
        for d in range(1 << I):
            acc = Fraction(1)
            for i in range(I):
                if (d >> i) & 1:
                    acc *= 1 - 2 * qeff[i]
            bond.append(acc)
        sp_tabs.append(sp)
        bond_tabs.append(bond)
    # dyadic denominators: scale everything to one integer array
    denom_shift = 0
    for tab in sp_tabs + bond_tabs:
        denom_shift += max(f.denominator.bit_length() - 1 for f in tab)
    flat = []
    for idx in _np.ndindex(shape):
        acc = Fraction(1)
        for t in range(1, T + 1):
            acc *= sp_tabs[t - 1][idx[t - 1]] * bond_tabs[t - 1][
                idx[t - 1] ^ idx[t]]
        scaled = acc * (1 << denom_shift)
        assert scaled.denominator == 1
        flat.append(scaled.numerator)
    # in-place integer Walsh-Hadamard transform, one bit at a time
    nbits = I * (T + 1)
    for b in range(nbits):
        step = 1 << b
        for lo in range(1 << nbits):
            if lo & step:
                continue
            hi = lo | step
            a, c = flat[lo], flat[hi]
            flat[lo], flat[hi] = a + c, a - c
    scale = Fraction(1, 1 << (denom_shift + nbits))
    out = _np.empty(len(flat), dtype=_np.float64)
    for i, v in enumerate(flat):
        out[i] = float(v * scale)
    return out.reshape(shape)


def stabilizer_side_record_probabilities(code: CodeSpec, params: NoiseParams,
                                         T: int, budget=None) -> _np.ndarray:
    """Record probabilities predicted by the stabilizer expansion:

        Pr(record) = 2^{-I(T+1)} sum_u (-1)^{sum_t dm'_t . u_t} W({u_t})

    evaluated for all records at once by a multi-axis Walsh-Hadamard
    transform of the Boltzmann weights.  Axis order (m'_1..m'_T, m_T).
    """
    I = code.num_checks
    cells = I * (T + 1)
    if (1 << cells) > state_budget(budget) or cells > 60:
        raise SizeError(1 << min(cells, 62), state_budget(budget))
    model = build_single_flavor(code, params, T)
    shape = (1 << I,) * (T + 1)
    if cells <= 18:
        # the transform cancels almost all of the weight mass on
        # low-probability records, so evaluate it in exact arithmetic:
        # every input float is a dyadic rational
        G = _exact_transformed_weights(model, shape)
    else:
        G = _np.ones(shape, dtype=_np.longdouble)
        for t in range(1, T + 1):
            sp = _np.exp(model.spatial_logw_table(t).astype(_np.longdouble))
            G *= sp.reshape((1,) * (t - 1) + (1 << I,) + (1,) * (T + 1 - t))
            tmp = _np.exp(model.temporal_logw_table(t, include_half=False)
                          .astype(_np.longdouble))
            bond = tmp[_np.bitwise_xor.outer(_np.arange(1 << I),
                                             _np.arange(1 << I))]
            G *= bond.reshape(
                (1,) * (t - 1) + (1 << I, 1 << I) + (1,) * (T - t)
            )
        for axis in range(T + 1):
            G = _fwht_axis(G, axis)  # now indexed by (dm'_0, ..., dm'_T)
        G /= float(1 << cells)
    # re-index from difference variables to the record:
    # dm'_0 = m'_1; dm'_t = m'_t ^ m'_{t+1} (1 <= t < T); dm'_T = m'_T ^ m_T
    grids = _np.indices(shape)  # record axes (m'_1..m'_T, m_T)
    deltas = [grids[0]]
    for t in range(1, T):
        deltas.append(grids[t - 1] ^ grids[t])
    deltas.append(grids[T - 1] ^ grids[T])
    return G[tuple(deltas)].astype(_np.float64)


def fourier_duality_check(code: CodeSpec, params: NoiseParams, T: int,
                          budget=None) -> dict:
    """Compare the two expansions record by record.

    Returns the max relative deviation over records carrying more than
    1e-12 of the total mass on either side, plus the Plancherel corollaries:
    the zero-record probability against the single-flavor weight sum, and
    sum_records Pr^n against the normalized n-flavor partition function for
    n in {2, 3} (where the enumeration budget allows).
    """
    lhs_tab = record_distribution(code, params, T, perfect_final=False,
                                  budget=budget)
    lhs = lhs_tab.sum(axis=-1)
    rhs = stabilizer_side_record_probabilities(code, params, T, budget)
    scale = max(float(lhs.max()), float(rhs.max()))
    sig = _np.maximum(_np.abs(lhs), _np.abs(rhs)) > 1e-12 * scale
    rel = _np.abs(lhs - rhs)[sig] / _np.maximum(_np.abs(lhs), _np.abs(rhs))[sig]
    out = {
        "max_relative_deviation": float(rel.max()) if rel.size else 0.0,
        "max_absolute_deviation_insignificant": float(
            _np.abs(lhs - rhs)[~sig].max()) if (~sig).any() else 0.0,
        "total_probability": float(lhs.sum()),
    }
    for n in (2, 3):
        try:
            log_sum = math.log(float(_np.sum(lhs**n)))
            log_pred = (n - 1) * code.k * LOG2 + log_trace_moment(
                code, params, T, n, budget=budget
            )
            out[f"plancherel_n{n}"] = abs(log_sum - log_pred)
        except SizeError:
            out[f"plancherel_n{n}"] = None
    return out
