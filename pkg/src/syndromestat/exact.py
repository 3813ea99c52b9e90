"""Exact enumeration: partition functions and information diagnostics.

States of the n-flavor model are enumerated as packed integers: flavor a's
layer t occupies bit field [(a*num_layers + t)*I, ...+I).  Per-layer and
per-bond log-weight tables turn each state's log weight into a handful of
table lookups, vectorized over chunks of at most 2^20 states, accumulated
with log-sum-exp.  Results are exact up to floating point.

Normalization conventions (derived once, validated against the dense
density-matrix oracle):

    Tr rho_QM^n = (2^(N+I*T) * |R|)^(1-n) * sum_{u^1..u^{n-1}} prod_a W(u^a) * W(XOR_a u^a)

with W the configuration weight WITHOUT the 1/2-per-measurement factors,
|R| = 2^(dim R).  Defect sectors enter through sign-flipped spatial tables;
their free energies are differences, so the prefactor cancels.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as _np

from .codes import CodeSpec, redundancy_dimension
from .gf2 import parity
from .model import SpacetimeModel, build_single_flavor
from .noise import NoiseParams, site_weights

DEFAULT_BUDGET = 1 << 28
CHUNK_BITS = 20
LOG2 = math.log(2.0)


class SizeError(Exception):
    """Raised when an enumeration would exceed the state budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"enumeration needs {required} states, budget is {budget} "
            f"(set SYNDROMESTAT_BUDGET or pass budget= to raise it)"
        )


def state_budget(budget=None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get("SYNDROMESTAT_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def _check_budget(bits: int, budget) -> None:
    b = state_budget(budget)
    if bits > 63 or (1 << bits) > b:
        raise SizeError(1 << min(bits, 63), b)


@dataclass
class _Accum:
    """Streaming log-sum-exp accumulator, optionally signed."""

    max_log: float = -math.inf
    total: float = 0.0  # sum of sign * exp(log - max_log)

    def add(self, logs: _np.ndarray, signs=None):
        m = float(_np.max(logs)) if logs.size else -math.inf
        if m == -math.inf:
            return
        if m > self.max_log:
            if self.max_log != -math.inf:
                self.total *= math.exp(self.max_log - m)
            self.max_log = m
        vals = _np.exp(logs - self.max_log)
        if signs is None:
            self.total += float(_np.sum(vals))
        else:
            self.total += float(_np.dot(signs, vals))

    @property
    def log_value(self) -> float:
        if self.total <= 0.0:
            return -math.inf
        return self.max_log + math.log(self.total)

    @property
    def signed_value_scaled(self):
        """(total, max_log) so that value = total * exp(max_log)."""
        return self.total, self.max_log


class _FlavorEnumerator:
    """Vectorized enumeration over all states of an (n-1)+product flavor model."""

    def __init__(self, base: SpacetimeModel, kappas, include_half: bool,
                 budget=None):
        self.base = base
        self.kappas = list(kappas)
        self.nm1 = len(self.kappas)
        self.include_half = include_half
        self.I = base.I
        self.L = base.num_layers
        self.bits = self.nm1 * self.L * self.I
        _check_budget(self.bits, budget)
        kprod = 0
        for k in self.kappas:
            kprod ^= k
        self.flavor_models = [base.with_defect(k) for k in self.kappas]
        self.prod_model = base.with_defect(kprod)
        # pinned top layer for 'field' boundary
        self.pin = base.boundary == "field"

    def _layer_logw(self, model, layers):
        """Vector log weight for arrays of layer ints (one array per layer)."""
        lay = list(layers)
        if self.pin:
            lay = lay + [_np.zeros_like(lay[0])]
        logw = _np.zeros(lay[0].shape, dtype=_np.float64)
        for t in range(1, self.base.T + 1):
            logw += model.spatial_logw_table(t)[lay[t - 1]]
            logw += model.temporal_logw_table(t, self.include_half)[
                lay[t] ^ lay[t - 1]
            ]
        return logw

    def chunks(self):
        """Yield (logw_total, flavor_layers) per chunk.

        flavor_layers[a][t] is the array of layer-t ints of flavor a for the
        chunk's states.
        """
        total_states = 1 << self.bits
        chunk = 1 << min(self.bits, CHUNK_BITS)
        maskI = _np.uint64((1 << self.I) - 1)
        for start in range(0, total_states, chunk):
            idx = _np.arange(start, start + chunk, dtype=_np.uint64)
            flavor_layers = []
            for a in range(self.nm1):
                lays = []
                for t in range(self.L):
                    shift = _np.uint64((a * self.L + t) * self.I)
                    lays.append(((idx >> shift) & maskI).astype(_np.int64))
                flavor_layers.append(lays)
            logw = _np.zeros(chunk, dtype=_np.float64)
            prod_layers = [_np.zeros(chunk, dtype=_np.int64) for _ in range(self.L)]
            for a in range(self.nm1):
                logw += self._layer_logw(self.flavor_models[a], flavor_layers[a])
                for t in range(self.L):
                    prod_layers[t] ^= flavor_layers[a][t]
            logw += self._layer_logw(self.prod_model, prod_layers)
            yield logw, flavor_layers


def _all_couplings_zero(base: SpacetimeModel) -> bool:
    """True when every spatial weight is 1 and every readout rate is 0, so
    the model is a zero-coupling paramagnet (noiseless limit)."""
    for pars, qeff in zip(base.step_params, base.step_qeff):
        w = site_weights(*pars.rates)
        if any(v != 1.0 for v in w[1:]):
            return False
        if _np.any(qeff != 0.0):
            return False
    return True


def multiflavor_log_z(base: SpacetimeModel, kappas, include_half: bool = True,
                      budget=None) -> float:
    """log sum over all flavor states of prod_a W_{kappa^a}(u^a) * W_prod."""
    if _all_couplings_zero(base):
        # all couplings vanish: every state carries the same weight (one
        # offset per flavor plus one for the flavor product), so the sum
        # factorizes and no enumeration is needed
        nm1 = len(list(kappas))
        bits = nm1 * base.num_layers * base.I
        return bits * LOG2 + (nm1 + 1) * base.log_offset(include_half)
    acc = _Accum()
    for logw, _ in _FlavorEnumerator(base, kappas, include_half, budget).chunks():
        acc.add(logw)
    return acc.log_value


def partition_function(model: SpacetimeModel, n: int, budget=None) -> float:
    """log Z_n of the n-flavor model built from `model` (constant offsets
    included; every explicit flavor carries the model's own defect)."""
    if n < 2:
        raise ValueError("n >= 2 required")
    return multiflavor_log_z(model, [model.kappa] * (n - 1), True, budget)


def log_trace_moment(code: CodeSpec, params: NoiseParams, T: int, n: int,
                     kappas=None, budget=None, model=None) -> float:
    """log Tr rho_QM^n (normalized so that Tr rho = 1), or the defect-sector
    variant with per-flavor defects kappas."""
    base = model if model is not None else build_single_flavor(code, params, T)
    if kappas is None:
        kappas = [0] * (n - 1)
    raw = multiflavor_log_z(base, kappas, include_half=False, budget=budget)
    dim_r = redundancy_dimension(code)
    norm = (code.num_checks * T + code.n + dim_r) * LOG2
    return (1 - n) * norm + raw


@dataclass
class DiagnosticsResult:
    n: int
    log_z: float = math.nan
    defect_free_energies: dict = field(default_factory=dict)
    ic: float = math.nan
    d_s: dict = field(default_factory=dict)
    d_kl: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


def _defect_tuples(two_k: int, nm1: int):
    """All (n-1)-tuples of 2K-bit defect vectors."""
    total = 1 << (two_k * nm1)
    mask = (1 << two_k) - 1
    for combo in range(total):
        yield tuple((combo >> (a * two_k)) & mask for a in range(nm1))


def coherent_information(code: CodeSpec, params: NoiseParams, T: int, n: int,
                         budget=None) -> DiagnosticsResult:
    """Renyi-n coherent information from defect excess free energies:

        ic = 1/(n-1) * log sum_{kappa-tuples} exp(-dF) - K log 2.
    """
    if n < 2:
        raise ValueError("n >= 2 required")
    base = build_single_flavor(code, params, T)
    two_k = 2 * code.k
    res = DiagnosticsResult(n=n, metadata={"code": code.name, "T": T,
                                           "params": params})
    log_z0 = multiflavor_log_z(base, [0] * (n - 1), True, budget)
    res.log_z = log_z0
    acc_max = -math.inf
    acc_sum = 0.0
    for kappas in _defect_tuples(two_k, n - 1):
        if any(kappas):
            log_zk = multiflavor_log_z(base, list(kappas), True, budget)
        else:
            log_zk = log_z0
        df = log_z0 - log_zk  # excess free energy of the defect
        res.defect_free_energies[kappas] = df
        if -df > acc_max:
            acc_sum = acc_sum * math.exp(acc_max + df) if acc_max != -math.inf else 0.0
            acc_max = -df
        acc_sum += math.exp(-df - acc_max)
    res.ic = (acc_max + math.log(acc_sum)) / (n - 1) - code.k * LOG2
    return res


def _syndrome_realizable(code: CodeSpec, s: int) -> bool:
    from . import gf2

    rows = code.symplectic_rows()
    bits = [(s >> i) & 1 for i in range(code.num_checks)]
    return gf2.solve(rows, 2 * code.n, bits) is not None


def _boundary_correlator(base: SpacetimeModel, n: int, s: int, budget) -> float:
    """< prod_i (sigma^1_{0,i})^{s_i} > in the defect-free n-flavor model."""
    num = _Accum()
    den = _Accum()
    for logw, flavor_layers in _FlavorEnumerator(
        base, [0] * (n - 1), True, budget
    ).chunks():
        signs = 1.0 - 2.0 * (
            (_np.bitwise_count(flavor_layers[0][0].astype(_np.uint64)
                               & _np.uint64(s)) & 1).astype(_np.float64)
        )
        den.add(logw)
        num.add(logw, signs)
    num_total, num_max = num.signed_value_scaled
    den_total, den_max = den.signed_value_scaled
    return (num_total / den_total) * math.exp(num_max - den_max)


def relative_entropy(code: CodeSpec, params: NoiseParams, T: int, n: int,
                     s: int, budget=None) -> float:
    """D_s^(n) = -1/(n-1) * log of the layer-0 syndrome correlator.

    s is an I-bit vector of violated checks; it must be realizable as the
    syndrome of some Pauli error.  A zero correlator is reported as +inf.
    """
    if n < 2:
        raise ValueError("n >= 2 required")
    if s >> code.num_checks:
        raise ValueError("syndrome vector longer than the check list")
    if not _syndrome_realizable(code, s):
        raise ValueError(f"syndrome {s:#x} is not realizable by any Pauli error")
    base = build_single_flavor(code, params, T, boundary="open")
    corr = _boundary_correlator(base, n, s, budget)
    if corr <= 0.0:
        return math.inf
    return -math.log(corr) / (n - 1)


def kl_divergence(code: CodeSpec, params: NoiseParams, T: int, n: int,
                  s: int, budget=None) -> float:
    """Same correlator as relative_entropy but in the boundary-field model
    (top layer pinned, its temporal bonds acting as a field)."""
    if n < 2:
        raise ValueError("n >= 2 required")
    if s >> code.num_checks:
        raise ValueError("syndrome vector longer than the check list")
    if not _syndrome_realizable(code, s):
        raise ValueError(f"syndrome {s:#x} is not realizable by any Pauli error")
    base = build_single_flavor(code, params, T, boundary="field")
    corr = _boundary_correlator(base, n, s, budget)
    if corr <= 0.0:
        return math.inf
    return -math.log(corr) / (n - 1)


def csv_row(code: CodeSpec, params: NoiseParams, T: int, n: int,
            quantity: str, value: float) -> str:
    """One result row: code, L, T, n, p_x, p_y, p_z, q, lambda, quantity, value."""
    L = code.geometry.get("L", "")
    q = params.q if not isinstance(params.q, dict) else "per-check"
    return (
        f"{code.name},{L},{T},{n},{float(params.px)!r},{float(params.py)!r},"
        f"{float(params.pz)!r},{q if isinstance(q, str) else float(q)!r},"
        f"{float(params.lam)!r},{quantity},{float(value)!r}"
    )
