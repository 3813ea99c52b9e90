"""Dense channel-level density-matrix oracle.

Simulates the monitored-code density matrix directly in the Pauli
coefficient representation: rho = sum_v c_v W_v over N (+K reference)
physical qubits plus one readout qubit per measurement event, where W_v is
the canonical Hermitian word of gf2.PauliWord and c_v is real.  Each round
applies the single-qubit Pauli channel to every data qubit (a diagonal map
on coefficients) and then measures every check: a term commuting with the
check g splits into

    P  ->  (1/2) P  +  (1/2)(1 - 2 q_eff) (P g) (x) Z_readout,

with the sign of P g folded into the coefficient; anticommuting terms are
annihilated (none occur here, since the support stays in the abelian group
generated by the checks, readout Zs, and reference-pair logicals).

This module shares no code path with the stat-mech enumeration engines; it
exists to validate them.
"""

from __future__ import annotations

import math

import numpy as _np

from . import gf2
from .codes import CodeSpec, redundancy_dimension
from .gf2 import PauliWord, multiply, product_word
from .noise import NoiseParams
from .exact import SizeError, state_budget

_bc = _np.bitwise_count


class PauliOperator:
    """Real linear combination of canonical Hermitian Pauli words."""

    def __init__(self, nq: int, xs, zs, coef):
        if 2 * nq > 64:
            raise SizeError(1 << 62, state_budget(None))
        self.nq = nq
        self.xs = _np.asarray(xs, dtype=_np.uint64)
        self.zs = _np.asarray(zs, dtype=_np.uint64)
        self.coef = _np.asarray(coef, dtype=_np.float64)

    def packed(self):
        return self.xs | (self.zs << _np.uint64(self.nq))

    def merged(self) -> "PauliOperator":
        """Combine duplicate words and drop exact zeros."""
        keys = self.packed()
        uniq, inv = _np.unique(keys, return_inverse=True)
        coef = _np.bincount(inv, weights=self.coef, minlength=len(uniq))
        keep = coef != 0.0
        uniq, coef = uniq[keep], coef[keep]
        mask = _np.uint64((1 << self.nq) - 1)
        return PauliOperator(self.nq, uniq & mask, uniq >> _np.uint64(self.nq), coef)

    def identity_coef(self) -> float:
        hit = (self.xs == 0) & (self.zs == 0)
        return float(self.coef[hit].sum())

    def apply_pauli_channel(self, r: int, px: float, py: float, pz: float):
        """In place: conjugation-averaged single-qubit channel on qubit r."""
        mul = _np.array(
            [1.0, 1.0 - 2 * px - 2 * py, 1.0 - 2 * py - 2 * pz,
             1.0 - 2 * px - 2 * pz]
        )  # indexed by 2*x_r + z_r: I, Z, X, Y
        xb = ((self.xs >> _np.uint64(r)) & 1).astype(_np.int64)
        zb = ((self.zs >> _np.uint64(r)) & 1).astype(_np.int64)
        self.coef = self.coef * mul[2 * xb + zb]

    def _mult_signs(self, gx: int, gz: int):
        """Signs of W(v) * W(g) relative to the canonical W(v XOR g), for all
        stored v; requires elementwise commutation (asserted)."""
        gxu, gzu = _np.uint64(gx), _np.uint64(gz)
        anti = (_bc(self.xs & gzu) + _bc(self.zs & gxu)) & 1
        if _np.any(anti):
            raise AssertionError("support word anticommutes with a check")
        ph = (
            _bc(self.xs & self.zs).astype(_np.int64)
            + gf2.popcount(gx & gz)
            + 2 * _bc(self.zs & gxu).astype(_np.int64)
            - _bc((self.xs ^ gxu) & (self.zs ^ gzu)).astype(_np.int64)
        ) % 4
        if _np.any(ph & 1):
            raise AssertionError("non-Hermitian product in oracle support")
        return 1.0 - 2.0 * (ph >> 1).astype(_np.float64)

    def measure(self, gx: int, gz: int, readout_bit: int, q_eff: float
                ) -> "PauliOperator":
        """Measured-and-recorded check (gx, gz) onto a fresh readout qubit."""
        signs = self._mult_signs(gx, gz)
        anc = _np.uint64(1 << readout_bit)
        xs2 = self.xs ^ _np.uint64(gx)
        zs2 = self.zs ^ _np.uint64(gz) ^ anc
        coef2 = 0.5 * (1.0 - 2.0 * q_eff) * signs * self.coef
        out = PauliOperator(
            self.nq,
            _np.concatenate([self.xs, xs2]),
            _np.concatenate([self.zs, zs2]),
            _np.concatenate([0.5 * self.coef, coef2]),
        )
        return out.merged()


def _initial_terms_qm(code: CodeSpec, nq: int):
    """rho_0 = (2^-N / |R|) sum_u g^u as a packed-key coefficient dict."""
    terms = {}
    amp = 2.0 ** (-code.n) / 2 ** redundancy_dimension(code)
    words = list(code.checks)
    acc = {}
    # enumerate g^u incrementally over u (Gray order): one multiply per step
    cur = PauliWord(code.n, 0, 0, 0)
    u = 0
    total = 1 << code.num_checks
    for step in range(total):
        key = (cur.x, cur.z)
        sign = {0: 1.0, 2: -1.0}[cur.phase]
        terms[key] = terms.get(key, 0.0) + amp * sign
        if step + 1 < total:
            gray_next = (step + 1) ^ ((step + 1) >> 1)
            flip = (u ^ gray_next).bit_length() - 1
            cur = multiply(cur, words[flip])
            u = gray_next
    return terms


def _initial_terms_qmr(code: CodeSpec, nq: int):
    """Code state maximally entangled with K reference qubits."""
    n, k = code.n, code.k
    pair_words = []
    for j in range(k):  # X_bar_j (x) X_ref_j
        w = code.logicals[j]
        pair_words.append(PauliWord(n + k, w.x | (1 << (n + j)), w.z))
    for j in range(k):  # Z_bar_j (x) Z_ref_j
        w = code.logicals[k + j]
        pair_words.append(PauliWord(n + k, w.x, w.z | (1 << (n + j))))
    checks_ext = [PauliWord(n + k, g.x, g.z) for g in code.checks]
    gens = checks_ext + pair_words
    amp = 2.0 ** (-(n + k)) / 2 ** redundancy_dimension(code)
    terms = {}
    cur = PauliWord(n + k, 0, 0, 0)
    u = 0
    total = 1 << len(gens)
    for step in range(total):
        sign = {0: 1.0, 2: -1.0}[cur.phase]
        key = (cur.x, cur.z)
        terms[key] = terms.get(key, 0.0) + amp * sign
        if step + 1 < total:
            gray_next = (step + 1) ^ ((step + 1) >> 1)
            flip = (u ^ gray_next).bit_length() - 1
            cur = multiply(cur, gens[flip])
            u = gray_next
    return terms


def build_density_matrix(code: CodeSpec, params: NoiseParams, T: int,
                         variant: str = "qm", s: int = 0,
                         budget=None) -> PauliOperator:
    """Evolve the chosen initial state through T noisy measurement rounds.

    variant: 'qm' (code state), 'qmr' (with reference qubits), 'qm_s'
    (code state hit by a Pauli error with syndrome s before round 1).
    """
    data = code.n + (code.k if variant == "qmr" else 0)
    nq = data + code.num_checks * T
    if 2 * nq > 64:
        raise SizeError(1 << 62, state_budget(budget))
    support_cap = 1 << (code.num_checks * (T + 1) + (2 * code.k if variant == "qmr" else 0))
    if support_cap > state_budget(budget):
        raise SizeError(support_cap, state_budget(budget))
    if variant in ("qm", "qm_s"):
        terms = _initial_terms_qm(code, nq)
    elif variant == "qmr":
        terms = _initial_terms_qmr(code, nq)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if variant == "qm_s":
        if not _syndrome_sign_applicable(code, s):
            raise ValueError(f"syndrome {s:#x} not realizable by any Pauli error")
        # conjugate by an error with syndrome s: each g^u picks up the sign
        # (-1)^{symplectic form with the error word}
        w = _find_syndrome_error(code, s)
        terms = {
            (x, z): (-c if gf2.parity(x & w.z) ^ gf2.parity(z & w.x) else c)
            for (x, z), c in terms.items()
        }
    xs = _np.array([x for x, _ in terms], dtype=_np.uint64)
    zs = _np.array([z for _, z in terms], dtype=_np.uint64)
    coef = _np.array(list(terms.values()), dtype=_np.float64)
    op = PauliOperator(nq, xs, zs, coef).merged()
    qeff = params.readout_rates(code.num_checks)
    for t in range(1, T + 1):
        for r in range(code.n):
            op.apply_pauli_channel(r, params.px, params.py, params.pz)
        for i, g in enumerate(code.checks):
            bit = data + (t - 1) * code.num_checks + i
            op = op.measure(g.x, g.z, bit, qeff[i])
    return op


def _find_syndrome_error(code: CodeSpec, s: int):
    rows = code.symplectic_rows()
    bits = [(s >> i) & 1 for i in range(code.num_checks)]
    v = gf2.solve(rows, 2 * code.n, bits)
    if v is None:
        raise ValueError(f"syndrome {s:#x} not realizable")
    return PauliWord(code.n, v & ((1 << code.n) - 1), v >> code.n)


def _syndrome_sign_applicable(code: CodeSpec, s: int) -> bool:
    rows = code.symplectic_rows()
    bits = [(s >> i) & 1 for i in range(code.num_checks)]
    return gf2.solve(rows, 2 * code.n, bits) is not None


def trace_out_data(op: PauliOperator, data_qubits: int) -> PauliOperator:
    """Partial trace over the first data_qubits qubits (keeps readout record)."""
    dmask = _np.uint64((1 << data_qubits) - 1)
    keep = ((op.xs & dmask) == 0) & ((op.zs & dmask) == 0)
    return PauliOperator(
        op.nq - data_qubits,
        op.xs[keep] >> _np.uint64(data_qubits),
        op.zs[keep] >> _np.uint64(data_qubits),
        op.coef[keep] * 2.0**data_qubits,
    )


def _canonical_signs(op: PauliOperator):
    """Coordinates and sign table of the support in a generator basis.

    Returns (dim, coords, sigma): W(key) = sigma * G(coords) with G a fixed
    ordered product of commuting generators, so products in coordinate space
    are plain XOR with sign +1.
    """
    nq = op.nq
    keys = [(int(x), int(z)) for x, z in zip(op.xs, op.zs)]
    pivots = {}  # lowbit col -> (vec, coordmask)
    gens = []
    coords = []
    for x, z in keys:
        v = x | (z << nq)
        acc = 0
        while v:
            col = (v & -v).bit_length() - 1
            if col in pivots:
                pv, pc = pivots[col]
                v ^= pv
                acc ^= pc
            else:
                g = len(gens)
                gens.append(PauliWord(nq, x, z))
                pivots[col] = (v, acc ^ (1 << g))
                acc = 1 << g
                v = 0
                break
        coords.append(acc)
    dim = len(gens)
    if dim > 22:
        raise SizeError(1 << dim, state_budget(None))
    for a in range(dim):
        for b in range(a + 1, dim):
            if gf2.symplectic_form(gens[a], gens[b]):
                raise AssertionError("oracle support is not abelian")
    # sigma for every group element via Gray-order product chain
    sigma = _np.ones(1 << dim, dtype=_np.float64)
    cur = PauliWord(nq, 0, 0, 0)
    c = 0
    for step in range(1 << dim):
        if step:
            gray = step ^ (step >> 1)
            flip = (c ^ gray).bit_length() - 1
            cur = multiply(cur, gens[flip])
            c = gray
        if cur.phase not in (0, 2):
            raise AssertionError("non-Hermitian canonical product")
        sigma[c] = 1.0 if cur.phase == 0 else -1.0
    return dim, _np.array(coords, dtype=_np.int64), sigma


def _fwht(a: _np.ndarray) -> _np.ndarray:
    """In-place unnormalized Walsh-Hadamard transform."""
    h = 1
    n = len(a)
    while h < n:
        a = a.reshape(-1, 2, h)
        top = a[:, 0, :].copy()
        bot = a[:, 1, :].copy()
        a[:, 0, :] = top + bot
        a[:, 1, :] = top - bot
        a = a.reshape(n)
        h *= 2
    return a


def trace_moment(op: PauliOperator, n: int, naive: bool = False) -> float:
    """Tr op^n over the full 2^nq-dimensional space, n in {1, 2, 3}."""
    op = op.merged()
    scale = 2.0**op.nq
    if n == 1:
        return scale * op.identity_coef()
    if n == 2:
        return scale * float(_np.dot(op.coef, op.coef))
    if n == 3:
        if naive:
            return scale * _trace_cubed_naive(op)
        dim, coords, sigma = _canonical_signs(op)
        dense = _np.zeros(1 << dim, dtype=_np.float64)
        dense[coords] = op.coef * sigma[coords]
        f = _fwht(dense)
        return scale * float(_np.sum(f**3)) / (1 << dim)
    raise ValueError("trace_moment supports n in {1, 2, 3}")


def _trace_cubed_naive(op: PauliOperator) -> float:
    """O(S^2) reference: sum_{a,b} c_a c_b c_{a XOR b} sign(W_a W_b W_{a+b})."""
    keys = op.packed()
    order = _np.argsort(keys)
    keys_sorted = keys[order]
    coef_sorted = op.coef[order]
    total = 0.0
    nq = op.nq
    for a in range(len(keys)):
        xa, za, ca = int(op.xs[a]), int(op.zs[a]), float(op.coef[a])
        if ca == 0.0:
            continue
        wa = PauliWord(nq, xa, za)
        for b in range(len(keys)):
            cb = float(op.coef[b])
            if cb == 0.0:
                continue
            wb = PauliWord(nq, int(op.xs[b]), int(op.zs[b]))
            wab = multiply(wa, wb)
            key = wab.x | (wab.z << nq)
            pos2 = int(_np.searchsorted(keys_sorted, _np.uint64(key)))
            if pos2 < len(keys) and int(keys_sorted[pos2]) == key:
                sign = {0: 1.0, 2: -1.0}[wab.phase]
                total += ca * cb * float(coef_sorted[pos2]) * sign
    return total


def density_matrix_oracle(code: CodeSpec, params: NoiseParams, T: int, n: int,
                          variant: str = "qm", s: int = 0,
                          budget=None) -> float:
    """Tr rho_variant^n by direct channel simulation."""
    if variant == "m":
        op = build_density_matrix(code, params, T, "qm", budget=budget)
        op = trace_out_data(op, code.n)
        return trace_moment(op, n)
    op = build_density_matrix(code, params, T, variant, s=s, budget=budget)
    return trace_moment(op, n)


def mixed_trace(op_a: PauliOperator, op_b: PauliOperator) -> float:
    """Tr(A B) for two operators on the same qubit set."""
    if op_a.nq != op_b.nq:
        raise ValueError("qubit count mismatch")
    a, b = op_a.merged(), op_b.merged()
    ka, kb = a.packed(), b.packed()
    order = _np.argsort(kb)
    pos = _np.searchsorted(kb[order], ka)
    pos = _np.clip(pos, 0, len(kb) - 1)
    hit = kb[order][pos] == ka
    return 2.0**a.nq * float(_np.sum(a.coef[hit] * b.coef[order][pos][hit]))
