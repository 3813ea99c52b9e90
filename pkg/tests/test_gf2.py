"""Pauli algebra and GF(2) linear algebra against a dense-matrix oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_words, dense_pauli
from syndromestat.gf2 import (
    PauliWord,
    in_rowspace,
    kernel_vectors,
    multiply,
    nullspace,
    parity,
    pauli_from_letters,
    popcount,
    product_phase,
    product_word,
    rank,
    row_echelon,
    solve,
    symplectic_form,
)


def test_popcount_parity():
    for v in [0, 1, 2, 3, 255, (1 << 63) | 5]:
        assert popcount(v) == bin(v).count("1")
        assert parity(v) == bin(v).count("1") % 2


def test_canonical_words_are_hermitian():
    for w in all_words(3):
        mat = dense_pauli(w)
        assert np.allclose(mat, mat.conj().T)


def test_letters_round_trip():
    w = pauli_from_letters("XIZY")
    assert (w.qubit(0), w.qubit(1), w.qubit(2), w.qubit(3)) == (
        "X", "I", "Z", "Y")
    assert str(PauliWord(2, 0b01, 0b10)) in ("XZ", "+XZ", "+ZX", "+X Z")


def test_multiply_exhaustive_two_qubits():
    words = list(all_words(2, phases=(0, 1, 2, 3)))
    for a in words[:64]:
        for b in words[:64]:
            c = multiply(a, b)
            assert np.allclose(dense_pauli(c), dense_pauli(a) @ dense_pauli(b))


def test_symplectic_form_is_commutator_indicator():
    for a in all_words(2):
        for b in all_words(2):
            da, db = dense_pauli(a), dense_pauli(b)
            commute = np.allclose(da @ db, db @ da)
            assert symplectic_form(a, b) == (0 if commute else 1)


@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255),
       st.integers(0, 255), st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=200, deadline=None)
def test_multiply_associative(xa, za, xb, zb, pa, pb):
    a = PauliWord(8, xa, za, pa)
    b = PauliWord(8, xb, zb, pb)
    c = PauliWord(8, xa ^ xb, za ^ zb)
    assert multiply(multiply(a, b), c).phase == multiply(a, multiply(b, c)).phase


def test_product_word_matches_sequential_multiply():
    words = [pauli_from_letters(s) for s in ("XXI", "IZZ", "YIY", "ZXZ")]
    for mask in range(16):
        acc = PauliWord(3, 0, 0, 0)
        for j, w in enumerate(words):
            if (mask >> j) & 1:
                acc = multiply(acc, w)
        prod = product_word(words, mask, 3)
        assert (prod.x, prod.z, prod.phase) == (acc.x, acc.z, acc.phase)
        assert product_phase(words, mask) == acc.phase


# ---------------------------------------------------------------------------
# GF(2) linear algebra
# ---------------------------------------------------------------------------


def _to_matrix(rows, ncols):
    return np.array([[(r >> j) & 1 for j in range(ncols)] for r in rows],
                    dtype=np.uint8)


@given(st.lists(st.integers(0, (1 << 6) - 1), min_size=1, max_size=8))
@settings(max_examples=200, deadline=None)
def test_rank_matches_numpy_gf2(rows):
    ncols = 6
    mat = _to_matrix(rows, ncols)
    # GF(2) Gaussian elimination reference
    m = mat.copy()
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i, c]), None)
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        for i in range(len(m)):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        r += 1
    assert rank(rows, ncols) == r


@given(st.lists(st.integers(0, (1 << 7) - 1), min_size=1, max_size=9))
@settings(max_examples=200, deadline=None)
def test_rank_nullity_and_kernels(rows):
    ncols = 7
    rk = rank(rows, ncols)
    kern = kernel_vectors(rows, ncols)
    assert len(kern) == ncols - rk
    for v in kern:
        for row in rows:
            assert parity(row & v) == 0
    null = nullspace(rows, ncols)
    assert len(null) == len(rows) - rk
    for combo in null:
        acc = 0
        for j, row in enumerate(rows):
            if (combo >> j) & 1:
                acc ^= row
        assert acc == 0 and combo != 0


@given(st.lists(st.integers(0, (1 << 6) - 1), min_size=1, max_size=8),
       st.integers(0, (1 << 8) - 1))
@settings(max_examples=200, deadline=None)
def test_solve_consistency(rows, combo):
    ncols = 6
    # build a guaranteed-consistent rhs from a row combination
    rhs_vec = 0
    for j, row in enumerate(rows):
        if (combo >> j) & 1:
            rhs_vec ^= row
    # solve works on the transposed problem: x such that sum x_j rows_j = rhs
    cols = [[(row >> c) & 1 for row in rows] for c in range(ncols)]
    rhs_bits = [(rhs_vec >> c) & 1 for c in range(ncols)]
    col_rows = [sum(b << j for j, b in enumerate(col)) for col in cols]
    sol = solve(col_rows, len(rows), rhs_bits)
    assert sol is not None
    acc = 0
    for j, row in enumerate(rows):
        if (sol >> j) & 1:
            acc ^= row
    assert acc == rhs_vec


def test_solve_reports_inconsistent():
    # two identical constraint rows with conflicting parities
    assert solve([0b01, 0b01], 2, [0, 1]) is None
    assert solve([0b01, 0b01], 2, [1, 1]) is not None


def test_row_echelon_shape_and_rowspace():
    rows = [0b1010, 0b0110, 0b1100, 0b1010]
    pivots, reduced, transforms = row_echelon(rows, 4)
    assert len(pivots) == rank(rows, 4)
    for v in rows:
        assert in_rowspace(rows, 4, v)
    assert not in_rowspace(rows, 4, 0b0001)
    # transforms reconstruct the reduced rows from the originals
    for red, combo in zip(reduced, transforms):
        acc = 0
        for j, row in enumerate(rows):
            if (combo >> j) & 1:
                acc ^= row
        assert acc == red


def test_word_validation():
    with pytest.raises(ValueError):
        PauliWord(2, 0b100, 0)
    with pytest.raises(ValueError):
        multiply(PauliWord(2, 1, 0), PauliWord(3, 1, 0))
