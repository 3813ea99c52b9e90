"""Code construction, validation, redundancy structure, serialization."""

import json

import numpy as np
import pytest

from conftest import dense_pauli
from syndromestat.codes import (
    CodeSpec,
    build_repetition,
    build_toric,
    build_xzzx,
    code_from_dict,
    code_to_dict,
    compute_logicals,
    compute_redundancies,
    load_code,
    redundancy_dimension,
    validate_code,
)
from syndromestat.gf2 import (
    PauliWord,
    pauli_from_letters,
    product_word,
    symplectic_form,
)

ALL_SMALL = [
    build_repetition(1, 3),
    build_repetition(1, 4),
    build_repetition(2, 3),
    build_toric(2),
    build_toric(3),
    build_xzzx(3),
]


@pytest.mark.parametrize("code", ALL_SMALL, ids=lambda c: c.name)
def test_validation_passes_builtins(code):
    validate_code(code)


@pytest.mark.parametrize("code", ALL_SMALL, ids=lambda c: c.name)
def test_rank_nullity(code):
    reds = compute_redundancies(code)
    assert len(reds) == redundancy_dimension(code)
    # I - dimR independent checks; K = N - (I - dimR)
    assert code.k == code.n - (code.num_checks - len(reds))
    assert code.k >= 1


def test_expected_redundancy_dimensions():
    assert redundancy_dimension(build_toric(3)) == 2
    assert redundancy_dimension(build_repetition(1, 3)) == 1
    assert redundancy_dimension(build_repetition(2, 3)) == 10
    assert build_toric(3).k == 2
    assert build_repetition(2, 3).k == 1
    assert build_xzzx(3).k == 1


@pytest.mark.parametrize("code", ALL_SMALL, ids=lambda c: c.name)
def test_redundancy_products_are_identity(code):
    for v in compute_redundancies(code):
        w = product_word(code.checks, v, code.n)
        assert (w.x, w.z, w.phase) == (0, 0, 0)


@pytest.mark.parametrize("code", [c for c in ALL_SMALL if c.n <= 9],
                         ids=lambda c: c.name)
def test_check_products_dense(code):
    """Products over random check subsets match dense matrix products."""
    rng = np.random.default_rng(7)
    for _ in range(20):
        mask = int(rng.integers(0, 1 << code.num_checks))
        w = product_word(code.checks, mask, code.n)
        mat = np.eye(1 << code.n, dtype=complex)
        for i, g in enumerate(code.checks):
            if (mask >> i) & 1:
                mat = mat @ dense_pauli(g)
        assert np.allclose(dense_pauli(w), mat)


@pytest.mark.parametrize("code", ALL_SMALL, ids=lambda c: c.name)
def test_logical_pairing(code):
    K = code.k
    logs = code.logicals
    assert len(logs) == 2 * K
    for a in range(2 * K):
        for b in range(2 * K):
            want = 1 if abs(a - b) == K else 0
            assert symplectic_form(logs[a], logs[b]) == want
    for lg in logs:
        for g in code.checks:
            assert symplectic_form(lg, g) == 0


@pytest.mark.parametrize("code", ALL_SMALL, ids=lambda c: c.name)
def test_json_round_trip(code, tmp_path):
    data = code_to_dict(code)
    again = code_from_dict(json.loads(json.dumps(data)), name=code.name)
    assert again.n == code.n
    assert [(g.x, g.z) for g in again.checks] == [
        (g.x, g.z) for g in code.checks]
    assert [(w.x, w.z) for w in again.logicals] == [
        (w.x, w.z) for w in code.logicals]
    path = tmp_path / "code.json"
    path.write_text(json.dumps(data))
    assert load_code(str(path)).n == code.n


def test_compute_logicals_from_scratch():
    rep = build_repetition(1, 5)
    logs = compute_logicals(rep.n, rep.checks)
    assert len(logs) == 2
    assert symplectic_form(logs[0], logs[1]) == 1
    for lg in logs:
        for g in rep.checks:
            assert symplectic_form(lg, g) == 0


def test_rejects_anticommuting_checks():
    checks = (pauli_from_letters("XI"), pauli_from_letters("ZI"))
    logicals = (pauli_from_letters("IX"), pauli_from_letters("IZ"))
    with pytest.raises(ValueError):
        validate_code(CodeSpec(2, checks, logicals, name="bad"))


def test_rejects_logical_in_check_span():
    checks = (pauli_from_letters("ZZI"), pauli_from_letters("IZZ"))
    logicals = (pauli_from_letters("ZZI"), pauli_from_letters("XXX"))
    with pytest.raises(ValueError):
        validate_code(CodeSpec(3, checks, logicals, name="bad"))


def test_rejects_non_hermitian_phase():
    checks = (PauliWord(2, 0, 0b11, 2),)  # -ZZ
    logicals = (pauli_from_letters("XX"), pauli_from_letters("ZI"))
    with pytest.raises(ValueError):
        validate_code(CodeSpec(2, checks, logicals, name="bad"))


def test_size_guards():
    with pytest.raises(ValueError):
        build_repetition(1, 2)
    with pytest.raises(ValueError):
        build_repetition(3, 3)
    with pytest.raises(ValueError):
        build_toric(1)


def test_toric_counts():
    for L in (2, 3, 4):
        code = build_toric(L)
        assert code.n == 2 * L * L
        assert code.num_checks == 2 * L * L
        assert code.k == 2
        stars = [g for g in code.checks if g.z == 0]
        plaqs = [g for g in code.checks if g.x == 0]
        assert len(stars) == L * L and len(plaqs) == L * L
        for g in code.checks:
            assert bin(g.x | g.z).count("1") == 4


def test_xzzx_checks_mix_x_and_z():
    code = build_xzzx(3)
    for g in code.checks:
        assert bin(g.x).count("1") == 2
        assert bin(g.z).count("1") == 2
        assert g.x & g.z == 0
