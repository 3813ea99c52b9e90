import itertools

import numpy as np
import pytest

from syndromestat.gf2 import PauliWord

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_I = np.eye(2, dtype=complex)
_SINGLE = {"I": _I, "X": _X, "Y": _Y, "Z": _Z}


def dense_pauli(word: PauliWord) -> np.ndarray:
    """Dense matrix of a PauliWord; qubit 0 is the least significant factor."""
    mat = np.array([[1.0 + 0j]])
    for r in range(word.n):
        mat = np.kron(_SINGLE[word.qubit(r)], mat)
    return (1j) ** (word.phase % 4) * mat


def all_words(n, phases=(0,)):
    for x in range(1 << n):
        for z in range(1 << n):
            for ph in phases:
                yield PauliWord(n, x, z, ph)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260826)


def int_to_bits(v, width):
    return [(v >> i) & 1 for i in range(width)]


__all__ = ["dense_pauli", "all_words", "int_to_bits", "itertools"]
