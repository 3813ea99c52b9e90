"""GF(2) linear algebra and Pauli-word arithmetic on packed bit vectors.

Bit vectors are plain Python integers (bit i = entry i), which gives
word-parallel XOR for free and has no fixed width limit.  A Pauli word on
``n`` qubits is stored as a pair of such masks (x, z) plus a power of the
imaginary unit, with the convention that the phase-0 word

    W(x, z) = i**popcount(x & z) * X^x * Z^z

is Hermitian and squares to the identity.
"""

from __future__ import annotations

from dataclasses import dataclass


def popcount(v: int) -> int:
    """Number of set bits of a nonnegative integer."""
    return bin(v).count("1")


def parity(v: int) -> int:
    """Parity (mod-2 popcount) of a nonnegative integer."""
    return popcount(v) & 1


@dataclass(frozen=True)
class PauliWord:
    """A Pauli operator i**phase * W(x, z) on ``n`` qubits.

    Attributes
    ----------
    n : int
        Number of qubits; bits at positions >= n must be clear.
    x, z : int
        X- and Z-support masks.
    phase : int
        Exponent of i, mod 4.  Hermitian words have phase 0 or 2.
    """

    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        if self.x >> self.n or self.z >> self.n:
            raise ValueError("support mask exceeds qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0 and self.phase == 0

    def qubit(self, r: int) -> str:
        """Single-qubit letter at position r: one of 'I', 'X', 'Y', 'Z'."""
        xr = (self.x >> r) & 1
        zr = (self.z >> r) & 1
        return "IZXY"[2 * xr + zr] if (xr, zr) != (1, 1) else "Y"

    def __str__(self) -> str:
        phase_str = {0: "", 1: "i*", 2: "-", 3: "-i*"}[self.phase]
        body = "".join(self.qubit(r) for r in range(self.n)) or "I"
        return phase_str + body


def pauli_from_letters(letters: str, phase: int = 0) -> PauliWord:
    """Build a PauliWord from a string like 'XIZY' (qubit 0 first)."""
    x = z = 0
    for r, c in enumerate(letters.upper()):
        if c in "XY":
            x |= 1 << r
        if c in "ZY":
            z |= 1 << r
        if c not in "IXYZ":
            raise ValueError(f"bad Pauli letter {c!r} at position {r}")
    return PauliWord(len(letters), x, z, phase)


def multiply(a: PauliWord, b: PauliWord) -> PauliWord:
    """Product of two Pauli words with exact phase tracking."""
    if a.n != b.n:
        raise ValueError("qubit count mismatch")
    xc = a.x ^ b.x
    zc = a.z ^ b.z
    # i**(xa.za) X^xa Z^za i**(xb.zb) X^xb Z^zb
    #   = i**(xa.za + xb.zb) (-1)**(za.xb) X^xc Z^zc
    #   = i**(xa.za + xb.zb + 2 za.xb - xc.zc) W(xc, zc)
    ph = (
        a.phase
        + b.phase
        + popcount(a.x & a.z)
        + popcount(b.x & b.z)
        + 2 * popcount(a.z & b.x)
        - popcount(xc & zc)
    )
    return PauliWord(a.n, xc, zc, ph % 4)


def symplectic_form(a: PauliWord, b: PauliWord) -> int:
    """Binary symplectic form; 0 iff the two words commute."""
    return (popcount(a.x & b.z) + popcount(a.z & b.x)) & 1


def product_phase(words, mask) -> int:
    """Phase exponent (power of i) of prod_{i: bit i of mask} words[i]."""
    acc = None
    for i, w in enumerate(words):
        if (mask >> i) & 1:
            acc = w if acc is None else multiply(acc, w)
    return 0 if acc is None else acc.phase


def product_word(words, mask, n: int) -> PauliWord:
    """Product of the selected words (identity on n qubits if mask == 0)."""
    acc = PauliWord(n, 0, 0, 0)
    for i, w in enumerate(words):
        if (mask >> i) & 1:
            acc = multiply(acc, w)
    return acc


# ---------------------------------------------------------------------------
# GF(2) linear algebra on lists of row-integers
# ---------------------------------------------------------------------------


def row_echelon(rows, ncols):
    """Reduced row echelon form.

    Returns (pivot_cols, reduced_rows, transform) where transform[k] is the
    combination mask of input rows producing reduced_rows[k], i.e.
    reduced_rows[k] = XOR of rows[i] over set bits i of transform[k].
    """
    reduced = []
    pivots = []
    transforms = []
    work = list(rows)
    tr = [1 << i for i in range(len(rows))]
    for col in range(ncols):
        # find a row with a leading bit in this column
        pivot_idx = None
        for i in range(len(work)):
            if (work[i] >> col) & 1:
                pivot_idx = i
                break
        if pivot_idx is None:
            continue
        prow = work.pop(pivot_idx)
        ptr = tr.pop(pivot_idx)
        # clear this column everywhere else
        for i in range(len(work)):
            if (work[i] >> col) & 1:
                work[i] ^= prow
                tr[i] ^= ptr
        for k in range(len(reduced)):
            if (reduced[k] >> col) & 1:
                reduced[k] ^= prow
                transforms[k] ^= ptr
        reduced.append(prow)
        pivots.append(col)
        transforms.append(ptr)
    return pivots, reduced, transforms


def rank(rows, ncols) -> int:
    """GF(2) rank of the row set."""
    pivots, _, _ = row_echelon(rows, ncols)
    return len(pivots)


def nullspace(rows, ncols):
    """Basis of left-kernel combinations: masks v with XOR_i v_i rows[i] = 0.

    The rank-nullity identity rank + len(result) == len(rows) holds.
    """
    nrows = len(rows)
    work = list(rows)
    tr = [1 << i for i in range(nrows)]
    basis = []
    pivot_of_col = {}
    for i in range(nrows):
        r, t = work[i], tr[i]
        while r:
            col = (r & -r).bit_length() - 1
            if col in pivot_of_col:
                pr, pt = pivot_of_col[col]
                r ^= pr
                t ^= pt
            else:
                pivot_of_col[col] = (r, t)
                break
        if r == 0:
            basis.append(t)
    return basis


def kernel_vectors(rows, ncols):
    """Basis of {v in GF(2)^ncols : for every row r, parity(r & v) == 0}."""
    pivots, reduced, _ = row_echelon(rows, ncols)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for f in free:
        v = 1 << f
        # back-substitute: pivot-column entry fixed by free entries
        for p, row in zip(pivots, reduced):
            if parity(row & v):
                v |= 1 << p
        basis.append(v)
    return basis


def solve(rows, ncols, rhs_bits):
    """One solution v of parity(rows[i] & v) == rhs_bits[i], or None.

    Deterministic: free variables are set to zero, so the solution is the
    canonical particular solution of the echelon system.
    """
    aug = [r | (int(b) << ncols) for r, b in zip(rows, rhs_bits)]
    pivots, reduced, _ = row_echelon(aug, ncols + 1)
    if ncols in pivots:
        return None  # inconsistent system
    # fully reduced form + free variables set to zero: each pivot takes the
    # augmented bit of its own row
    v = 0
    for p, row in zip(pivots, reduced):
        if (row >> ncols) & 1:
            v |= 1 << p
    return v


def in_rowspace(rows, ncols, v) -> bool:
    """Whether v lies in the GF(2) span of the rows."""
    r0 = rank(rows, ncols)
    return rank(list(rows) + [v], ncols) == r0
