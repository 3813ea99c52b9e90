"""Stabilizer-code descriptions, builders, and JSON loading.

A code is a list of Hermitian check words on n qubits (possibly
overcomplete) plus one symplectic pair of logical words per encoded qubit.
The redundancy group R = {u : prod_i g_i^{u_i} = identity} is computed over
GF(2) and every element is validated to have trivial phase, which
guarantees -1 is not in the stabilizer group.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import gf2
from .gf2 import PauliWord, multiply, parity, symplectic_form


@dataclass(frozen=True)
class CodeSpec:
    """A stabilizer code with an explicit (possibly redundant) check list.

    Attributes
    ----------
    n : int
        Number of physical qubits.
    checks : tuple[PauliWord]
        Hermitian, mutually commuting check operators, phase 0.
    logicals : tuple[PauliWord]
        2K words ordered [X_1..X_K, Z_1..Z_K] with the standard symplectic
        pairing against each other and commuting with every check.
    name : str
    geometry : dict
        Optional layout metadata (check index -> coordinates and tags).
    """

    n: int
    checks: tuple
    logicals: tuple
    name: str = "custom"
    geometry: dict = field(default_factory=dict)

    @property
    def num_checks(self) -> int:
        return len(self.checks)

    @property
    def k(self) -> int:
        return len(self.logicals) // 2

    def check_vectors(self):
        """Checks as 2n-bit rows (x bits low, z bits high)."""
        return [g.x | (g.z << self.n) for g in self.checks]

    def symplectic_rows(self):
        """Rows r_i with parity(r_i & w) = symplectic form of check i with w."""
        return [g.z | (g.x << self.n) for g in self.checks]


def validate_code(code: CodeSpec) -> None:
    """Raise ValueError on any structural defect, naming the offender."""
    n = code.n
    for i, g in enumerate(code.checks):
        if g.n != n:
            raise ValueError(f"check {i} is on {g.n} qubits, expected {n}")
        if g.phase % 2 != 0:
            raise ValueError(f"check {i} is not Hermitian (phase {g.phase})")
        if g.phase != 0:
            raise ValueError(f"check {i} has sign -1; only +1 checks allowed")
        if g.x == 0 and g.z == 0:
            raise ValueError(f"check {i} is the identity")
    for i in range(len(code.checks)):
        for j in range(i + 1, len(code.checks)):
            if symplectic_form(code.checks[i], code.checks[j]):
                raise ValueError(f"checks {i} and {j} anticommute")
    k = code.k
    if len(code.logicals) != 2 * k:
        raise ValueError("logicals must come in X/Z pairs")
    r = gf2.rank(code.check_vectors(), 2 * n)
    if n - r != k:
        raise ValueError(
            f"check rank {r} on {n} qubits implies {n - r} logical qubits, "
            f"but {k} logical pairs were given"
        )
    for a, w in enumerate(code.logicals):
        if w.phase != 0:
            raise ValueError(f"logical {a} has nonzero phase")
        for i, g in enumerate(code.checks):
            if symplectic_form(w, g):
                raise ValueError(f"logical {a} anticommutes with check {i}")
    for a in range(2 * k):
        for b in range(a + 1, 2 * k):
            want = 1 if b == a + k else 0
            got = symplectic_form(code.logicals[a], code.logicals[b])
            if got != want:
                raise ValueError(
                    f"logicals {a},{b}: symplectic form {got}, expected {want}"
                )
    # logicals must be outside the stabilizer span
    rows = code.check_vectors()
    for a, w in enumerate(code.logicals):
        if gf2.in_rowspace(rows, 2 * n, w.x | (w.z << n)):
            raise ValueError(f"logical {a} lies in the check span")
    # every redundancy must multiply to +identity, not -identity
    for m in compute_redundancies(code, validate_phases=False):
        word = gf2.product_word(code.checks, m, n)
        if word.x or word.z:
            raise AssertionError("redundancy mask does not multiply to identity")
        if word.phase != 0:
            raise ValueError(
                f"check product with mask {m:#x} equals -identity; "
                "the stabilizer group would contain -1"
            )


def compute_redundancies(code: CodeSpec, validate_phases: bool = True):
    """Basis masks u (over check indices) with prod_i g_i^{u_i} = identity."""
    basis = gf2.nullspace(code.check_vectors(), 2 * code.n)
    if validate_phases:
        for m in basis:
            word = gf2.product_word(code.checks, m, code.n)
            if word.phase != 0 or word.x or word.z:
                raise ValueError(f"redundancy {m:#x} has nontrivial product")
    return basis


def redundancy_dimension(code: CodeSpec) -> int:
    """log2 of the size of the redundancy group R."""
    return code.num_checks - gf2.rank(code.check_vectors(), 2 * code.n)


def compute_logicals(n: int, checks):
    """Canonical logical pairs for a check list, via symplectic Gram-Schmidt.

    Deterministic: candidates are taken from the kernel basis in order and
    reduced against previously fixed pairs.
    """
    rows = [g.z | (g.x << n) for g in checks]
    cent = gf2.kernel_vectors(rows, 2 * n)  # centralizer of the checks
    check_rows = [g.x | (g.z << n) for g in checks]

    def sform(u, v):
        ux, uz = u & ((1 << n) - 1), u >> n
        vx, vz = v & ((1 << n) - 1), v >> n
        return parity((ux & vz) ^ (uz & vx))

    pairs = []
    pool = list(cent)
    while pool:
        # discard pool vectors inside the stabilizer span
        pool = [v for v in pool if v and not gf2.in_rowspace(check_rows, 2 * n, v)]
        if not pool:
            break
        u = pool.pop(0)
        partner = None
        for i, v in enumerate(pool):
            if sform(u, v):
                partner = pool.pop(i)
                break
        if partner is None:
            raise AssertionError("centralizer element with no symplectic partner")
        # reduce the rest so later pairs commute with this one
        pool = [
            w ^ (partner if sform(u, w) else 0) ^ (u if sform(partner, w) else 0)
            for w in pool
        ]
        pairs.append((u, partner))

    xs = [PauliWord(n, u & ((1 << n) - 1), u >> n) for u, _ in pairs]
    zs = [PauliWord(n, v & ((1 << n) - 1), v >> n) for _, v in pairs]
    return tuple(xs + zs)


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------


def build_toric(L: int) -> CodeSpec:
    """Toric code on an L x L torus: 2L^2 qubits, L^2 stars + L^2 plaquettes.

    Qubit 2*(y*L+x) sits on the edge pointing +x from site (x, y); qubit
    2*(y*L+x)+1 on the edge pointing +y.  Checks are ordered stars first,
    then plaquettes; geometry records the site/face coordinates.
    """
    if L < 2:
        raise ValueError("toric code needs L >= 2")
    n = 2 * L * L

    def he(x, y):  # horizontal (+x) edge at site
        return 2 * ((y % L) * L + (x % L))

    def ve(x, y):  # vertical (+y) edge at site
        return 2 * ((y % L) * L + (x % L)) + 1

    checks = []
    geometry = {"family": "toric", "L": L, "checks": []}
    for y in range(L):
        for x in range(L):
            m = (1 << he(x, y)) | (1 << he(x - 1, y)) | (1 << ve(x, y)) | (1 << ve(x, y - 1))
            checks.append(PauliWord(n, m, 0))
            geometry["checks"].append({"type": "star", "site": [x, y]})
    for y in range(L):
        for x in range(L):
            m = (1 << he(x, y)) | (1 << ve(x, y)) | (1 << he(x, y + 1)) | (1 << ve(x + 1, y))
            checks.append(PauliWord(n, 0, m))
            geometry["checks"].append({"type": "plaquette", "site": [x, y]})

    x1 = 0
    for x in range(L):
        x1 |= 1 << ve(x, 0)  # X string of vertical edges along a row
    x2 = 0
    for y in range(L):
        x2 |= 1 << he(0, y)  # X string of horizontal edges along a column
    z1 = 0
    for y in range(L):
        z1 |= 1 << ve(0, y)  # Z string of vertical edges along a column
    z2 = 0
    for x in range(L):
        z2 |= 1 << he(x, 0)  # Z string of horizontal edges along a row
    logicals = (
        PauliWord(n, x1, 0),
        PauliWord(n, x2, 0),
        PauliWord(n, 0, z1),
        PauliWord(n, 0, z2),
    )
    code = CodeSpec(n, tuple(checks), logicals, name=f"toric-{L}", geometry=geometry)
    validate_code(code)
    return code


def build_repetition(d: int, L: int) -> CodeSpec:
    """Repetition code on a periodic d-dimensional lattice of linear size L.

    One qubit per site; one ZZ check per nearest-neighbour bond (all d*L^d
    of them, overcomplete for d >= 2 and for the closed d=1 ring).
    Logical X is the product of X over all sites; logical Z is Z on site 0.
    """
    if d not in (1, 2):
        raise ValueError("repetition code supports d in {1, 2}")
    if L < 3:
        raise ValueError("repetition code needs L >= 3")
    n = L**d
    checks = []
    geometry = {"family": "repetition", "d": d, "L": L, "checks": []}
    if d == 1:
        for i in range(L):
            checks.append(PauliWord(n, 0, (1 << i) | (1 << ((i + 1) % L))))
            geometry["checks"].append({"type": "bond", "site": [i], "axis": 0})
    else:
        def q(x, y):
            return (y % L) * L + (x % L)

        for y in range(L):
            for x in range(L):
                checks.append(PauliWord(n, 0, (1 << q(x, y)) | (1 << q(x + 1, y))))
                geometry["checks"].append({"type": "bond", "site": [x, y], "axis": 0})
        for y in range(L):
            for x in range(L):
                checks.append(PauliWord(n, 0, (1 << q(x, y)) | (1 << q(x, y + 1))))
                geometry["checks"].append({"type": "bond", "site": [x, y], "axis": 1})
    logicals = (PauliWord(n, (1 << n) - 1, 0), PauliWord(n, 0, 1))
    code = CodeSpec(
        n, tuple(checks), logicals, name=f"repetition-{d}d-{L}", geometry=geometry
    )
    validate_code(code)
    return code


def build_xzzx(L: int) -> CodeSpec:
    """XZZX surface code on an L x L torus: one qubit per site, one check
    per plaquette with X on the top-left/bottom-right corners and Z on the
    top-right/bottom-left corners.

    Logical pairs are produced canonically by symplectic Gram-Schmidt over
    the check centralizer.
    """
    if L < 2:
        raise ValueError("xzzx code needs L >= 2")
    n = L * L

    def q(x, y):
        return (y % L) * L + (x % L)

    checks = []
    geometry = {"family": "xzzx", "L": L, "checks": []}
    for y in range(L):
        for x in range(L):
            xm = (1 << q(x, y + 1)) | (1 << q(x + 1, y))  # top-left, bottom-right
            zm = (1 << q(x + 1, y + 1)) | (1 << q(x, y))  # top-right, bottom-left
            checks.append(PauliWord(n, xm, zm))
            geometry["checks"].append({"type": "plaquette", "site": [x, y]})
    logicals = compute_logicals(n, checks)
    code = CodeSpec(n, tuple(checks), logicals, name=f"xzzx-{L}", geometry=geometry)
    validate_code(code)
    return code


BUILTIN_CODES = {
    "toric": build_toric,
    "repetition1d": lambda L: build_repetition(1, L),
    "repetition2d": lambda L: build_repetition(2, L),
    "xzzx": build_xzzx,
}


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def _word_from_json(obj, n, label):
    for key in ("x", "z"):
        if key not in obj:
            raise ValueError(f"{label}: missing '{key}' list")
        for i in obj[key]:
            if not isinstance(i, int) or not (0 <= i < n):
                raise ValueError(f"{label}: qubit index {i!r} out of range [0, {n})")
    x = 0
    for i in obj["x"]:
        x |= 1 << i
    z = 0
    for i in obj["z"]:
        z |= 1 << i
    return PauliWord(n, x, z)


def code_from_dict(data: dict, name: str = "custom") -> CodeSpec:
    """Build and validate a CodeSpec from its JSON-dict form.

    Schema: {"n": int, "checks": [{"x": [...], "z": [...]}, ...],
    "logicals": optional same shape, "geometry": optional dict}.
    """
    if "n" not in data or not isinstance(data["n"], int) or data["n"] < 1:
        raise ValueError("code spec: 'n' must be a positive integer")
    n = data["n"]
    if "checks" not in data or not data["checks"]:
        raise ValueError("code spec: nonempty 'checks' list required")
    checks = tuple(
        _word_from_json(c, n, f"check {i}") for i, c in enumerate(data["checks"])
    )
    for i in range(len(checks)):
        for j in range(i + 1, len(checks)):
            if symplectic_form(checks[i], checks[j]):
                raise ValueError(f"checks {i} and {j} anticommute")
    if "logicals" in data and data["logicals"] is not None:
        logicals = tuple(
            _word_from_json(c, n, f"logical {a}")
            for a, c in enumerate(data["logicals"])
        )
    else:
        logicals = compute_logicals(n, checks)
    code = CodeSpec(
        n, checks, logicals, name=name, geometry=data.get("geometry") or {}
    )
    validate_code(code)
    return code


def code_to_dict(code: CodeSpec) -> dict:
    def word_obj(w):
        return {
            "x": [r for r in range(code.n) if (w.x >> r) & 1],
            "z": [r for r in range(code.n) if (w.z >> r) & 1],
        }

    return {
        "n": code.n,
        "checks": [word_obj(g) for g in code.checks],
        "logicals": [word_obj(w) for w in code.logicals],
        "geometry": code.geometry,
    }


def load_code(path: str) -> CodeSpec:
    """Load a code-spec JSON file from disk."""
    with open(path) as f:
        data = json.load(f)
    import os

    return code_from_dict(data, name=os.path.splitext(os.path.basename(path))[0])
