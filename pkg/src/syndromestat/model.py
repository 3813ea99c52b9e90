"""Spacetime statistical-mechanics model of a monitored stabilizer code.

One binary variable u_{t,i} per check i and layer t.  A model with T
measurement rounds has layers t = 0..T (boundary 'open') or t = 0..T-1
(boundary 'field', which pins the top layer u_T = 0 and converts its
temporal bonds into a boundary field).

Each round t = 1..T contributes, per qubit r, the exact weight

    w_r(u_{t-1}) = (1 - px - py - pz) + px*h_r^z + pz*h_r^x + py*h_r^x*h_r^z,
    h_r^x(u) = prod_i (-1)^{u_i * [check i has X at r]},   h_r^z analogous,

and per check i the readout weight (1/2) * (1 - 2 q_i)^{|u_{t,i}-u_{t-1,i}|}.
A defect kappa (bit vector over the 2K logicals) flips the sign of h_r^x on
the X-support and of h_r^z on the Z-support of the selected logical word,
in every layer.

The energy function 𝓗 drops all configuration-independent constants:

    𝓗({u_t}) = sum_t [ H(u_{t-1}) + mu_q |u_t - u_{t-1}| ],
    H(u) = sum_r -J_z h_r^x - J_x h_r^z - J_y h_r^x h_r^z,

and log(weight) = log_offset() - 𝓗, with the offset tracked exactly so
different representations of the partition function are comparable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as _np

from .codes import CodeSpec, compute_redundancies
from .gf2 import product_word
from .noise import NoiseParams, couplings_from_rates, site_weights

LOG_HALF = math.log(0.5)


@dataclass(frozen=True)
class DefectSpec:
    """Per-flavor defect selections: n-1 bit vectors of length 2K each."""

    kappa_per_flavor: tuple

    @property
    def num_flavors(self) -> int:
        return len(self.kappa_per_flavor)

    def product_kappa(self) -> int:
        out = 0
        for k in self.kappa_per_flavor:
            out ^= k
        return out


@dataclass(frozen=True)
class Term:
    """One interaction in spin form sigma = (-1)^u.

    The energy contribution is -strength * sign * prod_{(t,i) in spins} sigma_{t,i}
    for spatial kinds ('x', 'z', 'y'), -strength * prod sigma for temporal
    pairs (kind 'q', strength mu_q/2) and boundary fields (kind 'field').
    Constant offsets are not part of Term.
    """

    spins: tuple
    strength: float
    sign: int
    kind: str
    qubit: int = -1  # spatial terms: which physical qubit; -1 otherwise


class SpacetimeModel:
    """Immutable single-flavor spacetime model; see module docstring."""

    def __init__(self, code: CodeSpec, params: NoiseParams, T: int,
                 boundary: str = "open", kappa: int = 0, step_overrides=None):
        if T < 1:
            raise ValueError("T must be >= 1")
        if boundary not in ("open", "field"):
            raise ValueError(f"unknown boundary mode {boundary!r}")
        if kappa >> (2 * code.k):
            raise ValueError("defect vector longer than 2K")
        self.code = code
        self.params = params
        self.T = T
        self.boundary = boundary
        self.kappa = kappa
        self.I = code.num_checks
        self.N = code.n
        # per-step parameters, step index t = 1..T stored at position t-1
        steps = [params] * T
        if step_overrides:
            for t, pars in step_overrides.items():
                if not (1 <= t <= T):
                    raise ValueError(f"step override index {t} outside 1..{T}")
                steps[t - 1] = pars
        self.step_params = tuple(steps)
        self.step_qeff = tuple(p.readout_rates(self.I) for p in steps)
        # X/Z membership masks over check indices, per qubit
        self.mask_x = [0] * self.N
        self.mask_z = [0] * self.N
        for i, g in enumerate(code.checks):
            for r in range(self.N):
                if (g.x >> r) & 1:
                    self.mask_x[r] |= 1 << i
                if (g.z >> r) & 1:
                    self.mask_z[r] |= 1 << i
        w = product_word(code.logicals, kappa, self.N)
        self.defect_x = w.x  # bit r set -> h_r^x sign flipped
        self.defect_z = w.z  # bit r set -> h_r^z sign flipped
        self._spatial_tables = {}
        self._temporal_tables = {}

    # -- layer bookkeeping ---------------------------------------------------

    @property
    def num_layers(self) -> int:
        return self.T + 1 if self.boundary == "open" else self.T

    @property
    def num_spins(self) -> int:
        return self.num_layers * self.I

    def with_defect(self, kappa: int) -> "SpacetimeModel":
        """Same model with defect vector kappa (replaces any existing one)."""
        m = SpacetimeModel.__new__(SpacetimeModel)
        m.__dict__.update(self.__dict__)
        m.kappa = kappa
        w = product_word(self.code.logicals, kappa, self.N)
        m.defect_x = w.x
        m.defect_z = w.z
        m._spatial_tables = {}
        m._temporal_tables = self._temporal_tables  # defect never touches these
        return m

    # -- exact weight tables ---------------------------------------------------

    def _parities(self, u, mask):
        return (_np.bitwise_count(u & _np.uint64(mask)) & 1).astype(_np.int64)

    def spatial_logw_table(self, t: int) -> _np.ndarray:
        """log prod_r w_r(u) for every u in [0, 2^I), for round t in 1..T."""
        key = t
        if key in self._spatial_tables:
            return self._spatial_tables[key]
        p = self.step_params[t - 1]
        w4 = site_weights(p.px, p.py, p.pz)
        u = _np.arange(1 << self.I, dtype=_np.uint64)
        logw = _np.zeros(u.shape, dtype=_np.float64)
        with _np.errstate(divide="ignore"):
            lw4 = _np.log(w4)
        for r in range(self.N):
            bx = self._parities(u, self.mask_x[r]) ^ ((self.defect_x >> r) & 1)
            bz = self._parities(u, self.mask_z[r]) ^ ((self.defect_z >> r) & 1)
            logw += lw4[2 * bx + bz]
        self._spatial_tables[key] = logw
        return logw

    def temporal_logw_table(self, t: int, include_half: bool = True) -> _np.ndarray:
        """log weight of a layer difference d = u_t XOR u_{t-1}, round t in 1..T."""
        key = (t, include_half)
        if key in self._temporal_tables:
            return self._temporal_tables[key]
        qeff = self.step_qeff[t - 1]
        d = _np.arange(1 << self.I, dtype=_np.uint64)
        tab = _np.zeros(d.shape, dtype=_np.float64)
        for i in range(self.I):
            tab += ((d >> _np.uint64(i)) & 1).astype(_np.float64) * math.log1p(
                -2.0 * qeff[i]
            )
        if include_half:
            tab += self.I * LOG_HALF
        self._temporal_tables[key] = tab
        return tab

    def log_offset(self, include_half: bool = True) -> float:
        """log_weight(layers) = log_offset() - energy(layers), when couplings
        are finite."""
        total = 0.0
        for t in range(1, self.T + 1):
            c = couplings_from_rates(self.step_params[t - 1], self.I)
            total += self.N * c.c
            if include_half:
                total += self.I * LOG_HALF
        return total

    def log_weight(self, layers, include_half: bool = True) -> float:
        """Exact log weight of a configuration given as layer bit-ints.

        Layers are (u_0, ..., u_T) for 'open' and (u_0, ..., u_{T-1}) for
        'field' (the pinned u_T = 0 is implicit).
        """
        layers = list(layers)
        if len(layers) != self.num_layers:
            raise ValueError(
                f"expected {self.num_layers} layers, got {len(layers)}"
            )
        if self.boundary == "field":
            layers = layers + [0]
        total = 0.0
        for t in range(1, self.T + 1):
            total += float(self.spatial_logw_table(t)[layers[t - 1]])
            total += float(
                self.temporal_logw_table(t, include_half)[layers[t] ^ layers[t - 1]]
            )
        return total

    def energy(self, layers) -> float:
        """𝓗({u_t}) in the coupling form (requires finite couplings)."""
        return self.log_offset(True) - self.log_weight(list(layers), True)

    # -- term list (spin form) -------------------------------------------------

    def _spin_set(self, t, mask):
        return tuple((t, i) for i in range(self.I) if (mask >> i) & 1)

    def terms(self, include_zero: bool = True):
        """Spin-form interaction list; see Term.  Spatial terms live on layers
        0..T-1; temporal pairs connect consecutive layers; boundary 'field'
        replaces the final pairs with single-spin field terms on layer T-1."""
        out = []
        for t in range(1, self.T + 1):
            c = couplings_from_rates(self.step_params[t - 1], self.I)
            lay = t - 1
            for r in range(self.N):
                sx = -1 if (self.defect_x >> r) & 1 else 1
                sz = -1 if (self.defect_z >> r) & 1 else 1
                entries = (
                    ("z", c.jz, self.mask_x[r], sx),
                    ("x", c.jx, self.mask_z[r], sz),
                    ("y", c.jy, self.mask_x[r] ^ self.mask_z[r], sx * sz),
                )
                for kind, strength, mask, sign in entries:
                    if include_zero or strength != 0.0:
                        out.append(
                            Term(self._spin_set(lay, mask), strength, sign, kind, r)
                        )
            final_step = t == self.T and self.boundary == "field"
            for i in range(self.I):
                mu = c.mu_q[i]
                if not include_zero and mu == 0.0:
                    continue
                if final_step:
                    out.append(Term(((t - 1, i),), mu / 2.0, 1, "field"))
                else:
                    out.append(Term(((t - 1, i), (t, i)), mu / 2.0, 1, "q"))
        return out

    def terms_to_json(self) -> str:
        """JSON term export for external samplers."""
        payload = [
            {
                "spins": [list(s) for s in term.spins],
                "weight": term.strength,
                "sign": term.sign,
                "kind": term.kind,
            }
            for term in self.terms(include_zero=False)
        ]
        return json.dumps(payload, indent=1)


def build_single_flavor(code: CodeSpec, params: NoiseParams, T: int,
                        boundary: str = "open", step_overrides=None) -> SpacetimeModel:
    """Construct the single-flavor spacetime model."""
    return SpacetimeModel(code, params, T, boundary, 0, step_overrides)


def insert_defect(model: SpacetimeModel, code: CodeSpec, kappa) -> SpacetimeModel:
    """Model with defect kappa; kappa is a 2K-bit int or an iterable of bits."""
    if not isinstance(kappa, int):
        bits = list(kappa)
        if len(bits) != 2 * code.k:
            raise ValueError(f"defect length {len(bits)} != 2K = {2 * code.k}")
        kappa = sum((1 << j) for j, b in enumerate(bits) if b)
    if kappa >> (2 * code.k):
        raise ValueError("defect vector longer than 2K")
    return model.with_defect(model.kappa ^ kappa)


def symmetry_generators(model: SpacetimeModel, code: CodeSpec):
    """Spin-flip sets from the redundancy group; one per basis vector.

    Returns (generators, boundary_breaking): each generator is the frozenset
    {(t, i) : v_i = 1, all layers t}.  With boundary 'field' the top-layer
    field violates these flips; the flag marks them boundary-breaking.
    """
    gens = []
    for v in compute_redundancies(code):
        gens.append(
            frozenset(
                (t, i)
                for t in range(model.num_layers)
                for i in range(model.I)
                if (v >> i) & 1
            )
        )
    return gens, model.boundary == "field"


def connected_components(model: SpacetimeModel):
    """Partition of spins under shared-term adjacency (nonzero terms only)."""
    n = model.num_spins

    def idx(t, i):
        return t * model.I + i

    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for term in model.terms(include_zero=False):
        spins = [idx(t, i) for t, i in term.spins]
        for a, b in zip(spins, spins[1:]):
            union(a, b)
    groups = {}
    for t in range(model.num_layers):
        for i in range(model.I):
            groups.setdefault(find(idx(t, i)), []).append((t, i))
    return [sorted(g) for g in sorted(groups.values())]


def multiflavor_energy(model: SpacetimeModel, flavor_layers,
                       defect: DefectSpec | None = None) -> float:
    """Energy of the n-flavor model: sum_a 𝓗_{kappa^a}(u^a) + 𝓗_{kappa^n}(XOR_a u^a).

    flavor_layers is a list of n-1 layer-int tuples; the product flavor is
    evaluated lazily from their XOR.  Per-flavor defects come from `defect`,
    and the product flavor carries their mod-2 sum.
    """
    nm1 = len(flavor_layers)
    if nm1 < 1:
        raise ValueError("need at least one explicit flavor (n >= 2)")
    kappas = [0] * nm1 if defect is None else list(defect.kappa_per_flavor)
    if len(kappas) != nm1:
        raise ValueError(
            f"defect specifies {len(kappas)} flavors, got {nm1} spin assignments"
        )
    total = 0.0
    prod_layers = [0] * model.num_layers
    for a in range(nm1):
        layers = list(flavor_layers[a])
        total += model.with_defect(kappas[a]).energy(layers)
        prod_layers = [x ^ y for x, y in zip(prod_layers, layers)]
    kprod = 0
    for k in kappas:
        kprod ^= k
    total += model.with_defect(kprod).energy(prod_layers)
    return total
