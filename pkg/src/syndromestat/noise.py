"""Noise models: single-qubit Pauli rates and noisy syndrome readout.

A noise model has i.i.d. per-qubit Pauli rates (p_x, p_y, p_z) applied once
per measurement round, and a readout flip rate q per check (scalar or
per-check).  Weak ancilla coupling of strength lam in (0, 1] is folded into
an effective readout rate; lam = 1 is projective measurement.

The exact engines work directly with the per-site weights

    w(h_x, h_z) = (1 - p_x - p_y - p_z) + p_x h_z + p_z h_x + p_y h_x h_z

which are finite everywhere in the valid regime.  The Monte Carlo engines
need the coupling form, where each weight is written as
exp(C + J_z h_x + J_x h_z + J_y h_x h_z); the couplings diverge when a
pairwise rate sum reaches 1/2, and couplings_from_rates raises in that case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as _np


@dataclass(frozen=True)
class NoiseParams:
    """Validated noise parameters.

    q may be a float (uniform) or a mapping {check_index: rate}; per-check
    rates for checks absent from the mapping default to the 'q' key value
    if given as {"default": ..., index: ...} is not supported -- use
    readout_rates(code) to expand.
    """

    px: float = 0.0
    py: float = 0.0
    pz: float = 0.0
    q: object = 0.0
    lam: float = 1.0

    def __post_init__(self):
        for label, v in (("px", self.px), ("py", self.py), ("pz", self.pz)):
            if not (0.0 <= v <= 0.5):
                raise ValueError(f"{label} = {v} outside [0, 1/2]")
        if self.px + self.py + self.pz > 1.0 + 1e-15:
            raise ValueError("px + py + pz exceeds 1")
        for v in self._q_values():
            if not (0.0 <= v <= 0.5):
                raise ValueError(f"readout rate q = {v} outside [0, 1/2]")
            if v == 0.5:
                raise ValueError("q = 1/2 erases all syndrome information; rejected")
        if not (0.0 < self.lam <= 1.0):
            raise ValueError(f"lam = {self.lam} outside (0, 1]")

    def _q_values(self):
        if isinstance(self.q, dict):
            return list(self.q.values())
        return [self.q]

    def readout_rates(self, num_checks: int) -> _np.ndarray:
        """Effective flip rate per check, with lam folded in."""
        if isinstance(self.q, dict):
            base = _np.zeros(num_checks)
            for i, v in self.q.items():
                if not (0 <= int(i) < num_checks):
                    raise ValueError(f"readout-rate check index {i} out of range")
                base[int(i)] = v
        else:
            base = _np.full(num_checks, float(self.q))
        return _np.array([effective_readout_rate(v, self.lam) for v in base])

    @property
    def rates(self):
        return (self.px, self.py, self.pz)


def effective_readout_rate(q: float, lam: float = 1.0) -> float:
    """Readout flip rate of a weak ancilla coupling of strength lam.

    A coupling angle with lam = 1 reproduces projective measurement
    (returns q); weaker coupling mixes in an extra flip channel:
    q_eff = q * 2*lam/(1+lam^2) + (1-lam)^2 / (2*(1+lam^2)).
    """
    s = 1.0 + lam * lam
    q_eff = q * (2.0 * lam / s) + 0.5 * (1.0 - lam) ** 2 / s
    if q_eff >= 0.5:
        raise ValueError(f"effective readout rate {q_eff} >= 1/2; rejected")
    return q_eff


def site_weights(px: float, py: float, pz: float) -> _np.ndarray:
    """The four per-site weights w(h_x, h_z), indexed by (1-h_x)/2*2+(1-h_z)/2.

    Index order: [w(+,+), w(+,-), w(-,+), w(-,-)].
    """
    return _np.array(
        [
            1.0,
            1.0 - 2.0 * px - 2.0 * py,
            1.0 - 2.0 * py - 2.0 * pz,
            1.0 - 2.0 * px - 2.0 * pz,
        ]
    )


@dataclass(frozen=True)
class Couplings:
    """Spatial couplings (jx, jy, jz), offset c per site, and temporal mu_q
    per check (so that a spin pair contributes exp(mu_q/2 * s s'))."""

    jx: float
    jy: float
    jz: float
    c: float
    mu_q: _np.ndarray


def couplings_from_rates(params: NoiseParams, num_checks: int = 1) -> Couplings:
    """Coupling form of the weights; raises on any divergent logarithm.

    Solves  log w(h_x, h_z) = C + J_z h_x + J_x h_z + J_y h_x h_z  for the
    four weights, giving
        J_x = -(1/4) log[(1-2px-2py)(1-2px-2pz)/(1-2py-2pz)]
    and cyclic permutations, plus mu_q = -log(1 - 2 q_eff) per check.
    """
    px, py, pz = params.rates
    w = site_weights(px, py, pz)
    pairs = {"px+py": w[1], "py+pz": w[2], "px+pz": w[3]}
    for label, v in pairs.items():
        if v <= 0.0:
            raise ValueError(
                f"rate pair {label} >= 1/2: coupling form diverges "
                "(use the exact weight-based engines instead)"
            )
    lw = _np.log(w)
    c = 0.25 * (lw[0] + lw[1] + lw[2] + lw[3])
    jz = 0.25 * (lw[0] + lw[1] - lw[2] - lw[3])
    jx = 0.25 * (lw[0] - lw[1] + lw[2] - lw[3])
    jy = 0.25 * (lw[0] - lw[1] - lw[2] + lw[3])
    qeff = params.readout_rates(num_checks)
    if _np.any(qeff >= 0.5):
        raise ValueError("effective readout rate >= 1/2: mu_q diverges")
    mu_q = -_np.log(1.0 - 2.0 * qeff)
    return Couplings(jx=jx, jy=jy, jz=jz, c=c, mu_q=mu_q)


def single_pauli_rates(px: float, py: float, pz: float) -> _np.ndarray:
    """Rates indexed by (x_bit, z_bit): [[I, Z], [X, Y]] flattened as
    rate[2*x + z]."""
    return _np.array([1.0 - px - py - pz, pz, px, py])
