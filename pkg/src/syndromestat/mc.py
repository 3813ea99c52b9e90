"""Monte Carlo sampling of the n=2 (doubled-coupling) spacetime models.

Samplers: single-spin-flip Metropolis for arbitrary multi-body terms, and
Wolff cluster updates when every interaction is a two-spin ferromagnetic
bond.  Randomness: each chain draws two 64-bit seeds from a counter-based
Philox stream keyed by (user seed, chain index); the numba kernels advance
a splitmix64 generator from those seeds.  Single-threaded runs are
bit-reproducible for a fixed seed.

Observables are computed from stored spin snapshots: sector magnetization
(mean over an explicit spin subset), its Binder cumulant with jackknife
errors over blocks, energy density, and arbitrary spin-product correlators.
The default sector is the set of spins touched by at least one nonzero
spatial term, which excludes decoupled temporal chains; if the model has a
local (gauge) symmetry the plain magnetization is flagged gauge-variant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as _np
from numba import njit

from .codes import CodeSpec
from .model import SpacetimeModel, build_single_flavor, symmetry_generators
from .noise import NoiseParams


@dataclass(frozen=True)
class MCConfig:
    sweeps: int = 10000
    burn_in: int = 1000
    seed: int = 1
    algorithm: str = "metropolis"
    measure_every: int = 1
    replicas: tuple = ()

    def __post_init__(self):
        if not (self.sweeps > self.burn_in >= 0):
            raise ValueError("need sweeps > burn_in >= 0")
        if self.algorithm not in ("metropolis", "wolff"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")


@dataclass
class MCObservables:
    m_abs: float
    m_abs_err: float
    m2: float
    m4: float
    binder: float
    binder_err: float
    energy_density: float
    energy_err: float
    gauge_variant: bool
    correlators: dict = field(default_factory=dict)
    m_series: _np.ndarray = None
    sector: tuple = ()


# ---------------------------------------------------------------------------
# model -> flat arrays
# ---------------------------------------------------------------------------


def mc_arrays(model: SpacetimeModel, doubling: int = 2):
    """Flatten nonzero terms to (couplings, term offsets, term spins, CSR)."""
    nspins = model.num_spins
    I = model.I
    coup = []
    t_spin = []
    t_off = [0]
    for term in model.terms(include_zero=False):
        if not term.spins:  # constant offset, irrelevant to sampling
            continue
        coup.append(doubling * term.strength * term.sign)
        for (t, i) in term.spins:
            t_spin.append(t * I + i)
        t_off.append(len(t_spin))
    coup = _np.array(coup, dtype=_np.float64)
    t_off = _np.array(t_off, dtype=_np.int64)
    t_spin = _np.array(t_spin, dtype=_np.int64)
    # CSR spin -> terms
    counts = _np.zeros(nspins + 1, dtype=_np.int64)
    for s in t_spin:
        counts[s + 1] += 1
    s_off = _np.cumsum(counts)
    fill = s_off[:-1].copy()
    s_term = _np.zeros(len(t_spin), dtype=_np.int64)
    for k in range(len(coup)):
        for j in range(t_off[k], t_off[k + 1]):
            s = t_spin[j]
            s_term[fill[s]] = k
            fill[s] += 1
    return coup, t_off, t_spin, s_off, s_term


def default_sector(model: SpacetimeModel):
    """Spins carried by at least one nonzero spatial term."""
    sec = set()
    for term in model.terms(include_zero=False):
        if term.kind in ("x", "y", "z"):
            sec.update(term.spins)
    if not sec:
        sec = {(t, i) for t in range(model.num_layers) for i in range(model.I)}
    return sorted(sec)


def wolff_bonds(model: SpacetimeModel, doubling: int = 2):
    """Neighbor lists and p_add per bond; None if Wolff is inapplicable."""
    nspins = model.num_spins
    I = model.I
    pairs = []
    for term in model.terms(include_zero=False):
        if not term.spins:
            continue
        if len(term.spins) != 2:
            return None
        j = doubling * term.strength * term.sign
        if j < 0:
            return None
        (t0, i0), (t1, i1) = term.spins
        pairs.append((t0 * I + i0, t1 * I + i1, 1.0 - math.exp(-2.0 * j)))
    counts = _np.zeros(nspins + 1, dtype=_np.int64)
    for a, b, _ in pairs:
        counts[a + 1] += 1
        counts[b + 1] += 1
    off = _np.cumsum(counts)
    fill = off[:-1].copy()
    nbr = _np.zeros(2 * len(pairs), dtype=_np.int64)
    padd = _np.zeros(2 * len(pairs), dtype=_np.float64)
    for a, b, p in pairs:
        nbr[fill[a]], padd[fill[a]] = b, p
        fill[a] += 1
        nbr[fill[b]], padd[fill[b]] = a, p
        fill[b] += 1
    return off, nbr, padd


# ---------------------------------------------------------------------------
# numba kernels (splitmix64 randomness)
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _sm64(state):
    state[0] += _np.uint64(0x9E3779B97F4A7C15)
    z = state[0]
    z = (z ^ (z >> _np.uint64(30))) * _np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _np.uint64(27))) * _np.uint64(0x94D049BB133111EB)
    return z ^ (z >> _np.uint64(31))


@njit(cache=True, inline="always")
def _uniform(state):
    return (_sm64(state) >> _np.uint64(11)) * 1.1102230246251565e-16


@njit(cache=True)
def _metropolis_run(spins, coup, t_off, t_spin, s_off, s_term, sweeps,
                    measure_every, state, snaps, snap_start):
    # Random site selection: a deterministic scan order combined with the
    # forced flip at dE = 0 makes the sweep-to-sweep chain reducible on
    # some models (domain walls are conveyed by the scan), so the chain
    # samples the Boltzmann weight conditioned on an absorbing subset.
    nspins = spins.shape[0]
    meas = snap_start
    for sweep in range(sweeps):
        for _ in range(nspins):
            s = int(_sm64(state) % _np.uint64(nspins))
            de = 0.0
            for j in range(s_off[s], s_off[s + 1]):
                k = s_term[j]
                prod = 1
                for q in range(t_off[k], t_off[k + 1]):
                    prod *= spins[t_spin[q]]
                de += 2.0 * coup[k] * prod
            if de <= 0.0 or _uniform(state) < math.exp(-de):
                spins[s] = -spins[s]
        if (sweep + 1) % measure_every == 0 and meas < snaps.shape[0]:
            for s in range(nspins):
                snaps[meas, s] = spins[s]
            meas += 1
    return meas


@njit(cache=True)
def _wolff_run(spins, off, nbr, padd, sweeps, clusters_per_sweep,
               measure_every, state, snaps, snap_start, stack):
    # clusters_per_sweep must be fixed before measuring: stopping a sweep
    # adaptively ("flip until nspins spins moved") makes the number of
    # updates depend on the current state, which biases the endpoint chain.
    nspins = spins.shape[0]
    meas = snap_start
    total_flipped = 0
    for sweep in range(sweeps):
        for _ in range(clusters_per_sweep):
            seed = int(_sm64(state) % _np.uint64(nspins))
            cluster_sign = spins[seed]
            spins[seed] = -cluster_sign
            stack[0] = seed
            top = 1
            while top > 0:
                top -= 1
                s = stack[top]
                total_flipped += 1
                for j in range(off[s], off[s + 1]):
                    t = nbr[j]
                    if spins[t] == cluster_sign and _uniform(state) < padd[j]:
                        spins[t] = -cluster_sign
                        stack[top] = t
                        top += 1
        if (sweep + 1) % measure_every == 0 and meas < snaps.shape[0]:
            for s in range(nspins):
                snaps[meas, s] = spins[s]
            meas += 1
    return meas, total_flipped


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def _chain_seeds(seed: int, chain: int = 0):
    gen = _np.random.Generator(_np.random.Philox(key=[seed, chain]))
    return gen.integers(0, 2**63 - 1, size=2, dtype=_np.uint64)


def magnetization_gauge_variant(model: SpacetimeModel, code: CodeSpec,
                                sector) -> bool:
    """True if a symmetry generator partially overlaps the sector.

    A generator disjoint from the sector leaves m unchanged; one covering it
    entirely maps m -> -m, which |m| absorbs.  A partial overlap makes the
    plain magnetization gauge-variant (e.g. locally redundant codes), and a
    gauge-invariant order parameter should be used instead.
    """
    gens, _ = symmetry_generators(model, code)
    sec = set(sector)
    for g in gens:
        ov = len(g & sec)
        if 0 < ov < len(sec):
            return True
    return False


def run_chain(model: SpacetimeModel, config: MCConfig, doubling: int = 2,
              sector=None, products=(), code: CodeSpec | None = None
              ) -> MCObservables:
    """Sample the doubled-coupling model and return observables.

    sector: list of (t, i) spins defining the magnetization (default: spins
    of nonzero spatial terms).  products: spin tuples ((t,i), (t',j), ...)
    whose product expectation and blocked error are returned in
    observables.correlators keyed by the tuple.
    """
    nspins = model.num_spins
    I = model.I
    sector = default_sector(model) if sector is None else list(sector)
    sec_idx = _np.array([t * I + i for t, i in sector], dtype=_np.int64)
    nmeas = (config.sweeps - config.burn_in) // config.measure_every
    snaps = _np.zeros((nmeas, nspins), dtype=_np.int8)
    spins = _np.ones(nspins, dtype=_np.int8)
    state = _np.array([_chain_seeds(config.seed)[0]], dtype=_np.uint64)
    coup, t_off, t_spin, s_off, s_term = mc_arrays(model, doubling)
    if config.algorithm == "wolff":
        bonds = wolff_bonds(model, doubling)
        if bonds is None:
            raise ValueError(
                "wolff requires two-spin non-negative couplings; "
                "use metropolis for multi-body or frustrated models"
            )
        off, nbr, padd = bonds
        stack = _np.zeros(nspins, dtype=_np.int64)
        # burn-in with one cluster per step; freeze clusters-per-sweep from
        # the mean cluster size observed there
        _, flipped = _wolff_run(spins, off, nbr, padd, config.burn_in, 1,
                                config.sweeps + 1, state, snaps, 0, stack)
        avg_cluster = max(1.0, flipped / max(1, config.burn_in))
        cps = max(1, int(round(nspins / avg_cluster)))
        _wolff_run(spins, off, nbr, padd, config.sweeps - config.burn_in,
                   cps, config.measure_every, state, snaps, 0, stack)
    else:
        _metropolis_run(spins, coup, t_off, t_spin, s_off, s_term,
                        config.burn_in, config.sweeps + 1, state, snaps, 0)
        _metropolis_run(spins, coup, t_off, t_spin, s_off, s_term,
                        config.sweeps - config.burn_in, config.measure_every,
                        state, snaps, 0)
    snaps = snaps[: nmeas]
    m = snaps[:, sec_idx].mean(axis=1, dtype=_np.float64)
    energy = _np.zeros(nmeas)
    for k in range(len(coup)):
        prod = _np.ones(nmeas)
        for q in range(t_off[k], t_off[k + 1]):
            prod = prod * snaps[:, t_spin[q]]
        energy -= coup[k] * prod
    energy /= nspins
    correlators = {}
    for prod in products:
        series = _np.ones(nmeas)
        for (t, i) in prod:
            series = series * snaps[:, t * I + i]
        correlators[tuple(prod)] = (float(series.mean()),
                                    _blocked_error(series))
    m2s, m4s = m * m, m**4
    binder, binder_err = _jackknife_binder(m2s, m4s)
    gauge_variant = code is not None and magnetization_gauge_variant(
        model, code, sector)
    return MCObservables(
        m_abs=float(_np.abs(m).mean()),
        m_abs_err=_blocked_error(_np.abs(m)),
        m2=float(m2s.mean()),
        m4=float(m4s.mean()),
        binder=binder,
        binder_err=binder_err,
        energy_density=float(energy.mean()),
        energy_err=_blocked_error(energy),
        gauge_variant=gauge_variant,
        correlators=correlators,
        m_series=m,
        sector=tuple(sector),
    )


def _blocks(series: _np.ndarray, nblocks: int = 32):
    nb = max(2, min(nblocks, len(series) // 4))
    cut = (len(series) // nb) * nb
    return series[:cut].reshape(nb, -1).mean(axis=1)


def _blocked_error(series: _np.ndarray) -> float:
    b = _blocks(series)
    return float(b.std(ddof=1) / math.sqrt(len(b)))


def _jackknife_binder(m2s: _np.ndarray, m4s: _np.ndarray):
    b2, b4 = _blocks(m2s), _blocks(m4s)
    nb = len(b2)
    full = 1.0 - b4.mean() / (3.0 * b2.mean() ** 2)
    jks = _np.empty(nb)
    s2, s4 = b2.sum(), b4.sum()
    for i in range(nb):
        m2 = (s2 - b2[i]) / (nb - 1)
        m4 = (s4 - b4[i]) / (nb - 1)
        jks[i] = 1.0 - m4 / (3.0 * m2 * m2)
    err = math.sqrt((nb - 1) / nb * float(((jks - jks.mean()) ** 2).sum()))
    return float(full), err


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------


def binder_scan(code_builder, sizes, p_grid, T_of_L, params_of_p,
                config: MCConfig, doubling: int = 2) -> dict:
    """Binder curves over p for several sizes, with pairwise crossings.

    code_builder(L) -> CodeSpec; T_of_L(L) -> rounds; params_of_p(p) ->
    NoiseParams.  doubling=1 samples the decoupled-replica (single-coupling)
    model.  Returns curves, pairwise crossing estimates with bootstrap
    errors, and a pooled crossing (None if no pair of curves crosses).
    """
    curves = {}
    for Lidx, L in enumerate(sizes):
        code = code_builder(L)
        us, errs = [], []
        for pidx, p in enumerate(p_grid):
            model = build_single_flavor(code, params_of_p(p), T_of_L(L))
            chain_cfg = MCConfig(
                sweeps=config.sweeps, burn_in=config.burn_in,
                seed=config.seed + 7919 * Lidx + 104729 * pidx,
                algorithm=config.algorithm,
                measure_every=config.measure_every,
            )
            obs = run_chain(model, chain_cfg, doubling=doubling, code=code)
            us.append(obs.binder)
            errs.append(obs.binder_err)
        curves[L] = (_np.array(us), _np.array(errs))
    crossings = []
    rng = _np.random.Generator(_np.random.Philox(key=[config.seed, 999]))
    p_arr = _np.asarray(p_grid, dtype=_np.float64)
    for ai in range(len(sizes)):
        for bi in range(ai + 1, len(sizes)):
            ua, ea = curves[sizes[ai]]
            ub, eb = curves[sizes[bi]]
            est = _crossing(p_arr, ua, ub)
            if est is None:
                continue
            boots = []
            for _ in range(400):
                ca = _crossing(p_arr, ua + rng.normal(0, ea), ub + rng.normal(0, eb))
                if ca is not None:
                    boots.append(ca)
            err = float(_np.std(boots)) if len(boots) > 10 else float("nan")
            crossings.append({"sizes": (sizes[ai], sizes[bi]),
                              "p": est, "err": err})
    pooled = None
    if crossings:
        vals = _np.array([c["p"] for c in crossings])
        errs = _np.array([max(c["err"], 1e-6) for c in crossings])
        w = 1.0 / errs**2
        pooled = {
            "p": float((vals * w).sum() / w.sum()),
            "err": float(max(1.0 / math.sqrt(w.sum()), vals.std())),
        }
    return {"curves": curves, "p_grid": list(p_grid), "crossings": crossings,
            "pooled": pooled}


def _crossing(p, ua, ub):
    """First sign change of ub - ua, linearly interpolated; None if absent."""
    d = ub - ua
    for i in range(len(p) - 1):
        if d[i] == 0.0:
            return float(p[i])
        if d[i] * d[i + 1] < 0:
            frac = d[i] / (d[i] - d[i + 1])
            return float(p[i] + frac * (p[i + 1] - p[i]))
    return None


def boundary_correlator(code: CodeSpec, params: NoiseParams, T: int, s: int,
                        config: MCConfig, boundary: str = "open"):
    """MC estimate of <prod_i sigma_{0,i}^{s_i}> in the n=2 model.

    s is an I-bit syndrome vector selecting layer-0 spins.  Returns
    (mean, blocked error); -log(mean) estimates the order-2 divergence
    computed exactly by the enumeration engine.
    """
    model = build_single_flavor(code, params, T, boundary=boundary)
    prod = tuple((0, i) for i in range(code.num_checks) if (s >> i) & 1)
    obs = run_chain(model, config, doubling=2, products=[prod], code=code)
    return obs.correlators[prod]
