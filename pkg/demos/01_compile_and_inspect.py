"""Compile stabilizer codes into their spacetime stat-mech models.

Builds a few codes, prints the model's interaction structure, and shows two
structural decompositions that single-Pauli noise induces:

  * XZZX with Z-only errors and perfect readout splits into disjoint 1D
    Ising chains, and
  * the toric code with Y-only errors and perfect readout becomes a stack
    of independent 4-spin plaquette layers.
"""

from collections import Counter

from syndromestat import (
    NoiseParams,
    build_repetition,
    build_toric,
    build_xzzx,
    build_single_flavor,
    connected_components,
    symmetry_generators,
)


def describe(code, params, T):
    model = build_single_flavor(code, params, T)
    terms = model.terms(include_zero=False)
    kinds = Counter(tm.kind for tm in terms)
    comps = [c for c in connected_components(model) if len(c) > 1]
    print(f"{code.name}: N={code.n} qubits, I={code.num_checks} checks, "
          f"K={code.k} logical(s), T={T} rounds")
    print(f"  spins: {model.num_spins}  nonzero terms: {dict(kinds)}")
    print(f"  symmetry generators: {len(symmetry_generators(model, code))}")
    sizes = sorted(len(c) for c in comps)
    print(f"  connected components (>1 spin): {len(comps)}, sizes {sizes}")
    print()


def main():
    print("=== generic noise: everything couples ===")
    describe(build_repetition(1, 5), NoiseParams(px=0.1, q=0.05), 3)
    describe(build_toric(3), NoiseParams(px=0.03, py=0.03, pz=0.03, q=0.05), 2)

    print("=== XZZX, Z errors only, perfect readout: disjoint chains ===")
    describe(build_xzzx(5), NoiseParams(pz=0.1, q=0.0), 1)

    print("=== toric, Y errors only, perfect readout: plaquette layers ===")
    code = build_toric(3)
    model = build_single_flavor(code, NoiseParams(py=0.1, q=0.0), 2)
    terms = model.terms(include_zero=False)
    print(f"{code.name}: {len(terms)} terms, all kind "
          f"{set(tm.kind for tm in terms)}, "
          f"support sizes {set(len(tm.spins) for tm in terms)}, "
          f"layers per term "
          f"{set(len({t for t, _ in tm.spins}) for tm in terms)}")


if __name__ == "__main__":
    main()
