"""Exact information diagnostics on small instances.

Sweeps the error rate on a distance-3 repetition code and prints the
order-2 coherent information, the syndrome relative entropy D_s, and the
KL divergence D_KL for one fixed syndrome.  At p = 0 the coherent
information equals K log 2 (one recoverable logical qubit); it decays as
noise accumulates.  D_KL <= D_s holds point by point, and D_s converges
as the number of measurement rounds T grows.
"""

import math

from syndromestat import (
    NoiseParams,
    build_repetition,
    coherent_information,
    kl_divergence,
    relative_entropy,
)


def main():
    code = build_repetition(1, 3)
    T, n, s = 2, 2, 0b011  # syndrome: first two checks violated

    print(f"{code.name}, T={T}, n={n}, syndrome {s:#05b}")
    print(f"{'p_x':>6} {'I_c^(2)/log2':>14} {'D_s':>10} {'D_KL':>10}")
    for p in [0.0, 0.02, 0.05, 0.1, 0.15, 0.2]:
        params = NoiseParams(px=p, q=0.05)
        ic = coherent_information(code, params, T, n).ic / math.log(2)
        if p == 0.0:
            print(f"{p:6.2f} {ic:14.6f} {'-':>10} {'-':>10}")
            continue
        ds = relative_entropy(code, params, T, n, s)
        dkl = kl_divergence(code, params, T, n, s)
        assert dkl <= ds + 1e-10
        print(f"{p:6.2f} {ic:14.6f} {ds:10.6f} {dkl:10.6f}")

    print("\nconvergence of D_s in T (p_x=0.1, q=0.05):")
    params = NoiseParams(px=0.1, q=0.05)
    for T in (1, 2, 3, 4):
        print(f"  T={T}: D_s = {relative_entropy(code, params, T, n, s):.8f}")


if __name__ == "__main__":
    main()
