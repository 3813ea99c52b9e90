"""Command-line front end.

Subcommands:
  code info                    validate and describe a code
  exact ic|relent|kl|duality   exact diagnostics via enumeration
  exact decode                 sector probabilities for syndrome records
  mc scan                      Binder-cumulant threshold scan (n = 2)
  mc correlate                 MC boundary correlator vs the exact engine

Every run writes a JSON manifest (command line, code hash, parameters,
seed, version, wall clock, outputs); `--replay manifest.json` re-executes
it, reproducing exact-engine output bit-for-bit and single-threaded MC
output bit-for-bit for the same seed.

Exit codes: 0 success, 2 validation error, 3 enumeration budget exceeded,
4 numerical failure (non-finite result or violated internal identity).

Syndrome-record files for `exact decode` are JSON:
  {"records": [{"m_noisy": [int, ...], "m_final": int}, ...]}
with each m a bitmask over check indices (bit i = check i violated).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time

from . import __version__
from .codes import (
    CodeSpec,
    build_repetition,
    build_toric,
    build_xzzx,
    code_to_dict,
    compute_redundancies,
    load_code,
)
from .errorconfig import SyndromeRecord, fourier_duality_check, record_index, z_prime
from .exact import (
    SizeError,
    coherent_information,
    csv_row,
    kl_divergence,
    relative_entropy,
)
from .mc import MCConfig, binder_scan, boundary_correlator
from .noise import NoiseParams

CSV_HEADER = "code,L,T,n,p_x,p_y,p_z,q,lambda,quantity,value"

EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_NUMERICAL = 4


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def _add_code_args(p, size_list=False):
    p.add_argument("--builtin", choices=["repetition", "toric", "xzzx"],
                   help="built-in code family")
    p.add_argument("--file", help="code JSON file")
    if size_list:
        p.add_argument("--L", default="4,6,8",
                       help="comma-separated linear sizes")
    else:
        p.add_argument("--L", type=int, default=None, help="linear size")
    p.add_argument("--d", type=int, default=1,
                   help="repetition-code dimension (1 or 2)")


def _add_noise_args(p):
    p.add_argument("--px", type=float, default=0.0)
    p.add_argument("--py", type=float, default=0.0)
    p.add_argument("--pz", type=float, default=0.0)
    p.add_argument("--q", type=float, default=0.0,
                   help="readout flip rate")
    p.add_argument("--lam", type=float, default=1.0,
                   help="measurement strength in (0, 1]")


def _add_common_args(p):
    p.add_argument("--bits", type=int, default=None,
                   help="enumeration budget exponent (budget = 2**bits)")
    p.add_argument("--threads", type=int, default=1,
                   help="numba thread count (1 keeps MC bit-reproducible)")
    p.add_argument("--out", default=None, help="output file (CSV/JSON)")
    p.add_argument("--manifest", default=None,
                   help="manifest path (default: derived from --out or cwd)")


def _resolve_code(args) -> CodeSpec:
    if bool(args.builtin) == bool(args.file):
        raise ValueError("exactly one of --builtin or --file is required")
    if args.file:
        return load_code(args.file)
    if args.builtin == "toric":
        return build_toric(args.L or 3)
    if args.builtin == "xzzx":
        return build_xzzx(args.L or 3)
    if args.builtin == "repetition":
        return build_repetition(args.d, args.L or 3)
    raise ValueError(f"unknown builtin {args.builtin!r}")


def _resolve_noise(args) -> NoiseParams:
    return NoiseParams(px=args.px, py=args.py, pz=args.pz, q=args.q,
                       lam=args.lam)


def _budget(args):
    return None if args.bits is None else (1 << args.bits)


def _code_hash(code: CodeSpec) -> str:
    blob = json.dumps(code_to_dict(code), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _write(path, text, outputs):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
        outputs.append(path)
    else:
        sys.stdout.write(text)


def _emit_manifest(args, argv, code, outputs, t0):
    path = args.manifest
    if path is None:
        path = (os.path.splitext(args.out)[0] + ".manifest.json"
                if getattr(args, "out", None) else "manifest.json")
    manifest = {
        "tool": "syndromestat",
        "version": __version__,
        "argv": list(argv),
        "code": code.name if code else None,
        "code_hash": _code_hash(code) if code else None,
        "parameters": {
            k: v for k, v in vars(args).items()
            if k not in ("func", "manifest") and not callable(v)
        },
        "seed": getattr(args, "seed", None),
        "wall_clock_s": round(time.time() - t0, 3),
        "outputs": outputs,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1, default=str)


# ---------------------------------------------------------------------------
# code info
# ---------------------------------------------------------------------------


def _reduce_weights(vectors):
    """Greedy pairwise XOR reduction of a GF(2) basis to lower weights."""
    vecs = list(vectors)
    changed = True
    while changed:
        changed = False
        for i in range(len(vecs)):
            for j in range(len(vecs)):
                if i == j:
                    continue
                cand = vecs[i] ^ vecs[j]
                if cand and cand.bit_count() < vecs[i].bit_count():
                    vecs[i] = cand
                    changed = True
    return vecs


def classify_symmetry(code: CodeSpec) -> str:
    """'local' when the redundancy group has more generators than logical
    pairs and admits a generator of weight <= 4 (a bounded-support flip);
    otherwise 'global'."""
    reds = _reduce_weights(compute_redundancies(code))
    if not reds:
        return "none"
    small = min(v.bit_count() for v in reds)
    return "local" if (len(reds) > code.k and small <= 4) else "global"


def cmd_code_info(args, argv):
    t0 = time.time()
    code = _resolve_code(args)
    reds = compute_redundancies(code)
    report = {
        "name": code.name,
        "N": code.n,
        "I": code.num_checks,
        "K": code.k,
        "redundancies": len(reds),
        "symmetry": classify_symmetry(code),
        "geometry": code.geometry.get("family", ""),
    }
    outputs = []
    _write(args.out, json.dumps(report, indent=1) + "\n", outputs)
    _emit_manifest(args, argv, code, outputs, t0)
    return 0


# ---------------------------------------------------------------------------
# exact
# ---------------------------------------------------------------------------


def _parse_syndrome(text, num_checks):
    """Parse '0b1010', '0x..', decimal, or comma-separated check indices."""
    text = text.strip()
    if "," in text or (text and not text.lstrip("-").replace("_", "").isdigit()
                       and not text.startswith(("0b", "0x"))):
        s = 0
        for part in text.split(","):
            s |= 1 << int(part)
        return s
    return int(text, 0)


def cmd_exact(args, argv):
    t0 = time.time()
    code = _resolve_code(args)
    params = _resolve_noise(args)
    outputs = []
    budget = _budget(args)
    sub = args.exact_cmd
    if sub == "ic":
        res = coherent_information(code, params, args.T, args.n, budget)
        if not math.isfinite(res.ic):
            print(f"non-finite coherent information: {res.ic}", file=sys.stderr)
            return EXIT_NUMERICAL
        rows = [csv_row(code, params, args.T, args.n, "ic", res.ic)]
        for kappas, df in res.defect_free_energies.items():
            label = "dF_" + "_".join(format(k, "x") for k in kappas)
            rows.append(csv_row(code, params, args.T, args.n, label, df))
        _write(args.out, CSV_HEADER + "\n" + "\n".join(rows) + "\n", outputs)
    elif sub in ("relent", "kl"):
        s = _parse_syndrome(args.s, code.num_checks)
        fn = relative_entropy if sub == "relent" else kl_divergence
        val = fn(code, params, args.T, args.n, s, budget)
        rows = [csv_row(code, params, args.T, args.n, f"{sub}_s={s:#x}", val)]
        _write(args.out, CSV_HEADER + "\n" + "\n".join(rows) + "\n", outputs)
    elif sub == "duality":
        rep = fourier_duality_check(code, params, args.T, budget)
        dev = rep["max_relative_deviation"]
        if not math.isfinite(dev):
            print("non-finite duality deviation", file=sys.stderr)
            return EXIT_NUMERICAL
        _write(args.out, json.dumps(rep, indent=1) + "\n", outputs)
    elif sub == "decode":
        with open(args.records) as fh:
            payload = json.load(fh)
        lines = ["record,kappa,probability"]
        for entry in payload["records"]:
            rec = SyndromeRecord(tuple(int(m) for m in entry["m_noisy"]),
                                 int(entry["m_final"]))
            weights, meta = z_prime(code, params, rec.T, rec,
                                    perfect_final=args.perfect_final,
                                    budget=budget)
            tag = "-".join(format(m, "x") for m in record_index(rec))
            for kappa, w in sorted(weights.items()):
                lines.append(f"{tag},{kappa},{w!r}")
        _write(args.out, "\n".join(lines) + "\n", outputs)
    _emit_manifest(args, argv, code, outputs, t0)
    return 0


# ---------------------------------------------------------------------------
# mc
# ---------------------------------------------------------------------------


def _parse_range(text):
    parts = [float(x) for x in text.split(":")]
    if len(parts) != 3 or parts[2] <= 0:
        raise ValueError("range must be start:stop:step with step > 0")
    a, b, h = parts
    out, v, k = [], a, 0
    while v <= b + 1e-12:
        out.append(round(v, 12))
        k += 1
        v = a + k * h
    return out


def cmd_mc_scan(args, argv):
    t0 = time.time()
    sizes = [int(x) for x in args.L.split(",")]
    if args.iso_pq:
        grid = _parse_range(args.iso_pq)
        axis = "iso_pq"
    elif args.scan and args.range:
        grid = _parse_range(args.range)
        axis = args.scan
    else:
        raise ValueError("provide --iso-pq RANGE or --scan AXIS --range RANGE")

    def params_of_p(p):
        base = {"px": args.px, "py": args.py, "pz": args.pz, "q": args.q,
                "lam": args.lam}
        if axis == "iso_pq":
            base["pz"] = p
            base["q"] = p
        else:
            base[axis] = p
        return NoiseParams(**base)

    def builder(L):
        ns = argparse.Namespace(builtin=args.builtin, file=args.file,
                                L=L, d=args.d)
        return _resolve_code(ns)

    if args.file and len(sizes) > 1:
        raise ValueError("--file codes support a single --L entry")
    config = MCConfig(sweeps=args.sweeps, burn_in=args.burn_in,
                      seed=args.seed, algorithm=args.algorithm)
    doubling = 1 if args.decoupled else 2
    res = binder_scan(builder, sizes, grid, lambda L: args.T or L,
                      params_of_p, config, doubling=doubling)
    outputs = []
    rows = [CSV_HEADER]
    for L in sizes:
        code = builder(L)
        us, errs = res["curves"][L]
        for p, u, e in zip(grid, us, errs):
            pars = params_of_p(p)
            T = args.T or L
            rows.append(csv_row(code, pars, T, 2, "binder", float(u)))
            rows.append(csv_row(code, pars, T, 2, "binder_err", float(e)))
    base = args.out or "mc_scan"
    _write(base + ".csv", "\n".join(rows) + "\n", outputs)
    summary = {
        "sizes": sizes,
        "grid": grid,
        "axis": axis,
        "decoupled": bool(args.decoupled),
        "crossings": res["crossings"],
        "pooled": res["pooled"],
        "no_crossing": res["pooled"] is None,
    }
    _write(base + ".summary.json", json.dumps(summary, indent=1) + "\n",
           outputs)
    print(json.dumps(summary["pooled"] or {"no_crossing": True}))
    sample_code = builder(sizes[0])
    _emit_manifest(args, argv, sample_code, outputs, t0)
    return 0


def cmd_mc_correlate(args, argv):
    t0 = time.time()
    code = _resolve_code(args)
    params = _resolve_noise(args)
    s = _parse_syndrome(args.s, code.num_checks)
    config = MCConfig(sweeps=args.sweeps, burn_in=args.burn_in,
                      seed=args.seed, algorithm=args.algorithm)
    mean, err = boundary_correlator(code, params, args.T, s, config,
                                    boundary=args.boundary)
    rows = [CSV_HEADER,
            csv_row(code, params, args.T, 2, f"correlator_s={s:#x}", mean),
            csv_row(code, params, args.T, 2, "correlator_err", err)]
    if mean > 0:
        rows.append(csv_row(code, params, args.T, 2,
                            f"divergence_s={s:#x}", -math.log(mean)))
    outputs = []
    _write(args.out, "\n".join(rows) + "\n", outputs)
    _emit_manifest(args, argv, code, outputs, t0)
    return 0


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------


def build_parser():
    top = argparse.ArgumentParser(
        prog="syndromestat",
        description="Stabilizer-code statistical-mechanics toolkit",
    )
    top.add_argument("--replay", help="re-run a saved manifest", default=None)
    sub = top.add_subparsers(dest="group")

    g_code = sub.add_parser("code", help="code inspection")
    code_sub = g_code.add_subparsers(dest="code_cmd", required=True)
    p = code_sub.add_parser("info", help="validate and describe a code")
    _add_code_args(p)
    _add_common_args(p)
    p.set_defaults(func=cmd_code_info)

    g_exact = sub.add_parser("exact", help="exact diagnostics")
    exact_sub = g_exact.add_subparsers(dest="exact_cmd", required=True)
    for name, hlp in (
        ("ic", "coherent information and defect free energies"),
        ("relent", "order-n divergence of a layer-0 syndrome defect"),
        ("kl", "same correlator in the boundary-field model"),
        ("duality", "record-by-record duality check of the two expansions"),
        ("decode", "sector probabilities for external syndrome records"),
    ):
        p = exact_sub.add_parser(name, help=hlp)
        _add_code_args(p)
        _add_noise_args(p)
        _add_common_args(p)
        p.add_argument("--T", type=int, default=1, help="measurement rounds")
        if name in ("ic", "relent", "kl"):
            p.add_argument("--n", type=int, default=2, help="moment order")
        if name in ("relent", "kl"):
            p.add_argument("--s", required=True,
                           help="syndrome bits: int, 0b.., 0x.., or i,j,...")
        if name == "decode":
            p.add_argument("--records", required=True,
                           help="syndrome-record JSON file")
            p.add_argument("--noisy-final", dest="perfect_final",
                           action="store_false", default=True,
                           help="final syndrome read out noisily too")
        p.set_defaults(func=cmd_exact)

    g_mc = sub.add_parser("mc", help="Monte Carlo (n = 2)")
    mc_sub = g_mc.add_subparsers(dest="mc_cmd", required=True)
    p = mc_sub.add_parser("scan", help="Binder threshold scan")
    _add_code_args(p, size_list=True)
    _add_noise_args(p)
    _add_common_args(p)
    p.add_argument("--iso-pq", default=None,
                   help="scan pz = q = p over start:stop:step")
    p.add_argument("--scan", choices=["px", "py", "pz", "q"], default=None)
    p.add_argument("--range", default=None, help="start:stop:step")
    p.add_argument("--T", type=int, default=None,
                   help="rounds (default: T = L)")
    p.add_argument("--sweeps", type=int, default=6000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--algorithm", choices=["metropolis", "wolff"],
                   default="wolff")
    p.add_argument("--decoupled", action="store_true",
                   help="sample decoupled single replicas (half couplings)")
    p.set_defaults(func=cmd_mc_scan)

    p = mc_sub.add_parser("correlate", help="MC boundary correlator")
    _add_code_args(p)
    _add_noise_args(p)
    _add_common_args(p)
    p.add_argument("--T", type=int, default=1)
    p.add_argument("--s", required=True, help="syndrome bits")
    p.add_argument("--boundary", choices=["open", "field"], default="open")
    p.add_argument("--sweeps", type=int, default=20000)
    p.add_argument("--burn-in", type=int, default=2000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--algorithm", choices=["metropolis", "wolff"],
                   default="metropolis")
    p.set_defaults(func=cmd_mc_correlate)
    return top


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args, _ = parser.parse_known_args(argv)
        if args.replay:
            with open(args.replay) as fh:
                manifest = json.load(fh)
            return main(manifest["argv"])
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else 0
    if not getattr(args, "func", None):
        parser.print_help()
        return EXIT_VALIDATION
    if args.threads:
        os.environ.setdefault("NUMBA_NUM_THREADS", str(args.threads))
    try:
        return args.func(args, argv)
    except SizeError as exc:
        print(f"enumeration budget exceeded: need {exc.required} states, "
              f"budget {exc.budget} (raise with --bits or "
              f"SYNDROMESTAT_BUDGET)", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except AssertionError as exc:
        print(f"numerical identity violated: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
