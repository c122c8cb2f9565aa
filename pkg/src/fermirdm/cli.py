"""Command-line front end: ``fermirdm {compute,verify,minimize,sweep}``.

Exit codes: 0 success, 1 numerical-invariant violation / failed checks /
non-convergence, 2 usage or configuration error, 3 a reproducible value of
S_k below ln C(N,k) was found by ``minimize`` (state preserved in the output).

Orbital labels on the command line are 1-based.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

from . import combinadics as cb
from .entropy import entropy_profile
from .fermion import load_state, random_state, rdm, slater, support_dimension
from .linalg import InvariantError
from .optimize import OptimizationConfig, minimize_entropy
from .verify import (
    CLAIM_IDS,
    SuiteConfig,
    check_clr_bound,
    check_coleman,
    check_k_bound,
    run_suite,
    trial_seed,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_SUBFLOOR = 3

LN2 = math.log(2.0)

SWEEP_COLUMNS = (
    "d", "N", "k", "source", "seed", "S_1", "S_k",
    "coleman_rhs", "coleman_slack",
    "main21_rhs", "main21_slack",
    "d_psi", "main21_dpsi_rhs", "main21_dpsi_slack",
    "kbound_rhs", "kbound_slack",
)


class UsageError(ValueError):
    pass


def parse_orbitals(text: str, d: int):
    try:
        labels = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse orbital list {text!r}")
    if any(x < 1 or x > d for x in labels):
        raise UsageError(f"orbital labels must lie in 1..{d}")
    if len(set(labels)) != len(labels):
        raise UsageError("an orbital is listed twice; the Slater determinant would vanish")
    return sorted(x - 1 for x in labels)


def _emit(text: str, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _scale(bits: bool) -> float:
    return 1.0 / LN2 if bits else 1.0


def _load_single_state(args):
    if args.slater is not None:
        occ = parse_orbitals(args.slater, args.d)
        if len(occ) != args.N:
            raise UsageError(f"--slater lists {len(occ)} orbitals but --N is {args.N}")
        return slater(args.d, occ), {"kind": "slater", "orbitals": [x + 1 for x in occ]}
    if args.state_file is not None:
        psi = load_state(args.state_file)
        if (psi.d, psi.n_particles) != (args.d, args.N):
            raise UsageError(f"state file has d={psi.d}, N={psi.n_particles}; flags say d={args.d}, N={args.N}")
        return psi, {"kind": "file", "path": args.state_file}
    return random_state(args.d, args.N, args.seed), {"kind": "random", "seed": args.seed}


def cmd_compute(args) -> int:
    if not 1 <= args.N <= args.d:
        raise UsageError(f"need 1 <= N <= d, got N={args.N}, d={args.d}")
    psi, source = _load_single_state(args)
    profile = entropy_profile(psi)
    scale = _scale(args.bits)
    values = [v * scale for v in profile.values]
    report = {
        "d": psi.d,
        "N": psi.n_particles,
        "source": source,
        "base": "bits" if args.bits else "nats",
        "profile": values,
        "support_dimension": support_dimension(rdm(psi, 1), args.tol),
    }
    ks = []
    if args.spectra:
        ks = list(range(1, psi.n_particles + 1))
    elif args.k is not None:
        if not 1 <= args.k <= psi.n_particles:
            raise UsageError(f"--k must lie in 1..{psi.n_particles}")
        ks = [args.k]
    if ks:
        report["spectra"] = {str(k): sorted(rdm(psi, k).spectrum().tolist(), reverse=True) for k in ks}
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "S_k"])
        for k, v in enumerate(values, start=1):
            writer.writerow([k, repr(v)])
        _emit(buf.getvalue(), args.out)
    else:
        _emit(_dump(report), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = SuiteConfig(
        min_d=args.min_d,
        max_d=args.max_d,
        max_n=args.max_N,
        trials=args.trials,
        seed=args.seed,
        inequality_tol=args.tol,
        identity_tol=args.tol,
        claims=tuple(args.claims.split(",")) if args.claims else CLAIM_IDS,
    )
    report = run_suite(config)
    _emit(report.to_json() + "\n", args.out)
    summary = report.summary()
    print(f"verify: {summary['passed']}/{summary['total']} checks passed "
          f"({summary['informational']} informational)", file=sys.stderr)
    return EXIT_OK if report.all_passed else EXIT_FAIL


def cmd_minimize(args) -> int:
    config = OptimizationConfig(
        d=args.d,
        n_particles=args.N,
        k=args.k,
        restarts=args.restarts,
        max_iters=args.max_iters,
        step=args.step,
        shrink=args.shrink,
        grad_tol=args.grad_tol,
        seed=args.seed,
    )
    result = minimize_entropy(config, preserve_dir=args.preserve_dir)
    out = result.to_dict(include_traces=args.traces)
    if args.bits:
        out["display_bits"] = {
            "best_value": result.best_value / LN2,
            "conjectured_floor": result.conjectured_floor / LN2,
            "gap": result.gap / LN2,
        }
    _emit(_dump(out), args.out)
    if any(rec["reproducible"] for rec in result.subfloor_states):
        print("minimize: value below ln C(N,k) reproduced; state preserved in output", file=sys.stderr)
        return EXIT_SUBFLOOR
    return EXIT_OK if result.converged else EXIT_FAIL


def _sweep_rows(d, n, k, psi, source, seed, scale):
    profile = entropy_profile(psi)
    s1 = profile[1]
    row = {"d": d, "N": n, "k": k, "source": source, "seed": "" if seed is None else seed,
           "S_1": s1 * scale, "S_k": profile[k] * scale}
    col = check_coleman(psi, profile=profile)
    row["coleman_rhs"] = math.log(n) * scale
    row["coleman_slack"] = col.slack * scale
    main = check_clr_bound(psi, profile=profile)
    row["main21_rhs"] = (profile[2] - main.slack) * scale
    row["main21_slack"] = main.slack * scale
    sup = check_clr_bound(psi, profile=profile, support=True)
    row["d_psi"] = sup.context["dim"]
    row["main21_dpsi_rhs"] = (profile[2] - sup.slack) * scale
    row["main21_dpsi_slack"] = sup.slack * scale
    if 2 <= k <= n - 1:
        kb = check_k_bound(psi, k, profile=profile)
        row["kbound_rhs"] = (profile[k] - kb.slack) * scale
        row["kbound_slack"] = kb.slack * scale
    else:
        row["kbound_rhs"] = row["kbound_slack"] = ""
    return row


def cmd_sweep(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be positive")
    if args.trials < 0:
        raise UsageError("--trials must be nonnegative")
    scale = _scale(args.bits)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    index = 0
    for d in range(args.d_min, args.d_max + 1):
        for n in range(max(2, args.k, args.N_min), min(d, args.N_max) + 1):
            if cb.binomial(d, n) > args.cap:
                raise UsageError(f"C({d},{n}) = {cb.binomial(d, n)} exceeds --cap {args.cap}")
            states = [(slater(d, range(n)), "slater", None)]
            for _ in range(args.trials):
                seed = trial_seed(args.seed, index)
                index += 1
                states.append((random_state(d, n, seed), "random", seed))
            for psi, source, seed in states:
                row = _sweep_rows(d, n, args.k, psi, source, seed, scale)
                writer.writerow({key: repr(v) if isinstance(v, float) else v for key, v in row.items()})
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fermirdm", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def shared(p, k_default=None, k_required=False):
        p.add_argument("--seed", type=int, default=0, help="seed (default 0)")
        p.add_argument("--out", help="write output to this path instead of stdout")
        p.add_argument("--bits", action="store_true", help="report entropies in bits instead of nats")
        if k_required or k_default is not None:
            p.add_argument("--k", type=int, default=k_default, required=k_required)

    p = sub.add_parser("compute", help="entropy profile of one state")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, help="also print the spectrum of gamma_k")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--slater", help="comma-separated 1-based occupied orbitals")
    src.add_argument("--state-file", help="state JSON file")
    src.add_argument("--random", action="store_true", help="seeded random state")
    p.add_argument("--spectra", action="store_true", help="print the spectra of all gamma_k")
    p.add_argument("--tol", type=float, default=1e-10, help="eigenvalue cutoff for the support dimension")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    shared(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="run the identity/inequality suite")
    p.add_argument("--min-d", type=int, default=2)
    p.add_argument("--max-d", type=int, default=8)
    p.add_argument("--max-N", type=int, default=4)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-8, help="tolerance for inequalities and identities")
    p.add_argument("--claims", help="comma-separated claim ids (default: all)")
    p.add_argument("--format", choices=("json",), default="json")
    shared(p)
    p.set_defaults(seed=42, func=cmd_verify)

    p = sub.add_parser("minimize", help="search for low S(gamma_k) states")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--shrink", type=float, default=0.5)
    p.add_argument("--grad-tol", type=float, default=1e-7)
    p.add_argument("--traces", action="store_true", help="include per-iteration traces")
    p.add_argument("--preserve-dir", help="directory for states found below ln C(N,k)")
    p.add_argument("--format", choices=("json",), default="json")
    shared(p, k_default=2)
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("sweep", help="CSV of bound slacks over a (d, N) grid")
    p.add_argument("--d-min", type=int, default=4)
    p.add_argument("--d-max", type=int, default=8)
    p.add_argument("--N-min", type=int, default=2)
    p.add_argument("--N-max", type=int, default=4)
    p.add_argument("--trials", type=int, default=3, help="random states per (d, N)")
    p.add_argument("--cap", type=int, default=5000, help="largest allowed C(d, N)")
    p.add_argument("--format", choices=("csv",), default="csv")
    shared(p, k_default=2)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
