"""Command-line front end.

Exit codes: 0 success, 1 domain error, 2 malformed input, 3 failed internal
verification.  ``NCCLAB_SEED`` in the environment overrides ``--seed``.
"""

from __future__ import annotations

import argparse
import itertools
import math
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import circuits, coding, ds, experiments, field, flow, network, reduction
from .errors import InputError, NccLabError, ParseError, VerificationError
from .fixtures import CIRCUITS, NETWORKS, circuit_fixture
from .report import fmt, to_csv, to_json, write_text

SEED_ENV = "NCCLAB_SEED"


def resolve_seed(args) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise InputError(f"{SEED_ENV}={env!r} is not an integer") from None
    return args.seed


def parse_fraction(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or fraction: {text!r}") from None


def emit(text: str, path=None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        write_text(path, text)


def load_network(name: str) -> network.Network:
    if Path(name).exists():
        return network.read_network(name)
    if name in NETWORKS:
        return NETWORKS[name]()
    raise ParseError(f"{name}: no such file or fixture (fixtures: {', '.join(NETWORKS)})")


def load_circuit(name: str, n: int, b: int) -> tuple[circuits.Circuit, str | None]:
    if Path(name).exists():
        return circuits.read_circuit(name), None
    if name in CIRCUITS:
        return circuit_fixture(name, n, b), name
    raise ParseError(f"{name}: no such file or fixture (fixtures: {', '.join(CIRCUITS)})")


# -- fft ----------------------------------------------------------------------


def read_vector(text: str) -> list[int]:
    tokens = [t for t in re.split(r"[,\s]+", text) if t]
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError("coefficients must be integers separated by commas or whitespace") from None


def cmd_fft(args) -> int:
    F = field.PrimeField(args.p)
    root = field.find_root_of_unity(F, args.n)  # fails before any input is read
    text = Path(args.input).read_text() if args.input not in (None, "-") else sys.stdin.read()
    vec = read_vector(text)
    if len(vec) != args.n:
        raise field.LengthMismatch(f"expected {args.n} values, got {len(vec)}")
    a = np.array([v % F.p for v in vec], dtype=np.int64)
    out = field.ffft_inverse(a, root) if args.inverse else field.ffft(a, root)
    lines = [",".join(str(int(v)) for v in out)]
    if args.check:
        ref = field.naive_dft(a, root)
        if args.inverse:
            ref = ref[(-np.arange(args.n)) % args.n] * F.inv(args.n % F.p) % F.p
        if not np.array_equal(ref, out):
            raise VerificationError("fast transform disagrees with the naive DFT")
        back = field.ffft(out, root) if args.inverse else field.ffft_inverse(out, root)
        if not np.array_equal(back, a):
            raise VerificationError("round trip does not return the input")
    emit(lines[0] + "\n", args.output)
    if args.check:
        print("OK naive-DFT match")
    return 0


# -- reduce -------------------------------------------------------------------

DEFAULT_DS = {"inversion": "inv_block", "polyeval": "eval_block", "polyinterp": "interp_block"}


def build_problem(args):
    name = args.ds or DEFAULT_DS[args.problem]
    if args.problem == "inversion":
        if name not in ds.INVERSION_DS:
            raise InputError(f"{name!r} is not an inversion structure; choose from {ds.INVERSION_DS}")
        return reduction.InversionProblem(ds.make_inversion_ds(name, args.n, args.t))
    variant = "eval" if args.problem == "polyeval" else "interp"
    if not name.startswith(variant):
        raise InputError(f"{args.problem} needs a {variant}_* structure, got {name!r}")
    if name not in ds.POLY_DS:
        raise InputError(f"unknown polynomial data structure {name!r}; choose from {ds.POLY_DS}")
    root = field.find_root_of_unity(field.PrimeField(args.p), args.n)
    block = 0 if name.endswith("_table") else args.t
    return reduction.PolyProblem(root, block, variant)


def cmd_reduce(args) -> int:
    seed = resolve_seed(args)
    prob = build_problem(args)
    red = reduction.build_reduction(prob, q=args.q, d=args.d)
    if args.b is not None:
        red = reduction.with_shift(red, args.b)
    n = red.n

    extra = {}
    if prob.kind == "inversion":
        exhaustive = math.factorial(n) <= args.samples
        inputs = reduction.all_permutations(n) if exhaustive else \
            reduction.sample_permutations(n, args.samples, seed)
        bucket = reduction.select_bucket(red, inputs, exhaustive, None if exhaustive else seed)
    else:
        rng = np.random.default_rng(seed)
        alphas = rng.integers(0, prob.p, size=(args.verify_samples, n), dtype=np.int64)
        bucket = reduction.select_bucket(red, alphas, exhaustive=False, seed=seed)
        tele = experiments.telescoping_check(prob.root, red.b, args.verify_samples, rng)
        passes = sum(reduction.two_pass_outputs(prob, a, red.b) == [int(v) for v in np.roll(a, red.b)]
                     for a in alphas)
        tele["two_pass_correct"] = passes
        extra["telescoping"] = tele
        if not tele["ok"] or passes != args.verify_samples:
            raise VerificationError(f"telescoping identity failed: {tele['mismatches']} mismatches, "
                                    f"{passes}/{args.verify_samples} two-pass runs correct")

    verification = reduction.verify_bucket(red, bucket)
    m = verification["members"]
    if m == 0 or verification["direct_correct"] != m or verification["replay_correct"] != m:
        raise VerificationError(f"bucket scheme failed: {verification}")

    report = {"command": "reduce", "seed": seed, "eps": args.eps}
    report.update(reduction.audit_reduction(red, bucket, verification, eps=args.eps))
    report.update(extra)
    net = red.network()
    if args.flow:
        sol = flow.flow_rate(flow.undirect(net))
        report["undirected_flow_rate"] = sol.rate

    text = to_json(report)
    sys.stdout.write(text)
    if args.out_dir:
        out = Path(args.out_dir)
        write_text(out / "network.txt", network.dumps(net))
        write_text(out / "report.json", text)
        write_text(out / "bucket.json", to_json({
            "seed": seed,
            "fixing": bucket.fixing.to_json(),
            "members": [list(x) for x in bucket.members],
        }))
    if args.figures:
        from . import plots
        plots.layered_network(red, Path(args.figures) / "layered_network.png")
    return 0


# -- flow rate and gap --------------------------------------------------------


def cmd_flowrate(args) -> int:
    net = load_network(args.network)
    if args.undirected:
        net = flow.undirect(net)
    sol = flow.flow_rate(net, feas_tol=args.feas_tol, opt_tol=args.opt_tol)
    if args.gap:
        res = coding.search_coding_rate(net, alphabet_bits=args.alphabet_bits)
        ratio = res.rate / sol.rate if sol.rate > 0 else math.inf
        print(f"coding {fmt(res.rate)} flow {fmt(sol.rate)} ratio {fmt(ratio) if math.isfinite(ratio) else 'inf'}")
    else:
        print(f"flow_rate {fmt(sol.rate)}")
    if args.csv:
        emit(sol.to_csv(), args.csv)
    if args.figures:
        from . import plots
        plots.flow_loads(net, sol, Path(args.figures) / "flow_loads.png")
    return 0


def cmd_gap(args) -> int:
    net = load_network(args.network)
    res = coding.search_coding_rate(net, alphabet_bits=args.alphabet_bits)
    report = {"command": "gap", "network": args.network, "alphabet_bits": args.alphabet_bits}
    report.update(flow.ncc_gap_report(net, float(res.rate)))
    report["search"] = {
        "rate": res.rate,
        "refuted_by_cut": {str(r): v for r, v in res.refuted_by_cut.items()},
        "tables_explored": {str(r): v for r, v in res.explored.items()},
        "witness": res.witness.name if res.witness else None,
    }
    sys.stdout.write(to_json(report))
    if args.witness and res.witness is not None:
        write_text(args.witness, coding.dumps_scheme(net, res.witness))
    return 0


# -- common bits --------------------------------------------------------------


def _fixture_widths(name: str | None, args) -> tuple[int, int]:
    if name == "inversion":
        w = ds.index_bits(args.fixture_n)
        return w, w
    if name == "sorter":
        return args.fixture_b, args.fixture_b
    return 1, 1


def verify_circuit_ds(c, cds, task: str | None, in_width: int) -> list[str]:
    lines = []
    n = cds.n
    domain = list(cds.query_domain())

    def run_all(table):
        adv = ds.preprocess(cds, table)
        outs = []
        for j in domain:
            val, log = ds.run_query(cds, adv, j, table)
            if tuple(log) != tuple(cds.query_set(j)):
                raise VerificationError(f"query {j} read {log}, its fixed set is {cds.query_set(j)}")
            outs.append(int(val))
        return outs

    tables = [list(map(int, t)) for t in itertools.product(range(1 << in_width), repeat=n)]
    if task == "inversion":
        perms = [t for t in tables if sorted(t) == list(range(n))]
        ok = sum(run_all(t) == ds.min_preimage_inverse(t) for t in perms)
        lines.append(f"{ok}/{len(perms)} permutations OK")
        ok_all = sum(run_all(t) == ds.min_preimage_inverse(t) for t in tables)
        lines.append(f"{ok_all}/{len(tables)} tables OK")
        if ok != len(perms) or ok_all != len(tables):
            raise VerificationError("\n".join(lines))
        return lines
    bits = np.array([circuits.to_bits(t, in_width) for t in tables], dtype=bool)
    direct = circuits.eval_batch(c, bits)
    ok = sum(run_all(t) == circuits.from_bits(list(map(int, direct[i])), cds.block)
             for i, t in enumerate(tables))
    lines.append(f"{ok}/{len(tables)} inputs OK")
    if task == "sorter":
        ok_sort = sum(circuits.from_bits(list(map(int, direct[i])), cds.block) == sorted(t)
                      for i, t in enumerate(tables))
        lines.append(f"{ok_sort}/{len(tables)} inputs sorted")
        ok = ok if ok_sort == len(tables) else -1
    if ok != len(tables):
        raise VerificationError("\n".join(lines))
    return lines


def cmd_commonbits(args) -> int:
    c, fixture = load_circuit(args.netlist, args.fixture_n, args.fixture_b)
    dflt_in, dflt_block = _fixture_widths(fixture, args)
    in_width = args.in_width or dflt_in
    block = args.block or dflt_block
    bound = args.bound if args.bound is not None else in_width
    finder = circuits.exhaustive_common_bits if args.exhaustive else circuits.find_common_bits
    cut = finder(c, bound, block)
    if not cut.bound_reached:
        print(f"warning: fan-in bound {bound} not reachable; every gate is cut", file=sys.stderr)
    cds = circuits.circuit_to_ds(c, cut, in_width)
    before = [len(x) for x in circuits.block_connectivity(c, (), block)]
    report = {
        "command": "commonbits",
        "netlist": args.netlist,
        "gates": c.size,
        "depth": c.depth,
        "bound": bound,
        "block": block,
        "in_width": in_width,
        "method": cut.method,
        "bound_reached": cut.bound_reached,
        "cut": list(cut.cut),
        "cut_size": cut.size,
        "connectivity_before": before,
        "connectivity": [list(x) for x in cut.connectivity],
        "ds": {
            "n": cds.n,
            "s_bits": cds.s_bits,
            "t": cds.t_queries,
            "query_sets": [list(cds.query_set(j)) for j in cds.query_domain()],
        },
    }
    lines = []
    if args.verify:
        lines = verify_circuit_ds(c, cds, fixture, in_width)
        report["verify"] = lines
    if args.json:
        sys.stdout.write(to_json(report))
    else:
        print(f"gates {c.size} depth {c.depth} bound {bound} block {block}")
        print(f"cut size {cut.size}: {' '.join(map(str, cut.cut)) or '-'}")
        print(f"max fan-in {cut.max_fanin()} (before {max(before, default=0)})")
        print(f"ds s = {cds.s_bits} t = {cds.t_queries}")
        for line in lines:
            print(line)
    if args.figures:
        from . import plots
        plots.cut_connectivity(before, [len(x) for x in cut.connectivity],
                               Path(args.figures) / "cut_connectivity.png")
    return 0


# -- experiments --------------------------------------------------------------


def cmd_hellman(args) -> int:
    seed = resolve_seed(args)
    rows = experiments.hellman_measure(args.ns, args.ts, args.trials, seed)
    header = list(rows[0])
    text = to_csv(header, [[r[h] for h in header] for r in rows])
    emit(text, args.csv)
    if args.figures:
        from . import plots
        plots.hellman_tradeoff([(r["n"], r["t"], r["s_times_t"], r["bound_4n_logn"]) for r in rows],
                               Path(args.figures) / "hellman_tradeoff.png")
    bad = [r for r in rows if not (r["all_correct"] and r["reads_ok"] and r["bound_ok"])]
    if bad:
        raise VerificationError(f"{len(bad)} (n, t) settings failed")
    return 0


def cmd_correction(args) -> int:
    seed = resolve_seed(args)
    res = experiments.correction_game(args.instances, args.m, args.ell, args.eps, seed)
    rows = res.pop("rows")
    sys.stdout.write(to_json(res))
    if args.csv:
        header = list(rows[0])
        emit(to_csv(header, [[r[h] for h in header] for r in rows]), args.csv)
    if args.figures:
        from . import plots
        plots.correction_lengths([r["total_bits"] for r in rows], res["length_target"],
                                 res["m_ell_over_4"], Path(args.figures) / "correction_lengths.png")
    if not (res["all_in_F"] and res["all_gamma_match"] and res["block_code_prefix_free"]):
        raise VerificationError("correction output left the codebook")
    return 0


def cmd_supervisor(args) -> int:
    seed = resolve_seed(args)
    report = {"command": "supervisor", "seed": seed}
    report["inversion"] = experiments.supervisor_inversion(args.n, args.ds, args.t, args.q)
    if args.affine:
        report["affine"] = experiments.supervisor_affine(samples=args.samples, seed=seed)
    sys.stdout.write(to_json(report))
    return 0


def cmd_fixture(args) -> int:
    if args.name in NETWORKS:
        emit(network.dumps(NETWORKS[args.name]()), args.output)
    elif args.name in CIRCUITS:
        emit(circuits.dumps(circuit_fixture(args.name, args.fixture_n, args.fixture_b)), args.output)
    else:
        raise InputError(f"unknown fixture {args.name!r}; networks {list(NETWORKS)}, circuits {list(CIRCUITS)}")
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncclab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fft", help="finite field Fourier transform of a coefficient vector")
    p.add_argument("--p", type=int, required=True, help="prime modulus")
    p.add_argument("--n", type=int, required=True, help="length; must divide p-1")
    p.add_argument("--input", help="CSV of integers (default: stdin)")
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--check", action="store_true", help="compare against the naive DFT")
    p.add_argument("--output", help="write the transform here instead of stdout")
    p.set_defaults(func=cmd_fft)

    p = sub.add_parser("reduce", help="data structure -> coding network pipeline with audit")
    p.add_argument("--problem", choices=("inversion", "polyeval", "polyinterp"), default="inversion")
    p.add_argument("--ds", help=f"structure name; default per problem {DEFAULT_DS}")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--t", type=int, default=2, help="query budget / block size")
    p.add_argument("--q", type=int, default=reduction.DEFAULT_Q, help="pruning factor")
    p.add_argument("--d", type=int, help="override the distance threshold")
    p.add_argument("--b", type=int, help="override the target shift")
    p.add_argument("--eps", type=parse_fraction, default=reduction.DEFAULT_EPS)
    p.add_argument("--p", type=int, default=17, help="prime for the polynomial problems")
    p.add_argument("--samples", type=int, default=reduction.DEFAULT_SAMPLES,
                   help="permutations to bucket when n! exceeds this")
    p.add_argument("--verify-samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir")
    p.add_argument("--figures", help="directory for PNG figures")
    p.add_argument("--flow", action="store_true", help="also report the undirected flow rate")
    p.set_defaults(func=cmd_reduce)

    def flow_args(p):
        p.add_argument("network", help="network file or fixture name")
        p.add_argument("--alphabet-bits", type=int, default=1)

    p = sub.add_parser("flowrate", help="maximum concurrent flow rate")
    flow_args(p)
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--gap", action="store_true", help="also search the coding rate")
    p.add_argument("--csv", help="write per-arc flows")
    p.add_argument("--feas-tol", type=float, default=flow.FEAS_TOL)
    p.add_argument("--opt-tol", type=float, default=flow.OPT_TOL)
    p.add_argument("--figures")
    p.set_defaults(func=cmd_flowrate)

    p = sub.add_parser("gap", help="coding rate against directed and undirected flow rate")
    flow_args(p)
    p.add_argument("--witness", help="write the coding scheme found")
    p.set_defaults(func=cmd_gap)

    def fixture_args(p):
        p.add_argument("--fixture-n", type=int, default=4)
        p.add_argument("--fixture-b", type=int, default=2)

    p = sub.add_parser("commonbits", help="common-bits cut and derived data structure")
    p.add_argument("netlist", help="netlist file or fixture name")
    p.add_argument("--bound", type=int, help="max input bits per output block (default: in-width)")
    p.add_argument("--block", type=int, help="output bits per query")
    p.add_argument("--in-width", type=int, help="bits per input position")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--figures")
    fixture_args(p)
    p.set_defaults(func=cmd_commonbits)

    p = sub.add_parser("hellman", help="space/time measurement of the adaptive inverter")
    p.add_argument("--ns", type=int, nargs="+", default=list(experiments.HELLMAN_NS))
    p.add_argument("--ts", type=int, nargs="+", default=list(experiments.HELLMAN_TS))
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv")
    p.add_argument("--figures")
    p.set_defaults(func=cmd_hellman)

    p = sub.add_parser("correction", help="correction game on random dense codebooks")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--ell", type=int, default=8)
    p.add_argument("--eps", type=parse_fraction, default=reduction.DEFAULT_EPS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv")
    p.add_argument("--figures")
    p.set_defaults(func=cmd_correction)

    p = sub.add_parser("supervisor", help="supervisor augmentation on the inversion network")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--ds", default="inv_block")
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--q", type=int, default=reduction.DEFAULT_Q)
    p.add_argument("--affine", action="store_true", help="add the parallel-path affine instance")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_supervisor)

    p = sub.add_parser("fixture", help="print a built-in network or netlist")
    p.add_argument("name")
    p.add_argument("--output")
    fixture_args(p)
    p.set_defaults(func=cmd_fixture)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NccLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
