"""Command line front end.

Exit status: 0 on success, 1 on bad input (the message names the file and
field), 2 when a checked property fails (for example dp and brute force
disagree, or a certificate does not hold).
"""

import argparse
import csv
import io as _stdio
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import io
from .certificates import (
    check_block,
    check_decay,
    default_threads,
    forge_decaying_sequence,
    l1_probe,
    singular_witness,
    unconditionality_sample,
    upper_l2_sample,
)
from .engine import t0_norm_auto, t2_norm, t2_norm_bruteforce, t2_norm_dp
from .errors import BaireSumError, NotBlock, NotNormalized, ParseError
from .generate import all_forests, full_binary_tree, random_tree
from .kernel import BatchEvaluator, kernel_supported
from .numeric import TOL, approx_str, fraction_str, parse_fraction, to_mpf
from .operators import Branch, RangeInterval, project_branch, project_interval, project_segment
from .oracles import SchauderTreeBasis, parse_basis, validate_oracle
from .tree import Segment, build_tree, count_families, support_forest, validate_segment
from .vector import TreeVector

COMMANDS = (
    "norm",
    "t0norm",
    "project",
    "witness",
    "forge",
    "certify",
    "uncond-report",
    "upper-l2-report",
    "oracle-check",
    "validate-oracle",
    "bench",
    "generate-tree",
)


class CheckFailed(Exception):
    """A verified property did not hold; carries the report to print."""

    def __init__(self, report):
        super().__init__("check failed")
        self.report = report


@dataclass
class RunConfig:
    command: str
    basis: str = "c0"
    method: str = "dp"
    seed: int = 0
    trials: int = 1000
    budget: int = 10**6
    tolerance: Fraction = Fraction(1, 10**12)
    output: str = "text"
    threads: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.method == "both" and not self.budget > 0:
            raise ValueError("method=both needs a finite positive budget")


# -- argument helpers ---------------------------------------------------------


def _tree(arg):
    """A tree file, or a generator string such as ``full-binary:12``."""
    if Path(arg).exists():
        return io.load_tree(arg)
    parts = arg.split(":")
    try:
        if parts[0] == "full-binary" and len(parts) == 2 and int(parts[1]) >= 1:
            return full_binary_tree(int(parts[1]), implicit=True)
        if parts[0] == "random" and len(parts) == 3 and int(parts[1]) >= 1:
            return random_tree(int(parts[1]), int(parts[2]))
    except ValueError:
        pass
    raise ParseError(arg, "<file>", "no such file, and not a tree kind (full-binary:d or random:n:seed)")


def _fraction_arg(text, name):
    try:
        return parse_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"--{name}", name, f"expected p/q, got {text!r} ({exc})") from None


def _basis(tree, selector):
    try:
        oracle = parse_basis(selector)
    except BaireSumError as exc:
        raise ParseError("--basis", "basis", str(exc)) from None
    return SchauderTreeBasis(tree, oracle)


def _norm_json(res):
    return res.to_json()


def _agree(a, b, tolerance):
    if a.exact and b.exact:
        return a.value_sq == b.value_sq
    return abs(to_mpf(a.value_sq) - to_mpf(b.value_sq)) <= to_mpf(tolerance)


def _sequence(args, tree, basis):
    if args.sequence:
        return io.load_sequence(args.sequence, tree), tree.bfs_enumeration()
    seq = forge_decaying_sequence(tree, args.length, args.seed, args.k0)
    return list(seq.vectors), seq.enumeration


# -- commands -----------------------------------------------------------------


def cmd_norm(args, cfg):
    tree = _tree(args.tree)
    z = io.load_vector(args.vector, tree)
    basis = _basis(tree, cfg.basis)
    if cfg.method == "both":
        dp = t2_norm_dp(basis, z)
        brute = t2_norm_bruteforce(basis, z, cfg.budget)
        report = {"dp": _norm_json(dp), "brute": _norm_json(brute), "agree": _agree(dp, brute, cfg.tolerance)}
        if not report["agree"]:
            raise CheckFailed(report)
        return report
    if cfg.method == "brute":
        return _norm_json(t2_norm_bruteforce(basis, z, cfg.budget))
    if cfg.method == "dp":
        return _norm_json(t2_norm_dp(basis, z))
    return _norm_json(t2_norm(basis, z, method=cfg.method))


def cmd_t0norm(args, cfg):
    tree = _tree(args.tree)
    z = io.load_vector(args.vector, tree)
    return _norm_json(t0_norm_auto(_basis(tree, cfg.basis), z))


def cmd_project(args, cfg):
    tree = _tree(args.tree)
    z = io.load_vector(args.vector, tree)
    if args.segment is not None:
        try:
            ids = tuple(int(x) for x in args.segment.split(",") if x.strip())
        except ValueError:
            raise ParseError("--segment", "segment", f"expected comma-separated ids, got {args.segment!r}") from None
        try:
            seg = Segment(ids)
            validate_segment(tree, seg)
        except (BaireSumError, ValueError, IndexError) as exc:
            raise ParseError("--segment", "segment", str(exc)) from None
        out = project_segment(z, seg)
    elif args.branch is not None:
        try:
            out = project_branch(z, Branch(tree, args.branch))
        except IndexError as exc:
            raise ParseError("--branch", "branch", str(exc)) from None
    else:
        try:
            interval = RangeInterval.parse(args.interval)
        except BaireSumError as exc:
            raise ParseError("--interval", "interval", str(exc)) from None
        out = project_interval(z, tree.bfs_enumeration(), interval)
    return io.vector_to_json(out)


def cmd_witness(args, cfg):
    tree = _tree(args.tree)
    basis = _basis(tree, cfg.basis)
    eps = _fraction_arg(args.epsilon, "epsilon")
    y = singular_witness(basis, eps, cfg.budget)
    t2 = t2_norm(basis, y, witness=False)
    t0 = t0_norm_auto(basis, y, witness=False)
    if t0.exact:
        ok = t2.value_sq == 1 and t0.value_sq <= eps * eps
    else:
        ok = abs(t2.value - 1) <= TOL and t0.value <= to_mpf(eps) + TOL
    report = {
        "epsilon": fraction_str(eps),
        "support_size": len(y),
        "coefficient": fraction_str(Fraction(int(y.nums[0]), y.den)),
        "t2": _norm_json(t2),
        "t0": _norm_json(t0),
        "holds": ok,
    }
    if args.include_vector:
        report["vector"] = io.vector_to_json(y)
    if not ok:
        raise CheckFailed(report)
    return report


def _sequence_summary(vectors, enumeration):
    out = []
    for w in vectors:
        pos = enumeration.positions(w.nodes)
        out.append({"support_size": len(w), "range": [int(pos.min()), int(pos.max())]})
    return out


def cmd_forge(args, cfg):
    tree = _tree(args.tree)
    seq = forge_decaying_sequence(tree, args.length, cfg.seed, args.k0)
    basis = seq.basis
    block = check_block(seq.vectors, seq.enumeration, basis)
    cert = check_decay(block, basis)
    report = {
        "length": args.length,
        "seed": cfg.seed,
        "k0": args.k0,
        "vectors": _sequence_summary(seq.vectors, seq.enumeration),
        "block": True,
        "decay": cert.to_json(),
        "sequence_file": None,
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        names = []
        for n, w in enumerate(seq.vectors):
            name = f"w{n}.json"
            io.write_json(out / name, io.vector_to_json(w))
            names.append(name)
        io.write_json(out / "sequence.json", names)
        report["sequence_file"] = str(out / "sequence.json")
    if not cert.overall:
        raise CheckFailed(report)
    return report


def cmd_certify(args, cfg):
    tree = _tree(args.tree)
    basis = _basis(tree, cfg.basis)
    vectors = io.load_sequence(args.sequence, tree)
    enum = tree.bfs_enumeration()
    report = {"length": len(vectors), "vectors": [], "block": None, "decay": None}
    try:
        block = check_block(vectors, enum, basis)
    except (NotNormalized, NotBlock) as exc:
        report["block"] = {"ok": False, "error": type(exc).__name__, "detail": str(exc)}
        raise CheckFailed(report) from None
    report["vectors"] = _sequence_summary(vectors, enum)
    report["block"] = {"ok": True}
    cert = check_decay(block, basis)
    report["decay"] = cert.to_json()
    if not cert.overall:
        raise CheckFailed(report)
    return report


def cmd_uncond(args, cfg):
    tree = _tree(args.tree)
    basis = _basis(tree, cfg.basis)
    vectors, enum = _sequence(args, tree, basis)
    block = check_block(vectors, enum, basis)
    rep = unconditionality_sample(block, basis, cfg.trials, cfg.seed, cfg.threads)
    report = rep.to_json()
    report["seed"] = cfg.seed
    if not rep.holds:
        raise CheckFailed(report)
    return report


def cmd_upper(args, cfg):
    tree = _tree(args.tree)
    basis = _basis(tree, cfg.basis)
    vectors, enum = _sequence(args, tree, basis)
    block = check_block(vectors, enum, basis)
    rep = upper_l2_sample(block, basis, cfg.trials, cfg.seed, cfg.threads)
    report = rep.to_json()
    report["seed"] = cfg.seed
    report["l1_probe"] = l1_probe(block, basis).to_json()
    if not rep.finite:
        raise CheckFailed(report)
    return report


def cmd_oracle_check(args, cfg):
    selectors = args.bases.split(",")
    rng = np.random.default_rng(cfg.seed)
    checked = 0
    mismatches = []
    for n in range(1, args.max_nodes + 1):
        for parents in all_forests(n):
            tree = build_tree(parents)
            bases = [_basis(tree, s) for s in selectors]
            for _ in range(args.vectors):
                k = int(rng.integers(1, n + 1))
                nodes = rng.choice(n, size=k, replace=False)
                z = TreeVector.from_arrays(nodes, rng.integers(-6, 7, size=k), int(rng.integers(1, 5)))
                for sel, basis in zip(selectors, bases):
                    dp = t2_norm_dp(basis, z)
                    brute = t2_norm_bruteforce(basis, z, cfg.budget)
                    checked += 1
                    if not _agree(dp, brute, cfg.tolerance):
                        mismatches.append({"parents": parents, "basis": sel, "vector": io.vector_to_json(z)})
    report = {
        "max_nodes": args.max_nodes,
        "bases": selectors,
        "comparisons": checked,
        "mismatches": mismatches,
        "ok": not mismatches,
    }
    if mismatches:
        raise CheckFailed(report)
    return report


def cmd_validate_oracle(args, cfg):
    try:
        oracle = parse_basis(cfg.basis)
    except BaireSumError as exc:
        raise ParseError("--basis", "basis", str(exc)) from None
    report = validate_oracle(oracle, args.max_depth, args.samples, cfg.seed).to_json()
    if not report["ok"]:
        raise CheckFailed(report)
    return report


def cmd_bench(args, cfg):
    methods = ["dp", "kernel", "brute"] if cfg.method == "all" else [cfg.method]
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["tree_nodes", "support", "basis", "method", "seconds", "dp_nodes", "families", "value_approx"])
    for n in args.nodes:
        tree = random_tree(n, cfg.seed)
        rng = np.random.default_rng(cfg.seed)
        for k in args.support:
            k = min(k, n)
            nodes = np.sort(rng.choice(n, size=k, replace=False))
            z = TreeVector.from_arrays(nodes, rng.integers(1, 100, size=k), 7)
            basis = _basis(tree, cfg.basis)
            sf = support_forest(tree, z.nodes)
            families = count_families(sf)
            for method in methods:
                if method == "kernel" and not kernel_supported(basis.oracle):
                    continue
                if method == "brute" and families > cfg.budget:
                    continue
                start = time.perf_counter()
                if method == "dp":
                    res = t2_norm_dp(basis, z)
                elif method == "kernel":
                    res = BatchEvaluator(basis, z.nodes).evaluate(z, witness=False)[0]
                else:
                    res = t2_norm_bruteforce(basis, z, cfg.budget)
                secs = time.perf_counter() - start
                writer.writerow([n, k, cfg.basis, method, f"{secs:.6f}", len(sf), families, approx_str(res.value, 15)])
    text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    return text


def cmd_generate_tree(args, cfg):
    parts = args.kind.split(":")
    try:
        if parts[0] == "full-binary" and len(parts) == 2:
            d = int(parts[1])
            if d < 1:
                raise ValueError("depth must be >= 1")
            tree = full_binary_tree(d)
        elif parts[0] == "random" and len(parts) == 3:
            n = int(parts[1])
            if n < 1:
                raise ValueError("n must be >= 1")
            tree = random_tree(n, int(parts[2]))
        else:
            raise ValueError("expected full-binary:d or random:n:seed")
    except ValueError as exc:
        raise ParseError("--kind", "kind", str(exc)) from None
    obj = io.tree_to_json(tree)
    if args.out:
        io.write_json(args.out, obj)
        return {"nodes": tree.n_nodes, "out": args.out}
    return obj


HANDLERS = {
    "norm": cmd_norm,
    "t0norm": cmd_t0norm,
    "project": cmd_project,
    "witness": cmd_witness,
    "forge": cmd_forge,
    "certify": cmd_certify,
    "uncond-report": cmd_uncond,
    "upper-l2-report": cmd_upper,
    "oracle-check": cmd_oracle_check,
    "validate-oracle": cmd_validate_oracle,
    "bench": cmd_bench,
    "generate-tree": cmd_generate_tree,
}


# -- parser -------------------------------------------------------------------


def _int_list(text):
    return [int(x) for x in text.split(",") if x]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--basis", default="c0", help="c0, l1, l2 or lp:num/den")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=10**6, help="family budget for brute force")
    common.add_argument("--tolerance", default="1/1000000000000", help="p/q tolerance for inexact comparisons")
    common.add_argument("--json", dest="output", action="store_const", const="json", default="text")
    common.add_argument("--threads", type=int, default=None)

    parser = argparse.ArgumentParser(prog="bairesum", description="Baire sum norms on finite trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="T2 norm of a vector")
    p.add_argument("--tree", required=True)
    p.add_argument("--vector", required=True)
    p.add_argument("--method", choices=["dp", "brute", "both", "kernel", "auto"], default="dp")

    p = sub.add_parser("t0norm", parents=[common], help="T0 norm of a vector")
    p.add_argument("--tree", required=True)
    p.add_argument("--vector", required=True)

    p = sub.add_parser("project", parents=[common], help="coordinate projection of a vector")
    p.add_argument("--tree", required=True)
    p.add_argument("--vector", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--segment", help="comma-separated node ids, top first")
    g.add_argument("--branch", type=int, help="deepest node of the branch")
    g.add_argument("--interval", help="lo:hi in BFS positions")

    p = sub.add_parser("witness", parents=[common], help="unit vector with small segment norms")
    p.add_argument("--tree", required=True)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--include-vector", action="store_true")

    p = sub.add_parser("forge", parents=[common], help="build a decaying block sequence")
    p.add_argument("--tree", required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--k0", type=int, default=4)
    p.add_argument("--out", help="directory for the vector files and sequence.json")

    p = sub.add_parser("certify", parents=[common], help="check blockness and decay of a sequence")
    p.add_argument("--tree", required=True)
    p.add_argument("--sequence", required=True)

    for name, helptext in (
        ("uncond-report", "sampled unconditionality ratios"),
        ("upper-l2-report", "sampled upper l2 ratios and the l1 probe"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--tree", default="full-binary:22")
        p.add_argument("--sequence", help="sequence file; forged on --tree when omitted")
        p.add_argument("--length", type=int, default=3)
        p.add_argument("--k0", type=int, default=4)
        p.add_argument("--trials", type=int, default=1000)

    p = sub.add_parser("oracle-check", parents=[common], help="dp against brute force on every small forest")
    p.add_argument("--max-nodes", type=int, default=6)
    p.add_argument("--vectors", type=int, default=5)
    p.add_argument("--bases", default="c0,l1,l2")

    p = sub.add_parser("validate-oracle", parents=[common], help="sampled axiom check of a branch oracle")
    p.add_argument("--max-depth", type=int, default=8)
    p.add_argument("--samples", type=int, default=200)

    p = sub.add_parser("bench", parents=[common], help="timings as CSV")
    p.add_argument("--nodes", type=_int_list, default=[10**4, 10**5])
    p.add_argument("--support", type=_int_list, default=[10**3, 10**4])
    p.add_argument("--method", choices=["dp", "kernel", "brute", "all"], default="dp")
    p.add_argument("--out")

    p = sub.add_parser("generate-tree", parents=[common], help="write a tree file")
    p.add_argument("--kind", required=True, help="full-binary:d or random:n:seed")
    p.add_argument("--out")
    return parser


def _config(args):
    tol = _fraction_arg(args.tolerance, "tolerance")
    return RunConfig(
        command=args.command,
        basis=args.basis,
        method=getattr(args, "method", "dp"),
        seed=args.seed,
        trials=getattr(args, "trials", 1000),
        budget=args.budget,
        tolerance=tol,
        output=args.output,
        threads=args.threads or default_threads(),
    )


def _text(obj, indent=0):
    if isinstance(obj, str):
        return obj if obj.endswith("\n") else obj + "\n"
    lines = []
    pad = "  " * indent
    for key in sorted(obj):
        value = obj[key]
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_text(value, indent + 1).rstrip("\n"))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}: {len(value)} item(s)")
        else:
            lines.append(f"{pad}{key}: {value}")
    return "\n".join(lines) + "\n"


def _emit(obj, output, stream):
    if isinstance(obj, str):
        stream.write(obj)
    elif output == "json":
        stream.write(io.dumps(obj))
    else:
        stream.write(_text(obj))


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        cfg = _config(args)
        if cfg.budget < 1:
            raise ParseError("--budget", "budget", "must be positive")
        _emit(HANDLERS[args.command](args, cfg), cfg.output, stdout)
        return 0
    except CheckFailed as exc:
        _emit(exc.report, args.output, stdout)
        return 2
    except ParseError as exc:
        stderr.write(f"error: {exc}\n")
        return 1
    except BaireSumError as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
