"""
Command-line front end. Every command prints one JSON document.

Exit codes: 0 success, 1 computation error or failed suite, 2 usage error or
an input file that is missing or does not parse.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import channels, classical, harness, io, maxcorr, states
from .errors import DegenerateOptimizer, MaxCorrError

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    pass


def _tool_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def _load(loader, path):
    try:
        return loader(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _state(args):
    return _load(io.load_state, args.state)


def _dist(args):
    return _load(io.load_distribution, args.dist)


def cmd_mu(args):
    return {"mu": maxcorr.maximal_correlation(_state(args))}


def cmd_spectrum(args):
    spec = maxcorr.schmidt_spectrum(_state(args))
    out = {"coefficients": [float(c) for c in spec.coefficients]}
    if args.vectors:
        out["a_vectors"] = [io.encode_matrix(m) for m in spec.a_vectors]
        out["b_vectors"] = [io.encode_matrix(n) for n in spec.b_vectors]
    return out


def cmd_optimizers(args):
    rho = _state(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateOptimizer)
        pair = maxcorr.extract_optimizers(rho)
    return {
        "x": io.encode_matrix(pair.x_a),
        "y": io.encode_matrix(pair.y_b),
        "value": pair.value,
        "hermitian": pair.hermitian,
        "degenerate": pair.degenerate,
    }


def cmd_classical_mu(args):
    return {"mu": classical.classical_maximal_correlation(_dist(args))}


def cmd_binary_exact(args):
    dist = _dist(args)
    out = {"mu": classical.binary_mu_exact(dist)}
    if dist.p[0, 0] > 0 and dist.p[1, 1] > 0:
        out["lower_bound"] = classical.lemma_lower_bound(dist)
    return out


def cmd_decompose(args):
    dist = _dist(args)
    ok, part = classical.is_decomposable(dist, **({"tol": args.tol} if args.tol is not None else {}))
    out = {"decomposable": ok, "partition": None, "mu": classical.classical_maximal_correlation(dist)}
    if ok:
        out["partition"] = dict(zip(("U0", "U1", "V0", "V1"), (list(x) for x in part)))
    return out


def cmd_common_data(args):
    rho = _state(args)
    kw = {"tol": args.tol} if args.tol is not None else {}
    wit = maxcorr.common_data_witness(rho, **kw)
    if wit is None:
        return {"status": "absent"}
    return {
        "status": "found",
        "m": io.encode_matrix(wit.m.effect),
        "n": io.encode_matrix(wit.n.effect),
        "distribution": wit.distribution.p.tolist(),
    }


def cmd_mi(args):
    return {"mutual_information": states.mutual_information(_state(args))}


def cmd_apply_channel(args):
    rho = _state(args)
    ch = _load(io.load_channel, args.channel)
    return io.state_to_dict(channels.apply_local(ch, rho, args.side))


def _dims(args):
    dims = getattr(args, "dims", None)
    return tuple(dims) if dims else None


def _suite(fn, default_dims=None):
    def run(args):
        kw = {"trials": args.trials, "seed": args.seed}
        dims = _dims(args) or default_dims
        if dims is not None:
            kw["dims"] = dims
        return fn(**kw).to_dict()
    return run


COMMANDS = {
    "mu": (cmd_mu, "maximal correlation of a state", "state"),
    "spectrum": (cmd_spectrum, "all Schmidt coefficients of the normalized operator", "state"),
    "optimizers": (cmd_optimizers, "optimal local observables", "state"),
    "classical-mu": (cmd_classical_mu, "maximal correlation of a CSV distribution", "dist"),
    "binary-exact": (cmd_binary_exact, "closed form and lower bound for a 2x2 distribution", "dist"),
    "decompose": (cmd_decompose, "decomposability of a distribution", "dist"),
    "common-data": (cmd_common_data, "local measurements with perfectly correlated outcomes", "state"),
    "mi": (cmd_mi, "quantum mutual information in bits", "state"),
    "apply-channel": (cmd_apply_channel, "apply a channel file to one side of a state", "state"),
    "dpi-suite": (_suite(harness.run_dpi_suite), "data-processing property suite", None),
    "tensor-suite": (_suite(harness.run_tensorization_suite), "tensorization property suite", None),
    "extreme-suite": (_suite(lambda trials, seed: harness.run_extreme_suite(trials, seed)),
                      "extreme-value property suite", None),
    "oracle-compare": (_suite(harness.run_oracle_suite), "variational oracle vs spectral value", None),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--trials", type=int, default=200)
    common.add_argument("--tol", type=float, default=None, help="override the command's default tolerance")
    common.add_argument("--out", default=None, help="write JSON here instead of stdout")

    parser = argparse.ArgumentParser(prog="qmaxcorr", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"qmaxcorr {_tool_version()} (file format {io.FORMAT_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (fn, help_text, kind) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(func=fn)
        if kind == "state":
            p.add_argument("--state", required=True, help="state JSON file")
        elif kind == "dist":
            p.add_argument("--dist", required=True, help="distribution CSV file")
        else:
            if name != "extreme-suite":
                p.add_argument("--dims", type=int, nargs=2, metavar=("DA", "DB"))
        if name == "spectrum":
            p.add_argument("--vectors", action="store_true", help="include the Schmidt vectors")
        if name == "apply-channel":
            p.add_argument("--channel", required=True, help="channel JSON file")
            p.add_argument("--side", choices=("A", "B"), default="B")
    return parser


def _emit(result, out):
    text = json.dumps(result)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.func(args)
    except InputError as exc:
        print(f"qmaxcorr: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MaxCorrError, np.linalg.LinAlgError) as exc:
        print(f"qmaxcorr {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    try:
        _emit(result, args.out)
    except OSError as exc:
        print(f"qmaxcorr: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(result, dict) and result.get("passed") is False:
        return EXIT_COMPUTE
    return EXIT_OK


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
