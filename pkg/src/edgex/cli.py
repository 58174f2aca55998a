"""Command-line interface: ``edgex <subcommand> [options]``.

Exit codes: 0 success, 1 other failures, 2 invalid input, 3 unparseable
input file, 4 numerical non-convergence (results are still written).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .analytics import (
    cross_validate_prediction,
    degree_distribution,
    growth_trace,
    loglog_slope,
    predict_new_vertex_probability,
    sparsity_curve,
    sparsity_test,
    tail_exponent,
    theoretical_degree_pmf,
)
from .errors import EdgexError, InvalidInputError, ParseError
from .io import format_network, provenance, read_interactions, write_tokens
from .likelihood import fit_mle, fit_yule
from .network import canonicalize, project
from .samplers import (
    RNG_NAME,
    AritySpec,
    FiniteF,
    HollywoodParams,
    VertexComponentsSpec,
    finite_f_simulate,
    hollywood_simulate,
    signature_estimate,
    stick_breaking_simulate,
)

log = logging.getLogger("edgex")

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_PARSE, EXIT_NONCONVERGED = 0, 1, 2, 3, 4

PROJECTED_REFUSAL = (
    "refusing to fit projected data: the likelihood of a thresholded network "
    "sums over every unobserved multiplicity pattern and has no tractable form; "
    "fit the unprojected interaction data instead"
)


class _NonConverged(Exception):
    pass


def _parse_finite_f(text: str) -> FiniteF:
    """``i/j:p,...`` with ``0/i``, ``0/0`` and ``-1/0`` for blip patterns."""
    masses = {}
    try:
        for item in text.split(","):
            pair, p = item.split(":")
            i, j = (int(x) for x in pair.split("/"))
            masses[(i, j)] = masses.get((i, j), 0.0) + float(p)
    except ValueError:
        raise InvalidInputError(f"cannot parse pair masses {text!r}; expected i/j:prob,...")
    return FiniteF(masses)


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (1 << 63))
    if seed < 0:
        raise InvalidInputError("seed must be nonnegative")
    return seed


def _emit(text: str, path: Optional[str]) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _render(obj: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"
    lines = []

    def walk(prefix, value):
        if isinstance(value, dict):
            for k in sorted(value):
                walk(f"{prefix}.{k}" if prefix else str(k), value[k])
        else:
            lines.append(f"{prefix}\t{value}")

    walk("", obj)
    return "\n".join(lines) + "\n"


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _load(args):
    data = read_interactions(args.input)
    net = data.network(args.directed)
    return data, net


def _params_from_args(args) -> HollywoodParams:
    nu = AritySpec.parse(args.nu)
    if args.k is not None:
        return HollywoodParams.finite(args.alpha, args.k, nu)
    if args.theta is None:
        raise InvalidInputError("--theta is required unless --k is given")
    return HollywoodParams(args.alpha, args.theta, nu)


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args.seed)
    prov = provenance(command="simulate", model=args.model, n=args.n, seed=seed, rng=RNG_NAME)
    weights = None
    if args.model == "hollywood":
        if args.alpha is None:
            raise InvalidInputError("--alpha is required")
        params = _params_from_args(args)
        prov["params"] = params.describe()
        out = hollywood_simulate(params, args.n, seed, trace=args.trace is not None,
                                 directed=args.directed is not False)
        net, trace = out if args.trace is not None else (out, None)
    elif args.model in ("gem", "dirichlet"):
        nu = AritySpec.parse(args.nu)
        if args.model == "gem":
            spec = VertexComponentsSpec.gem(args.alpha, args.theta, nu)
            prov["params"] = f"alpha={args.alpha!r},theta={args.theta!r},nu={nu.to_string()}"
        else:
            if args.k is None or args.concentration is None:
                raise InvalidInputError("--k and --concentration are required for the dirichlet model")
            spec = VertexComponentsSpec.dirichlet(args.k, args.concentration, nu)
            prov["params"] = f"k={args.k},concentration={args.concentration!r},nu={nu.to_string()}"
        net, weights = stick_breaking_simulate(spec, args.n, seed)
        trace = growth_trace(net) if args.trace is not None else None
        if args.directed is False:
            net = canonicalize(net.edges, False)
    else:
        if not args.pairs:
            raise InvalidInputError("--pairs is required for the finite-f model")
        f = _parse_finite_f(args.pairs)
        prov["params"] = "pairs=" + ";".join(f"{i}/{j}:{p!r}" for (i, j), p in f.masses.items())
        net = finite_f_simulate(f, args.n, seed)
        trace = growth_trace(net) if args.trace is not None else None
    prov["directed"] = int(net.directed)
    _emit(format_network(net, prov), args.out)
    if trace is not None:
        _write_csv(args.trace, ["step", "v", "e", "m"], trace.rows())
    if weights is not None and args.weights:
        _write_csv(args.weights, ["vertex", "weight"], ((i, repr(w)) for i, w in enumerate(weights, 1)))
    return EXIT_OK


def cmd_fit(args) -> int:
    if args.projected:
        raise InvalidInputError(PROJECTED_REFUSAL)
    data, net = _load(args)
    if args.tokens:
        write_tokens(data, args.tokens)
    regime = "finite" if args.finite_k is not None and args.regime == "infinite" else args.regime
    fit = fit_mle(net, regime, args.finite_k, max_sweeps=args.max_sweeps)
    yule = fit_yule(net)
    s = net.stats
    report = {
        "fit": fit.to_dict(),
        "yule": yule.to_dict(),
        "stats": {"v": s.v, "e": s.e, "m": s.m, "directed": net.directed},
        "provenance": provenance(command="fit", input=args.input, input_sha256=data.digest,
                                 regime=args.regime, finite_k=args.finite_k, seed=args.seed),
    }
    _emit(_render(report, args.format), args.out)
    converged = fit.converged and (fit.alternative is None or fit.alternative.converged)
    return EXIT_OK if converged else EXIT_NONCONVERGED


def cmd_predict(args) -> int:
    data, net = _load(args)
    report = {}
    if args.alpha is not None:
        params = _params_from_args(args)
    else:
        fit = fit_mle(net, "finite" if args.k is not None else args.regime, args.k)
        if not fit.converged:
            raise _NonConverged("fit did not converge")
        params = fit.params()
        report["fit"] = fit.to_dict()
    report["probability_new_vertex"] = predict_new_vertex_probability(net.stats, params)
    report["params"] = params.describe()
    report["provenance"] = provenance(command="predict", input=args.input, input_sha256=data.digest, seed=args.seed)
    _emit(_render(report, args.format), args.out)
    return EXIT_OK


def cmd_diagnose(args) -> int:
    data, net = _load(args)
    selected = {name for name in ("degree", "growth", "sparsity") if getattr(args, name)}
    selected = selected or {"degree", "growth", "sparsity"}
    prefix = args.out or "diagnose"
    s = net.stats
    written = []
    if "degree" in selected:
        rows = degree_distribution(s)
        header = ["k", "N_k", "d_k"]
        if args.alpha is not None:
            header.append("p_alpha")
            rows = [(k, c, d, theoretical_degree_pmf(args.alpha, k)) for k, c, d in rows]
        _write_csv(f"{prefix}.degree.csv", header, rows)
        written.append(f"{prefix}.degree.csv")
    trace = growth_trace(net) if selected & {"growth", "sparsity"} else None
    if "growth" in selected:
        _write_csv(f"{prefix}.growth.csv", ["step", "v", "e", "m"], trace.rows())
        written.append(f"{prefix}.growth.csv")
    if "sparsity" in selected:
        _write_csv(f"{prefix}.sparsity.csv", ["step", "sparsity"], sparsity_curve(trace))
        written.append(f"{prefix}.sparsity.csv")
    summary: Dict[str, object] = {"files": written}
    for name, fn in (("loglog_slope", loglog_slope), ("tail_exponent", tail_exponent)):
        try:
            summary[name] = fn(s)
        except EdgexError as exc:
            summary[name] = None
            log.info("%s unavailable: %s", name, exc)
    status = EXIT_OK
    if args.test:
        fit = fit_mle(net, "infinite")
        summary["sparsity_test"] = sparsity_test(fit, s.m_avg).to_dict()
        if not fit.converged:
            status = EXIT_NONCONVERGED
    summary["provenance"] = provenance(command="diagnose", input=args.input, input_sha256=data.digest, seed=args.seed)
    _emit(_render(summary, args.format), f"{prefix}.summary.{'json' if args.format == 'json' else 'txt'}")
    return status


def cmd_project(args) -> int:
    data, net = _load(args)
    proj = project(net, args.cutoff)
    prov = provenance(command="project", input=args.input, input_sha256=data.digest,
                      cutoff=args.cutoff, isolated_dropped=proj.v_with_isolated - proj.stats.v)
    _emit(format_network(proj.network, prov), args.out)
    return EXIT_OK


def cmd_crossval(args) -> int:
    data, net = _load(args)
    seed = _resolve_seed(args.seed)
    regime = "finite" if args.k is not None else args.regime
    mean, sd, errors = cross_validate_prediction(net, args.sample, args.iters, seed, regime, args.k)
    report = {
        "mean_relative_error": mean,
        "sd_relative_error": sd,
        "iterations": args.iters,
        "sample_size": args.sample,
        "relative_errors": errors,
        "provenance": provenance(command="crossval", input=args.input, input_sha256=data.digest,
                                 seed=seed, rng=RNG_NAME, regime=regime, k=args.k),
    }
    _emit(_render(report, args.format), args.out)
    return EXIT_OK


def cmd_signature(args) -> int:
    data, net = _load(args)
    sig = signature_estimate(net)
    masses = [
        {"i": i, "j": j, "mass": float(p), "exact": f"{p.numerator}/{p.denominator}"}
        for (i, j), p in sig.masses().items()
    ]
    report = {
        "n": sig.n,
        "masses": masses if args.format == "json" else {f"{m['i']}/{m['j']}": m["exact"] for m in masses},
        "provenance": provenance(command="signature", input=args.input, input_sha256=data.digest),
    }
    _emit(_render(report, args.format), args.out)
    return EXIT_OK


def _global_flags(parser, suppress: bool) -> None:
    d = {"default": argparse.SUPPRESS} if suppress else {}
    parser.add_argument("--seed", type=int, help="random seed (recorded in outputs)", **d)
    parser.add_argument("--out", help="output path (default stdout; prefix for diagnose)", **d)
    g = parser.add_mutually_exclusive_group()
    g.add_argument("--directed", dest="directed", action="store_true", help="treat interactions as ordered", **d)
    g.add_argument("--undirected", dest="directed", action="store_false", help="treat interactions as multisets", **d)
    parser.add_argument("--format", choices=["json", "text"], help="report format", **d)
    if not suppress:
        parser.set_defaults(seed=None, out=None, directed=None, format="json")


def _param_flags(p, nu_default="2:1") -> None:
    p.add_argument("--alpha", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--k", type=int, help="finite population size (theta = -k alpha)")
    p.add_argument("--nu", default=nu_default, help="arity distribution k:prob,...")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgex", description="Edge-exchangeable network models.")
    parser.add_argument("--version", action="version", version=f"edgex {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        p.set_defaults(func=fn)
        return p

    p = add("simulate", cmd_simulate, "simulate a network")
    p.add_argument("--model", choices=["hollywood", "gem", "dirichlet", "finite-f"], default="hollywood")
    p.add_argument("--n", type=int, required=True, help="number of interactions")
    _param_flags(p)
    p.add_argument("--concentration", type=float, help="symmetric Dirichlet parameter")
    p.add_argument("--pairs", help="finite-f pair masses i/j:prob,... (0/i, 0/0, -1/0 for blips)")
    p.add_argument("--trace", help="write the growth trace CSV here")
    p.add_argument("--weights", help="write realized vertex weights CSV here (stick-breaking models)")

    p = add("fit", cmd_fit, "maximum-likelihood fit")
    p.add_argument("input")
    p.add_argument("--regime", choices=["infinite", "finite", "auto"], default="infinite")
    p.add_argument("--finite-k", type=int, help="finite population size (default v)")
    p.add_argument("--projected", action="store_true", help="input is a thresholded network")
    p.add_argument("--tokens", help="write the token-to-id dictionary here")
    p.add_argument("--max-sweeps", type=int, default=500)

    p = add("predict", cmd_predict, "probability that the next interaction has a new vertex")
    p.add_argument("input")
    _param_flags(p)
    p.add_argument("--regime", choices=["infinite", "finite"], default="infinite")

    p = add("diagnose", cmd_diagnose, "degree, growth and sparsity reports")
    p.add_argument("input")
    p.add_argument("--degree", action="store_true")
    p.add_argument("--growth", action="store_true")
    p.add_argument("--sparsity", action="store_true")
    p.add_argument("--alpha", type=float, help="add the limiting degree pmf for this alpha")
    p.add_argument("--test", action="store_true", help="run the sparsity test")

    p = add("project", cmd_project, "threshold edge multiplicities")
    p.add_argument("input")
    p.add_argument("--cutoff", type=int, default=0)

    p = add("crossval", cmd_crossval, "data-splitting check of the prediction")
    p.add_argument("input")
    p.add_argument("--sample", type=int, required=True)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--regime", choices=["infinite", "finite"], default="infinite")
    p.add_argument("--k", type=int)

    p = add("signature", cmd_signature, "empirical pair frequencies of a binary network")
    p.add_argument("input")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="edgex: %(levelname)s: %(message)s")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: print(f"edgex: warning: {msg}", file=sys.stderr)
            return args.func(args)
    except ParseError as exc:
        print(f"edgex: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _NonConverged as exc:
        print(f"edgex: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (InvalidInputError, ValueError) as exc:
        print(f"edgex: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (EdgexError, OSError) as exc:
        print(f"edgex: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
