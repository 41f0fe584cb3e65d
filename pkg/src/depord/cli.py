"""Command-line front end: ingestion, comparisons, measures, reduction, plots.

Model sources are CSV sample files (header row, y first), grid JSON files
(schema "depord/1"), or named-family JSON files ({"family": "bernoulli", ...}
or {"family": "gaussian", ...}).  All reports are JSON on stdout with sorted
keys, so identical inputs and seeds produce byte-identical output.

Exit codes: 0 a verdict or value was computed (including MarginalMismatch),
2 input error, 3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import ccx, measures, models, oracle, rearrange, reduce
from .dist_core import (
    ConditionalModel,
    DegenerateError,
    DepordError,
    DiscreteMarginal,
    DomainError,
    read_csv_model,
)

SCHEMA = "depord/1"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


def model_to_json(model: ConditionalModel) -> dict:
    return {
        "schema": SCHEMA,
        "y_atoms": model.y_marginal.atoms.tolist(),
        "y_probs": model.y_marginal.probs.tolist(),
        "cell_weights": model.cell_weights.tolist(),
        "cond_cdf": model.cond_cdf.tolist(),
    }


def model_from_json(obj: dict) -> ConditionalModel:
    if obj.get("schema") != SCHEMA:
        raise DomainError(f"unsupported grid schema {obj.get('schema')!r}; expected {SCHEMA!r}")
    try:
        atoms = obj["y_atoms"]
        weights = obj["cell_weights"]
        cdf = obj["cond_cdf"]
    except KeyError as missing:
        raise DomainError(f"grid JSON is missing field {missing}") from None
    probs = obj.get("y_probs")
    if probs is None:
        F = np.asarray(cdf, dtype=float)
        mix = F @ (np.asarray(weights, dtype=float) / np.sum(weights))
        probs = np.diff(mix, prepend=0.0)
    marg = DiscreteMarginal(atoms, probs)
    return ConditionalModel(marg, weights, cdf)


def _family_model(obj: dict, args) -> ConditionalModel:
    family = obj["family"]
    if family == "bernoulli":
        params = models.BernoulliParams(obj["p"], obj["q"], obj["alpha"], obj["beta"])
        return models.bernoulli_to_model(params)
    if family == "gaussian":
        spec = models.GaussianSpec(obj["mean"], obj["cov"])
        return models.gaussian_discretize(
            spec,
            n_cells=int(obj.get("n_cells", args.grid)),
            n_levels=int(obj.get("n_levels", args.levels)),
            mc_samples=obj.get("mc_samples"),
            seed=int(obj.get("seed", args.seed)),
        )
    raise DomainError(f"unknown family {family!r}; expected 'bernoulli' or 'gaussian'")


def load_model(path: str, args) -> ConditionalModel:
    if path.endswith(".csv"):
        return read_csv_model(path, n_cells=args.grid)
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise DomainError(f"cannot read {path!r}") from None
    except json.JSONDecodeError as err:
        raise DomainError(f"{path}: invalid JSON ({err})") from None
    if not isinstance(obj, dict):
        raise DomainError(f"{path}: expected a JSON object")
    if "family" in obj:
        return _family_model(obj, args)
    return model_from_json(obj)


def _witness_json(w):
    if w is None:
        return None
    return {"v": w.v, "x": w.x, "lhs": w.lhs, "rhs": w.rhs}


def _emit(report: dict, args) -> None:
    print(json.dumps(report, sort_keys=True, indent=None, separators=(",", ":")))


def cmd_compare(args) -> int:
    a = load_model(args.source_a, args)
    b = load_model(args.source_b, args)
    engines = {}
    primary = None
    wanted = ["schur", "concordance", "brute"] if args.engine == "all" else [args.engine]
    for engine in wanted:
        if engine == "schur":
            res = ccx.ccx_compare(a, b, args.tol)
        elif engine == "concordance":
            res = reduce.ccx_via_concordance(a, b, args.tol)
        else:
            res = oracle.ccx_bruteforce(a, b, args.tol)
        engines[engine] = str(res.verdict)
        if primary is None:
            primary = res
    per_level = [
        {"v": d.v, "schur_verdict": str(d.verdict), "max_violation": d.max_violation}
        for d in primary.per_level
    ]
    report = {
        "schema": SCHEMA,
        "verdict": str(primary.verdict),
        "tol": args.tol,
        "witness": _witness_json(primary.witness),
        "per_level": per_level,
        "engines": engines,
        "models": {"a": model_to_json(a), "b": model_to_json(b)},
    }
    _emit(report, args)
    return EXIT_OK


def _parse_phi(text: str) -> measures.PhiSpec:
    if text == "square":
        return measures.PhiSpec.square()
    if text == "abs":
        return measures.PhiSpec.abs()
    if text.startswith("power:"):
        return measures.PhiSpec.power(float(text.split(":", 1)[1]))
    raise DomainError(f"unknown phi {text!r}; use square, abs, or power:K")


def cmd_measure(args) -> int:
    model = load_model(args.source, args)
    name = args.measure
    if name == "xi":
        value = measures.chatterjee_xi(model)
    elif name == "xi-phi":
        value = measures.xi_phi(model, _parse_phi(args.phi))
    elif name == "lambda-phi":
        value = measures.lambda_phi(model, _parse_phi(args.phi))
    elif name == "nu":
        value = measures.integrated_r2_nu(model)
    else:
        kind = {"rho-rearranged": "spearman_rho", "tau-rearranged": "kendall_tau", "gamma-rearranged": "gini_gamma"}[name]
        value = measures.rearranged_measure(model, kind)
    report = {"schema": SCHEMA, "measure": name, "value": value}
    if name in ("xi-phi", "lambda-phi"):
        report["phi"] = args.phi
    _emit(report, args)
    return EXIT_OK


def cmd_reduce(args) -> int:
    model = load_model(args.source, args)
    grid = reduce.reduce_to_si(model)
    mass = reduce.si_mass_matrix(grid)
    if args.format == "csv":
        for row in mass:
            print(",".join(repr(v) for v in row))
        return EXIT_OK
    report = {
        "schema": SCHEMA,
        "u_breaks": grid.u_breaks.tolist(),
        "y_atoms": grid.y_atoms.tolist(),
        "G": grid.G.tolist(),
        "si_mass": mass.tolist(),
    }
    _emit(report, args)
    return EXIT_OK


def cmd_bernoulli(args) -> int:
    params = models.BernoulliParams(args.p, args.q, args.alpha, args.beta)
    report = {
        "schema": SCHEMA,
        "classification": sorted(models.bernoulli_classify(params)),
        "model": model_to_json(models.bernoulli_to_model(params)),
    }
    if args.p2 is not None:
        other = models.BernoulliParams(args.p2, args.q2, args.alpha2, args.beta2)
        closed = models.bernoulli_ccx(params, other)
        engine = ccx.ccx_compare(models.bernoulli_to_model(params), models.bernoulli_to_model(other), args.tol)
        report["compare"] = {"closed_form": str(closed.verdict), "engine": str(engine.verdict)}
    _emit(report, args)
    return EXIT_OK


def cmd_gaussian(args) -> int:
    with open(args.spec, encoding="utf-8") as fh:
        obj = json.load(fh)
    spec = models.GaussianSpec(obj["mean"], obj["cov"])
    report = {"schema": SCHEMA, "r2": models.gaussian_r2(spec)}
    if args.spec2 is not None:
        with open(args.spec2, encoding="utf-8") as fh:
            obj2 = json.load(fh)
        spec2 = models.GaussianSpec(obj2["mean"], obj2["cov"])
        report["r2_other"] = models.gaussian_r2(spec2)
        report["verdict"] = str(models.gaussian_ccx(spec, spec2, args.tol).verdict)
    if args.discretize:
        model = models.gaussian_discretize(spec, n_cells=args.grid, n_levels=args.levels, seed=args.seed)
        report["model"] = model_to_json(model)
    _emit(report, args)
    return EXIT_OK


def cmd_simulate_additive(args) -> int:
    def law(atoms_text, probs_text, name):
        atoms = [float(t) for t in atoms_text.split(",")]
        probs = [float(t) for t in probs_text.split(",")]
        try:
            return DiscreteMarginal(atoms, probs)
        except DepordError as err:
            raise DomainError(f"invalid {name} law: {err}") from None

    f_values = law(args.f_atoms, args.f_probs, "f(X)")
    eps = law(args.eps_atoms, args.eps_probs, "epsilon")
    sigmas = [float(t) for t in args.sigmas.split(",")]
    results = models.additive_error_verify(f_values, eps, sigmas, n_levels=args.levels, tol=args.tol)
    report = {
        "schema": SCHEMA,
        "sigmas": sigmas,
        "pairs": [
            {"sigma_low": sigmas[i], "sigma_high": sigmas[i + 1], "verdict": str(res.verdict)}
            for i, res in enumerate(results)
        ],
    }
    _emit(report, args)
    return EXIT_OK


def cmd_plotdata(args) -> int:
    model = load_model(args.source, args)
    from .dist_core import StepFunction

    print("level,x,integral")
    for j in range(model.n_atoms - 1):
        v = model.y_marginal.cdf_values[j]
        f = StepFunction.from_weights(model.cond_cdf[j], model.cell_weights)
        g = rearrange.decreasing_rearrangement(f)
        cum = np.concatenate(([0.0], np.cumsum(g.widths * g.values)))
        for x, val in zip(g.breakpoints, cum):
            print(f"{v!r},{x!r},{val!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depord",
        description="Decide the conditional convex order between dependence models "
        "and compute the dependence measures monotone in it.",
    )
    default_threads = int(os.environ.get("DEPORD_THREADS", "0") or 0)
    parser.add_argument("--tol", type=float, default=1e-9, help="comparison tolerance")
    parser.add_argument("--grid", type=int, default=50, help="predictor cells for ingestion/discretization")
    parser.add_argument("--levels", type=int, default=50, help="response levels for discretization")
    parser.add_argument("--seed", type=int, default=0, help="seed for Monte Carlo paths")
    parser.add_argument(
        "--threads", type=int, default=default_threads,
        help="thread budget hint (results are identical for any value)",
    )
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="decide the order between two models")
    p.add_argument("source_a")
    p.add_argument("source_b")
    p.add_argument("--engine", choices=("schur", "concordance", "brute", "all"), default="all")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("measure", help="evaluate a dependence measure")
    p.add_argument("source")
    p.add_argument(
        "--measure",
        required=True,
        choices=("xi", "xi-phi", "lambda-phi", "nu", "rho-rearranged", "tau-rearranged", "gamma-rearranged"),
    )
    p.add_argument("--phi", default="square", help="square | abs | power:K")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("reduce", help="emit the bivariate SI reduction of a model")
    p.add_argument("source")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("bernoulli", help="classify and optionally compare Bernoulli models")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--p2", type=float)
    p.add_argument("--q2", type=float)
    p.add_argument("--alpha2", type=float)
    p.add_argument("--beta2", type=float)
    p.set_defaults(func=cmd_bernoulli)

    p = sub.add_parser("gaussian", help="explained variance and order for normal models")
    p.add_argument("--spec", required=True, help="JSON file {mean: [...], cov: [[...]]}")
    p.add_argument("--spec2", help="second spec to compare against")
    p.add_argument("--discretize", action="store_true", help="also emit the checkerboard model")
    p.set_defaults(func=cmd_gaussian)

    p = sub.add_parser("simulate-additive", help="verify the additive-error ordering across sigmas")
    p.add_argument("--f-atoms", required=True, help="comma-separated atoms of f(X)")
    p.add_argument("--f-probs", required=True)
    p.add_argument("--eps-atoms", required=True)
    p.add_argument("--eps-probs", required=True)
    p.add_argument("--sigmas", required=True, help="ascending comma-separated noise scales")
    p.set_defaults(func=cmd_simulate_additive)

    p = sub.add_parser("plotdata", help="integrated rearrangement curves per level, CSV")
    p.add_argument("source")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DepordError, OSError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
