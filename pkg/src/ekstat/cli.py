"""Command-line front end: operator evaluation, Mellin factorization
checks, identity verification, and sampling.

Configuration resolves in three layers: built-in defaults, then a JSON
config file (``--config``), then explicit flags.  Every report embeds the
fully resolved configuration, and identical configurations with identical
seeds produce byte-identical reports apart from the timestamp line.

Exit codes: 0 success (and verification passed), 1 verification failure,
2 usage error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import mc_oracle, mellin
from .densities import (
    BetaParams,
    DirichletParams,
    GenDirichletParams,
    PathwayDimParams,
    beta1_sample,
    dirichlet1_sample,
    gen_dirichlet1_sample,
    pathway_sample,
)
from .errors import EkstatError, EvaluationError, PoleError, UsageError
from .kober import (
    DimParams,
    gamma_product,
    kober1_eval,
    kober2_eval,
    pathway_kober1_eval,
    pathway_kober2_eval,
)
from .reporting import dumps_csv, dumps_json, timestamp
from .streams import default_workers

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

_EVAL_FNS = {
    "second": kober2_eval,
    "first": kober1_eval,
    "pathway-second": pathway_kober2_eval,
    "pathway-first": pathway_kober1_eval,
}


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in str(text).split(",") if tok != "")
    except ValueError as exc:
        raise UsageError(f"cannot parse {text!r} as a comma-separated float list") from exc


def parse_density(spec: str, k: int):
    """Density spec of the form ``gamma:2,3`` (unit-rate product gammas)
    or ``exp`` (all shapes 1)."""
    spec = str(spec)
    if spec == "exp":
        return gamma_product((1.0,) * k)
    if spec.startswith("gamma:"):
        shapes = _floats(spec[len("gamma:"):])
        if len(shapes) != k:
            raise UsageError(f"density {spec!r} has {len(shapes)} shapes but k={k}")
        return gamma_product(shapes)
    raise UsageError(f"unknown density spec {spec!r}; use gamma:<shapes> or exp")


def _classical_params(cfg) -> tuple[DimParams, ...]:
    zetas, alphas = _floats(cfg["zeta"]), _floats(cfg["alpha"])
    if len(zetas) != cfg["k"] or len(alphas) != cfg["k"]:
        raise UsageError("--zeta and --alpha must list one value per dimension")
    return tuple(DimParams(z, a) for z, a in zip(zetas, alphas))


def _pathway_params(cfg) -> tuple[PathwayDimParams, ...]:
    fields = {name: _floats(cfg[name]) for name in ("a", "q", "eta", "zeta")}
    k = cfg["k"]
    if any(len(v) != k for v in fields.values()):
        raise UsageError("--a/--q/--eta/--zeta must list one value per dimension")
    return tuple(
        PathwayDimParams(fields["a"][j], fields["q"][j], fields["eta"][j], fields["zeta"][j])
        for j in range(k)
    )


def _write_report(cfg, payload: dict, rows=None, header=None) -> None:
    doc = {"config": {k: v for k, v in sorted(cfg.items()) if v is not None},
           "timestamp": timestamp(), "result": payload}
    if cfg.get("format", "json") == "csv":
        if rows is None:
            raise UsageError("this command has no CSV representation")
        text = dumps_csv(header, rows)
    else:
        text = dumps_json(doc)
    out = cfg.get("out")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_eval(cfg) -> int:
    kind = cfg["kind"]
    if kind not in _EVAL_FNS:
        raise UsageError(f"unknown operator kind {kind!r}")
    params = _pathway_params(cfg) if kind.startswith("pathway") else _classical_params(cfg)
    f = parse_density(cfg["density"], cfg["k"])
    points = [np.asarray(_floats(p)) for p in cfg["point"]]
    results = []
    for pt in points:
        if pt.size != cfg["k"]:
            raise UsageError(f"point {pt.tolist()} does not have k={cfg['k']} coordinates")
        res = _EVAL_FNS[kind](pt, params, f, n=cfg["nodes"])
        results.append({"point": pt.tolist(), "value": res.value,
                        "est_error": res.est_error, "n_nodes": res.n_nodes})
        print(f"value={res.value:.12g} est_error={res.est_error:.3g} at {pt.tolist()}",
              file=sys.stderr)
    header = [f"point_{j+1}" for j in range(cfg["k"])] + ["value", "est_error", "n_nodes"]
    rows = [list(r["point"]) + [r["value"], r["est_error"], r["n_nodes"]] for r in results]
    _write_report(cfg, {"evaluations": results}, rows, header)
    return EXIT_OK


def _cmd_mellin_check(cfg) -> int:
    params = _classical_params(cfg)
    f = parse_density(cfg["density"], cfg["k"])
    report = mellin.mellin_factorization_check(
        cfg["kind"], params, f, n=cfg["nodes"], tol=cfg["tol"]
    )
    header = (
        [f"s{j+1}_re" for j in range(cfg["k"])] + [f"s{j+1}_im" for j in range(cfg["k"])]
        + ["lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_err"]
    )
    rows = [
        [c.real for c in s] + [c.imag for c in s]
        + [l.real, l.imag, r.real, r.imag, e]
        for s, l, r, e in zip(report.s_points, report.lhs, report.rhs, report.rel_err)
    ]
    _write_report(cfg, report.to_dict(), rows, header)
    print(f"max relative error {report.max_rel_err:.3e} "
          f"({'pass' if report.passed else 'FAIL'} at tol {cfg['tol']:g})", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_verify(cfg) -> int:
    theorem, k = cfg["theorem"], cfg["k"]
    params = None
    if cfg.get("zeta") and cfg.get("alpha"):
        params = _classical_params(cfg)
    elif cfg.get("a"):
        params = _pathway_params(cfg)
    elif cfg.get("alphas"):
        alphas = _floats(cfg["alphas"])
        if cfg.get("betas"):
            params = GenDirichletParams(alphas=alphas, betas=_floats(cfg["betas"]))
        else:
            params = DirichletParams(alphas=alphas, alpha_last=cfg["alpha_last"])
    f = parse_density(cfg["density"], k) if cfg.get("density") else None
    spec = mc_oracle.make_spec(theorem, k, params=params, f=f)
    probes = [_floats(p) for p in cfg["probe"]] if cfg.get("probe") else None
    report = mc_oracle.verify(
        spec,
        probes=probes,
        n_samples=cfg["samples"],
        seed=cfg["seed"],
        n_nodes=cfg["nodes"],
        constant_scale=cfg["constant_scale"],
        workers=cfg["workers"],
    )
    header = (
        [f"probe_{j+1}" for j in range(k)]
        + ["empirical", "se", "predicted", "z"]
    )
    rows = [
        list(p) + [e, s, pr, zz]
        for p, e, s, pr, zz in zip(report.probes, report.empirical, report.se,
                                   report.predicted, report.z)
    ]
    _write_report(cfg, report.to_dict(), rows, header)
    verdict = "pass" if report.passed else "FAIL"
    print(f"theorem {theorem}: {verdict} (fraction within 4 SE "
          f"{report.fraction_within_4se:.2f}, max |z| {report.max_abs_z:.2f})",
          file=sys.stderr)
    if report.adjudication_notes:
        print(f"adjudication: {report.adjudication_notes}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_sample(cfg) -> int:
    family = str(cfg["family"])
    n, seed, workers = cfg["n"], cfg["seed"], cfg["workers"]
    name, _, arg = family.partition(":")
    if name == "beta":
        a, b = _floats(arg)
        sm = beta1_sample(BetaParams(a, b), n, seed, workers)
    elif name == "dirichlet":
        alphas_text, _, last_text = arg.partition(";")
        sm = dirichlet1_sample(
            DirichletParams(alphas=_floats(alphas_text), alpha_last=float(last_text)),
            n, seed, workers)
    elif name == "gen-dirichlet":
        alphas_text, _, betas_text = arg.partition(";")
        sm = gen_dirichlet1_sample(
            GenDirichletParams(alphas=_floats(alphas_text), betas=_floats(betas_text)),
            n, seed, workers)
    elif name == "pathway":
        a, q, eta, zeta = _floats(arg)
        sm = pathway_sample(PathwayDimParams(a, q, eta, zeta), n, seed, workers)
    elif name == "gamma":
        shapes = _floats(arg)
        sm = gamma_product(shapes).sample(n, seed, workers)
    else:
        raise UsageError(f"unknown family {family!r}")
    header = [f"x{j+1}" for j in range(sm.dim)]
    rows = sm.data.tolist()
    payload = {"family": family, "n": sm.n, "seed": sm.seed,
               "draws": [list(r) for r in sm.data]}
    _write_report(cfg, payload, rows, header)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

_DEFAULTS = {
    "nodes": 64,
    "format": "json",
    "seed": 0,
    "samples": 10**6,
    "n": 1000,
    "tol": 1e-6,
    "constant_scale": 1.0,
    "alpha_last": 1.0,
}


def _add_common(sp):
    sp.add_argument("--config", help="JSON file with defaults for any flag")
    sp.add_argument("--nodes", type=int, help="quadrature nodes per dimension")
    sp.add_argument("--format", choices=("json", "csv"), help="report format")
    sp.add_argument("--out", help="report path (stdout when omitted)")
    sp.add_argument("--workers", type=int, help="worker count (env EKSTAT_WORKERS)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ekstat",
        description="Multivariable fractional-integral operators with "
                    "statistical verification",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an operator at points")
    p.add_argument("--kind", required=True, choices=tuple(_EVAL_FNS))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--zeta")
    p.add_argument("--alpha")
    p.add_argument("--a")
    p.add_argument("--q")
    p.add_argument("--eta")
    p.add_argument("--density", default="gamma:2")
    p.add_argument("--point", action="append", required=True,
                   help="comma-separated coordinates; repeatable")
    _add_common(p)

    p = sub.add_parser("mellin-check", help="run the Mellin factorization check")
    p.add_argument("--kind", required=True, choices=("second", "first"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--zeta", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--density", default=None)
    p.add_argument("--tol", type=float)
    _add_common(p)

    p = sub.add_parser("verify", help="Monte Carlo verification of an identity")
    p.add_argument("--theorem", required=True, choices=mc_oracle.IDENTITY_IDS)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--constant-scale", dest="constant_scale", type=float,
                   help="multiply the density constant (negative control)")
    p.add_argument("--probe", action="append", help="probe point; repeatable")
    p.add_argument("--zeta")
    p.add_argument("--alpha")
    p.add_argument("--a")
    p.add_argument("--q")
    p.add_argument("--eta")
    p.add_argument("--alphas",
                   help="mixing-density power exponents (for theorems 2.4/2.5 "
                        "pass the catalogued parameters minus one)")
    p.add_argument("--alpha-last", dest="alpha_last", type=float)
    p.add_argument("--betas")
    p.add_argument("--density")
    _add_common(p)

    p = sub.add_parser("sample", help="draw from one of the density families")
    p.add_argument("--family", required=True,
                   help="beta:a,b | dirichlet:a1,..;last | gen-dirichlet:a1,..;b1,.. "
                        "| pathway:a,q,eta,zeta | gamma:shapes")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    _add_common(p)
    return ap


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags."""
    import json

    cfg = dict(_DEFAULTS)
    cfg["workers"] = default_workers()
    flags = {k: v for k, v in vars(args).items() if v is not None}
    path = flags.pop("config", None)
    if path:
        with open(path) as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise UsageError("config file must hold a JSON object")
        cfg.update(file_cfg)
    cfg.update(flags)
    return cfg


_COMMANDS = {
    "eval": _cmd_eval,
    "mellin-check": _cmd_mellin_check,
    "verify": _cmd_verify,
    "sample": _cmd_sample,
}


def run(argv=None) -> int:
    """Entry point returning the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = resolve_config(args)
        if cfg.get("command") == "mellin-check" and not cfg.get("density"):
            cfg["density"] = "gamma:" + ",".join(["2"] + [str(2 + j) for j in range(1, cfg["k"])])
        return _COMMANDS[args.command](cfg)
    except KeyError as exc:
        print(f"error: missing required option {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EvaluationError, PoleError, FloatingPointError, OverflowError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except EkstatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
