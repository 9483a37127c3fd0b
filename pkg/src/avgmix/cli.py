"""Command-line front end: `mix <exact|estimate|bounds|experiment|family>`."""

import argparse
import json
import math
import sys

import numpy as np

from . import bounds as bnd
from . import estimation as est
from . import families as fam
from . import io as mio
from . import mixing as mx
from .chain import stationary_distribution
from .errors import BoundViolationError, ConfigError, MixError
from .experiments import run_experiment


def _parse_kv(text):
    out = {}
    for part in text.split(","):
        if not part:
            continue
        key, _, val = part.partition("=")
        if not _:
            raise ConfigError(f"expected key=value, got {part!r}")
        out[key] = val
    return out


def parse_chain(spec):
    """Chain specs: 'two_point:p=..,q=..', 'chebyshev:theta=..,lambda=..,K=..',
    'file:path.json', 'family_file:path.json', or a bare path to a chain file."""
    if spec.startswith("file:"):
        return mio.load_chain_file(spec[5:])
    if spec.startswith("family_file:"):
        with open(spec[12:], encoding="utf-8") as f:
            return fam.build_family(json.load(f))["P"]
    if ":" in spec:
        family, _, rest = spec.partition(":")
        kv = _parse_kv(rest)
        if family == "two_point":
            return fam.TwoPointChain(float(kv["p"]), float(kv["q"])).matrix()
        if family == "chebyshev":
            cs = fam.ChebyshevSpec(float(kv["theta"]), float(kv["lambda"]), int(kv["K"]))
            return fam.chebyshev_chain(cs)["P"]
        raise ConfigError(f"unknown chain family {family!r}")
    return mio.load_chain_file(spec)


def _grid(text, cast=float):
    return [cast(v) for v in str(text).split(",")]


def _emit(args, rows, header_lines):
    fmt = getattr(args, "format", "json") or "json"
    out = getattr(args, "output", None)
    if out:
        if fmt == "csv":
            mio.write_csv(out, rows, header_lines)
        else:
            mio.write_json(out, {"meta": list(header_lines), "rows": rows})
    else:
        print(json.dumps(mio._jsonable({"meta": list(header_lines), "rows": rows}),
                         indent=2))


def cmd_exact(args):
    P = parse_chain(args.chain)
    pi = stationary_distribution(P)
    rep = mx.mixing_times(P, pi, args.xi, args.tcap)
    payload = {
        "xi": args.xi,
        "t_mix": None if not math.isfinite(rep.t_mix) else int(rep.t_mix),
        "t_sharp": None if not math.isfinite(rep.t_sharp) else int(rep.t_sharp),
    }
    if args.profile:
        d = mx.exact_worst_distance(P, pi, args.tcap)
        rows = [{"t": t, "beta": float(rep.beta_profile.values[t]), "d": float(d[t])}
                for t in range(args.tcap + 1)]
        _emit(args, rows, [f"exact beta/d profile, xi={args.xi}", json.dumps(payload)])
    else:
        _emit(args, [payload], ["exact mixing times"])
    return 0


def cmd_estimate(args):
    P = parse_chain(args.chain)
    traj = est.sample_trajectory(P, "stationary", args.n, args.seed)
    result = {"n": args.n, "seed": args.seed}
    if args.s is not None:
        result["beta_hat"] = est.beta_hat_at(traj, args.s, P.size).beta_hat
        result["s"] = args.s
    if args.xi is not None:
        t_hat = est.avg_mixing_time_hat(traj, args.xi, P.size)
        result["t_sharp_hat"] = t_hat
        result["warning_nonconverged"] = bool(t_hat >= traj.n)
        if args.eps is not None:
            result.update(est.confidence_interval(traj, args.xi, args.eps, P.size))
    _emit(args, [result], ["single-trajectory estimates"])
    return 0


def cmd_bounds(args):
    name = args.bound
    if name == "atmix":
        if args.mode in ("uniform", "finite"):
            params = {"t_mix": args.tmix}
            if args.mode == "uniform":
                params["j_inf"] = args.jinf
            else:
                params["size"] = args.size
            n = bnd.atmix_sample_size(args.mode, args.xi, args.eps, args.delta, params)
        else:
            P = parse_chain(args.chain)
            pi = stationary_distribution(P)

            def t_sharp_fn(xi):
                rep = mx.mixing_times(P, pi, xi, 1000000)
                if not math.isfinite(rep.t_sharp):
                    raise ConfigError("threshold not reached under the cap")
                return int(rep.t_sharp)

            horizon = est._profile_horizon(P, pi)
            profile = mx.exact_beta(P, pi, horizon)

            def bp_of_p(p):
                return bnd.bp_direct_sum(profile.values, p, 1, horizon + 1)

            def jp_of_p(p):
                return mx.entropic_sup(P, pi, args.xi * (1 - args.eps), p)

            n = bnd.atmix_sample_size(
                "ergodic", args.xi, args.eps, args.delta,
                {"t_sharp_fn": t_sharp_fn, "bp_of_p": bp_of_p, "jp_of_p": jp_of_p},
            )
        _emit(args, [{"bound": "atmix", "mode": args.mode, "n": n}],
              ["trajectory length for the mixing-time estimate window"])
        return 0
    if name == "mad-uniform":
        res = bnd.mad_and_pac_uniform(args.eps, args.delta, args.s, args.tmix,
                                      args.jinf, args.n)
        _emit(args, [res], ["uniform-ergodic MAD bound and PAC length"])
        return 0
    if name == "bp":
        model = bnd.RateModel(args.kind, args.beta0, args.beta1, args.b)
        val = bnd.bp_bound(model, args.p, args.s)
        _emit(args, [{"bound": "bp", "value": val}], ["partial-sum envelope B_p"])
        return 0
    raise ConfigError(f"unknown bound {name!r}")


def cmd_experiment(args):
    P = parse_chain(args.chain) if args.chain else None
    params = dict(args.params or {})
    for key in ("xi", "eps", "delta"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    if args.s is not None:
        params["s"] = args.s
    if args.n is not None:
        grid = _grid(args.n, int)
        params["n"] = grid if args.name == "mad" else grid[0]
    if args.replicas is not None:
        params["replicas"] = args.replicas
    if args.M is not None:
        params["M"] = args.M
    rows, header = run_experiment(args.name, P, params, args.seed)
    header = [*header, f"command=mix experiment {args.name}"]
    _emit(args, rows, header)
    return 0


def cmd_family(args):
    with open(args.spec, encoding="utf-8") as f:
        built = fam.build_family(json.load(f))
    if args.output:
        mio.write_json(args.output, mio.chain_to_json(built["P"]))
    info = {k: v for k, v in built.items()
            if k in ("family", "tail_mass", "repaired_mass")}
    info["size"] = built["P"].size
    print(json.dumps(mio._jsonable(info), indent=2))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="mix",
                                 description="mixing-time computation toolkit")
    ap.add_argument("--config", help="JSON file mirroring the flags")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact mixing profile and times")
    p.add_argument("--chain", required=True)
    p.add_argument("--xi", type=float, default=0.25)
    p.add_argument("--tcap", type=int, default=10000)
    p.add_argument("--profile", action="store_true")
    _output_flags(p)
    p.set_defaults(fn=cmd_exact)

    p = sub.add_parser("estimate", help="single-trajectory estimators")
    p.add_argument("--chain", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--s", type=int)
    p.add_argument("--xi", type=float)
    p.add_argument("--eps", type=float)
    _output_flags(p)
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("bounds", help="closed-form bound calculators")
    p.add_argument("bound", choices=["atmix", "mad-uniform", "bp"])
    p.add_argument("--mode", choices=["ergodic", "uniform", "finite"],
                   default="finite")
    p.add_argument("--chain")
    p.add_argument("--xi", type=float, default=0.1)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--tmix", type=int, default=1)
    p.add_argument("--size", type=int, default=2)
    p.add_argument("--jinf", type=float, default=1.0)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--kind", default="exponential")
    p.add_argument("--beta0", type=float, default=1.0)
    p.add_argument("--beta1", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--p", type=float, default=2.0)
    _output_flags(p)
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("experiment", help="seeded validation experiments")
    p.add_argument("name", choices=["mad", "coverage", "deviation", "sandwich",
                                    "gap-search", "bound-table"])
    p.add_argument("--chain")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--xi", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--s", type=int)
    p.add_argument("--n")
    p.add_argument("--replicas", type=int)
    p.add_argument("--M", type=float)
    p.add_argument("--params", type=json.loads,
                   help="extra parameters as inline JSON")
    _output_flags(p)
    p.set_defaults(fn=cmd_experiment)

    p = sub.add_parser("family", help="build a chain from a family spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_family)
    return ap


def _output_flags(p):
    p.add_argument("--output")
    p.add_argument("--format", choices=["csv", "json"], default="json")


def _apply_config(args, path):
    with open(path, encoding="utf-8") as f:
        cfg = json.load(f)
    for key, val in cfg.items():
        attr = key.replace("-", "_")
        if getattr(args, attr, None) is None:
            setattr(args, attr, val)


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.config:
            _apply_config(args, args.config)
        return args.fn(args)
    except BoundViolationError as e:
        print(f"bound violated: {e}", file=sys.stderr)
        if e.row is not None:
            print(json.dumps(mio._jsonable(e.row)), file=sys.stderr)
        return 2
    except (MixError, OSError, json.JSONDecodeError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
