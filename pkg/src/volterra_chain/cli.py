"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 bad input, 3 chain invariant
violated, 4 integration failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import flow, hill, lattice, reconstruct, symm_poly, verify
from .errors import ChainInvariantError, DegeneracyError, IntegrationError, ReconstructionError

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_INVARIANT, EXIT_RUNTIME = 0, 1, 2, 3, 4

EVOLVE_HELP = """\
CSV columns, in order:
  t, u_1 .. u_N
  direct:   sum_drift, prod_drift      (relative to t = 0)
  spectral: mu_<j>_<k>                 gap j = 1..N-1 inner, shift k = 0..N-1 outer
            sigma_<j>_<k>              same order
            gap_lo_<j>, gap_hi_<j>     gap edges (constant in time)
            sum_drift, zero_sum, min_a2
"""


class InputError(Exception):
    pass


def _fmt(x) -> str:
    return repr(float(x))


def load_chain(path) -> lattice.ChainState:
    """Parse chain JSON (``{"n": N, "u": [...]}`` or ``{"n": N, "a": [...]}``)."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read chain JSON {path}: {exc}") from exc
    return chain_from_dict(data)


def chain_from_dict(data) -> lattice.ChainState:
    if not isinstance(data, dict):
        raise InputError("chain JSON must be an object")
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise InputError("field 'n' must be an integer >= 2")
    keys = [k for k in ("u", "a") if k in data]
    if len(keys) != 1:
        raise InputError("give exactly one of 'u' or 'a'")
    key = keys[0]
    values = data[key]
    if not isinstance(values, list) or len(values) != n:
        raise InputError(f"field '{key}' must be a list of n = {n} numbers")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise InputError(f"field '{key}' must contain only numbers")
    try:
        if key == "u":
            return lattice.ChainState(np.array(values, dtype=float))
        return lattice.ChainState.from_a(np.array(values, dtype=float))
    except ChainInvariantError as exc:
        raise ChainInvariantError(f"field '{key}': {exc}") from exc


def random_chain(n: int, seed: int) -> lattice.ChainState:
    rng = np.random.default_rng(seed)
    return lattice.ChainState(rng.uniform(0.5, 2.0, n))


def spectrum_dict(state: lattice.ChainState) -> dict:
    a = state.a
    spectrum = hill.periodic_spectrum(a)
    aux = hill.aux_spectra(a)
    return {
        "n": state.N,
        "lambda": [float(x) for x in spectrum.lam],
        "gaps": [{"lo": g.lo, "hi": g.hi, "closed": g.closed} for g in spectrum.gaps],
        "mu": [[float(x) for x in s.mu] for s in aux],
        "sigma": [[int(x) for x in s.sigma] for s in aux],
    }


def _write_text(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    _write_text(path, "\n".join(lines) + "\n")


def cmd_spectrum(args) -> int:
    state = load_chain(args.input)
    _write_text(args.output, json.dumps(spectrum_dict(state), indent=2) + "\n")
    return EXIT_OK


def _check_times(args):
    if not args.dt > 0:
        raise InputError("--dt must be positive")
    if not args.t_end > 0:
        raise InputError("--t-end must be positive")
    if args.sample_every < 1:
        raise InputError("--sample-every must be >= 1")


def cmd_evolve(args) -> int:
    _check_times(args)
    state = load_chain(args.input)
    N = state.N
    header = ["t"] + [f"u_{n}" for n in range(1, N + 1)]
    if args.method == "direct":
        traj = lattice.integrate_direct(state, args.t_end, args.dt, args.sample_every)
        header += ["sum_drift", "prod_drift"]
        rows = [
            [t, *u, sd, pd]
            for t, u, sd, pd in zip(traj.times, traj.u, traj.sum_drift, traj.prod_drift)
        ]
    else:
        traj = flow.evolve_spectral(state, args.t_end, args.dt, args.sample_every)
        spectrum = traj.spectrum
        pairs = [(j, k) for k in range(N) for j in range(N - 1)]
        header += [f"mu_{j + 1}_{k}" for j, k in pairs]
        header += [f"sigma_{j + 1}_{k}" for j, k in pairs]
        header += [f"gap_lo_{j}" for j in range(1, N)] + [f"gap_hi_{j}" for j in range(1, N)]
        header += ["sum_drift", "zero_sum", "min_a2"]
        lo = [g.lo for g in spectrum.gaps]
        hi = [g.hi for g in spectrum.gaps]
        sum0 = float(state.u.sum())
        rows = []
        for i, t in enumerate(traj.times):
            rep = reconstruct.reconstruct_general(spectrum, traj.aux_at(i))
            mu = [traj.mu[i, k, j] for j, k in pairs]
            sg = [traj.sigma[i, k, j] for j, k in pairs]
            zero_sum = float(np.max(np.abs(traj.mu[i].sum(axis=1))))
            drift = abs(rep.u.sum() - sum0) / sum0
            rows.append([t, *rep.u, *mu, *sg, *lo, *hi, drift, zero_sum, rep.min_a2])
    _write_csv(args.output, header, rows)
    return EXIT_OK


def _parse_flip(text: str) -> tuple[int, int]:
    try:
        j, k = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected j,k got {text!r}") from exc
    if j < 1:
        raise argparse.ArgumentTypeError("gap index j is 1-based")
    return j, k


def cmd_verify(args) -> int:
    _check_times(args)
    if args.input is not None:
        state = load_chain(args.input)
    elif args.seed is not None:
        state = random_chain(args.n, args.seed)
    else:
        raise InputError("give --input or --seed")
    N = state.N
    flips = []
    for j, k in args.flip_sigma or []:
        if j > N - 1 or not 0 <= k < N:
            raise InputError(f"--flip-sigma {j},{k} out of range for N = {N}")
        flips.append((j - 1, k))
    report = verify.end_to_end(state, args.t_end, args.dt, args.sample_every, flips)
    _write_text(args.output, report.to_json())
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name}: {c.max_residual:.3e} (tol {c.tolerance:.1e})", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_CHECK


def _random_nodes(count: int, mode: str, rng: random.Random):
    nodes = []
    while len(nodes) < count:
        if mode == "exact":
            x = Fraction(rng.randint(1, 200), rng.randint(1, 20)) * rng.choice((-1, 1))
        else:
            x = rng.uniform(0.1, 10.0) * rng.choice((-1.0, 1.0))
        if x not in nodes:
            nodes.append(x)
    return nodes


def lemma_sweep(n: int, s_min: int, s_max: int, trials: int, seed: int, mode: str):
    """Residuals of the closed-form power sums over random node sets.

    Yields ``(s, max_residual, max_term, value, ok)`` per exponent. In exact
    mode ``ok`` means the residual is exactly zero; in float mode it means
    ``residual <= 1e-9 * (1 + max_term)``.
    """
    rng = random.Random(seed)
    node_sets = [_random_nodes(n + 1, mode, rng) for _ in range(trials)]
    for s in range(s_min, s_max + 1):
        worst = 0
        worst_term = 0.0
        ok = True
        value = None
        for x in node_sets:
            terms = symm_poly.lagrange_terms(s, x)
            direct = sum(terms)
            value = symm_poly.lagrange_closed_form(s, x)
            res = abs(direct - value)
            max_term = float(max(abs(v) for v in terms))
            worst = max(worst, res)
            worst_term = max(worst_term, max_term)
            if mode == "exact":
                ok = ok and res == 0
            else:
                ok = ok and res <= 1e-9 * (1 + max_term)
        yield s, worst, worst_term, value, ok


def cmd_lemma(args) -> int:
    if args.n < 1 or args.trials < 1 or args.s_min > args.s_max:
        raise InputError("need n >= 1, trials >= 1 and s-min <= s-max")
    all_ok = True
    print("n,s,max_residual,max_term,value,ok")
    for s, res, term, value, ok in lemma_sweep(
        args.n, args.s_min, args.s_max, args.trials, args.seed, args.mode
    ):
        all_ok = all_ok and ok
        shown = str(value) if args.mode == "exact" and s >= 0 and s <= args.n else _fmt(value)
        print(f"{args.n},{s},{_fmt(res)},{_fmt(term)},{shown},{int(ok)}")
    return EXIT_OK if all_ok else EXIT_CHECK


def _read_csv(path):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 2:
        raise InputError(f"{path} has no data rows")
    header = rows[0]
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        raise InputError(f"non-numeric value in {path}: {exc}") from exc
    return header, data


def cmd_plot(args) -> int:
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    header, data = _read_csv(args.input)
    col = {name: i for i, name in enumerate(header)}
    if "t" not in col:
        raise InputError("missing column 't'")
    t = data[:, col["t"]]
    matplotlib.rcParams["svg.hashsalt"] = "volterra-chain"
    fig, ax = plt.subplots(figsize=(7, 4))
    if args.what == "u":
        names = [h for h in header if h.startswith("u_")]
        if not names:
            raise InputError("no u_<n> columns")
        for name in names:
            ax.plot(t, data[:, col[name]], label=name)
        ax.set_ylabel("u")
    else:
        j = 1
        found = False
        while f"mu_{j}_0" in col:
            if f"gap_lo_{j}" not in col or f"gap_hi_{j}" not in col:
                raise InputError(f"missing gap_lo_{j}/gap_hi_{j} columns")
            mu = data[:, col[f"mu_{j}_0"]]
            lo = data[:, col[f"gap_lo_{j}"]]
            hi = data[:, col[f"gap_hi_{j}"]]
            slack = 1e-9 * max(1.0, float(np.max(np.abs(hi))))
            if np.any(mu < lo - slack) or np.any(mu > hi + slack):
                raise InputError(f"mu_{j}_0 leaves its gap; refusing to plot")
            ax.fill_between(t, lo, hi, alpha=0.2)
            ax.plot(t, mu, label=f"mu_{j}")
            found = True
            j += 1
        if not found:
            raise InputError("no mu_<j>_0 columns (run evolve --method spectral)")
        ax.set_ylabel("mu (shift 0)")
    ax.set_xlabel("t")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(args.output, format="svg", metadata={"Date": None})
    plt.close(fig)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="volterra-chain", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="periodic/antiperiodic and Dirichlet spectra as JSON")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", default="-")
    sp.set_defaults(func=cmd_spectrum)

    ev = sub.add_parser(
        "evolve",
        help="integrate the chain and write a CSV trajectory",
        epilog=EVOLVE_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ev.add_argument("--input", required=True)
    ev.add_argument("--method", choices=("direct", "spectral"), default="direct")
    ev.add_argument("--t-end", type=float, default=1.0)
    ev.add_argument("--dt", type=float, default=1e-3)
    ev.add_argument("--sample-every", type=int, default=10)
    ev.add_argument("--output", default="-")
    ev.set_defaults(func=cmd_evolve)

    vf = sub.add_parser("verify", help="cross-validate direct and spectral evolution")
    vf.add_argument("--input")
    vf.add_argument("--seed", type=int, help="random chain with u in [0.5, 2] instead of --input")
    vf.add_argument("--n", type=int, default=4, help="period of the random chain")
    vf.add_argument("--t-end", type=float, default=1.0)
    vf.add_argument("--dt", type=float, default=1e-3)
    vf.add_argument("--sample-every", type=int, default=10)
    vf.add_argument("--output", default="-", help="JSON report path")
    vf.add_argument(
        "--flip-sigma",
        type=_parse_flip,
        action="append",
        metavar="J,K",
        help="test hook: reverse the initial sign of gap J (1-based) at shift K",
    )
    vf.set_defaults(func=cmd_verify)

    lm = sub.add_parser("lemma", help="sweep the closed-form power-sum identities")
    lm.add_argument("--n", type=int, default=3, help="nodes are x_0..x_n")
    lm.add_argument("--s-min", type=int, default=-6)
    lm.add_argument("--s-max", type=int, default=None, help="default n + 6")
    lm.add_argument("--trials", type=int, default=20)
    lm.add_argument("--seed", type=int, default=0)
    lm.add_argument("--mode", choices=("exact", "float"), default="exact")
    lm.set_defaults(func=cmd_lemma)

    pl = sub.add_parser("plot", help="static SVG chart of a trajectory CSV")
    pl.add_argument("--input", required=True)
    pl.add_argument("--output", required=True)
    pl.add_argument("--what", choices=("u", "mu"), default="u")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "s_max", 0) is None:
        args.s_max = args.n + 6
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ChainInvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (IntegrationError, DegeneracyError) as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ReconstructionError as exc:
        print(f"check failure: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
