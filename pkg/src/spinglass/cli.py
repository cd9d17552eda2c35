"""Command-line entry point: ``spinglass <command> [options]``.

Every command writes CSV (header row, 17 significant digits) or JSON to
``--out`` (stdout by default). When ``--out`` names a file, a manifest with
the full configuration, package version, wall time and SHA-256 checksums is
written next to it as ``<out>.manifest.json``.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import CapabilityError, NoSolutionError, SpinGlassError
from .numerics import RngStream

EXIT_CHECK_FAILED = 1
EXIT_CAPABILITY = 2


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def _render(header: list, rows: list, payload: dict | None, fmt: str) -> str:
    if fmt == "json":
        body = payload if payload is not None else {"columns": header, "rows": rows}
        return json.dumps(_jsonable(body), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


def _emit(ctx: click.Context, command: str, config: dict, header: list, rows: list, payload: dict | None = None):
    obj = ctx.obj
    text = _render(header, rows, payload, obj["format"])
    out = obj["out"]
    if out in (None, "-"):
        click.echo(text, nl=False)
        return
    path = Path(out)
    path.write_text(text)
    manifest = {
        "command": command,
        "config": _jsonable({**config, "seed": obj["seed"], "format": obj["format"]}),
        "version": __version__,
        "wall_time_s": time.perf_counter() - obj["t0"],
        "outputs": {path.name: hashlib.sha256(text.encode()).hexdigest()},
    }
    Path(str(path) + ".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _linspace(lo: float, hi: float, num: int, name: str) -> np.ndarray:
    if num < 1 or (num > 1 and not hi > lo) or lo < 0:
        raise click.UsageError(f"invalid {name} range [{lo}, {hi}] with {num} points")
    return np.linspace(lo, hi, num) if num > 1 else np.array([lo])


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--seed", default=0, show_default=True, type=int, help="Root seed for every random stream.")
@click.option("--out", default="-", show_default=True, help="Output file ('-' for stdout).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--threads", default=1, show_default=True, type=click.IntRange(1), help="Worker threads for sweeps.")
@click.version_option(__version__)
@click.pass_context
def cli(ctx, seed, out, fmt, threads):
    """Numerical experiments on mean-field spin glasses."""
    ctx.obj = {"seed": seed, "out": out, "format": fmt, "threads": threads, "t0": time.perf_counter()}


def _pmap(ctx, fn, items):
    threads = ctx.obj["threads"]
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@cli.command("phase-diagram")
@click.option("--model", type=click.Choice(["pspin-k2", "sk"]), default="pspin-k2", show_default=True)
@click.option("--beta-min", type=float, required=True)
@click.option("--beta-max", type=float, default=None)
@click.option("--beta-num", type=int, default=1, show_default=True)
@click.option("--lambda-min", "lam_min", type=float, required=True)
@click.option("--lambda-max", "lam_max", type=float, default=None)
@click.option("--lambda-num", "lam_num", type=int, default=1, show_default=True)
@click.pass_context
def phase_diagram(ctx, model, beta_min, beta_max, beta_num, lam_min, lam_max, lam_num):
    """Phase labels and order parameters on a (beta, lambda) grid.

    Columns: beta, lambda, phase (P, SG or R), b, q, psi.
    """
    from .pspin import PSpinParams, RsPoint, k2_phase, psi_rs
    from .sk import SkParams, sk_psi_rs, sk_solve_rs

    betas = _linspace(beta_min, beta_max if beta_max is not None else beta_min, beta_num, "beta")
    lams = _linspace(lam_min, lam_max if lam_max is not None else lam_min, lam_num, "lambda")

    def row(pair):
        beta, lam = pair
        if model == "pspin-k2":
            label, pt = k2_phase(beta, lam)
            psi = psi_rs(RsPoint(pt.b, pt.q), PSpinParams(k=2, beta=beta, lam=lam))
            return [beta, lam, label.value, pt.b, pt.q, psi]
        params = SkParams(beta=beta, lam=lam)
        pt = sk_solve_rs(params)
        label = "P" if pt.q < 1e-8 else ("R" if abs(pt.b) > 1e-6 else "SG")
        return [beta, lam, label, pt.b, pt.q, sk_psi_rs(pt.b, pt.q, params)]

    grid = [(float(b), float(l)) for b in betas for l in lams]
    rows = _pmap(ctx, row, grid)
    cfg = dict(model=model, betas=betas, lambdas=lams)
    _emit(ctx, "phase-diagram", cfg, ["beta", "lambda", "phase", "b", "q", "psi"], rows)


@cli.command("fixed-point")
@click.option("--model", type=click.Choice(["pspin", "sk"]), default="sk", show_default=True)
@click.option("--k", type=int, default=2, show_default=True, help="Tensor order (pspin only).")
@click.option("--beta", type=float, required=True)
@click.option("--lambda", "lam", type=float, default=0.0, show_default=True)
@click.option("--h", type=float, default=0.0, show_default=True, help="External field (sk only).")
@click.pass_context
def fixed_point(ctx, model, k, beta, lam, h):
    """Replica-symmetric fixed point. Columns: b, q, psi."""
    from .pspin import PSpinParams, psi_rs, solve_rs
    from .sk import SkParams, sk_psi_rs, sk_solve_rs

    if model == "pspin":
        params = PSpinParams(k=k, beta=beta, lam=lam)
        try:
            pt = solve_rs(params, branch="nontrivial")
        except NoSolutionError:
            pt = solve_rs(params, branch="trivial")
        psi = psi_rs(pt, params)
    else:
        params = SkParams(beta=beta, lam=lam, h=h)
        pt = sk_solve_rs(params)
        psi = sk_psi_rs(pt.b, pt.q, params)
    _emit(ctx, "fixed-point", dict(model=model, k=k, beta=beta, lam=lam, h=h), ["b", "q", "psi"], [[pt.b, pt.q, psi]])


@cli.command("complexity")
@click.option("--k", type=int, default=3, show_default=True)
@click.option("--x-min", type=float, default=0.0, show_default=True)
@click.option("--x-max", type=float, default=2.0, show_default=True)
@click.option("--num", type=int, default=201, show_default=True)
@click.pass_context
def complexity(ctx, k, x_min, x_max, num):
    """Annealed complexity S(x). Columns: x, S."""
    from .landscape import complexity_S

    if num < 2 or not x_max > x_min:
        raise click.UsageError("need num >= 2 and x_max > x_min")
    xs = np.linspace(x_min, x_max, num)
    s = complexity_S(xs, k)
    _emit(ctx, "complexity", dict(k=k, x_min=x_min, x_max=x_max, num=num), ["x", "S"], [[x, v] for x, v in zip(xs, s)])


@cli.command("monasson")
@click.option("--k", type=int, default=3, show_default=True)
@click.option("--T", "T", type=float, required=True)
@click.option("--num", type=int, default=200, show_default=True)
@click.pass_context
def monasson(ctx, k, T, num):
    """Complexity curve from the Legendre transform of m Psi(m). Columns: m, f, sigma."""
    from .pspin import m_lower, monasson_curve

    m_lo = m_lower(T, k)
    grid = np.linspace(m_lo, 1.0, num + 1)[1:]
    curve = monasson_curve(T, k, grid)
    rows = [[m, f, s] for m, (f, s) in zip(curve.m, curve.samples)]
    _emit(ctx, "monasson", dict(k=k, T=T, num=num), ["m", "f", "sigma"], rows)


@cli.command("parisi")
@click.option("--beta", type=float, required=True)
@click.option("--atoms", type=click.IntRange(1, 3), default=3, show_default=True)
@click.option("--nx", type=int, default=2049, show_default=True)
@click.option("--starts", type=int, default=8, show_default=True)
@click.pass_context
def parisi(ctx, beta, atoms, nx, starts):
    """Minimize the Parisi functional over measures with up to ``atoms`` atoms.

    JSON keys: beta, atoms, P, P_over_beta, measure (list of [q, weight]).
    Smaller atom counts are solved first and seed the larger ones.
    """
    from .parisi import PdeGrid, minimize_parisi

    grid = PdeGrid.default(beta, nx=nx)
    root = RngStream(ctx.obj["seed"], stream_id=8)
    fit = None
    for k in range(1, atoms + 1):
        fit = minimize_parisi(k, beta, grid, starts=starts, init=[fit.measure] if fit else None, rng=root.child(k))
    payload = {
        "beta": beta,
        "atoms": atoms,
        "P": fit.value,
        "P_over_beta": fit.value / beta,
        "measure": [list(a) for a in fit.measure.atoms],
    }
    _emit(ctx, "parisi", dict(beta=beta, atoms=atoms, nx=nx, starts=starts), ["beta", "atoms", "P", "P_over_beta"],
          [[beta, atoms, fit.value, fit.value / beta]], payload if ctx.obj["format"] == "json" else None)


@cli.command("amp-sim")
@click.option("--n", type=int, default=5000, show_default=True)
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--eps", type=float, default=0.3, show_default=True)
@click.option("--T", "T", type=int, default=10, show_default=True)
@click.option("--reps", type=int, default=10, show_default=True)
@click.pass_context
def amp_sim(ctx, n, lam, eps, T, reps):
    """Bayes AMP against state evolution, averaged over replicates.

    Columns: t, a_t, q_t, empirical_overlap, empirical_sqnorm, se_f_sqnorm,
    empirical_f_sqnorm. The overlap is (1/n)<x0, x_t>; the squared norms are
    (1/n)||x_t||^2 and (1/n)||tanh(lambda x_t)||^2.
    """
    from .amp import empirical_vs_se

    rep = empirical_vs_se(n, lam, eps, T, reps, RngStream(ctx.obj["seed"], stream_id=13))
    rows = [
        [t, rep.se.a[t], rep.se.q[t], rep.empirical["overlap"][t], rep.empirical["sqnorm"][t],
         rep.predicted["tanh2"][t], rep.empirical["tanh2"][t]]
        for t in range(T + 1)
    ]
    header = ["t", "a_t", "q_t", "empirical_overlap", "empirical_sqnorm", "se_f_sqnorm", "empirical_f_sqnorm"]
    _emit(ctx, "amp-sim", dict(n=n, lam=lam, eps=eps, T=T, reps=reps), header, rows)


@cli.command("maxcut")
@click.option("--kind", type=click.Choice(["er", "reg", "file"]), default="er", show_default=True)
@click.option("--n", type=int, default=16, show_default=True)
@click.option("--d", type=float, default=4.0, show_default=True)
@click.option("--graph-file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--method", type=click.Choice(["brute", "local-search", "random"]), default="local-search", show_default=True)
@click.option("--restarts", type=int, default=10, show_default=True)
@click.pass_context
def maxcut(ctx, kind, n, d, graph_file, method, restarts):
    """Cut a random or given graph. JSON keys: n, edges, method, cut_value, cut_per_vertex, prediction."""
    from .maxcut import er_graph, maxcut_bruteforce, maxcut_localsearch, maxcut_prediction, random_cut, read_edge_list, reg_graph

    root = RngStream(ctx.obj["seed"], stream_id=16)
    if kind == "file":
        if graph_file is None:
            raise click.UsageError("--graph-file is required with --kind file")
        g = read_edge_list(graph_file)
    elif kind == "er":
        g = er_graph(n, d, root.child(0))
    else:
        if d != int(d):
            raise click.UsageError("--d must be an integer for regular graphs")
        g = reg_graph(n, int(d), root.child(0))
    if method == "brute":
        res = maxcut_bruteforce(g)
    elif method == "local-search":
        res = maxcut_localsearch(g, restarts, root.child(1))
    else:
        res = random_cut(g, root.child(1))
    avg_deg = 2.0 * g.m / g.n
    payload = {
        "n": g.n,
        "edges": g.m,
        "method": res.method,
        "cut_value": res.cut_value,
        "cut_per_vertex": res.cut_value / g.n,
        "prediction": maxcut_prediction(avg_deg) if avg_deg > 0 else 0.0,
        "assignment": res.assignment.tolist(),
    }
    header = ["n", "edges", "method", "cut_value", "cut_per_vertex", "prediction"]
    _emit(ctx, "maxcut", dict(kind=kind, n=n, d=d, graph_file=graph_file, method=method, restarts=restarts), header,
          [[payload[h] for h in header]], payload if ctx.obj["format"] == "json" else None)


_CHECKS = ("guerra", "h-derivative", "immse", "pd-second-moment", "ppp-shift")


@cli.command("oracle-check")
@click.argument("check")
@click.option("--n", type=int, default=14, show_default=True)
@click.option("--beta", type=float, default=1.0, show_default=True)
@click.option("--lambda", "lam", type=float, default=1.0, show_default=True)
@click.option("--h", type=float, default=0.3, show_default=True)
@click.option("--reps", type=int, default=200, show_default=True)
@click.option("--m", "m", type=float, default=0.5, show_default=True)
@click.option("--sigma", type=float, default=1.0, show_default=True)
@click.option("--K", "K", type=int, default=10_000, show_default=True)
@click.pass_context
def oracle_check(ctx, check, n, beta, lam, h, reps, m, sigma, K):
    """Run an identity check and report a pass/fail verdict.

    CHECK is one of guerra, h-derivative, immse, pd-second-moment, ppp-shift.
    JSON keys: check, passed, margin, plus check-specific values. The exit
    code is 0 only when the check passes.
    """
    from . import oracle
    from .numerics import goe_sample
    from .sk import SkParams

    if check not in _CHECKS:
        raise click.UsageError(f"unknown check {check!r}; choose from {', '.join(_CHECKS)}")
    root = RngStream(ctx.obj["seed"], stream_id=20)
    if check == "guerra":
        r = oracle.guerra_rs_bound_mc(n, beta, reps, root)
        verdict = {"mean_phi_n": r.mean_phi_n, "bound": r.bound, "std_error": r.std_error,
                   "margin": r.margin_in_se, "passed": r.margin_in_se >= -3.0}
    elif check == "h-derivative":
        gen = root.child(0).generator()
        x0 = gen.choice(np.array([-1.0, 1.0]), size=n)
        dev = oracle.check_h_derivative(goe_sample(n, gen), SkParams(beta, lam, h), x0)
        verdict = {"deviation": dev, "margin": 1e-8 - dev, "passed": dev <= 1e-8}
    elif check == "immse":
        r = oracle.mutual_info_immse_check(n, lam, reps, root)
        z = abs(r.lhs - r.rhs) / r.se if r.se > 0 else math.inf
        verdict = {"lhs": r.lhs, "rhs": r.rhs, "se": r.se, "margin": 3.0 - z, "passed": r.passed}
    elif check == "pd-second-moment":
        est, se = oracle.pd_second_moment_mc(m, K, reps, root)
        z = abs(est - (1.0 - m)) / se
        verdict = {"estimate": est, "target": 1.0 - m, "se": se, "margin": 3.0 - z, "passed": z <= 3.0}
    else:
        lhs, rhs, se = oracle.ppp_shift_invariance_mc(m, sigma, K, reps, root)
        verdict = {"lhs": lhs, "rhs": rhs, "se": se, "margin": 0.02 - abs(lhs - rhs), "passed": abs(lhs - rhs) <= 0.02}
    verdict = {"check": check, **verdict}
    cfg = dict(check=check, n=n, beta=beta, lam=lam, h=h, reps=reps, m=m, sigma=sigma, K=K)
    header = ["check", "passed", "margin"]
    _emit(ctx, "oracle-check", cfg, header, [[check, verdict["passed"], verdict["margin"]]],
          verdict if ctx.obj["format"] == "json" else None)
    if not verdict["passed"]:
        ctx.exit(EXIT_CHECK_FAILED)


def main(argv=None):
    """Console entry point; maps capability errors to exit code 2."""
    try:
        cli.main(args=argv, prog_name="spinglass", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except CapabilityError as e:
        click.echo(f"capability error: {e}", err=True)
        return EXIT_CAPABILITY
    except SpinGlassError as e:
        click.echo(f"error: {e}", err=True)
        return 1
    except ValueError as e:
        click.echo(f"error: {e}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
