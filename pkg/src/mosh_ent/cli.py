"""Command-line front end: ``mosh-ent {eval,sweep,perturb,haar}``.

Exit codes: 0 success, 2 domain error, 3 convergence failure (including a
failed block fit), 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import model2e as m2
from . import model3e as m3
from . import perturbation as pt
from .common import ConvergenceError, DomainError, Interaction
from .oscillator import gauss_hermite

EXIT_OK, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_IO = 0, 2, 3, 4

SWEEP_VARIABLES = ("tau", "sigma", "theta", "p", "b")


def fmt(x) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    points: int
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise DomainError(f"variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        if not self.start < self.stop:
            raise DomainError(f"start ({self.start}) must be below stop ({self.stop})")
        if int(self.points) != self.points or self.points < 2:
            raise DomainError(f"points must be an integer >= 2, got {self.points!r}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.points))


@dataclass
class RunReport:
    command: str
    parameters: dict
    output: str = ""
    rows: int = 0
    max_convergence: float = 0.0
    wall_time: float = 0.0

    def lines(self):
        yield f"command: {self.command}"
        yield "parameters: " + ", ".join(f"{k}={v}" for k, v in self.parameters.items())
        if self.output:
            yield f"output: {self.output}"
        yield f"rows: {self.rows}"
        if self.max_convergence:
            yield f"max oracle convergence: {self.max_convergence:.3g}"
        yield f"wall time: {self.wall_time:.3f} s"


# ---------------------------------------------------------------------------
# model plumbing

def _params_3e(args, tau=None):
    tau = args.tau if tau is None else tau
    return m3.ModelParams3e(omega=args.omega, lam=tau * args.omega, sign=args.interaction)


def _params_2e(args, tau=None, sigma=None):
    tau = args.tau if tau is None else tau
    sigma = args.sigma if sigma is None else sigma
    return m2.ModelParams2e(omega=args.omega, lam=tau * args.omega, b=sigma * args.omega,
                            sign=args.interaction)


def _state(model: str, text: str, spin: str):
    if model == "3e":
        return m3.StateLabel3e.parse(text)
    return m2.StateLabel2e.parse(text, spin)


def _evaluate(model, state, params, method, order):
    """``(epsilon, convergence or None, closed, oracle)`` for one point."""
    closed = oracle = None
    conv = None
    if method in ("closed", "both"):
        closed = (m3.epsilon_closed_3e if model == "3e" else m2.epsilon_closed_2e)(state, params)
    if method in ("oracle", "both"):
        if model == "3e":
            rule = gauss_hermite(order, m3.default_scale(params)) if order else None
            res = m3.epsilon_oracle_3e(state, params, rule)
        else:
            rule = gauss_hermite(order, m2.default_scales(params)[0]) if order else None
            res = m2.epsilon_oracle_2e(state, params, rule)
        oracle, conv = res.value, res.convergence
    eps = closed if closed is not None else oracle
    return eps, conv, closed, oracle


def _energy(model, state, params):
    return (m3.energy_3e if model == "3e" else m2.energy_2e)(state, params)


# ---------------------------------------------------------------------------
# eval

def cmd_eval(args, out=None) -> int:
    out = sys.stdout if out is None else out
    if args.state is None:
        raise DomainError("--state is required")
    state = _state(args.model, args.state, args.spin)
    if args.model == "3e":
        params = _params_3e(args)
    else:
        params = _params_2e(args)
    print(f"model: {args.model}", file=out)
    print(f"state: {state}" + (f" ({state.spin.name.lower()})" if args.model == "2e" else ""), file=out)
    print(f"tau: {fmt(params.tau)}", file=out)
    if args.model == "2e":
        print(f"sigma: {fmt(params.sigma)}", file=out)
    print(f"interaction: {params.sign.name.lower()}", file=out)
    if args.theta is not None:
        if args.model != "3e":
            raise DomainError("--theta applies to the three-electron model only")
        rule = gauss_hermite(args.order, m3.default_scale(params)) if args.order else None
        eps = m3.epsilon_theta_mixture_3e(state, args.theta, params, rule)
        print(f"theta: {fmt(args.theta)}", file=out)
        print(f"epsilon: {fmt(eps)}", file=out)
        print("method: oracle", file=out)
    else:
        eps, conv, closed, oracle = _evaluate(args.model, state, params, args.method, args.order)
        if args.method == "both":
            print(f"epsilon (closed-form): {fmt(closed)}", file=out)
            print(f"epsilon (oracle): {fmt(oracle)}", file=out)
            print(f"discrepancy: {abs(closed - oracle):.3e}", file=out)
        else:
            print(f"epsilon: {fmt(eps)}", file=out)
            print(f"method: {'closed-form' if args.method == 'closed' else 'oracle'}", file=out)
        if conv is not None:
            print(f"oracle convergence: {conv:.3e}", file=out)
    print(f"energy: {fmt(_energy(args.model, state, params))}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep

def _sweep_point(task):
    """One CSV row's worth of work; module-level so it pickles for worker processes."""
    kind, model, state_text, spin, x, fixed, method, order, energy = task
    ns = argparse.Namespace(**fixed)
    if kind == "b":
        s_l, s_vn = m2.single_particle_entropies(ns.omega, x)
        value = s_l if state_text == "S_L" else s_vn
        return [x, state_text, value], None
    if kind == "p":
        return [x, state_text, pt.epsilon_mixture(x)], None
    state = _state(model, state_text, spin)
    if kind == "theta":
        params = _params_3e(ns)
        rule = gauss_hermite(order, m3.default_scale(params)) if order else None
        eps = m3.epsilon_theta_mixture_3e(state, x, params, rule)
        row = [x, str(state), eps]
        if energy:
            row.append(_energy(model, state, params))
        return row, None
    if model == "3e":
        params = _params_3e(ns, tau=x)
    elif kind == "tau":
        params = _params_2e(ns, tau=x)
    else:
        params = _params_2e(ns, sigma=x)
    eps, conv, _, _ = _evaluate(model, state, params, method, order)
    row = [x, str(state), eps]
    if energy:
        row.append(_energy(model, state, params))
    return row, conv


def _default_states(variable, model):
    if variable == "b":
        return ["S_L", "S_vN"]
    if variable == "p":
        return ["psi56"]
    if variable == "theta":
        return ["011", "110"]
    if model == "3e":
        return ["".join(map(str, q)) for q in m3.SUPPORTED_3E]
    return ["{}{}{},{}{}{}".format(*c, *r) for c, r in m2.SUPPORTED_2E]


def _resolve_workers(arg):
    if arg is not None:
        if arg < 1:
            raise DomainError(f"--workers must be positive, got {arg}")
        return arg
    return pt.default_workers()


def write_csv_atomic(path: str, header, rows):
    """Write rows to ``path`` via a temporary file in the same directory, renamed on success."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".mosh-ent-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_sweep(args, out=None) -> int:
    out = sys.stdout if out is None else out
    t0 = time.perf_counter()
    if args.out is None:
        raise DomainError("--out is required for sweep")
    fixed = {"omega": args.omega, "tau": args.tau, "sigma": args.sigma, "interaction": args.interaction}
    spec = SweepSpec(args.variable, args.start, args.stop, args.points, fixed)
    if spec.variable == "sigma" and args.model != "2e":
        raise DomainError("sigma sweeps need --model 2e")
    if spec.variable == "theta" and args.model != "3e":
        raise DomainError("theta sweeps need --model 3e")
    if spec.variable == "p" and not 0.0 <= spec.start < spec.stop <= 1.0:
        raise DomainError("p sweeps must stay inside [0, 1]")
    if spec.variable == "b" and spec.start < 0:
        raise DomainError("b must be non-negative")
    states = args.states or _default_states(spec.variable, args.model)
    energy = args.energy and spec.variable in ("tau", "sigma", "theta")
    # validate labels up front so bad input fails before any work
    if spec.variable in ("tau", "sigma", "theta"):
        for s in states:
            _state(args.model, s, args.spin)
    tasks = [(spec.variable, args.model, s, args.spin, float(x), fixed, args.method, args.order, energy)
             for x in spec.values() for s in states]
    workers = _resolve_workers(args.workers)
    if workers == 1:
        results = [_sweep_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, tasks))
    header = ["var", "state", "epsilon"] + (["energy"] if energy else [])
    write_csv_atomic(args.out, header, (r for r, _ in results))
    convs = [c for _, c in results if c is not None]
    report = RunReport(
        command="sweep",
        parameters={"model": args.model, "variable": spec.variable, "start": spec.start,
                    "stop": spec.stop, "points": spec.points, "states": " ".join(states),
                    "interaction": Interaction.parse(args.interaction).name.lower(),
                    "spin": args.spin, "method": args.method, "workers": workers, **{
                        k: v for k, v in fixed.items() if k not in ("interaction", spec.variable)}},
        output=args.out,
        rows=len(results),
        max_convergence=max(convs) if convs else 0.0,
        wall_time=time.perf_counter() - t0,
    )
    for line in report.lines():
        print(line, file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# perturb

def _frac(x: float) -> str:
    return str(Fraction(x).limit_denominator(1000))


def cmd_perturb(args, out=None) -> int:
    out = sys.stdout if out is None else out
    rep = pt.named_block(args.block, args.omega, args.sigma * args.omega)
    fit = rep.fit
    block = rep.block
    print(f"block: {rep.name} ({block.size} determinants)", file=out)
    print("basis: " + " ".join(str(d) for d in block.basis), file=out)
    print(f"fitted scale: {fmt(fit.scale)}", file=out)
    print(f"fitted shift: {fmt(fit.shift)}", file=out)
    print("permutation: " + " ".join(f"{'-' if s < 0 else ''}{p}" for p, s in zip(fit.permutation, fit.signs)),
          file=out)
    print(f"residual: {fit.residual:.3e}", file=out)
    print("eigenvalue, epsilon:", file=out)
    for e, eps in zip(block.eigenvalues, block.entanglements()):
        print(f"  {fmt(e)}  {fmt(eps)}  ({_frac(eps)})", file=out)
    values = sorted({_frac(e) for e in block.entanglements()}, key=Fraction)
    print("distinct epsilon: {" + ", ".join(values) + "}", file=out)
    if not fit.residual < pt.FIT_THRESHOLD * max(1.0, float(np.linalg.norm(block.matrix))):
        print("fit residual above threshold", file=out)
        print("computed:\n" + np.array2string(block.matrix, precision=6), file=out)
        print("printed (transformed):\n" + np.array2string(fit.transform(rep.printed), precision=6), file=out)
        return EXIT_CONVERGENCE
    return EXIT_OK


# ---------------------------------------------------------------------------
# haar

def cmd_haar(args, out=None) -> int:
    out = sys.stdout if out is None else out
    t0 = time.perf_counter()
    if args.samples < 10 ** 5:
        raise DomainError(f"--samples must be at least 100000, got {args.samples}")
    workers = _resolve_workers(args.workers)
    stats = pt.entanglement_distribution(args.samples, args.seed, workers)
    edges = pt.HAAR_BINS
    print(f"samples: {stats.samples}", file=out)
    print(f"seed: {args.seed}", file=out)
    for lo, hi, frac in zip(edges[:-1], edges[1:], stats.bins):
        print(f"{str(lo)} < eps <= {str(hi)}: {100 * frac:.4f}%", file=out)
    print(f"mean: {stats.mean:.6f}", file=out)
    print(f"max: {stats.max:.6f}", file=out)
    if args.out:
        rows = [[str(lo), str(hi), c, f]
                for lo, hi, c, f in zip(edges[:-1], edges[1:], stats.counts, stats.bins)]
        write_csv_atomic(args.out, ["lower", "upper", "count", "fraction"], rows)
        print(f"output: {args.out}", file=out)
    print(f"wall time: {time.perf_counter() - t0:.3f} s", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------

def _common(p, model_default="3e"):
    p.add_argument("--model", choices=("3e", "2e"), default=model_default)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--interaction", choices=("attractive", "repulsive"), default="attractive")
    p.add_argument("--spin", choices=("antiparallel", "parallel"), default="antiparallel")
    p.add_argument("--method", choices=("closed", "oracle", "both"), default="closed")
    p.add_argument("--order", type=int, default=None, help="quadrature order for the oracle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mosh-ent", description="Entanglement in Moshinsky atoms.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="entanglement and energy of one eigenstate")
    _common(p)
    p.add_argument("model_pos", nargs="?", choices=("3e", "2e"), help=argparse.SUPPRESS)
    p.add_argument("state_pos", nargs="?", help=argparse.SUPPRESS)
    p.add_argument("--state")
    p.add_argument("--theta", type=float, default=None, help="mix S_z = +-1/2 partners (3e, oracle)")

    p = sub.add_parser("sweep", help="write a CSV parameter sweep")
    _common(p)
    p.add_argument("--variable", choices=SWEEP_VARIABLES, required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--states", nargs="+", default=None)
    p.add_argument("--energy", action="store_true", help="add an energy column")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out")

    p = sub.add_parser("perturb", help="degenerate-level block report")
    p.add_argument("block", nargs="?", choices=pt.BLOCK_NAMES)
    p.add_argument("--block", dest="block_opt", choices=pt.BLOCK_NAMES)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.0)

    p = sub.add_parser("haar", help="Haar statistics of the four-fold level")
    p.add_argument("--samples", type=int, default=10 ** 7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "eval":
            if args.model_pos:
                args.model = args.model_pos
            if args.state_pos:
                args.state = args.state_pos
            return cmd_eval(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "perturb":
            args.block = args.block_opt or args.block
            if args.block is None:
                raise DomainError("a block name is required: " + ", ".join(pt.BLOCK_NAMES))
            return cmd_perturb(args)
        return cmd_haar(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
