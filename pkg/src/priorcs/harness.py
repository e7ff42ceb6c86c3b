"""Experiment configuration, trial runner, sweeps, file I/O and the CLI.

A sweep is the cross product of ``omega_grid`` and ``range(trials)``. Every
random draw is derived from an explicit seed and the trial index, so the
same configuration always produces the same CSV bytes. Wall-clock time is
kept on the in-memory :class:`TrialRecord` only and never written to disk.
"""

import argparse
import csv
import io
import json
import math
import os
import statistics
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bounds import (GuaranteeInputs, error_bound_rhs, evaluate_guarantee,
                     proposition1_compare)
from .linalg import as_matrix
from .model import (NoiseKind, NoiseSpec, SupportEstimate, as_fraction, as_index_set,
                    best_k_support, make_estimate, make_weights)
from .rip import (DEFAULT_BUDGET, EnumerationBudgetError, compute_delta, compute_theta,
                  randomized_lower_bound_delta, randomized_lower_bound_theta)
from .sharpness import build_counterexample, verify_counterexample
from .solvers import ConstraintKind, SolveConfig, Status, cone_check, solve

CSV_SCHEMA = "priorcs-trials v1"
SUMMARY_SCHEMA = "priorcs-summary v1"

#: Absolute slack (relative to ``1 + ||x||_2``) allowed when auditing the error bound,
#: so round-off in an exactly recovered signal is not counted as a violation.
AUDIT_SLACK = 1e-9

EXIT_OK, EXIT_INVALID, EXIT_BUDGET, EXIT_NONCONVERGED = 0, 1, 2, 3


def gaussian_radius_l2(sigma, n):
    """``sigma * sqrt(n + 2 sqrt(n ln n))``; contains ``N(0, sigma^2 I_n)`` w.p. >= 1 - 1/n."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return sigma * math.sqrt(n + 2 * math.sqrt(n * math.log(n)))


def gaussian_radius_ds(sigma, N):
    """``sigma * sqrt(2 ln N)``, the Dantzig-selector radius for unit-column matrices."""
    if N < 2:
        raise ValueError(f"need N >= 2, got {N}")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return sigma * math.sqrt(2 * math.log(N))


def gaussian_ensemble(n, N, seed):
    """``n x N`` Gaussian matrix with columns rescaled to unit l2 norm."""
    if n < 1 or N < 1:
        raise ValueError("matrix dimensions must be positive")
    A = np.random.default_rng(seed).standard_normal((n, N))
    return A / np.linalg.norm(A, axis=0)


# -- file formats -------------------------------------------------------------

def read_matrix(path):
    try:
        return as_matrix(np.loadtxt(path, delimiter=",", ndmin=2), "matrix")
    except OSError as exc:
        raise OSError(f"{path}: {exc}") from exc


def write_matrix(path, A):
    np.savetxt(path, np.asarray(A, dtype=float), delimiter=",", fmt="%.17g")


def read_vector(path):
    try:
        return np.loadtxt(path, delimiter=",", ndmin=1).astype(float)
    except OSError as exc:
        raise OSError(f"{path}: {exc}") from exc


def write_vector(path, v):
    np.savetxt(path, np.asarray(v, dtype=float).ravel(), fmt="%.17g")


def parse_index_set(text):
    """``"0,3,5"`` -> ``(0, 3, 5)``; the empty string is the empty set."""
    text = text.strip()
    if not text:
        return ()
    try:
        return as_index_set(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad index set {text!r}: expected comma-separated integers") from exc


# -- configuration ------------------------------------------------------------

_DISTRIBUTIONS = ("gaussian", "rademacher", "uniform")


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully seeded description of a sweep.

    ``matrix_source`` is ``{"file": path}`` or
    ``{"gaussian": {"n": .., "N": .., "seed": ..}, "per_trial": bool}``.
    ``signal`` holds ``k``, ``distribution``, ``seed`` and an optional
    ``tail`` level for compressible signals. ``guarantee`` is ``[a, b]``,
    ``"sweep"`` or ``{"sweep": {"max_a": .., "max_b": ..}}``. For Gaussian
    noise ``noise_program`` picks the ``"l2"`` or ``"dantzig"`` program.
    """

    matrix_source: dict
    signal: dict
    estimate: dict
    omega_grid: tuple
    noise: NoiseSpec
    guarantee: object
    trials: int
    output: str = "trials.csv"
    budget: int = DEFAULT_BUDGET
    noise_program: str = "l2"
    solver: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "omega_grid", tuple(float(o) for o in self.omega_grid))
        if not self.omega_grid:
            raise ValueError("omega_grid must be non-empty")
        if any(not 0 <= o <= 1 for o in self.omega_grid):
            raise ValueError("omega values must lie in [0, 1]")
        if int(self.trials) < 1:
            raise ValueError("trials must be >= 1")
        if isinstance(self.noise, dict):
            object.__setattr__(self, "noise", NoiseSpec(**self.noise))
        src = self.matrix_source
        if "file" not in src and "gaussian" not in src:
            raise ValueError("matrix_source needs a 'file' or 'gaussian' entry")
        if "gaussian" in src and "seed" not in src["gaussian"]:
            raise ValueError("gaussian matrix_source needs a seed")
        for part, name in ((self.signal, "signal"), (self.estimate, "estimate")):
            if "seed" not in part:
                raise ValueError(f"{name} needs a seed")
        if self.signal.get("distribution", "gaussian") not in _DISTRIBUTIONS:
            raise ValueError(f"signal distribution must be one of {_DISTRIBUTIONS}")
        if self.noise_program not in ("l2", "dantzig"):
            raise ValueError("noise_program must be 'l2' or 'dantzig'")
        self.pairs(10**9)  # validates the guarantee field

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config fields: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    @property
    def k(self):
        return int(self.signal["k"])

    def pairs(self, N):
        """Candidate ``(a, b)`` orders for certification."""
        g = self.guarantee
        if isinstance(g, (list, tuple)) and len(g) == 2:
            return [(int(g[0]), int(g[1]))]
        if g == "sweep" or (isinstance(g, dict) and "sweep" in g):
            opts = g["sweep"] if isinstance(g, dict) else {}
            max_a = int(opts.get("max_a", self.k))
            max_b = int(opts.get("max_b", 3 * self.k))
            return [(a, b) for a in range(1, min(self.k, max_a) + 1)
                    for b in range(1, max_b + 1) if a + b <= N]
        raise ValueError("guarantee must be [a, b], 'sweep' or {'sweep': {...}}")


@dataclass
class TrialRecord:
    trial: int
    omega: float
    rho: Fraction
    alpha: Fraction
    epsilon: float
    eta: float
    noise_norm: float
    noise_in_set: bool
    a: int
    b: int
    certification: str
    condition_value: float
    D0: float
    error: float
    bound_rhs: float
    bound_satisfied: bool
    cone_ok: bool
    status: str
    iterations: int
    objective: float
    wall_time: float = field(default=0.0, compare=False)

    CSV_FIELDS = ("trial", "omega", "rho", "alpha", "epsilon", "eta", "noise_norm",
                  "noise_in_set", "a", "b", "certification", "condition_value", "D0",
                  "error", "bound_rhs", "bound_satisfied", "cone_ok", "status",
                  "iterations", "objective")


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer, Fraction, str)):
        return str(v)
    return format(float(v), ".17g")


# -- trial synthesis ----------------------------------------------------------

class _Certifier:
    """Memoised exact constants of one matrix."""

    def __init__(self, A, budget):
        self.A, self.budget = A, budget
        self._delta, self._theta = {}, {}

    def delta(self, a):
        if a not in self._delta:
            self._delta[a] = compute_delta(self.A, a, self.budget).value
        return self._delta[a]

    def theta(self, a, b):
        if (a, b) not in self._theta:
            self._theta[a, b] = compute_theta(self.A, a, b, self.budget).value
        return self._theta[a, b]

    def best(self, pairs, k, omega, rho, alpha):
        """Report for the enumerable pair minimising ``delta_a + C theta_{a,b}``, or None."""
        best = None
        for a, b in pairs:
            try:
                inp = GuaranteeInputs(k, a, b, omega, rho, alpha, self.delta(a), self.theta(a, b))
            except EnumerationBudgetError:
                continue
            rep = evaluate_guarantee(inp)
            if best is None or rep.condition_value < best.condition_value:
                best = rep
        return best


def _matrix_for(cfg, trial_index):
    src = cfg.matrix_source
    if "file" in src:
        return read_matrix(src["file"])
    g = src["gaussian"]
    seed = [g["seed"], trial_index] if src.get("per_trial") else g["seed"]
    return gaussian_ensemble(int(g["n"]), int(g["N"]), seed)


def _signal(cfg, N, trial_index):
    sig = cfg.signal
    k = cfg.k
    rng = np.random.default_rng([sig["seed"], trial_index])
    x = np.zeros(N)
    T0 = np.sort(rng.choice(N, size=k, replace=False))
    dist = sig.get("distribution", "gaussian")
    if dist == "gaussian":
        x[T0] = rng.standard_normal(k)
    elif dist == "rademacher":
        x[T0] = rng.choice([-1.0, 1.0], size=k)
    else:
        x[T0] = rng.uniform(-1.0, 1.0, size=k)
    tail = float(sig.get("tail", 0.0))
    if tail:
        off = np.setdiff1d(np.arange(N), T0)
        x[off] = tail * rng.standard_normal(off.size)
    return x, best_k_support(x, k)


def _noise(cfg, A, trial_index):
    """Return ``(z, kind, epsilon, eta, noise_norm, in_set)``."""
    spec = cfg.noise
    n = A.shape[0]
    rng = np.random.default_rng([cfg.signal["seed"], trial_index, 1])
    if spec.kind is NoiseKind.EXACT:
        return np.zeros(n), ConstraintKind.EXACT, 0.0, 0.0, 0.0, True
    if spec.kind is NoiseKind.L2:
        u = rng.standard_normal(n)
        z = spec.epsilon * u / np.linalg.norm(u)
        return z, ConstraintKind.L2, spec.epsilon, spec.eta, float(np.linalg.norm(z)), True
    if spec.kind is NoiseKind.DANTZIG:
        u = rng.standard_normal(n)
        z = spec.epsilon * u / np.abs(A.T @ u).max()
        return z, ConstraintKind.DANTZIG, spec.epsilon, spec.eta, float(np.abs(A.T @ z).max()), True
    z = spec.sigma * rng.standard_normal(n)
    if cfg.noise_program == "l2":
        r = gaussian_radius_l2(spec.sigma, n)
        size = float(np.linalg.norm(z))
        return z, ConstraintKind.L2, r, r, size, size <= r
    r = gaussian_radius_ds(spec.sigma, A.shape[1])
    size = float(np.abs(A.T @ z).max())
    return z, ConstraintKind.DANTZIG, r, r, size, size <= r


def run_trial(cfg, trial_index, omega=None, _certifier=None):
    """Synthesize one instance, solve it and audit the error bound.

    Rows whose guarantee cannot be established by exact enumeration are
    marked ``"uncertified"`` and carry no bound. Solver failures end up in
    the ``status`` column instead of raising.
    """
    start = time.perf_counter()
    omega = cfg.omega_grid[0] if omega is None else float(omega)
    A = _matrix_for(cfg, trial_index)
    N = A.shape[1]
    k = cfg.k
    x, T0 = _signal(cfg, N, trial_index)
    rho = as_fraction(cfg.estimate["rho"], "rho")
    alpha = as_fraction(cfg.estimate["alpha"], "alpha")
    est = make_estimate(T0, rho, alpha, k, N, [cfg.estimate["seed"], trial_index])
    w = make_weights(est, omega).w
    z, kind, eps, eta, noise_norm, in_set = _noise(cfg, A, trial_index)
    y = A @ x + z

    res = solve(A, y, w, kind, eta, SolveConfig(**cfg.solver))
    h = res.x_hat - x
    error = float(np.linalg.norm(h))
    cone = bool(cone_check(h, x, T0, est, omega)) if res.optimal else None

    cert = _certifier if _certifier is not None else _Certifier(A, cfg.budget)
    rep = cert.best(cfg.pairs(N), k, omega, rho, alpha)
    a = b = cond = D0 = rhs = ok = None
    if rep is None:
        label = "uncertified"
    else:
        a, b, cond = rep.inputs.a, rep.inputs.b, rep.condition_value
        label = "certified" if rep.condition_met else "not_met"
        if rep.condition_met:
            D0 = rep.D0 if kind is not ConstraintKind.DANTZIG else rep.D0_ds
            if in_set:
                noise_kind = NoiseKind.DANTZIG if kind is ConstraintKind.DANTZIG else NoiseKind.L2
                rhs = error_bound_rhs(rep, eps, x, T0, est, omega, noise_kind, eta)
                ok = error <= rhs + AUDIT_SLACK * (1 + float(np.linalg.norm(x)))
    return TrialRecord(
        trial=trial_index, omega=omega, rho=rho, alpha=alpha, epsilon=eps, eta=eta,
        noise_norm=noise_norm, noise_in_set=in_set, a=a, b=b, certification=label,
        condition_value=cond, D0=D0, error=error, bound_rhs=rhs, bound_satisfied=ok,
        cone_ok=cone, status=res.status.value, iterations=res.iterations,
        objective=res.objective, wall_time=time.perf_counter() - start)


def records_to_csv(records):
    buf = io.StringIO()
    buf.write(f"# {CSV_SCHEMA}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TrialRecord.CSV_FIELDS)
    for r in records:
        writer.writerow([_fmt(getattr(r, f)) for f in TrialRecord.CSV_FIELDS])
    return buf.getvalue()


def summarize(records):
    """Per-omega error statistics and bound-violation counts."""
    per = {}
    for om in sorted({r.omega for r in records}):
        rows = [r for r in records if r.omega == om]
        errs = [r.error for r in rows]
        audited = [r for r in rows if r.bound_satisfied is not None]
        statuses = {}
        for r in rows:
            statuses[r.status] = statuses.get(r.status, 0) + 1
        per[_fmt(om)] = {
            "trials": len(rows),
            "mean_error": statistics.fmean(errs),
            "median_error": statistics.median(errs),
            "certified": sum(r.certification == "certified" for r in rows),
            "audited": len(audited),
            "bound_violations": sum(not r.bound_satisfied for r in audited),
            "cone_failures": sum(r.cone_ok is False for r in rows),
            "statuses": statuses,
        }
    return {
        "schema": SUMMARY_SCHEMA,
        "rows": len(records),
        "bound_violations": sum(v["bound_violations"] for v in per.values()),
        "per_omega": per,
    }


def run_sweep(cfg, output=None):
    """Run every ``(omega, trial)`` pair and write the CSV plus ``<stem>.summary.json``.

    Returns ``(records, summary)``. Rows are ordered by omega (config order)
    and then trial index.
    """
    out = output or cfg.output
    fixed = "file" in cfg.matrix_source or not cfg.matrix_source.get("per_trial")
    shared = _Certifier(_matrix_for(cfg, 0), cfg.budget) if fixed else None
    records = []
    for om in cfg.omega_grid:
        for t in range(int(cfg.trials)):
            records.append(run_trial(cfg, t, om, shared))
    summary = summarize(records)
    stem, _ = os.path.splitext(out)
    try:
        with open(out, "w", newline="") as fh:
            fh.write(records_to_csv(records))
        with open(stem + ".summary.json", "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write sweep output to {out}: {exc}") from exc
    return records, summary


# -- CLI ----------------------------------------------------------------------

def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (Status, ConstraintKind, NoiseKind)):
        return o.value
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _emit(obj):
    print(json.dumps(obj, indent=2, default=_json_default))


def _cmd_solve(args):
    A = read_matrix(args.matrix)
    y = read_vector(args.y)
    if args.weights:
        w = read_vector(args.weights)
    else:
        w = make_weights(SupportEstimate(parse_index_set(args.estimate), A.shape[1]), args.omega).w
    cfg = SolveConfig(max_iterations=args.max_iterations)
    res = solve(A, y, w, ConstraintKind(args.kind), args.eta, cfg)
    if args.output:
        write_vector(args.output, res.x_hat)
    _emit({"status": res.status.value, "objective": res.objective,
           "constraint_residual": res.constraint_residual, "iterations": res.iterations,
           "x_hat": res.x_hat})
    if res.status is Status.INFEASIBLE:
        return EXIT_INVALID
    return EXIT_OK if res.optimal else EXIT_NONCONVERGED


def _cmd_rip(args):
    A = read_matrix(args.matrix)
    out = {"delta": {}, "theta": {}}
    for k in args.delta or []:
        if args.randomized:
            out["delta"][str(k)] = {"lower_bound": randomized_lower_bound_delta(A, k, args.randomized, args.seed)}
        else:
            v = compute_delta(A, k, args.budget)
            out["delta"][str(k)] = {"value": v.value, "argmax_support": v.argmax_support}
    for k1, k2 in args.theta or []:
        key = f"{k1},{k2}"
        if args.randomized:
            out["theta"][key] = {"lower_bound": randomized_lower_bound_theta(A, k1, k2, args.randomized, args.seed)}
        else:
            v = compute_theta(A, k1, k2, args.budget)
            out["theta"][key] = {"value": v.value, "argmax_supports": v.argmax_supports}
    _emit(out)
    return EXIT_OK


def _cmd_bounds(args):
    inp = GuaranteeInputs(args.k, args.a, args.b, as_fraction(args.omega, "omega"),
                          as_fraction(args.rho, "rho"), as_fraction(args.alpha, "alpha"),
                          args.delta, args.theta)
    out = evaluate_guarantee(inp).to_dict()
    cmp = proposition1_compare(inp)
    out["comparison"] = {"case": cmp.case.value, "relations": cmp.relations,
                         "d1_criterion": cmp.d1_criterion}
    _emit(out)
    return EXIT_OK


def _cmd_sharpness(args):
    inst = build_counterexample(args.N, args.k, args.a, args.b, args.rho, args.alpha, args.omega)
    rep = verify_counterexample(inst, args.budget)
    if args.save_dir:
        os.makedirs(args.save_dir, exist_ok=True)
        write_matrix(os.path.join(args.save_dir, "A.csv"), inst.A)
        for name in ("xi1", "eta_vec", "gamma_vec"):
            write_vector(os.path.join(args.save_dir, f"{name}.csv"), getattr(inst, name))
    out = rep.to_dict()
    out["params"] = inst.params
    _emit(out)
    return EXIT_OK if rep.exact else EXIT_BUDGET


def _cmd_sweep(args):
    cfg = ExperimentConfig.from_json(args.config)
    _, summary = run_sweep(cfg, args.output)
    _emit(summary)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="priorcs", description="Weighted l1 recovery with partial support information.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one weighted l1 program from files")
    s.add_argument("--matrix", required=True, help="CSV matrix, one row per line")
    s.add_argument("--y", required=True, help="measurement vector, one value per line")
    s.add_argument("--estimate", default="", help="comma-separated 0-based support estimate")
    s.add_argument("--omega", type=float, default=1.0)
    s.add_argument("--weights", help="explicit weight vector file (overrides --estimate/--omega)")
    s.add_argument("--kind", choices=[k.value for k in ConstraintKind], default="exact")
    s.add_argument("--eta", type=float, default=0.0)
    s.add_argument("--max-iterations", type=int, default=20000)
    s.add_argument("--output", help="write x_hat here")
    s.set_defaults(func=_cmd_solve)

    r = sub.add_parser("rip", help="restricted isometry / orthogonality constants of a matrix file")
    r.add_argument("--matrix", required=True)
    r.add_argument("--delta", type=int, action="append", metavar="K")
    r.add_argument("--theta", type=int, nargs=2, action="append", metavar=("K1", "K2"))
    r.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    r.add_argument("--randomized", type=int, metavar="TRIALS", help="report randomized lower bounds instead")
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=_cmd_rip)

    b = sub.add_parser("bounds", help="guarantee constants from scalars")
    for name in ("k", "a", "b"):
        b.add_argument(f"--{name}", type=int, required=True)
    for name in ("omega", "rho", "alpha"):
        b.add_argument(f"--{name}", required=True, help="number or p/q")
    b.add_argument("--delta", type=float, required=True, help="delta_a")
    b.add_argument("--theta", type=float, required=True, help="theta_{a,b}")
    b.set_defaults(func=_cmd_bounds)

    c = sub.add_parser("sharpness", help="build and verify the sharpness counterexample")
    for name in ("N", "k", "a", "b"):
        c.add_argument(f"--{name}", type=int, required=True)
    for name in ("rho", "alpha", "omega"):
        c.add_argument(f"--{name}", required=True, help="number or p/q")
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    c.add_argument("--save-dir", help="write A, xi1, eta_vec, gamma_vec as CSV here")
    c.set_defaults(func=_cmd_sharpness)

    w = sub.add_parser("sweep", help="run an experiment config and write CSV")
    w.add_argument("--config", required=True)
    w.add_argument("--output", help="override the config output path")
    w.set_defaults(func=_cmd_sweep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "omega", None) is not None and args.command == "sharpness":
        args.omega = float(as_fraction(args.omega, "omega"))
    try:
        return args.func(args)
    except EnumerationBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
