"""Monte Carlo performance study: replicate generation, MM/MLE/Bayes
estimation, and bias/MSE/coverage aggregation.

Seed-splitting rule (deterministic regardless of worker count or
scheduling): the dataset of replicate ``i`` at sample size ``n`` uses
``SeedSequence(root_seed, spawn_key=(n, i, 0))`` and MCMC attempt ``k``
(k = 0 plus up to 3 reruns after a failed Geweke check) uses
``SeedSequence(root_seed, spawn_key=(n, i, 1 + k))``.  Replicates are
aggregated in index order after the (optionally parallel) map.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bayes import McmcConfig, Prior, run_mh, summarize
from .datasets import Dataset
from .distribution import DhillonParams, sample
from .errors import DhillonError, EmptyInput
from .mle import fit_mle, fit_mom

_GEWEKE_RETRIES = 3


@dataclass(frozen=True)
class SimScenario:
    """A replicated study design: truth, sample sizes, replicate count,
    MCMC settings, interval level and the root seed."""

    truth: DhillonParams
    n_values: tuple[int, ...]
    replicates: int
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    ci_level: float = 0.95
    root_seed: int = 0

    def __post_init__(self) -> None:
        if self.replicates < 1:
            raise EmptyInput("need at least one replicate")
        if not self.n_values or any(n < 2 for n in self.n_values):
            raise EmptyInput("every sample size must be at least 2")
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))

    def to_dict(self) -> dict:
        return {"truth": self.truth.to_dict(), "n_values": list(self.n_values),
                "replicates": self.replicates, "mcmc": self.mcmc.to_dict(),
                "ci_level": self.ci_level, "root_seed": self.root_seed}


@dataclass(frozen=True)
class SimRow:
    """Aggregate for one (estimator, parameter, n) cell."""

    estimator: str  # "MM", "MLE" or "Bayes"
    parameter: str  # "beta" or "theta"
    n: int
    bias: float
    mse: float
    cp: float | None
    geweke_fail_count: int
    excluded: int
    used: int

    def to_dict(self) -> dict:
        return {"estimator": self.estimator, "parameter": self.parameter,
                "n": self.n, "bias": self.bias, "mse": self.mse, "cp": self.cp,
                "geweke_fail_count": self.geweke_fail_count,
                "excluded": self.excluded, "used": self.used}


@dataclass(frozen=True)
class SimReport:
    rows: list[SimRow]
    scenario: SimScenario

    def row(self, estimator: str, parameter: str, n: int) -> SimRow:
        for r in self.rows:
            if (r.estimator, r.parameter, r.n) == (estimator, parameter, n):
                return r
        raise KeyError((estimator, parameter, n))

    def to_dict(self) -> dict:
        return {"scenario": self.scenario.to_dict(),
                "rows": [r.to_dict() for r in self.rows]}

    def csv_lines(self) -> list[str]:
        lines = ["estimator,parameter,n,bias,mse,cp"]
        for r in self.rows:
            cp = "" if r.cp is None else repr(r.cp)
            lines.append(f"{r.estimator},{r.parameter},{r.n},{r.bias!r},{r.mse!r},{cp}")
        return lines

    def format_table(self) -> str:
        """Plain-text table: one block per parameter, one line per n, with
        MM bias/MSE, then MLE and Bayes bias/MSE/CP."""
        out = []
        truth = self.scenario.truth
        out.append(f"truth: beta={truth.beta:g} theta={truth.theta:g}  "
                   f"replicates={self.scenario.replicates}")
        header = (f"{'n':>5} | {'MM bias':>10} {'MM MSE':>10} | "
                  f"{'MLE bias':>10} {'MLE MSE':>10} {'MLE CP%':>8} | "
                  f"{'Bay bias':>10} {'Bay MSE':>10} {'Bay CP%':>8}")
        for parameter in ("beta", "theta"):
            out.append("")
            out.append(f"parameter: {parameter}")
            out.append(header)
            out.append("-" * len(header))
            for n in self.scenario.n_values:
                cells = [f"{n:>5}"]
                for est in ("MM", "MLE", "Bayes"):
                    r = self.row(est, parameter, n)
                    cells.append(f"{r.bias:>10.4g} {r.mse:>10.4g}")
                    if est != "MM":
                        cells.append(f"{100 * r.cp:>8.4g}" if r.cp is not None else f"{'-':>8}")
                out.append(" | ".join(cells))
        excluded = {(r.estimator, r.n): r.excluded for r in self.rows
                    if r.parameter == "beta" and r.excluded}
        if excluded:
            out.append("")
            for (est, n), count in sorted(excluded.items()):
                out.append(f"excluded {count} replicate(s) for {est} at n={n}")
        return "\n".join(out)


def bias_mse(estimates, truth: float) -> tuple[float, float]:
    """Empirical bias mean(est - truth) and MSE mean((est - truth)^2)."""
    arr = np.asarray(estimates, dtype=float)
    if arr.size == 0:
        raise EmptyInput("bias_mse needs at least one estimate")
    dev = arr - truth
    return float(dev.mean()), float(dev @ dev / dev.size)


@dataclass(frozen=True)
class ReplicateResult:
    """Per-replicate estimates; a None entry means the estimator was
    excluded for this replicate."""

    mm: tuple[float, float] | None
    mle: tuple[float, float, bool, bool] | None   # point_b, point_t, cover_b, cover_t
    bayes: tuple[float, float, bool, bool] | None
    geweke_failures: int


def _run_replicate(args) -> ReplicateResult:
    (root_seed, beta, theta, n, rep, mcmc_dict, ci_level) = args
    truth = DhillonParams(beta=beta, theta=theta)
    data_seed = np.random.SeedSequence(root_seed, spawn_key=(n, rep, 0))
    data = sample(truth, n, data_seed)

    mom = fit_mom(data)
    mm = (mom.params.beta, mom.params.theta) if mom.feasible else None

    try:
        fit = fit_mle(data, level=ci_level)
        mle = (fit.params.beta, fit.params.theta,
               bool(fit.ci_beta[0] <= beta <= fit.ci_beta[1]),
               bool(fit.ci_theta[0] <= theta <= fit.ci_theta[1]))
    except DhillonError:
        mle = None

    bayes = None
    geweke_failures = 0
    base_cfg = McmcConfig(**mcmc_dict)
    for attempt in range(1 + _GEWEKE_RETRIES):
        chain_seed = np.random.SeedSequence(root_seed, spawn_key=(n, rep, 1 + attempt))
        cfg = replace(base_cfg, seed=chain_seed)
        try:
            chain = run_mh(Prior.JEFFREYS_REFERENCE, data, cfg)
        except DhillonError:
            break
        if chain.passed_geweke:
            summ = summarize(chain, level=ci_level)
            bayes = (summ.median[0], summ.median[1],
                     bool(summ.ci_beta[0] <= beta <= summ.ci_beta[1]),
                     bool(summ.ci_theta[0] <= theta <= summ.ci_theta[1]))
            break
        geweke_failures += 1
    return ReplicateResult(mm=mm, mle=mle, bayes=bayes,
                           geweke_failures=geweke_failures)


def _aggregate(results: list[ReplicateResult], s: SimScenario, n: int) -> list[SimRow]:
    truth_by_param = {"beta": s.truth.beta, "theta": s.truth.theta}
    geweke_total = sum(r.geweke_failures for r in results)
    rows: list[SimRow] = []
    for est, pick, has_cp in (("MM", lambda r: r.mm, False),
                              ("MLE", lambda r: r.mle, True),
                              ("Bayes", lambda r: r.bayes, True)):
        picked = [pick(r) for r in results]
        kept = [p for p in picked if p is not None]
        excluded = len(picked) - len(kept)
        for idx, parameter in enumerate(("beta", "theta")):
            if kept:
                bias, mse = bias_mse([p[idx] for p in kept], truth_by_param[parameter])
                cp = (sum(p[2 + idx] for p in kept) / len(kept)) if has_cp else None
            else:
                bias, mse, cp = float("nan"), float("nan"), None
            rows.append(SimRow(
                estimator=est, parameter=parameter, n=n, bias=bias, mse=mse,
                cp=cp if has_cp else None,
                geweke_fail_count=geweke_total if est == "Bayes" else 0,
                excluded=excluded, used=len(kept),
            ))
    return rows


def run_scenario(s: SimScenario, workers: int | None = None,
                 estimators=None) -> SimReport:
    """Run the replicated study and aggregate bias, MSE and coverage.

    ``workers`` > 1 maps replicates over a process pool; the report is
    identical for any worker count because every replicate's seeds are
    pre-assigned and aggregation runs in replicate order.  ``estimators``
    optionally replaces the whole MM/MLE/Bayes pipeline with a mapping of
    name -> callable(dataset, truth, ci_level) returning (point_beta,
    point_theta, cover_beta, cover_theta); it runs serially and is meant
    for harness self-tests.
    """
    if estimators is not None:
        return _run_custom(s, estimators)
    if workers is None:
        workers = os.cpu_count() or 1
    rows: list[SimRow] = []
    for n in s.n_values:
        tasks = [(s.root_seed, s.truth.beta, s.truth.theta, n, rep,
                  s.mcmc.to_dict(), s.ci_level) for rep in range(s.replicates)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_run_replicate, tasks, chunksize=16))
        else:
            results = [_run_replicate(task) for task in tasks]
        rows.extend(_aggregate(results, s, n))
    return SimReport(rows=rows, scenario=s)


def _run_custom(s: SimScenario, estimators) -> SimReport:
    rows: list[SimRow] = []
    truth_by_param = {"beta": s.truth.beta, "theta": s.truth.theta}
    for n in s.n_values:
        per_est: dict[str, list] = {name: [] for name in estimators}
        for rep in range(s.replicates):
            data_seed = np.random.SeedSequence(s.root_seed, spawn_key=(n, rep, 0))
            data = sample(s.truth, n, data_seed)
            for name, fn in estimators.items():
                out = fn(data, s.truth, s.ci_level)
                if out is not None:
                    per_est[name].append(out)
        for name, kept in per_est.items():
            excluded = s.replicates - len(kept)
            for idx, parameter in enumerate(("beta", "theta")):
                if kept:
                    bias, mse = bias_mse([p[idx] for p in kept], truth_by_param[parameter])
                    cp = sum(p[2 + idx] for p in kept) / len(kept)
                else:
                    bias, mse, cp = float("nan"), float("nan"), None
                rows.append(SimRow(estimator=name, parameter=parameter, n=n,
                                   bias=bias, mse=mse, cp=cp, geweke_fail_count=0,
                                   excluded=excluded, used=len(kept)))
    return SimReport(rows=rows, scenario=s)
