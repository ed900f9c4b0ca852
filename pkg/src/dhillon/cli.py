"""Command-line front end: fit, sample, simulate, compare, predict.

Every command honors --seed and writes its primary outputs (JSON/CSV/text
plus a rendered PNG) under --out-dir, together with a run manifest.  Rerun
with the same seed, the primary outputs are byte-identical; the manifest
is the only file carrying a timestamp.

Exit codes: 0 success, 2 input error, 3 improper-posterior guard,
4 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import distribution
from .bayes import (McmcConfig, Prior, check_validity, posterior_predictive,
                    run_mh, summarize)
from .compare import compare, survival_overlays
from .datasets import resolve_dataset
from .distribution import DhillonParams
from .errors import (DegenerateData, DomainError, ImproperPosterior,
                     InputError, NotConverged)
from .figures import (render_fit_overview, render_predictive,
                      render_sim_report, render_survival_overlay, render_trace)
from .mle import fit_mle, fit_mom
from .simstudy import SimScenario, run_scenario

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IMPROPER = 3
EXIT_NOT_CONVERGED = 4


@dataclass(frozen=True)
class RunManifest:
    """Provenance stamp emitted with every output artifact."""

    command: str
    seed: int
    config: dict
    version: str
    timestamp: str

    def core(self) -> dict:
        # Everything except the timestamp, so embedding reports stay
        # byte-identical across reruns.
        return {"command": self.command, "seed": self.seed,
                "config": self.config, "version": self.version}

    def to_dict(self) -> dict:
        out = self.core()
        out["timestamp"] = self.timestamp
        return out


def _manifest(args: argparse.Namespace, config: dict) -> RunManifest:
    return RunManifest(
        command=args.command,
        seed=args.seed,
        config=config,
        version=__version__,
        timestamp=time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    )


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _emit(args, out_dir: Path, manifest: RunManifest, payload: dict,
          text: str, csv_text: str | None = None) -> None:
    _write_json(out_dir / "run_manifest.json", manifest.to_dict())
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    elif args.format == "csv" and csv_text is not None:
        print(csv_text, end="" if csv_text.endswith("\n") else "\n")
    else:
        print(text)


def _g(value: float) -> str:
    return f"{value:.4g}"


def _mcmc_config(args: argparse.Namespace) -> McmcConfig:
    return McmcConfig(iterations=args.iterations, burn_in=args.burn_in,
                      thin=args.thin, seed=args.seed)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="root RNG seed")
    parser.add_argument("--out-dir", default="dhillon-out",
                        help="directory for report files")
    parser.add_argument("--format", choices=("text", "json", "csv"),
                        default="text", help="stdout format")


def _add_mcmc(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--iterations", type=int, default=5500)
    parser.add_argument("--burn-in", type=int, default=500)
    parser.add_argument("--thin", type=int, default=5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dhillon",
        description="Inference and model comparison for Dhillon lifetime data.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a dataset by MLE, MoM or MCMC")
    p_fit.add_argument("--data", required=True,
                       help="built-in dataset name or CSV path")
    p_fit.add_argument("--method", choices=("mle", "bayes", "mom"), default="mle")
    p_fit.add_argument("--prior", choices=("jeffreys", "mdip"), default="jeffreys")
    p_fit.add_argument("--level", type=float, default=0.95)
    p_fit.add_argument("--dump-chain", action="store_true",
                       help="also write the retained draws as CSV (bayes)")
    _add_mcmc(p_fit)
    _add_common(p_fit)

    p_sample = sub.add_parser("sample", help="draw lifetimes by inverse transform")
    p_sample.add_argument("--beta", type=float, required=True)
    p_sample.add_argument("--theta", type=float, required=True)
    p_sample.add_argument("--n", type=int, required=True)
    p_sample.add_argument("--out", default=None,
                          help="CSV path (default: <out-dir>/sample.csv)")
    _add_common(p_sample)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo performance study")
    p_sim.add_argument("--beta", type=float, default=4.0)
    p_sim.add_argument("--theta", type=float, default=2.0)
    p_sim.add_argument("--n-values", default="20,30,40,50,60,70,80,90,100,110,120",
                       help="comma-separated sample sizes")
    p_sim.add_argument("--replicates", type=int, default=1000)
    p_sim.add_argument("--workers", type=int, default=None)
    _add_mcmc(p_sim)
    _add_common(p_sim)

    p_cmp = sub.add_parser("compare", help="information-criterion model comparison")
    p_cmp.add_argument("--data", required=True)
    _add_common(p_cmp)

    p_pred = sub.add_parser("predict", help="posterior predictive summary")
    p_pred.add_argument("--data", required=True)
    p_pred.add_argument("--level", type=float, default=0.95)
    _add_mcmc(p_pred)
    _add_common(p_pred)
    return parser


def _cmd_fit(args) -> int:
    data = resolve_dataset(args.data)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = {"data": args.data, "method": args.method, "prior": args.prior,
              "level": args.level}
    if args.method == "bayes":
        config["mcmc"] = _mcmc_config(args).to_dict()
    manifest = _manifest(args, config)

    if args.method == "mom":
        mom = fit_mom(data)
        payload = {"manifest": manifest.core(), "dataset": {"label": data.label, "n": data.n},
                   "mom": mom.to_dict()}
        lines = [f"method-of-moments fit of {data.label!r} (n={data.n})",
                 f"moment ratio m2/mean^2 = {_g(mom.ratio)}"]
        if mom.feasible:
            lines.append(f"beta = {_g(mom.params.beta)}  theta = {_g(mom.params.theta)}")
        else:
            lines.append("infeasible: the moment ratio does not identify a shape > 2")
        _write_json(out_dir / "fit_mom.json", payload)
        (out_dir / "fit_mom.txt").write_text("\n".join(lines) + "\n")
        _emit(args, out_dir, manifest, payload, "\n".join(lines))
        return EXIT_OK

    if args.method == "mle":
        fit = fit_mle(data, level=args.level)
        payload = {"manifest": manifest.core(),
                   "dataset": {"label": data.label, "n": data.n, "unit": data.unit},
                   "mle": fit.to_dict()}
        lines = [
            f"maximum-likelihood fit of {data.label!r} (n={data.n})",
            f"beta  = {_g(fit.params.beta)}  (se {_g(fit.se_beta)}, "
            f"{int(args.level * 100)}% CI {_g(fit.ci_beta[0])} .. {_g(fit.ci_beta[1])})",
            f"theta = {_g(fit.params.theta)}  (se {_g(fit.se_theta)}, "
            f"{int(args.level * 100)}% CI {_g(fit.ci_theta[0])} .. {_g(fit.ci_theta[1])})",
            f"log-likelihood = {_g(fit.loglik)}  iterations = {fit.iterations}",
        ]
        _write_json(out_dir / "fit_mle.json", payload)
        (out_dir / "fit_mle.txt").write_text("\n".join(lines) + "\n")
        render_fit_overview(
            data,
            lambda t: distribution.survival(fit.params, t),
            lambda t: distribution.hazard(fit.params, max(t, 1e-12)),
            out_dir / "fit_mle.png",
            title=f"{data.label}: fitted Dhillon model",
        )
        _emit(args, out_dir, manifest, payload, "\n".join(lines))
        return EXIT_OK

    # bayes
    prior = Prior.JEFFREYS_REFERENCE if args.prior == "jeffreys" else Prior.MDIP
    validity = check_validity(prior, data)
    if not validity.posterior_proper:
        raise ImproperPosterior("; ".join(validity.messages))
    cfg = _mcmc_config(args)
    chain = run_mh(prior, data, cfg)
    summary = summarize(chain, level=args.level)
    payload = {"manifest": manifest.core(),
               "dataset": {"label": data.label, "n": data.n, "unit": data.unit},
               "validity": validity.to_dict(),
               "chain": chain.to_dict(),
               "summary": summary.to_dict()}
    lines = [
        f"Bayes fit of {data.label!r} (n={data.n}) under the Jeffreys/reference prior",
        f"posterior median: beta = {_g(summary.median[0])}  theta = {_g(summary.median[1])}",
        f"posterior mean:   beta = {_g(summary.mean[0])}  theta = {_g(summary.mean[1])}",
        f"posterior sd:     beta = {_g(summary.sd[0])}  theta = {_g(summary.sd[1])}",
        f"{int(args.level * 100)}% credible intervals: "
        f"beta {_g(summary.ci_beta[0])} .. {_g(summary.ci_beta[1])}, "
        f"theta {_g(summary.ci_theta[0])} .. {_g(summary.ci_theta[1])}",
        f"acceptance rates: beta {_g(chain.accept_rate_beta)}, "
        f"theta {_g(chain.accept_rate_theta)}",
        f"Geweke z: beta {_g(chain.geweke_z_beta)}, theta {_g(chain.geweke_z_theta)} "
        f"-> {'pass' if chain.passed_geweke else 'FAIL'}",
    ]
    lines += [f"note: {msg}" for msg in validity.messages]
    _write_json(out_dir / "fit_bayes.json", payload)
    (out_dir / "fit_bayes.txt").write_text("\n".join(lines) + "\n")
    if args.dump_chain:
        chain.to_csv(out_dir / "chain.csv")
    render_trace(chain, out_dir / "fit_bayes_trace.png",
                 title=f"{data.label}: posterior chain")
    _emit(args, out_dir, manifest, payload, "\n".join(lines))
    return EXIT_OK


def _cmd_sample(args) -> int:
    if args.beta <= 0 or args.theta <= 0:
        raise InputError("beta and theta must be positive")
    if args.n < 1:
        raise InputError("n must be at least 1")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = DhillonParams(beta=args.beta, theta=args.theta)
    data = distribution.sample(params, args.n, args.seed)
    out_path = Path(args.out) if args.out else out_dir / "sample.csv"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", newline="") as fh:
        fh.write("time\n")
        for value in data.times:
            fh.write(f"{float(value)!r}\n")
    manifest = _manifest(args, {"beta": args.beta, "theta": args.theta,
                                "n": args.n, "out": str(out_path)})
    payload = {"manifest": manifest.core(), "n": args.n, "out": str(out_path)}
    _emit(args, out_dir, manifest, payload,
          f"wrote {args.n} draws to {out_path}",
          csv_text="\n".join(["time"] + [repr(float(v)) for v in data.times]))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    try:
        n_values = tuple(int(tok) for tok in args.n_values.split(",") if tok.strip())
    except ValueError:
        raise InputError(f"could not parse --n-values {args.n_values!r}") from None
    if not n_values or any(n < 2 for n in n_values):
        raise InputError("every sample size must be an integer >= 2")
    if args.replicates < 1:
        raise InputError("--replicates must be at least 1")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = SimScenario(
        truth=DhillonParams(beta=args.beta, theta=args.theta),
        n_values=n_values,
        replicates=args.replicates,
        mcmc=_mcmc_config(args),
        root_seed=args.seed,
    )
    report = run_scenario(scenario, workers=args.workers)
    manifest = _manifest(args, scenario.to_dict())
    payload = {"manifest": manifest.core(), "report": report.to_dict()}
    csv_text = "\n".join(report.csv_lines()) + "\n"
    (out_dir / "sim_report.csv").write_text(csv_text)
    table = report.format_table()
    (out_dir / "sim_report.txt").write_text(table + "\n")
    _write_json(out_dir / "sim_report.json", payload)
    render_sim_report(report, out_dir / "sim_report.png")
    _emit(args, out_dir, manifest, payload, table, csv_text=csv_text)
    return EXIT_OK


def _cmd_compare(args) -> int:
    data = resolve_dataset(args.data)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = compare(data)
    overlays = survival_overlays(data)
    manifest = _manifest(args, {"data": args.data})
    payload = {"manifest": manifest.core(),
               "dataset": {"label": data.label, "n": data.n},
               "criteria": [r.to_dict() for r in rows]}
    lines = [f"model comparison on {data.label!r} (n={data.n}); "
             "models fitted: Dhillon, Weibull, Gamma",
             f"{'model':<10} {'BIC':>10} {'AIC':>10} {'AICc':>10}"]
    for r in rows:
        if r.error is None:
            lines.append(f"{r.model:<10} {r.bic:>10.4g} {r.aic:>10.4g} {r.aicc:>10.4g}")
        else:
            lines.append(f"{r.model:<10} fit failed: {r.error}")
    table = "\n".join(lines)
    csv_lines = ["model,t,s"]
    for series in overlays:
        for t, s in series.points:
            csv_lines.append(f"{series.label},{t!r},{s!r}")
    csv_text = "\n".join(csv_lines) + "\n"
    (out_dir / "survival_overlay.csv").write_text(csv_text)
    (out_dir / "criteria.txt").write_text(table + "\n")
    _write_json(out_dir / "criteria.json", payload)
    render_survival_overlay(overlays, out_dir / "survival_overlay.png",
                            title=f"{data.label}: survival overlays")
    _emit(args, out_dir, manifest, payload, table, csv_text=csv_text)
    return EXIT_OK


def _cmd_predict(args) -> int:
    data = resolve_dataset(args.data)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = _mcmc_config(args)
    chain = run_mh(Prior.JEFFREYS_REFERENCE, data, cfg)
    # Predictive draws get their own stream, decoupled from the chain's.
    draws = posterior_predictive(chain, np.random.SeedSequence(args.seed, spawn_key=(1,)))
    lo, hi = (1 - args.level) / 2, 1 - (1 - args.level) / 2
    interval = (float(np.quantile(draws, lo)), float(np.quantile(draws, hi)))
    mean = float(draws.mean())
    sd = float(draws.std(ddof=1))
    manifest = _manifest(args, {"data": args.data, "level": args.level,
                                "mcmc": cfg.to_dict()})
    payload = {"manifest": manifest.core(),
               "dataset": {"label": data.label, "n": data.n, "unit": data.unit},
               "predictive": {"mean": mean, "sd": sd,
                              "interval": list(interval), "level": args.level,
                              "draws": len(draws)},
               "chain": chain.to_dict()}
    lines = [
        f"posterior predictive for {data.label!r} ({len(draws)} draws)",
        f"mean = {_g(mean)}  sd = {_g(sd)}",
        f"{int(args.level * 100)}% interval: {_g(interval[0])} .. {_g(interval[1])}",
        f"Geweke {'pass' if chain.passed_geweke else 'FAIL'}",
    ]
    csv_text = "\n".join(["time"] + [repr(float(v)) for v in draws]) + "\n"
    (out_dir / "predictive_draws.csv").write_text(csv_text)
    (out_dir / "predictive.txt").write_text("\n".join(lines) + "\n")
    _write_json(out_dir / "predictive.json", payload)
    render_predictive(draws, out_dir / "predictive.png",
                      title=f"{data.label}: posterior predictive")
    _emit(args, out_dir, manifest, payload, "\n".join(lines), csv_text=csv_text)
    return EXIT_OK


_HANDLERS = {
    "fit": _cmd_fit,
    "sample": _cmd_sample,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "predict": _cmd_predict,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ImproperPosterior as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IMPROPER
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (InputError, DegenerateData, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
