"""Monte-Carlo experiment harness.

Each trial samples a message, encodes it, and records codelengths together
with the true-source log-likelihood, so redundancy is measured against the
sampling distribution itself.  Trials are keyed by (seed, n, trial_index)
and are reproducible regardless of execution order.  Asymptotic bound
checks carry explicit Monte-Carlo slack (multiples of the standard error),
so a failure means a real violation, not noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .codec import CensorRule
from .envelope import BayesConstruction, SourceModel

__all__ = [
    "TrialRecord",
    "ExperimentConfig",
    "BoundCheck",
    "run_trial",
    "redundancy_curve",
    "threshold_stats",
    "distinct_symbol_stats",
    "emit_csv",
    "REDUNDANCY_COLUMNS",
    "THRESHOLD_COLUMNS",
    "DISTINCT_COLUMNS",
]

MIN_TRIALS = 30


@dataclass(frozen=True)
class TrialRecord:
    n: int
    trial_index: int
    seed: int
    total_bits: int
    mixture_bits: int
    elias_bits: int
    ideal_mixture_bits: float
    n_censored: int
    threshold_m: int
    distinct_k: int
    neg_log2_likelihood: float

    @property
    def redundancy(self) -> float:
        return self.total_bits - self.neg_log2_likelihood

    @property
    def mixture_redundancy(self) -> float:
        return self.mixture_bits - self.neg_log2_likelihood


@dataclass
class ExperimentConfig:
    envelope: object
    source: str = "envelope"  # envelope | bayes
    n_grid: tuple = (1024, 2048, 4096, 8192, 16384, 32768, 65536)
    trials: int = 100
    seed: int = 2023
    rule: CensorRule = CensorRule.RANK
    out: str | None = None

    def __post_init__(self):
        if self.trials < MIN_TRIALS:
            raise ValueError(f"bound-checking experiments need >= {MIN_TRIALS} trials")
        grid = tuple(int(n) for n in self.n_grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n grid must be strictly increasing")
        self.n_grid = grid
        if self.source not in ("envelope", "bayes"):
            raise ValueError(f"unknown source kind {self.source!r}")

    def make_source(self) -> SourceModel:
        if self.source == "envelope":
            return self.envelope.envelope_source()
        return self.envelope.bayes_construction().p_theta_model(seed=(self.seed, 0x7E7A))

    def bayes_construction(self) -> BayesConstruction:
        return self.envelope.bayes_construction()


@dataclass(frozen=True)
class BoundCheck:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{self.name}: {'PASS' if self.passed else 'FAIL'} ({self.detail})"


def run_trial(source: SourceModel, n: int, trial_index: int, seed: int,
              rule: CensorRule = CensorRule.RANK) -> TrialRecord:
    symbols = source.sample(n, seed=(seed, n, trial_index))
    _, nbits, stats = backend.encode_payload(symbols, rule is CensorRule.VALUE)
    mixture_bits, elias_bits, ideal, n_censored, m, distinct = stats
    nll = source.neg_log2_likelihood(symbols) if n else 0.0
    return TrialRecord(
        n=n,
        trial_index=trial_index,
        seed=seed,
        total_bits=nbits,
        mixture_bits=mixture_bits,
        elias_bits=elias_bits,
        ideal_mixture_bits=ideal,
        n_censored=n_censored,
        threshold_m=m,
        distinct_k=distinct,
        neg_log2_likelihood=nll,
    )


def _trials_for(cfg: ExperimentConfig, source: SourceModel, n: int) -> list[TrialRecord]:
    return [run_trial(source, n, t, cfg.seed, cfg.rule) for t in range(cfg.trials)]


def _mean_se(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    se = float(np.std(arr, ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return float(np.mean(arr)), se


REDUNDANCY_COLUMNS = [
    "n",
    "trials",
    "mean_redundancy",
    "ci95",
    "m_n",
    "mn_log2n",
    "half_mn_log2n",
    "five_halves_mn_log2n",
    "mean_mixture_redundancy",
    "mean_elias_bits",
    "mean_censored",
    "mean_threshold_m",
    "mean_distinct_k",
]


def redundancy_curve(cfg: ExperimentConfig) -> tuple[list[dict], list[BoundCheck]]:
    source = cfg.make_source()
    env = cfg.envelope
    rows = []
    for n in cfg.n_grid:
        recs = _trials_for(cfg, source, n)
        mean_red, se = _mean_se([r.redundancy for r in recs])
        mean_mix, _ = _mean_se([r.mixture_redundancy for r in recs])
        m_n = env.exact_threshold_m(float(n))
        log2n = math.log2(n)
        rows.append(
            {
                "n": n,
                "trials": cfg.trials,
                "mean_redundancy": mean_red,
                "ci95": 1.96 * se,
                "m_n": m_n,
                "mn_log2n": m_n * log2n,
                "half_mn_log2n": 0.5 * m_n * log2n,
                "five_halves_mn_log2n": 2.5 * m_n * log2n,
                "mean_mixture_redundancy": mean_mix,
                "mean_elias_bits": float(np.mean([r.elias_bits for r in recs])),
                "mean_censored": float(np.mean([r.n_censored for r in recs])),
                "mean_threshold_m": float(np.mean([r.threshold_m for r in recs])),
                "mean_distinct_k": float(np.mean([r.distinct_k for r in recs])),
                "_se": se,
                "_se_k": _mean_se([r.distinct_k for r in recs])[1],
            }
        )
    checks = _redundancy_checks(rows, env)
    return rows, checks


def _redundancy_checks(rows, env) -> list[BoundCheck]:
    checks = []
    heavy = getattr(env, "gamma", 0.0) > 0.0
    if heavy:
        worst = max(r["mean_redundancy"] / r["mn_log2n"] for r in rows)
        checks.append(
            BoundCheck(
                "redundancy<=3.0*mn*log2(n)",
                all(r["mean_redundancy"] <= 3.0 * r["mn_log2n"] for r in rows),
                f"max ratio {worst:.3f}",
            )
        )
        ratios = [r["mean_redundancy"] / r["mn_log2n"] for r in rows]
        spread = max(ratios) / min(ratios)
        checks.append(
            BoundCheck("redundancy-ratio-spread<=4", spread <= 4.0, f"spread {spread:.3f}")
        )
    else:
        worst = max(
            r["mean_redundancy"] / (r["mn_log2n"] * math.log2(max(r["m_n"], 2.0))) for r in rows
        )
        checks.append(
            BoundCheck(
                "redundancy<=2.5*mn*log2(n)*log2(mn)",
                all(
                    r["mean_redundancy"] <= 2.5 * r["mn_log2n"] * math.log2(max(r["m_n"], 2.0))
                    for r in rows
                ),
                f"max ratio {worst:.3f}",
            )
        )
    per_symbol = [r["mean_redundancy"] / r["n"] for r in rows]
    slack = [3.0 * r["_se"] / r["n"] for r in rows]
    shrinking = all(b <= a + s for a, b, s in zip(per_symbol, per_symbol[1:], slack[1:]))
    checks.append(
        BoundCheck(
            "per-symbol-redundancy-shrinks",
            shrinking and per_symbol[-1] < per_symbol[0],
            f"{per_symbol[0]:.4f} -> {per_symbol[-1]:.4f} bits/symbol",
        )
    )
    floor = min(r["mean_redundancy"] for r in rows)
    checks.append(
        BoundCheck("no-impossible-compression", floor >= -1.0, f"min mean redundancy {floor:.3f}")
    )
    return checks


THRESHOLD_COLUMNS = [
    "n",
    "trials",
    "mean_m",
    "var_m",
    "se_m",
    "m_n",
    "mean_bound",
    "exceed1_rate",
    "exceed1_bernstein",
    "exceed2_rate",
    "exceed2_bernstein",
]


def threshold_stats(cfg: ExperimentConfig) -> tuple[list[dict], list[BoundCheck]]:
    if cfg.trials < 200:
        raise ValueError("threshold concentration statistics need >= 200 trials")
    source = cfg.make_source()
    env = cfg.envelope
    rows = []
    for n in cfg.n_grid:
        recs = _trials_for(cfg, source, n)
        ms = np.asarray([r.threshold_m for r in recs], dtype=np.float64)
        mean = float(np.mean(ms))
        var = float(np.var(ms, ddof=1))
        se = math.sqrt(var / cfg.trials)
        m_n = env.exact_threshold_m(float(n))
        mean_k, se_k = _mean_se([r.distinct_k for r in recs])
        row = {
            "n": n,
            "trials": cfg.trials,
            "mean_m": mean,
            "var_m": var,
            "se_m": se,
            "m_n": m_n,
            "mean_bound": m_n + 3.0 * math.sqrt(m_n) + 3.0,
            "_mean_k": mean_k,
            "_se_k": se_k,
        }
        for label, t in (("exceed1", math.sqrt(mean)), ("exceed2", 2.0 * math.sqrt(mean))):
            row[f"{label}_rate"] = float(np.mean(ms - mean >= t))
            row[f"{label}_bernstein"] = math.exp(-t * t / (2.0 * (mean + t / 3.0)))
        rows.append(row)
    slack = 1.0 + 4.0 / math.sqrt(cfg.trials)
    var_ok = all(r["var_m"] <= slack * r["mean_m"] for r in rows)
    worst = max(r["var_m"] / r["mean_m"] for r in rows)
    mean_ok = all(r["mean_m"] <= r["mean_bound"] + 3.0 * r["se_m"] for r in rows)
    checks = [
        BoundCheck("var<=mean", var_ok, f"max var/mean {worst:.3f}, slack {slack:.3f}"),
        BoundCheck(
            "mean<=mn+3sqrt(mn)+3",
            mean_ok,
            "; ".join(f"n={r['n']}: {r['mean_m']:.2f}<={r['mean_bound']:.2f}" for r in rows),
        ),
    ]
    return rows, checks


DISTINCT_COLUMNS = [
    "n",
    "trials",
    "mean_k",
    "se_k",
    "mean_m",
    "two_mean_m",
    "m_prime_n",
    "ratio_k_mprime",
]


def distinct_symbol_stats(cfg: ExperimentConfig) -> tuple[list[dict], list[BoundCheck]]:
    if cfg.trials < 200:
        raise ValueError("distinct-symbol statistics need >= 200 trials")
    source = cfg.make_source()
    analytic = cfg.bayes_construction().g_model() if cfg.source == "bayes" else source
    rows = []
    for n in cfg.n_grid:
        recs = _trials_for(cfg, source, n)
        mean_k, se_k = _mean_se([r.distinct_k for r in recs])
        mean_m, _ = _mean_se([r.threshold_m for r in recs])
        m_prime = analytic.m_prime(n)
        rows.append(
            {
                "n": n,
                "trials": cfg.trials,
                "mean_k": mean_k,
                "se_k": se_k,
                "mean_m": mean_m,
                "two_mean_m": 2.0 * mean_m,
                "m_prime_n": m_prime,
                "ratio_k_mprime": mean_k / m_prime,
            }
        )
    k_ok = all(r["mean_k"] <= r["two_mean_m"] + 3.0 * r["se_k"] for r in rows)
    checks = [
        BoundCheck(
            "K<=2M",
            k_ok,
            "; ".join(f"n={r['n']}: {r['mean_k']:.1f}<={r['two_mean_m']:.1f}" for r in rows),
        )
    ]
    if cfg.source == "bayes":
        ratios = [r["ratio_k_mprime"] for r in rows]
        spread = max(ratios) / min(ratios)
        checks.append(
            BoundCheck(
                "K/mprime-band<=x3",
                min(ratios) > 0.0 and spread <= 3.0,
                f"ratios in [{min(ratios):.3f}, {max(ratios):.3f}], spread {spread:.3f}",
            )
        )
    return rows, checks


def emit_csv(rows: list[dict], columns: list[str], path: str) -> None:
    """One header row, fixed column order, 12 significant digits for floats."""
    def fmt(v) -> str:
        if isinstance(v, float):
            return f"{v:.12g}"
        return str(v)

    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(fmt(row[c]) for c in columns) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
