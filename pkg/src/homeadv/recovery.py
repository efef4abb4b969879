"""Monte Carlo estimator-recovery experiments on synthetic seasons."""

from __future__ import annotations

import io
import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from homeadv.config import StudyConfig
from homeadv.errors import HomeAdvError
from homeadv.glm import FitResult, wald_p
from homeadv.pipeline import ALL, STRATA, run_study
from homeadv.synth import SimParams, generate_season, replication_params, true_coefficients

Z95 = 1.959963984540054
HOME_EFFECT = "home_effect"


def home_effect(fit: FitResult, column_means, cutpoint: float = 0.0) -> tuple[float, float, float]:
    """Home-win log-odds at the average covariate profile, plus ``cutpoint``.

    With raw (uncentred) covariates the intercept is the log-odds at an
    all-zero profile (no fouls, empty stadium), far from the data and noisy.
    Evaluating the linear predictor at the column means is the intercept of
    the centred model; adding the draw cutpoint puts it on the scale of the
    simulator's ``beta_home``. Returns ``(estimate, std_error, p_value)``.
    """
    m = np.asarray(column_means, dtype=float)
    est = float(m @ fit.coefficients) + cutpoint
    cov = fit.covariance
    used = m != 0
    if cov is None or not np.all(np.isfinite(cov[np.ix_(used, used)])):
        return est, math.inf, 1.0
    var = float(m[used] @ cov[np.ix_(used, used)] @ m[used])
    se = math.sqrt(var) if var > 0 else math.inf
    return est, se, wald_p(est, se)


def true_home_effect(params: SimParams, columns, column_means, stratum: str | None = None) -> float:
    """Truth for :func:`home_effect` given the sample's covariate means."""
    truth = true_coefficients(params, stratum)
    return params.beta_home + sum(
        truth.get(c, 0.0) * float(v) for c, v in zip(columns, column_means) if c != "intercept"
    )


@dataclass
class ParamSummary:
    name: str
    truth: float
    n_estimates: int
    mean: float
    bias: float
    rmse: float
    mae: float
    mc_std_error: float
    coverage: float
    significance_rate: float

    def to_dict(self) -> dict:
        return {k: (v if not isinstance(v, float) or math.isfinite(v) else None) for k, v in vars(self).items()}


@dataclass
class RecoveryResult:
    params: SimParams
    replications: int
    p_threshold: float
    # estimates[i][stratum][column] = (coefficient, std_error, p_value)
    estimates: list[dict[str, dict[str, tuple[float, float, float]]]] = field(default_factory=list)
    failures: list[tuple[int, str, str]] = field(default_factory=list)
    counts: list[dict[str, int]] = field(default_factory=list)
    # home_truth[i][stratum]: truth of the home effect, which depends on the sample means
    home_truth: list[dict[str, float]] = field(default_factory=list)

    def truth(self, stratum: str | None = None) -> dict[str, float]:
        return true_coefficients(self.params, stratum)

    def columns(self, stratum: str = ALL) -> list[str]:
        seen = {c for rep in self.estimates for c in rep.get(stratum, {})}
        return sorted(seen, key=lambda c: (c != HOME_EFFECT, c.startswith("coach:"), c != "intercept", c))

    def significance_rate(self, column: str, stratum: str = ALL) -> float:
        """Fraction of all replications in which ``column`` was fitted with p below the threshold."""
        hits = sum(
            1 for rep in self.estimates
            if column in rep.get(stratum, {}) and rep[stratum][column][2] < self.p_threshold
        )  # fmt: skip
        return hits / self.replications

    def summary(self, stratum: str = ALL) -> dict[str, ParamSummary]:
        truth = self.truth(stratum)
        out = {}
        for col in self.columns(stratum):
            idx = [i for i, rep in enumerate(self.estimates) if col in rep.get(stratum, {})]
            b = np.array([self.estimates[i][stratum][col][0] for i in idx])
            se = np.array([self.estimates[i][stratum][col][1] for i in idx])
            if col == HOME_EFFECT:
                t = np.array([self.home_truth[i][stratum] for i in idx])
            else:
                t = np.full(len(idx), truth.get(col, 0.0))
            k = len(b)
            finite = np.isfinite(se)
            out[col] = ParamSummary(
                name=col,
                truth=float(t.mean()),
                n_estimates=k,
                mean=float(b.mean()),
                bias=float(np.mean(b - t)),
                rmse=float(np.sqrt(np.mean((b - t) ** 2))),
                mae=float(np.mean(np.abs(b - t))),
                mc_std_error=float(b.std(ddof=1) / math.sqrt(k)) if k > 1 else float("nan"),
                coverage=(
                    float(np.mean(finite & (np.abs(b - t) <= Z95 * se))) if np.all(np.isfinite(t)) else math.nan
                ),
                significance_rate=self.significance_rate(col, stratum),
            )
        return out

    def to_dict(self) -> dict:
        return {
            "replications": self.replications,
            "base_seed": self.params.seed,
            "p_threshold": self.p_threshold,
            "failures": [{"replication": i, "stratum": s, "error": e} for i, s, e in self.failures],
            "strata": {
                s: {c: ps.to_dict() for c, ps in self.summary(s).items()}
                for s in STRATA
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = ["stratum", "variable", "truth", "n_estimates", "mean", "bias", "rmse", "mae",
                "mc_std_error", "coverage", "significance_rate"]  # fmt: skip
        w.writerow(cols)
        for s in STRATA:
            for ps in self.summary(s).values():
                d = ps.to_dict()
                w.writerow([s, ps.name] + [("" if d[c] is None else f"{d[c]:.6g}" if isinstance(d[c], float) else d[c])
                                           for c in cols[2:]])  # fmt: skip
        return buf.getvalue()

    def to_text(self, stratum: str = ALL) -> str:
        lines = [
            f"Recovery experiment: {self.replications} replications, base seed {self.params.seed}, "
            f"stratum {stratum}",
            f"{'variable':<28}{'truth':>9}{'mean':>10}{'bias':>10}{'rmse':>9}{'cover95':>9}{'sig':>7}",
        ]
        for ps in self.summary(stratum).values():
            lines.append(
                f"{ps.name:<28}{ps.truth:>9.3f}{ps.mean:>10.4f}{ps.bias:>10.4f}"
                f"{ps.rmse:>9.4f}{ps.coverage:>9.2f}{ps.significance_rate:>7.2f}"
            )
        if self.failures:
            lines.append(f"{len(self.failures)} stratum fit failure(s):")
            lines += [f"  replication {i} [{s}]: {e}" for i, s, e in self.failures]
        return "\n".join(lines) + "\n"


def recovery_experiment(
    params: SimParams, replications: int, config: StudyConfig | None = None
) -> RecoveryResult:
    """Generate, analyse and record coefficient estimates ``replications`` times.

    Replication ``i`` uses seed ``params.seed + i``. Fit failures are
    logged per replication and never abort the batch.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    config = config or StudyConfig()
    result = RecoveryResult(params, replications, config.p_threshold)
    for i in range(replications):
        record: dict[str, dict[str, tuple[float, float, float]]] = {}
        try:
            ds, gaz = generate_season(replication_params(params, i))
            study = run_study(ds, gaz, config)
        except HomeAdvError as exc:
            result.failures.append((i, "*", str(exc)))
            result.estimates.append(record)
            result.counts.append({})
            result.home_truth.append({})
            continue
        truths: dict[str, float] = {}
        for rep in study.reports:
            if rep.fit is None:
                if rep.notice and rep.n:
                    result.failures.append((i, rep.stratum, rep.notice))
                continue
            f = rep.fit
            record[rep.stratum] = {
                c: (float(b), float(s), float(p))
                for c, b, s, p in zip(f.columns, f.coefficients, f.std_errors, f.p_values)
            }
            record[rep.stratum][HOME_EFFECT] = home_effect(f, rep.column_means, params.draw_cutpoint)
            truths[rep.stratum] = true_home_effect(params, rep.columns, rep.column_means, rep.stratum)
        result.estimates.append(record)
        result.home_truth.append(truths)
        result.counts.append(study.counts)
    return result
