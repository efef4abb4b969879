"""Binary logistic regression by iteratively reweighted least squares.

Everything here works on plain numpy arrays: ``X`` is an ``(n, p)`` design
matrix (normally with an intercept column) and ``y`` a 0/1 vector.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from homeadv.errors import (
    DegenerateLabelsError,
    InsufficientDataError,
    InvalidInferenceError,
    SingularSystemError,
)
from homeadv.features import dependent_columns

PROB_CLIP = 1e-12


@dataclass(frozen=True)
class FitOptions:
    max_iterations: int = 50
    convergence_tol: float = 1e-8
    ridge_epsilon: float = 0.0
    separation_threshold: float = 15.0
    step_halving: bool = True
    max_halvings: int = 40
    # a standard error growing by more than this factor over the fit counts as diverging
    se_divergence_ratio: float = 1e3

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be > 0")
        if self.ridge_epsilon < 0:
            raise ValueError("ridge_epsilon must be >= 0")


def _sigmoid(eta):
    return 0.5 * (1.0 + np.tanh(0.5 * eta))


def log_likelihood(beta, X, y) -> float:
    """Bernoulli log-likelihood under the logit link, with probabilities clipped to [1e-12, 1 - 1e-12]."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if X.ndim != 2 or X.shape[1] != beta.shape[0] or X.shape[0] != y.shape[0]:
        raise ValueError(f"dimension mismatch: X {X.shape}, beta {beta.shape}, y {y.shape}")
    p = np.clip(_sigmoid(X @ beta), PROB_CLIP, 1.0 - PROB_CLIP)
    return float(np.sum(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def _exact_loglik(eta, y) -> float:
    # log p = -log(1 + e^-eta), log(1-p) = -log(1 + e^eta); no clipping so ascent stays visible
    return float(-np.sum(y * np.logaddexp(0.0, -eta) + (1.0 - y) * np.logaddexp(0.0, eta)))


def null_log_likelihood(y) -> float:
    """Maximised log-likelihood of the intercept-only model."""
    y = np.asarray(y, dtype=float)
    n, k = y.size, float(y.sum())
    ll = 0.0
    if k > 0:
        ll += k * math.log(k / n)
    if n - k > 0:
        ll += (n - k) * math.log((n - k) / n)
    return ll


def wald_p(coefficient: float, std_error: float) -> float:
    """Two-sided normal tail probability of coefficient / std_error."""
    if not std_error > 0:
        raise InvalidInferenceError(f"standard error must be positive, got {std_error}")
    if math.isinf(std_error):
        return 1.0
    z = coefficient / std_error
    return math.erfc(abs(z) / math.sqrt(2.0))


def pseudo_r2(loglik_full: float, loglik_null: float, n: int) -> tuple[float, float]:
    """Cox & Snell and Nagelkerke pseudo-R² from the two log-likelihoods."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if loglik_full < loglik_null - 1e-9 * max(1.0, abs(loglik_null)):
        raise ValueError("full-model log-likelihood below the null model")
    cox_snell = -math.expm1((2.0 / n) * (loglik_null - loglik_full))
    max_cs = -math.expm1((2.0 / n) * loglik_null)
    nagelkerke = cox_snell / max_cs if max_cs > 0 else 0.0
    return cox_snell, nagelkerke


@dataclass
class FitResult:
    columns: list[str]
    coefficients: np.ndarray
    std_errors: np.ndarray
    z_scores: np.ndarray
    p_values: np.ndarray
    loglik_full: float
    loglik_null: float
    n: int
    cox_snell: float
    nagelkerke: float
    converged: bool
    iterations: int
    separation_warnings: list[str] = field(default_factory=list)
    ridge_epsilon: float = 0.0
    loglik_trace: list[float] = field(default_factory=list)
    # inverse information; rows/columns of unidentified directions are inf
    covariance: np.ndarray | None = field(default=None, repr=False)

    def coef(self, name: str) -> float:
        return float(self.coefficients[self.columns.index(name)])

    def p_value(self, name: str) -> float:
        return float(self.p_values[self.columns.index(name)])

    def significant(self, threshold: float = 0.10, include_intercept: bool = False) -> list[str]:
        return [
            c
            for c, p in zip(self.columns, self.p_values)
            if p < threshold and (include_intercept or c != "intercept")
        ]

    def predict_proba(self, X) -> np.ndarray:
        return _sigmoid(np.asarray(X, dtype=float) @ self.coefficients)

    def to_dict(self) -> dict:
        def num(x):
            x = float(x)
            return x if math.isfinite(x) else None

        return {
            "n": self.n,
            "converged": self.converged,
            "iterations": self.iterations,
            "loglik_full": num(self.loglik_full),
            "loglik_null": num(self.loglik_null),
            "cox_snell_r2": num(self.cox_snell),
            "nagelkerke_r2": num(self.nagelkerke),
            "ridge_epsilon": self.ridge_epsilon,
            "separation_warnings": list(self.separation_warnings),
            "coefficients": [
                {
                    "variable": c,
                    "coefficient": num(b),
                    "std_error": num(s),
                    "z": num(z),
                    "p_value": num(p),
                }
                for c, b, s, z, p in zip(
                    self.columns, self.coefficients, self.std_errors, self.z_scores, self.p_values
                )
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self, p_threshold: float | None = None) -> str:
        """Aligned table of variable and coefficient with an N / pseudo-R² footer.

        With ``p_threshold`` only non-intercept rows with p below it are listed.
        """
        rows = [("Variable", "Coefficient", "Std. error", "p")]
        for c, b, s, p in zip(self.columns, self.coefficients, self.std_errors, self.p_values):
            if p_threshold is not None and (c == "intercept" or not p < p_threshold):
                continue
            rows.append((c, f"{b:.3f}", f"{s:.3f}", f"{p:.4f}"))
        widths = [max(len(r[j]) for r in rows) for j in range(4)]
        lines = [
            "  ".join([r[0].ljust(widths[0])] + [r[j].rjust(widths[j]) for j in range(1, 4)])
            for r in rows
        ]
        lines.insert(1, "-" * len(lines[0]))
        if len(rows) == 1:
            lines.append("(no significant variables)")
        lines.append(
            f"N = {self.n}; Cox & Snell R2 = {self.cox_snell:.3f}; Nagelkerke R2 = {self.nagelkerke:.3f}"
        )
        if not self.converged:
            lines.append(f"WARNING: not converged after {self.iterations} iterations")
        if self.separation_warnings:
            lines.append("WARNING: possible separation in " + ", ".join(self.separation_warnings))
        if self.ridge_epsilon > 0:
            lines.append(f"NOTE: ridge stabilizer active (epsilon = {self.ridge_epsilon:g})")
        return "\n".join(lines) + "\n"


def detect_separation(
    trace: Sequence[tuple[np.ndarray, np.ndarray]],
    columns: Sequence[str],
    threshold: float = 15.0,
    divergence_ratio: float = 1e3,
) -> list[str]:
    """Columns whose coefficient magnitude exceeds ``threshold`` or whose SE blows up.

    ``trace`` holds one ``(coefficients, std_errors)`` pair per iteration.
    """
    if not trace:
        return []
    beta_last, se_last = trace[-1]
    se_first = trace[0][1]
    flagged = []
    for j, name in enumerate(columns):
        big = not np.isfinite(beta_last[j]) or abs(beta_last[j]) > threshold
        diverging = not np.isfinite(se_last[j]) or (
            len(trace) > 1 and se_first[j] > 0 and se_last[j] / se_first[j] > divergence_ratio
        )
        if big or diverging:
            flagged.append(name)
    return flagged


def _covariance(H: np.ndarray, rcond: float = 1e-12, null_loading: float = 1e-6) -> np.ndarray:
    """Inverse information restricted to the directions with real curvature.

    Columns loading on a (numerically) flat direction get infinite variance;
    the rest keep finite entries, so one diverging coefficient does not wipe
    out inference for the others.
    """
    k = H.shape[0]
    lam, V = np.linalg.eigh((H + H.T) / 2)
    if not np.all(np.isfinite(lam)) or lam[-1] <= 0:
        return np.full((k, k), np.inf)
    good = lam > rcond * lam[-1]
    cov = (V[:, good] / lam[good]) @ V[:, good].T
    flat = (V[:, ~good] ** 2).sum(axis=1) > null_loading
    cov[flat, :] = np.inf
    cov[:, flat] = np.inf
    return cov


def _std_errors(H: np.ndarray) -> np.ndarray:
    d = np.diag(_covariance(H))
    with np.errstate(invalid="ignore"):
        return np.where(d > 0, np.sqrt(np.abs(d)), np.inf)


STEP_TOL = 1e-7


def fit_logistic(X, y, columns: Sequence[str] | None = None, options: FitOptions | None = None) -> FitResult:
    """Maximum-likelihood logistic regression via IRLS (Newton-Raphson).

    Each Newton step is halved until the (penalized, if ridge is on)
    log-likelihood no longer decreases. Convergence is declared when the
    relative log-likelihood change drops below ``convergence_tol`` and the
    Newton step is below ``STEP_TOL`` (relative to the coefficient size); the
    likelihood change alone is quadratic in the step and stops too early.
    Standard errors come from the inverse information matrix at the
    returned coefficients.

    Raises ``DegenerateLabelsError`` for single-class labels and
    ``SingularSystemError`` for a rank-deficient design when no ridge is
    set. Non-convergence is reported through ``converged=False``.
    """
    opts = options or FitOptions()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    cols = list(columns) if columns is not None else [f"x{j}" for j in range(k)]
    if len(cols) != k:
        raise ValueError("column names do not match design width")
    if y.shape != (n,) or not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be a 0/1 vector matching the rows of X")
    if n < k:
        raise InsufficientDataError(f"{n} observations for {k} columns")
    if y.min() == y.max():
        raise DegenerateLabelsError(f"all {n} labels equal {int(y[0])}")
    ridge = opts.ridge_epsilon
    if ridge == 0:
        bad = dependent_columns(X, cols)
        if bad:
            raise SingularSystemError(bad)

    def objective(b, eta):
        return _exact_loglik(eta, y) - 0.5 * ridge * float(b @ b)

    beta = np.zeros(k)
    eta = X @ beta
    obj = objective(beta, eta)
    ll_trace = [_exact_loglik(eta, y)]
    trace: list[tuple[np.ndarray, np.ndarray]] = []
    converged = False
    iterations = 0
    for iterations in range(1, opts.max_iterations + 1):
        p = _sigmoid(eta)
        w = p * (1.0 - p)
        grad = X.T @ (y - p) - ridge * beta
        H = X.T @ (w[:, None] * X) + ridge * np.eye(k)
        try:
            step = np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        t = 1.0
        new_beta = beta + step
        new_eta = X @ new_beta
        new_obj = objective(new_beta, new_eta)
        halvings = 0
        # differences below rounding noise are not a decrease
        slack = 4 * np.finfo(float).eps * max(1.0, abs(obj))
        while opts.step_halving and new_obj < obj - slack and halvings < opts.max_halvings:
            t *= 0.5
            halvings += 1
            new_beta = beta + t * step
            new_eta = X @ new_beta
            new_obj = objective(new_beta, new_eta)
        if new_obj < obj - slack:
            # no ascent possible along the Newton direction: at numerical optimum
            converged = float(np.max(np.abs(grad))) < 1e-6
            break
        change = abs(new_obj - obj)
        beta, eta = new_beta, new_eta
        prev_obj, obj = obj, new_obj
        ll_trace.append(_exact_loglik(eta, y))
        p = _sigmoid(eta)
        Hn = X.T @ ((p * (1.0 - p))[:, None] * X) + ridge * np.eye(k)
        trace.append((beta.copy(), _std_errors(Hn)))
        if obj == 0.0:
            # perfect fit: the likelihood has no interior maximum
            break
        small_step = t * float(np.max(np.abs(step))) <= STEP_TOL * (1.0 + float(np.max(np.abs(beta))))
        if change <= opts.convergence_tol * max(abs(prev_obj), 1e-300) and small_step:
            converged = True
            break

    p = _sigmoid(eta)
    H = X.T @ ((p * (1.0 - p))[:, None] * X) + ridge * np.eye(k)
    cov = _covariance(H)
    d = np.diag(cov)
    with np.errstate(invalid="ignore"):
        se = np.where(d > 0, np.sqrt(np.abs(d)), np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(np.isfinite(se), beta / se, 0.0)
    pvals = np.array([wald_p(b, s) if s > 0 else float("nan") for b, s in zip(beta, se)])
    ll_full = log_likelihood(beta, X, y)
    ll_null = null_log_likelihood(y)
    if ll_full >= ll_null - 1e-9 * max(1.0, abs(ll_null)):
        cs, nk = pseudo_r2(max(ll_full, ll_null), ll_null, n)
    else:
        cs = nk = float("nan")
    sep = detect_separation(trace, cols, opts.separation_threshold, opts.se_divergence_ratio)
    return FitResult(
        columns=cols,
        coefficients=beta,
        std_errors=se,
        z_scores=z,
        p_values=pvals,
        loglik_full=ll_full,
        loglik_null=ll_null,
        n=n,
        cox_snell=cs,
        nagelkerke=nk,
        converged=converged,
        iterations=iterations,
        separation_warnings=sep,
        ridge_epsilon=ridge,
        loglik_trace=ll_trace,
        covariance=cov,
    )
