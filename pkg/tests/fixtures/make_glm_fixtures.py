"""Regenerate the bundled GLM fixtures and freeze grid-search MLE values.

Run from the repository root: ``python tests/fixtures/make_glm_fixtures.py``.
The solver under test is never called here.
"""

import csv
import json
import sys
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE.parent))

from oracles import grid_mle  # noqa: E402

# name: (rows, true coefficients incl. intercept, covariate kinds, seed)
SPECS = {
    "two_cov_40": (40, [0.3, 1.0, -0.5], ["normal", "normal"], 11),
    "one_cov_30": (30, [-0.4, 0.8], ["normal"], 12),
    "binary_cov_50": (50, [-0.2, 1.1], ["binary"], 13),
    "three_cov_60": (60, [0.1, 0.7, -0.6, 0.4], ["normal", "uniform", "binary"], 14),
    "scaled_cov_45": (45, [0.5, 0.002, -1.2], ["km", "normal"], 15),
}


def make(rows, beta, kinds, seed):
    rng = np.random.default_rng(seed)
    cols = [np.ones(rows)]
    for kind in kinds:
        if kind == "normal":
            cols.append(rng.normal(size=rows))
        elif kind == "uniform":
            cols.append(rng.uniform(0, 1, size=rows))
        elif kind == "binary":
            cols.append((rng.random(rows) < 0.4).astype(float))
        elif kind == "km":
            cols.append(rng.uniform(0, 700, size=rows))
    X = np.column_stack(cols)
    p = 1 / (1 + np.exp(-(X @ np.array(beta))))
    y = (rng.random(rows) < p).astype(float)
    return np.round(X, 6), y


def main():
    frozen = {}
    for name, (rows, beta, kinds, seed) in SPECS.items():
        X, y = make(rows, beta, kinds, seed)
        with open(HERE / f"glm_{name}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["y"] + [f"x{j}" for j in range(X.shape[1])])
            for yi, xi in zip(y, X):
                w.writerow([int(yi)] + [repr(float(v)) for v in xi])
        # rescale wide columns so one grid box suits every coordinate
        scale = np.maximum(1.0, np.abs(X).max(axis=0))
        est = grid_mle(X / scale, y) / scale
        frozen[name] = [float(v) for v in est]
        print(name, frozen[name])
    (HERE / "glm_oracle.json").write_text(json.dumps(frozen, indent=2) + "\n")


if __name__ == "__main__":
    main()
