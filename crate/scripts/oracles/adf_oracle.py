"""Freeze augmented Dickey-Fuller reference results for 10 seeded series.

Requires numpy and `pip install statsmodels==0.14.6`. Five Gaussian random
walks and five white-noise series of length 200 are drawn from
`numpy.random.default_rng(20201103)`; each is tested with a constant term and
AIC lag selection over the default lag ceiling.
Output: crates/core/tests/fixtures/adf_oracle.json
"""
import json
from pathlib import Path

import numpy as np
from statsmodels.tsa.stattools import adfuller

ROOT = Path(__file__).resolve().parents[2]
OUT = ROOT / "crates/core/tests/fixtures/adf_oracle.json"
N = 200


def main():
    rng = np.random.default_rng(20201103)
    cases = []
    for k in range(10):
        shocks = rng.standard_normal(N)
        kind = "random_walk" if k < 5 else "white_noise"
        series = np.cumsum(shocks) if kind == "random_walk" else shocks
        stat, p, lag, nobs, _, _ = adfuller(series, regression="c", autolag="AIC")
        cases.append({
            "kind": kind,
            "series": [float(v) for v in series],
            "statistic": float(stat),
            "p_value": float(p),
            "lag_used": int(lag),
            "n_obs": int(nobs),
        })
    OUT.write_text(json.dumps({"regression": "c", "autolag": "AIC", "cases": cases}, indent=1) + "\n")
    for c in cases:
        print(c["kind"], round(c["statistic"], 4), round(c["p_value"], 4), c["lag_used"])


if __name__ == "__main__":
    main()
