"""Regenerate tests/fixtures/calibration.json.

Every rate constant the test-suite asserts is measured here once, on the
primes/sizes listed, and frozen.  The constants are empirical.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from klpaths.arith import field_context, is_prime
from klpaths.families import Kind, interval_coefficients, shift_range, window_count
from klpaths.limit_series import beta_table, series_values
from klpaths.sato_tate import SatoTateSampler
from klpaths.stats import IntervalSpec, main_term, short_sum_moment, sums_of_products

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "calibration.json"

# shift battery for the sums-of-products main term, total degree <= 4
BATTERY = [
    [0, 0],
    [0, 1],
    [0, 0, 0, 0],
    [0, 0, 1, 1],
    [0, 0, 1, 2],
    [-3, 0, 2, 5],
]
KATZ_PRIMES = [101, 199, 499, 1009]


def xp_scaled_gap(p: int, ts) -> float:
    """max over |h| < p/2 and t of p * |alpha_p(h;t)/sqrt p - beta(h;t)|."""
    ctx = field_context(p)
    hs = shift_range(p)
    worst = 0.0
    for t in ts:
        a = interval_coefficients(ctx, 1, window_count(p - 1, t), hs) / math.sqrt(p)
        b = beta_table(hs, [t])[0]
        worst = max(worst, float(np.max(np.abs(a - b))) * p)
    return worst


def truncation_constant(ms=(10, 100, 1000), ref=20000, samples=4000, seed=11) -> dict:
    """sqrt(m) * E|K(1/2) - K_m(1/2)| against a truncation at ``ref``."""
    hs_ref = np.arange(-(ref - 1), ref)
    sums = {m: 0.0 for m in ms}
    block = 250
    for b in range(0, samples, block):
        draws = SatoTateSampler(seed, stream=b // block).sample_array((block, len(hs_ref)))
        k_ref = series_values(draws, hs_ref, [0.5])[:, 0]
        for m in ms:
            keep = np.abs(hs_ref) < m
            k_m = series_values(draws[:, keep], hs_ref[keep], [0.5])[:, 0]
            sums[m] += float(np.sum(np.abs(k_ref - k_m)))
    return {str(m): sums[m] / samples * math.sqrt(m) for m in ms}


def main() -> None:
    ts = np.linspace(0, 1, 50)
    scan = [p for p in range(101, 998) if is_prime(p)]
    xp = max(xp_scaled_gap(p, ts) for p in scan)

    katz = {}
    for p in KATZ_PRIMES:
        katz[str(p)] = max(
            math.sqrt(p) * abs(sums_of_products(p, s) - main_term(s, p)) for s in BATTERY
        )
    katz_birch = {}
    for p in KATZ_PRIMES:
        katz_birch[str(p)] = max(
            math.sqrt(p) * abs(sums_of_products(p, s, Kind.BIRCH) - main_term(s, p)) for s in BATTERY
        )

    p = 1009
    length = math.isqrt(p - 1) + 1
    val = short_sum_moment(Kind.BIRCH, field_context(p), IntervalSpec(1, length), 8)
    delta2 = -math.log(val) / math.log(p) - 0.5

    data = {
        "xp_constant": xp,
        "xp_scan_primes": [scan[0], scan[-1]],
        "truncation_sqrt_m_mean_abs": truncation_constant(),
        "katz_battery": BATTERY,
        "katz_scaled_error": katz,
        "katz_scaled_error_birch": katz_birch,
        "birch_short_sum": {"p": p, "length": length, "alpha": 8, "value": val, "delta2": delta2},
    }
    # frozen values are the measured maxima rounded up; edit by hand only
    if OUT.exists():
        data["frozen"] = json.loads(OUT.read_text()).get("frozen", {})
    OUT.write_text(json.dumps(data, indent=2) + "\n")
    print(json.dumps(data, indent=2))


if __name__ == "__main__":
    main()
