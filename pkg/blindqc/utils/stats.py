from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats  # type: ignore


def total_variation_distance(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(key, 0.0) - q.get(key, 0.0)) for key in keys)


def normalize_counts(counts: Mapping[str, float]) -> dict:
    total = sum(counts.values())
    if total == 0:
        return {}
    return {key: value / total for key, value in sorted(counts.items())}


def uniformity_p_value(samples: Iterable[int], bins: int = 8) -> float:
    """Chi-square goodness of fit p-value of integer samples against the uniform law on 0..bins-1."""
    observed = histogram(list(samples), bins)
    return float(stats.chisquare(observed).pvalue)


def binomial_sigma(rate: float, trials: int) -> float:
    return float(np.sqrt(rate * (1.0 - rate) / trials))


def within_sigma(observed: float, expected: float, trials: int, k: float = 3.0) -> bool:
    return abs(observed - expected) <= k * binomial_sigma(expected, trials)


def histogram(values: Sequence[int], bins: int = 8) -> list:
    return np.bincount(np.asarray(values, dtype=int), minlength=bins).tolist()
