"""Probability-distribution fitting and sampling.

Seven candidate families are fitted by method of moments; the fit quality
of each is the RMSE between the empirical CDF (Hazen plotting positions)
and the fitted CDF at the sample points. The family with the smallest
error wins, except that differences smaller than the ECDF sampling noise
floor (0.5/sqrt(n)) are treated as ties and resolved toward the family
with fewer parameters: fitting noise must not promote a heavier family
over an equivalent simpler one.

All time-like parameters are in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.special import gammainc

from .errors import InvalidArgumentError
from .rng import Rng

FAMILIES = ("fixed", "normal", "exponential", "uniform", "lognormal", "gamma", "triangular")

# Selection preference: (number of parameters, position) per family.
_PARAM_COUNT = {
    "fixed": 1,
    "exponential": 1,
    "uniform": 2,
    "normal": 2,
    "lognormal": 2,
    "gamma": 2,
    "triangular": 3,
}
_PREFERENCE = ("fixed", "exponential", "uniform", "normal", "lognormal", "gamma", "triangular")


@dataclass(frozen=True, slots=True)
class DistributionSpec:
    """A fitted density family with its parameters and fit quality."""

    family: str
    params: dict = field(default_factory=dict)
    fit_error: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidArgumentError(f"unknown family {self.family!r}")
        if self.fit_error < 0:
            raise InvalidArgumentError("fit_error must be >= 0")
        p = self.params
        if self.family == "normal" and p["std"] <= 0:
            raise InvalidArgumentError("normal std must be > 0")
        if self.family == "exponential" and p["mean"] <= 0:
            raise InvalidArgumentError("exponential mean must be > 0")
        if self.family == "uniform" and p["low"] > p["high"]:
            raise InvalidArgumentError("uniform low must be <= high")
        if self.family == "lognormal" and p["sigma"] <= 0:
            raise InvalidArgumentError("lognormal sigma must be > 0")
        if self.family == "gamma" and (p["shape"] <= 0 or p["scale"] <= 0):
            raise InvalidArgumentError("gamma shape and scale must be > 0")
        if self.family == "triangular" and not (p["low"] <= p["mode"] <= p["high"]):
            raise InvalidArgumentError("triangular needs low <= mode <= high")

    def mean(self) -> float:
        p = self.params
        if self.family == "fixed":
            return p["value"]
        if self.family == "normal":
            return p["mean"]
        if self.family == "exponential":
            return p["mean"]
        if self.family == "uniform":
            return (p["low"] + p["high"]) / 2.0
        if self.family == "lognormal":
            return math.exp(p["mu"] + p["sigma"] ** 2 / 2.0)
        if self.family == "gamma":
            return p["shape"] * p["scale"]
        return (p["low"] + p["mode"] + p["high"]) / 3.0

    def cdf(self, x: float) -> float:
        p = self.params
        if self.family == "fixed":
            return 1.0 if x >= p["value"] else 0.0
        if self.family == "normal":
            return 0.5 * (1.0 + math.erf((x - p["mean"]) / (p["std"] * math.sqrt(2.0))))
        if self.family == "exponential":
            return 0.0 if x < 0 else 1.0 - math.exp(-x / p["mean"])
        if self.family == "uniform":
            if p["high"] == p["low"]:
                return 1.0 if x >= p["low"] else 0.0
            return min(1.0, max(0.0, (x - p["low"]) / (p["high"] - p["low"])))
        if self.family == "lognormal":
            if x <= 0:
                return 0.0
            return 0.5 * (1.0 + math.erf((math.log(x) - p["mu"]) / (p["sigma"] * math.sqrt(2.0))))
        if self.family == "gamma":
            if x <= 0:
                return 0.0
            return float(gammainc(p["shape"], x / p["scale"]))
        # triangular
        lo, mo, hi = p["low"], p["mode"], p["high"]
        if x <= lo:
            return 0.0
        if x >= hi:
            return 1.0
        if hi == lo:
            return 1.0
        if x <= mo:
            denom = (hi - lo) * (mo - lo)
            return (x - lo) ** 2 / denom if denom > 0 else 0.0
        denom = (hi - lo) * (hi - mo)
        return 1.0 - ((hi - x) ** 2 / denom if denom > 0 else 0.0)

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "fit_error": self.fit_error}

    @staticmethod
    def from_dict(d: dict) -> "DistributionSpec":
        return DistributionSpec(d["family"], dict(d["params"]), d.get("fit_error", 0.0))

    @staticmethod
    def fixed(value: float) -> "DistributionSpec":
        return DistributionSpec("fixed", {"value": float(value)})

    @staticmethod
    def exponential(mean: float) -> "DistributionSpec":
        return DistributionSpec("exponential", {"mean": float(mean)})

    @staticmethod
    def normal(mean: float, std: float) -> "DistributionSpec":
        return DistributionSpec("normal", {"mean": float(mean), "std": float(std)})

    @staticmethod
    def uniform(low: float, high: float) -> "DistributionSpec":
        return DistributionSpec("uniform", {"low": float(low), "high": float(high)})


def _moment_fits(samples: list[float], mean: float, var: float) -> dict[str, dict]:
    """Method-of-moments parameters per family; data has positive variance."""
    std = math.sqrt(var)
    lo, hi = min(samples), max(samples)
    fits: dict[str, dict] = {
        "fixed": {"value": mean},
        "normal": {"mean": mean, "std": std},
        "uniform": {"low": mean - math.sqrt(3.0) * std, "high": mean + math.sqrt(3.0) * std},
    }
    if mean > 0:
        fits["exponential"] = {"mean": mean}
        sigma2 = math.log(1.0 + var / mean**2)
        fits["lognormal"] = {"mu": math.log(mean) - sigma2 / 2.0, "sigma": math.sqrt(sigma2)}
        fits["gamma"] = {"shape": mean**2 / var, "scale": var / mean}
    mode = min(max(3.0 * mean - lo - hi, lo), hi)
    fits["triangular"] = {"low": lo, "mode": mode, "high": hi}
    return fits


def cdf_rmse(spec: DistributionSpec, sorted_samples: list[float]) -> float:
    """RMSE between the fitted CDF and Hazen-position ECDF at the samples."""
    n = len(sorted_samples)
    sq = 0.0
    for i, x in enumerate(sorted_samples):
        p = (i + 0.5) / n
        sq += (spec.cdf(x) - p) ** 2
    return math.sqrt(sq / n)


def fit_distribution(samples) -> DistributionSpec:
    """Fit every candidate family and return the best by CDF RMSE.

    Fewer than 5 samples, or zero variance, short-circuits to fixed(mean).
    """
    data = [float(x) for x in samples]
    if not data:
        raise InvalidArgumentError("fit_distribution needs at least one sample")
    for x in data:
        if x < 0:
            raise InvalidArgumentError(f"negative sample {x}")
    n = len(data)
    mean = sum(data) / n
    if n < 5 or min(data) == max(data):
        return DistributionSpec("fixed", {"value": mean}, 0.0)
    var = sum((x - mean) ** 2 for x in data) / n
    ordered = sorted(data)
    candidates: list[tuple[str, DistributionSpec]] = []
    for family, params in _moment_fits(data, mean, var).items():
        spec = DistributionSpec(family, params)
        candidates.append((family, DistributionSpec(family, params, cdf_rmse(spec, ordered))))
    best_err = min(spec.fit_error for _, spec in candidates)
    noise_floor = 0.5 / math.sqrt(n)
    eligible = [spec for _, spec in candidates if spec.fit_error <= best_err + noise_floor]
    eligible.sort(key=lambda s: (_PARAM_COUNT[s.family], _PREFERENCE.index(s.family)))
    return eligible[0]


def sample(spec: DistributionSpec, rng: Rng) -> float:
    """Draw one non-negative value from a fitted family.

    Draws that come out negative (possible for normal and for uniform or
    triangular fits with a negative lower bound) are retried up to 100
    times and finally clamped to 0.
    """
    for _ in range(101):
        x = _draw(spec, rng)
        if x >= 0.0:
            return x
    return 0.0


def _draw(spec: DistributionSpec, rng: Rng) -> float:
    p = spec.params
    fam = spec.family
    if fam == "fixed":
        return p["value"]
    if fam == "normal":
        return p["mean"] + p["std"] * rng.normal()
    if fam == "exponential":
        return -p["mean"] * math.log(1.0 - rng.uniform())
    if fam == "uniform":
        return p["low"] + (p["high"] - p["low"]) * rng.uniform()
    if fam == "lognormal":
        return math.exp(p["mu"] + p["sigma"] * rng.normal())
    if fam == "gamma":
        return _draw_gamma(p["shape"], p["scale"], rng)
    # triangular inverse CDF
    lo, mo, hi = p["low"], p["mode"], p["high"]
    if hi == lo:
        return lo
    u = rng.uniform()
    cut = (mo - lo) / (hi - lo)
    if u < cut:
        return lo + math.sqrt(u * (hi - lo) * (mo - lo))
    return hi - math.sqrt((1.0 - u) * (hi - lo) * (hi - mo))


def _draw_gamma(shape: float, scale: float, rng: Rng) -> float:
    # Marsaglia-Tsang squeeze; shape < 1 boosted via the power trick.
    if shape < 1.0:
        u = rng.uniform()
        return _draw_gamma(shape + 1.0, scale, rng) * (1.0 - u) ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = rng.normal()
        t = 1.0 + c * x
        if t <= 0.0:
            continue
        v = t * t * t
        u = rng.uniform()
        if u < 1.0 - 0.0331 * x**4:
            return d * v * scale
        if u > 0.0 and math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
            return d * v * scale
