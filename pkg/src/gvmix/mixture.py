"""The bivariate model ``(X, W)`` with ``X | W ~ N(mu, W)``."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np

from .errors import DomainError
from .wfamily import MixingFamily, open_uniform

__all__ = [
    "Observation",
    "SampleSet",
    "joint_density",
    "log_joint_density",
    "sample_pairs",
    "log_likelihood",
    "score",
    "sufficient_statistic",
    "read_csv",
]

_LOG_2PI = math.log(2.0 * math.pi)


class Observation(NamedTuple):
    x: float
    w: float


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Observed pairs ``(x_i, w_i)`` stored column-wise.

    ``true_mu``, ``seed`` and ``family`` are provenance for synthetic data and
    are ``None`` for data read from elsewhere.
    """

    x: np.ndarray
    w: np.ndarray
    true_mu: float | None = None
    seed: object = None
    family: str | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64).ravel()
        w = np.asarray(self.w, dtype=np.float64).ravel()
        if x.shape != w.shape:
            raise DomainError("x and w must have the same length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            raise DomainError("observations must be finite")
        if np.any(w <= 0.0):
            raise DomainError("every w_i must be positive")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "w", w)

    @classmethod
    def from_observations(cls, observations, **meta) -> "SampleSet":
        obs = list(observations)
        return cls([o[0] for o in obs], [o[1] for o in obs], **meta)

    def __len__(self) -> int:
        return self.x.size

    def __iter__(self) -> Iterator[Observation]:
        for x, w in zip(self.x.tolist(), self.w.tolist()):
            yield Observation(x, w)

    @property
    def observations(self) -> list[Observation]:
        return list(self)

    def concat(self, other: "SampleSet") -> "SampleSet":
        return SampleSet(np.concatenate([self.x, other.x]), np.concatenate([self.w, other.w]))

    def metadata(self) -> dict:
        seed = self.seed
        if isinstance(seed, np.integer):
            seed = int(seed)
        elif isinstance(seed, (tuple, np.ndarray)):
            seed = [int(s) for s in seed]
        return {"family": self.family, "mu": self.true_mu, "seed": seed, "n": len(self)}

    def to_csv(self, path, sidecar: bool = True) -> Path:
        """Write ``x,w`` rows with round-trip float formatting.

        The metadata sidecar goes to the same path with a ``.json`` suffix.
        """
        path = Path(path)
        with path.open("w", newline="") as fh:
            fh.write("x,w\n")
            for x, w in zip(self.x.tolist(), self.w.tolist()):
                fh.write(f"{x!r},{w!r}\n")
        if sidecar:
            path.with_suffix(".json").write_text(json.dumps(self.metadata(), indent=2) + "\n")
        return path


def read_csv(path) -> SampleSet:
    """Read a CSV with header ``x,w``; picks up the JSON sidecar if present."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip().lower() for h in next(reader, [])]
        if header[:2] != ["x", "w"]:
            raise DomainError(f"{path}: expected header 'x,w', got {','.join(header)!r}")
        rows = [r for r in reader if r]
    try:
        xs = [float(r[0]) for r in rows]
        ws = [float(r[1]) for r in rows]
    except (ValueError, IndexError) as exc:
        raise DomainError(f"{path}: malformed row ({exc})") from None
    meta = {}
    side = path.with_suffix(".json")
    if side.exists() and side != path:
        raw = json.loads(side.read_text())
        meta = {"true_mu": raw.get("mu"), "seed": raw.get("seed"), "family": raw.get("family")}
    return SampleSet(xs, ws, **meta)


def _check_w(w):
    w = np.asarray(w, dtype=np.float64)
    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        raise DomainError("w must be positive and finite")
    return w


def log_joint_density(family: MixingFamily, x, w, mu: float):
    """``log g(x, w; mu)``; ``-inf`` where ``w`` lies above the support."""
    scalar = np.ndim(x) == 0 and np.ndim(w) == 0
    w = _check_w(w)
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore"):
        out = family.log_pdf(w) - 0.5 * (_LOG_2PI + np.log(w)) - (x - mu) ** 2 / (2.0 * w)
    return float(out) if scalar else out


def joint_density(family: MixingFamily, x, w, mu: float):
    """``g_W(w) * (2 pi w)**-0.5 * exp(-(x - mu)**2 / (2 w))``."""
    scalar = np.ndim(x) == 0 and np.ndim(w) == 0
    w = _check_w(w)
    x = np.asarray(x, dtype=np.float64)
    out = family.pdf(w) / np.sqrt(2.0 * math.pi * w) * np.exp(-((x - mu) ** 2) / (2.0 * w))
    return float(out) if scalar else out


def sample_pairs(family: MixingFamily, n: int, mu: float = 0.0, seed=None) -> SampleSet:
    """Draw ``X_i = mu + sqrt(W_i) Z_i`` with ``W_i ~ family``.

    Stream layout: ``n`` open uniforms (mapped through the quantile), then
    ``n`` standard normals. The experiment kernels consume the same layout,
    so ``sample_pairs(f, n, mu, seed=(s, n, r))`` reproduces replication
    ``r`` of an experiment exactly.
    """
    if n < 0:
        raise DomainError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    w = family.quantile(open_uniform(rng, n)) if n else np.empty(0)
    w = np.asarray(w, dtype=np.float64)
    z = rng.standard_normal(n)
    x = mu + np.sqrt(w) * z
    return SampleSet(x, w, true_mu=float(mu), seed=seed, family=family.spec)


def log_likelihood(family: MixingFamily, sample: SampleSet, mu: float) -> float:
    """``sum_i log g(x_i, w_i; mu)``.

    Observations with ``w_i`` outside the support have zero likelihood, so the
    result is ``-inf`` rather than an error.
    """
    if len(sample) == 0:
        raise DomainError("log-likelihood of an empty sample")
    terms = log_joint_density(family, sample.x, sample.w, mu)
    if np.any(np.isneginf(terms)):
        return -math.inf
    return math.fsum(terms)


def score(x, w, mu: float):
    """``d/dmu log g(x, w; mu) = (x - mu) / w``."""
    scalar = np.ndim(x) == 0 and np.ndim(w) == 0
    w = _check_w(w)
    out = (np.asarray(x, dtype=np.float64) - mu) / w
    return float(out) if scalar else out


def sufficient_statistic(x, w):
    """Natural statistic ``(x / w, -1 / (2 w))`` of the curved exponential family."""
    w = _check_w(w)
    x = np.asarray(x, dtype=np.float64)
    t1, t2 = x / w, -0.5 / w
    if t1.ndim == 0:
        return float(t1), float(t2)
    return t1, t2
