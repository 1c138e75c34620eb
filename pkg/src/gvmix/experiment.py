"""Monte Carlo verification of the convergence rates of ``mu_hat``.

Three modes share one simulation loop:

``scaled_error``
    ``sqrt(B(n)) (mu_hat - mu)`` for beta < 1, ``sqrt(A(n)) (mu_hat - mu)`` for
    beta = 1, compared by two-sample KS with the limit law.
``s_n_limit``
    ``S_n / B(n)`` (compared with the subordinator) or ``S_n / A(n)`` (which
    concentrates at 1).
``rate_regression``
    median of ``|mu_hat - mu|`` per ``n`` and the least-squares slope of its
    logarithm against ``log n``.

Replication ``r`` at sample size ``n`` draws from ``default_rng([seed, n, r])``;
the reference samples use ``[seed, 0, 0]``. Results are therefore identical
for any number of workers.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import _backend
from .errors import DomainError
from .ratefns import condition_e_inv_w, rate_a, rate_b
from .stablelim import sample_scaled_error_limit, sample_subordinator
from .wfamily import MixingFamily, PointMass, open_uniform, parse_family

__all__ = [
    "DEFAULT_SEED",
    "MODES",
    "ExperimentConfig",
    "ExperimentResult",
    "parse_config",
    "load_config",
    "replication_rng",
    "simulate",
    "run",
    "run_scaled_error",
    "run_sn_limit",
    "run_rate_regression",
    "ks_two_sample",
    "ks_one_sample",
]

SCALED_ERROR = "scaled_error"
S_N_LIMIT = "s_n_limit"
RATE_REGRESSION = "rate_regression"
MODES = (SCALED_ERROR, S_N_LIMIT, RATE_REGRESSION)

DEFAULT_SEED = 12345
MIN_DISTRIBUTIONAL_REPLICATIONS = 100
REFERENCE_CAP = 100_000


# ---------------------------------------------------------------------------
# KS distances


def ks_two_sample(a, b) -> float:
    """Sup distance between the empirical CDFs of ``a`` and ``b``."""
    a = np.sort(np.asarray(a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise DomainError("KS distance needs two nonempty samples")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_one_sample(a, cdf) -> float:
    """Sup distance between the empirical CDF of ``a`` and a CDF callable."""
    a = np.sort(np.asarray(a, dtype=np.float64).ravel())
    n = a.size
    if n == 0:
        raise DomainError("KS distance needs a nonempty sample")
    f = np.asarray(cdf(a), dtype=np.float64)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """What to simulate. ``zero_noise`` sets every ``Z_i = 0`` (a test hook)."""

    family: MixingFamily | PointMass
    mu: float
    n_grid: tuple
    replications: int
    seed: int
    mode: str
    zero_noise: bool = False

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        object.__setattr__(self, "mu", float(self.mu))
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not grid:
            raise DomainError("n_grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("n_grid must be strictly increasing")
        if grid[0] < 1:
            raise DomainError("sample sizes must be positive")
        if int(self.seed) < 0:
            raise DomainError("seed must be a nonnegative integer")
        if self.replications < 1:
            raise DomainError("replications must be positive")
        if self.mode != RATE_REGRESSION:
            if self.replications < MIN_DISTRIBUTIONAL_REPLICATIONS:
                raise DomainError(
                    f"{self.mode} needs at least {MIN_DISTRIBUTIONAL_REPLICATIONS} replications"
                )
            if grid[0] < 2:
                raise DomainError("rate functions are defined for n >= 2")
        elif len(grid) < 3:
            raise DomainError("rate regression needs at least 3 sample sizes")

    def to_dict(self) -> dict:
        return {
            "family": self.family.spec,
            "mu": self.mu,
            "n_grid": list(self.n_grid),
            "replications": self.replications,
            "seed": int(self.seed),
            "mode": self.mode,
            "zero_noise": self.zero_noise,
        }

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [
            f"family = {d['family']}",
            f"mu = {d['mu']!r}",
            "n_grid = " + ", ".join(str(n) for n in d["n_grid"]),
            f"replications = {d['replications']}",
            f"seed = {d['seed']}",
            f"mode = {d['mode']}",
        ]
        return "\n".join(lines) + "\n"


def _parse_count(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise DomainError(f"not an integer count: {text!r}")
    return int(value)


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Required keys: ``family``, ``n_grid``, ``replications``, ``mode``.
    Optional: ``mu`` (default 0) and ``seed`` (default ``DEFAULT_SEED``).
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip().lower()
        if not eq or not key:
            raise DomainError(f"line {lineno}: expected 'key = value'")
        if key in raw:
            raise DomainError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value.strip()
    allowed = {"family", "mu", "n_grid", "replications", "seed", "mode"}
    unknown = set(raw) - allowed
    if unknown:
        raise DomainError(f"unknown config keys: {', '.join(sorted(unknown))}")
    missing = {"family", "n_grid", "replications", "mode"} - set(raw)
    if missing:
        raise DomainError(f"missing config keys: {', '.join(sorted(missing))}")
    try:
        grid = [_parse_count(tok) for tok in raw["n_grid"].replace(",", " ").split()]
        return ExperimentConfig(
            family=parse_family(raw["family"]),
            mu=float(raw.get("mu", "0")),
            n_grid=tuple(grid),
            replications=_parse_count(raw["replications"]),
            seed=_parse_count(raw.get("seed", str(DEFAULT_SEED))),
            mode=raw["mode"],
        )
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"bad config value: {exc}") from None


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


# ---------------------------------------------------------------------------
# simulation


def replication_rng(seed: int, n: int, r: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(n), int(r)])


def _reference_rng_seed(seed: int) -> list:
    return [int(seed), 0, 0]


def _one(family, mu: float, n: int, seed: int, r: int, zero_noise: bool):
    rng = replication_rng(seed, n, r)
    u = open_uniform(rng, n)
    z = rng.standard_normal(n)
    if zero_noise:
        z[:] = 0.0
    beta = family.beta if family.beta is not None else 1.0
    gamma = family.gamma if family.gamma is not None else 0.0
    return _backend.replicate(family.kernel_code, beta, gamma, mu, u, z)


def _block(args):
    family, mu, n, seed, r0, r1, zero_noise = args
    out = np.empty((r1 - r0, 2))
    for k, r in enumerate(range(r0, r1)):
        out[k] = _one(family, mu, n, seed, r, zero_noise)
    return n, r0, out


def simulate(config: ExperimentConfig, workers: int = 1) -> dict:
    """``{n: (mu_hat[R], s_n[R])}`` for every ``n`` in the grid."""
    R = config.replications
    out = {n: np.empty((R, 2)) for n in config.n_grid}
    if workers <= 1:
        tasks = [(config.family, config.mu, n, config.seed, 0, R, config.zero_noise) for n in config.n_grid]
        for task in tasks:
            n, r0, block = _block(task)
            out[n][r0 : r0 + len(block)] = block
    else:
        chunk = max(1, math.ceil(R / (4 * workers)))
        tasks = [
            (config.family, config.mu, n, config.seed, r0, min(R, r0 + chunk), config.zero_noise)
            for n in config.n_grid
            for r0 in range(0, R, chunk)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for n, r0, block in pool.map(_block, tasks):
                out[n][r0 : r0 + len(block)] = block
    return {n: (arr[:, 0].copy(), arr[:, 1].copy()) for n, arr in out.items()}


def _check_rate_theory(family) -> None:
    if isinstance(family, PointMass):
        raise DomainError("a point-mass mixing law has no nonstandard rate; use rate_regression")
    if family.beta == 1.0:
        verdict = condition_e_inv_w(family)
        if not verdict.infinite:
            raise DomainError(
                f"refusing {family.spec}: the beta = 1 limit needs E[1/W] = infinity, "
                f"but the integral of G(1/u) is {verdict.verdict} ({verdict.reason})"
            )


def rate_scale(family: MixingFamily, n: int) -> float:
    """``B(n)`` for beta < 1, ``A(n)`` for beta = 1."""
    return rate_a(family, n) if family.beta == 1.0 else rate_b(family, n)


# ---------------------------------------------------------------------------
# results


@dataclass
class ExperimentResult:
    """Per-``n`` samples of the mode's statistic plus summaries.

    ``values[n]`` is the statistic named by ``value_name``; ``mu_hat`` and
    ``s_n`` are kept so any other normalization can be recomputed.
    """

    config: ExperimentConfig
    value_name: str
    values: dict
    mu_hat: dict
    s_n: dict
    scale: dict = field(default_factory=dict)
    ks_distance: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    regression_slope: float | None = None
    regression_stderr: float | None = None
    reference: str | None = None
    wall_time: float = 0.0
    backend: str = _backend.NAME

    def records(self):
        for n in self.config.n_grid:
            for r, (m, s, v) in enumerate(zip(self.mu_hat[n].tolist(), self.s_n[n].tolist(), self.values[n].tolist())):
                yield {"n": n, "r": r, "mu_hat": m, "s_n": s, self.value_name: v}

    def jsonl_lines(self):
        for rec in self.records():
            yield json.dumps(rec)

    def write_jsonl(self, path) -> Path:
        path = Path(path)
        with path.open("w") as fh:
            for line in self.jsonl_lines():
                fh.write(line + "\n")
        return path

    def summary(self) -> dict:
        per_n = []
        for n in self.config.n_grid:
            row = {"n": n, "scale": self.scale.get(n), "ks_distance": self.ks_distance.get(n)}
            row.update(self.stats.get(n, {}))
            per_n.append(row)
        return {
            "config": self.config.to_dict(),
            "statistic": self.value_name,
            "reference": self.reference,
            "per_n": per_n,
            "regression_slope": self.regression_slope,
            "regression_stderr": self.regression_stderr,
            "backend": self.backend,
            "wall_time": self.wall_time,
        }

    def write_summary(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.summary(), indent=2) + "\n")
        return path

    def format_table(self) -> str:
        cols = ["n", "median", "iqr", "median_abs_error", "ks_distance"]
        rows = []
        for row in self.summary()["per_n"]:
            cells = []
            for c in cols:
                v = row.get(c)
                cells.append("-" if v is None else (str(v) if c == "n" else f"{v:.6g}"))
            rows.append(cells)
        widths = [max(len(c), *(len(r[i]) for r in rows)) for i, c in enumerate(cols)]
        fmt = "  ".join(f"{{:>{w}}}" for w in widths)
        lines = [f"{self.config.mode}  {self.config.family.spec}  statistic={self.value_name}"]
        lines.append(fmt.format(*cols))
        lines.extend(fmt.format(*r) for r in rows)
        if self.regression_slope is not None:
            lines.append(f"slope = {self.regression_slope:.6g} +/- {self.regression_stderr:.3g}")
        return "\n".join(lines)


def _spread(values: np.ndarray) -> dict:
    q1, med, q3 = np.quantile(values, [0.25, 0.5, 0.75])
    return {"median": float(med), "iqr": float(q3 - q1)}


def _reference_size(R: int) -> int:
    return min(10 * R, REFERENCE_CAP)


def _require_mode(config: ExperimentConfig, mode: str) -> None:
    if config.mode != mode:
        raise DomainError(f"config mode is {config.mode!r}, expected {mode!r}")


def run_scaled_error(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    _require_mode(config, SCALED_ERROR)
    family = config.family
    _check_rate_theory(family)
    t0 = time.perf_counter()
    sims = simulate(config, workers)
    m = _reference_size(config.replications)
    if family.beta < 1.0:
        ref = sample_scaled_error_limit(family.beta, m, seed=_reference_rng_seed(config.seed)).draws
        ref_name = f"Z/sqrt(U_{family.beta:g}), {m} draws"
    else:
        ref = np.random.default_rng(_reference_rng_seed(config.seed)).standard_normal(m)
        ref_name = f"standard normal, {m} draws"
    res = ExperimentResult(config, "scaled_error", {}, {}, {}, reference=ref_name)
    for n, (mu_hat, s_n) in sims.items():
        scale = rate_scale(family, n)
        vals = math.sqrt(scale) * (mu_hat - config.mu)
        res.values[n], res.mu_hat[n], res.s_n[n], res.scale[n] = vals, mu_hat, s_n, scale
        res.ks_distance[n] = ks_two_sample(vals, ref)
        res.stats[n] = _spread(vals)
    res.wall_time = time.perf_counter() - t0
    return res


def run_sn_limit(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    _require_mode(config, S_N_LIMIT)
    family = config.family
    _check_rate_theory(family)
    t0 = time.perf_counter()
    sims = simulate(config, workers)
    ref = None
    ref_name = "degenerate at 1"
    if family.beta < 1.0:
        m = _reference_size(config.replications)
        ref = sample_subordinator(family.beta, m, seed=_reference_rng_seed(config.seed)).draws
        ref_name = f"U_{family.beta:g}, {m} draws"
    res = ExperimentResult(config, "s_n_ratio", {}, {}, {}, reference=ref_name)
    for n, (mu_hat, s_n) in sims.items():
        scale = rate_scale(family, n)
        vals = s_n / scale
        res.values[n], res.mu_hat[n], res.s_n[n], res.scale[n] = vals, mu_hat, s_n, scale
        res.ks_distance[n] = None if ref is None else ks_two_sample(vals, ref)
        res.stats[n] = _spread(vals)
    res.wall_time = time.perf_counter() - t0
    return res


def run_rate_regression(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    _require_mode(config, RATE_REGRESSION)
    t0 = time.perf_counter()
    sims = simulate(config, workers)
    res = ExperimentResult(config, "abs_error", {}, {}, {})
    log_n, log_med = [], []
    for n, (mu_hat, s_n) in sims.items():
        vals = np.abs(mu_hat - config.mu)
        res.values[n], res.mu_hat[n], res.s_n[n] = vals, mu_hat, s_n
        med = float(np.median(vals))
        res.stats[n] = {"median_abs_error": med, **_spread(vals)}
        log_n.append(math.log(n))
        log_med.append(math.log(med) if med > 0.0 else -math.inf)
    if all(math.isfinite(v) for v in log_med):
        fit = stats.linregress(log_n, log_med)
        res.regression_slope, res.regression_stderr = float(fit.slope), float(fit.stderr)
    res.wall_time = time.perf_counter() - t0
    return res


_RUNNERS = {
    SCALED_ERROR: run_scaled_error,
    S_N_LIMIT: run_sn_limit,
    RATE_REGRESSION: run_rate_regression,
}


def run(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Dispatch on ``config.mode``."""
    return _RUNNERS[config.mode](config, workers)
