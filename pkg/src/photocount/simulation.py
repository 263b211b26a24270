"""Seeded Monte-Carlo sampling and exact enumeration oracles.

Draws are generated in fixed-size chunks.  Chunk ``c`` of stream ``s`` under
seed ``seed`` always uses the generator keyed by ``(seed, s, c)``, and chunks
are reduced in index order, so results do not depend on the worker count.
"""

from __future__ import annotations

import csv
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod, sqrt
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetError, DegreesOfFreedomError, ModelError
from .estimators import MAX_POLYKAY_DEGREE, Sample, factorial_moment_ustat, polykay, polykay_coefficients
from .photon import CountModel
from .wishart import WishartModel

CHUNK = 65536
ENUMERATION_BUDGET = 10**7


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream identified by ``(seed, stream_index)``."""

    seed: int
    stream_index: int = 0

    def generator(self, chunk_index: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index, chunk_index))
        return np.random.Generator(np.random.Philox(ss))

    def substream(self, index: int) -> RngStream:
        return RngStream(self.seed, index)


def _as_stream(rng) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    return RngStream(int(rng))


@dataclass
class SampleBatch:
    n: int
    d: int
    intensities: np.ndarray | None = None
    counts: np.ndarray | None = None
    model_digest: str = ""
    seed: int | None = None
    stream_index: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for arr in (self.intensities, self.counts):
            if arr is not None and arr.shape != (self.n, self.d):
                raise ValueError(f"batch array has shape {arr.shape}, expected {(self.n, self.d)}")
        if self.intensities is not None and np.any(self.intensities < 0):
            raise ValueError("intensities must be nonnegative")

    def metadata(self) -> dict:
        return {"n": self.n, "d": self.d, "seed": self.seed, "stream_index": self.stream_index,
                "model_digest": self.model_digest, **self.extra}

    def to_csv(self, path) -> Path:
        """Write one draw per row and the metadata to ``<path>.meta.json``."""
        path = Path(path)
        header, cols = [], []
        if self.intensities is not None:
            header += [f"I{j + 1}" for j in range(self.d)]
            cols.append(self.intensities)
        if self.counts is not None:
            header += [f"N{j + 1}" for j in range(self.d)]
            cols.append(self.counts)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            if cols:
                for row in zip(*(c.tolist() for c in cols)):
                    w.writerow([repr(x) for part in row for x in part])
        meta = path.with_name(path.name + ".meta.json")
        meta.write_text(json.dumps(self.metadata(), indent=2))
        return meta

    @classmethod
    def from_csv(cls, path) -> SampleBatch:
        path = Path(path)
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], rows[1:]
        meta_path = path.with_name(path.name + ".meta.json")
        meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
        icols = [i for i, h in enumerate(header) if h.startswith("I")]
        ncols = [i for i, h in enumerate(header) if h.startswith("N")]
        d = len(icols) or len(ncols)
        inten = np.array([[float(r[i]) for i in icols] for r in body]).reshape(len(body), d) if icols else None
        counts = np.array([[int(r[i]) for i in ncols] for r in body], dtype=np.int64).reshape(len(body), d) if ncols else None
        extra = {k: v for k, v in meta.items() if k not in ("n", "d", "seed", "stream_index", "model_digest")}
        return cls(len(body), d, inten, counts, meta.get("model_digest", ""), meta.get("seed"),
                   meta.get("stream_index", 0), extra)


def _cholesky(model: WishartModel) -> np.ndarray:
    try:
        return np.linalg.cholesky(model.sigma_complex)
    except np.linalg.LinAlgError as exc:
        raise ModelError("sigma is not positive definite") from exc


def _circular_normal(gen: np.random.Generator, shape) -> np.ndarray:
    g = gen.standard_normal(shape + (2,))
    return (g[..., 0] + 1j * g[..., 1]) / sqrt(2.0)


def _chunk_intensities(model, L, gen, m, count: CountModel | None):
    d = model.d
    if count is None:
        z = _circular_normal(gen, (m, model.p, d))
        x = z @ L.T + model.means_complex[None, :, :]
        return np.sum(np.abs(x) ** 2, axis=1)
    waves = count.sample(gen, m)
    top = int(waves.max(initial=0))
    if top == 0:
        return np.zeros((m, d))
    z = _circular_normal(gen, (m, top, d))
    x = z @ L.T + model.means_complex[0][None, None, :]
    mask = np.arange(top)[None, :] < waves[:, None]
    return np.sum((np.abs(x) ** 2) * mask[:, :, None], axis=1)


def _run_chunks(n: int, fn: Callable[[int, int], np.ndarray], workers: int) -> np.ndarray:
    sizes = [min(CHUNK, n - s) for s in range(0, n, CHUNK)]
    if workers <= 1 or len(sizes) <= 1:
        parts = [fn(c, m) for c, m in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, range(len(sizes)), sizes))
    return np.concatenate(parts, axis=0) if parts else np.zeros((0,))


def _prepare(model: WishartModel, count: CountModel | None):
    if count is not None and not model.shared_mean:
        raise ModelError("a random wave count needs one mean vector shared by all waves")
    return _cholesky(model)


def sample_intensities(model: WishartModel, n: int, rng, *, count: CountModel | None = None,
                       workers: int = 1) -> SampleBatch:
    """``n`` draws of the pixel intensities ``I_j = sum_i |X_ij + m_ij|^2``."""
    stream = _as_stream(rng)
    L = _prepare(model, count)

    def chunk(c, m):
        return _chunk_intensities(model, L, stream.generator(c), m, count)

    inten = _run_chunks(n, chunk, workers).reshape(n, model.d)
    return SampleBatch(n, model.d, intensities=inten, model_digest=model.digest, seed=stream.seed,
                       stream_index=stream.stream_index, extra=_count_meta(count))


def sample_counts(model: WishartModel, n: int, rng, count: CountModel | None = None, *,
                  workers: int = 1) -> SampleBatch:
    """Intensity draws followed by independent Poisson counts per pixel."""
    stream = _as_stream(rng)
    L = _prepare(model, count)

    def chunk(c, m):
        gen = stream.generator(c)
        inten = _chunk_intensities(model, L, gen, m, count)
        return np.concatenate([inten, gen.poisson(inten).astype(float)], axis=1)

    both = _run_chunks(n, chunk, workers).reshape(n, 2 * model.d)
    return SampleBatch(n, model.d, intensities=both[:, :model.d], counts=both[:, model.d:].astype(np.int64),
                       model_digest=model.digest, seed=stream.seed, stream_index=stream.stream_index,
                       extra=_count_meta(count))


def poisson_counts(intensity: Sequence[float], n: int, rng, *, workers: int = 1) -> np.ndarray:
    """Counts for a frozen intensity vector, ``n`` rows."""
    stream = _as_stream(rng)
    lam = np.asarray(intensity, dtype=float)

    def chunk(c, m):
        return stream.generator(c).poisson(lam, size=(m, lam.size))

    return _run_chunks(n, chunk, workers).reshape(n, lam.size)


def _count_meta(count: CountModel | None) -> dict:
    return {} if count is None else {"count_model": count.as_dict()}


# -- Monte-Carlo estimates --------------------------------------------------


@dataclass(frozen=True)
class Estimate:
    value: float
    se: float

    def within(self, target: float, nse: float = 3.0) -> bool:
        return abs(self.value - target) <= nse * self.se

    def as_dict(self) -> dict:
        return {"value": self.value, "se": self.se}


def _kstat_from_sums(k: int, n: int, sums: dict):
    coeffs = polykay_coefficients((k,), n)
    return sum(float(w) * prod(sums[j] for j in mu) for mu, w in coeffs.items())


def kstat_with_se(x: Sequence[float], k: int) -> Estimate:
    """k-statistic of order ``k`` with a jackknife standard error."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n <= k:
        raise DegreesOfFreedomError(f"order {k} needs more than {k} observations, got {n}")
    if k > MAX_POLYKAY_DEGREE:
        raise ValueError(f"order {k} exceeds {MAX_POLYKAY_DEGREE}")
    shift = float(np.mean(x))
    y = x - shift
    pw = {j: y**j for j in range(1, k + 1)}
    sums = {j: float(np.sum(v)) for j, v in pw.items()}
    value = _kstat_from_sums(k, n, sums)
    loo = _kstat_from_sums(k, n - 1, {j: sums[j] - pw[j] for j in pw})
    se = sqrt((n - 1) / n * float(np.sum((loo - np.mean(loo)) ** 2)))
    if k == 1:
        value += shift
    return Estimate(float(value), se)


def empirical_cumulants(data, K: int, column: int = 0, use: str = "counts") -> list[Estimate]:
    """k-statistics of orders ``1..K`` with jackknife standard errors.

    ``data`` is a :class:`SampleBatch` (pick ``use`` and ``column``) or a
    1-d array of observations.
    """
    if isinstance(data, SampleBatch):
        arr = data.counts if use == "counts" else data.intensities
        if arr is None:
            raise ValueError(f"batch carries no {use}")
        x = arr[:, column]
    else:
        x = np.asarray(data, dtype=float).ravel()
    return [kstat_with_se(x, k) for k in range(1, K + 1)]


def mean_with_se(x: Sequence[float]) -> Estimate:
    x = np.asarray(x, dtype=float)
    return Estimate(float(np.mean(x)), float(np.std(x, ddof=1) / sqrt(x.size)))


def moment_with_se(x: Sequence[float], k: int) -> Estimate:
    """Raw moment ``E[X^k]`` with its standard error."""
    return mean_with_se(np.asarray(x, dtype=float) ** k)


def covariance_with_se(x: Sequence[float], y: Sequence[float]) -> Estimate:
    """Unbiased covariance with a delta-method standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    prodc = (x - x.mean()) * (y - y.mean())
    value = float(np.sum(prodc) / (n - 1))
    return Estimate(value, float(np.std(prodc, ddof=1) / sqrt(n)))


# -- exact enumeration -------------------------------------------------------


def _statistic(statistic) -> Callable[[Sample], object]:
    if callable(statistic):
        return statistic
    kind, arg = statistic
    if kind == "polykay":
        return lambda s: polykay(s, arg)
    if kind == "factorial_ustat":
        return lambda s: factorial_moment_ustat(s, arg)
    raise ValueError(f"unknown statistic {kind!r}")


def exact_statistic_expectation(values: Sequence, probs: Sequence | None, n: int, statistic,
                                budget: int = ENUMERATION_BUDGET) -> Fraction:
    """Exact expectation of a symmetric statistic over i.i.d. samples of size ``n``.

    ``statistic`` is ``("polykay", λ)``, ``("factorial_ustat", k)`` or a
    callable taking a :class:`Sample`.  Probabilities default to uniform.
    Symmetry lets the enumeration run over multisets with multinomial weights.
    """
    m = len(values)
    if probs is None:
        probs = [Fraction(1, m)] * m
    probs = [Fraction(q) for q in probs]
    if m**n > budget:
        raise BudgetError(f"{m}^{n} tuples exceed the enumeration budget {budget}")
    fn = _statistic(statistic)
    total = Fraction(0)
    for combo in itertools.combinations_with_replacement(range(m), n):
        mult = [combo.count(i) for i in range(m)]
        weight = Fraction(factorial(n), prod(factorial(c) for c in mult))
        weight *= prod(q**c for q, c in zip(probs, mult))
        total += weight * Fraction(fn(Sample([values[i] for i in combo])))
    return total


def population_cumulants(values: Sequence, probs: Sequence | None, K: int) -> list[Fraction]:
    """Exact cumulants ``c_1..c_K`` of a finite population."""
    from .moments import cumulants_from_moments

    m = len(values)
    probs = [Fraction(1, m)] * m if probs is None else [Fraction(q) for q in probs]
    vals = [Fraction(v) for v in values]
    raw = [sum(q * v**k for v, q in zip(vals, probs)) for k in range(1, K + 1)]
    return cumulants_from_moments(raw)


def sample_wishart_matrices(model: WishartModel, n: int, rng, *, workers: int = 1) -> np.ndarray:
    """``n`` draws of ``W = sum_i (X_i + m_i)(X_i + m_i)^†`` as an ``(n, d, d)`` array."""
    stream = _as_stream(rng)
    L = _cholesky(model)
    d = model.d

    def chunk(c, m):
        z = _circular_normal(stream.generator(c), (m, model.p, d))
        x = z @ L.T + model.means_complex[None, :, :]
        return np.einsum("npa,npb->nab", x, x.conj()).reshape(m, d * d)

    return _run_chunks(n, chunk, workers).reshape(n, d, d)


def sample_trace_powers(model: WishartModel, n: int, rng, order: int, *, workers: int = 1) -> np.ndarray:
    """``Tr(W^j)`` for ``j = 1..order`` on ``n`` Wishart draws, shape ``(n, order)``."""
    eig = np.linalg.eigvalsh(sample_wishart_matrices(model, n, rng, workers=workers))
    return np.stack([np.sum(eig**j, axis=1) for j in range(1, order + 1)], axis=1)
