"""The non-central complex Wishart intensity model.

Covariance convention: for the circular complex Gaussian amplitude vector
``X`` of one wave, ``E[X_a conj(X_b)] = sigma[a, b]`` and ``E[X_a X_b] = 0``.
Wave ``i`` has mean vector ``m_i`` and the accumulated non-centrality is
``M[a, b] = sum_i m_ia conj(m_ib)``.  Pixel intensities are
``I_j = sum_i |X_ij + m_ij|^2``, the diagonal of the Wishart matrix.

A model is *exact* when every entry of ``sigma`` and the means is rational
(int, Fraction, Decimal, or a sympy Gaussian rational).  Exact models compute
with Gaussian rationals and return :class:`~fractions.Fraction` results;
otherwise everything is complex128/float.
"""

from __future__ import annotations

import hashlib
import itertools
import logging
import warnings
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb, factorial, prod
from numbers import Rational
from typing import Sequence

import numpy as np
from sympy.polys.domains import QQ, QQ_I

from .combinatorics import enumerate_partitions, partition_stats
from .errors import BoundsError, ModelError
from .moments import cyclic_polynomial, moments_from_cumulants, multi_indices_upto

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
WICK_BOUND = 6
CGF_BOUND = 80

_GaussianRational = type(QQ_I(0, 0))


# -- scalar helpers ---------------------------------------------------------


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Decimal)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(int(x.numerator), int(x.denominator))


def _is_rational_entry(x) -> bool:
    if isinstance(x, (_GaussianRational, Rational, Decimal, str)):
        return True
    if isinstance(x, (tuple, list)) and len(x) == 2:
        return all(isinstance(v, (Rational, Decimal, str)) for v in x)
    return False


def _qq(x) -> object:
    f = _to_fraction(x)
    return QQ(f.numerator, f.denominator)


def gaussian_rational(x) -> object:
    """Convert a rational scalar or an ``(re, im)`` pair to a Gaussian rational."""
    if isinstance(x, _GaussianRational):
        return x
    if isinstance(x, (tuple, list)):
        re, im = x
        return QQ_I(_qq(re), _qq(im))
    return QQ_I(_qq(x), QQ(0))


def _complex(x) -> complex:
    if isinstance(x, _GaussianRational):
        return complex(float(_to_fraction(x.x)), float(_to_fraction(x.y)))
    if isinstance(x, (tuple, list)):
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (Decimal, str)):
        return complex(float(x))
    return complex(x)


def conj(z):
    if isinstance(z, _GaussianRational):
        return QQ_I(z.x, -z.y)
    return np.conj(z)


def real_part(z, tol: float = 1e-9):
    """Real part as Fraction (exact) or float, checking the imaginary part vanishes."""
    if isinstance(z, _GaussianRational):
        if z.y != 0:
            raise ArithmeticError(f"expected a real value, got {z}")
        return _to_fraction(z.x)
    if isinstance(z, (Fraction, int)):
        return Fraction(z)
    z = complex(z)
    if abs(z.imag) > tol * max(1.0, abs(z.real)):
        logger.debug("discarding imaginary part %g", z.imag)
    return z.real


def abs_float(z) -> float:
    return abs(_complex(z))


def _trace(a: np.ndarray):
    out = a[0, 0]
    for i in range(1, a.shape[0]):
        out = out + a[i, i]
    return out


# -- the model --------------------------------------------------------------


class WishartModel:
    """Pixel count ``d``, wave count ``p``, Hermitian PD ``sigma`` and per-wave means.

    Parameters
    ----------
    sigma : (d, d) array-like
        Hermitian positive-definite covariance.  Entries may be numbers or
        ``(re, im)`` pairs.
    means : (p, d) array-like, optional
        One mean vector per wave.  When omitted all means are zero and ``p``
        gives the wave count.
    p : int, optional
        Wave count; required to agree with ``len(means)`` when both are given.
    exact : bool, optional
        Force exact or float mode.  By default the mode is inferred from the
        entry types.
    """

    def __init__(self, sigma, means=None, p: int | None = None, *, exact: bool | None = None,
                 hermitian_tol: float = HERMITIAN_TOL):
        rows = [list(r) for r in sigma]
        d = len(rows)
        if d < 1 or any(len(r) != d for r in rows):
            raise ModelError("sigma must be a nonempty square matrix")
        if means is None:
            p = 1 if p is None else int(p)
            if p < 1:
                raise ModelError(f"wave count p must be >= 1, got {p}")
            mean_rows = [[0] * d for _ in range(p)]
        else:
            mean_rows = [list(r) for r in means]
            if p is not None and int(p) != len(mean_rows):
                raise ModelError(f"p={p} disagrees with {len(mean_rows)} mean vectors")
            p = len(mean_rows)
            if p < 1 or any(len(r) != d for r in mean_rows):
                raise ModelError(f"means must be a p x {d} array with p >= 1")
        entries = [x for r in rows for x in r] + [x for r in mean_rows for x in r]
        if exact is None:
            exact = all(_is_rational_entry(x) for x in entries)
        self.exact = bool(exact)
        self.d = d
        self.p = p
        if self.exact:
            conv = gaussian_rational
            dtype = object
        else:
            conv = _complex
            dtype = complex
        sig = np.array([[conv(x) for x in r] for r in rows], dtype=dtype)
        mu = np.array([[conv(x) for x in r] for r in mean_rows], dtype=dtype)
        sig = self._check_hermitian(sig, hermitian_tol)
        self._check_pd(sig)
        sig.setflags(write=False)
        mu.setflags(write=False)
        self.sigma = sig
        self.means = mu

    @staticmethod
    def _check_hermitian(sig, tol):
        d = sig.shape[0]
        worst = 0.0
        for a in range(d):
            for b in range(a, d):
                dev = abs_float(sig[a, b] - conj(sig[b, a]))
                if dev > tol:
                    raise ModelError(
                        f"sigma is not Hermitian: sigma[{a}][{b}] != conj(sigma[{b}][{a}]) "
                        f"(deviation {dev:.3g} > {tol:g})"
                    )
                worst = max(worst, dev)
        if worst > 0:
            warnings.warn(f"sigma symmetrized (max Hermitian deviation {worst:.3g})", stacklevel=3)
            if sig.dtype == object:
                h = QQ_I(QQ(1, 2), QQ(0))
                sig = np.array([[(sig[a, b] + conj(sig[b, a])) * h for b in range(d)] for a in range(d)],
                               dtype=object)
            else:
                sig = (sig + sig.conj().T) * 0.5
        return sig

    @staticmethod
    def _check_pd(sig):
        c = np.array([[_complex(x) for x in r] for r in sig], dtype=complex)
        try:
            np.linalg.cholesky(c)
        except np.linalg.LinAlgError:
            raise ModelError("sigma is not positive definite") from None

    # -- derived quantities

    @cached_property
    def M(self) -> np.ndarray:
        """Accumulated non-centrality ``sum_i m_i m_i^†`` (column convention)."""
        d = self.d
        if self.exact:
            out = np.array([[QQ_I(0, 0)] * d for _ in range(d)], dtype=object)
        else:
            out = np.zeros((d, d), dtype=complex)
        for m in self.means:
            for a in range(d):
                for b in range(d):
                    out[a, b] = out[a, b] + m[a] * conj(m[b])
        out.setflags(write=False)
        return out

    @cached_property
    def omega(self) -> np.ndarray:
        """Non-centrality matrix ``sigma^{-1} M`` (always complex128)."""
        return np.linalg.solve(self.sigma_complex, self.M_complex)

    @cached_property
    def sigma_complex(self) -> np.ndarray:
        return np.array([[_complex(x) for x in r] for r in self.sigma], dtype=complex)

    @cached_property
    def M_complex(self) -> np.ndarray:
        return np.array([[_complex(x) for x in r] for r in self.M], dtype=complex)

    @cached_property
    def means_complex(self) -> np.ndarray:
        return np.array([[_complex(x) for x in r] for r in self.means], dtype=complex)

    @property
    def zero(self):
        return QQ_I(0, 0) if self.exact else 0j

    @property
    def one(self):
        return QQ_I(1, 0) if self.exact else 1 + 0j

    @cached_property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.exact}|{self.d}|{self.p}|".encode())
        for x in itertools.chain(self.sigma.flat, self.means.flat):
            if self.exact:
                h.update(f"{_to_fraction(x.x)},{_to_fraction(x.y)};".encode())
            else:
                z = complex(x)
                h.update(f"{z.real!r},{z.imag!r};".encode())
        return h.hexdigest()

    def __hash__(self):
        return hash(self.digest)

    def __eq__(self, other):
        return isinstance(other, WishartModel) and self.digest == other.digest

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"WishartModel(d={self.d}, p={self.p}, {mode}, digest={self.digest[:10]})"

    @property
    def shared_mean(self) -> bool:
        first = self.means[0]
        return all(all(x == y for x, y in zip(first, m)) for m in self.means[1:])

    def to_float(self) -> WishartModel:
        if not self.exact:
            return self
        return WishartModel(self.sigma_complex, self.means_complex, exact=False)

    # -- cached matrix powers

    @lru_cache(maxsize=None)
    def sigma_power(self, k: int) -> np.ndarray:
        if k == 0:
            eye = np.array([[self.one if i == j else self.zero for j in range(self.d)]
                            for i in range(self.d)], dtype=self.sigma.dtype)
            return eye
        out = self.sigma_power(k - 1) @ self.sigma
        out.setflags(write=False)
        return out

    @lru_cache(maxsize=None)
    def trace_sigma_power(self, k: int):
        """``Tr(sigma^k)`` as a real (Fraction or float)."""
        return real_part(_trace(self.sigma_power(k)))

    @lru_cache(maxsize=None)
    def trace_m_sigma_power(self, k: int):
        """``Tr(M sigma^k)``."""
        return real_part(_trace(self.M @ self.sigma_power(k)))


def _real_zero(model: WishartModel):
    return Fraction(0) if model.exact else 0.0


def single_wave(model: WishartModel, i: int) -> WishartModel:
    """The one-wave model carrying mean vector ``m_i`` (``i`` is 1-based)."""
    if not 1 <= i <= model.p:
        raise IndexError(f"wave index {i} outside 1..{model.p}")
    if model.p == 1:
        return model
    return WishartModel(model.sigma, [list(model.means[i - 1])], exact=model.exact)


def waves(model: WishartModel) -> list[WishartModel]:
    return [single_wave(model, i) for i in range(1, model.p + 1)]


# -- trace statistics -------------------------------------------------------


def trace_cumulant(model: WishartModel, k: int):
    """``k``-th cumulant of ``Tr W``: ``p (k-1)! Tr(sigma^k) + k! Tr(M sigma^{k-1})``."""
    if k < 1:
        raise ValueError("cumulant order must be >= 1")
    return model.p * factorial(k - 1) * model.trace_sigma_power(k) + factorial(k) * model.trace_m_sigma_power(k - 1)


def trace_cumulants(model: WishartModel, K: int) -> list:
    return [trace_cumulant(model, k) for k in range(1, K + 1)]


@lru_cache(maxsize=256)
def _trace_moments(model: WishartModel, K: int) -> tuple:
    return tuple(moments_from_cumulants(trace_cumulants(model, K)))


def trace_moments(model: WishartModel, K: int) -> list:
    """``E[(Tr W)^k]`` for ``k = 1..K`` via complete Bell polynomials of the trace cumulants."""
    return list(_trace_moments(model, K))


def trace_moment(model: WishartModel, k: int):
    if k == 0:
        return Fraction(1) if model.exact else 1.0
    return _trace_moments(model, k)[k - 1]


@dataclass(frozen=True)
class CyclicExpansionReport:
    """Verbatim partition/cyclic-polynomial trace moment next to the Bell-path value."""

    k: int
    value: object
    bell_value: object
    deviation: object

    @property
    def agrees(self) -> bool:
        return self.deviation == 0 if isinstance(self.deviation, Fraction) else abs(self.deviation) < 1e-9 * max(
            1.0, abs(float(self.bell_value)))


def cyclic_expansion_trace_moment(model: WishartModel, k: int) -> CyclicExpansionReport:
    """Evaluate the printed cyclic-polynomial expansion of ``E[(Tr W)^k]`` as written.

    The printed expansion is kept as an experimental cross-check; it does not
    agree with the Bell-polynomial path in general and the returned report
    carries the signed deviation.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    s = [model.trace_sigma_power(j) for j in range(1, k + 1)]
    t = [model.trace_m_sigma_power(j - 1) for j in range(1, k + 1)]
    cyc = [cyclic_polynomial(j, s) for j in range(1, k + 1)]

    def noncentral(j):
        total = 0
        for lam in enumerate_partitions(j):
            st = partition_stats(lam)
            term = prod(t[i - 1] ** r for i, r in lam.multiplicities.items())
            total += Fraction((-1) ** st.length, st.m_factorial) * term
        return total

    def central(j):
        total = 0
        for lam in enumerate_partitions(j):
            st = partition_stats(lam)
            term = prod(cyc[i - 1] ** r for i, r in lam.multiplicities.items())
            total += Fraction(model.p**st.length, st.m_factorial) * term
        return total

    value = factorial(k) * sum(noncentral(j) * central(k - j) for j in range(k + 1))
    if not model.exact:
        value = float(value)
    bell = trace_moment(model, k)
    return CyclicExpansionReport(k, value, bell, value - bell)


# -- joint intensity moments: Wick expansion --------------------------------


def _pair_matrices(k: tuple[int, ...]):
    """Matrices ``n[a][b]`` with row sums <= k[a] and column sums <= k[b]."""
    d = len(k)
    cells = [(a, b) for a in range(d) for b in range(d) if k[a] and k[b]]

    def rec(idx, rows, cols, acc):
        if idx == len(cells):
            yield dict(acc)
            return
        a, b = cells[idx]
        cap = min(k[a] - rows[a], k[b] - cols[b])
        for n in range(cap + 1):
            rows[a] += n
            cols[b] += n
            acc[(a, b)] = n
            yield from rec(idx + 1, rows, cols, acc)
            rows[a] -= n
            cols[b] -= n
        acc.pop((a, b), None)

    yield from rec(0, [0] * d, [0] * d, {})


@lru_cache(maxsize=4096)
def _single_wave_wick(model: WishartModel, wave: int, k: tuple[int, ...]):
    """``E[prod_a |Z_a|^{2 k_a}]`` for wave ``wave`` (0-based), ``Z = X + m``.

    Each factor ``|Z_a|^2 = Z_a conj(Z_a)``; surviving Gaussian pairings join
    an unconjugated ``X_a`` with a conjugated ``X_b`` (weight ``sigma[a, b]``),
    unpaired slots take the mean.  Pairings are grouped by the matrix of
    label-to-label match counts so the cost is polynomial in ``|k|``.
    """
    sig = model.sigma
    m = model.means[wave]
    mbar = [conj(x) for x in m]
    d = len(k)
    total = model.zero
    for n in _pair_matrices(k):
        r = [sum(n.get((a, b), 0) for b in range(d)) for a in range(d)]
        c = [sum(n.get((a, b), 0) for a in range(d)) for b in range(d)]
        count = 1
        for a in range(d):
            if k[a]:
                count *= factorial(k[a]) // (factorial(k[a] - r[a]) * prod(factorial(n.get((a, b), 0)) for b in range(d)))
                count *= factorial(k[a]) // factorial(k[a] - c[a])
        term = model.one * count
        for (a, b), cnt in n.items():
            if cnt:
                term = term * sig[a, b] ** cnt
        for a in range(d):
            if k[a] - r[a]:
                term = term * m[a] ** (k[a] - r[a])
            if k[a] - c[a]:
                term = term * mbar[a] ** (k[a] - c[a])
        total = total + term
    return total


def _sub_indices(k):
    return itertools.product(*(range(x + 1) for x in k))


@lru_cache(maxsize=4096)
def _wick_moment(model: WishartModel, k: tuple[int, ...]):
    # fold independent waves with the multivariate binomial rule
    prev = {j: _single_wave_wick(model, 0, j) for j in _sub_indices(k)}
    for w in range(1, model.p):
        cur = {}
        for j in _sub_indices(k):
            acc = model.zero
            for i in _sub_indices(j):
                rest = tuple(a - b for a, b in zip(j, i))
                coeff = prod(comb(a, b) for a, b in zip(j, i))
                acc = acc + prev[i] * _single_wave_wick(model, w, rest) * coeff
            cur[j] = acc
        prev = cur
    return real_part(prev[k])


def _as_multi_index(model: WishartModel, k: Sequence[int]) -> tuple[int, ...]:
    k = tuple(int(x) for x in k)
    if len(k) != model.d:
        raise ValueError(f"multi-index {k} has dimension {len(k)}, model has d={model.d}")
    if any(x < 0 for x in k):
        raise ValueError(f"multi-index {k} has negative entries")
    return k


def joint_intensity_moment(model: WishartModel, k: Sequence[int], *, method: str = "wick",
                           bound: int | None = None):
    """``E[I_1^{k_1} ... I_d^{k_d}]``.

    ``method="wick"`` expands the complex Gaussian pairings (bounded by
    ``bound``, default :data:`WICK_BOUND`); ``method="cgf"`` reads the
    coefficient off the exponentiated cumulant generating function and
    supports much larger orders.
    """
    k = _as_multi_index(model, k)
    n = sum(k)
    if n == 0:
        return Fraction(1) if model.exact else 1.0
    if method == "wick":
        bound = WICK_BOUND if bound is None else bound
        if n > bound:
            raise BoundsError(f"|k|={n} exceeds the Wick bound {bound}")
        return _wick_moment(model, k)
    if method == "cgf":
        return intensity_moment_table(model, n)[k]
    raise ValueError(f"unknown method {method!r}")


class _LazyTable(dict):
    def __init__(self, fn):
        super().__init__()
        self._fn = fn

    def __missing__(self, key):
        value = self._fn(key)
        self[key] = value
        return value


def joint_intensity_cumulant(model: WishartModel, k: Sequence[int], *, method: str = "wick",
                             bound: int | None = None):
    """Joint cumulant of the intensities.

    ``method="wick"`` inverts a table of Wick joint moments with the
    multi-index partition formula; ``method="cgf"`` reads it directly off
    the cumulant generating function.
    """
    from .moments import mv_cumulant_from_moments

    k = _as_multi_index(model, k)
    n = sum(k)
    if n == 0:
        raise ValueError("the zero multi-index has no cumulant")
    if method == "cgf":
        if n > CGF_BOUND:
            raise BoundsError(f"|k|={n} exceeds the generating-function bound {CGF_BOUND}")
        coeffs = intensity_cgf_coefficients(model, n)
        return prod(factorial(x) for x in k) * coeffs.get(k, _real_zero(model))
    bound = WICK_BOUND if bound is None else bound
    if n > bound:
        raise BoundsError(f"|k|={n} exceeds the Wick bound {bound}")
    table = _LazyTable(lambda j: joint_intensity_moment(model, j, bound=bound))
    return mv_cumulant_from_moments(table, k)


# -- joint intensity moments: cumulant generating function ------------------
#
# log E[exp(sum_j t_j I_j)] = sum_{n>=1} [ p Tr((sigma T)^n) / n + Tr(M T (sigma T)^{n-1}) ]
# with T = diag(t).  Homogeneous polynomials are dicts {exponent: coefficient}.


def _poly_add(acc: dict, poly: dict, scale=1):
    for e, v in poly.items():
        acc[e] = acc[e] + v * scale if e in acc else v * scale


def _poly_mul(p1: dict, p2: dict) -> dict:
    out: dict = {}
    for e1, v1 in p1.items():
        for e2, v2 in p2.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            v = v1 * v2
            out[e] = out[e] + v if e in out else v
    return out


def _shift(poly: dict, b: int) -> dict:
    return {e[:b] + (e[b] + 1,) + e[b + 1:]: v for e, v in poly.items()}


@lru_cache(maxsize=64)
def _cgf_table(model: WishartModel, N: int) -> dict:
    d = model.d
    sig, M = model.sigma, model.M
    zero_e = (0,) * d
    # prev = (sigma T)^{n-1}, starts at the identity
    prev = [[{zero_e: model.one} if a == b else {} for b in range(d)] for a in range(d)]
    coeffs: dict = {}
    for n in range(1, N + 1):
        cur = [[{} for _ in range(d)] for _ in range(d)]
        for a in range(d):
            for c in range(d):
                if not prev[a][c]:
                    continue
                for b in range(d):
                    _poly_add(cur[a][b], _shift(prev[a][c], b), sig[c, b])
        trace: dict = {}
        for a in range(d):
            _poly_add(trace, cur[a][a])
        mean: dict = {}
        for a in range(d):
            for b in range(d):
                if prev[b][a]:
                    _poly_add(mean, _shift(prev[b][a], b), M[a, b])
        for e, v in trace.items():
            coeffs[e] = real_part(v * model.p) / n
        for e, v in mean.items():
            coeffs[e] = coeffs.get(e, _real_zero(model)) + real_part(v)
        prev = cur
    return coeffs


def intensity_cgf_coefficients(model: WishartModel, N: int) -> dict:
    """Ordinary Taylor coefficients of the intensity CGF up to total degree ``N``.

    The joint cumulant at ``k`` is ``k!`` times the coefficient at ``k``.
    """
    if N > CGF_BOUND:
        raise BoundsError(f"order {N} exceeds the generating-function bound {CGF_BOUND}")
    return _cgf_table(model, N)


@lru_cache(maxsize=64)
def _moment_table(model: WishartModel, N: int) -> dict:
    d = model.d
    K = intensity_cgf_coefficients(model, N)
    # homogeneous parts
    Kh = [dict() for _ in range(N + 1)]
    for e, v in K.items():
        Kh[sum(e)][e] = v
    one = Fraction(1) if model.exact else 1.0
    F = [{(0,) * d: one}]
    for n in range(1, N + 1):
        acc: dict = {}
        for j in range(1, n + 1):
            if Kh[j] and F[n - j]:
                _poly_add(acc, _poly_mul(Kh[j], F[n - j]), j)
        F.append({e: v / n for e, v in acc.items()})
    table = {}
    for k in multi_indices_upto(d, N):
        v = F[sum(k)].get(k, _real_zero(model))
        table[k] = prod(factorial(x) for x in k) * v
    return table


_largest_table: dict = {}


def intensity_moment_table(model: WishartModel, N: int) -> dict:
    """Joint intensity moments covering every ``1 <= |k| <= N``, from the generating function.

    A table built earlier for a larger order is reused, so the result may
    hold more entries than requested.
    """
    if N > CGF_BOUND:
        raise BoundsError(f"order {N} exceeds the generating-function bound {CGF_BOUND}")
    known = _largest_table.get(model)
    if known is not None and known[0] >= N:
        return known[1]
    table = _moment_table(model, N)
    _largest_table[model] = (N, table)
    return table
