"""Spectral polykays of a single Hermitian matrix sample.

For a permutation ``σ`` of ``k`` letters write ``Tr(A)(σ) = prod_c Tr(A^{len(c)})``
over the cycles of ``σ``.  The spectral polykay of cycle class ``λ`` is

    κ̃_λ(W) = c_λ * sum_{τ ω = σ} Tr(I_d)^{-1}(τ) Tr(W)(ω),   σ of class λ,

where ``Tr(I_d)^{-1}`` is the convolution inverse of ``σ -> d^{#cycles(σ)}``
on the symmetric group and ``c_λ`` is a prefactor per cycle length.  All
functions involved are class functions, so the convolution is carried out on
the class algebra with exact structure counts.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Mapping, Sequence

import numpy as np
from sympy import Matrix

from .combinatorics import IntegerPartition, cycle_type, enumerate_partitions
from .errors import BoundsError, DegenerateDimensionError
from .estimators import as_partition

MAX_SPECTRAL_ORDER = 6
PREFACTORS = ("corrected", "printed")


@dataclass(frozen=True)
class SpectralSample:
    """Dimension ``d`` and trace powers ``T_j = Tr(W^j)``, ``j = 1..len(traces)``."""

    d: int
    traces: tuple

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")

    @classmethod
    def from_matrix(cls, W, order: int = MAX_SPECTRAL_ORDER, tol: float = 1e-9) -> SpectralSample:
        W = np.asarray(W, dtype=complex)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError("expected a square matrix")
        if np.max(np.abs(W - W.conj().T), initial=0.0) > tol * max(1.0, np.max(np.abs(W))):
            raise ValueError("matrix is not Hermitian")
        # trace powers from the real spectrum
        eig = np.linalg.eigvalsh(W)
        return cls(W.shape[0], tuple(float(np.sum(eig**j)) for j in range(1, order + 1)))

    @classmethod
    def from_eigenvalues(cls, eig: Sequence[float], order: int = MAX_SPECTRAL_ORDER) -> SpectralSample:
        eig = np.asarray(eig, dtype=float)
        return cls(len(eig), tuple(float(np.sum(eig**j)) for j in range(1, order + 1)))

    def trace(self, j: int):
        if j > len(self.traces):
            raise ValueError(f"trace power {j} not available (have {len(self.traces)})")
        return self.traces[j - 1]


# -- class algebra of S_k ----------------------------------------------------

_lock = threading.Lock()


@dataclass(frozen=True)
class _ClassAlgebra:
    classes: tuple[tuple[int, ...], ...]
    # counts[ρ][(μ, ν)] = #{τ of class μ : τ^{-1} σ_ρ has class ν}
    counts: dict


def _compose(a: tuple, b: tuple) -> tuple:
    # (a b)(i) = a(b(i))
    return tuple(a[i] for i in b)


def _inverse(a: tuple) -> tuple:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def _representative(lam: IntegerPartition) -> tuple:
    perm, start = [], 0
    for part in lam.parts:
        perm.extend(range(start + 1, start + part))
        perm.append(start)
        start += part
    return tuple(perm)


_algebras: dict[int, _ClassAlgebra] = {}


def class_algebra(k: int) -> _ClassAlgebra:
    """Structure counts of the class algebra of ``S_k`` (built once per ``k``)."""
    if not 1 <= k <= MAX_SPECTRAL_ORDER:
        raise BoundsError(f"order {k} outside 1..{MAX_SPECTRAL_ORDER}")
    with _lock:
        if k not in _algebras:
            perms = list(itertools.permutations(range(k)))
            types = {p: cycle_type(p).parts for p in perms}
            classes = tuple(lam.parts for lam in enumerate_partitions(k))
            counts = {}
            for rho in classes:
                sigma = _representative(IntegerPartition(rho))
                table: dict = {}
                for tau in perms:
                    key = (types[tau], types[_compose(_inverse(tau), sigma)])
                    table[key] = table.get(key, 0) + 1
                counts[rho] = table
            _algebras[k] = _ClassAlgebra(classes, counts)
        return _algebras[k]


def class_convolve(f: Mapping, g: Mapping, k: int) -> dict:
    """Convolution ``(f*g)(σ) = sum_{τω=σ} f(τ) g(ω)`` of class functions keyed by cycle type."""
    alg = class_algebra(k)
    return {rho: sum(f[mu] * g[nu] * c for (mu, nu), c in alg.counts[rho].items()) for rho in alg.classes}


def trace_class_function(d: int, k: int) -> dict:
    """``σ -> d^{#cycles(σ)}`` keyed by cycle type."""
    return {lam.parts: Fraction(d) ** lam.length for lam in enumerate_partitions(k)}


@lru_cache(maxsize=None)
def _inverse_trace_function(d: int, k: int) -> tuple:
    alg = class_algebra(k)
    f = trace_class_function(d, k)
    idx = {c: i for i, c in enumerate(alg.classes)}
    A = Matrix.zeros(len(alg.classes), len(alg.classes))
    for r, rho in enumerate(alg.classes):
        for (mu, nu), c in alg.counts[rho].items():
            A[r, idx[nu]] += f[mu] * c
    if A.det() == 0:
        raise DegenerateDimensionError(f"dimension d={d} is degenerate at order {k}")
    rhs = Matrix([1 if rho == (1,) * k else 0 for rho in alg.classes])
    sol = A.LUsolve(rhs)
    return tuple((c, Fraction(int(v.p), int(v.q))) for c, v in zip(alg.classes, sol))


def inverse_trace_function(d: int, k: int) -> dict:
    """Convolution inverse of :func:`trace_class_function` as a class function."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return dict(_inverse_trace_function(d, k))


def spectral_prefactor(lam, convention: str = "corrected") -> int:
    """``prod_j ((j-1)!)^{r_j}`` (``corrected``) or ``prod_j (j!)^{r_j}`` (``printed``).

    Only the corrected prefactor makes the estimator unbiased for
    ``Cum_λ(Tr W) / d^{l(λ)}``; see :mod:`photocount.verify`.
    """
    lam = as_partition(lam)
    if convention == "corrected":
        return prod(factorial(j - 1) ** r for j, r in lam.multiplicities.items())
    if convention == "printed":
        return prod(factorial(j) ** r for j, r in lam.multiplicities.items())
    raise ValueError(f"convention must be one of {PREFACTORS}")


def spectr_weights(lam, d: int) -> dict[tuple[int, ...], Fraction]:
    """Weights ``w_μ`` with ``κ̃_λ = prefactor * sum_μ w_μ prod_{j in μ} T_j``.

    Raises :class:`DegenerateDimensionError` when the trace function is not
    invertible for this ``d`` (in particular ``d < k`` for some patterns).
    """
    lam = as_partition(lam)
    k = lam.k
    alg = class_algebra(k)
    inv = inverse_trace_function(d, k)
    out: dict = {}
    for (mu, nu), c in alg.counts[lam.parts].items():
        out[nu] = out.get(nu, Fraction(0)) + inv[mu] * c
    return {nu: w for nu, w in out.items() if w != 0}


def spectral_polykay(sample: SpectralSample, lam, convention: str = "corrected"):
    """Spectral polykay ``κ̃_λ`` of one matrix sample."""
    lam = as_partition(lam)
    weights = spectr_weights(lam, sample.d)
    pref = spectral_prefactor(lam, convention)
    total = sum(float(w) * prod(sample.trace(j) for j in nu) for nu, w in weights.items())
    return pref * total


# -- full group functions, for checking the class-algebra shortcut -----------


def group_convolve(f: Mapping, g: Mapping, k: int) -> dict:
    """Convolution of arbitrary functions on ``S_k`` keyed by one-line permutations."""
    perms = list(itertools.permutations(range(k)))
    out = {}
    for sigma in perms:
        out[sigma] = sum(f[tau] * g[_compose(_inverse(tau), sigma)] for tau in perms)
    return out


def lift_class_function(f: Mapping, k: int) -> dict:
    return {p: f[cycle_type(p).parts] for p in itertools.permutations(range(k))}


# Order <= 3 formulas in the printed form, as functions of (T1, T2, T3, d).
# The printed order-2 pair is identical, so at most one of them is right.


def _printed_11(T, d):
    return (d * T[1] ** 2 - T[2]) / (d * (d**2 - 1))


def _printed_2(T, d):
    return (d * T[1] ** 2 - T[2]) / (d * (d**2 - 1))


def _printed_111(T, d):
    return (T[1] ** 3 * (d**2 - 2) - 3 * d * T[1] * T[2] + 4 * T[3]) / (d * (d**2 - 1) * (d**2 - 4))


def _printed_12(T, d):
    return (-2 * d * T[3] + (d**2 + 2) * T[1] * T[2] - d * T[1] ** 3) / (d * (d**2 - 1) * (d**2 - 4))


def _printed_3(T, d):
    return 2 * (2 * T[1] ** 3 - 3 * d * T[1] * T[2] + d**2 * T[3]) / (d * (d**2 - 1) * (d**2 - 4))


PRINTED_SPECTRAL = {
    (1,): lambda T, d: T[1] / d,
    (1, 1): _printed_11,
    (2,): _printed_2,
    (1, 1, 1): _printed_111,
    (2, 1): _printed_12,
    (3,): _printed_3,
}


def printed_spectral_polykay(sample: SpectralSample, lam):
    lam = as_partition(lam)
    T = {j: sample.trace(j) for j in range(1, lam.k + 1)}
    return PRINTED_SPECTRAL[lam.parts](T, sample.d)


def weights_as_formula(lam, d: int, convention: str = "corrected") -> dict[tuple[int, ...], Fraction]:
    """Full coefficients of the monomials ``prod T_j`` including the prefactor."""
    pref = spectral_prefactor(lam, convention)
    return {nu: pref * w for nu, w in spectr_weights(lam, d).items()}


def printed_formula_coefficients(lam, d: int) -> dict[tuple[int, ...], Fraction]:
    """Expand a printed formula into monomial coefficients by exact evaluation."""
    lam = as_partition(lam)
    k = lam.k
    monos = [m.parts for m in enumerate_partitions(k)]
    fn = PRINTED_SPECTRAL[lam.parts]
    # the formula is homogeneous of degree k in (T_1, T_2, T_3) with weights j:
    # evaluate on enough integer points and solve for the coefficients
    pts = [{1: Fraction(a), 2: Fraction(b), 3: Fraction(c)} for a, b, c in
           itertools.product(range(1, 4), repeat=3)]
    rows, rhs = [], []
    for T in pts:
        rows.append([prod(T[j] for j in m) for m in monos])
        rhs.append(fn(T, Fraction(d)))
    A = Matrix(rows)
    sol = (A.T * A).LUsolve(A.T * Matrix(rhs))
    return {m: Fraction(int(v.p), int(v.q)) for m, v in zip(monos, sol) if v != 0}
