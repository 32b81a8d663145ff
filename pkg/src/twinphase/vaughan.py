"""Vaughan's identity as explicit bilinear sums.

For n > V,

    Lambda(n) = sum_{dl=n, d<=U} mu(d) log l
              - sum_{ml=n, m<=UV} (sum_{dk=m, d<=U, k<=V} mu(d) Lambda(k))
              - sum_{ml=n, m>U, l>V} (sum_{d|m, d<=U} mu(d)) Lambda(l),

two type I sums (against log l and against 1) and one type II sum.
Each component is stored as coefficient arrays a(m), b(l) so any test
function g can be summed against it with strided numpy slices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .primes import mangoldt_array, mobius_array


@dataclass(frozen=True, eq=False)
class BilinearComponent:
    """sum_m a(m) sum_l b(l) g(ml) over m_min <= m <= m_max, l_min <= l <= l_max."""

    kind: str
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    m_min: int
    m_max: int
    l_min: int
    l_max: int

    def evaluate(self, g: np.ndarray, n_lo: int, x: int) -> complex:
        """The component restricted to n_lo < ml <= x."""
        a, b = self.a, self.b
        ms = np.flatnonzero(a[self.m_min:self.m_max + 1]) + self.m_min
        ls = np.flatnonzero(b[self.l_min:self.l_max + 1]) + self.l_min
        parts = []
        if ms.size <= ls.size:
            for m in ms.tolist():
                l0 = max(self.l_min, n_lo // m + 1)
                l1 = min(self.l_max, x // m)
                if l0 <= l1:
                    parts.append(a[m] * np.dot(g[m * l0:m * l1 + 1:m], b[l0:l1 + 1]))
        else:
            for l in ls.tolist():
                m0 = max(self.m_min, n_lo // l + 1)
                m1 = min(self.m_max, x // l)
                if m0 <= m1:
                    parts.append(b[l] * np.dot(g[l * m0:l * m1 + 1:l], a[m0:m1 + 1]))
        return complex(np.sum(np.array(parts, dtype=np.complex128))) if parts else 0j


@dataclass(frozen=True, eq=False)
class VaughanDecomposition:
    x: int
    U: float
    V: float
    components: tuple[BilinearComponent, ...]
    mangoldt: np.ndarray = field(repr=False)

    @property
    def n_lo(self) -> int:
        """Sums run over n_lo < n <= x."""
        return int(math.floor(max(self.U, self.V)))

    def _g(self, g) -> np.ndarray:
        if callable(g):
            g = g(np.arange(self.x + 1, dtype=np.int64))
        g = np.asarray(g)
        if g.shape != (self.x + 1,):
            raise DomainError(f"test function must have length x + 1 = {self.x + 1}")
        return g

    def evaluate(self, g: np.ndarray | Callable) -> dict[str, complex]:
        """Each component summed against g, plus their total."""
        g = self._g(g)
        out = {c.kind: c.evaluate(g, self.n_lo, self.x) for c in self.components}
        out["total"] = complex(np.sum(np.array(list(out.values()), dtype=np.complex128)))
        return out

    def direct(self, g: np.ndarray | Callable) -> complex:
        """sum over n_lo < n <= x of Lambda(n) g(n)."""
        g = self._g(g)
        lo = self.n_lo + 1
        return complex(np.dot(self.mangoldt[lo:], g[lo:]))


def vaughan_decompose(x: float, U: float | None = None, V: float | None = None) -> VaughanDecomposition:
    """Split sum Lambda(n) g(n) over max(U, V) < n <= x into bilinear components.

    U and V default to x**(1/3).
    """
    x = int(math.floor(x))
    U = x ** (1 / 3) if U is None else float(U)
    V = x ** (1 / 3) if V is None else float(V)
    if U < 2 or V < 2:
        raise DomainError("vaughan_decompose needs U, V >= 2")
    if U * V > x:
        raise DomainError(f"U*V = {U * V:.6g} exceeds x = {x}")
    Ui, Vi = int(math.floor(U)), int(math.floor(V))
    mu = mobius_array(x).astype(np.float64)
    lam = mangoldt_array(x)
    logs = np.zeros(x + 1)
    logs[1:] = np.log(np.arange(1, x + 1, dtype=np.float64))

    # type I, log weight: a(d) = mu(d) for d <= U
    a1 = np.zeros(x + 1)
    a1[1:Ui + 1] = mu[1:Ui + 1]
    type_log = BilinearComponent("type_I_log", a1, logs, 1, Ui, 1, x)

    # type I, constant weight: a(m) = -sum_{dk=m, d<=U, k<=V} mu(d) Lambda(k)
    UV = min(x, Ui * Vi)
    a2 = np.zeros(x + 1)
    for d in range(1, Ui + 1):
        if mu[d]:
            kmax = min(Vi, UV // d)
            a2[d:d * kmax + 1:d] -= mu[d] * lam[1:kmax + 1]
    ones = np.ones(x + 1)
    ones[0] = 0
    type_const = BilinearComponent("type_I_const", a2, ones, 1, UV, 1, x)

    # type II: a(m) = -sum_{d|m, d<=U} mu(d) on m > U; b(l) = Lambda(l) on l > V
    m_max = x // (Vi + 1)
    a3 = np.zeros(x + 1)
    for d in range(1, Ui + 1):
        if mu[d]:
            a3[d:m_max + 1:d] -= mu[d]
    a3[:Ui + 1] = 0
    b3 = lam.copy()
    b3[:Vi + 1] = 0
    type_two = BilinearComponent("type_II", a3, b3, Ui + 1, m_max, Vi + 1, x)

    return VaughanDecomposition(x, U, V, (type_log, type_const, type_two), lam)


def coefficient_bound_violations(limit: int = 10**4, U: float | None = None,
                                 V: float | None = None) -> list[tuple[str, int]]:
    """m <= limit where a component coefficient exceeds tau(m) log m (or 1 at m = 1)."""
    dec = vaughan_decompose(max(limit, 8), U, V)
    tau = np.zeros(limit + 1)
    for d in range(1, limit + 1):
        tau[d::d] += 1
    logs = np.log(np.maximum(np.arange(limit + 1), 1))
    bound = np.maximum(tau * logs, 1.0)
    bad = []
    for comp in dec.components:
        for arr, name in ((comp.a, "a"), (comp.b, "b")):
            v = np.abs(arr[1:limit + 1]) > bound[1:] + 1e-12
            bad += [(f"{comp.kind}.{name}", int(m) + 1) for m in np.flatnonzero(v)]
    return bad
