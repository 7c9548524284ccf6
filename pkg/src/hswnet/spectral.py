"""Laplacian spectra: closed form for M_g^r, numeric oracle, eigenvectors, extremes."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import config
from .eigen import cluster, eigvalsh
from .errors import BudgetExceeded, GraphError, SpectrumError
from .graph import Graph, adjacency_matrix, laplacian, require_connected
from .hsw import HierarchicalNetwork, order_and_size

ZERO_TOL = 1e-8


@dataclass(frozen=True)
class SpectrumResult:
    pairs: tuple[tuple[float, int], ...]
    source: str
    n: int

    def __post_init__(self) -> None:
        if self.source not in ("closed_form", "numeric"):
            raise ValueError(f"unknown spectrum source {self.source!r}")
        if sum(m for _, m in self.pairs) != self.n:
            raise SpectrumError("multiplicities do not add up to n")
        if any(m < 1 for _, m in self.pairs):
            raise SpectrumError("multiplicities must be positive")

    def eigenvalues(self) -> np.ndarray:
        return np.repeat([lam for lam, _ in self.pairs], [m for _, m in self.pairs])

    def nonzero(self) -> list[tuple[float, int]]:
        """Pairs with the (single) zero eigenvalue removed."""
        lam0, m0 = self.pairs[0]
        if abs(lam0) > ZERO_TOL:
            raise SpectrumError("spectrum has no zero eigenvalue")
        if m0 != 1:
            raise SpectrumError(f"zero eigenvalue has multiplicity {m0}; graph is disconnected")
        return list(self.pairs[1:])

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "source": self.source,
            "pairs": [{"lambda": lam, "mult": m} for lam, m in self.pairs],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SpectrumResult":
        data = json.loads(text)
        pairs = tuple((float(p["lambda"]), int(p["mult"])) for p in data["pairs"])
        return cls(pairs=pairs, source=data["source"], n=int(data["n"]))


@dataclass(frozen=True)
class EigenPair:
    eigenvalue: float
    vector: np.ndarray
    # ||L x - lambda x||_inf / ||x||_inf against the network Laplacian
    residual: float


@dataclass(frozen=True)
class SpectralExtremes:
    lambda2: float
    lambdaN: float
    eps_max: float


def closed_form_spectrum(r: int, g: int) -> SpectrumResult:
    """Laplacian spectrum of M_g^r, with multiplicities, without building it.

    For each level ``i < g`` the spectrum holds ``i + 1`` with multiplicity
    ``(r - 1) r**i`` and ``(r**(g-i+1) - 1)/(r - 1) + i`` with multiplicity
    ``r**i``, plus a simple zero. Coinciding values are merged.
    """
    if r < 2:
        raise GraphError(f"branching factor r must be >= 2, got {r}")
    if g < 1:
        raise GraphError("closed form needs g >= 1 (M_0 is a single vertex)")
    mult: dict[int, int] = {0: 1}
    for i in range(g):
        low = i + 1
        high = (r ** (g - i + 1) - 1) // (r - 1) + i
        mult[low] = mult.get(low, 0) + (r - 1) * r**i
        mult[high] = mult.get(high, 0) + r**i
    n, _ = order_and_size(r, g)
    pairs = tuple((float(lam), m) for lam, m in sorted(mult.items()))
    return SpectrumResult(pairs=pairs, source="closed_form", n=n)


def closed_form_exact(r: int, g: int) -> dict[int, int]:
    """Same as :func:`closed_form_spectrum` but with exact integer eigenvalues."""
    return {int(lam): m for lam, m in closed_form_spectrum(r, g).pairs}


def _check_dense(g: Graph) -> None:
    if g.n > config.DENSE_LIMIT:
        raise BudgetExceeded(f"n={g.n} exceeds dense limit {config.DENSE_LIMIT}")


def numeric_spectrum(g: Graph, gap: float = config.CLUSTER_GAP) -> SpectrumResult:
    _check_dense(g)
    values = eigvalsh(laplacian(g))
    return SpectrumResult(pairs=tuple(cluster(values, gap)), source="numeric", n=g.n)


def transition_spectrum(g: Graph) -> list[float]:
    """Eigenvalues of the random-walk matrix D^-1 A, largest first."""
    _check_dense(g)
    require_connected(g)
    A = adjacency_matrix(g)
    s = 1.0 / np.sqrt(A.sum(axis=1))
    values = eigvalsh(s[:, None] * A * s[None, :])
    return sorted((float(v) for v in values), reverse=True)


def _residual(net: HierarchicalNetwork, lam: float, x: np.ndarray) -> float:
    L = laplacian(net.graph)
    return float(np.max(np.abs(L @ x - lam * x)) / np.max(np.abs(x)))


def _require_non_leaf(net: HierarchicalNetwork, v: int) -> None:
    if not 0 <= v < net.n:
        raise GraphError(f"vertex {v} out of range")
    if net.is_leaf(v):
        raise GraphError(f"vertex {v} is a leaf of the basic tree")


def eigenvector_family1(net: HierarchicalNetwork, v: int) -> EigenPair:
    """Eigenvector for ``deg(v) + 1``: ``-D_v`` at ``v`` and ``+1`` on its descendants."""
    _require_non_leaf(net, v)
    x = np.zeros(net.n)
    x[v] = -net.desc_count[v]
    x[net.descendants(v)] = 1.0
    lam = float(net.graph.degree(v) + 1)
    return EigenPair(lam, x, _residual(net, lam, x))


def eigenvector_family2(net: HierarchicalNetwork, v: int, s: int) -> EigenPair:
    """Eigenvector for ``level(v) + 1`` pairing child subtree 1 against subtree ``s``.

    ``s`` counts children from 1, so valid values are ``2 .. r``.
    """
    _require_non_leaf(net, v)
    if not 2 <= s <= net.r:
        raise GraphError(f"s must lie in [2, {net.r}], got {s}")
    kids = net.children(v)
    x = np.zeros(net.n)
    x[net.subtree(kids[0])] = -1.0
    x[net.subtree(kids[s - 1])] = 1.0
    lam = float(net.level[v] + 1)
    return EigenPair(lam, x, _residual(net, lam, x))


def extremes(spec: SpectrumResult) -> SpectralExtremes:
    nz = spec.nonzero()
    if not nz:
        raise SpectrumError("spectrum has no nonzero eigenvalue")
    lam2, lamN = nz[0][0], nz[-1][0]
    return SpectralExtremes(lambda2=lam2, lambdaN=lamN, eps_max=math.pi / (2 * lamN))


def baseline_extremes(family: str, n: int) -> tuple[float, float]:
    """Closed-form ``(lambda_2, lambda_N)`` as tabulated for the baseline families.

    The cycle entry for ``lambda_N`` is the tabulated ``2 - 2cos((N-1)pi/N)``,
    which is the true largest eigenvalue only for odd ``N``; for even ``N``
    the cycle reaches 4. See :func:`cycle_lambda_max` for the exact value.
    """
    if family == "path":
        return 2 - 2 * math.cos(math.pi / n), 2 - 2 * math.cos((n - 1) * math.pi / n)
    if family == "cycle":
        return 2 - 2 * math.cos(2 * math.pi / n), 2 - 2 * math.cos((n - 1) * math.pi / n)
    if family == "complete":
        return float(n), float(n)
    if family in ("star", "hsw"):
        return 1.0, float(n)
    raise GraphError(f"unknown family {family!r}")


def cycle_lambda_max(n: int) -> float:
    return 2 - 2 * math.cos(2 * math.pi * (n // 2) / n)
