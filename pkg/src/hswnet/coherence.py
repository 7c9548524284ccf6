"""First- and second-order network coherence, Kirchhoff index and bounds.

All sums go through :func:`math.fsum`, which returns the correctly rounded
sum of its float inputs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from . import config
from .errors import SpectrumError
from .graph import Graph, GraphMetrics
from .hsw import order_and_size
from .spectral import SpectrumResult


def coherence_from_spectrum(spec: SpectrumResult, order: int) -> float:
    """Mean steady-state deviation variance, ``(1/2n) sum mult / lambda**order``."""
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    nz = spec.nonzero()
    if not nz:
        raise SpectrumError("spectrum has no nonzero eigenvalue")
    return math.fsum(m / lam**order for lam, m in nz) / (2 * spec.n)


def _closed_terms(r: int, g: int, order: int) -> float:
    if r < 2 or g < 1:
        raise ValueError(f"need r >= 2 and g >= 1, got r={r}, g={g}")
    prefactor = (r - 1) ** 2 / (2 * (r ** (g + 1) - 1))
    terms = []
    for i in range(g):
        hub = r ** (g - i + 1) + i * (r - 1) - 1
        if order == 1:
            terms.append(r**i / hub)
            terms.append(r**i / (i + 1))
        else:
            terms.append(r**i * (r - 1) / hub**2)
            terms.append(r**i / (i + 1) ** 2)
    return prefactor * math.fsum(terms)


def h1_closed(r: int, g: int) -> float:
    """First-order coherence of M_g^r from its level-by-level closed form."""
    return _closed_terms(r, g, 1)


def h2_closed(r: int, g: int) -> float:
    """Second-order coherence of M_g^r from its level-by-level closed form."""
    return _closed_terms(r, g, 2)


def kirchhoff_index(spec: SpectrumResult) -> tuple[float, float]:
    """Return ``(R, H1)`` with ``R = n * sum mult/lambda`` and ``H1 = R / (2 n**2)``."""
    nz = spec.nonzero()
    R = spec.n * math.fsum(m / lam for lam, m in nz)
    return R, R / (2 * spec.n**2)


@dataclass(frozen=True)
class CoherenceReport:
    n: int
    h1: float
    h2: float
    kirchhoff: float
    h1_from_kirchhoff: float
    lower_bound_k: float
    # (n-1)^2 / (2 n^2 <k>): the finite-n form that the 1/(2<k>) bound approaches
    lower_bound_k_finite: float
    upper_bound_mu: float
    transition_lower: float
    transition_upper: float
    lambda2: float
    lambdaN: float
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "checks"}
        out["checks"] = dict(self.checks)
        out["pass"] = self.passed
        return out


def bound_report(g: Graph, spec: SpectrumResult, theta, metrics: GraphMetrics) -> CoherenceReport:
    """Evaluate every coherence bound on one graph and record pass/fail per check.

    ``theta`` is the transition-matrix spectrum (largest first) and
    ``metrics`` the structural metrics of the same graph.
    """
    n = g.n
    theta = sorted((float(t) for t in theta), reverse=True)
    if spec.n != n or len(theta) != n or metrics.n != n:
        raise ValueError("spectrum, transition spectrum and metrics describe different graphs")
    nz = spec.nonzero()
    h1 = coherence_from_spectrum(spec, 1)
    h2 = coherence_from_spectrum(spec, 2)
    R, h1_R = kirchhoff_index(spec)
    walk = math.fsum(1.0 / (1.0 - t) for t in theta[1:])
    k = metrics.avg_degree
    report = CoherenceReport(
        n=n,
        h1=h1,
        h2=h2,
        kirchhoff=R,
        h1_from_kirchhoff=h1_R,
        lower_bound_k=1.0 / (2 * k),
        lower_bound_k_finite=(n - 1) ** 2 / (2 * n**2 * k),
        upper_bound_mu=metrics.avg_path_length / 4,
        transition_lower=walk / (2 * n * metrics.max_degree),
        transition_upper=walk / (2 * n * metrics.min_degree),
        lambda2=nz[0][0],
        lambdaN=nz[-1][0],
    )
    rel = 1e-9
    checks = report.checks
    checks["avg_degree_lower"] = report.lower_bound_k <= h1
    checks["avg_degree_lower_finite"] = report.lower_bound_k_finite <= h1 * (1 + rel)
    checks["path_length_upper"] = h1 <= report.upper_bound_mu * (1 + rel)
    checks["transition_lower"] = report.transition_lower <= h1 * (1 + rel)
    checks["transition_upper"] = h1 <= report.transition_upper * (1 + rel)
    checks["kirchhoff_identity"] = abs(h1 - h1_R) <= 1e-12 * h1
    if metrics.vertex_connectivity is not None:
        cv, ce = metrics.vertex_connectivity, metrics.edge_connectivity
        checks["fiedler_chain"] = report.lambda2 <= cv + 1e-9 and cv <= ce <= metrics.min_degree
    return report


@dataclass(frozen=True)
class ScalingRow:
    r: int
    g: int
    N: int
    h1: float
    h2: float
    h1_scaled: float
    h2_scaled: float


def scaling_table(r: int, g_max: int) -> list[ScalingRow]:
    """Closed-form coherence for ``g = 1 .. g_max`` with log-rescaled columns.

    ``h1_scaled = h1 ln N ln ln N`` and ``h2_scaled = h2 (ln N)^2 ln ln N``;
    roughly constant columns mean the coherence follows those rates.
    """
    if g_max < 2:
        raise ValueError("g_max must be >= 2")
    rows = []
    for g in range(1, g_max + 1):
        n, _ = order_and_size(r, g)
        if n > 2**53:
            raise OverflowError(f"N={n} at g={g} is beyond exact float range")
        h1, h2 = h1_closed(r, g), h2_closed(r, g)
        ln = math.log(n)
        lnln = math.log(ln)
        rows.append(ScalingRow(r, g, n, h1, h2, h1 * ln * lnln, h2 * ln * ln * lnln))
    return rows


def scaling_drift(rows: list[ScalingRow], column: str, g_min: int = 6) -> float:
    """max/min of ``column`` over rows with ``g >= g_min``."""
    vals = [getattr(row, column) for row in rows if row.g >= g_min]
    if not vals:
        raise ValueError(f"no rows with g >= {g_min}")
    return max(vals) / min(vals)


def r_effect(g: int, r_a: int = 2, r_b: int = 3) -> float:
    """Relative difference of first-order coherence between two branching factors."""
    a = h1_closed(r_a, g)
    return abs(a - h1_closed(r_b, g)) / a


def r_effect_is_limited(g: int, threshold: float = config.R_EFFECT_THRESHOLD) -> bool:
    return r_effect(g) < threshold


def fmt17(x: float) -> str:
    return format(x, ".17g")


SCALING_HEADER = ("r", "g", "N", "h1", "h2", "h1_scaled", "h2_scaled")


def scaling_csv(rows: list[ScalingRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCALING_HEADER)
    for row in rows:
        w.writerow(
            [row.r, row.g, row.N]
            + [fmt17(v) for v in (row.h1, row.h2, row.h1_scaled, row.h2_scaled)]
        )
    return buf.getvalue()
