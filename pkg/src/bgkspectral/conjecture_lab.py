"""Numerical study of the projected-operator norm constants.

Four compositions built from the projection onto the retained polynomial
space, the derivative pair d / d*, and negative powers of Omega = d* d + 1
enter the decay analysis of the scheme; whether their norms stay bounded as
the space truncation N grows is an open question.  This module estimates the
norms through Galerkin truncations of Omega at an ambient size M_big and
reports how they stabilize as M_big grows, which is the only honesty
mechanism available: nothing here is proven.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import build_omega_matrix, build_phi_matrix
from .orthopoly import RecurrenceTable, build_recurrence
from .potential import NormalizedPotential


@dataclass(frozen=True)
class KNReport:
    """Norm estimates for one space truncation N at ambient size m_big."""

    N: int
    m_big: int
    kn: tuple[float, float, float, float]
    converged: bool


def estimate_kn(table: RecurrenceTable, pot: NormalizedPotential, N: int,
                m_big: int) -> np.ndarray:
    """Largest singular values of the four projected compositions on X_N.

    Inputs are restricted to polynomials of degree <= N; the compositions are
    applied as dense m_big-by-(N+1) matrices with Omega powers formed from the
    symmetric eigendecomposition of the m_big truncation.
    """
    two_m = pot.degree
    if m_big < N + 2 * two_m:
        raise ValueError(
            f"m_big={m_big} leaves no room for the degree growth of d* "
            f"(need at least N + {2 * two_m})"
        )
    phi = build_phi_matrix(table, pot, m_big + two_m)
    full = phi.toarray()
    lower = np.tril(full, -1)[:m_big, :m_big]
    upper = np.triu(full, 1)[:m_big, :m_big]
    omega = build_omega_matrix(phi, m_big).toarray()

    evals, vecs = np.linalg.eigh(omega)
    if evals.min() <= 0.0:
        raise RuntimeError(
            f"Omega truncation not positive definite (min eigenvalue {evals.min()}); "
            "operator assembly is inconsistent"
        )
    om_isqrt = (vecs * evals ** -0.5) @ vecs.T
    om_inv = (vecs / evals) @ vecs.T

    proj = np.zeros((m_big, m_big))
    proj[np.arange(N + 1), np.arange(N + 1)] = 1.0
    embed = np.eye(m_big)[:, : N + 1]

    ps = proj @ lower
    comps = (
        om_isqrt @ ps @ embed,
        om_inv @ upper @ ps @ embed,
        om_inv @ ps @ ps @ embed,
        om_inv @ proj @ lower @ upper @ embed,
    )
    return np.array([np.linalg.norm(c, ord=2) for c in comps])


def _agree(a: np.ndarray, b: np.ndarray, rel_tol: float) -> bool:
    return bool(np.all(np.abs(a - b) <= rel_tol * np.maximum(np.abs(b), 1e-12)))


def kn_sweep(pot: NormalizedPotential, n_values, table: RecurrenceTable | None = None,
             m_factors=(1, 2, 4), rel_tol: float = 0.01) -> list[KNReport]:
    """Norm estimates over a list of truncations N, with a stabilization check.

    For each N the ambient size runs through m_factors * (N + 16); the
    reported values come from the largest ambient size and are flagged
    converged only when the last two sizes agree to rel_tol componentwise.
    """
    n_values = list(n_values)
    if not n_values:
        return []
    two_m = pot.degree
    max_big = max(f * (n + 16) for n in n_values for f in m_factors)
    if table is None or table.n_max < max_big + 2 * two_m + 2:
        table = build_recurrence(pot, max_big + 2 * two_m + 2)
    reports = []
    for n in n_values:
        bigs = sorted(f * (n + 16) for f in m_factors)
        values = [estimate_kn(table, pot, n, b) for b in bigs]
        converged = len(values) >= 2 and _agree(values[-2], values[-1], rel_tol)
        reports.append(KNReport(N=n, m_big=bigs[-1],
                                kn=tuple(float(v) for v in values[-1]),
                                converged=converged))
    return reports
