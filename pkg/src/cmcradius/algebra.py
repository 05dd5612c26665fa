"""Pointwise algebraic identities behind the radius estimate.

These are the matrix inequalities and the Ricci contraction used when
turning the stability inequality into a bound on B.  Each check returns
the evaluated quantity (a slack or a curvature value) so test harnesses
can assert sign and magnitude directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionViolation

TRACE_TOL = 1e-12


@dataclass(frozen=True)
class TracelessMatrix:
    """Symmetric traceless n x n matrix (the trace-free shape-operator part)."""

    n: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=float)
        if m.shape != (self.n, self.n):
            raise PreconditionViolation(f"expected a {self.n}x{self.n} matrix, got {m.shape}")
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(m).max()))):
            raise PreconditionViolation("matrix is not symmetric")
        scale = max(1.0, float(np.linalg.norm(m)))
        if abs(float(np.trace(m))) > TRACE_TOL * scale:
            raise PreconditionViolation(f"trace {np.trace(m)} is not zero to within {TRACE_TOL} relative")
        object.__setattr__(self, "entries", m)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, scale: float = 1.0) -> "TracelessMatrix":
        """Random symmetric matrix with the trace projected out."""
        raw = rng.normal(0.0, scale, size=(n, n))
        sym = 0.5 * (raw + raw.T)
        sym -= np.trace(sym) / n * np.eye(n)
        return cls(n, sym)

    @property
    def norm2(self) -> float:
        """Squared Frobenius norm |Phi|^2."""
        return float(np.sum(self.entries**2))

    @property
    def first_diag(self) -> float:
        return float(self.entries[0, 0])

    @property
    def first_row_tail2(self) -> float:
        """Sum of squared off-diagonal first-row entries, j >= 2."""
        return float(np.sum(self.entries[0, 1:] ** 2))


def check_traceless_crude(phi: TracelessMatrix) -> float:
    """Slack of |Phi|^2 >= n/(n-1) Phi_11^2 + 2 sum_j Phi_1j^2 (nonnegative always)."""
    n = phi.n
    rhs = n / (n - 1) * phi.first_diag**2 + 2.0 * phi.first_row_tail2
    return phi.norm2 - rhs


def check_potential_remainder(phi: TracelessMatrix, k: float, delta: float) -> float:
    """Remainder k(1-d)|Phi|^2 - (5/4) Phi_11^2 - sum_j Phi_1j^2.

    Nonnegative whenever k exceeds the exponent lower bound
    5(n-1)/(4n(1-d)).
    """
    n = phi.n
    lo = 5.0 * (n - 1) / (4.0 * n * (1.0 - delta))
    if not k > lo:
        raise PreconditionViolation(f"k={k} must exceed 5(n-1)/(4n(1-delta)) = {lo}")
    return k * (1.0 - delta) * phi.norm2 - 1.25 * phi.first_diag**2 - phi.first_row_tail2


def gauss_ricci_contraction(phi: TracelessMatrix, H: float, ambient_sectional_sum: float) -> float:
    """Contracted Gauss equation for the Ricci curvature in the e_1 direction.

    R_11 = sum_j Rbar_1j1j - Phi_11^2 + (n-2) Phi_11 H + (n-1) H^2
           - sum_j Phi_1j^2,
    with `ambient_sectional_sum` supplying sum_j Rbar_1j1j.
    """
    n = phi.n
    p11 = phi.first_diag
    return (
        ambient_sectional_sum
        - p11 * p11
        + (n - 2) * p11 * H
        + (n - 1) * H * H
        - phi.first_row_tail2
    )
