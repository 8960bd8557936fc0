"""Closed-loop stability of the lookahead controller on linear plants.

For an LTI plant the joint state ``(x, u)`` obeys ``d/dt (x, u) = Phi (x, u) +
(0, Psi) r(t + T)``. ``build_phi_psi`` forms these matrices; the position
example, whose ``A`` is singular, has its own closed form in ``position_phi``.
Hurwitz tests run two independent ways: Routh first column and spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import PlantModel
from .errors import ArgumentError, NumericError
from .predictor import lti_lookahead_blocks

MARGINAL_EPS = 1e-9
ROUTH_ZERO_TOL = 1e-12
VERDICTS = ("stable", "marginal", "unstable")


@dataclass(frozen=True)
class StabilityReport:
    phi: np.ndarray
    psi: np.ndarray | None
    char_poly: list
    routh_first_column: list
    max_real_eigenvalue: float
    hurwitz: str
    routh_verdict: str

    def as_record(self) -> dict:
        """Flat key/value view used by the CLI."""
        rec = {
            "hurwitz": self.hurwitz,
            "routh_verdict": self.routh_verdict,
            "max_real_eigenvalue": self.max_real_eigenvalue,
            "char_poly": " ".join(f"{c:.9g}" for c in self.char_poly),
            "routh_first_column": " ".join(f"{c:.9g}" for c in self.routh_first_column),
        }
        rows = self.phi.shape[0]
        for i in range(rows):
            rec[f"phi_row{i + 1}"] = " ".join(f"{v:.9g}" for v in self.phi[i])
        if self.psi is not None:
            for i in range(self.psi.shape[0]):
                rec[f"psi_row{i + 1}"] = " ".join(f"{v:.9g}" for v in self.psi[i])
        return rec


# --- closed-loop matrices ---------------------------------------------------


def build_phi_psi(plant: PlantModel, T: float, alpha: float = 1.0):
    """Closed-loop matrix ``Phi_T`` and reference feed ``Psi_T`` (with speedup ``alpha``)."""
    if plant.kind != "lti":
        raise ArgumentError(f"build_phi_psi needs an LTI plant, got {plant.kind}")
    A, B = plant.params["A"], plant.params["B"]
    n, k = plant.n, plant.k
    _, J, CE = lti_lookahead_blocks(plant, T)
    psi = alpha * np.linalg.inv(J)
    phi = np.zeros((n + k, n + k))
    phi[:n, :n] = A
    phi[:n, n:] = B
    phi[n:, :n] = -alpha * np.linalg.solve(J, CE)
    phi[n:, n:] = -alpha * np.eye(k)
    return phi, psi


def _position_denominator(a: float, T: float) -> float:
    # e^{aT} - 1 - aT, positive for every aT != 0
    return math.expm1(a * T) - a * T


def _check_position_args(a, T):
    if a == 0:
        raise ArgumentError("position system requires a != 0")
    if not T > 0:
        raise ArgumentError(f"T must be positive, got {T}")


def position_phi(a: float, T: float, alpha: float = 1.0) -> np.ndarray:
    _check_position_args(a, T)
    den = _position_denominator(a, T)
    return np.array(
        [
            [0.0, 1.0, 0.0],
            [0.0, a, 1.0],
            [
                -alpha * a * a / den,
                -alpha * a * math.expm1(a * T) / den,
                -alpha,
            ],
        ]
    )


def position_char_poly(a: float, T: float, alpha: float = 1.0) -> list:
    """Monic characteristic polynomial of ``position_phi``, highest degree first."""
    _check_position_args(a, T)
    den = _position_denominator(a, T)
    return [1.0, alpha - a, alpha * a * a * T / den, alpha * a * a / den]


def position_stability_condition(a: float, T: float, alpha: float = 1.0, eps: float = MARGINAL_EPS) -> str:
    """Closed-form verdict: stable iff ``a < alpha`` and ``T > 1/(alpha - a)``."""
    _check_position_args(a, T)
    gap = alpha - a
    # a = alpha kills the s^2 term; s^3 + p s + q with q > 0 has a right-half-plane root
    if gap <= eps:
        return "unstable"
    margin = T - 1.0 / gap
    if abs(margin) <= eps * max(1.0, T):
        return "marginal"
    return "stable" if margin > 0 else "unstable"


def position_boundary_T(a: float, alpha: float = 1.0) -> float:
    """Critical horizon ``1/(alpha - a)``; ``inf`` when no horizon stabilises."""
    return 1.0 / (alpha - a) if a < alpha else math.inf


# --- polynomial / spectral tests --------------------------------------------


def char_poly(M) -> list:
    """Monic characteristic polynomial of ``M`` (Faddeev-LeVerrier)."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[0]
    coeffs = [1.0]
    Mk = np.zeros_like(M)
    eye = np.eye(n)
    for k in range(1, n + 1):
        Mk = M @ (Mk + coeffs[-1] * eye)
        coeffs.append(-np.trace(Mk) / k)
    return [float(c) for c in coeffs]


def routh_first_column(coeffs, tol: float = ROUTH_ZERO_TOL) -> list:
    """First column of the Routh table, top row first.

    A pivot that cancels to within ``tol`` (relative to the products it came
    from) is recorded as exactly 0.0 and every later entry as NaN; the table is
    not continued with an epsilon substitute.
    """
    c = [float(v) for v in coeffs]
    if len(c) < 2:
        raise ArgumentError("Routh test needs degree >= 1")
    if c[0] != 1.0:
        raise ArgumentError(f"Routh test expects a monic polynomial, leading coefficient {c[0]}")
    deg = len(c) - 1
    width = deg // 2 + 1
    prev = c[0::2] + [0.0] * (width - len(c[0::2]))
    cur = c[1::2] + [0.0] * (width - len(c[1::2]))
    column = [prev[0], cur[0]]
    for _ in range(deg - 1):
        pivot = cur[0]
        if pivot == 0.0:
            break
        nxt = []
        exact_zero = False
        for j in range(width - 1):
            lhs, rhs = cur[0] * prev[j + 1], prev[0] * cur[j + 1]
            val = (lhs - rhs) / pivot
            if j == 0 and abs(lhs - rhs) <= tol * max(abs(lhs), abs(rhs)):
                val = 0.0
                exact_zero = True
            nxt.append(val)
        nxt.append(0.0)
        column.append(nxt[0])
        prev, cur = cur, nxt
        if exact_zero:
            break
    if abs(column[1]) <= tol:
        column[1] = 0.0
    column += [math.nan] * (deg + 1 - len(column))
    return column


def routh_verdict(column) -> str:
    """Read a Routh first column: any sign change before a zero pivot means unstable."""
    for v in column:
        if math.isnan(v) or v == 0.0:
            return "marginal"
        if v < 0:
            return "unstable"
    return "stable"


def eigen_max_real(M) -> float:
    """Largest real part in the spectrum of a small dense matrix."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise ArgumentError(f"eigen_max_real needs a square matrix, got {M.shape}")
    if M.shape[0] > 10:
        raise ArgumentError(f"eigen_max_real is limited to dimension 10, got {M.shape[0]}")
    if not np.all(np.isfinite(M)):
        raise NumericError("eigen_max_real: non-finite entries")
    try:
        eig = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue iteration did not converge: {exc}") from exc
    return float(np.max(eig.real))


def spectral_verdict(max_real: float, eps: float = MARGINAL_EPS) -> str:
    if max_real < -eps:
        return "stable"
    if max_real <= eps:
        return "marginal"
    return "unstable"


def _report(phi, psi, poly):
    col = routh_first_column(poly)
    mre = eigen_max_real(phi)
    return StabilityReport(phi, psi, poly, col, mre, spectral_verdict(mre), routh_verdict(col))


def position_stability_report(a: float, T: float, alpha: float = 1.0) -> StabilityReport:
    return _report(position_phi(a, T, alpha), None, position_char_poly(a, T, alpha))


def lti_stability_report(plant: PlantModel, T: float, alpha: float = 1.0) -> StabilityReport:
    phi, psi = build_phi_psi(plant, T, alpha)
    return _report(phi, psi, char_poly(phi))


def position_sweep(a_values, T_values, alphas=(1.0,)):
    """Grid rows ``(a, T, alpha, verdict, max_real_eig)`` for the position system."""
    rows = []
    for alpha in alphas:
        for a in a_values:
            for T in T_values:
                verdict = position_stability_condition(a, T, alpha)
                rows.append((float(a), float(T), float(alpha), verdict,
                             eigen_max_real(position_phi(a, T, alpha))))
    return rows
