"""Euler integrals backing the coverage analysis.

The interference penalty per decode stage reduces to an upper tail of the
Euler integral of the first kind,

    beta_complement(x, y, z) = integral of u**(x-1) * (1-u)**(y-1) over [z, 1].

For the path loss exponents of interest both shape arguments lie in (0, 1),
so the integrand blows up (integrably) at the endpoints.  Evaluation goes
through QUADPACK with algebraic endpoint weights, which factors the
singular powers out of the integrand instead of sampling across them.
"""

from __future__ import annotations

from dataclasses import dataclass

from scipy import integrate

__all__ = ["QuadratureSpec", "beta", "beta_complement"]


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy knobs for the quadrature backend.

    abs_tol is the absolute error demanded of every integral; the routines
    raise rather than return a value whose error estimate exceeds it.
    max_subdivisions caps the adaptive interval count.
    """

    abs_tol: float = 1e-12
    max_subdivisions: int = 2**20

    def __post_init__(self) -> None:
        if not self.abs_tol > 0.0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise ValueError(
                f"max_subdivisions must be at least 1, got {self.max_subdivisions}"
            )


_DEFAULT = QuadratureSpec()

# QUADPACK allocates workspace proportional to the subdivision limit, so the
# per-call limit is max_subdivisions clamped to a generous practical bound.
_LIMIT_CLAMP = 4096


def _quad_alg(func, lo, hi, left_pow, right_pow, quadrature):
    limit = min(quadrature.max_subdivisions, _LIMIT_CLAMP)
    val, err = integrate.quad(
        func,
        lo,
        hi,
        weight="alg",
        wvar=(left_pow, right_pow),
        epsabs=quadrature.abs_tol,
        epsrel=0.0,
        limit=max(limit, 10),
    )
    if err > quadrature.abs_tol:
        raise ArithmeticError(
            f"quadrature error estimate {err:g} exceeds the requested "
            f"tolerance {quadrature.abs_tol:g}"
        )
    return val


def beta(x: float, y: float, quadrature: QuadratureSpec = _DEFAULT) -> float:
    """Complete Euler integral of the first kind for positive x, y."""
    if not x > 0.0 or not y > 0.0:
        raise ValueError(f"shape arguments must be positive, got x={x}, y={y}")
    # weight (u-0)**(x-1) * (1-u)**(y-1) absorbs both endpoint singularities
    return _quad_alg(lambda u: 1.0, 0.0, 1.0, x - 1.0, y - 1.0, quadrature)


def beta_complement(
    x: float, y: float, z: float, quadrature: QuadratureSpec = _DEFAULT
) -> float:
    """Upper tail of the Euler integral over [z, 1].

    Complements the lower tail exactly: beta_complement(x, y, 0) == beta(x, y)
    and beta_complement(x, y, 1) == 0.
    """
    if not x > 0.0 or not y > 0.0:
        raise ValueError(f"shape arguments must be positive, got x={x}, y={y}")
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"lower limit must lie in [0, 1], got z={z}")
    if z == 1.0:
        return 0.0
    if z == 0.0:
        return beta(x, y, quadrature)
    # on [z, 1] only the right endpoint is singular; u**(x-1) stays smooth
    return _quad_alg(lambda u: u ** (x - 1.0), z, 1.0, 0.0, y - 1.0, quadrature)
