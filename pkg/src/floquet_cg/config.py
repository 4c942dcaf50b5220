"""Shared tolerance constants and exception types."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

QUAD_RTOL_ENV = "FLOQUET_CG_QUAD_RTOL"


class FloquetCGError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(FloquetCGError, ValueError):
    pass


class DegenerateSpectrumError(FloquetCGError):
    pass


class AliasingError(FloquetCGError):
    pass


class QuadratureError(FloquetCGError):
    """Adaptive quadrature gave up; ``estimate`` carries the last error estimate."""

    def __init__(self, message, value=None, estimate=None):
        super().__init__(message)
        self.value = value
        self.estimate = estimate


class ConsistencyError(FloquetCGError):
    """A generator or propagated state broke an invariant that theory guarantees."""


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12
    trace: float = 1e-10
    positivity: float = 1e-9
    kossakowski_hermitian: float = 1e-10
    kossakowski_psd: float = 1e-9
    symmetrize_flag: float = 1e-8
    unitary: float = 1e-9
    quad_rtol: float = 1e-10
    quad_atol: float = 1e-14
    # quasienergy coincidence, in units of the driving frequency
    degeneracy: float = 1e-10

    def with_env(self) -> "Tolerances":
        raw = os.environ.get(QUAD_RTOL_ENV)
        if not raw:
            return self
        try:
            rtol = float(raw)
        except ValueError as exc:
            raise InvalidInputError(f"{QUAD_RTOL_ENV}={raw!r} is not a number") from exc
        if not rtol > 0:
            raise InvalidInputError(f"{QUAD_RTOL_ENV} must be positive, got {rtol}")
        return replace(self, quad_rtol=rtol)


DEFAULT_TOLERANCES = Tolerances()


def default_tolerances() -> Tolerances:
    return DEFAULT_TOLERANCES.with_env()
