"""Coarse-graining master equations for periodically driven two-level systems."""

__version__ = "0.1.0"

from .bath import (  # noqa: E402
    KernelSpec,
    OhmicBath,
    cg_exponent,
    decoherence_integral,
    f_kernel,
    freq_integral,
    gamma_ft,
    spectral_density,
)
from .config import (  # noqa: E402
    AliasingError,
    ConsistencyError,
    DegenerateSpectrumError,
    FloquetCGError,
    InvalidInputError,
    QuadratureError,
    Tolerances,
)
from .floquet import (  # noqa: E402
    CouplingHarmonics,
    DrivenHamiltonian,
    FloquetData,
    floquet_decompose,
    fourier_harmonics,
    propagate_period,
)
from .generators import (  # noqa: E402
    LgksGenerator,
    SchemeConfig,
    build_bms,
    build_bmu,
    build_cg,
    build_longterm,
    solve_dcg,
    solve_fixed,
)
from .models import (  # noqa: E402
    BlochSeries,
    Scenario,
    circular_model,
    circular_tilde_steady,
    fast_benchmark,
    fast_model,
    pd_analytic_cg,
    pd_exact,
    preset,
    simulate,
)

__all__ = [
    "__version__",
    "KernelSpec",
    "OhmicBath",
    "cg_exponent",
    "decoherence_integral",
    "f_kernel",
    "freq_integral",
    "gamma_ft",
    "spectral_density",
    "AliasingError",
    "ConsistencyError",
    "DegenerateSpectrumError",
    "FloquetCGError",
    "InvalidInputError",
    "QuadratureError",
    "Tolerances",
    "CouplingHarmonics",
    "DrivenHamiltonian",
    "FloquetData",
    "floquet_decompose",
    "fourier_harmonics",
    "propagate_period",
    "LgksGenerator",
    "SchemeConfig",
    "build_bms",
    "build_bmu",
    "build_cg",
    "build_longterm",
    "solve_dcg",
    "solve_fixed",
    "BlochSeries",
    "Scenario",
    "circular_model",
    "circular_tilde_steady",
    "fast_benchmark",
    "fast_model",
    "pd_analytic_cg",
    "pd_exact",
    "preset",
    "simulate",
]
