"""Finite-rank perturbation resolvents for an oscillator coupled to a 1D field."""
from .branchkit import Sheet, SheetPoint, k_minus, k_plus, k_upper
from .errors import (
    AtPole, BranchCutError, DomainError, PoleOfExpression, QuadratureFailure,
    RankResError, ResonanceAtMinusOmegaSq, RootRefinementFailure, SingularBlock,
    SingularMatrix, SingularPerturbation,
)
from .finiterank import (
    FrobeniusVariant, dense_invert, frobenius_invert, solve_block, solve_rank_one,
    solve_rank_two,
)
from .green1d import (
    Boxcar, FieldSpec, Gaussian, PointSource, QuadratureConfig, green_apply,
    green_kernel,
)
from .models import (
    CoupledParams, CoupledSolution, FriedrichsParams, coupled_determinant,
    friedrichs_determinant, solve_coupled, solve_coupled_via_rank_one, solve_friedrichs,
)
from .resonance import (
    AmplitudeTriple, PoleSet, RenormalizedParams, ResonantSet, amplitudes,
    det_inv_extended, friedrichs_poles, phase_shift, resonance_poles,
    resonant_wavenumbers, sheet_eval,
)

__version__ = "0.1.0"
