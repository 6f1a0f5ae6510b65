"""Quasi-exactly solvable multiplets of the complexified quartic oscillator
with centrifugal and Coulombic terms."""
from .errors import DegenerateSpec, DomainError, InvalidInput, UnsupportedError
from .model import (
    BandedSystem,
    Contour,
    ModelSpec,
    PhysicalCouplings,
    build_system,
    check_contour,
    contour_point,
    from_bender_boettcher,
    internal_from_physical,
    interpret_K,
    linear_coupling,
    recurrence_coeffs,
)
from .polyalg import (
    MultiPoly,
    RootIsolation,
    det_fraction_free,
    isolate_real_roots,
    refine_root,
    resultant,
    sparsity_reduce,
    squarefree_part,
)
from .secular import SecularPair, constraint_poly, eliminate, energy_closed_form, secular_poly
from .spectrum import (
    QuasiExactState,
    check_normalizability,
    evaluate_wavefunction,
    null_vector,
    solve_spectrum,
    symbolic_residual,
)

__version__ = "0.1.0"
