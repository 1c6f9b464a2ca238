"""Coordinate-free harmonic analysis of symmetric tensors and spin observables.

The main entry points are re-exported here; see the submodules for the
full API.
"""

from .errors import MultipoleError
from .harmonic import (
    HarmonicTensor,
    eval_irregular,
    eval_regular,
    eval_spherical,
    harmonic_components,
    harmonic_contraction_via_traces,
    harmonic_inner_product,
    harmonic_part,
    project_function,
    reconstruct,
    sphere_average_product,
)
from .legendre import (
    binomial_legendre_coeffs,
    eval_legendre,
    legendre_coeffs,
    monomial_coeffs,
)
from .multipole import (
    Skeleton,
    interaction_energy,
    maxwell_potential,
    real_sectorial,
    sectorial,
    skeleton_to_harmonic,
    sylvester_decompose,
)
from .operator import (
    ClassicalObservable,
    alpha,
    beta,
    classical_from_polynomial,
    expectation_skeleton,
    expectation_tensor,
    to_symbol,
)
from .spinstate import (
    Constellation,
    SpinState,
    coherent_state,
    husimi,
    majorana_stars,
    overlap_geometric,
    state_from_stars,
)
from .symtensor import (
    SymTensor,
    apply_polarization,
    contract,
    delta,
    evaluate,
    from_vectors,
    sym_product,
    trace,
)

__version__ = "0.1.0"
