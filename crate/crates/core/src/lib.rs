//! Exact Hilbert–Kunz and Hilbert–Samuel invariants for monomial ideals in
//! polynomial rings over `F_p` and in two-dimensional normal affine
//! semigroup rings.

pub mod combinat;
pub mod error;
pub mod exact;
pub mod hilbert;
pub mod invariants;
pub mod length;
pub mod monomial;
pub mod toric;

pub use error::{HkError, Result};
pub use hilbert::{evaluate_binomial_poly, fit_hilbert_coefficients, hs_value, HilbertCoefficients, HilbertSampler};
pub use invariants::{
    additivity_check, beta_sequence, bound_diagnostic, bound_diagnostic_with, decompose_check, ehk_exact, ehk_of_power,
    ehk_sequence, ehk_value, ei_limit_sequence, elias_quantity, northcott_check, uniform_convergence_diagnostic,
    wy_check, AdditivityReport, BoundReport, Budget, DecomposeReport, InequalityReport, LimitEstimate, LimitTerm,
    UniformReport, Verdict,
};
pub use length::{colength, colength_dc, colength_ie, module_colength, ColengthProvider, RegularBackend};
pub use monomial::{minimalize, ExponentVec, ModuleSpec, MonomialIdeal, RegularRing};
pub use toric::{Lattice, SemigroupIdeal, ToricBackend, ToricRing2, WholeRing};
