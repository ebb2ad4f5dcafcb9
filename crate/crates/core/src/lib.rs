//! Entropic separability criteria for one-parameter families of mixed states.
//!
//! The central quantity is the conditional sandwiched Tsallis relative entropy
//! (CSTRE) `D̃_q(ρ_AB ‖ I_A⊗ρ_B)`, whose negativity for `q > 1` certifies
//! entanglement across the cut `A : B`. Alongside it the crate evaluates the
//! Abe–Rajagopal conditional entropy, sandwiched Rényi and von Neumann
//! conditional entropies, the reduction criterion and the PPT criterion, and
//! finds the parameter value where each one starts detecting entanglement.
//!
//! Layout:
//! - [`linalg`]: Hermitian operators, density matrices, partial trace/transpose.
//! - [`states`]: Dicke-basis constructions and noisy families.
//! - [`entropy`]: the entropy functionals.
//! - [`separability`]: margins, verdicts, thresholds, closed forms and traces.
//! - [`checks`]: named reproduction checks and the acceptance gate.

pub mod checks;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod random;
pub mod separability;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{BipartiteCut, DensityMatrix, HermitianOperator, Spectrum, C64};
pub use separability::{Criterion, ThresholdOptions, ThresholdResult, Verdict};
pub use states::{FamilyKind, StateFamily};
