//! Exact word algebra for multiple zeta values, partial-fraction
//! decomposition of the matching nested sums, double shuffle relation
//! generation, and numerical verification.

pub mod algebra;
pub mod error;
pub mod eval;
pub mod exponent;
pub mod index;
pub mod lincomb;
pub mod nested;
pub mod regularize;
pub mod relations;
pub mod spp;
pub mod words;

pub use algebra::{binom, shuffle, shuffle_step, shuffle_zseqs_via_steps, stuffle, StepTerm};
pub use error::{Error, Result};
pub use eval::{
    eval_an, eval_mzv, eval_nested_sum, EvalParams, EvalResult, EvalResult32, EvalResult64,
};
pub use exponent::{Bindings, Exponent};
pub use index::{
    an_to_nested_sum, mzv_as_an, shuffle_state_layout, xr_layout, z_map, AnIndex, MzvIndex,
};
pub use lincomb::LinComb;
pub use nested::{apply_pfd, canonicalize, pfd_binary, Factor, NestedSumExpr};
pub use regularize::{extended_dsr, shuffle_regularize, TPoly};
pub use relations::{
    dsr_2_2_at, finite_dsr, functional_by_family, functional_dsr, functional_shuffle,
    functional_stuffle, gen_relations, verify, verify_functional, FunctionalRelation, Provenance,
    Relation, VerifyOutcome, ZetaTerm,
};
pub use spp::{
    pfd_full_reduce, spp_mirror_step, trace_commutative_diagram, DiagramTrace, SppState, TraceStep,
};
pub use words::{is_admissible, word_to_zseq, zseq_to_word, Letter, Word};
