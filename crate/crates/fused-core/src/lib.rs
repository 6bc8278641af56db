//! Braid-word algebra for classifying link closures up to fused isotopy.
//!
//! Words live in the virtual braid monoid on `m` strands: classical letters
//! `s<k>`/`S<k>` (a positive/negative crossing of positions k, k+1) and
//! virtual letters `t<k>` (a self-inverse swap). Everything downstream is
//! built on two conventions, fixed here once and used unchanged throughout:
//!
//! * **Positions and strands are 1-based.** A word on `m` strands may use
//!   indices `1..=m-1`.
//! * **Letters compose left to right.** The letter at reading position `i`
//!   acts on whatever strands currently occupy positions `i`, `i+1`; the
//!   permutation of a word maps start position to end position, and the
//!   free-group action of a word is accumulated by substituting each
//!   successive letter's action into the images built so far.
//!
//! Word values are immutable; every operation returns a fresh word.

#![forbid(unsafe_code)]

mod artin;
mod elements;
mod error;
mod lemmas;
mod links;
mod perm;
mod random;
mod reduce;
mod rewrite;
mod word;

pub use artin::{artin_image, endo_equal, kill_last_strand, FreeGroupEndo, FreeLetter, FreeWord};
pub use elements::{build_a, build_b, AForm};
pub use error::Error;
pub use lemmas::{
    check_central, check_central_base, check_kernel_commute, check_tau_slide, derive_m_moves,
    run_suite, ChainStep, DeriveOutcome, LemmaInstance, LemmaReport, StepMethod, SuiteReport,
};
pub use links::{
    closure_components, linking_matrix, pair_linking, relabel_minimal, strand_deleted,
    strand_pair_crossings, ComponentAssignment, LinkingMatrix,
};
pub use perm::Permutation;
pub use random::{
    random_classical_word, random_move, random_one_component_word, random_walk, random_word,
    sweep, MovePalette, SweepReport,
};
pub use reduce::{
    bring_strand_last, canonical_form, check_certificate, comb_last_strand, fused_equivalent,
    reduce_step, reduce_to_pure, CanonicalForm, CertReport, CertStep, Certificate,
    LastStrandDecomposition, StepKind, StepVerdict,
};
pub use rewrite::{
    applicable_moves, apply_move, bfs_equivalent, invert_application, reduce_with_moves, replay,
    Budget, Dir, Level, MoveApplication, MoveKind, MoveParams, RewriteTrace,
};
pub use word::{parse_word, BraidWord, Generator, Sign};
