//! Finite infinitesimal models of algebraic theories.
//!
//! Clones truncated at a global arity bound, i-structures (families of
//! neighbourhood relations closed under precomposition), i-algebras with
//! partial actions defined on neighbour tuples, and the constructive limits
//! and colimits of i-algebras, each paired with a brute-force oracle.

pub mod atlas;
pub mod budget;
pub mod clone;
pub mod colimits;
pub mod corpus;
pub mod error;
pub mod gallery;
pub mod ialgebra;
pub mod io;
pub mod istructure;
pub mod limits;
pub mod oracle;
pub mod report;
pub mod ring;
pub mod theory;
pub mod tuples;
pub mod unionfind;
pub mod universal;

pub use atlas::{glue_atlas, Atlas, Chart};
pub use budget::{SearchBudget, DEFAULT_N_MAX};
pub use clone::{
    clone_hom_check, free_clone, theory_of_clone, validate_clone, AbstractClone, CloneHom, OpId,
    SaturationReport,
};
pub use colimits::{
    coequalizer_congruence, coequalizer_reflecting, coproduct, initial_morphism, initial_object,
    wide_pushout, CoconeResult,
};
pub use error::{Error, Result};
pub use gallery::FixtureReport;
pub use ialgebra::{
    constants_algebra, hom_flags, is_ihom, total_algebra, validate_ialgebra, HomFlags, IAlgebra,
    IHom,
};
pub use istructure::{
    image_closed, image_istructure, is_i_morphism, reflects_istructure, IStructure, Tuple,
};
pub use limits::{
    compatible_closure, congruence_from_partition, equalizer, generated_partition, is_kernel_pair,
    is_regular_epi, joint_reflection_failure, kernel_pair, product, pullback, Congruence, Pullback,
};
pub use report::{Axiom, ValidationReport, Violation};
pub use ring::FiniteRing;
pub use theory::{
    enumerate_terms, parse_presentation, parse_presentation_with, parse_term, term_substitute,
    Equation, Presentation, Signature, Symbol, Term,
};
pub use universal::{verify_universal_property, Diagram, TestTarget, UniversalReport};
