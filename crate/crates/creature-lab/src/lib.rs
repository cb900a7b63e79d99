//! An exact-arithmetic workbench for measured tree creatures at desk scale.
//!
//! The library builds finite candidates (uniform-height trees carrying a
//! creature per internal node), evaluates min-of-linear averaging
//! functions, runs the backward-induction measure recursion, decides the
//! niceness axioms, and implements the constructive search cores of the
//! framework: splitting, greedy stabilization, specialization,
//! amalgamation, averaging transfer, pigeonhole stabilization of candidate
//! sequences, and the template combinatorics above single candidates. Two
//! families are provided: the binary family with arithmetic-mean averaging
//! (which doubles as an independent counting oracle) and the star family
//! of constrained bit-word letters.
//!
//! Everything is exact rational arithmetic; there is no floating point
//! anywhere. All types are immutable values and all operations are pure
//! functions, safe to call concurrently. Brute-force enumerations take
//! size guards and fail loudly instead of running unbounded.
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `creature-lab` binary for the JSON-driven command line.

pub mod amalgam;
pub mod axioms;
pub mod candidate;
pub mod creature;
pub mod error;
pub mod family;
pub mod fuzz;
pub mod gen;
pub mod guard;
pub mod json;
pub mod measure;
pub mod node;
pub mod random_family;
pub mod rational;
pub mod report;
pub mod run;
pub mod search;
pub mod split;
pub mod star;
pub mod templates;

pub use amalgam::{amalgamate, AmalgamCase, AmalgamReport, Part, Schedule};
pub use candidate::{end_extends, validate_candidate, FiniteCandidate, ValidationReport};
pub use creature::{Creature, FamilyKind, FunctionalSet, Payload, Valuation};
pub use error::{Error, Result};
pub use family::MeasuredFamily;
pub use guard::Guards;
pub use measure::{
    check_semi_measure, classify_candidate, find_large_node, front_value, mval, MeasureMap,
    SemiMeasureVerdict,
};
pub use node::{Letter, Node, PartialBits};
pub use random_family::{creature_r, dyadic_oracle, sigma_r, RandomFamily};
pub use rational::Rational;
pub use search::{specialize_search, stabilized_merge, MergeOutcome, SpecializeOutcome};
pub use split::{beta_split, SplitReport, SplitWitness};
pub use star::{paper_profile, simple_toy_profile, toy_profile, StarFamily, StarProfile};
pub use templates::{
    build_pretemplate, canonical_form, covering_map, isomorphic, properly_extends,
    restrict_template, validate_named_prefix, NamedPrefix, PreTemplate, ZFlag,
};
