//! Finite-horizon laboratory for recurrence in linear dynamics.
//!
//! The crate computes return sets `N(x, U) = {n ≥ 0 : Tⁿx ∈ U}` for a zoo of
//! explicitly representable operators and grades them along the recurrence
//! hierarchy
//!
//! ```text
//! periodic ⊂ IP*-recurrent ⊂ uniformly ⊂ frequently ⊂ upper frequently
//!          ⊂ reiteratively ⊂ recurrent
//! ```
//!
//! Every statement about an infinite set is replaced by evidence gathered on
//! a finite observation window `[0, H]`; the evidence (density curves, gap
//! certificates, arithmetic certificates, exact periods) ships with every
//! verdict.
//!
//! Layout:
//!
//! - [`families`]: subsets of ℕ₀, densities, syndeticity, IP sets, cut-shift-paste.
//! - [`operators`]: operator zoo, state vectors, seminorms, matrix eigen-structure.
//! - [`orbit`]: orbit iteration, return sets, growth and boundedness probes.
//! - [`classify`]: return-set records to recurrence labels.
//! - [`verify`]: theorem checks combining the above.
//! - [`cli`]: config-driven experiment runner behind the `reclab` binary.
//!
//! The `examples/` directory of this crate has one runnable program per
//! capability; start with `cargo run --example block_cycle`.

pub mod classify;
pub mod cli;
pub mod families;
pub mod operators;
pub mod orbit;
pub mod scalar;
pub mod verify;

pub use classify::{classify, RecurrenceLabel, RecurrenceVerdict, Thresholds};
pub use families::{DensityReport, IndexWindow};
pub use operators::{OperatorSpec, SpaceDescriptor, StateVector};
pub use orbit::{return_set, ReturnSetRecord};
pub use scalar::Scalar;
pub use verify::{CheckOutcome, CheckStatus};
