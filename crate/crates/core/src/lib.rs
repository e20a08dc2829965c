//! Decides whether a configuration of 2g + 2 points on the projective line
//! over a discretely valued field is *good*: whether the order-p elements
//! fixing its pairs generate a p-Whittaker group whose index-p subgroup is
//! Schottky. The decision runs the folding algorithm on exact data and
//! produces an optimal configuration together with the full folding trace.
//!
//! Layout:
//! - [`valfield`]: Q(ζ_p) with an ℓ-adic valuation, exact rationals only.
//! - [`projline`]: points of P¹, Möbius maps, order-p generators.
//! - [`clusters`]: cluster data and the pairing test.
//! - [`hull`]: discs, the tree metric, the reduced convex hull.
//! - [`folding`]: the folding algorithm and its trace.
//! - [`oracle`]: brute-force checks over words in the group.
//! - [`problem`]: JSON problems and reports.

pub mod clusters;
mod error;
pub mod folding;
pub mod hull;
pub mod oracle;
pub mod problem;
pub mod projline;
pub mod valfield;

pub use clusters::{
    cluster_data, pair_up, repetition_report, Cluster, Configuration, PairedConfiguration,
    PairingFailure,
};
pub use error::{Error, Result};
pub use folding::{run_algorithm, FoldingStep, NotGoodReason, Verdict};
pub use hull::{Disc, SkeletonTree};
pub use projline::{classify, order_p_fixing, ElementClass, Mobius, PPoint};
pub use valfield::{FieldCtx, FieldElem, FieldKind, ValRat};
