//! Reconstruction of phylomemies (inheritance networks of elements of
//! knowledge) from timestamped text corpora, and their projection into a
//! pre-spatialized export consumed by the seabed/kinship viewer.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`corpus`]: parse documents and a root-term list, index terms, cut time
//!    into periods and count per-period co-occurrences.
//! 2. [`fields`]: build per-period confidence graphs and detect groups of
//!    terms (maximal cliques or maximal frequent itemsets).
//! 3. [`matching`]: link groups across periods with Jaccard similarity over
//!    single and paired candidates.
//! 4. [`sea_level`]: raise the similarity threshold locally inside branches,
//!    splitting them while the λ-weighted quality improves.
//! 5. [`projection`]: extract, filter, label and lay out the branches and
//!    write the canonical JSON export.
//!
//! [`pipeline`] wires the stages together from a [`BuildConfig`].

pub mod config;
pub mod corpus;
pub mod error;
pub mod fields;
pub mod ids;
pub mod inspect;
pub mod matching;
pub mod pipeline;
pub mod projection;
pub mod sea_level;
pub mod synthetic;
pub mod terms;

pub use corpus::{DocumentSet, PeriodSet, RootList};
pub use error::{Error, Result};
pub use fields::Group;
pub use ids::{BranchId, GroupId, PeriodId, TermId};
pub use matching::{KinshipGraph, KinshipLink};
pub use projection::PhyloExport;
pub use sea_level::{Phylomemy, SplitTree};
pub use terms::TermSet;
