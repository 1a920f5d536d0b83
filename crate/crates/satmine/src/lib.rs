//! SAT-based frequent itemset mining.
//!
//! The crate mines frequent (or maximal frequent) itemsets by encoding the
//! mining problem as clauses plus linear pseudo-Boolean constraints and
//! enumerating models of an embedded incremental solver.
//!
//! The pipeline is split into:
//!
//! * [`dataset`]: transaction databases, file formats and a seedable
//!   synthetic generator,
//! * [`pbsat`]: the incremental CDCL solver with native pseudo-Boolean
//!   propagation,
//! * [`encoder`]: translation of a database and support threshold into
//!   solver constraints, plus DIMACS/OPB export,
//! * [`enumeration`]: blocking-clause construction between models,
//! * [`search`]: the mining drivers (simple, LSM, CMG, LD, dual),
//! * [`oracle`]: brute-force reference mining used for verification.

pub mod dataset;
pub mod encoder;
pub mod enumeration;
pub mod oracle;
pub mod pbsat;
pub mod search;
