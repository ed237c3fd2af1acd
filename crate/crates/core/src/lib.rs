//! Magnitude, magnitude homology and metric fibrations of categories
//! enriched over filtered sets, in exact arithmetic.

pub mod arrangement;
pub mod checks;
pub mod commands;
pub mod corpus;
pub mod fcat;
pub mod fibration;
pub mod formats;
pub mod linalg;
pub mod maghom;
pub mod magnitude;
pub mod novikov;
pub mod specseq;
