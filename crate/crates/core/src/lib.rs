//! Exact computations around the Novikov fundamental group of a circle-valued
//! class: truncated Laurent series, finite groups from presentations, the
//! level-indexed free product with its truncation maps, generation and
//! relation bounds up to deck transformations and completion, and Novikov
//! homology of connected sums.

pub mod cli;
pub mod dtc;
pub mod fpgroup;
pub mod freeprod;
pub mod laurent;
pub mod novhom;
pub mod report;
