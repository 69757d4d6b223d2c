//! Finite categories, finite simplicial sets, weak factorization systems and
//! Bousfield-Kan homotopy (co)limits, all decided by exhaustive search at desk
//! scale.
//!
//! Everything is deterministic: objects carry string ids ordered
//! lexicographically, searches enumerate candidates in a fixed order, and
//! randomized corpora are driven by explicit seeds.

pub mod coprod;
pub mod corpus;
pub mod fincat;
pub mod holim;
pub mod report;
pub mod sobj;
pub mod sset;
pub mod wfs;
