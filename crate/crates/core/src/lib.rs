//! Local invariants of almost complex structures.

pub mod exact;
pub mod expr;
pub mod clinalg;
pub mod acstruct;
pub mod nijenhuis;
pub mod symbol;
pub mod dim4;
pub mod g2lab;
pub mod obstruct;
pub mod models;
pub mod nofor;
