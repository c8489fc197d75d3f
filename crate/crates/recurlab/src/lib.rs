//! Exact-arithmetic toolkit for multiplicative recurrence questions on the
//! positive rationals: factored rationals, parametrized rational families and
//! their recurrence verdicts, obstruction colorings and finite multiplicative
//! systems, polynomial/semigroup criteria, matrix-embedded star semigroups,
//! multiplicative Følner densities, and finite-field square-avoidance
//! constructions.
//!
//! Everything verdict-shaped is computed exactly (integer / rational
//! arithmetic); floating point appears only in explicitly numeric quantities
//! such as circle-metric gaps, densities, and character averages.

pub mod arith;
pub mod cli;
pub mod colorings;
pub mod density;
pub mod descriptor;
pub mod ffield;
pub mod multfunc;
pub mod paramult;
pub mod poly;
pub mod qplus;
pub mod recsets;
pub mod semigroups;
