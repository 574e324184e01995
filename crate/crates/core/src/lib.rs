pub mod cli;
pub mod eval;
pub mod games;
pub mod gen;
pub mod lower;
pub mod normalize;
pub mod ordinal;
pub mod selftest;
pub mod tagged;
pub mod term;
