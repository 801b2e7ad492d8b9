//! Exact Wedderburn decomposition of rational group algebras of finite groups via Shoda pairs.

pub mod arith;
pub mod cli;
pub mod cyclo;
pub mod decompose;
pub mod error;
pub mod galg;
pub mod group_spec;
pub mod grp;
pub mod linalg;
pub mod report;
pub mod schur;
pub mod shoda;
pub mod simple;

pub use error::{Error, Result};
