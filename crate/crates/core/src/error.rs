use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("order bound exceeded: more than {0} elements")]
    OrderBoundExceeded(usize),
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("action is not an automorphism: fails on pair ({0}, {1})")]
    NotAutomorphism(usize, usize),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("group of order {order} exceeds the subgroup enumeration bound {bound}; supply explicit (H,K) pairs instead")]
    SubgroupBound { order: usize, bound: usize },
    #[error("galois exponent {k} is not a unit modulo {n}")]
    NotUnit { k: i64, n: u64 },
    #[error("element does not lie in the field {0}")]
    NotInField(String),
    #[error("character not irreducible or values inconsistent")]
    NotIrreducible,
    #[error("not a Shoda pair: {0}")]
    NotShoda(String),
    #[error("no strong inductive chain found for ({0})")]
    NoChain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
