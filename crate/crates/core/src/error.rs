use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A population-derived threshold was requested over zero scores.
    #[error("empty population: threshold requires at least one score")]
    EmptyPopulation,

    /// A diversion policy left fewer than two families in the academic pool.
    #[error("degenerate pool: {retained} families retained, need at least 2")]
    DegeneratePool { retained: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
