use thiserror::Error;

/// Errors raised by grid construction, assembly, solving and the experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("assembly error at node ({i}, {j}): offset ({di}, {dj}) leaves the ghost layer")]
    StencilOutOfRange {
        i: isize,
        j: isize,
        di: i32,
        dj: i32,
    },

    #[error("solver error: zero diagonal at row {row}")]
    ZeroDiagonal { row: usize },

    #[error("dense oracle error: {0}")]
    Oracle(String),

    #[error(
        "degenerate symbol: implicit part vanishes at C={c}, D={d}, theta=({theta1}, {theta2})"
    )]
    DegenerateSymbol {
        c: f64,
        d: f64,
        theta1: f64,
        theta2: f64,
    },

    #[error("non-finite value in field at step {step} (node {node}){}", snapshot.as_ref().map(|p| format!("; snapshot written to {p}")).unwrap_or_default())]
    NonFinite {
        step: usize,
        node: usize,
        snapshot: Option<String>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
