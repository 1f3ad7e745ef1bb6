use thiserror::Error;

use crate::sf2sf::MappingViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid mapping: {}", format_violations(.0))]
    InvalidMapping(Vec<MappingViolation>),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("singular fit: {0}")]
    SingularFit(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("unknown MCS index {mcs} for {rat}")]
    UnknownMcs { mcs: u32, rat: String },

    #[error("empty candidate set")]
    EmptyCandidates,
}

fn format_violations(v: &[MappingViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
