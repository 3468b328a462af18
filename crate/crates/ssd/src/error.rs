use thiserror::Error;

use crate::search::SearchOutcome;

pub type Result<T> = std::result::Result<T, SsdError>;

#[derive(Debug, Clone, Error)]
pub enum SsdError {
    #[error("CollinearInput: no three non-collinear points")]
    CollinearInput,
    #[error("NotCoplanar: max plane deviation {deviation:e}")]
    NotCoplanar { deviation: f64 },
    #[error("NotConcyclic: max circle deviation {deviation:e}")]
    NotConcyclic { deviation: f64 },
    #[error("InvalidRadius: r = {0} is outside (0, 1)")]
    InvalidRadius(f64),
    #[error("NonUnitVertex: |v| = {0}")]
    NonUnitVertex(f64),
    #[error("DegenerateDiscriminant: 1 + <a,b> - 2r^2 = {value:e}{}", at.as_ref().map(|s| format!(" at {s}")).unwrap_or_default())]
    DegenerateDiscriminant { value: f64, at: Option<String> },
    #[error("AntipodalInput: a and b are (anti)parallel")]
    AntipodalInput,
    #[error("DegenerateInput: {0}")]
    DegenerateInput(String),
    #[error("NoSigmaCandidate: vertex {vertex} has no face orthogonal to it")]
    NoSigmaCandidate { vertex: usize },
    #[error("NonConvex: {0}")]
    NonConvex(String),
    #[error("NoClosure: {0}")]
    NoClosure(String),
    #[error("InvalidParams: {0}")]
    InvalidParams(String),
    #[error("OpenChain: {0}")]
    OpenChain(String),
    #[error("Overflow: more than {0} vertices")]
    Overflow(usize),
    #[error("VerificationFailed: {0}")]
    VerificationFailed(String),
    #[error("NoConvergence: best error {:e} after {} steps", .0.error, .0.steps)]
    NoConvergence(Box<SearchOutcome>),
    #[error("InvalidN: {0}")]
    InvalidN(usize),
}

impl SsdError {
    /// Short machine-readable class name.
    pub fn class(&self) -> &'static str {
        match self {
            SsdError::CollinearInput => "CollinearInput",
            SsdError::NotCoplanar { .. } => "NotCoplanar",
            SsdError::NotConcyclic { .. } => "NotConcyclic",
            SsdError::InvalidRadius(_) => "InvalidRadius",
            SsdError::NonUnitVertex(_) => "NonUnitVertex",
            SsdError::DegenerateDiscriminant { .. } => "DegenerateDiscriminant",
            SsdError::AntipodalInput => "AntipodalInput",
            SsdError::DegenerateInput(_) => "DegenerateInput",
            SsdError::NoSigmaCandidate { .. } => "NoSigmaCandidate",
            SsdError::NonConvex(_) => "NonConvex",
            SsdError::NoClosure(_) => "NoClosure",
            SsdError::InvalidParams(_) => "InvalidParams",
            SsdError::OpenChain(_) => "OpenChain",
            SsdError::Overflow(_) => "Overflow",
            SsdError::VerificationFailed(_) => "VerificationFailed",
            SsdError::NoConvergence(_) => "NoConvergence",
            SsdError::InvalidN(_) => "InvalidN",
        }
    }

    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            SsdError::NoConvergence(_)
                | SsdError::DegenerateDiscriminant { .. }
                | SsdError::NoClosure(_)
        )
    }
}
