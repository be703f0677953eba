use nilflux_core::error::Error;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    /// Bad input or a violated precondition: exit status 2.
    Usage,
    /// A library invariant failed: exit status 3.
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub severity: Severity,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { severity: Severity::Usage, kind: "usage".into(), message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self { severity: Severity::Internal, kind: "internal".into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.severity {
            Severity::Usage => 2,
            Severity::Internal => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind, "message": self.message } })
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::BasisMismatch(_) => "basis-mismatch",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::SingularMap => "singular-map",
            Error::DegenerateFrame(_) => "degenerate-frame",
            Error::NotAffine(_) => "not-affine",
            Error::NotNilpotent => "not-nilpotent",
            Error::NotInvariant(_) => "not-invariant",
            Error::NotHomogeneous(_) => "not-homogeneous",
            Error::NotClosed => "not-closed",
            Error::BadDimension(_) => "bad-dimension",
            Error::BadIsotopy(_) => "bad-isotopy",
            Error::DiagramViolation(_) => "diagram-violation",
            Error::DomainError(_) => "domain-error",
            Error::Precondition(_) => "precondition",
            Error::InvalidModel(_) => "invalid-model",
            Error::Torsion(_) => "torsion",
            Error::Parse(_) => "parse",
            Error::Internal(_) => "internal",
        };
        let severity = if matches!(e, Error::Internal(_)) { Severity::Internal } else { Severity::Usage };
        Self { severity, kind: kind.into(), message: e.to_string() }
    }
}
