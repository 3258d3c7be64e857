//! Machine-readable audit records.

use serde::Serialize;

/// One geometric or numerical audit: `{"check", "residual", "grid", "pass"}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditRecord {
    pub check: String,
    pub residual: f64,
    /// Grid spacing the residual was computed at, if any.
    pub grid: Option<f64>,
    pub pass: bool,
}

impl AuditRecord {
    /// Passes iff `residual <= tol`.
    pub fn within(check: impl Into<String>, residual: f64, grid: Option<f64>, tol: f64) -> Self {
        Self {
            check: check.into(),
            residual,
            grid,
            pass: residual <= tol,
        }
    }
}

pub fn all_pass(records: &[AuditRecord]) -> bool {
    records.iter().all(|r| r.pass)
}

pub fn failed(records: &[AuditRecord]) -> Vec<&str> {
    records.iter().filter(|r| !r.pass).map(|r| r.check.as_str()).collect()
}
