use serde::{Deserialize, Serialize};

/// Outcome of one verified identity or inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub pass: bool,
    pub context: String,
}

impl CheckReport {
    /// `lhs <= rhs` up to `rel_tol * |rhs| + abs_tol`.
    pub fn inequality(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        rel_tol: f64,
        abs_tol: f64,
        context: impl Into<String>,
    ) -> Self {
        let tol = rel_tol * rhs.abs() + abs_tol;
        let pass = lhs.is_finite() && rhs.is_finite() && lhs <= rhs + tol;
        Self {
            name: name.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            pass,
            context: context.into(),
        }
    }

    /// Residual check: `lhs = |residual|`, `rhs = allowed`.
    pub fn identity(name: impl Into<String>, residual: f64, allowed: f64, context: impl Into<String>) -> Self {
        Self::inequality(name, residual.abs(), allowed, 0.0, 0.0, context)
    }

    /// Equality of two values up to a relative tolerance. `lhs` is the
    /// relative discrepancy and `rhs` the tolerance.
    pub fn equality(name: impl Into<String>, a: f64, b: f64, rel_tol: f64, context: impl Into<String>) -> Self {
        let scale = a.abs().max(b.abs());
        let rel = if scale == 0.0 { 0.0 } else { (a - b).abs() / scale };
        let mut r = Self::inequality(name, rel, rel_tol, 0.0, 0.0, context);
        r.context = format!("{} [a = {a:e}, b = {b:e}]", r.context);
        r
    }

    /// Margin relative to the right side, for summaries.
    pub fn relative_margin(&self) -> f64 {
        let scale = self.rhs.abs().max(self.lhs.abs());
        if scale == 0.0 {
            0.0
        } else {
            self.margin / scale
        }
    }
}

pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_tracks_tolerance() {
        assert!(CheckReport::inequality("a", 1.0, 1.0, 0.0, 0.0, "").pass);
        assert!(!CheckReport::inequality("a", 1.0 + 1e-8, 1.0, 1e-9, 0.0, "").pass);
        assert!(CheckReport::inequality("a", 1.0 + 1e-10, 1.0, 1e-9, 0.0, "").pass);
        assert!(!CheckReport::inequality("a", f64::NAN, 1.0, 1e-9, 0.0, "").pass);
        let r = CheckReport::identity("r", -2e-10, 1e-9, "");
        assert!(r.pass && r.lhs == 2e-10);
        assert!(CheckReport::equality("e", 0.0, 0.0, 1e-12, "").pass);
    }
}
