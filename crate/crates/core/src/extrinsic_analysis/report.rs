use serde::Serialize;

/// Outcome of a verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    /// The suite's hypotheses do not hold for this input; nothing was
    /// asserted.
    #[serde(rename = "REJECTED-HYPOTHESIS")]
    RejectedHypothesis,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::RejectedHypothesis => "REJECTED-HYPOTHESIS",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One inequality `lhs >= rhs` (or an equality, when `equality` is set).
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub t: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// Nonnegative when the check holds; for equalities, `-|lhs - rhs|`
    /// normalized like the inequalities.
    pub margin: f64,
    pub tolerance: f64,
    pub equality: bool,
    pub pass: bool,
}

/// Normalization shared by all checks: `(lhs - rhs) / max(1, |lhs|, |rhs|)`.
pub fn normalized(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs) / lhs.abs().max(rhs.abs()).max(1.0)
}

impl CheckRow {
    /// `lhs >= rhs` up to `tolerance` on the normalized margin.
    pub fn at_least(name: impl Into<String>, t: Option<f64>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = normalized(lhs, rhs);
        Self { name: name.into(), t, lhs, rhs, margin, tolerance, equality: false, pass: margin >= -tolerance }
    }

    /// `lhs <= rhs` up to `tolerance`.
    pub fn at_most(name: impl Into<String>, t: Option<f64>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let mut row = Self::at_least(name, t, rhs, lhs, tolerance);
        std::mem::swap(&mut row.lhs, &mut row.rhs);
        row
    }

    /// `|lhs - rhs| <= tolerance` on the normalized difference.
    pub fn equal(name: impl Into<String>, t: Option<f64>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = -normalized(lhs, rhs).abs();
        Self { name: name.into(), t, lhs, rhs, margin, tolerance, equality: true, pass: margin >= -tolerance }
    }

    /// Absolute comparison `lhs >= rhs - tolerance`, for quantities near 0.
    pub fn at_least_abs(name: impl Into<String>, t: Option<f64>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = lhs - rhs;
        Self { name: name.into(), t, lhs, rhs, margin, tolerance, equality: false, pass: margin >= -tolerance }
    }

    pub fn equal_abs(name: impl Into<String>, t: Option<f64>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = -(lhs - rhs).abs();
        Self { name: name.into(), t, lhs, rhs, margin, tolerance, equality: true, pass: margin >= -tolerance }
    }
}

/// What a report was computed on.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportMeta {
    pub surface: String,
    pub grid: String,
    pub b: f64,
    pub h: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub status: Status,
    pub pass: bool,
    pub checks: Vec<CheckRow>,
    pub notes: Vec<String>,
    pub meta: ReportMeta,
}

impl VerificationReport {
    /// PASS or FAIL from the rows; an empty row list passes vacuously.
    pub fn from_checks(suite: impl Into<String>, checks: Vec<CheckRow>, notes: Vec<String>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            suite: suite.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            pass,
            checks,
            notes,
            meta: ReportMeta::default(),
        }
    }

    pub fn rejected(suite: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::with_status(suite, Status::RejectedHypothesis, reason)
    }

    pub fn inconclusive(suite: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::with_status(suite, Status::Inconclusive, reason)
    }

    fn with_status(suite: impl Into<String>, status: Status, reason: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            status,
            pass: false,
            checks: vec![],
            notes: vec![reason.into()],
            meta: ReportMeta::default(),
        }
    }

    pub fn with_meta(mut self, meta: ReportMeta) -> Self {
        self.meta = meta;
        self
    }

    /// Smallest margin over all rows.
    pub fn worst_margin(&self) -> Option<f64> {
        self.checks.iter().map(|c| c.margin).min_by(f64::total_cmp)
    }

    pub fn row(&self, name: &str) -> Option<&CheckRow> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn rows<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a CheckRow> + 'a {
        self.checks.iter().filter(move |c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_margins_within_tolerance() {
        let rows = vec![
            CheckRow::at_least("a", None, 1.0, 1.0 + 1e-4, 1e-3),
            CheckRow::at_most("b", None, 2.0, 1.0, 1e-3),
        ];
        assert!(rows[0].pass && !rows[1].pass);
        assert_eq!(rows[1].lhs, 2.0);
        let r = VerificationReport::from_checks("s", rows, vec![]);
        assert_eq!(r.status, Status::Fail);
        assert!(r.checks.iter().all(|c| c.pass == (c.margin >= -c.tolerance)));
        assert!(VerificationReport::from_checks("e", vec![], vec![]).pass);
        assert!(CheckRow::equal("c", None, -1.0, -1.0005, 1e-3).pass);
        assert_eq!(serde_json::to_string(&Status::RejectedHypothesis).unwrap(), "\"REJECTED-HYPOTHESIS\"");
    }
}
