//! Per-level results and their JSON form.
//!
//! In JSON every computed number is a decimal string (12 significant digits
//! for floats, `p/q` for exact rationals) so output is byte-stable.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::MomentVector;
use crate::poly::Monomial;
use crate::scalar::{Rational, Scalar};
use crate::solvers::{LpStatus, SdpStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::NumericalFailure => "numerical-failure",
        }
    }
}

impl From<LpStatus> for Status {
    fn from(s: LpStatus) -> Self {
        match s {
            LpStatus::Optimal => Status::Optimal,
            LpStatus::Infeasible => Status::Infeasible,
            LpStatus::Unbounded => Status::Unbounded,
            LpStatus::NumericalFailure => Status::NumericalFailure,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HierarchyKind {
    Lp,
    Sdp,
}

impl HierarchyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            HierarchyKind::Lp => "lp",
            HierarchyKind::Sdp => "sdp",
        }
    }
}

/// Multipliers of the moment rows (`ybar`) and of the mass row (`t >= 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct Duals {
    pub ybar: Vec<f64>,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub hierarchy: HierarchyKind,
    pub level: u32,
    pub status: Status,
    /// Lower bound on the optimal value; present when optimal.
    pub bound: Option<f64>,
    /// Same bound when the LP was solved in exact arithmetic.
    pub exact_bound: Option<Rational>,
    pub moments: Option<MomentVector<f64>>,
    pub duals: Option<Duals>,
    pub residuals: Residuals,
    /// Rate bound on `val - bound`, valid if the duals are optimal for the
    /// untruncated problem.
    pub apriori_bound: Option<f64>,
    /// Application specific fields (interpreted bounds, oracle values).
    pub extras: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

impl LevelReport {
    pub fn new(hierarchy: HierarchyKind, level: u32, status: Status) -> Self {
        LevelReport {
            hierarchy,
            level,
            status,
            bound: None,
            exact_bound: None,
            moments: None,
            duals: None,
            residuals: Residuals::default(),
            apriori_bound: None,
            extras: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn set_extra(&mut self, key: &str, value: impl Into<String>) {
        self.extras.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> ReportJson {
        ReportJson {
            hierarchy: self.hierarchy.as_str().to_string(),
            level: self.level,
            status: self.status.as_str().to_string(),
            bound: self.bound.map(num),
            exact_bound: self.exact_bound.as_ref().map(|q| q.to_decimal_string()),
            moments: self.moments.as_ref().map(|mv| {
                mv.values
                    .iter()
                    .map(|(m, v)| MomentJson {
                        exp: m.exponents().to_vec(),
                        value: num(*v),
                    })
                    .collect()
            }),
            duals: self.duals.as_ref().map(|d| DualsJson {
                ybar: d.ybar.iter().map(|v| num(*v)).collect(),
                t: num(d.t),
            }),
            residuals: ResidualsJson {
                primal: num(self.residuals.primal),
                dual: num(self.residuals.dual),
                gap: num(self.residuals.gap),
            },
            apriori_bound: self.apriori_bound.map(num),
            extras: self.extras.clone(),
            notes: self.notes.clone(),
        }
    }

    /// Human readable block; `wall_time` (seconds) is appended when given.
    pub fn to_text(&self, wall_time: Option<f64>) -> String {
        let mut s = String::new();
        let _ = write!(s, "[{} r={}] status={}", self.hierarchy.as_str(), self.level, self.status.as_str());
        if let Some(b) = self.bound {
            let _ = write!(s, " bound={}", num(b));
        }
        if let Some(q) = &self.exact_bound {
            let _ = write!(s, " exact={}", q.to_decimal_string());
        }
        s.push('\n');
        let _ = writeln!(
            s,
            "  residuals: primal={} dual={} gap={}",
            num(self.residuals.primal),
            num(self.residuals.dual),
            num(self.residuals.gap)
        );
        if let Some(d) = &self.duals {
            let ybar: Vec<String> = d.ybar.iter().map(|v| num(*v)).collect();
            let _ = writeln!(s, "  duals: ybar=[{}] t={}", ybar.join(", "), num(d.t));
        }
        if let Some(a) = self.apriori_bound {
            let _ = writeln!(s, "  a-priori error bound: {} (conditional on dual optimality)", num(a));
        }
        for (k, v) in &self.extras {
            let _ = writeln!(s, "  {k}: {v}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        if let Some(t) = wall_time {
            let _ = writeln!(s, "  wall time: {t:.3}s");
        }
        s
    }
}

/// Decimal string with 12 significant digits.
pub fn num(v: f64) -> String {
    v.to_decimal_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentJson {
    pub exp: Vec<u32>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualsJson {
    pub ybar: Vec<String>,
    pub t: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualsJson {
    pub primal: String,
    pub dual: String,
    pub gap: String,
}

/// Serialized [`LevelReport`]; parsing and re-serializing is lossless.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportJson {
    pub hierarchy: String,
    pub level: u32,
    pub status: String,
    pub bound: Option<String>,
    pub exact_bound: Option<String>,
    pub moments: Option<Vec<MomentJson>>,
    pub duals: Option<DualsJson>,
    pub residuals: ResidualsJson,
    pub apriori_bound: Option<String>,
    pub extras: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

impl ReportJson {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Moment vector in `f64` from any scalar.
pub fn moments_to_f64<T: Scalar>(mv: &MomentVector<T>) -> MomentVector<f64> {
    MomentVector {
        level: mv.level,
        n: mv.n,
        values: mv
            .values
            .iter()
            .map(|(m, v)| (m.clone(), v.to_f64()))
            .collect::<BTreeMap<Monomial, f64>>(),
    }
}

/// Worst-case status across levels, ordered as the CLI exit codes.
pub fn worst_status<'a>(reports: impl IntoIterator<Item = &'a LevelReport>) -> Status {
    let rank = |s: Status| match s {
        Status::Optimal => 0,
        Status::Infeasible => 1,
        Status::Unbounded | Status::NumericalFailure => 2,
    };
    reports
        .into_iter()
        .map(|r| r.status)
        .max_by_key(|s| rank(*s))
        .unwrap_or(Status::Optimal)
}

impl From<SdpStatus> for Status {
    fn from(s: SdpStatus) -> Self {
        match s {
            SdpStatus::Optimal => Status::Optimal,
            SdpStatus::Infeasible => Status::Infeasible,
            SdpStatus::Unbounded => Status::Unbounded,
            SdpStatus::NumericalFailure | SdpStatus::MaxIterations => Status::NumericalFailure,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_byte_identical() {
        let mut r = LevelReport::new(HierarchyKind::Lp, 3, Status::Optimal);
        r.bound = Some(1.0 / 3.0);
        r.duals = Some(Duals {
            ybar: vec![0.5],
            t: 0.0,
        });
        r.set_extra("alpha_upper_bound", "2.5");
        r.notes.push("test".into());
        let line = r.to_json().to_line();
        let parsed: ReportJson = serde_json::from_str(&line).unwrap();
        assert_eq!(parsed.to_line(), line);
        assert!(line.contains("\"bound\":\"0.333333333333\""));
    }
}
