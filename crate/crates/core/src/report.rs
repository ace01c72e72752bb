//! Per-sample outcomes and their deterministic fold into a report.
//!
//! A verifier is a [`Probe`]: a pure function from sample index to
//! [`Outcome`]. Tallies merge associatively and commutatively (min/max with
//! index tie-breaks, integer counts, value lists sorted on finalization), so
//! any chunking or thread schedule yields the same report.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::cartan::{CartanVector, ComplexCartan};
use crate::lie::GroupSpec;
use crate::linalg::{CMat, RMat};
use crate::weyl::OmegaSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Violation,
    Indeterminate,
}

/// Serialized inputs and intermediate values of one sample.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum WitnessValue {
    Scalar(f64),
    Integer(u64),
    Vector(Vec<f64>),
    Complex(Vec<[f64; 2]>),
    /// Row-major [re, im] pairs.
    Matrix(Vec<Vec<[f64; 2]>>),
    Text(String),
}

impl From<f64> for WitnessValue {
    fn from(v: f64) -> Self {
        Self::Scalar(v)
    }
}

impl From<&CartanVector> for WitnessValue {
    fn from(v: &CartanVector) -> Self {
        Self::Vector(v.coords.clone())
    }
}

impl From<&ComplexCartan> for WitnessValue {
    fn from(v: &ComplexCartan) -> Self {
        Self::Complex(v.coords.iter().map(|z| [z.re, z.im]).collect())
    }
}

impl From<&CMat> for WitnessValue {
    fn from(m: &CMat) -> Self {
        Self::Matrix(
            (0..m.nrows())
                .map(|i| {
                    (0..m.ncols())
                        .map(|j| [m[(i, j)].re, m[(i, j)].im])
                        .collect()
                })
                .collect(),
        )
    }
}

impl From<&RMat> for WitnessValue {
    fn from(m: &RMat) -> Self {
        Self::Matrix(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)], 0.0]).collect())
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Witness {
    pub index: u64,
    pub fields: BTreeMap<String, WitnessValue>,
}

impl Witness {
    pub fn new(index: u64) -> Self {
        Self {
            index,
            fields: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: impl Into<WitnessValue>) -> Self {
        self.fields.insert(name.to_string(), value.into());
        self
    }

    pub fn set(&mut self, name: &str, value: impl Into<WitnessValue>) {
        self.fields.insert(name.to_string(), value.into());
    }
}

/// A monitored quantity. Merging never sums floats, so folds are exact.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    Min(f64),
    Max(f64),
    Count(u64),
    /// All observed values; summarized (min/median/max) in the report.
    Values(Vec<f64>),
}

impl Metric {
    fn merge(&mut self, other: &Metric) {
        match (self, other) {
            (Metric::Min(a), Metric::Min(b)) => *a = a.min(*b),
            (Metric::Max(a), Metric::Max(b)) => *a = a.max(*b),
            (Metric::Count(a), Metric::Count(b)) => *a += b,
            (Metric::Values(a), Metric::Values(b)) => a.extend_from_slice(b),
            _ => panic!("metric kinds differ between samples"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub margin: Option<f64>,
    pub witness: Witness,
    pub metrics: BTreeMap<&'static str, Metric>,
    pub error: Option<String>,
}

impl Outcome {
    pub fn new(status: Status, margin: Option<f64>, witness: Witness) -> Self {
        Self {
            status,
            margin,
            witness,
            metrics: BTreeMap::new(),
            error: None,
        }
    }

    /// Pass/violation decided by `margin < -tol`.
    pub fn from_margin(margin: f64, tol: f64, witness: Witness) -> Self {
        let status = if margin < -tol || margin.is_nan() {
            Status::Violation
        } else {
            Status::Pass
        };
        Self::new(status, Some(margin), witness)
    }

    pub fn indeterminate(witness: Witness, error: impl ToString) -> Self {
        Self {
            error: Some(error.to_string()),
            ..Self::new(Status::Indeterminate, None, witness)
        }
    }

    pub fn metric(mut self, name: &'static str, m: Metric) -> Self {
        match self.metrics.get_mut(name) {
            Some(existing) => existing.merge(&m),
            None => {
                self.metrics.insert(name, m);
            }
        }
        self
    }
}

/// Associative, order-independent accumulation of outcomes.
#[derive(Debug, Clone, Default)]
pub struct Tally {
    pub completed: u64,
    pub indeterminate: u64,
    pub violations: u64,
    /// (margin, sample index, witness) of the smallest margin seen.
    pub worst: Option<(f64, u64, Witness)>,
    pub first_error: Option<(u64, String)>,
    pub metrics: BTreeMap<&'static str, Metric>,
}

impl Tally {
    pub fn push(&mut self, outcome: Outcome) {
        let index = outcome.witness.index;
        match outcome.status {
            Status::Indeterminate => self.indeterminate += 1,
            Status::Violation => {
                self.completed += 1;
                self.violations += 1;
            }
            Status::Pass => self.completed += 1,
        }
        if let Some(e) = outcome.error {
            self.take_error(index, e);
        }
        if let Some(m) = outcome.margin {
            self.take_worst(m, index, outcome.witness);
        }
        self.merge_metrics(&outcome.metrics);
    }

    pub fn merge(&mut self, other: Tally) {
        self.completed += other.completed;
        self.indeterminate += other.indeterminate;
        self.violations += other.violations;
        if let Some((i, e)) = other.first_error {
            self.take_error(i, e);
        }
        if let Some((m, i, w)) = other.worst {
            self.take_worst(m, i, w);
        }
        self.merge_metrics(&other.metrics);
    }

    fn take_error(&mut self, index: u64, e: String) {
        if self.first_error.as_ref().is_none_or(|(i, _)| index < *i) {
            self.first_error = Some((index, e));
        }
    }

    fn take_worst(&mut self, margin: f64, index: u64, witness: Witness) {
        let replace = match &self.worst {
            None => true,
            Some((m, i, _)) => match margin.total_cmp(m) {
                core::cmp::Ordering::Less => true,
                core::cmp::Ordering::Equal => index < *i,
                core::cmp::Ordering::Greater => false,
            },
        };
        if replace {
            self.worst = Some((margin, index, witness));
        }
    }

    fn merge_metrics(&mut self, metrics: &BTreeMap<&'static str, Metric>) {
        for (k, v) in metrics {
            match self.metrics.get_mut(k) {
                Some(existing) => existing.merge(v),
                None => {
                    self.metrics.insert(k, v.clone());
                }
            }
        }
    }
}

/// An aggregate acceptance check evaluated on the finished tally.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Check {
    pub value: f64,
    pub bound: f64,
    /// One of "<", "<=", ">", ">=".
    pub relation: &'static str,
    pub passed: bool,
}

impl Check {
    pub fn new(value: f64, relation: &'static str, bound: f64) -> Self {
        let passed = match relation {
            "<" => value < bound,
            "<=" => value <= bound,
            ">" => value > bound,
            ">=" => value >= bound,
            _ => false,
        };
        Self {
            value,
            bound,
            relation,
            passed,
        }
    }
}

/// Static description of a run, fixed before any sample is drawn.
#[derive(Debug, Clone)]
pub struct ReportHeader {
    pub command: String,
    pub group: GroupSpec,
    pub omega: Option<OmegaSpec>,
    pub seed: u64,
    pub tolerance_set: BTreeMap<String, f64>,
}

impl ReportHeader {
    pub fn new(command: &str, group: GroupSpec, omega: Option<OmegaSpec>, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            group,
            omega,
            seed,
            tolerance_set: BTreeMap::new(),
        }
    }

    pub fn tol(mut self, name: &str, value: f64) -> Self {
        self.tolerance_set.insert(name.to_string(), value);
        self
    }
}

pub trait Probe: Sync {
    fn header(&self) -> ReportHeader;
    fn samples(&self) -> u64;
    fn sample(&self, index: u64) -> Outcome;
    /// Aggregate checks beyond per-sample pass/fail.
    fn checks(&self, _tally: &Tally) -> BTreeMap<String, Check> {
        BTreeMap::new()
    }
}

/// Summary of a [`Metric`] as it appears in a report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum MetricSummary {
    Scalar(f64),
    Count(u64),
    Distribution {
        count: u64,
        min: f64,
        median: f64,
        max: f64,
    },
}

impl MetricSummary {
    pub fn as_f64(&self) -> f64 {
        match self {
            MetricSummary::Scalar(v) => *v,
            MetricSummary::Count(c) => *c as f64,
            MetricSummary::Distribution { median, .. } => *median,
        }
    }
}

pub fn summarize(metric: &Metric) -> MetricSummary {
    match metric {
        Metric::Min(v) | Metric::Max(v) => MetricSummary::Scalar(*v),
        Metric::Count(c) => MetricSummary::Count(*c),
        Metric::Values(v) => {
            let mut s = v.clone();
            s.sort_by(|a, b| a.total_cmp(b));
            if s.is_empty() {
                return MetricSummary::Count(0);
            }
            let mid = s.len() / 2;
            let median = if s.len() % 2 == 1 {
                s[mid]
            } else {
                0.5 * (s[mid - 1] + s[mid])
            };
            MetricSummary::Distribution {
                count: s.len() as u64,
                min: s[0],
                median,
                max: s[s.len() - 1],
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct VerificationReport {
    pub command: String,
    pub group: GroupSpec,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub omega: Option<OmegaSpec>,
    pub seed: u64,
    pub samples_requested: u64,
    pub samples_completed: u64,
    pub samples_indeterminate: u64,
    pub violations: u64,
    pub min_margin: Option<f64>,
    pub worst_witness: Option<Witness>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub first_error: Option<String>,
    pub metrics: BTreeMap<String, MetricSummary>,
    pub checks: BTreeMap<String, Check>,
    pub tolerance_set: BTreeMap<String, f64>,
    /// Per-step sequences for probes that trace a path.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "BTreeMap::is_empty"))]
    pub series: BTreeMap<String, Vec<f64>>,
    pub wall_time_ms: u64,
}

impl VerificationReport {
    pub fn from_tally(
        header: ReportHeader,
        requested: u64,
        tally: Tally,
        checks: BTreeMap<String, Check>,
    ) -> Self {
        let (min_margin, worst_witness) = match tally.worst {
            Some((m, _, w)) => (Some(m), Some(w)),
            None => (None, None),
        };
        Self {
            command: header.command,
            group: header.group,
            omega: header.omega,
            seed: header.seed,
            samples_requested: requested,
            samples_completed: tally.completed,
            samples_indeterminate: tally.indeterminate,
            violations: tally.violations,
            min_margin,
            worst_witness,
            first_error: tally
                .first_error
                .map(|(i, e)| alloc::format!("sample {i}: {e}")),
            metrics: tally
                .metrics
                .iter()
                .map(|(k, v)| (k.to_string(), summarize(v)))
                .collect(),
            checks,
            tolerance_set: header.tolerance_set,
            series: BTreeMap::new(),
            wall_time_ms: 0,
        }
    }

    pub fn checks_passed(&self) -> bool {
        self.checks.values().all(|c| c.passed)
    }

    /// 0 when clean, 2 on violations or failed checks, 3 when only
    /// indeterminate samples prevent a clean verdict.
    pub fn exit_code(&self) -> i32 {
        if self.violations > 0 || !self.checks_passed() {
            2
        } else if self.samples_indeterminate > 0 {
            3
        } else {
            0
        }
    }

    pub fn metric(&self, name: &str) -> Option<&MetricSummary> {
        self.metrics.get(name)
    }
}

pub fn tally_range(probe: &dyn Probe, range: core::ops::Range<u64>) -> Tally {
    let mut tally = Tally::default();
    for i in range {
        tally.push(probe.sample(i));
    }
    tally
}

pub fn finish_report(probe: &dyn Probe, tally: Tally) -> VerificationReport {
    let checks = probe.checks(&tally);
    VerificationReport::from_tally(probe.header(), probe.samples(), tally, checks)
}

/// Single-threaded run; the std companion crate offers a parallel runner
/// producing identical reports.
pub fn run_sequential(probe: &dyn Probe) -> VerificationReport {
    let tally = tally_range(probe, 0..probe.samples());
    finish_report(probe, tally)
}
