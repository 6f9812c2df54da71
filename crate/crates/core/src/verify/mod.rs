//! Named verification suites: configuration, reports and the runner.

mod suites;
mod thresholds;

pub use thresholds::{compare_thresholds, ThresholdConditions};

use crate::classes::ClassSpec;
use crate::error::{invalid, Error, Result};
use crate::grid::PhaseGrid;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

/// Default dense-kernel cap (matrix side): 256 for `n = 1`, `64^2` otherwise.
pub fn default_kernel_cap(n: usize) -> usize {
    if n == 1 {
        256
    } else {
        64 * 64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "N")]
    pub points: usize,
}

impl GridSpec {
    pub fn phase(&self) -> Result<PhaseGrid> {
        PhaseGrid::new(self.n, self.half_width, self.points)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }
}

mod exponents {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Exp {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|&p| if p.is_infinite() { Exp::Text("inf".into()) } else { Exp::Num(p) })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Exp>::deserialize(d)?
            .into_iter()
            .map(|e| match e {
                Exp::Num(p) => Ok(p),
                Exp::Text(t) => super::parse_exponent(&t).map_err(serde::de::Error::custom),
            })
            .collect()
    }
}

/// `"inf"` / `"∞"` or a number.
pub fn parse_exponent(text: &str) -> Result<f64> {
    match text.trim() {
        "inf" | "Inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|_| invalid("p", format!("cannot parse `{t}`"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: String,
    pub grid: GridSpec,
    #[serde(default, with = "exponents")]
    pub p_list: Vec<f64>,
    /// Class parameters in the `n:r,s,rho..,delta..` form.
    #[serde(default)]
    pub spec: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Number of random cases, where the suite draws any.
    #[serde(default)]
    pub cases: Option<usize>,
    /// Largest dense kernel side allowed.
    #[serde(default)]
    pub kernel_cap: Option<usize>,
}

impl ExperimentConfig {
    pub fn tol(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    pub fn count(&self, default: usize) -> usize {
        self.cases.unwrap_or(default)
    }

    pub fn class_spec(&self) -> Result<Option<ClassSpec>> {
        self.spec.as_deref().map(str::parse).transpose()
    }

    pub fn exponents(&self, default: &[f64]) -> Vec<f64> {
        if self.p_list.is_empty() {
            default.to_vec()
        } else {
            self.p_list.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        suite(&self.suite)?;
        self.grid.phase()?;
        for &p in &self.p_list {
            crate::grid::check_p(p)?;
        }
        self.class_spec()?;
        Ok(())
    }

    /// Fails when a dense kernel over `points^n` exceeds the cap.
    pub fn check_kernel(&self, n: usize, points: usize) -> Result<()> {
        let side = points.checked_pow(n as u32).unwrap_or(usize::MAX);
        let cap = self.kernel_cap.unwrap_or_else(|| default_kernel_cap(n));
        if side > cap {
            return Err(Error::ResourceLimit(format!(
                "dense kernel of side {side} exceeds the cap {cap}; raise `kernel_cap` to allow it"
            )));
        }
        Ok(())
    }

    /// The configuration each suite runs with when none is given.
    pub fn default_for(name: &str) -> Result<Self> {
        let info = suite(name)?;
        let (n, l, pts) = info.grid;
        Ok(ExperimentConfig {
            suite: name.to_string(),
            grid: GridSpec { n, half_width: l, points: pts },
            p_list: Vec::new(),
            spec: info.spec.map(str::to_string),
            seed: 1,
            tolerances: BTreeMap::new(),
            cases: None,
            kernel_cap: None,
        })
    }
}

/// One evaluated instance: its inputs and the two sides of whatever it checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub label: String,
    pub inputs: BTreeMap<String, serde_json::Value>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub ratio: Option<f64>,
    pub residual: Option<f64>,
}

impl Case {
    pub fn new(label: impl Into<String>) -> Self {
        Case { label: label.into(), ..Case::default() }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        self.inputs.insert(key.to_string(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
        self
    }

    pub fn sides(mut self, lhs: f64, rhs: f64) -> Self {
        self.lhs = Some(lhs);
        self.rhs = Some(rhs);
        self.ratio = if rhs != 0.0 { Some(lhs / rhs) } else { None };
        self
    }

    pub fn residual(mut self, r: f64) -> Self {
        self.residual = Some(r);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    /// The invariant this verdict instantiates.
    pub invariant: String,
    pub hard: bool,
    pub passed: bool,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
}

impl Verdict {
    /// Passes when `value <= threshold` (NaN fails).
    pub fn at_most(name: &str, invariant: &str, value: f64, threshold: f64) -> Self {
        Verdict {
            name: name.into(),
            invariant: invariant.into(),
            hard: true,
            passed: value <= threshold,
            value: Some(value),
            threshold: Some(threshold),
        }
    }

    /// Passes when `value >= threshold` (NaN fails).
    pub fn at_least(name: &str, invariant: &str, value: f64, threshold: f64) -> Self {
        Verdict { passed: value >= threshold, ..Verdict::at_most(name, invariant, value, threshold) }
    }

    pub fn holds(name: &str, invariant: &str, passed: bool) -> Self {
        Verdict { name: name.into(), invariant: invariant.into(), hard: true, passed, value: None, threshold: None }
    }

    pub fn soft(mut self) -> Self {
        self.hard = false;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub statement: String,
    pub config: ExperimentConfig,
    pub cases: Vec<Case>,
    pub verdicts: Vec<Verdict>,
    /// Kept out of the JSON so that reports are byte-identical across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().filter(|v| v.hard).all(|v| v.passed)
    }

    pub fn failures(&self) -> Vec<&Verdict> {
        self.verdicts.iter().filter(|v| v.hard && !v.passed).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub(crate) type SuiteFn = fn(&ExperimentConfig) -> Result<(Vec<Case>, Vec<Verdict>)>;

#[derive(Clone, Copy)]
pub struct SuiteInfo {
    pub name: &'static str,
    pub statement: &'static str,
    /// Default `(n, L, N)`.
    pub grid: (usize, f64, usize),
    pub spec: Option<&'static str>,
    run: SuiteFn,
}

impl std::fmt::Debug for SuiteInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SuiteInfo").field("name", &self.name).field("statement", &self.statement).finish()
    }
}

pub fn suites() -> &'static [SuiteInfo] {
    suites::REGISTRY
}

pub fn suite(name: &str) -> Result<&'static SuiteInfo> {
    suites().iter().find(|s| s.name == name).ok_or_else(|| Error::UnknownSuite(name.to_string()))
}

pub fn run_suite(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let info = suite(&config.suite)?;
    let start = Instant::now();
    let (cases, verdicts) = (info.run)(config)?;
    Ok(Report {
        suite: info.name.to_string(),
        statement: info.statement.to_string(),
        config: config.clone(),
        cases,
        verdicts,
        wall_time: start.elapsed(),
    })
}
