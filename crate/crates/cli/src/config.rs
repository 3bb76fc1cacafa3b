//! JSON job and sweep configuration.

use std::path::Path;

use hk_core::exact::parse_ratio;
use hk_core::toric::DEFAULT_ENUMERATION_CAP;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RingSpec {
    Regular { d: usize, p: u64 },
    Toric2 { rays: [[i64; 2]; 2], lattice: LatticeSpec, p: u64 },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum LatticeSpec {
    Generators(Vec<[i64; 2]>),
    Congruence { congruence: Congruence },
}

/// `{ v : coeffs · v ≡ 0 mod modulus }`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Congruence {
    pub coeffs: [i64; 2],
    pub modulus: i64,
}

/// Generator exponent vectors, or `"m"` / `"m^k"` for powers of the maximal ideal.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum IdealSpec {
    Generators(Vec<Vec<i64>>),
    Named(String),
}

impl IdealSpec {
    /// `Some(k)` for `"m^k"` (and `"m"` as `k = 1`).
    pub fn maximal_power(&self) -> Result<Option<u32>, String> {
        match self {
            IdealSpec::Generators(_) => Ok(None),
            IdealSpec::Named(s) if s == "m" => Ok(Some(1)),
            IdealSpec::Named(s) => match s.strip_prefix("m^").and_then(|k| k.parse::<u32>().ok()) {
                Some(k) if k > 0 => Ok(Some(k)),
                _ => Err(format!("unknown ideal name {s:?}; expected generators, \"m\" or \"m^k\"")),
            },
        }
    }

    pub fn render(&self) -> String {
        match self {
            IdealSpec::Named(s) => s.clone(),
            IdealSpec::Generators(g) => serde_json::to_string(g).expect("vectors serialize"),
        }
    }
}

/// `"R"` or `{"quotient": generators}` for `R/J`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ModuleConfig {
    Named(String),
    Quotient { quotient: Vec<Vec<i64>> },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budgets {
    /// Largest Frobenius exponent `E`.
    pub max_e: u32,
    /// Largest ordinary power `K` in decompose and the grid diagnostics.
    pub max_k: u32,
    /// Samples per Hilbert–Samuel fit.
    pub k_max: usize,
    pub enumeration_cap: u64,
    pub certification_bound: Option<u64>,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { max_e: 3, max_k: 4, k_max: 9, enumeration_cap: DEFAULT_ENUMERATION_CAP, certification_bound: None }
    }
}

impl Budgets {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("max_e", self.max_e as u64),
            ("max_k", self.max_k as u64),
            ("k_max", self.k_max as u64),
            ("enumeration_cap", self.enumeration_cap),
            ("certification_bound", self.certification_bound.unwrap_or(1)),
        ];
        match positive.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(format!("budget {name} must be positive")),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestHooks {
    /// Inflate every length on the bound grid so the strict bound fails.
    pub corrupt_bound_length: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Options shared by single jobs and sweeps.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub budgets: Budgets,
    pub n: Option<u32>,
    pub left: Option<ModuleConfig>,
    pub right: Option<ModuleConfig>,
    pub format: Option<Format>,
    pub paranoid: bool,
    pub tolerance: Option<String>,
    pub test_hooks: TestHooks,
}

macro_rules! options_of {
    ($t:ty) => {
        impl $t {
            pub fn options(&self) -> Options {
                Options {
                    budgets: self.budgets.clone(),
                    n: self.n,
                    left: self.left.clone(),
                    right: self.right.clone(),
                    format: self.format,
                    paranoid: self.paranoid,
                    tolerance: self.tolerance.clone(),
                    test_hooks: self.test_hooks.clone(),
                }
            }
        }
    };
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub ring: RingSpec,
    pub ideal: IdealSpec,
    /// Module for hs-fit and bound; defaults to `R`.
    #[serde(default)]
    pub module: Option<ModuleConfig>,
    #[serde(default)]
    pub budgets: Budgets,
    /// Power `n` for the wy check.
    #[serde(default)]
    pub n: Option<u32>,
    /// Summands for the additivity check.
    #[serde(default)]
    pub left: Option<ModuleConfig>,
    #[serde(default)]
    pub right: Option<ModuleConfig>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub paranoid: bool,
    #[serde(default)]
    pub tolerance: Option<String>,
    #[serde(default)]
    pub test_hooks: TestHooks,
}

options_of!(JobConfig);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    IdealInfo,
    HsFit,
    Beta,
    Ehk,
    Wy,
    Northcott,
    Decompose,
    Additivity,
    Uniform,
    Bound,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::IdealInfo => "ideal-info",
            CommandName::HsFit => "hs-fit",
            CommandName::Beta => "beta",
            CommandName::Ehk => "ehk",
            CommandName::Wy => "wy",
            CommandName::Northcott => "northcott",
            CommandName::Decompose => "decompose",
            CommandName::Additivity => "additivity",
            CommandName::Uniform => "uniform",
            CommandName::Bound => "bound",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `(x^a, y^b)` for `1 ≤ a ≤ a_max`, `1 ≤ b ≤ b_max`.
    CompleteIntersection {
        name: Option<String>,
        p: u64,
        a_max: u32,
        b_max: u32,
    },
    /// `m^s` in `d` variables for `1 ≤ s ≤ s_max`.
    MaxIdealPower {
        name: Option<String>,
        d: usize,
        p: u64,
        s_max: u32,
    },
    /// `m^s` in the `A_1` ring for `1 ≤ s ≤ s_max`.
    ToricA1 {
        name: Option<String>,
        p: u64,
        #[serde(default = "one")]
        s_max: u32,
    },
    Explicit {
        name: Option<String>,
        ring: RingSpec,
        ideals: Vec<IdealSpec>,
    },
}

fn one() -> u32 {
    1
}

/// One ideal of a family, with its parameters rendered for output.
#[derive(Clone, Debug)]
pub struct Member {
    pub params: String,
    pub ring: RingSpec,
    pub ideal: IdealSpec,
}

impl Family {
    pub fn name(&self) -> String {
        let (name, kind) = match self {
            Family::CompleteIntersection { name, .. } => (name, "complete_intersection"),
            Family::MaxIdealPower { name, .. } => (name, "max_ideal_power"),
            Family::ToricA1 { name, .. } => (name, "toric_a1"),
            Family::Explicit { name, .. } => (name, "explicit"),
        };
        name.clone().unwrap_or_else(|| kind.to_string())
    }

    /// Members in lexicographic parameter order.
    pub fn members(&self) -> Vec<Member> {
        match self {
            Family::CompleteIntersection { p, a_max, b_max, .. } => (1..=*a_max)
                .flat_map(|a| {
                    (1..=*b_max).map(move |b| Member {
                        params: format!("a={a};b={b}"),
                        ring: RingSpec::Regular { d: 2, p: *p },
                        ideal: IdealSpec::Generators(vec![vec![a as i64, 0], vec![0, b as i64]]),
                    })
                })
                .collect(),
            Family::MaxIdealPower { d, p, s_max, .. } => (1..=*s_max)
                .map(|s| Member {
                    params: format!("s={s}"),
                    ring: RingSpec::Regular { d: *d, p: *p },
                    ideal: IdealSpec::Named(format!("m^{s}")),
                })
                .collect(),
            Family::ToricA1 { p, s_max, .. } => (1..=*s_max)
                .map(|s| Member {
                    params: format!("s={s}"),
                    ring: RingSpec::Toric2 {
                        rays: [[1, 0], [0, 1]],
                        lattice: LatticeSpec::Congruence { congruence: Congruence { coeffs: [1, 1], modulus: 2 } },
                        p: *p,
                    },
                    ideal: IdealSpec::Named(format!("m^{s}")),
                })
                .collect(),
            Family::Explicit { ring, ideals, .. } => ideals
                .iter()
                .enumerate()
                .map(|(i, ideal)| Member { params: format!("index={i}"), ring: ring.clone(), ideal: ideal.clone() })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub families: Vec<Family>,
    pub commands: Vec<CommandName>,
    /// Relative paths are taken from the config file's directory.
    pub output_dir: String,
    #[serde(default)]
    pub budgets: Budgets,
    /// Power `n` for the wy check.
    #[serde(default)]
    pub n: Option<u32>,
    /// Summands for the additivity check.
    #[serde(default)]
    pub left: Option<ModuleConfig>,
    #[serde(default)]
    pub right: Option<ModuleConfig>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub paranoid: bool,
    #[serde(default)]
    pub tolerance: Option<String>,
    #[serde(default)]
    pub test_hooks: TestHooks,
}

options_of!(SweepConfig);

/// Reads a JSON document, reporting parse errors with line and column.
pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
}

/// Parses and validates a tolerance; it must be a positive rational.
pub fn parse_tolerance(s: &str) -> Result<BigRational, String> {
    match parse_ratio(s) {
        Some(t) if t > BigRational::from_integer(0.into()) => Ok(t),
        _ => Err(format!("tolerance {s:?} is not a positive rational")),
    }
}
