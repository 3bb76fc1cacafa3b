//! Command runners, generic over the two backends.

use hk_core::exact::render_ratio;
use hk_core::hilbert::fit_from_samples;
use hk_core::invariants::{bound_diagnostic_with, BoundReport};
use hk_core::length::ColengthProvider;
use hk_core::{
    additivity_check, beta_sequence, decompose_check, ehk_sequence, elias_quantity, northcott_check,
    uniform_convergence_diagnostic, wy_check, Budget, HilbertSampler, HkError, InequalityReport, Lattice, ModuleSpec,
    MonomialIdeal, RegularBackend, RegularRing, SemigroupIdeal, ToricBackend, ToricRing2, Verdict, WholeRing,
};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CommandName, IdealSpec, LatticeSpec, ModuleConfig, Options, RingSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Inconclusive,
    Failed,
    Usage,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::Usage => 2,
            Status::Inconclusive => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Failed => "failed",
            Status::Usage => "error",
            Status::Inconclusive => "inconclusive",
        }
    }

    fn of_verdict(v: Verdict) -> Self {
        match v {
            Verdict::Holds | Verdict::Equality => Status::Ok,
            Verdict::Fails => Status::Failed,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }

    pub fn of_error(e: &HkError) -> Self {
        match e {
            _ if e.is_budget() => Status::Inconclusive,
            HkError::Overflow(_) | HkError::Unsupported(_) => Status::Inconclusive,
            HkError::BoundViolation { .. } | HkError::CrossCheckMismatch { .. } => Status::Failed,
            _ => Status::Usage,
        }
    }
}

/// A finished command: a fixed-header table, its JSON form, and a status.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
    pub json: Value,
    pub status: Status,
    pub error: Option<String>,
}

impl Outcome {
    fn ok<T: Serialize>(header: &'static [&'static str], rows: Vec<Vec<String>>, report: &T, status: Status) -> Self {
        Outcome { header, rows, json: serde_json::to_value(report).expect("reports serialize"), status, error: None }
    }

    pub fn failed(header: &'static [&'static str], status: Status, message: String) -> Self {
        Outcome { header, rows: Vec::new(), json: json!({ "error": message }), status, error: Some(message) }
    }

    fn from_error(header: &'static [&'static str], e: HkError) -> Self {
        Self::failed(header, Status::of_error(&e), e.to_string())
    }
}

pub fn header(cmd: CommandName) -> &'static [&'static str] {
    match cmd {
        CommandName::IdealInfo => &["generators", "mu", "ord", "m_primary", "colength", "elias_quantity"],
        CommandName::HsFit => &["quantity", "index", "value"],
        CommandName::Beta => &["e", "q", "e1_bracket", "e1_over_qd", "extrapolated"],
        CommandName::Ehk => &["e", "q", "length", "normalized", "extrapolated"],
        CommandName::Wy | CommandName::Northcott => &["check", "lhs", "rhs", "slack", "verdict", "numerical"],
        CommandName::Decompose => {
            &["k", "ehk_power", "residual", "residual_over_kd1", "expected_tail", "matches", "verdict"]
        }
        CommandName::Additivity => &["e", "q", "e1_left", "e1_right", "e1_sum", "exact_sum", "verdict"],
        CommandName::Uniform => {
            &["e", "q", "k", "normalized", "limit", "deviation", "max_deviation", "constant", "verdict"]
        }
        CommandName::Bound => &["e", "q", "k", "length", "bound", "hs_constant", "constant", "verdict"],
    }
}

#[derive(Serialize)]
struct IdealInfo {
    generators: String,
    mu: usize,
    ord: u64,
    m_primary: bool,
    colength: Option<String>,
    /// `(e(R) - 1) e(I)`; toric rings only.
    elias_quantity: Option<String>,
}

#[derive(Serialize)]
struct HsFitReport {
    samples: Vec<String>,
    fit: Option<hk_core::HilbertCoefficients>,
}

/// Backend-specific parsing and ideal facts.
pub trait Engine: ColengthProvider {
    fn ideal(&self, spec: &IdealSpec) -> Result<Self::Ideal, String>;
    fn module(&self, spec: Option<&ModuleConfig>) -> Result<Self::Module, String>;
    fn ord(&self, ideal: &Self::Ideal) -> u64;
    fn is_m_primary(&self, ideal: &Self::Ideal) -> bool;
    fn render(&self, ideal: &Self::Ideal) -> String {
        ideal.to_string()
    }
    fn elias(&self, ideal: &Self::Ideal, k_max: usize) -> Option<Result<String, HkError>>;
}

fn exponents_u32(gens: &[Vec<i64>]) -> Result<Vec<Vec<u32>>, String> {
    gens.iter()
        .map(|g| {
            g.iter()
                .map(|&e| u32::try_from(e).map_err(|_| format!("exponent {e} is not a nonnegative integer")))
                .collect()
        })
        .collect()
}

impl Engine for RegularBackend {
    fn ideal(&self, spec: &IdealSpec) -> Result<MonomialIdeal, String> {
        let ring = self.ring;
        match (spec.maximal_power()?, spec) {
            (Some(k), _) => ring.maximal_ideal().power(k).map_err(|e| e.to_string()),
            (None, IdealSpec::Generators(g)) => {
                MonomialIdeal::from_exponents(ring, &exponents_u32(g)?).map_err(|e| e.to_string())
            }
            (None, IdealSpec::Named(_)) => unreachable!("names resolve to maximal powers"),
        }
    }

    fn module(&self, spec: Option<&ModuleConfig>) -> Result<ModuleSpec, String> {
        match spec {
            None => Ok(ModuleSpec::free(self.ring)),
            Some(ModuleConfig::Named(s)) if s == "R" => Ok(ModuleSpec::free(self.ring)),
            Some(ModuleConfig::Named(s)) => {
                Err(format!("unknown module {s:?}; expected \"R\" or {{\"quotient\": ...}}"))
            }
            Some(ModuleConfig::Quotient { quotient }) => {
                MonomialIdeal::from_exponents(self.ring, &exponents_u32(quotient)?)
                    .map(ModuleSpec::quotient)
                    .map_err(|e| e.to_string())
            }
        }
    }

    fn ord(&self, ideal: &MonomialIdeal) -> u64 {
        ideal.ord()
    }

    fn is_m_primary(&self, ideal: &MonomialIdeal) -> bool {
        ideal.is_m_primary()
    }

    fn elias(&self, _ideal: &MonomialIdeal, _k_max: usize) -> Option<Result<String, HkError>> {
        None
    }
}

impl Engine for ToricBackend {
    fn ideal(&self, spec: &IdealSpec) -> Result<SemigroupIdeal, String> {
        match (spec.maximal_power()?, spec) {
            (Some(k), _) => self.ring.maximal_ideal().power(k).map_err(|e| e.to_string()),
            (None, IdealSpec::Generators(g)) => {
                let pts = g
                    .iter()
                    .map(|v| {
                        <[i64; 2]>::try_from(v.as_slice())
                            .map_err(|_| format!("toric generator {v:?} must have 2 coordinates"))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                SemigroupIdeal::new(self.ring, pts).map_err(|e| e.to_string())
            }
            (None, IdealSpec::Named(_)) => unreachable!("names resolve to maximal powers"),
        }
    }

    fn module(&self, spec: Option<&ModuleConfig>) -> Result<WholeRing, String> {
        match spec {
            None => Ok(WholeRing),
            Some(ModuleConfig::Named(s)) if s == "R" => Ok(WholeRing),
            Some(_) => Err("toric rings support only the module \"R\"".into()),
        }
    }

    fn ord(&self, ideal: &SemigroupIdeal) -> u64 {
        ideal.ord() as u64
    }

    fn is_m_primary(&self, ideal: &SemigroupIdeal) -> bool {
        self.certify(ideal).is_ok()
    }

    fn elias(&self, ideal: &SemigroupIdeal, k_max: usize) -> Option<Result<String, HkError>> {
        Some(elias_quantity(self, &self.ring.maximal_ideal(), ideal, k_max).map(|v| v.to_string()))
    }
}

/// Builds the backend for a ring spec and runs `f` on it.
pub fn with_engine<T>(ring: &RingSpec, opts: &Options, f: impl FnOnce(&dyn Dispatch) -> T) -> Result<T, String> {
    match ring {
        RingSpec::Regular { d, p } => {
            let ring = RegularRing::new(*d, *p).map_err(|e| e.to_string())?;
            Ok(f(&RegularBackend::new(ring).with_cross_check(opts.paranoid)))
        }
        RingSpec::Toric2 { rays, lattice, p } => {
            let lattice = match lattice {
                LatticeSpec::Generators(g) => Lattice::from_generators(g),
                LatticeSpec::Congruence { congruence } => {
                    Lattice::from_congruence(congruence.coeffs, congruence.modulus)
                }
            }
            .map_err(|e| e.to_string())?;
            let ring = ToricRing2::new(*rays, lattice, *p).map_err(|e| e.to_string())?;
            let backend = ToricBackend::new(ring)
                .with_enumeration_cap(opts.budgets.enumeration_cap)
                .with_certification_bound(opts.budgets.certification_bound);
            Ok(f(&backend))
        }
    }
}

/// Object-safe entry point over [`Engine`].
pub trait Dispatch {
    fn run(
        &self,
        cmd: CommandName,
        ideal: &IdealSpec,
        module: Option<&ModuleConfig>,
        opts: &Options,
        tol: &BigRational,
    ) -> Outcome;
}

impl<E: Engine> Dispatch for E {
    fn run(
        &self,
        cmd: CommandName,
        ideal: &IdealSpec,
        module: Option<&ModuleConfig>,
        opts: &Options,
        tol: &BigRational,
    ) -> Outcome {
        let head = header(cmd);
        let ideal = match self.ideal(ideal) {
            Ok(i) => i,
            Err(msg) => return Outcome::failed(head, Status::Usage, msg),
        };
        let budget = Budget { max_e: opts.budgets.max_e, k_max: opts.budgets.k_max, tolerance: tol.clone() };
        let result = match cmd {
            CommandName::IdealInfo => Ok(ideal_info(self, &ideal, &budget)),
            CommandName::HsFit => match self.module(module) {
                Ok(m) => Ok(hs_fit(self, &ideal, m, budget.k_max)),
                Err(msg) => return Outcome::failed(head, Status::Usage, msg),
            },
            CommandName::Beta => beta(self, &ideal, &budget),
            CommandName::Ehk => ehk(self, &ideal, &budget),
            CommandName::Wy => wy_check(self, &ideal, opts.n.unwrap_or(2), &budget).map(inequality),
            CommandName::Northcott => northcott_check(self, &ideal, &budget).map(inequality),
            CommandName::Decompose => decompose(self, &ideal, opts.budgets.max_k, &budget),
            CommandName::Additivity => match (self.module(opts.left.as_ref()), self.module(opts.right.as_ref())) {
                (Ok(l), Ok(r)) => additivity(self, &ideal, &l, &r, &budget),
                (Err(msg), _) | (_, Err(msg)) => return Outcome::failed(head, Status::Usage, msg),
            },
            CommandName::Uniform => uniform(self, &ideal, opts.budgets.max_k, &budget),
            CommandName::Bound => match self.module(module) {
                Ok(m) => bound(self, &ideal, &m, opts.budgets.max_k, &budget, opts.test_hooks.corrupt_bound_length),
                Err(msg) => return Outcome::failed(head, Status::Usage, msg),
            },
        };
        result.unwrap_or_else(|e| Outcome::from_error(head, e))
    }
}

fn ideal_info<E: Engine>(b: &E, ideal: &E::Ideal, budget: &Budget) -> Outcome {
    let head = header(CommandName::IdealInfo);
    let m_primary = b.is_m_primary(ideal);
    let colength = if m_primary {
        match b.colength(ideal) {
            Ok(c) => Some(c.to_string()),
            Err(e) => return Outcome::from_error(head, e),
        }
    } else {
        None
    };
    let elias = match m_primary.then(|| b.elias(ideal, budget.k_max)).flatten() {
        Some(Ok(v)) => Some(v),
        Some(Err(e)) => return Outcome::from_error(head, e),
        None => None,
    };
    let info = IdealInfo {
        generators: b.render(ideal),
        mu: b.generator_count(ideal),
        ord: b.ord(ideal),
        m_primary,
        colength,
        elias_quantity: elias,
    };
    let row = vec![
        info.generators.clone(),
        info.mu.to_string(),
        info.ord.to_string(),
        info.m_primary.to_string(),
        info.colength.clone().unwrap_or_default(),
        info.elias_quantity.clone().unwrap_or_default(),
    ];
    let mut out = Outcome::ok(head, vec![row], &info, Status::Ok);
    if !m_primary {
        out.error = Some("not m-primary; colength unavailable".into());
    }
    out
}

fn hs_fit<E: Engine>(b: &E, ideal: &E::Ideal, module: E::Module, k_max: usize) -> Outcome {
    let head = header(CommandName::HsFit);
    let mut sampler = HilbertSampler::new(b, ideal.clone(), module);
    let samples = match sampler.samples(k_max) {
        Ok(s) => s.to_vec(),
        Err(e) => return Outcome::from_error(head, e),
    };
    let mut rows: Vec<Vec<String>> =
        samples.iter().enumerate().map(|(i, l)| vec!["length".into(), (i + 1).to_string(), l.to_string()]).collect();
    let rendered: Vec<String> = samples.iter().map(ToString::to_string).collect();
    match fit_from_samples(b.dim(), &samples) {
        Ok(fit) => {
            rows.extend(fit.e.iter().enumerate().map(|(i, e)| vec!["e".into(), i.to_string(), e.to_string()]));
            rows.push(vec!["postulation".into(), String::new(), fit.postulation.to_string()]);
            rows.push(vec!["verified_through".into(), String::new(), fit.verified_through.to_string()]);
            Outcome::ok(head, rows, &HsFitReport { samples: rendered, fit: Some(fit) }, Status::Ok)
        }
        Err(e) => {
            let mut out = Outcome::ok(head, rows, &HsFitReport { samples: rendered, fit: None }, Status::of_error(&e));
            out.json["error"] = json!(e.to_string());
            out.error = Some(e.to_string());
            out
        }
    }
}

fn q_pow_d(q: u64, d: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(q).pow(d as u32))
}

fn beta<E: Engine>(b: &E, ideal: &E::Ideal, budget: &Budget) -> Result<Outcome, HkError> {
    let est = beta_sequence(b, ideal, budget.max_e, budget.k_max)?;
    let n = est.terms.len();
    let rows = est
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let e1 = &t.value * q_pow_d(t.q, b.dim());
            vec![
                t.e.to_string(),
                t.q.to_string(),
                render_ratio(&e1),
                render_ratio(&t.value),
                if i + 1 == n { render_ratio(&est.extrapolated) } else { String::new() },
            ]
        })
        .collect();
    Ok(Outcome::ok(header(CommandName::Beta), rows, &est, Status::Ok))
}

fn ehk<E: Engine>(b: &E, ideal: &E::Ideal, budget: &Budget) -> Result<Outcome, HkError> {
    let est = ehk_sequence(b, ideal, budget.max_e)?;
    let n = est.terms.len();
    let rows = est
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            vec![
                t.e.to_string(),
                t.q.to_string(),
                render_ratio(&(&t.value * q_pow_d(t.q, b.dim()))),
                render_ratio(&t.value),
                if i + 1 == n { render_ratio(&est.extrapolated) } else { String::new() },
            ]
        })
        .collect();
    Ok(Outcome::ok(header(CommandName::Ehk), rows, &est, Status::Ok))
}

fn inequality(rep: InequalityReport) -> Outcome {
    let row = vec![
        rep.name.clone(),
        render_ratio(&rep.lhs),
        render_ratio(&rep.rhs),
        render_ratio(&rep.slack),
        rep.verdict.as_str().into(),
        rep.numerical.to_string(),
    ];
    Outcome::ok(header(CommandName::Wy), vec![row], &rep, Status::of_verdict(rep.verdict))
}

fn opt_ratio(r: &Option<BigRational>) -> String {
    r.as_ref().map(render_ratio).unwrap_or_default()
}

fn decompose<E: Engine>(b: &E, ideal: &E::Ideal, max_k: u32, budget: &Budget) -> Result<Outcome, HkError> {
    let rep = decompose_check(b, ideal, max_k, budget)?;
    let verdict = rep.verdict.as_str();
    let rows = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                render_ratio(&r.ehk_power),
                render_ratio(&r.residual),
                render_ratio(&r.residual_over_kd1),
                opt_ratio(&r.expected_tail),
                r.matches.map(|m| m.to_string()).unwrap_or_default(),
                verdict.into(),
            ]
        })
        .collect();
    Ok(Outcome::ok(header(CommandName::Decompose), rows, &rep, Status::of_verdict(rep.verdict)))
}

fn additivity<E: Engine>(
    b: &E,
    ideal: &E::Ideal,
    l: &E::Module,
    r: &E::Module,
    budget: &Budget,
) -> Result<Outcome, HkError> {
    let rep = additivity_check(b, ideal, l, r, budget)?;
    let verdict = rep.verdict.as_str();
    let rows = rep
        .rows
        .iter()
        .map(|row| {
            vec![
                row.e.to_string(),
                row.q.to_string(),
                row.e1_left.to_string(),
                row.e1_right.to_string(),
                row.e1_sum_module.to_string(),
                row.exact_sum.to_string(),
                verdict.into(),
            ]
        })
        .collect();
    Ok(Outcome::ok(header(CommandName::Additivity), rows, &rep, Status::of_verdict(rep.verdict)))
}

fn uniform<E: Engine>(b: &E, ideal: &E::Ideal, max_k: u32, budget: &Budget) -> Result<Outcome, HkError> {
    let rep = uniform_convergence_diagnostic(b, ideal, max_k, budget)?;
    let verdict = rep.verdict.as_str();
    let constant = render_ratio(&rep.constant);
    let rows = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.e.to_string(),
                r.q.to_string(),
                r.k.to_string(),
                render_ratio(&r.normalized),
                render_ratio(&r.limit),
                render_ratio(&r.deviation),
                render_ratio(&rep.max_deviation[r.e as usize - 1]),
                constant.clone(),
                verdict.into(),
            ]
        })
        .collect();
    Ok(Outcome::ok(header(CommandName::Uniform), rows, &rep, Status::of_verdict(rep.verdict)))
}

fn bound<E: Engine>(
    b: &E,
    ideal: &E::Ideal,
    module: &E::Module,
    max_k: u32,
    budget: &Budget,
    corrupt: bool,
) -> Result<Outcome, HkError> {
    let inflate = BigUint::from(10u32).pow(40);
    let rep: BoundReport =
        bound_diagnostic_with(b, ideal, module, max_k, budget, |len| if corrupt { len + &inflate } else { len })?;
    let verdict = rep.verdict.as_str();
    let (hs, c) = (render_ratio(&rep.hs_constant), render_ratio(&rep.constant));
    let rows = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.e.to_string(),
                r.q.to_string(),
                r.k.to_string(),
                r.length.to_string(),
                render_ratio(&r.bound),
                hs.clone(),
                c.clone(),
                verdict.into(),
            ]
        })
        .collect();
    Ok(Outcome::ok(header(CommandName::Bound), rows, &rep, Status::of_verdict(rep.verdict)))
}
