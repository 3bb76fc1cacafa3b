//! Hilbert–Kunz sequences, second-coefficient limits, and checkers for the
//! inequalities and identities relating them to Hilbert–Samuel coefficients.
//!
//! Everything here is generic over a [`ColengthProvider`]. On a backend where
//! Frobenius is flat every quantity is exact; elsewhere limits are estimated
//! by two-point Richardson extrapolation under an `O(1/q)` error model and
//! verdicts are labelled numerical.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::combinat::binomial;
use crate::error::{HkError, Result};
use crate::exact::{ser_biguint, ser_opt_ratio, ser_ratio};
use crate::hilbert::{fit_from_samples, HilbertCoefficients, HilbertSampler};
use crate::length::ColengthProvider;

/// Default slack under which a numerical inequality counts as an equality.
pub fn default_tolerance() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(100))
}

fn ratio(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn q_power(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e).ok_or(HkError::Overflow("q = p^e"))
}

fn q_to_d(q: u64, d: usize) -> BigRational {
    ratio(BigInt::from(q).pow(d as u32))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitTerm {
    pub e: u32,
    pub q: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub value: BigRational,
}

/// Error model `a_q = L + C/q`; `constant` is `C` fitted from the last two terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorModel {
    pub order: String,
    #[serde(serialize_with = "ser_ratio")]
    pub constant: BigRational,
}

/// A `q`-indexed sequence of exact rationals and its extrapolated limit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitEstimate {
    pub terms: Vec<LimitTerm>,
    #[serde(serialize_with = "ser_ratio")]
    pub extrapolated: BigRational,
    pub method: String,
    pub error_model: ErrorModel,
}

impl LimitEstimate {
    pub fn from_terms(terms: Vec<LimitTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(HkError::BudgetTooSmall("a limit estimate needs at least one term".into()));
        }
        if terms.windows(2).any(|w| w[1].q <= w[0].q) {
            return Err(HkError::InvalidArgument("terms must have strictly increasing q".into()));
        }
        let (extrapolated, constant, method) = match &terms[..] {
            [only] => (only.value.clone(), BigRational::zero(), "single-term"),
            [.., a, b] => {
                let (q1, q2) = (ratio(a.q), ratio(b.q));
                let span = &q2 - &q1;
                let limit = (&q2 * &b.value - &q1 * &a.value) / &span;
                let constant = &q1 * &q2 * (&a.value - &b.value) / &span;
                (limit, constant, "richardson-2pt")
            }
            [] => unreachable!(),
        };
        Ok(LimitEstimate {
            terms,
            extrapolated,
            method: method.into(),
            error_model: ErrorModel { order: "O(1/q)".into(), constant },
        })
    }

    pub fn values(&self) -> impl Iterator<Item = &BigRational> {
        self.terms.iter().map(|t| &t.value)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].value == w[1].value)
    }
}

/// Evaluates `f(e, q)` for `e = 1..=max_e` in parallel, reporting the first
/// failing exponent together with the largest completed one.
fn frobenius_terms<F>(p: u64, max_e: u32, f: F) -> Result<Vec<LimitTerm>>
where
    F: Fn(u32, u64) -> Result<BigRational> + Sync,
{
    if max_e == 0 {
        return Err(HkError::BudgetTooSmall("at least one Frobenius exponent is required".into()));
    }
    let results: Vec<Result<LimitTerm>> = (1..=max_e)
        .into_par_iter()
        .map(|e| {
            let q = q_power(p, e)?;
            Ok(LimitTerm { e, q, value: f(e, q)? })
        })
        .collect();
    let mut terms = Vec::with_capacity(results.len());
    for (idx, r) in results.into_iter().enumerate() {
        match r {
            Ok(t) => terms.push(t),
            Err(source) if source.is_budget() => {
                return Err(HkError::SequenceBudget {
                    failed_e: idx as u32 + 1,
                    completed: idx as u32,
                    source: Box::new(source),
                })
            }
            Err(source) => return Err(source),
        }
    }
    Ok(terms)
}

/// `e_HK(I) = ℓ(R/I)` on a backend where Frobenius is flat.
pub fn ehk_exact<B: ColengthProvider>(backend: &B, ideal: &B::Ideal) -> Result<BigRational> {
    if !backend.frobenius_is_flat() {
        return Err(HkError::Unsupported("exact e_HK needs a flat Frobenius; use ehk_sequence"));
    }
    Ok(ratio(backend.colength(ideal)?))
}

/// Terms `ℓ(R/I^[q])/q^d` for `q = p, ..., p^max_e`.
pub fn ehk_sequence<B: ColengthProvider>(backend: &B, ideal: &B::Ideal, max_e: u32) -> Result<LimitEstimate> {
    let d = backend.dim();
    let terms = frobenius_terms(backend.characteristic(), max_e, |_, q| {
        let bracket = backend.bracket_power(ideal, q)?;
        Ok(ratio(backend.colength(&bracket)?) / q_to_d(q, d))
    })?;
    LimitEstimate::from_terms(terms)
}

/// `e_HK(I)`: exact when Frobenius is flat, extrapolated otherwise.
pub fn ehk_value<B: ColengthProvider>(backend: &B, ideal: &B::Ideal, max_e: u32) -> Result<BigRational> {
    if backend.frobenius_is_flat() {
        ehk_exact(backend, ideal)
    } else {
        Ok(ehk_sequence(backend, ideal, max_e)?.extrapolated)
    }
}

/// `e_HK(I^k)`.
pub fn ehk_of_power<B: ColengthProvider>(backend: &B, ideal: &B::Ideal, k: u32, max_e: u32) -> Result<BigRational> {
    ehk_value(backend, &backend.power(ideal, k)?, max_e)
}

/// Terms `e_i(I^[q], M)/q^d`; `i = 1`, `M = R` is the second-coefficient limit β(I).
pub fn ei_limit_sequence<B: ColengthProvider>(
    backend: &B,
    ideal: &B::Ideal,
    i: usize,
    max_e: u32,
    module: Option<&B::Module>,
    k_max: usize,
) -> Result<LimitEstimate> {
    let d = backend.dim();
    if i > d {
        return Err(HkError::InvalidArgument(format!("coefficient index {i} exceeds dimension {d}")));
    }
    let module = module.cloned().unwrap_or_else(|| backend.free_module());
    let terms = frobenius_terms(backend.characteristic(), max_e, |_, q| {
        let fit = (|| {
            let bracket = backend.bracket_power(ideal, q)?;
            HilbertSampler::new(backend, bracket, module.clone()).fit(k_max)
        })()
        .map_err(|source| HkError::AtFrobeniusPower { q, source: Box::new(source) })?;
        Ok(ratio(fit.e[i].clone()) / q_to_d(q, d))
    })?;
    LimitEstimate::from_terms(terms)
}

/// Second-coefficient limit `β(I) = lim e_1(I^[q])/q^d`.
pub fn beta_sequence<B: ColengthProvider>(
    backend: &B,
    ideal: &B::Ideal,
    max_e: u32,
    k_max: usize,
) -> Result<LimitEstimate> {
    ei_limit_sequence(backend, ideal, 1, max_e, None, k_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Equality,
    Fails,
    Inconclusive,
}

impl Verdict {
    /// An inequality that holds with equality still holds.
    pub fn holds(self) -> bool {
        matches!(self, Verdict::Holds | Verdict::Equality)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Equality => "equality",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Both sides of an inequality `lhs ≤ rhs` (or `≥`), oriented so that
/// `slack ≥ 0` means the inequality holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    #[serde(serialize_with = "ser_ratio")]
    pub lhs: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub rhs: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub slack: BigRational,
    pub verdict: Verdict,
    pub numerical: bool,
}

impl InequalityReport {
    /// `tolerance = None` means exact comparison.
    pub fn judge(
        name: &str,
        lhs: BigRational,
        rhs: BigRational,
        slack: BigRational,
        tolerance: Option<&BigRational>,
    ) -> Self {
        let verdict = match tolerance {
            None if slack.is_zero() => Verdict::Equality,
            None if slack.is_positive() => Verdict::Holds,
            None => Verdict::Fails,
            Some(tol) if slack.abs() <= *tol => Verdict::Equality,
            Some(_) if slack.is_positive() => Verdict::Holds,
            Some(_) => Verdict::Fails,
        };
        InequalityReport { name: name.into(), lhs, rhs, slack, verdict, numerical: tolerance.is_some() }
    }
}

fn tolerance_for<'t, B: ColengthProvider>(backend: &B, tol: &'t BigRational) -> Option<&'t BigRational> {
    (!backend.frobenius_is_flat()).then_some(tol)
}

/// Shared budgets for the checkers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest Frobenius exponent `E` (terms use `q = p, ..., p^E`).
    pub max_e: u32,
    /// Largest ordinary power sampled for Hilbert fits.
    pub k_max: usize,
    pub tolerance: BigRational,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_e: 3, k_max: 9, tolerance: default_tolerance() }
    }
}

fn hilbert_fit<B: ColengthProvider>(backend: &B, ideal: &B::Ideal, k_max: usize) -> Result<HilbertCoefficients> {
    HilbertSampler::new(backend, ideal.clone(), backend.free_module()).fit(k_max)
}

/// `e_HK(I^n) ≤ e(I) C(n+d-2, d) + e_HK(I) C(n+d-2, d-1)`, equality iff `I` is stable.
pub fn wy_check<B: ColengthProvider>(
    backend: &B,
    ideal: &B::Ideal,
    n: u32,
    budget: &Budget,
) -> Result<InequalityReport> {
    if n == 0 {
        return Err(HkError::ZeroPower);
    }
    let d = backend.dim() as u64;
    let e = ratio(hilbert_fit(backend, ideal, budget.k_max)?.e[0].clone());
    let ehk = ehk_value(backend, ideal, budget.max_e)?;
    let lhs = ehk_of_power(backend, ideal, n, budget.max_e)?;
    let n = n as u64;
    let rhs = e * ratio(binomial(n + d - 2, d)) + ehk * ratio(binomial(n + d - 2, d - 1));
    let slack = &rhs - &lhs;
    Ok(InequalityReport::judge("wy", lhs, rhs, slack, tolerance_for(backend, &budget.tolerance)))
}

/// `β(I) ≥ e(I) - e_HK(I)`.
pub fn northcott_check<B: ColengthProvider>(
    backend: &B,
    ideal: &B::Ideal,
    budget: &Budget,
) -> Result<InequalityReport> {
    let beta = beta_sequence(backend, ideal, budget.max_e, budget.k_max)?.extrapolated;
    let e = ratio(hilbert_fit(backend, ideal, budget.k_max)?.e[0].clone());
    let ehk = ehk_value(backend, ideal, budget.max_e)?;
    let rhs = e - ehk;
    let slack = &beta - &rhs;
    Ok(InequalityReport::judge("northcott", beta, rhs, slack, tolerance_for(backend, &budget.tolerance)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecomposeRow {
    pub k: u32,
    #[serde(serialize_with = "ser_ratio")]
    pub ehk_power: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub residual: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub residual_over_kd1: BigRational,
    /// Exact `Σ_{i≥2} (-1)^i e_i(I) C(k+d-1-i, d-i)`; flat backends only.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub expected_tail: Option<BigRational>,
    /// `None` below the postulation index, where no identity is expected.
    pub matches: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecomposeReport {
    pub d: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub multiplicity: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub beta: BigRational,
    pub postulation: usize,
    pub rows: Vec<DecomposeRow>,
    pub tail_nonincreasing: bool,
    pub exact: bool,
    pub verdict: Verdict,
}

/// Residuals `r(k) = e_HK(I^k) - e(I) C(k+d-1, d) + β C(k+d-2, d-1)` for
/// `k = 1..=max_k`, which are `o(k^{d-1})`.
pub fn decompose_check<B: ColengthProvider>(
    backend: &B,
    ideal: &B::Ideal,
    max_k: u32,
    budget: &Budget,
) -> Result<DecomposeReport> {
    if max_k == 0 {
        return Err(HkError::ZeroPower);
    }
    let d = backend.dim();
    let du = d as u64;
    let multiplicity = ei_limit_sequence(backend, ideal, 0, budget.max_e, None, budget.k_max)?.extrapolated;
    let beta = beta_sequence(backend, ideal, budget.max_e, budget.k_max)?.extrapolated;
    let fit = hilbert_fit(backend, ideal, budget.k_max)?;
    let exact = backend.frobenius_is_flat();

    let ehk_powers: Vec<BigRational> =
        (1..=max_k).into_par_iter().map(|k| ehk_of_power(backend, ideal, k, budget.max_e)).collect::<Result<_>>()?;

    let rows: Vec<DecomposeRow> = (1..=max_k)
        .zip(ehk_powers)
        .map(|(k, ehk_power)| {
            let ku = k as u64;
            let residual = &ehk_power - &multiplicity * ratio(binomial(ku + du - 1, du))
                + &beta * ratio(binomial(ku + du - 2, du - 1));
            let residual_over_kd1 = &residual / ratio(BigInt::from(k).pow(d as u32 - 1));
            let expected_tail = exact.then(|| ratio(fit.tail_from_second(ku)));
            let matches = match &expected_tail {
                Some(t) if k as usize >= fit.postulation => Some(*t == residual),
                _ => None,
            };
            DecomposeRow { k, ehk_power, residual, residual_over_kd1, expected_tail, matches }
        })
        .collect();

    let tail: Vec<BigRational> =
        rows.iter().filter(|r| r.k as usize >= fit.postulation).map(|r| r.residual_over_kd1.abs()).collect();
    let tail_nonincreasing = tail.windows(2).all(|w| w[1] <= w[0]);
    let verdict = if exact {
        if rows.iter().all(|r| r.matches != Some(false)) {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    } else if tail_nonincreasing {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    Ok(DecomposeReport {
        d,
        multiplicity,
        beta,
        postulation: fit.postulation,
        rows,
        tail_nonincreasing,
        exact,
        verdict,
    })
}

/// Decay of a sequence bounded by `C/q`: the fitted `C = max_e |a_e|·q` and
/// whether `|a_e|` is nonincreasing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecayFit {
    #[serde(serialize_with = "ser_ratio")]
    pub constant: BigRational,
    pub nonincreasing: bool,
}

impl DecayFit {
    pub fn of(estimate: &LimitEstimate) -> Self {
        let constant =
            estimate.terms.iter().map(|t| t.value.abs() * ratio(t.q)).max().unwrap_or_else(BigRational::zero);
        let nonincreasing = estimate.terms.windows(2).all(|w| w[1].value.abs() <= w[0].value.abs());
        DecayFit { constant, nonincreasing }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdditivityRow {
    pub e: u32,
    pub q: u64,
    #[serde(serialize_with = "crate::exact::ser_bigint")]
    pub e1_left: BigInt,
    #[serde(serialize_with = "crate::exact::ser_bigint")]
    pub e1_right: BigInt,
    #[serde(serialize_with = "crate::exact::ser_bigint")]
    pub e1_sum_module: BigInt,
    pub exact_sum: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdditivityReport {
    pub dim_left: usize,
    pub dim_right: usize,
    pub rows: Vec<AdditivityRow>,
    pub left: LimitEstimate,
    pub right: LimitEstimate,
    pub sum_module: LimitEstimate,
    /// Decay of each summand of dimension below `d`.
    pub left_vanishing: Option<DecayFit>,
    pub right_vanishing: Option<DecayFit>,
    pub verdict: Verdict,
}

/// `e_1(I^[q], L ⊕ N) = e_1(I^[q], L) + e_1(I^[q], N)` at every sampled `q`,
/// with the Hilbert function of the split module `L ⊕ N` summed sample-wise
/// and fitted independently.
pub fn additivity_check<B: ColengthProvider>(
    backend: &B,
    ideal: &B::Ideal,
    left: &B::Module,
    right: &B::Module,
    budget: &Budget,
) -> Result<AdditivityReport> {
    let d = backend.dim();
    let per_q: Vec<(u32, u64, [HilbertCoefficients; 3])> = (1..=budget.max_e)
        .into_par_iter()
        .map(|e| {
            let q = q_power(backend.characteristic(), e)?;
            let wrap = |source| HkError::AtFrobeniusPower { q, source: Box::new(source) };
            let bracket = backend.bracket_power(ideal, q).map_err(wrap)?;
            let l = HilbertSampler::new(backend, bracket.clone(), left.clone())
                .samples(budget.k_max)
                .map(<[BigUint]>::to_vec)
                .map_err(wrap)?;
            let n = HilbertSampler::new(backend, bracket, right.clone())
                .samples(budget.k_max)
                .map(<[BigUint]>::to_vec)
                .map_err(wrap)?;
            let m: Vec<BigUint> = l.iter().zip(&n).map(|(a, b)| a + b).collect();
            let fits = [fit_from_samples(d, &l), fit_from_samples(d, &n), fit_from_samples(d, &m)];
            let [fl, fr, fm] = fits;
            Ok((e, q, [fl.map_err(wrap)?, fr.map_err(wrap)?, fm.map_err(wrap)?]))
        })
        .collect::<Result<_>>()?;
    if per_q.is_empty() {
        return Err(HkError::BudgetTooSmall("at least one Frobenius exponent is required".into()));
    }

    let seq = |which: usize| {
        LimitEstimate::from_terms(
            per_q
                .iter()
                .map(|(e, q, fits)| LimitTerm { e: *e, q: *q, value: ratio(fits[which].e[1].clone()) / q_to_d(*q, d) })
                .collect(),
        )
    };
    let rows: Vec<AdditivityRow> = per_q
        .iter()
        .map(|(e, q, [l, r, m])| AdditivityRow {
            e: *e,
            q: *q,
            e1_left: l.e[1].clone(),
            e1_right: r.e[1].clone(),
            e1_sum_module: m.e[1].clone(),
            exact_sum: m.e[1] == &l.e[1] + &r.e[1],
        })
        .collect();
    let (left_seq, right_seq, sum_seq) = (seq(0)?, seq(1)?, seq(2)?);
    let dim_left = backend.module_dim(left);
    let dim_right = backend.module_dim(right);
    let left_vanishing = (dim_left < d).then(|| DecayFit::of(&left_seq));
    let right_vanishing = (dim_right < d).then(|| DecayFit::of(&right_seq));
    let decays = [&left_vanishing, &right_vanishing].into_iter().flatten().all(|f| f.nonincreasing);
    let verdict = if rows.iter().all(|r| r.exact_sum) && decays { Verdict::Holds } else { Verdict::Fails };
    Ok(AdditivityReport {
        dim_left,
        dim_right,
        rows,
        left: left_seq,
        right: right_seq,
        sum_module: sum_seq,
        left_vanishing,
        right_vanishing,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniformRow {
    pub e: u32,
    pub q: u64,
    pub k: u32,
    #[serde(serialize_with = "ser_ratio")]
    pub normalized: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub limit: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub deviation: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniformReport {
    pub rows: Vec<UniformRow>,
    /// `D(e) = max_k |ℓ(R/(I^[q])^k)/(q^d k^{d-1}) - e_HK(I^k)/k^{d-1}|`.
    #[serde(serialize_with = "crate::exact::ser_ratio_vec")]
    pub max_deviation: Vec<BigRational>,
    /// Fitted `C` with `D(e) ≤ C/q`.
    #[serde(serialize_with = "ser_ratio")]
    pub constant: BigRational,
    pub nonincreasing: bool,
    pub verdict: Verdict,
}

/// Uniform-in-`k` convergence of `ℓ(R/(I^[q])^k)/(q^d k^{d-1})` to
/// `e_HK(I^k)/k^{d-1}` over `q = p^e`, `e = 1..=max_e`, `k = 1..=max_k`.
pub fn uniform_convergence_diagnostic<B: ColengthProvider>(
    backend: &B,
    ideal: &B::Ideal,
    max_k: u32,
    budget: &Budget,
) -> Result<UniformReport> {
    if max_k == 0 {
        return Err(HkError::ZeroPower);
    }
    if budget.max_e == 0 {
        return Err(HkError::BudgetTooSmall("at least one Frobenius exponent is required".into()));
    }
    let d = backend.dim();
    let kd1 = |k: u32| ratio(BigInt::from(k).pow(d as u32 - 1));
    let limits: Vec<BigRational> = (1..=max_k)
        .into_par_iter()
        .map(|k| Ok(ehk_of_power(backend, ideal, k, budget.max_e)? / kd1(k)))
        .collect::<Result<_>>()?;

    let per_e: Vec<Vec<UniformRow>> = (1..=budget.max_e)
        .into_par_iter()
        .map(|e| {
            let q = q_power(backend.characteristic(), e)?;
            let bracket = backend.bracket_power(ideal, q)?;
            let samples =
                HilbertSampler::new(backend, bracket, backend.free_module()).samples(max_k as usize)?.to_vec();
            Ok(samples
                .into_iter()
                .zip(1..=max_k)
                .map(|(len, k)| {
                    let normalized = ratio(len) / (q_to_d(q, d) * kd1(k));
                    let limit = limits[k as usize - 1].clone();
                    let deviation = (&normalized - &limit).abs();
                    UniformRow { e, q, k, normalized, limit, deviation }
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let max_deviation: Vec<BigRational> = per_e
        .iter()
        .map(|rows| rows.iter().map(|r| r.deviation.clone()).max().unwrap_or_else(BigRational::zero))
        .collect();
    let constant = per_e
        .iter()
        .zip(&max_deviation)
        .map(|(rows, dev)| dev * ratio(rows[0].q))
        .max()
        .unwrap_or_else(BigRational::zero);
    let nonincreasing = max_deviation.windows(2).all(|w| w[1] <= w[0]);
    let verdict = if backend.frobenius_is_flat() {
        if max_deviation.iter().all(Zero::is_zero) {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    } else if nonincreasing {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    Ok(UniformReport { rows: per_e.into_iter().flatten().collect(), max_deviation, constant, nonincreasing, verdict })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    pub e: u32,
    pub q: u64,
    pub k: u32,
    #[serde(serialize_with = "ser_biguint")]
    pub length: BigUint,
    #[serde(serialize_with = "ser_ratio")]
    pub bound: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub mu: usize,
    pub module_dim: usize,
    /// Integer `B` with `ℓ(M/I^n M) < B n^{dim M}` for all `n ≥ 1`.
    #[serde(serialize_with = "ser_ratio")]
    pub hs_constant: BigRational,
    /// `C = B μ^{dim M}`.
    #[serde(serialize_with = "ser_ratio")]
    pub constant: BigRational,
    pub rows: Vec<BoundRow>,
    pub verdict: Verdict,
}

/// Coefficients of `P(n)` in the monomial basis `1, n, ..., n^d`.
pub fn monomial_coefficients(h: &HilbertCoefficients) -> Vec<BigRational> {
    let d = h.d;
    let mut total = vec![BigRational::zero(); d + 1];
    for (i, e) in h.e.iter().enumerate() {
        // C(n + s, r) with s = d-1-i, r = d-i, expanded as Π_{t<r} (n + s - t) / r!.
        let r = d - i;
        let s = d as i64 - 1 - i as i64;
        let mut poly = vec![BigRational::one()];
        for t in 0..r as i64 {
            let shift = ratio(s - t);
            let mut next = vec![BigRational::zero(); poly.len() + 1];
            for (j, c) in poly.iter().enumerate() {
                next[j + 1] += c;
                next[j] += c * &shift;
            }
            poly = next;
        }
        let fact: BigInt = (1..=r as u64).map(BigInt::from).product();
        let sign = if i % 2 == 0 { ratio(1) } else { ratio(-1) };
        for (j, c) in poly.into_iter().enumerate() {
            total[j] += c * ratio(e.clone()) * &sign / ratio(fact.clone());
        }
    }
    total
}

/// Least integer strictly above `sup_{n≥1} ℓ(n)/n^{dim}` given samples
/// `ℓ(1..=k_max)` and the fitted polynomial valid from its postulation index.
fn hs_growth_constant(h: &HilbertCoefficients, samples: &[BigUint], dim: usize) -> Result<BigRational> {
    let coeffs = monomial_coefficients(h);
    if coeffs.iter().skip(dim + 1).any(|c| !c.is_zero()) {
        return Err(HkError::InvalidArgument(format!(
            "Hilbert polynomial has degree above the module dimension {dim}"
        )));
    }
    let n0 = ratio(h.postulation as u64);
    let mut sup = coeffs[dim].clone();
    for (j, c) in coeffs.iter().enumerate().take(dim) {
        if c.is_positive() {
            // n^{j-dim} is largest at the first n where the polynomial applies.
            sup += c / n0.pow((dim - j) as i32);
        }
    }
    for (idx, len) in samples.iter().enumerate().take(h.postulation.saturating_sub(1)) {
        let n = (idx + 1) as u64;
        sup = sup.max(ratio(len.clone()) / ratio(BigInt::from(n).pow(dim as u32)));
    }
    Ok(ratio(sup.floor().to_integer() + 1))
}

/// Checks `ℓ(M/(I^[q])^k M) < B μ^{dim M} (qk)^{dim M}` over `q = p^e`,
/// `e = 0..=max_e`, `k = 1..=max_k`, with `B` taken from the Hilbert–Samuel
/// function of `M` with respect to `I`. A violation is an error.
pub fn bound_diagnostic<B: ColengthProvider>(
    backend: &B,
    ideal: &B::Ideal,
    module: &B::Module,
    max_k: u32,
    budget: &Budget,
) -> Result<BoundReport> {
    bound_diagnostic_with(backend, ideal, module, max_k, budget, |len| len)
}

/// [`bound_diagnostic`] with every grid length passed through `tamper` first,
/// so that the failure path can be exercised.
pub fn bound_diagnostic_with<B, F>(
    backend: &B,
    ideal: &B::Ideal,
    module: &B::Module,
    max_k: u32,
    budget: &Budget,
    tamper: F,
) -> Result<BoundReport>
where
    B: ColengthProvider,
    F: Fn(BigUint) -> BigUint + Sync,
{
    if max_k == 0 {
        return Err(HkError::ZeroPower);
    }
    let mu = backend.generator_count(ideal);
    let dim = backend.module_dim(module);
    let mut sampler = HilbertSampler::new(backend, ideal.clone(), module.clone());
    let fit = sampler.fit(budget.k_max)?;
    let hs_constant = hs_growth_constant(&fit, sampler.samples(budget.k_max)?, dim)?;
    let constant = &hs_constant * ratio(BigInt::from(mu).pow(dim as u32));

    let per_e: Vec<Vec<BoundRow>> = (0..=budget.max_e)
        .into_par_iter()
        .map(|e| {
            let q = q_power(backend.characteristic(), e)?;
            let bracket = backend.bracket_power(ideal, q)?;
            let samples = HilbertSampler::new(backend, bracket, module.clone()).samples(max_k as usize)?.to_vec();
            samples
                .into_iter()
                .zip(1..=max_k)
                .map(|(len, k)| {
                    let length = tamper(len);
                    let bound = &constant * ratio(BigInt::from(q * k as u64).pow(dim as u32));
                    if ratio(length.clone()) >= bound {
                        return Err(HkError::BoundViolation {
                            q,
                            k: k as u64,
                            length: length.to_string(),
                            bound: crate::exact::render_ratio(&bound),
                        });
                    }
                    Ok(BoundRow { e, q, k, length, bound })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(BoundReport {
        mu,
        module_dim: dim,
        hs_constant,
        constant,
        rows: per_e.into_iter().flatten().collect(),
        verdict: Verdict::Holds,
    })
}

/// `(e(R) - 1) e(I)`, the limit form of Elias's upper bound. Reported only;
/// nothing is asserted about it.
pub fn elias_quantity<B: ColengthProvider>(
    backend: &B,
    maximal: &B::Ideal,
    ideal: &B::Ideal,
    k_max: usize,
) -> Result<BigInt> {
    let e_ring = hilbert_fit(backend, maximal, k_max)?.e[0].clone();
    let e_ideal = hilbert_fit(backend, ideal, k_max)?.e[0].clone();
    Ok((e_ring - 1) * e_ideal)
}

/// `true` if `value` is within `tol` of `target`.
pub fn within(value: &BigRational, target: &BigRational, tol: &BigRational) -> bool {
    (value - target).abs() <= *tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::length::RegularBackend;
    use crate::monomial::{ModuleSpec, MonomialIdeal, RegularRing};
    use crate::toric::{ToricBackend, ToricRing2, WholeRing};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn regular(p: u64) -> (RegularRing, RegularBackend) {
        let r = RegularRing::new(2, p).unwrap();
        (r, RegularBackend::new(r))
    }

    fn ideal(r: RegularRing, gens: &[[u32; 2]]) -> MonomialIdeal {
        MonomialIdeal::from_exponents(r, gens).unwrap()
    }

    #[test]
    fn richardson_extrapolation() {
        let terms = vec![LimitTerm { e: 1, q: 3, value: q(13, 9) }, LimitTerm { e: 2, q: 9, value: q(121, 81) }];
        let est = LimitEstimate::from_terms(terms).unwrap();
        // (9·121/81 - 3·13/9)/6
        assert_eq!(est.extrapolated, (q(9, 1) * q(121, 81) - q(3, 1) * q(13, 9)) / q(6, 1));
        let flat = LimitEstimate::from_terms(vec![
            LimitTerm { e: 1, q: 2, value: q(3, 2) },
            LimitTerm { e: 2, q: 4, value: q(3, 2) },
        ])
        .unwrap();
        assert_eq!(flat.extrapolated, q(3, 2));
        assert_eq!(flat.error_model.constant, q(0, 1));
        assert!(LimitEstimate::from_terms(vec![]).is_err());
        let unordered = vec![LimitTerm { e: 2, q: 4, value: q(1, 1) }, LimitTerm { e: 1, q: 2, value: q(1, 1) }];
        assert!(LimitEstimate::from_terms(unordered).is_err());
    }

    #[test]
    fn ehk_examples() {
        let (r, b) = regular(3);
        assert_eq!(ehk_exact(&b, &ideal(r, &[[2, 0], [1, 1], [0, 2]])).unwrap(), q(3, 1));
        assert_eq!(ehk_exact(&b, &r.maximal_ideal()).unwrap(), q(1, 1));
        assert_eq!(ehk_exact(&b, &ideal(r, &[[2, 0], [0, 3]])).unwrap(), q(6, 1));

        let seq = ehk_sequence(&b, &ideal(r, &[[2, 0], [1, 1], [0, 2]]), 3).unwrap();
        assert!(seq.values().all(|v| *v == q(3, 1)));
        assert_eq!(seq.extrapolated, q(3, 1));

        let a1 = ToricRing2::a1(2).unwrap();
        let tb = ToricBackend::new(a1);
        let single = ehk_sequence(&tb, &a1.maximal_ideal(), 1).unwrap();
        assert_eq!(single.terms[0].value, q(3, 2));
        assert_eq!(single.extrapolated, q(3, 2));
        assert!(matches!(ehk_exact(&tb, &a1.maximal_ideal()), Err(HkError::Unsupported(_))));
    }

    #[test]
    fn sequence_budget_error_reports_progress() {
        let a1 = ToricRing2::a1(2).unwrap();
        let tb = ToricBackend::new(a1).with_enumeration_cap(200);
        match ehk_sequence(&tb, &a1.maximal_ideal(), 6) {
            Err(HkError::SequenceBudget { failed_e, completed, .. }) => {
                assert_eq!(completed + 1, failed_e);
                assert!(failed_e >= 2);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn ei_limit_examples() {
        let (r, b) = regular(2);
        let m2 = ideal(r, &[[2, 0], [1, 1], [0, 2]]);
        let beta = beta_sequence(&b, &m2, 3, 9).unwrap();
        assert!(beta.values().all(|v| *v == q(1, 1)));
        let e0 = ei_limit_sequence(&b, &m2, 0, 3, None, 9).unwrap();
        assert!(e0.values().all(|v| *v == q(4, 1)));
        let ci = ideal(r, &[[3, 0], [0, 2]]);
        assert!(beta_sequence(&b, &ci, 2, 9).unwrap().values().all(Zero::is_zero));
        assert!(matches!(ei_limit_sequence(&b, &m2, 3, 2, None, 9), Err(HkError::InvalidArgument(_))));
        assert!(matches!(beta_sequence(&b, &m2, 2, 5), Err(HkError::SequenceBudget { failed_e: 1, completed: 0, .. })));
    }

    #[test]
    fn wy_examples() {
        let (r, b) = regular(3);
        let budget = Budget::default();
        let ci = wy_check(&b, &ideal(r, &[[2, 0], [0, 3]]), 3, &budget).unwrap();
        assert_eq!((ci.lhs.clone(), ci.rhs.clone(), ci.verdict), (q(36, 1), q(36, 1), Verdict::Equality));
        let m = wy_check(&b, &r.maximal_ideal(), 2, &budget).unwrap();
        assert_eq!((m.lhs.clone(), m.rhs.clone(), m.verdict), (q(3, 1), q(3, 1), Verdict::Equality));
        let other = wy_check(&b, &ideal(r, &[[3, 0], [1, 1], [0, 2]]), 2, &budget).unwrap();
        assert!(other.verdict.holds());
        assert!(!other.numerical);
    }

    #[test]
    fn northcott_examples() {
        let (r, b) = regular(3);
        let budget = Budget::default();
        let m2 = northcott_check(&b, &ideal(r, &[[2, 0], [1, 1], [0, 2]]), &budget).unwrap();
        assert_eq!((m2.lhs.clone(), m2.rhs.clone(), m2.verdict), (q(1, 1), q(1, 1), Verdict::Equality));
        let ci = northcott_check(&b, &ideal(r, &[[4, 0], [0, 3]]), &budget).unwrap();
        assert_eq!((ci.lhs.clone(), ci.rhs.clone(), ci.verdict), (q(0, 1), q(0, 1), Verdict::Equality));

        let a1 = ToricRing2::a1(2).unwrap();
        let tb = ToricBackend::new(a1);
        let toric =
            northcott_check(&tb, &a1.maximal_ideal(), &Budget { max_e: 3, k_max: 8, ..Budget::default() }).unwrap();
        assert_eq!(toric.rhs, q(1, 2));
        assert!(toric.verdict.holds() && toric.numerical);
    }

    #[test]
    fn inequality_verdicts() {
        let tol = q(1, 100);
        let judge =
            |s: BigRational, t: Option<&BigRational>| InequalityReport::judge("x", q(0, 1), q(0, 1), s, t).verdict;
        assert_eq!(judge(q(0, 1), None), Verdict::Equality);
        assert_eq!(judge(q(1, 1000), None), Verdict::Holds);
        assert_eq!(judge(q(-1, 1000), None), Verdict::Fails);
        assert_eq!(judge(q(-1, 1000), Some(&tol)), Verdict::Equality);
        assert_eq!(judge(q(1, 10), Some(&tol)), Verdict::Holds);
        assert_eq!(judge(q(-1, 10), Some(&tol)), Verdict::Fails);
    }

    #[test]
    fn decompose_examples() {
        let (r, b) = regular(2);
        let budget = Budget::default();
        for gens in [&[[2, 0], [1, 1], [0, 2]][..], &[[2, 0], [0, 3]], &[[1, 0], [0, 1]]] {
            let rep = decompose_check(&b, &ideal(r, gens), 6, &budget).unwrap();
            assert_eq!(rep.verdict, Verdict::Holds);
            assert!(rep.rows.iter().all(|row| row.residual.is_zero()));
        }
    }

    #[test]
    fn additivity_examples() {
        let (r, b) = regular(2);
        let budget = Budget { max_e: 2, k_max: 8, ..Budget::default() };
        let m2 = ideal(r, &[[2, 0], [1, 1], [0, 2]]);
        let free = ModuleSpec::free(r);
        let rep = additivity_check(&b, &m2, &free, &free, &budget).unwrap();
        assert_eq!(rep.rows[0].e1_sum_module, BigInt::from(8));
        assert_eq!(rep.verdict, Verdict::Holds);

        let x = ModuleSpec::quotient(ideal(r, &[[1, 0]]));
        let y = ModuleSpec::quotient(ideal(r, &[[0, 1]]));
        let rep = additivity_check(&b, &r.maximal_ideal(), &x, &y, &Budget { max_e: 3, ..budget }).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        let decay = rep.left_vanishing.unwrap();
        assert!(decay.nonincreasing);
        // e_1(m^[q], R/(x)) = -q, so e_1/q^2 = -1/q.
        assert_eq!(rep.left.terms[2].value, q(-1, 8));
        assert_eq!(decay.constant, q(1, 1));
    }

    #[test]
    fn uniform_examples() {
        let (r, b) = regular(3);
        let budget = Budget { max_e: 2, ..Budget::default() };
        let rep = uniform_convergence_diagnostic(&b, &ideal(r, &[[3, 0], [1, 1], [0, 2]]), 3, &budget).unwrap();
        assert!(rep.max_deviation.iter().all(Zero::is_zero));
        assert_eq!(rep.verdict, Verdict::Holds);

        // K = 1 reduces to |ℓ(R/I^[q])/q^d - e_HK(I)|.
        let a1 = ToricRing2::a1(3).unwrap();
        let tb = ToricBackend::new(a1);
        let rep = uniform_convergence_diagnostic(&tb, &a1.maximal_ideal(), 1, &budget).unwrap();
        let seq = ehk_sequence(&tb, &a1.maximal_ideal(), 2).unwrap();
        for (dev, term) in rep.max_deviation.iter().zip(&seq.terms) {
            assert_eq!(*dev, (&term.value - &seq.extrapolated).abs());
        }
    }

    #[test]
    fn bound_examples() {
        let (r, b) = regular(2);
        let budget = Budget { max_e: 3, ..Budget::default() };
        let m = r.maximal_ideal();
        let rep = bound_diagnostic(&b, &m, &ModuleSpec::free(r), 4, &budget).unwrap();
        assert!(rep.hs_constant >= q(1, 1));
        assert_eq!(rep.verdict, Verdict::Holds);
        // k = q = 1: ℓ(M/IM) < C.
        let first = &rep.rows[0];
        assert_eq!((first.q, first.k), (1, 1));
        assert!(ratio(first.length.clone()) < rep.constant);

        let x = ModuleSpec::quotient(ideal(r, &[[1, 0]]));
        let rep = bound_diagnostic(&b, &m, &x, 4, &budget).unwrap();
        assert_eq!(rep.module_dim, 1);

        let broken = bound_diagnostic_with(&b, &m, &ModuleSpec::free(r), 2, &budget, |l| l * 1000u32);
        assert!(matches!(broken, Err(HkError::BoundViolation { .. })));
    }

    #[test]
    fn monomial_basis_conversion() {
        // 4 C(n+1, 2) - n = 2n^2 + n.
        let h =
            HilbertCoefficients { d: 2, e: vec![4.into(), 1.into(), 0.into()], postulation: 1, verified_through: 9 };
        assert_eq!(monomial_coefficients(&h), vec![q(0, 1), q(1, 1), q(2, 1)]);
    }

    #[test]
    fn whole_ring_module_on_toric() {
        let a1 = ToricRing2::a1(2).unwrap();
        let tb = ToricBackend::new(a1);
        let rep = additivity_check(
            &tb,
            &a1.maximal_ideal(),
            &WholeRing,
            &WholeRing,
            &Budget { max_e: 2, k_max: 8, ..Budget::default() },
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
    }
}
