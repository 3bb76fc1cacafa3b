//! Exact colengths `ℓ(R/J)` of m-primary monomial ideals.
//!
//! Two independent counters are provided: an inclusion–exclusion sum over
//! generator subsets (the oracle) and a corner-splitting recursion (the hot
//! path). [`colength`] runs the latter and, in cross-check mode, both.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{HkError, Result};
use crate::monomial::{minimalize_unchecked, ExponentVec, ModuleSpec, MonomialIdeal, RegularRing};

/// Largest generator count accepted by the inclusion–exclusion oracle.
pub const IE_GENERATOR_CAP: usize = 20;

/// A ring backend able to count colengths of its m-primary ideals and to do
/// the ideal arithmetic the invariants need.
pub trait ColengthProvider: Sync {
    type Ideal: Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync;
    type Module: Clone + fmt::Debug + Send + Sync;

    fn dim(&self) -> usize;
    fn characteristic(&self) -> u64;

    /// True when Frobenius is flat, so that `e_HK(I) = ℓ(R/I)` exactly.
    fn frobenius_is_flat(&self) -> bool;

    /// Minimal number of generators `μ(I)`.
    fn generator_count(&self, ideal: &Self::Ideal) -> usize;

    fn free_module(&self) -> Self::Module;
    fn module_dim(&self, module: &Self::Module) -> usize;

    fn colength(&self, ideal: &Self::Ideal) -> Result<BigUint>;
    /// `ℓ(M/IM)`.
    fn module_colength(&self, ideal: &Self::Ideal, module: &Self::Module) -> Result<BigUint>;

    fn multiply(&self, a: &Self::Ideal, b: &Self::Ideal) -> Result<Self::Ideal>;
    fn power(&self, ideal: &Self::Ideal, k: u32) -> Result<Self::Ideal>;
    fn bracket_power(&self, ideal: &Self::Ideal, q: u64) -> Result<Self::Ideal>;
}

fn require_m_primary(j: &MonomialIdeal) -> Result<()> {
    match j.missing_direction() {
        Some(direction) => Err(HkError::NotMPrimary { direction }),
        None => Ok(()),
    }
}

/// Inclusion–exclusion over subsets `T` of generators:
/// `Σ_T (-1)^|T| Π_i max(0, b_i - max_{g∈T} g_i)`.
pub fn colength_ie(j: &MonomialIdeal) -> Result<BigUint> {
    require_m_primary(j)?;
    if j.mu() > IE_GENERATOR_CAP {
        return Err(HkError::TooManyGenerators { count: j.mu(), cap: IE_GENERATOR_CAP });
    }
    let b: Vec<u32> = j.pure_powers().into_iter().map(|b| b.expect("m-primary")).collect();
    let gens: Vec<&[u32]> = j.gens().iter().map(ExponentVec::coords).collect();
    let mut lcm = vec![0u32; b.len()];
    let mut total = BigInt::zero();
    ie_subsets(&gens, 0, &mut lcm, true, &b, &mut total);
    total.to_biguint().ok_or_else(|| HkError::CrossCheckMismatch { ie: total.to_string(), dc: "?".into() })
}

fn ie_subsets(gens: &[&[u32]], from: usize, lcm: &mut [u32], even: bool, b: &[u32], acc: &mut BigInt) {
    let mut term = BigUint::one();
    for (bi, li) in b.iter().zip(lcm.iter()) {
        if li >= bi {
            // Every superset has an lcm at least this large.
            return;
        }
        term *= bi - li;
    }
    if even {
        *acc += BigInt::from(term);
    } else {
        *acc -= BigInt::from(term);
    }
    for next in from..gens.len() {
        let saved = lcm.to_vec();
        for (l, g) in lcm.iter_mut().zip(gens[next]) {
            *l = (*l).max(*g);
        }
        ie_subsets(gens, next + 1, lcm, !even, b, acc);
        lcm.copy_from_slice(&saved);
    }
}

/// Corner-splitting count: `ℓ(R/J) = ℓ(R/(J + x_i^a)) + ℓ(R/(J : x_i^a))`,
/// memoized on the canonical generator list of each subproblem.
pub fn colength_dc(j: &MonomialIdeal) -> Result<BigUint> {
    require_m_primary(j)?;
    let mut memo = HashMap::new();
    Ok(count_split(j.gens().to_vec(), &mut memo))
}

fn count_split(gens: Vec<ExponentVec>, memo: &mut HashMap<Vec<ExponentVec>, BigUint>) -> BigUint {
    let d = gens[0].dim();
    if gens.iter().any(ExponentVec::is_zero) {
        return BigUint::zero();
    }
    if d == 1 {
        return BigUint::from(gens.iter().map(|g| g.coords()[0]).min().unwrap_or(0));
    }
    if d == 2 {
        return staircase_2d(&gens);
    }

    let mut pure = vec![0u32; d];
    let mut mixed: Vec<&ExponentVec> = Vec::new();
    for g in &gens {
        match g.as_pure_power() {
            Some((i, b)) => pure[i] = b,
            None => mixed.push(g),
        }
    }
    let used: Vec<bool> = (0..d).map(|i| mixed.iter().any(|g| g.coords()[i] > 0)).collect();
    if used.iter().any(|u| !u) {
        // Variables seen only in their pure power split off as a box factor.
        let mut factor = BigUint::one();
        for i in (0..d).filter(|&i| !used[i]) {
            factor *= pure[i];
        }
        if mixed.is_empty() {
            return factor;
        }
        let projected: Vec<ExponentVec> = gens
            .iter()
            .filter(|g| g.coords().iter().enumerate().any(|(i, &c)| c > 0 && used[i]))
            .map(|g| ExponentVec::new((0..d).filter(|&i| used[i]).map(|i| g.coords()[i]).collect()))
            .collect();
        return factor * count_split(minimalize_unchecked(projected), memo);
    }

    if let Some(hit) = memo.get(&gens) {
        return hit.clone();
    }

    let (var, pivot) = choose_pivot(&mixed, d);
    let below: Vec<ExponentVec> = gens
        .iter()
        .filter(|g| g.coords()[var] < pivot)
        .cloned()
        .chain(std::iter::once(ExponentVec::pure_power(d, var, pivot)))
        .collect();
    let above: Vec<ExponentVec> = gens
        .iter()
        .map(|g| {
            let mut c = g.coords().to_vec();
            c[var] = c[var].saturating_sub(pivot);
            ExponentVec::new(c)
        })
        .collect();
    let total = count_split(minimalize_unchecked(below), memo) + count_split(minimalize_unchecked(above), memo);
    memo.insert(gens, total.clone());
    total
}

/// The variable with the most distinct positive exponents among mixed
/// generators, split at the median of those exponents.
fn choose_pivot(mixed: &[&ExponentVec], d: usize) -> (usize, u32) {
    let mut best: Option<(usize, Vec<u32>)> = None;
    for i in 0..d {
        let mut vals: Vec<u32> = mixed.iter().map(|g| g.coords()[i]).filter(|&c| c > 0).collect();
        vals.sort_unstable();
        vals.dedup();
        if best.as_ref().is_none_or(|(_, b)| vals.len() > b.len()) {
            best = Some((i, vals));
        }
    }
    let (var, vals) = best.expect("d >= 1");
    (var, vals[vals.len() / 2])
}

/// Staircase area for a minimal m-primary generating set in two variables.
fn staircase_2d(gens: &[ExponentVec]) -> BigUint {
    // Sorted lexicographically: x ascending, so y strictly descending.
    let mut total = BigUint::zero();
    for pair in gens.windows(2) {
        let (x0, y0) = (pair[0].coords()[0], pair[0].coords()[1]);
        let x1 = pair[1].coords()[0];
        total += BigUint::from(x1 - x0) * BigUint::from(y0);
    }
    total
}

/// Colength via corner splitting; with `cross_check` the inclusion–exclusion
/// oracle also runs (when under its generator cap) and any disagreement is an
/// error.
pub fn colength(j: &MonomialIdeal, cross_check: bool) -> Result<BigUint> {
    let dc = colength_dc(j)?;
    if cross_check && j.mu() <= IE_GENERATOR_CAP {
        let ie = colength_ie(j)?;
        agree(ie, dc)
    } else {
        Ok(dc)
    }
}

pub(crate) fn agree(ie: BigUint, dc: BigUint) -> Result<BigUint> {
    if ie != dc {
        return Err(HkError::CrossCheckMismatch { ie: ie.to_string(), dc: dc.to_string() });
    }
    Ok(dc)
}

/// `ℓ(M/JM) = ℓ(R/(J + A))` for `M = R/A`.
pub fn module_colength(j: &MonomialIdeal, module: &ModuleSpec, cross_check: bool) -> Result<BigUint> {
    if j.ring() != module.ring() {
        return Err(HkError::RingMismatch);
    }
    match module.annihilator() {
        None => colength(j, cross_check),
        Some(a) => colength(&j.sum(a)?, cross_check),
    }
}

/// The polynomial-ring backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegularBackend {
    pub ring: RegularRing,
    pub cross_check: bool,
}

impl RegularBackend {
    pub fn new(ring: RegularRing) -> Self {
        RegularBackend { ring, cross_check: false }
    }

    pub fn with_cross_check(mut self, on: bool) -> Self {
        self.cross_check = on;
        self
    }

    fn check_ring(&self, ideal: &MonomialIdeal) -> Result<()> {
        if ideal.ring() != self.ring {
            return Err(HkError::RingMismatch);
        }
        Ok(())
    }
}

impl ColengthProvider for RegularBackend {
    type Ideal = MonomialIdeal;
    type Module = ModuleSpec;

    fn dim(&self) -> usize {
        self.ring.dim()
    }

    fn characteristic(&self) -> u64 {
        self.ring.characteristic()
    }

    fn frobenius_is_flat(&self) -> bool {
        true
    }

    fn generator_count(&self, ideal: &MonomialIdeal) -> usize {
        ideal.mu()
    }

    fn free_module(&self) -> ModuleSpec {
        ModuleSpec::free(self.ring)
    }

    fn module_dim(&self, module: &ModuleSpec) -> usize {
        module.dim()
    }

    fn colength(&self, ideal: &MonomialIdeal) -> Result<BigUint> {
        self.check_ring(ideal)?;
        colength(ideal, self.cross_check)
    }

    fn module_colength(&self, ideal: &MonomialIdeal, module: &ModuleSpec) -> Result<BigUint> {
        self.check_ring(ideal)?;
        module_colength(ideal, module, self.cross_check)
    }

    fn multiply(&self, a: &MonomialIdeal, b: &MonomialIdeal) -> Result<MonomialIdeal> {
        self.check_ring(a)?;
        a.multiply(b)
    }

    fn power(&self, ideal: &MonomialIdeal, k: u32) -> Result<MonomialIdeal> {
        self.check_ring(ideal)?;
        ideal.power(k)
    }

    fn bracket_power(&self, ideal: &MonomialIdeal, q: u64) -> Result<MonomialIdeal> {
        self.check_ring(ideal)?;
        ideal.bracket_power(q)
    }
}
