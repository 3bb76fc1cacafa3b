//! Monomial ideals in a polynomial ring `F_p[x_1, ..., x_d]`.
//!
//! Ideals are stored by their minimal generating set of exponent vectors,
//! sorted lexicographically so that structural equality is ideal equality.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{HkError, Result};

/// Exponent vector of a monomial `x^v`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVec(Vec<u32>);

impl ExponentVec {
    pub fn new(coords: Vec<u32>) -> Self {
        ExponentVec(coords)
    }

    pub fn zero(d: usize) -> Self {
        ExponentVec(vec![0; d])
    }

    /// `b * e_i`.
    pub fn pure_power(d: usize, i: usize, b: u32) -> Self {
        let mut v = vec![0; d];
        v[i] = b;
        ExponentVec(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    /// `x^self` divides `x^other`.
    pub fn divides(&self, other: &ExponentVec) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// If this is a pure power `x_i^b` with `b > 0`, returns `(i, b)`.
    pub fn as_pure_power(&self) -> Option<(usize, u32)> {
        let mut found = None;
        for (i, &c) in self.0.iter().enumerate() {
            if c > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some((i, c));
            }
        }
        found
    }

    pub fn checked_add(&self, other: &ExponentVec) -> Result<ExponentVec> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(HkError::Overflow("exponent sum")))
            .collect::<Result<Vec<_>>>()
            .map(ExponentVec)
    }

    pub fn checked_scale(&self, q: u64) -> Result<ExponentVec> {
        let q = u32::try_from(q).map_err(|_| HkError::Overflow("bracket exponent"))?;
        self.0
            .iter()
            .map(|a| a.checked_mul(q).ok_or(HkError::Overflow("bracket exponent")))
            .collect::<Result<Vec<_>>>()
            .map(ExponentVec)
    }
}

impl From<Vec<u32>> for ExponentVec {
    fn from(v: Vec<u32>) -> Self {
        ExponentVec(v)
    }
}

impl fmt::Display for ExponentVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Polynomial ring of Krull dimension `d` over a field of characteristic `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RegularRing {
    d: usize,
    p: u64,
}

impl RegularRing {
    pub fn new(d: usize, p: u64) -> Result<Self> {
        if d == 0 {
            return Err(HkError::InvalidRing("dimension must be at least 1".into()));
        }
        if !is_prime(p) {
            return Err(HkError::InvalidRing(format!("characteristic {p} is not prime")));
        }
        Ok(RegularRing { d, p })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// The homogeneous maximal ideal `(x_1, ..., x_d)`.
    pub fn maximal_ideal(&self) -> MonomialIdeal {
        let gens = (0..self.d).map(|i| ExponentVec::pure_power(self.d, i, 1)).collect();
        MonomialIdeal::from_minimal(*self, minimalize_unchecked(gens))
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= p {
        if p.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

/// Returns `e` with `q = p^e`, or an error when `q` is not a power of `p`.
pub fn frobenius_exponent(q: u64, p: u64) -> Result<u32> {
    let mut e = 0;
    let mut r = q;
    if r == 0 {
        return Err(HkError::NotPowerOfCharacteristic { q, p });
    }
    while r > 1 {
        if !r.is_multiple_of(p) {
            return Err(HkError::NotPowerOfCharacteristic { q, p });
        }
        r /= p;
        e += 1;
    }
    Ok(e)
}

/// Antichain of componentwise-minimal vectors, deduplicated and sorted
/// lexicographically.
pub fn minimalize(gens: Vec<ExponentVec>) -> Result<Vec<ExponentVec>> {
    if let Some(first) = gens.first() {
        let d = first.dim();
        if let Some(bad) = gens.iter().find(|g| g.dim() != d) {
            return Err(HkError::DimensionMismatch { expected: d, found: bad.dim() });
        }
    }
    Ok(minimalize_unchecked(gens))
}

pub(crate) fn minimalize_unchecked(mut gens: Vec<ExponentVec>) -> Vec<ExponentVec> {
    // A divisor has degree <= its multiple, so scanning by degree only needs
    // to compare against already kept elements.
    gens.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
    gens.dedup();
    let mut kept: Vec<ExponentVec> = Vec::with_capacity(gens.len());
    for g in gens {
        if !kept.iter().any(|k| k.divides(&g)) {
            kept.push(g);
        }
    }
    kept.sort();
    kept
}

/// A proper, nonzero monomial ideal given by its minimal generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialIdeal {
    ring: RegularRing,
    gens: Vec<ExponentVec>,
}

impl MonomialIdeal {
    pub fn new(ring: RegularRing, gens: Vec<ExponentVec>) -> Result<Self> {
        if gens.is_empty() {
            return Err(HkError::InvalidIdeal("the zero ideal is not representable".into()));
        }
        if let Some(bad) = gens.iter().find(|g| g.dim() != ring.dim()) {
            return Err(HkError::DimensionMismatch { expected: ring.dim(), found: bad.dim() });
        }
        if gens.iter().any(ExponentVec::is_zero) {
            return Err(HkError::InvalidIdeal("the unit ideal is not representable".into()));
        }
        Ok(MonomialIdeal { ring, gens: minimalize_unchecked(gens) })
    }

    /// Convenience constructor from raw exponent lists.
    pub fn from_exponents<V: AsRef<[u32]>>(ring: RegularRing, gens: &[V]) -> Result<Self> {
        Self::new(ring, gens.iter().map(|g| ExponentVec::new(g.as_ref().to_vec())).collect())
    }

    pub(crate) fn from_minimal(ring: RegularRing, gens: Vec<ExponentVec>) -> Self {
        debug_assert!(!gens.is_empty());
        MonomialIdeal { ring, gens }
    }

    pub fn ring(&self) -> RegularRing {
        self.ring
    }

    pub fn gens(&self) -> &[ExponentVec] {
        &self.gens
    }

    /// Number of minimal generators.
    pub fn mu(&self) -> usize {
        self.gens.len()
    }

    fn same_ring(&self, other: &MonomialIdeal) -> Result<()> {
        if self.ring != other.ring {
            return Err(HkError::RingMismatch);
        }
        Ok(())
    }

    pub fn multiply(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        self.same_ring(other)?;
        let mut prods = Vec::with_capacity(self.gens.len() * other.gens.len());
        for a in &self.gens {
            for b in &other.gens {
                prods.push(a.checked_add(b)?);
            }
        }
        Ok(MonomialIdeal::from_minimal(self.ring, minimalize_unchecked(prods)))
    }

    /// `I^k` by repeated multiplication, minimalizing after every step.
    pub fn power(&self, k: u32) -> Result<MonomialIdeal> {
        if k == 0 {
            return Err(HkError::ZeroPower);
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// Frobenius bracket power `I^[q]`; `q` must be a power of the characteristic.
    pub fn bracket_power(&self, q: u64) -> Result<MonomialIdeal> {
        frobenius_exponent(q, self.ring.p)?;
        self.scale(q)
    }

    /// Scales every generator by `q` without the characteristic check.
    pub(crate) fn scale(&self, q: u64) -> Result<MonomialIdeal> {
        let gens = self.gens.iter().map(|g| g.checked_scale(q)).collect::<Result<Vec<_>>>()?;
        // Scaling preserves the antichain and the lexicographic order.
        Ok(MonomialIdeal::from_minimal(self.ring, gens))
    }

    /// `self ⊇ other`: every generator of `other` is divisible by a generator of `self`.
    pub fn contains(&self, other: &MonomialIdeal) -> Result<bool> {
        self.same_ring(other)?;
        Ok(other.gens.iter().all(|g| self.contains_monomial(g)))
    }

    pub fn contains_monomial(&self, v: &ExponentVec) -> bool {
        self.gens.iter().any(|g| g.divides(v))
    }

    pub fn sum(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        self.same_ring(other)?;
        let gens = self.gens.iter().chain(&other.gens).cloned().collect();
        Ok(MonomialIdeal::from_minimal(self.ring, minimalize_unchecked(gens)))
    }

    /// Pure-power exponents `b_i` with `x_i^{b_i}` a generator, if present.
    pub fn pure_powers(&self) -> Vec<Option<u32>> {
        let mut b = vec![None; self.ring.d];
        for g in &self.gens {
            if let Some((i, e)) = g.as_pure_power() {
                b[i] = Some(b[i].map_or(e, |old: u32| old.min(e)));
            }
        }
        b
    }

    /// First coordinate direction lacking a pure power, if any.
    pub fn missing_direction(&self) -> Option<usize> {
        self.pure_powers().iter().position(Option::is_none)
    }

    pub fn is_m_primary(&self) -> bool {
        self.missing_direction().is_none()
    }

    /// Largest `n` with `I ⊆ m^n`.
    pub fn ord(&self) -> u64 {
        self.gens.iter().map(ExponentVec::degree).min().unwrap_or(0)
    }

    /// Height of the ideal: the fewest variables whose ideal contains `I`.
    pub fn codimension(&self) -> usize {
        let d = self.ring.d;
        let supports: Vec<u64> = self
            .gens
            .iter()
            .map(|g| g.coords().iter().enumerate().filter(|(_, &c)| c > 0).fold(0u64, |m, (i, _)| m | (1 << i)))
            .collect();
        (0u64..(1 << d))
            .filter(|&cover| supports.iter().all(|s| s & cover != 0))
            .map(|cover| cover.count_ones() as usize)
            .min()
            .unwrap_or(d)
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

/// Cyclic module `R/A`; `annihilator = None` is the free module `R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleSpec {
    ring: RegularRing,
    annihilator: Option<MonomialIdeal>,
}

impl ModuleSpec {
    pub fn free(ring: RegularRing) -> Self {
        ModuleSpec { ring, annihilator: None }
    }

    pub fn quotient(annihilator: MonomialIdeal) -> Self {
        ModuleSpec { ring: annihilator.ring(), annihilator: Some(annihilator) }
    }

    pub fn ring(&self) -> RegularRing {
        self.ring
    }

    pub fn annihilator(&self) -> Option<&MonomialIdeal> {
        self.annihilator.as_ref()
    }

    /// Krull dimension of `R/A`.
    pub fn dim(&self) -> usize {
        match &self.annihilator {
            None => self.ring.d,
            Some(a) => self.ring.d - a.codimension(),
        }
    }
}
