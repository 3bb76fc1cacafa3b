//! Two-dimensional normal affine semigroup rings `k[S]`, `S = σ ∩ L` for a
//! pointed rational cone `σ ⊂ R²` and a finite-index sublattice `L ⊆ Z²`.
//!
//! Monomial ideals of `k[S]` are semigroup ideals, stored by their minimal
//! generators under the order `u ≤ v ⇔ v - u ∈ S`. Colengths are counted by
//! enumerating `S`-points inside a certified parallelogram.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;

use crate::error::{HkError, Result};
use crate::length::ColengthProvider;
use crate::monomial::{frobenius_exponent, is_prime};

pub type Point = [i64; 2];

fn det(a: Point, b: Point) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

/// Hermite basis `{(a, b), (0, c)}` of a full-rank lattice, `a, c > 0`, `0 ≤ b < c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    a: i64,
    b: i64,
    c: i64,
}

impl Lattice {
    /// Lattice spanned by `gens`; fails unless it has finite index in `Z²`.
    pub fn from_generators(gens: &[Point]) -> Result<Self> {
        let mut rows: Vec<Point> = gens.iter().copied().filter(|g| *g != [0, 0]).collect();
        // Euclid on the first column.
        loop {
            let mut nonzero: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][0] != 0).collect();
            if nonzero.len() <= 1 {
                break;
            }
            nonzero.sort_by_key(|&i| rows[i][0].abs());
            let pivot = rows[nonzero[0]];
            for &i in &nonzero[1..] {
                let f = rows[i][0] / pivot[0];
                rows[i] = [rows[i][0] - f * pivot[0], rows[i][1] - f * pivot[1]];
            }
        }
        let pivot = rows.iter().copied().find(|r| r[0] != 0);
        let c = rows.iter().filter(|r| r[0] == 0).fold(0i64, |g, r| g.gcd(&r[1]));
        match pivot {
            Some(mut p) if c != 0 => {
                if p[0] < 0 {
                    p = [-p[0], -p[1]];
                }
                Ok(Lattice { a: p[0], b: p[1].rem_euclid(c), c })
            }
            _ => Err(HkError::InvalidRing("lattice does not have finite index in Z^2".into())),
        }
    }

    /// `{v : coeffs · v ≡ 0 (mod modulus)}`.
    pub fn from_congruence(coeffs: [i64; 2], modulus: i64) -> Result<Self> {
        if modulus <= 0 {
            return Err(HkError::InvalidRing("congruence modulus must be positive".into()));
        }
        let mut gens = vec![[modulus, 0], [0, modulus]];
        for x in 0..modulus {
            for y in 0..modulus {
                if (coeffs[0] * x + coeffs[1] * y).rem_euclid(modulus) == 0 {
                    gens.push([x, y]);
                }
            }
        }
        Self::from_generators(&gens)
    }

    pub fn contains(&self, v: Point) -> bool {
        if v[0] % self.a != 0 {
            return false;
        }
        let m = v[0] / self.a;
        (v[1] - m * self.b) % self.c == 0
    }

    pub fn index(&self) -> i64 {
        self.a * self.c
    }

    pub fn basis(&self) -> [Point; 2] {
        [[self.a, self.b], [0, self.c]]
    }
}

/// The semigroup ring `k[σ ∩ L]` in characteristic `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ToricRing2 {
    rays: [Point; 2],
    lattice: Lattice,
    p: u64,
    /// `|det(r1, r2)|` and its sign, cached for cone tests.
    det_abs: i64,
    det_sign: i64,
}

impl ToricRing2 {
    pub fn new(rays: [Point; 2], lattice: Lattice, p: u64) -> Result<Self> {
        for r in rays {
            if r[0].gcd(&r[1]) != 1 {
                return Err(HkError::InvalidRing(format!("ray ({}, {}) is not primitive", r[0], r[1])));
            }
        }
        let d = det(rays[0], rays[1]);
        if d == 0 {
            return Err(HkError::InvalidRing("rays are linearly dependent".into()));
        }
        if !is_prime(p) {
            return Err(HkError::InvalidRing(format!("characteristic {p} is not prime")));
        }
        Ok(ToricRing2 { rays, lattice, p, det_abs: d.abs(), det_sign: d.signum() })
    }

    /// The `A_1` singularity `k[x², xy, y²]`: first quadrant, `a + b` even.
    pub fn a1(p: u64) -> Result<Self> {
        Self::new([[1, 0], [0, 1]], Lattice::from_congruence([1, 1], 2)?, p)
    }

    pub fn rays(&self) -> [Point; 2] {
        self.rays
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// Cone coordinates of `v` scaled by `|det(r1, r2)|`: `v = (s1 r1 + s2 r2)/|det|`.
    fn scaled_coords(&self, v: Point) -> (i64, i64) {
        (self.det_sign * det(v, self.rays[1]), self.det_sign * det(self.rays[0], v))
    }

    pub fn in_cone(&self, v: Point) -> bool {
        let (s1, s2) = self.scaled_coords(v);
        s1 >= 0 && s2 >= 0
    }

    /// `v ∈ S = σ ∩ L`.
    pub fn semigroup_member(&self, v: Point) -> bool {
        self.in_cone(v) && self.lattice.contains(v)
    }

    /// Smallest positive multiple of each primitive ray lying in `L`.
    pub fn ray_generators(&self) -> [Point; 2] {
        self.rays.map(|r| {
            let n = (1..=self.lattice.index())
                .find(|&n| self.lattice.contains([n * r[0], n * r[1]]))
                .expect("n = index always lies in L");
            [n * r[0], n * r[1]]
        })
    }

    /// Minimal generators of the maximal ideal `S \ {0}` (the Hilbert basis).
    pub fn maximal_ideal(&self) -> SemigroupIdeal {
        let [u1, u2] = self.ray_generators();
        let corners = [[0, 0], u1, u2, [u1[0] + u2[0], u1[1] + u2[1]]];
        let (lo, hi) = bounding_box(&corners);
        let limit = |u: Point, r: Point| self.det_sign * det(u, r);
        let (max1, max2) = (limit(u1, self.rays[1]), self.det_sign * det(self.rays[0], u2));
        let mut pts = Vec::new();
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                let v = [x, y];
                let (s1, s2) = self.scaled_coords(v);
                if v != [0, 0] && (0..=max1).contains(&s1) && (0..=max2).contains(&s2) && self.lattice.contains(v) {
                    pts.push(v);
                }
            }
        }
        SemigroupIdeal { ring: *self, gens: self.minimalize(pts) }
    }

    /// Antichain under the `S`-order, sorted lexicographically.
    pub fn minimalize(&self, mut gens: Vec<Point>) -> Vec<Point> {
        gens.sort();
        gens.dedup();
        let keep: Vec<bool> =
            gens.iter().map(|&g| !gens.iter().any(|&h| h != g && self.semigroup_member(sub(g, h)))).collect();
        gens.into_iter().zip(keep).filter_map(|(g, k)| k.then_some(g)).collect()
    }
}

fn bounding_box(pts: &[Point]) -> (Point, Point) {
    let lo = [pts.iter().map(|p| p[0]).min().unwrap(), pts.iter().map(|p| p[1]).min().unwrap()];
    let hi = [pts.iter().map(|p| p[0]).max().unwrap(), pts.iter().map(|p| p[1]).max().unwrap()];
    (lo, hi)
}

/// A monomial ideal of `k[S]` given by `S`-minimal generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemigroupIdeal {
    ring: ToricRing2,
    gens: Vec<Point>,
}

impl SemigroupIdeal {
    pub fn new(ring: ToricRing2, gens: Vec<Point>) -> Result<Self> {
        if gens.is_empty() {
            return Err(HkError::InvalidIdeal("the zero ideal is not representable".into()));
        }
        if gens.contains(&[0, 0]) {
            return Err(HkError::InvalidIdeal("the unit ideal is not representable".into()));
        }
        if let Some(g) = gens.iter().find(|g| !ring.semigroup_member(**g)) {
            return Err(HkError::InvalidIdeal(format!("generator ({}, {}) is not in the semigroup", g[0], g[1])));
        }
        Ok(SemigroupIdeal { ring, gens: ring.minimalize(gens) })
    }

    pub fn ring(&self) -> ToricRing2 {
        self.ring
    }

    pub fn gens(&self) -> &[Point] {
        &self.gens
    }

    /// `∃ g: v - g ∈ S`.
    pub fn contains_point(&self, v: Point) -> bool {
        self.gens.iter().any(|&g| self.ring.semigroup_member(sub(v, g)))
    }

    fn same_ring(&self, other: &SemigroupIdeal) -> Result<()> {
        if self.ring != other.ring {
            return Err(HkError::RingMismatch);
        }
        Ok(())
    }

    pub fn multiply(&self, other: &SemigroupIdeal) -> Result<SemigroupIdeal> {
        self.same_ring(other)?;
        let mut sums = Vec::with_capacity(self.gens.len() * other.gens.len());
        for a in &self.gens {
            for b in &other.gens {
                sums.push([
                    a[0].checked_add(b[0]).ok_or(HkError::Overflow("semigroup sum"))?,
                    a[1].checked_add(b[1]).ok_or(HkError::Overflow("semigroup sum"))?,
                ]);
            }
        }
        Ok(SemigroupIdeal { ring: self.ring, gens: self.ring.minimalize(sums) })
    }

    pub fn power(&self, k: u32) -> Result<SemigroupIdeal> {
        if k == 0 {
            return Err(HkError::ZeroPower);
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    pub fn bracket_power(&self, q: u64) -> Result<SemigroupIdeal> {
        frobenius_exponent(q, self.ring.p)?;
        let q = i64::try_from(q).map_err(|_| HkError::Overflow("bracket exponent"))?;
        let gens = self
            .gens
            .iter()
            .map(|g| match (g[0].checked_mul(q), g[1].checked_mul(q)) {
                (Some(x), Some(y)) => Ok([x, y]),
                _ => Err(HkError::Overflow("bracket exponent")),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SemigroupIdeal { ring: self.ring, gens: self.ring.minimalize(gens) })
    }

    /// Largest `n` with `I ⊆ m^n`.
    pub fn ord(&self) -> u32 {
        let m = self.ring.maximal_ideal();
        let mut power = m.clone();
        let mut n = 1;
        loop {
            power = power.multiply(&m).expect("same ring");
            if !self.gens.iter().all(|&g| power.contains_point(g)) {
                return n;
            }
            n += 1;
        }
    }

    fn max_abs_coord(&self) -> u64 {
        self.gens.iter().flat_map(|g| g.iter()).map(|c| c.unsigned_abs()).max().unwrap_or(1)
    }

    /// For each ray, the least `N ≤ bound` with `N·r ∈ I`.
    pub fn certify(&self, bound: u64) -> Result<[i64; 2]> {
        let mut out = [0i64; 2];
        for (i, r) in self.ring.rays.iter().enumerate() {
            out[i] = (1..=bound as i64)
                .find(|&n| self.contains_point([n * r[0], n * r[1]]))
                .ok_or(HkError::CannotCertify { ray: i, bound })?;
        }
        Ok(out)
    }
}

impl fmt::Display for SemigroupIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({},{})", g[0], g[1])?;
        }
        write!(f, ">")
    }
}

/// The only module the toric backend supports: the ring itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct WholeRing;

pub const DEFAULT_ENUMERATION_CAP: u64 = 50_000_000;
pub const DEFAULT_CERTIFICATION_FACTOR: u64 = 64;

/// Colength provider for a [`ToricRing2`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToricBackend {
    pub ring: ToricRing2,
    /// Fixed search bound for m-primary certificates; `None` scales the
    /// default factor by the largest generator coordinate.
    pub certification_bound: Option<u64>,
    pub enumeration_cap: u64,
}

impl ToricBackend {
    pub fn new(ring: ToricRing2) -> Self {
        ToricBackend { ring, certification_bound: None, enumeration_cap: DEFAULT_ENUMERATION_CAP }
    }

    pub fn with_enumeration_cap(mut self, cap: u64) -> Self {
        self.enumeration_cap = cap;
        self
    }

    pub fn with_certification_bound(mut self, bound: Option<u64>) -> Self {
        self.certification_bound = bound;
        self
    }

    fn check_ring(&self, ideal: &SemigroupIdeal) -> Result<()> {
        if ideal.ring != self.ring {
            return Err(HkError::RingMismatch);
        }
        Ok(())
    }

    /// Ray multiples `N_i r_i ∈ I` within this backend's search bound.
    pub fn certify(&self, ideal: &SemigroupIdeal) -> Result<[i64; 2]> {
        self.check_ring(ideal)?;
        let bound =
            self.certification_bound.unwrap_or_else(|| DEFAULT_CERTIFICATION_FACTOR * ideal.max_abs_coord().max(1));
        ideal.certify(bound)
    }

    /// Number of `S`-points outside `I`.
    pub fn toric_colength(&self, ideal: &SemigroupIdeal) -> Result<BigUint> {
        let ring = &self.ring;
        let [n1, n2] = self.certify(ideal)?;
        let [r1, r2] = ring.rays;
        let c1 = [n1 * r1[0], n1 * r1[1]];
        let c2 = [n2 * r2[0], n2 * r2[1]];
        let (lo, hi) = bounding_box(&[[0, 0], c1, c2, [c1[0] + c2[0], c1[1] + c2[1]]]);
        let points = (hi[0] - lo[0] + 1) as u128 * (hi[1] - lo[1] + 1) as u128;
        if points > self.enumeration_cap as u128 {
            return Err(HkError::EnumerationBudget { points, cap: self.enumeration_cap });
        }
        // Outside I implies cone coordinates below (n1, n2).
        let (lim1, lim2) = (n1 * ring.det_abs, n2 * ring.det_abs);
        let count: u64 = (lo[0]..=hi[0])
            .into_par_iter()
            .map(|x| {
                (lo[1]..=hi[1])
                    .filter(|&y| {
                        let v = [x, y];
                        let (s1, s2) = ring.scaled_coords(v);
                        (0..lim1).contains(&s1)
                            && (0..lim2).contains(&s2)
                            && ring.lattice.contains(v)
                            && !ideal.contains_point(v)
                    })
                    .count() as u64
            })
            .sum();
        Ok(BigUint::from(count))
    }
}

impl ColengthProvider for ToricBackend {
    type Ideal = SemigroupIdeal;
    type Module = WholeRing;

    fn dim(&self) -> usize {
        2
    }

    fn characteristic(&self) -> u64 {
        self.ring.p
    }

    fn frobenius_is_flat(&self) -> bool {
        false
    }

    fn generator_count(&self, ideal: &SemigroupIdeal) -> usize {
        ideal.gens.len()
    }

    fn free_module(&self) -> WholeRing {
        WholeRing
    }

    fn module_dim(&self, _module: &WholeRing) -> usize {
        2
    }

    fn colength(&self, ideal: &SemigroupIdeal) -> Result<BigUint> {
        self.toric_colength(ideal)
    }

    fn module_colength(&self, ideal: &SemigroupIdeal, _module: &WholeRing) -> Result<BigUint> {
        self.toric_colength(ideal)
    }

    fn multiply(&self, a: &SemigroupIdeal, b: &SemigroupIdeal) -> Result<SemigroupIdeal> {
        self.check_ring(a)?;
        a.multiply(b)
    }

    fn power(&self, ideal: &SemigroupIdeal, k: u32) -> Result<SemigroupIdeal> {
        self.check_ring(ideal)?;
        ideal.power(k)
    }

    fn bracket_power(&self, ideal: &SemigroupIdeal, q: u64) -> Result<SemigroupIdeal> {
        self.check_ring(ideal)?;
        ideal.bracket_power(q)
    }
}
