//! Hilbert–Samuel functions `k ↦ ℓ(M/J^k M)` and their coefficients in the
//! binomial basis
//!
//! `P(k) = Σ_{i=0}^{d} (-1)^i e_i C(k+d-1-i, d-i)`.

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::Serialize;

use crate::combinat::binomial_poly;
use crate::error::{HkError, Result};
use crate::exact::ser_bigint_vec;
use crate::length::ColengthProvider;

/// Hilbert coefficients `(e_0, ..., e_d)` with the sampled range on which the
/// polynomial was confirmed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertCoefficients {
    pub d: usize,
    #[serde(serialize_with = "ser_bigint_vec")]
    pub e: Vec<BigInt>,
    pub postulation: usize,
    pub verified_through: usize,
}

impl HilbertCoefficients {
    pub fn multiplicity(&self) -> &BigInt {
        &self.e[0]
    }

    pub fn evaluate(&self, k: u64) -> BigInt {
        evaluate_binomial_poly(self, k)
    }

    /// `Σ_{i≥2} (-1)^i e_i C(k+d-1-i, d-i)`, the part of `P(k)` beyond the
    /// first two coefficients.
    pub fn tail_from_second(&self, k: u64) -> BigInt {
        let d = self.d as i64;
        (2..=self.d)
            .map(|i| {
                let term = &self.e[i] * binomial_poly(k as i64 + d - 1 - i as i64, (d - i as i64) as u32);
                if i % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .sum()
    }
}

/// `P(k)` for the given coefficients.
pub fn evaluate_binomial_poly(h: &HilbertCoefficients, k: u64) -> BigInt {
    let d = h.d as i64;
    h.e.iter()
        .enumerate()
        .map(|(i, e)| {
            let i = i as i64;
            let term = e * binomial_poly(k as i64 + d - 1 - i, (d - i) as u32);
            if i % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

/// Fewest samples the fitter accepts: a window of `d+1` plus `d+2` checks.
pub fn min_samples(d: usize) -> usize {
    2 * d + 3
}

/// Fits the Hilbert coefficients to `samples[k-1] = ℓ(M/J^k M)`, `k = 1..=k_max`.
///
/// The window `[s, s+d]` with `s = k_max - 2d - 2` determines the polynomial,
/// the `d+2` higher samples verify it, and the postulation index is the
/// smallest `k` from which every sample agrees.
pub fn fit_from_samples(d: usize, samples: &[BigUint]) -> Result<HilbertCoefficients> {
    let k_max = samples.len();
    if k_max < min_samples(d) {
        return Err(HkError::BudgetTooSmall(format!(
            "Hilbert fit in dimension {d} needs k_max >= {}, got {k_max}",
            min_samples(d)
        )));
    }
    let value = |k: usize| BigInt::from(samples[k - 1].clone());
    let start = k_max - (2 * d + 2);

    // Forward differences at the window start.
    let diffs: Vec<BigInt> = (0..=d)
        .map(|m| {
            (0..=m)
                .map(|t| {
                    let c = BigInt::from(crate::combinat::binomial(m as u64, t as u64));
                    let term = c * value(start + t);
                    if (m - t) % 2 == 0 {
                        term
                    } else {
                        -term
                    }
                })
                .sum()
        })
        .collect();

    // Δ^m B_j(k) = B_{j-m}(k+m) with B_j(k) = C(k+j-1, j): back-substitute the
    // unitriangular system from the top degree down.
    let basis = |j: usize, k: usize| binomial_poly(k as i64 + j as i64 - 1, j as u32);
    let mut c = vec![BigInt::from(0); d + 1];
    for m in (0..=d).rev() {
        let mut rhs = diffs[m].clone();
        for (j, cj) in c.iter().enumerate().skip(m + 1) {
            rhs -= cj * basis(j - m, start + m);
        }
        // The diagonal entry is B_0 = 1.
        debug_assert_eq!(basis(0, start + m), BigInt::from(1));
        c[m] = rhs;
    }
    // c_j multiplies C(k+j-1, j), which is the i = d - j term.
    let e: Vec<BigInt> = (0..=d)
        .map(|i| {
            let cj = c[d - i].clone();
            if i % 2 == 0 {
                cj
            } else {
                -cj
            }
        })
        .collect();

    let mut h = HilbertCoefficients { d, e, postulation: start, verified_through: k_max };
    if let Some(k) = (start..=k_max).rev().find(|&k| h.evaluate(k as u64) != value(k)) {
        return Err(HkError::NoStabilization {
            k_max,
            k,
            sample: samples[k - 1].to_string(),
            polynomial: h.evaluate(k as u64).to_string(),
        });
    }
    while h.postulation > 1 && h.evaluate(h.postulation as u64 - 1) == value(h.postulation - 1) {
        h.postulation -= 1;
    }
    Ok(h)
}

/// Cached Hilbert–Samuel samples `ℓ(M/J^k M)` for one ideal and module.
pub struct HilbertSampler<'a, B: ColengthProvider> {
    backend: &'a B,
    module: B::Module,
    powers: Vec<B::Ideal>,
    values: Vec<BigUint>,
}

impl<'a, B: ColengthProvider> HilbertSampler<'a, B> {
    pub fn new(backend: &'a B, ideal: B::Ideal, module: B::Module) -> Self {
        HilbertSampler { backend, module, powers: vec![ideal], values: Vec::new() }
    }

    /// `ℓ(M/J^k M)` for `k = 1..=k_max`.
    pub fn samples(&mut self, k_max: usize) -> Result<&[BigUint]> {
        while self.powers.len() < k_max {
            let next = self.backend.multiply(self.powers.last().expect("nonempty"), &self.powers[0])?;
            self.powers.push(next);
        }
        if self.values.len() < k_max {
            let fresh: Vec<BigUint> = self.powers[self.values.len()..k_max]
                .par_iter()
                .map(|p| self.backend.module_colength(p, &self.module))
                .collect::<Result<_>>()?;
            self.values.extend(fresh);
        }
        Ok(&self.values[..k_max])
    }

    pub fn value(&mut self, k: usize) -> Result<BigUint> {
        if k == 0 {
            return Err(HkError::ZeroPower);
        }
        Ok(self.samples(k)?[k - 1].clone())
    }

    pub fn fit(&mut self, k_max: usize) -> Result<HilbertCoefficients> {
        let d = self.backend.dim();
        if k_max < min_samples(d) {
            return fit_from_samples(d, &[]);
        }
        let samples = self.samples(k_max)?.to_vec();
        fit_from_samples(d, &samples)
    }
}

/// `ℓ(M/J^k M)`.
pub fn hs_value<B: ColengthProvider>(backend: &B, j: &B::Ideal, module: &B::Module, k: u32) -> Result<BigUint> {
    let power = backend.power(j, k)?;
    backend.module_colength(&power, module)
}

pub fn fit_hilbert_coefficients<B: ColengthProvider>(
    backend: &B,
    j: &B::Ideal,
    module: &B::Module,
    k_max: usize,
) -> Result<HilbertCoefficients> {
    HilbertSampler::new(backend, j.clone(), module.clone()).fit(k_max)
}
