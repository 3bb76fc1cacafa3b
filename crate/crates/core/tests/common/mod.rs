//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's length or fitting code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use hk_core::{MonomialIdeal, RegularRing};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Gens = Vec<Vec<u32>>;

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Pure power exponent in each variable, if every variable has one.
fn box_bounds(gens: &Gens, d: usize) -> Option<Vec<u32>> {
    (0..d)
        .map(|i| gens.iter().filter(|g| g.iter().enumerate().all(|(j, &e)| j == i || e == 0)).map(|g| g[i]).min())
        .collect()
}

/// Monomials not in the ideal, counted one by one inside the box cut out by the
/// pure powers.
pub fn naive_colength(gens: &Gens, d: usize) -> u64 {
    let bounds = box_bounds(gens, d).expect("oracle needs an m-primary ideal");
    let mut count = 0u64;
    let mut point = vec![0u32; d];
    loop {
        if !gens.iter().any(|g| divides(g, &point)) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == d {
                return count;
            }
            point[i] += 1;
            if point[i] < bounds[i] {
                break;
            }
            point[i] = 0;
            i += 1;
        }
    }
}

pub fn naive_minimal(gens: &Gens) -> Gens {
    let set: BTreeSet<Vec<u32>> = gens.iter().cloned().collect();
    set.iter().filter(|g| !set.iter().any(|h| h != *g && divides(h, g))).cloned().collect()
}

pub fn naive_product(a: &Gens, b: &Gens) -> Gens {
    let sums: Gens =
        a.iter().flat_map(|g| b.iter().map(move |h| g.iter().zip(h).map(|(x, y)| x + y).collect())).collect();
    naive_minimal(&sums)
}

pub fn naive_power(gens: &Gens, k: u32) -> Gens {
    let mut acc = naive_minimal(gens);
    for _ in 1..k {
        acc = naive_product(&acc, gens);
    }
    acc
}

pub fn naive_bracket(gens: &Gens, q: u32) -> Gens {
    gens.iter().map(|g| g.iter().map(|e| e * q).collect()).collect()
}

pub fn gens_of(ideal: &MonomialIdeal) -> Gens {
    ideal.gens().iter().map(|g| g.coords().to_vec()).collect()
}

pub fn ideal(ring: RegularRing, gens: &Gens) -> MonomialIdeal {
    MonomialIdeal::from_exponents(ring, gens).unwrap()
}

pub fn binom(n: i64, r: i64) -> BigRational {
    if r < 0 {
        return BigRational::zero();
    }
    let mut acc = BigRational::one();
    for t in 0..r {
        acc = acc * BigRational::from_integer(BigInt::from(n - t)) / BigRational::from_integer(BigInt::from(t + 1));
    }
    acc
}

/// Solves `Σ_i (-1)^i e_i C(k+d-1-i, d-i) = values[k]` at the given `k` by
/// Gaussian elimination over the rationals.
pub fn solve_hilbert_coefficients(d: usize, points: &[(i64, u64)]) -> Vec<BigRational> {
    assert_eq!(points.len(), d + 1);
    let n = d + 1;
    let mut rows: Vec<Vec<BigRational>> = points
        .iter()
        .map(|&(k, v)| {
            let mut row: Vec<BigRational> = (0..n)
                .map(|i| {
                    let c = binom(k + d as i64 - 1 - i as i64, (d - i) as i64);
                    if i % 2 == 0 {
                        c
                    } else {
                        -c
                    }
                })
                .collect();
            row.push(BigRational::from_integer(BigInt::from(v)));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !rows[r][col].is_zero()).expect("singular system");
        rows.swap(col, pivot);
        let p = rows[col][col].clone();
        for x in rows[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != col && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                let pivot_row = rows[col].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    rows.into_iter().map(|r| r[n].clone()).collect()
}

/// Hilbert coefficients of `R/I` from naive colengths of `I^k` at the top of
/// `1..=k_hi`.
pub fn oracle_hilbert(gens: &Gens, d: usize, k_hi: u32) -> Vec<BigRational> {
    let points: Vec<(i64, u64)> =
        (k_hi - d as u32..=k_hi).map(|k| (k as i64, naive_colength(&naive_power(gens, k), d))).collect();
    solve_hilbert_coefficients(d, &points)
}

/// Seeded random m-primary ideal: a pure power of every variable plus random
/// mixed generators, at most `max_gens` in all.
pub fn random_ideal(rng: &mut ChaCha8Rng, d: usize, max_gens: usize, max_exp: u32) -> Gens {
    let mut gens: Gens = (0..d)
        .map(|i| {
            let mut g = vec![0; d];
            g[i] = rng.gen_range(1..=max_exp);
            g
        })
        .collect();
    let extra = rng.gen_range(0..=max_gens - d);
    for _ in 0..extra {
        gens.push((0..d).map(|_| rng.gen_range(0..=max_exp)).collect());
    }
    gens.retain(|g| g.iter().any(|&e| e > 0));
    gens
}

/// The seeded random suite: `count` ideals with `d ≤ 4`, at most 8
/// generators, exponents at most 12.
pub fn random_suite(seed: u64, count: usize) -> Vec<(usize, Gens)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let d = rng.gen_range(1..=4);
            (d, random_ideal(&mut rng, d, 8, 12))
        })
        .collect()
}

pub struct SuiteIdeal {
    pub name: &'static str,
    pub gens: Gens,
    /// Stable ideals (equality case of the Hilbert–Kunz power bound).
    pub stable_family: bool,
}

fn g(v: &[[u32; 2]]) -> Gens {
    v.iter().map(|x| x.to_vec()).collect()
}

/// Two-dimensional named ideals used by the checker tests.
pub fn named_suite() -> Vec<SuiteIdeal> {
    let mut out = vec![
        SuiteIdeal { name: "m", gens: g(&[[1, 0], [0, 1]]), stable_family: true },
        SuiteIdeal { name: "m^2", gens: g(&[[2, 0], [1, 1], [0, 2]]), stable_family: true },
        SuiteIdeal { name: "(x^3,xy,y^2)", gens: g(&[[3, 0], [1, 1], [0, 2]]), stable_family: false },
        SuiteIdeal { name: "(x^3,x^2y,y^3)", gens: g(&[[3, 0], [2, 1], [0, 3]]), stable_family: false },
        SuiteIdeal { name: "(x^4,x^3y,xy^3,y^4)", gens: g(&[[4, 0], [3, 1], [1, 3], [0, 4]]), stable_family: false },
        SuiteIdeal { name: "(x^5,x^2y,y^2)", gens: g(&[[5, 0], [2, 1], [0, 2]]), stable_family: false },
    ];
    for (a, b) in [(2, 3), (1, 4), (3, 3), (4, 5)] {
        out.push(SuiteIdeal {
            name: Box::leak(format!("(x^{a},y^{b})").into_boxed_str()),
            gens: g(&[[a, 0], [0, b]]),
            stable_family: true,
        });
    }
    out
}

/// Points of `cone(r1, r2) ∩ L` with `L` spanned by `l1, l2`, tested by
/// solving the 2x2 systems directly.
pub struct NaiveToric {
    pub rays: [[i64; 2]; 2],
    pub lattice: [[i64; 2]; 2],
}

impl NaiveToric {
    pub fn a1() -> Self {
        NaiveToric { rays: [[1, 0], [0, 1]], lattice: [[2, 0], [1, 1]] }
    }

    fn coords(basis: [[i64; 2]; 2], v: [i64; 2]) -> ([i64; 2], i64) {
        let det = basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0];
        let x = v[0] * basis[1][1] - v[1] * basis[1][0];
        let y = basis[0][0] * v[1] - basis[0][1] * v[0];
        ([x, y], det)
    }

    pub fn member(&self, v: [i64; 2]) -> bool {
        let ([a, b], det) = Self::coords(self.rays, v);
        let in_cone = if det > 0 { a >= 0 && b >= 0 } else { a <= 0 && b <= 0 };
        let ([x, y], det) = Self::coords(self.lattice, v);
        in_cone && x % det == 0 && y % det == 0
    }

    pub fn in_ideal(&self, gens: &[[i64; 2]], v: [i64; 2]) -> bool {
        gens.iter().any(|g| self.member([v[0] - g[0], v[1] - g[1]]))
    }

    /// Semigroup points in `[-r, r]^2` outside the ideal.
    pub fn colength_in_box(&self, gens: &[[i64; 2]], r: i64) -> u64 {
        let mut count = 0;
        for a in -r..=r {
            for b in -r..=r {
                if self.member([a, b]) && !self.in_ideal(gens, [a, b]) {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn product(&self, a: &[[i64; 2]], b: &[[i64; 2]]) -> Vec<[i64; 2]> {
        let sums: BTreeSet<[i64; 2]> =
            a.iter().flat_map(|g| b.iter().map(move |h| [g[0] + h[0], g[1] + h[1]])).collect();
        sums.iter()
            .filter(|s| !sums.iter().any(|t| t != *s && self.member([s[0] - t[0], s[1] - t[1]])))
            .copied()
            .collect()
    }

    pub fn power(&self, gens: &[[i64; 2]], k: u32) -> Vec<[i64; 2]> {
        let mut acc = gens.to_vec();
        for _ in 1..k {
            acc = self.product(&acc, gens);
        }
        acc
    }
}
