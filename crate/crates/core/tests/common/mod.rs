//! Test-only oracles, coded independently of the library's evaluation paths.

#![allow(dead_code)]

use tangle_core::{Complex, PureState3};

/// Monomials of the hyperdeterminant as (coefficient, four basis indices).
const HDET_TERMS: [(f64, [usize; 4]); 12] = [
    (1.0, [0b000, 0b000, 0b111, 0b111]),
    (1.0, [0b001, 0b001, 0b110, 0b110]),
    (1.0, [0b010, 0b010, 0b101, 0b101]),
    (1.0, [0b100, 0b100, 0b011, 0b011]),
    (-2.0, [0b000, 0b111, 0b011, 0b100]),
    (-2.0, [0b000, 0b111, 0b101, 0b010]),
    (-2.0, [0b000, 0b111, 0b110, 0b001]),
    (-2.0, [0b011, 0b100, 0b101, 0b010]),
    (-2.0, [0b011, 0b100, 0b110, 0b001]),
    (-2.0, [0b101, 0b010, 0b110, 0b001]),
    (4.0, [0b000, 0b110, 0b101, 0b011]),
    (4.0, [0b111, 0b001, 0b010, 0b100]),
];

/// Term-by-term table evaluation.
pub fn hdet_table(s: &PureState3) -> Complex {
    let a = s.amplitudes();
    HDET_TERMS
        .iter()
        .map(|(c, idx)| *c * idx.iter().map(|&i| a[i]).product::<Complex>())
        .sum()
}

/// Discriminant of `det(T0 + x T1)` where `T_i` are the slices at fixed
/// first index. Equals the hyperdeterminant.
pub fn hdet_discriminant(s: &PureState3) -> Complex {
    let t = |i, j, k| s.amp(i, j, k);
    let det = |m: [[Complex; 2]; 2]| m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let slice = |i: usize| [[t(i, 0, 0), t(i, 0, 1)], [t(i, 1, 0), t(i, 1, 1)]];
    let (t0, t1) = (slice(0), slice(1));
    let mut sum = [[Complex::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            sum[r][c] = t0[r][c] + t1[r][c];
        }
    }
    let c0 = det(t0);
    let c2 = det(t1);
    let c1 = det(sum) - c0 - c2;
    c1 * c1 - 4.0 * c0 * c2
}

/// Purity of the A marginal from the 2x4 amplitude matrix via the Lagrange
/// identity: `1 - 2 Σ_{k<l} |M0k M1l - M0l M1k|²`.
pub fn purity_a_lagrange(s: &PureState3) -> f64 {
    let a = s.amplitudes();
    let mut cross = 0.0;
    for k in 0..4 {
        for l in k + 1..4 {
            cross += (a[k] * a[4 + l] - a[l] * a[4 + k]).norm_sqr();
        }
    }
    1.0 - 2.0 * cross
}

/// Binomial probability mass for the Poisson-binomial oracle, by enumeration
/// over all 2^12 slot patterns.
pub fn error_count_distribution(slots: &[f64; 12]) -> [f64; 13] {
    let mut dist = [0.0; 13];
    for pattern in 0u32..(1 << 12) {
        let mut p = 1.0;
        for (i, q) in slots.iter().enumerate() {
            p *= if pattern >> i & 1 == 1 { *q } else { 1.0 - q };
        }
        dist[pattern.count_ones() as usize] += p;
    }
    dist
}
