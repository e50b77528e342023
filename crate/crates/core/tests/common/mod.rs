//! Test-only oracles and synthetic series, independent of the library code paths.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};

pub fn gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

pub fn student_t(n: usize, dof: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = StudentT::new(dof).unwrap();
    (0..n).map(|_| d.sample(&mut rng)).collect()
}

pub fn ar1(n: usize, phi: f64, seed: u64) -> Vec<f64> {
    let e = gaussian(n, seed);
    let mut x = Vec::with_capacity(n);
    let mut prev = 0.0;
    for v in e {
        prev = phi * prev + v;
        x.push(prev);
    }
    x
}

/// Deterministic binomial multiplicative cascade of length `2^levels`:
/// `x_k = a^(levels − ones(k)) · (1 − a)^ones(k)`.
pub fn binomial_cascade(a: f64, levels: u32) -> Vec<f64> {
    (0..1usize << levels)
        .map(|k| {
            let ones = k.count_ones() as i32;
            a.powi(levels as i32 - ones) * (1.0 - a).powi(ones)
        })
        .collect()
}

/// Closed-form generalized Hurst exponent of the binomial cascade.
pub fn cascade_h(a: f64, q: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    if q.abs() < 1e-10 {
        -(a.ln() + (1.0 - a).ln()) / (2.0 * ln2)
    } else {
        1.0 / q - (a.powf(q) + (1.0 - a).powf(q)).ln() / (q * ln2)
    }
}

pub fn cascade_tau(a: f64, q: f64) -> f64 {
    -(a.powf(q) + (1.0 - a).powf(q)).ln() / std::f64::consts::LN_2
}

/// Legendre transform of the cascade `τ(q)`: returns `(α, f(α))` at `q`.
pub fn cascade_legendre(a: f64, q: f64) -> (f64, f64) {
    let b = 1.0 - a;
    let ln2 = std::f64::consts::LN_2;
    let (aq, bq) = (a.powf(q), b.powf(q));
    let alpha = -(aq * a.ln() + bq * b.ln()) / ((aq + bq) * ln2);
    (alpha, q * alpha - cascade_tau(a, q))
}

/// Least-squares polynomial residual variance by monomial normal equations
/// on an abscissa scaled to `[-1, 1]`, solved with partial pivoting.
pub fn naive_segment_variance(y: &[f64], order: usize) -> f64 {
    let s = y.len();
    let m = order + 1;
    let x: Vec<f64> = (0..s).map(|i| -1.0 + 2.0 * i as f64 / (s - 1) as f64).collect();
    let mut a = vec![vec![0.0; m + 1]; m];
    for r in 0..m {
        for c in 0..m {
            a[r][c] = x.iter().map(|&xi| xi.powi((r + c) as i32)).sum();
        }
        a[r][m] = x.iter().zip(y).map(|(&xi, &yi)| xi.powi(r as i32) * yi).sum();
    }
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let coef: Vec<f64> = (0..m).map(|r| a[r][m] / a[r][r]).collect();
    let mut ss = 0.0;
    for i in 0..s {
        let fit: f64 = coef.iter().enumerate().map(|(k, c)| c * x[i].powi(k as i32)).sum();
        ss += (y[i] - fit).powi(2);
    }
    ss / s as f64
}

/// `F_q(s)` straight from the textbook definition: explicit profile,
/// forward then backward segments, direct generalized mean.
pub fn naive_fluctuation(r: &[f64], q: f64, s: usize, order: usize) -> f64 {
    let n = r.len();
    let mean = r.iter().sum::<f64>() / n as f64;
    let mut y = vec![0.0; n];
    let mut acc = 0.0;
    for i in 0..n {
        acc += r[i] - mean;
        y[i] = acc;
    }
    let ns = n / s;
    let mut vars = Vec::new();
    for v in 0..ns {
        vars.push(naive_segment_variance(&y[v * s..(v + 1) * s], order));
    }
    for v in 0..ns {
        let start = n - (v + 1) * s;
        vars.push(naive_segment_variance(&y[start..start + s], order));
    }
    let count = vars.len() as f64;
    if q == 0.0 {
        (vars.iter().map(|v| v.ln()).sum::<f64>() / (2.0 * count)).exp()
    } else {
        (vars.iter().map(|v| v.powf(q / 2.0)).sum::<f64>() / count).powf(1.0 / q)
    }
}
