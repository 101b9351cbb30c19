//! Seeded comparison of `apply` and `fast_apply` against explicit dense
//! matrix-vector products.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::CertifyError;
use crate::operators::{apply, fast_apply, OperatorKind, OperatorSpec};
use crate::spaces::{SequenceElement, Symbol};

/// Per-row tolerance, relative to `Σ_n |T_{in} x_n|`.
pub const ORACLE_ROW_TOL: f64 = 1e-12;
/// Normwise tolerance for the FFT path, relative to `max_i |y_i|`.
pub const ORACLE_FAST_TOL: f64 = 1e-10;
/// Rows compared against the dense product.
pub const ORACLE_ROWS: usize = 160;
/// Rows used for the FFT comparison; large enough to leave the direct path.
pub const ORACLE_FAST_ROWS: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCase {
    pub theta_support: usize,
    pub x_support: usize,
    pub hankel_row_error: f64,
    pub toeplitz_row_error: f64,
    pub fast_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub max_support: usize,
    pub max_row_error: f64,
    pub max_fast_error: f64,
    pub passed: bool,
    pub cases: Vec<OracleCase>,
}

/// `y = M x` with `M` materialized row by row, plus `Σ_n |M_{in} x_n|`.
pub fn dense_product(kind: OperatorKind, theta: &[f64], x: &[f64], rows: usize) -> (Vec<f64>, Vec<f64>) {
    let t = |j: isize| if j >= 0 && (j as usize) < theta.len() { theta[j as usize] } else { 0.0 };
    let mut y = vec![0.0; rows];
    let mut mag = vec![0.0; rows];
    for i in 1..=rows {
        let row: Vec<f64> = (1..=x.len())
            .map(|n| match kind {
                OperatorKind::Hankel => t(i as isize + n as isize - 2),
                _ => t(i as isize - n as isize),
            })
            .collect();
        for (m, xn) in row.iter().zip(x) {
            y[i - 1] += m * xn;
            mag[i - 1] += (m * xn).abs();
        }
    }
    (y, mag)
}

fn row_error(got: &[f64], want: &[f64], mag: &[f64]) -> f64 {
    got.iter()
        .zip(want)
        .zip(mag)
        .map(|((g, w), m)| if *m == 0.0 { (g - w).abs() } else { (g - w).abs() / m })
        .fold(0.0, f64::max)
}

fn random_vec(rng: &mut ChaCha8Rng, max_support: usize) -> Vec<f64> {
    let len = rng.gen_range(1..=max_support);
    (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// `cases` random `(θ, x)` pairs with supports `≤ max_support` and entries in
/// `[−1, 1]`.
pub fn dense_oracle(cases: usize, max_support: usize, seed: u64) -> Result<OracleReport, CertifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(cases);
    for _ in 0..cases {
        let theta = random_vec(&mut rng, max_support);
        let xv = random_vec(&mut rng, max_support);
        let x = SequenceElement::from_dense(&xv);
        let sym = Symbol::finite(&theta);
        let mut errs = [0.0; 2];
        let mut fast_error: f64 = 0.0;
        for (slot, op) in [OperatorSpec::hankel(sym.clone()), OperatorSpec::toeplitz(sym.clone())].into_iter().enumerate() {
            let got = apply(&op, &x, max_support, ORACLE_ROWS)?;
            let (want, mag) = dense_product(op.kind(), &theta, &xv, ORACLE_ROWS);
            errs[slot] = row_error(&got.values, &want, &mag);
            let slow = apply(&op, &x, max_support, ORACLE_FAST_ROWS)?;
            let fast = fast_apply(&op, &x, max_support, ORACLE_FAST_ROWS)?;
            let scale = slow.values.iter().fold(0f64, |m, v| m.max(v.abs()));
            let diff = slow.values.iter().zip(&fast.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            fast_error = fast_error.max(if scale == 0.0 { diff } else { diff / scale });
        }
        out.push(OracleCase {
            theta_support: theta.len(),
            x_support: xv.len(),
            hankel_row_error: errs[0],
            toeplitz_row_error: errs[1],
            fast_error,
        });
    }
    let max_row_error = out.iter().map(|c| c.hankel_row_error.max(c.toeplitz_row_error)).fold(0.0, f64::max);
    let max_fast_error = out.iter().map(|c| c.fast_error).fold(0.0, f64::max);
    Ok(OracleReport {
        seed,
        max_support,
        max_row_error,
        max_fast_error,
        passed: max_row_error <= ORACLE_ROW_TOL && max_fast_error <= ORACLE_FAST_TOL,
        cases: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_oracle_run_passes() {
        let r = dense_oracle(10, 16, 7).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r, dense_oracle(10, 16, 7).unwrap());
    }

    #[test]
    fn dense_product_hankel_shape() {
        let (y, _) = dense_product(OperatorKind::Hankel, &[1.0, 2.0, 3.0], &[1.0, 1.0], 4);
        assert_eq!(y, vec![3.0, 5.0, 3.0, 0.0]);
    }
}
