//! FFT-backed apply for Hankel and Toeplitz operators on finite inputs.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{apply, check_apply, output_support, ApplyResult, OperatorKind, OperatorSpec, Residual};
use crate::error::SpaceError;
use crate::logval::Coord;
use crate::spaces::SequenceElement;

/// `J·R` above which the convolution path is used.
pub const FAST_APPLY_THRESHOLD: usize = 1 << 14;

/// Cyclic convolution of two real sequences on `size` points (a power of
/// two, at least both lengths). Both inputs share one complex transform.
fn cyclic_convolve(a: &[f64], b: &[f64], size: usize) -> Vec<f64> {
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut z = vec![Complex::new(0.0, 0.0); size];
    for (d, s) in z.iter_mut().zip(a) {
        d.re = *s;
    }
    for (d, s) in z.iter_mut().zip(b) {
        d.im = *s;
    }
    fwd.process(&mut z);
    // A_k B_k = (Z_k² − conj(Z_{−k})²) / 4i
    let quarter_i = Complex::new(0.0, -0.25);
    let prod: Vec<Complex<f64>> = (0..size)
        .map(|k| {
            let zk = z[k];
            let zm = z[(size - k) % size].conj();
            (zk * zk - zm * zm) * quarter_i
        })
        .collect();
    let mut c = prod;
    inv.process(&mut c);
    let scale = 1.0 / size as f64;
    c.iter().map(|v| v.re * scale).collect()
}

/// Linear convolution of two real sequences.
fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let out_len = a.len() + b.len() - 1;
    let mut c = cyclic_convolve(a, b, out_len.next_power_of_two());
    c.truncate(out_len);
    c
}

/// Same contract as [`apply`]; Hankel rows are a cross-correlation and
/// Toeplitz rows a convolution, evaluated by FFT once `J·R` exceeds
/// [`FAST_APPLY_THRESHOLD`].
pub fn fast_apply(op: &OperatorSpec, x: &SequenceElement, j: usize, r: usize) -> Result<ApplyResult, SpaceError> {
    check_apply(x, j, r)?;
    let f = x.as_finite().ok_or(SpaceError::NeedsFiniteSupport)?;
    let symbol_op = matches!(op.kind(), OperatorKind::Hankel | OperatorKind::ToeplitzLower);
    if j.saturating_mul(r) <= FAST_APPLY_THRESHOLD || !symbol_op {
        return apply(op, x, j, r);
    }
    let theta = op.symbol().expect("symbol operators carry a symbol");
    let xs = f.max_index().max(1);
    let u = f.to_dense(xs);

    let values: Vec<f64> = match op.kind() {
        OperatorKind::Hankel => {
            // y_i = Σ_p u[p] θ[i−1+p]; correlate by convolving with reversed u.
            let t: Vec<f64> = (0..r + xs - 1).map(|q| theta.value(q)).collect();
            let rev: Vec<f64> = u.iter().rev().copied().collect();
            // wrap-around only reaches indices below xs − 1
            let c = cyclic_convolve(&t, &rev, t.len().next_power_of_two());
            (0..r).map(|i| c[i + xs - 1]).collect()
        }
        _ => {
            let t: Vec<f64> = (0..r).map(|q| theta.value(q)).collect();
            let c = convolve(&u, &t);
            (0..r).map(|i| c.get(i).copied().unwrap_or(0.0)).collect()
        }
    };
    let residual = match output_support(op, x) {
        Some(s) if s <= r => Residual::Exact,
        _ => Residual::Truncated,
    };
    Ok(ApplyResult {
        rows: values.iter().map(|&v| Coord::from_f64(v)).collect(),
        values,
        column_truncation: j,
        row_truncation: r,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::Symbol;

    #[test]
    fn convolution_matches_schoolbook() {
        let c = convolve(&[1.0, 2.0, 3.0], &[0.5, -1.0]);
        let expect = [0.5, 0.0, -0.5, -3.0];
        for (a, b) in c.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fast_path_agrees_normwise() {
        let theta: Vec<f64> = (0..300).map(|j| ((j * 7919) % 13) as f64 / 13.0 - 0.5).collect();
        let x = SequenceElement::from_dense(&(0..200).map(|j| ((j * 104729) % 17) as f64 / 17.0 - 0.5).collect::<Vec<_>>());
        for op in [OperatorSpec::hankel(Symbol::finite(&theta)), OperatorSpec::toeplitz(Symbol::finite(&theta))] {
            let slow = apply(&op, &x, 200, 256).unwrap();
            let fast = fast_apply(&op, &x, 200, 256).unwrap();
            let scale = slow.values.iter().fold(0f64, |m, v| m.max(v.abs()));
            for (a, b) in slow.values.iter().zip(&fast.values) {
                assert!((a - b).abs() <= 1e-10 * scale);
            }
        }
    }
}
