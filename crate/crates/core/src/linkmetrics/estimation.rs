//! Second-order statistics of the jammed channel estimate and of the noise
//! left after zero forcing with that estimate.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{complex_gaussian, left_pinv, sample_complex_gaussian, CMatrix, C64};
use crate::phy::{build_pilot, ls_estimate, ZfDetector};

fn check_dims(h_rows: usize, g: &CMatrix, k: usize) -> Result<()> {
    if g.rows() != h_rows {
        return Err(Error::DimensionMismatch(format!(
            "G has {} rows, expected {h_rows}",
            g.rows()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidConfig("pilot length must be positive".into()));
    }
    Ok(())
}

/// `E_j G G^H + N0 I`, the covariance of one received jamming-plus-noise
/// column.
fn interference_cov(g: &CMatrix, e_j: f64, n0: f64) -> CMatrix {
    &(g * &g.adjoint()).scale(e_j) + &CMatrix::identity(g.rows()).scale(n0)
}

/// `E{H~ A H~^H} = tr(A) / (K Es) (E_j G G^H + N0 I_N)` for the estimation
/// error `H~` of a least-squares estimate from a jammed orthogonal pilot.
pub fn estimation_error_moment(
    g: &CMatrix,
    a: &CMatrix,
    k: usize,
    es: f64,
    e_j: f64,
    n0: f64,
) -> Result<CMatrix> {
    check_dims(g.rows(), g, k)?;
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "A must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let tr = a.trace();
    Ok(interference_cov(g, e_j, n0).scale_complex(tr / (k as f64 * es)))
}

/// Approximate autocorrelation of the post-ZF noise under pilot jamming,
/// `(1 + 1/K) N0 (H^H H)^{-1} + (M/K) E_j H^+ G G^H (H^+)^H`.
pub fn post_noise_autocorr(
    h: &CMatrix,
    g: &CMatrix,
    k: usize,
    e_j: f64,
    n0: f64,
) -> Result<CMatrix> {
    check_dims(h.rows(), g, k)?;
    let hp = left_pinv(h)?;
    let m = h.cols() as f64;
    let kf = k as f64;
    let noise = (&hp * &hp.adjoint()).scale((1.0 + 1.0 / kf) * n0);
    let jam = (&(&hp * g) * &(&hp * g).adjoint()).scale(m / kf * e_j);
    Ok(&noise + &jam)
}

/// First-order autocorrelation keeping every term of the expansion:
/// `N0 (H^H H)^{-1} + (M/K + N0 tr((H^H H)^{-1}) / (K Es)) H^+ C (H^+)^H`
/// with `C = E_j G G^H + N0 I`.
pub fn post_noise_autocorr_full(
    h: &CMatrix,
    g: &CMatrix,
    k: usize,
    es: f64,
    e_j: f64,
    n0: f64,
) -> Result<CMatrix> {
    check_dims(h.rows(), g, k)?;
    let hp = left_pinv(h)?;
    let inv_gram = &hp * &hp.adjoint();
    let m = h.cols() as f64;
    let kf = k as f64;
    let coef = m / kf + n0 * inv_gram.trace().re / (kf * es);
    let c = interference_cov(g, e_j, n0);
    let jam = (&(&hp * &c) * &hp.adjoint()).scale(coef);
    Ok(&inv_gram.scale(n0) + &jam)
}

/// Monte Carlo `E{H~ A H~^H}`: each trial jams and re-estimates the channel.
pub fn sample_estimation_error_moment<R: Rng + ?Sized>(
    h: &CMatrix,
    g: &CMatrix,
    a: &CMatrix,
    k: usize,
    es: f64,
    e_j: f64,
    n0: f64,
    trials: usize,
    rng: &mut R,
) -> Result<CMatrix> {
    check_dims(h.rows(), g, k)?;
    let (n, m) = h.shape();
    let pilot = build_pilot(m, k, es)?;
    let clean = h * &pilot.matrix;
    let mut acc = CMatrix::zeros(n, n);
    for _ in 0..trials {
        let z = sample_complex_gaussian(g.cols(), k, e_j, rng)?;
        let w = sample_complex_gaussian(n, k, n0, rng)?;
        let y = &(&clean + &(g * &z)) + &w;
        let err = &ls_estimate(&y, &pilot)? - h;
        acc = &acc + &(&(&err * a) * &err.adjoint());
    }
    Ok(acc.scale(1.0 / trials.max(1) as f64))
}

/// Monte Carlo autocorrelation of `x^ - x` after zero forcing with a
/// freshly jammed estimate for every symbol.
pub fn sample_post_noise_autocorr<R: Rng + ?Sized>(
    h: &CMatrix,
    g: &CMatrix,
    k: usize,
    es: f64,
    e_j: f64,
    n0: f64,
    symbols: usize,
    rng: &mut R,
) -> Result<CMatrix> {
    check_dims(h.rows(), g, k)?;
    let (n, m) = h.shape();
    let pilot = build_pilot(m, k, es)?;
    let clean = h * &pilot.matrix;
    let mut acc = CMatrix::zeros(m, m);
    let mut x = vec![C64::new(0.0, 0.0); m];
    let mut y = vec![C64::new(0.0, 0.0); n];
    let mut xh = vec![C64::new(0.0, 0.0); m];
    for _ in 0..symbols {
        let z = sample_complex_gaussian(g.cols(), k, e_j, rng)?;
        let w = sample_complex_gaussian(n, k, n0, rng)?;
        let h_hat = ls_estimate(&(&(&clean + &(g * &z)) + &w), &pilot)?;
        let zf = ZfDetector::new(&h_hat)?;
        for xi in x.iter_mut() {
            *xi = complex_gaussian(es, rng);
        }
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = (0..m).map(|c| h[(r, c)] * x[c]).sum::<C64>() + complex_gaussian(n0, rng);
        }
        zf.detect_into(&y, &mut xh);
        for i in 0..m {
            let ei = xh[i] - x[i];
            for j in 0..m {
                let ej = xh[j] - x[j];
                acc[(i, j)] += ei * ej.conj();
            }
        }
    }
    Ok(acc.scale(1.0 / symbols.max(1) as f64))
}

/// Largest entrywise relative error `|a_ij - b_ij| / |b_ij|`.
pub fn max_relative_error(a: &CMatrix, b: &CMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm() / y.norm())
        .fold(0.0, f64::max)
}

/// `||a - b||_F / ||b||_F`.
pub fn frobenius_relative_error(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).frobenius_norm() / b.frobenius_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn moment_scales_with_trace() {
        let g = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let a = CMatrix::identity(3).scale(2.0);
        let mom = estimation_error_moment(&g, &a, 8, 1.0, 0.5, 0.1).unwrap();
        // tr(A) / (K Es) = 6 / 8.
        assert!((mom[(0, 0)].re - 0.75 * 0.6).abs() < 1e-12);
        assert!((mom[(1, 1)].re - 0.75 * 2.1).abs() < 1e-12);
        assert!(mom[(0, 1)].norm() < 1e-12);
        assert!(estimation_error_moment(&g, &CMatrix::zeros(2, 3), 8, 1.0, 0.5, 0.1).is_err());
        assert!(estimation_error_moment(&g, &a, 0, 1.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn unjammed_estimate_error_variance() {
        let mut rng = stream_rng(1, 0, 0);
        let h = sample_complex_gaussian(2, 2, 1.0, &mut rng).unwrap();
        let g = CMatrix::zeros(2, 2);
        let n0 = 0.2;
        let k = 8;
        // A = e_1 e_1^T picks |H~_{i1}|^2 on the diagonal.
        let a = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let mc = sample_estimation_error_moment(&h, &g, &a, k, 1.0, 0.0, n0, 20_000, &mut rng).unwrap();
        for i in 0..2 {
            let v = mc[(i, i)].re;
            let want = n0 / k as f64;
            assert!((v - want).abs() < 0.05 * want, "{v} vs {want}");
        }
    }

    #[test]
    fn approximations_agree_at_high_snr() {
        let mut rng = stream_rng(2, 0, 0);
        let h = sample_complex_gaussian(3, 2, 1.0, &mut rng).unwrap();
        let g = sample_complex_gaussian(3, 2, 1.0, &mut rng).unwrap();
        let a = post_noise_autocorr(&h, &g, 16, 0.1, 1e-6).unwrap();
        let b = post_noise_autocorr_full(&h, &g, 16, 1.0, 0.1, 1e-6).unwrap();
        assert!(frobenius_relative_error(&a, &b) < 1e-4);
    }

    #[test]
    fn post_noise_matches_full_form() {
        let mut rng = stream_rng(3, 0, 0);
        let h = sample_complex_gaussian(2, 2, 1.0, &mut rng).unwrap();
        let g = sample_complex_gaussian(2, 2, 1.0, &mut rng).unwrap();
        let (k, es, e_j, n0) = (16, 1.0, 0.05, 0.01);
        let mc = sample_post_noise_autocorr(&h, &g, k, es, e_j, n0, 20_000, &mut rng).unwrap();
        let full = post_noise_autocorr_full(&h, &g, k, es, e_j, n0).unwrap();
        let err = frobenius_relative_error(&mc, &full);
        assert!(err < 0.1, "{err}");
    }
}
