//! Visibility and width of a single dip or peak on a flat background.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveAnalysis {
    /// Mean of the outer 10% of rows on each side.
    pub baseline: f64,
    pub extremum: f64,
    pub extremum_tau_fs: f64,
    /// `|baseline − extremum| / baseline`.
    pub visibility: f64,
    /// Full width at half depth, linearly interpolated; `None` for flat
    /// curves or features that do not return to half depth inside the scan.
    pub fwhm_fs: Option<f64>,
}

fn check_rows(rows: &[(f64, f64)], min: usize) -> Result<()> {
    if rows.len() < min {
        return domain(format!(
            "curve analysis needs at least {min} rows, got {}",
            rows.len()
        ));
    }
    if rows.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) {
        return domain("curve contains non-finite values");
    }
    if rows.windows(2).any(|w| w[0].0 >= w[1].0) {
        return domain("curve delays must be strictly increasing");
    }
    Ok(())
}

pub fn analyze_curve(rows: &[(f64, f64)]) -> Result<CurveAnalysis> {
    check_rows(rows, 5)?;
    let n = rows.len();
    let edge = (n / 10).max(1);
    let outer = rows[..edge].iter().chain(&rows[n - edge..]);
    let baseline = outer.map(|(_, y)| y).sum::<f64>() / (2 * edge) as f64;

    let (index, &(extremum_tau_fs, extremum)) = rows
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| (a.1 - baseline).abs().total_cmp(&(b.1 - baseline).abs()))
        .expect("non-empty");
    let depth = extremum - baseline;
    if depth.abs() <= 1e-12 * baseline.abs() || depth == 0.0 {
        return Ok(CurveAnalysis {
            baseline,
            extremum,
            extremum_tau_fs,
            visibility: 0.0,
            fwhm_fs: None,
        });
    }
    if baseline.abs() <= f64::MIN_POSITIVE {
        return Err(Error::Domain(
            "visibility undefined on a zero baseline".into(),
        ));
    }

    let half = baseline + depth / 2.0;
    // Signed distance past the half level, toward the baseline side.
    let outside = |y: f64| (y - half) * -depth.signum() >= 0.0;
    let crossing = |i: usize, j: usize| {
        let ((ti, yi), (tj, yj)) = (rows[i], rows[j]);
        ti + (half - yi) * (tj - ti) / (yj - yi)
    };
    let left = (0..index)
        .rev()
        .find(|&i| outside(rows[i].1))
        .map(|i| crossing(i, i + 1));
    let right = ((index + 1)..n)
        .find(|&i| outside(rows[i].1))
        .map(|i| crossing(i - 1, i));
    let fwhm_fs = match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        _ => None,
    };
    Ok(CurveAnalysis {
        baseline,
        extremum,
        extremum_tau_fs,
        visibility: depth.abs() / baseline,
        fwhm_fs,
    })
}

/// Weighted least-squares fit of `baseline − amplitude·exp(−(τ−center)²/width²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianFit {
    pub baseline: f64,
    /// Positive for a dip, negative for a peak.
    pub amplitude: f64,
    pub width_fs: f64,
    /// `|amplitude| / baseline`.
    pub visibility: f64,
    /// One-sigma uncertainty of `visibility` from the fit covariance.
    pub visibility_stderr: f64,
    pub chi_square: f64,
}

/// Fits a Gaussian feature centred at `center_fs`.
///
/// `sigmas` are per-row standard deviations; `None` weights every row
/// equally. The width is profiled on a log grid and refined by golden-section
/// search; for each width, baseline and amplitude solve a 2×2 linear system.
pub fn fit_gaussian_feature(
    rows: &[(f64, f64)],
    sigmas: Option<&[f64]>,
    center_fs: f64,
) -> Result<GaussianFit> {
    check_rows(rows, 5)?;
    let weights: Vec<f64> = match sigmas {
        Some(s) if s.len() != rows.len() => return domain("sigma count does not match row count"),
        Some(s) if s.iter().any(|x| x.is_nan() || *x <= 0.0) => {
            return domain("sigmas must be positive")
        }
        Some(s) => s.iter().map(|x| 1.0 / (x * x)).collect(),
        None => vec![1.0; rows.len()],
    };
    let span = rows[rows.len() - 1].0 - rows[0].0;
    let min_step = rows
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .fold(f64::INFINITY, f64::min);

    let profile = |width: f64| -> (f64, f64, f64) {
        let mut normal = Matrix2::zeros();
        let mut rhs = Vector2::zeros();
        for ((t, y), w) in rows.iter().zip(&weights) {
            let g = gaussian(*t - center_fs, width);
            let basis = Vector2::new(1.0, -g);
            normal += *w * basis * basis.transpose();
            rhs += w * y * basis;
        }
        let Some(solution) = normal.lu().solve(&rhs) else {
            return (f64::NAN, f64::NAN, f64::INFINITY);
        };
        let (b, a) = (solution[0], solution[1]);
        let chi: f64 = rows
            .iter()
            .zip(&weights)
            .map(|((t, y), w)| w * (y - b + a * gaussian(*t - center_fs, width)).powi(2))
            .sum();
        (b, a, chi)
    };

    let (lo, hi) = ((min_step / 4.0).ln(), span.ln());
    const COARSE: usize = 80;
    let coarse: Vec<(f64, f64)> = (0..=COARSE)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / COARSE as f64;
            (x, profile(x.exp()).2)
        })
        .collect();
    let best = coarse
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("non-empty");
    let mut a = coarse[best.saturating_sub(1)].0;
    let mut b = coarse[(best + 1).min(COARSE)].0;
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (profile(x1.exp()).2, profile(x2.exp()).2);
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = profile(x1.exp()).2;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = profile(x2.exp()).2;
        }
    }
    let width = (0.5 * (a + b)).exp();
    let (baseline, amplitude, chi_square) = profile(width);
    if !baseline.is_finite() || baseline <= 0.0 {
        return domain("fit produced a non-positive baseline");
    }

    let mut information = Matrix3::zeros();
    for ((t, _), w) in rows.iter().zip(&weights) {
        let dt = *t - center_fs;
        let g = gaussian(dt, width);
        let jac = Vector3::new(1.0, -g, -amplitude * g * 2.0 * dt * dt / width.powi(3));
        information += *w * jac * jac.transpose();
    }
    let covariance = information
        .try_inverse()
        .ok_or_else(|| Error::Numeric("singular fit information matrix".into()))?;
    let grad = Vector3::new(-amplitude / (baseline * baseline), 1.0 / baseline, 0.0);
    let variance = (grad.transpose() * covariance * grad)[0];

    Ok(GaussianFit {
        baseline,
        amplitude,
        width_fs: width,
        visibility: amplitude.abs() / baseline,
        visibility_stderr: variance.max(0.0).sqrt(),
        chi_square,
    })
}

fn gaussian(dt: f64, width: f64) -> f64 {
    (-(dt * dt) / (width * width)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, half_span: f64) -> Vec<f64> {
        (0..n)
            .map(|i| -half_span + 2.0 * half_span * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn constant_curve_has_zero_visibility() {
        let rows: Vec<_> = grid(11, 5.0).into_iter().map(|t| (t, 0.7)).collect();
        let a = analyze_curve(&rows).unwrap();
        assert_eq!(a.visibility, 0.0);
        assert_eq!(a.fwhm_fs, None);
    }

    #[test]
    fn triangular_dip_to_half() {
        // Dip from 1.0 to 0.5 at the centre, linear flanks over ±2.
        let rows: Vec<_> = grid(21, 5.0)
            .into_iter()
            .map(|t: f64| (t, 1.0 - 0.5 * (1.0 - t.abs() / 2.0).max(0.0)))
            .collect();
        let a = analyze_curve(&rows).unwrap();
        assert!((a.baseline - 1.0).abs() < 1e-15);
        assert!((a.visibility - 0.5).abs() < 1e-15);
        assert!((a.fwhm_fs.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(a.extremum_tau_fs, 0.0);
    }

    #[test]
    fn peak_width_is_measured_too() {
        let rows: Vec<_> = grid(201, 5.0)
            .into_iter()
            .map(|t| (t, 1.0 + (-t * t / 2.0).exp()))
            .collect();
        let a = analyze_curve(&rows).unwrap();
        assert!((a.visibility - 1.0).abs() < 1e-3);
        let exact = 2.0 * (2.0 * 2f64.ln()).sqrt();
        assert!((a.fwhm_fs.unwrap() - exact).abs() < 0.05);
    }

    #[test]
    fn too_few_rows() {
        let rows = [(0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (3.0, 1.0)];
        assert!(analyze_curve(&rows).is_err());
    }

    #[test]
    fn feature_without_a_right_flank_has_no_width() {
        // Left edge at 1.0, right edge at 0.2: the baseline is 0.6 and the
        // right side never climbs back above the half level of 0.3.
        let rows: Vec<_> = grid(21, 10.0)
            .into_iter()
            .map(|t| {
                (
                    t,
                    if t < -3.0 {
                        1.0
                    } else if t <= 3.0 {
                        0.0
                    } else {
                        0.2
                    },
                )
            })
            .collect();
        let a = analyze_curve(&rows).unwrap();
        assert!((a.baseline - 0.6).abs() < 1e-15);
        assert_eq!(a.extremum, 0.0);
        assert_eq!(a.fwhm_fs, None);
    }

    #[test]
    fn fit_recovers_exact_gaussian() {
        let rows: Vec<_> = grid(101, 600.0)
            .into_iter()
            .map(|t| (t, 0.5 - 0.4 * (-t * t / (200.0 * 200.0)).exp()))
            .collect();
        let fit = fit_gaussian_feature(&rows, None, 0.0).unwrap();
        assert!((fit.baseline - 0.5).abs() < 1e-9);
        assert!((fit.amplitude - 0.4).abs() < 1e-9);
        assert!((fit.width_fs - 200.0).abs() < 1e-6);
        assert!((fit.visibility - 0.8).abs() < 1e-9);
    }

    #[test]
    fn fit_handles_peaks() {
        let rows: Vec<_> = grid(61, 3.0)
            .into_iter()
            .map(|t| (t, 2.0 + 1.0 * (-t * t).exp()))
            .collect();
        let fit = fit_gaussian_feature(&rows, None, 0.0).unwrap();
        assert!((fit.amplitude + 1.0).abs() < 1e-9);
        assert!((fit.visibility - 0.5).abs() < 1e-9);
    }
}
