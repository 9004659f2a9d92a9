//! Numerical fiber probing: complex root finding, fiber slices `f(x, ·) = c`,
//! and sampled upper bounds on `dist(X_s, X_t)` at growing radii.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::MultiPoly;

/// Complex float carrier for fiber points.
pub type ComplexF = Complex64;

pub const ROOT_RESIDUAL_TOL: f64 = 1e-9;
pub const ROOT_CLUSTER_TOL: f64 = 1e-6;
const MAX_ITERATIONS: usize = 2000;
const REFINE_STEPS: usize = 40;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProbeError {
    #[error("invalid probe input: {0}")]
    InvalidInput(String),
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("root iteration did not converge after {0} iterations")]
    NonConvergence(usize),
    #[error("degenerate fiber slice at x = {0}")]
    DegenerateSlice(ComplexF),
    #[error("every radius was degenerate")]
    AllRadiiDegenerate,
}

/// All complex roots of `Σ coeffs[k]·z^k` (lowest degree first) by
/// Aberth–Ehrlich simultaneous iteration.
pub fn roots_univariate(coeffs: &[ComplexF]) -> Result<Vec<ComplexF>, ProbeError> {
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(ProbeError::NonFinite);
    }
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Err(ProbeError::InvalidInput("degree must be at least 1".into()));
    }
    if coeffs[deg] == Complex64::new(0.0, 0.0) {
        return Err(ProbeError::InvalidInput("leading coefficient is zero".into()));
    }
    // exact zero roots first
    let zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let lead = coeffs[deg];
    let monic: Vec<ComplexF> = coeffs[zeros..].iter().map(|c| c / lead).collect();
    let n = monic.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(-monic[0]);
        return Ok(roots);
    }

    let radius = monic[0].norm().powf(1.0 / n as f64).max(f64::MIN_POSITIVE);
    let mut z: Vec<ComplexF> =
        (0..n).map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4)).collect();
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner_with_derivative(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = p / dp;
            let repulsion: ComplexF = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = newton / (1.0 - newton * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // coincident approximations: nudge apart
                z[i] += Complex64::new(radius * 1e-3, radius * 1e-3);
                max_step = f64::INFINITY;
                continue;
            }
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
        }
        if max_step <= 1e-15 {
            converged = true;
            break;
        }
    }
    // a few Newton polishing steps where they help
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner_with_derivative(&monic, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let cand = *zi - p / dp;
            if horner(&monic, cand).norm() < p.norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for zi in &z {
        if !zi.re.is_finite() || !zi.im.is_finite() {
            return Err(ProbeError::NonFinite);
        }
        let bound = ROOT_RESIDUAL_TOL * scale * zi.norm().max(1.0).powi(deg as i32);
        let residual = horner(coeffs, *zi).norm();
        if residual > bound && !converged {
            return Err(ProbeError::NonConvergence(MAX_ITERATIONS));
        }
        if residual > bound {
            return Err(ProbeError::NonConvergence(MAX_ITERATIONS));
        }
    }
    roots.extend(z);
    Ok(roots)
}

/// Groups roots closer than `tol` (relative to `max(1, |z|)`) and returns
/// cluster centres with their sizes.
pub fn cluster_roots(roots: &[ComplexF], tol: f64) -> Vec<(ComplexF, usize)> {
    let mut clusters: Vec<(ComplexF, usize)> = Vec::new();
    for &r in roots {
        match clusters.iter_mut().find(|(c, k)| ((*c / *k as f64) - r).norm() <= tol * r.norm().max(1.0)) {
            Some((sum, k)) => {
                *sum += r;
                *k += 1;
            }
            None => clusters.push((r, 1)),
        }
    }
    clusters.into_iter().map(|(sum, k)| (sum / k as f64, k)).collect()
}

fn horner(coeffs: &[ComplexF], z: ComplexF) -> ComplexF {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn horner_with_derivative(coeffs: &[ComplexF], z: ComplexF) -> (ComplexF, ComplexF) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Pre-split `f(x, y) = Σ c_k(x) y^k`, so repeated slices avoid re-expansion.
#[derive(Debug, Clone)]
pub struct FiberSlicer {
    y_coeffs: Vec<MultiPoly>,
}

impl FiberSlicer {
    pub fn new(f: &MultiPoly) -> Result<Self, ProbeError> {
        if f.nvars() != 2 {
            return Err(ProbeError::InvalidInput(format!(
                "fiber slices need a bivariate polynomial, got {} variables",
                f.nvars()
            )));
        }
        if f.degree_in(1).unwrap_or(0) == 0 {
            return Err(ProbeError::InvalidInput("polynomial does not involve y".into()));
        }
        Ok(Self { y_coeffs: f.coefficients_in(1) })
    }

    /// All `y` with `f(x, y) = value`.
    pub fn slice(&self, value: ComplexF, x: ComplexF) -> Result<Vec<ComplexF>, ProbeError> {
        match self.try_slice(value, x) {
            Err(ProbeError::DegenerateSlice(_)) => self.try_slice(value, x * (1.0 + 1e-6)),
            other => other,
        }
    }

    fn try_slice(&self, value: ComplexF, x: ComplexF) -> Result<Vec<ComplexF>, ProbeError> {
        let point = [x, Complex64::new(0.0, 0.0)];
        let mut coeffs: Vec<ComplexF> = self.y_coeffs.iter().map(|c| c.eval_complex(&point)).collect();
        coeffs[0] -= value;
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let top = coeffs[coeffs.len() - 1];
        if !scale.is_finite() {
            return Err(ProbeError::NonFinite);
        }
        if top.norm() <= 1e-12 * scale || scale == 0.0 {
            return Err(ProbeError::DegenerateSlice(x));
        }
        roots_univariate(&coeffs)
    }
}

/// `{ y : f(x, y) = value }` for bivariate `f`.
pub fn fiber_slice(f: &MultiPoly, value: ComplexF, x: ComplexF) -> Result<Vec<ComplexF>, ProbeError> {
    FiberSlicer::new(f)?.slice(value, x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub exponent: f64,
    pub std_error: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Option<ExponentFit> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let std_error = if n > 2 {
        let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(ExponentFit { exponent: slope, std_error })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub radii: Vec<f64>,
    pub angles_per_radius: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { radii: vec![1e1, 1e2, 1e3, 1e4], angles_per_radius: 64, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub radius: f64,
    pub angle: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceProbeReport {
    pub s: ComplexF,
    pub t: ComplexF,
    /// Radii that produced a measurement, increasing.
    pub radii: Vec<f64>,
    pub min_distance_per_radius: Vec<f64>,
    /// Present only when at least four radii succeeded.
    pub fitted_exponent: Option<ExponentFit>,
    pub ratio_to_value_gap: f64,
    pub skipped_radii: Vec<f64>,
    pub degenerate_samples: usize,
    /// Raw same-x samples, for CSV export.
    pub samples: Vec<ProbeSample>,
}

impl DistanceProbeReport {
    /// Relative spread `(max - min) / min` of the per-radius distances.
    pub fn relative_variation(&self) -> f64 {
        let max = self.min_distance_per_radius.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.min_distance_per_radius.iter().cloned().fold(f64::MAX, f64::min);
        (max - min) / min
    }
}

fn pair_distance(ys: &[ComplexF], yt: &[ComplexF], dx: ComplexF) -> f64 {
    let dx2 = dx.norm_sqr();
    ys.iter().flat_map(|a| yt.iter().map(move |b| (dx2 + (a - b).norm_sqr()).sqrt())).fold(f64::INFINITY, f64::min)
}

/// Samples `X_s` and `X_t` over circles `|x| = R`, pairing points with the
/// same `x`, then tightens the best pair by coordinate descent over the
/// angle and the `x`-offset of the `X_t` point.
pub fn distance_probe(
    f: &MultiPoly,
    s: ComplexF,
    t: ComplexF,
    config: &ProbeConfig,
) -> Result<DistanceProbeReport, ProbeError> {
    if s == t {
        return Err(ProbeError::InvalidInput("s and t must differ".into()));
    }
    if config.radii.len() < 2 || config.radii.windows(2).any(|w| w[0] >= w[1]) || config.radii[0] <= 0.0 {
        return Err(ProbeError::InvalidInput("radii must be positive, increasing, at least two".into()));
    }
    if config.angles_per_radius == 0 {
        return Err(ProbeError::InvalidInput("angles_per_radius must be positive".into()));
    }
    let slicer = FiberSlicer::new(f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sector = 2.0 * PI / config.angles_per_radius as f64;
    let offset = rng.gen_range(0.0..sector);

    let mut radii = Vec::new();
    let mut dists = Vec::new();
    let mut skipped = Vec::new();
    let mut samples = Vec::new();
    let mut degenerate = 0;
    for &r in &config.radii {
        let mut best: Option<(f64, f64)> = None;
        for k in 0..config.angles_per_radius {
            let theta = offset + sector * k as f64;
            let x = Complex64::from_polar(r, theta);
            let (Ok(ys), Ok(yt)) = (slicer.slice(s, x), slicer.slice(t, x)) else {
                degenerate += 1;
                continue;
            };
            let d = pair_distance(&ys, &yt, Complex64::new(0.0, 0.0));
            samples.push(ProbeSample { radius: r, angle: theta, distance: d });
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, theta));
            }
        }
        let Some((d0, theta0)) = best else {
            skipped.push(r);
            continue;
        };
        let refined = refine(&slicer, s, t, r, theta0, d0, sector);
        radii.push(r);
        dists.push(refined);
    }
    if radii.is_empty() {
        return Err(ProbeError::AllRadiiDegenerate);
    }
    let fitted_exponent = if radii.len() >= 4 { fit_power_law(&radii, &dists) } else { None };
    let gap = (s - t).norm();
    let ratio = dists.iter().map(|d| d / gap).fold(f64::INFINITY, f64::min);
    Ok(DistanceProbeReport {
        s,
        t,
        radii,
        min_distance_per_radius: dists,
        fitted_exponent,
        ratio_to_value_gap: ratio,
        skipped_radii: skipped,
        degenerate_samples: degenerate,
        samples,
    })
}

fn refine(slicer: &FiberSlicer, s: ComplexF, t: ComplexF, r: f64, theta0: f64, d0: f64, sector: f64) -> f64 {
    let eval = |theta: f64, delta: ComplexF| -> Option<f64> {
        let x = Complex64::from_polar(r, theta);
        let ys = slicer.slice(s, x).ok()?;
        let yt = slicer.slice(t, x + delta).ok()?;
        let d = pair_distance(&ys, &yt, delta);
        d.is_finite().then_some(d)
    };
    let mut theta = theta0;
    let mut delta = Complex64::new(0.0, 0.0);
    let mut best = d0;
    let mut h_theta = sector / 2.0;
    let mut h_delta = d0.max(1e-300);
    for _ in 0..REFINE_STEPS {
        for coord in 0..3 {
            for sign in [1.0, -1.0] {
                let (th, de) = match coord {
                    0 => (theta + sign * h_theta, delta),
                    1 => (theta, delta + Complex64::new(sign * h_delta, 0.0)),
                    _ => (theta, delta + Complex64::new(0.0, sign * h_delta)),
                };
                if let Some(d) = eval(th, de) {
                    if d < best {
                        best = d;
                        theta = th;
                        delta = de;
                    }
                }
            }
        }
        h_theta *= 0.5;
        h_delta *= 0.5;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianRational;

    fn c(re: f64, im: f64) -> ComplexF {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<ComplexF>) -> Vec<ComplexF> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn roots_of_z2_plus_1() {
        let r = sorted(roots_univariate(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap());
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn double_root_clusters() {
        let r = roots_univariate(&[c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(r.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-6));
        let cl = cluster_roots(&r, ROOT_CLUSTER_TOL);
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].1, 2);
    }

    #[test]
    fn recovers_constructed_roots() {
        let chosen = [c(1.5, -0.5), c(-2.0, 0.25), c(0.0, 3.0), c(0.75, 0.75), c(-1.0, -1.0)];
        let mut coeffs = vec![c(1.0, 0.0)];
        for r in chosen {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (k, a) in coeffs.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            coeffs = next;
        }
        let found = roots_univariate(&coeffs).unwrap();
        for r in chosen {
            let nearest = found.iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-8, "{r} missing, nearest {nearest}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(roots_univariate(&[c(1.0, 0.0)]).is_err());
        assert!(roots_univariate(&[c(1.0, 0.0), c(0.0, 0.0)]).is_err());
        assert_eq!(roots_univariate(&[c(f64::NAN, 0.0), c(1.0, 0.0)]), Err(ProbeError::NonFinite));
    }

    fn xy() -> MultiPoly {
        MultiPoly::monomial(2, vec![1, 1], GaussianRational::one())
    }

    fn x_plus_y2() -> MultiPoly {
        &MultiPoly::var(2, 0) + &MultiPoly::var(2, 1).pow(2)
    }

    #[test]
    fn slices() {
        let r = fiber_slice(&xy(), c(1.0, 0.0), c(100.0, 0.0)).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(0.01, 0.0)).norm() < 1e-15);

        let r = sorted(fiber_slice(&x_plus_y2(), c(1.0, 0.0), c(-10000.0, 0.0)).unwrap());
        let root = 10001f64.sqrt();
        assert!((r[0] + root).norm() < 1e-9 && (r[1] - root).norm() < 1e-9);

        assert!(matches!(fiber_slice(&xy(), c(1.0, 0.0), c(0.0, 0.0)), Err(ProbeError::DegenerateSlice(_))));
    }

    #[test]
    fn power_law_fit_is_exact_on_clean_data() {
        let xs = [10.0, 100.0, 1000.0, 10000.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.75)).collect();
        let fit = fit_power_law(&xs, &ys).unwrap();
        assert!((fit.exponent + 0.75).abs() < 1e-12);
        assert!(fit.std_error < 1e-12);
    }

    #[test]
    fn xy_probe_decays_like_inverse_radius() {
        let rep = distance_probe(&xy(), c(1.0, 0.0), c(2.0, 0.0), &ProbeConfig::default()).unwrap();
        for (r, d) in rep.radii.iter().zip(&rep.min_distance_per_radius) {
            assert!(*d <= 1.1 / r, "R={r}: {d}");
        }
        let fit = rep.fitted_exponent.unwrap();
        assert!((fit.exponent + 1.0).abs() < 0.1, "{fit:?}");
    }

    #[test]
    fn probe_is_deterministic() {
        let cfg = ProbeConfig { radii: vec![10.0, 100.0], angles_per_radius: 8, seed: 7 };
        let a = distance_probe(&x_plus_y2(), c(1.0, 0.0), c(2.0, 0.0), &cfg).unwrap();
        let b = distance_probe(&x_plus_y2(), c(1.0, 0.0), c(2.0, 0.0), &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.fitted_exponent.is_none());
    }

    #[test]
    fn probe_input_validation() {
        let cfg = ProbeConfig { radii: vec![100.0, 10.0], ..ProbeConfig::default() };
        assert!(distance_probe(&xy(), c(1.0, 0.0), c(2.0, 0.0), &cfg).is_err());
        assert!(distance_probe(&xy(), c(1.0, 0.0), c(1.0, 0.0), &ProbeConfig::default()).is_err());
    }
}
