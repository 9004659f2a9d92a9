//! Newton polygons and Newton–Puiseux expansion of `g(u, v) = 0` in `v` at
//! the origin.
//!
//! Each branch is returned once, as a series `ψ(s)` with `u = s^Q`; its
//! conjugates are `ψ(ω^k s)` for the `Q`-th roots of unity `ω^k`.

use num_complex::Complex64;
use num_integer::Integer;

use crate::gaussian::GaussianRational;
use crate::poly::MultiPoly;
use crate::probe::{cluster_roots, roots_univariate, ProbeError, ROOT_CLUSTER_TOL};
use crate::scalar::{series_add, series_inv, series_mul, series_sub, series_zero, Scalar, Series};
use crate::univariate::{cmp_gaussian, UniPoly};

/// Relative tolerance for reconstruction checks once floats are involved.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
const CLEAN_TOL: f64 = 1e-9;
const CLUSTER_CLEAN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PuiseuxError {
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("expected a polynomial in (u, v)")]
    NotBivariate,
    #[error("g(0, 0) != 0: no branch passes through the origin")]
    UnitAtOrigin,
    #[error("g(0, v) vanishes identically: not regular in v")]
    NotVRegular,
    #[error("v = 0 is a component of the curve")]
    ZeroRoot,
    #[error("numeric root finding failed: {0}")]
    Numeric(#[from] ProbeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonEdge {
    /// Endpoint with the larger `v`-exponent, as `(i, j)` for `u^i v^j`.
    pub start: (u32, u32),
    pub end: (u32, u32),
    /// `v ~ u^{slope_num / slope_den}` along this edge, in lowest terms.
    pub slope_num: u32,
    pub slope_den: u32,
    pub points: Vec<(u32, u32)>,
    /// `Σ h_ij c^{j - j_end}` over the points on the edge.
    pub polynomial: UniPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub support: Vec<(u32, u32)>,
    pub edges: Vec<NewtonEdge>,
}

/// Lower hull from the lowest point on the smallest `i` column to the
/// leftmost point on the lowest `j` row; slopes come out increasing.
fn hull_edges(support: &[(u32, u32)]) -> Vec<Vec<(u32, u32)>> {
    let i_min = support.iter().map(|p| p.0).min().expect("nonempty support");
    let j_min = support.iter().map(|p| p.1).min().expect("nonempty support");
    let mut current = *support.iter().filter(|p| p.0 == i_min).min_by_key(|p| p.1).expect("column");
    let mut edges = Vec::new();
    while current.1 > j_min {
        let below: Vec<&(u32, u32)> = support.iter().filter(|p| p.1 < current.1).collect();
        // compare (i - ic)/(jc - j) as fractions
        let slope = |p: &(u32, u32)| (p.0 as i64 - current.0 as i64, (current.1 - p.1) as i64);
        let best = below.iter().map(|p| slope(p)).min_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1))).expect("points below");
        let mut on_edge: Vec<(u32, u32)> =
            below.iter().filter(|p| slope(p).0 * best.1 == best.0 * slope(p).1).map(|p| **p).collect();
        on_edge.push(current);
        on_edge.sort_by_key(|p| std::cmp::Reverse(p.1));
        current = *on_edge.last().expect("edge");
        edges.push(on_edge);
    }
    edges
}

fn reduced_slope(edge: &[(u32, u32)]) -> (u32, u32) {
    let (a, b) = (edge[0], edge[edge.len() - 1]);
    let di = b.0 - a.0;
    let dj = a.1 - b.1;
    let g = di.gcd(&dj);
    (di / g, dj / g)
}

pub fn newton_polygon(g: &MultiPoly) -> Result<NewtonPolygon, PuiseuxError> {
    if g.is_zero() {
        return Err(PuiseuxError::ZeroPolynomial);
    }
    if g.nvars() != 2 {
        return Err(PuiseuxError::NotBivariate);
    }
    if !g.constant_term().is_zero() {
        return Err(PuiseuxError::UnitAtOrigin);
    }
    let support: Vec<(u32, u32)> = g.terms().map(|(e, _)| (e[0], e[1])).collect();
    let edges = hull_edges(&support)
        .into_iter()
        .map(|pts| {
            let (num, den) = reduced_slope(&pts);
            let j_end = pts[pts.len() - 1].1;
            let mut coeffs = vec![GaussianRational::zero(); (pts[0].1 - j_end) as usize + 1];
            for p in &pts {
                coeffs[(p.1 - j_end) as usize] = g.coefficient(&[p.0, p.1]);
            }
            NewtonEdge {
                start: pts[0],
                end: pts[pts.len() - 1],
                slope_num: num,
                slope_den: den,
                points: pts,
                polynomial: UniPoly::new(coeffs),
            }
        })
        .collect();
    Ok(NewtonPolygon { support, edges })
}

/// One branch `v = ψ(s)`, `u = s^Q`, of `g(u, v) = 0` at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PuiseuxBranch {
    pub ramification: u32,
    /// `s`-valuation of `ψ`; the leading `u`-exponent is `beta / ramification`.
    pub beta: u32,
    pub b0: Scalar,
    /// `ψ(s) = Σ coeffs[k]·s^k` for `k < truncation_order·ramification`.
    pub coeffs: Series,
    /// Precision in `u`-units.
    pub truncation_order: u32,
    /// Greater than 1 only for a repeated root that did not separate within
    /// the truncation order.
    pub multiplicity: u32,
}

impl PuiseuxBranch {
    /// Builds a branch from explicit coefficients; `beta` and `b0` are read off.
    pub fn from_coeffs(ramification: u32, coeffs: Series, truncation_order: u32) -> Option<Self> {
        let beta = coeffs.iter().position(|c| !c.is_zero())?;
        Some(Self {
            ramification,
            beta: beta as u32,
            b0: coeffs[beta].clone(),
            coeffs,
            truncation_order,
            multiplicity: 1,
        })
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_exact)
    }

    pub fn is_reduced(&self) -> bool {
        self.multiplicity == 1
    }

    /// Coefficients of `ψ(ω^k s)` for `ω = exp(2πi/Q)`.
    pub fn conjugate(&self, k: u32) -> Series {
        let omega = Scalar::root_of_unity(self.ramification);
        let step = omega.pow(k % self.ramification.max(1));
        let mut w = Scalar::one();
        self.coeffs
            .iter()
            .map(|c| {
                let out = c * &w;
                w = &w * &step;
                out
            })
            .collect()
    }
}

/// `(Bivar.rows[j][i])` is the coefficient of `s^i y^j`.
#[derive(Debug, Clone)]
struct Bivar {
    rows: Vec<Vec<Scalar>>,
}

impl Bivar {
    fn from_poly(g: &MultiPoly) -> Self {
        let dj = g.degree_in(1).unwrap_or(0) as usize;
        let di = g.degree_in(0).unwrap_or(0) as usize;
        let mut rows = vec![series_zero(di + 1); dj + 1];
        for (e, c) in g.terms() {
            rows[e[1] as usize][e[0] as usize] = Scalar::Exact(c.clone());
        }
        let mut b = Self { rows };
        b.trim();
        b
    }

    fn trim(&mut self) {
        for row in &mut self.rows {
            while row.last().is_some_and(Scalar::is_zero) {
                row.pop();
            }
        }
        while self.rows.last().is_some_and(|r| r.is_empty()) {
            self.rows.pop();
        }
    }

    fn support(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (j, row) in self.rows.iter().enumerate() {
            for (i, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    out.push((i as u32, j as u32));
                }
            }
        }
        out
    }

    fn coeff(&self, i: u32, j: u32) -> Scalar {
        self.rows.get(j as usize).and_then(|r| r.get(i as usize)).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Lowest `y`-power present.
    fn y_order(&self) -> usize {
        self.rows.iter().position(|r| !r.is_empty()).unwrap_or(0)
    }

    fn drop_y_power(&mut self, k: usize) {
        self.rows.drain(..k);
    }

    /// Divides by the largest power of `s` dividing every row.
    fn normalize_s(&mut self) {
        let shift = self.rows.iter().filter_map(|r| r.iter().position(|c| !c.is_zero())).min().unwrap_or(0);
        for row in &mut self.rows {
            if row.len() >= shift {
                row.drain(..shift);
            }
        }
        self.trim();
    }

    /// `H(s^q, s^p (c + y)) / s^{M}` with `M` maximal, zeroing float
    /// coefficients that cancel to within `tol` of their contributions.
    fn transform(&self, q: u32, p: u32, c: &Scalar, tol: f64) -> Bivar {
        let (q, p) = (q as usize, p as usize);
        let maxj = self.rows.len();
        let mut cpow = vec![Scalar::one()];
        for k in 1..maxj {
            cpow.push(&cpow[k - 1] * c);
        }
        let width = self.rows.iter().enumerate().map(|(j, r)| q * r.len() + p * j).max().unwrap_or(0) + 1;
        let mut rows = vec![series_zero(width); maxj];
        let mut mags = vec![vec![0.0f64; width]; maxj];
        for (j, row) in self.rows.iter().enumerate() {
            let mut binom = 1i64;
            for l in 0..=j {
                let factor = &Scalar::Exact(GaussianRational::from_integers(binom, 0)) * &cpow[j - l];
                for (i, h) in row.iter().enumerate() {
                    if h.is_zero() {
                        continue;
                    }
                    let term = h * &factor;
                    let idx = q * i + p * j;
                    mags[l][idx] += term.norm();
                    rows[l][idx] = &rows[l][idx] + &term;
                }
                binom = binom * (j - l) as i64 / (l + 1) as i64;
            }
        }
        for (row, mag) in rows.iter_mut().zip(&mags) {
            for (x, m) in row.iter_mut().zip(mag) {
                if let Scalar::Approx(z) = x {
                    if z.norm() <= tol * m {
                        *x = Scalar::zero();
                    }
                }
            }
        }
        let mut out = Bivar { rows };
        out.trim();
        out.normalize_s();
        out
    }

    fn derivative_y(&self) -> Bivar {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, r)| {
                let k = Scalar::Exact(GaussianRational::from_integers(j as i64, 0));
                r.iter().map(|c| c * &k).collect()
            })
            .collect();
        Bivar { rows }
    }

    /// `H(s, y(s)) mod s^len`.
    fn eval_series(&self, y: &[Scalar], len: usize) -> Series {
        let mut acc = series_zero(len);
        for row in self.rows.iter().rev() {
            acc = series_mul(&acc, y, len);
            acc = series_add(&acc, row, len);
        }
        acc
    }
}

/// Roots of `Σ coeffs[k] w^k` with multiplicities; exact where possible.
fn edge_roots(coeffs: &[Scalar]) -> Result<Vec<(Scalar, u32)>, PuiseuxError> {
    if coeffs.iter().all(Scalar::is_exact) {
        let poly = UniPoly::new(coeffs.iter().map(|c| c.exact().expect("exact").clone()).collect());
        let found = poly.qi_roots();
        let mut out: Vec<(Scalar, u32)> =
            found.roots.iter().map(|(r, k)| (Scalar::Exact(r.clone()), *k as u32)).collect();
        for (factor, k) in found.residual.squarefree_decomposition() {
            let mut numeric = roots_univariate(&factor.to_complex())?;
            sort_complex(&mut numeric);
            out.extend(numeric.into_iter().map(|z| (Scalar::Approx(z), k as u32)));
        }
        return Ok(out);
    }
    let scale = coeffs.iter().map(Scalar::norm).fold(0.0, f64::max);
    let normalized: Vec<Complex64> = coeffs.iter().map(|c| c.to_complex() / scale).collect();
    let roots = roots_univariate(&normalized)?;
    let mut clusters = cluster_roots(&roots, ROOT_CLUSTER_TOL);
    clusters.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    Ok(clusters.into_iter().map(|(z, k)| (Scalar::Approx(z), k as u32)).collect())
}

fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

struct State {
    h: Bivar,
    /// `u = s^q_total`.
    q_total: u32,
    /// `v = phi(s) + s^e·y`.
    phi: Series,
    e: usize,
    tol: f64,
}

fn finish(ramification: u32, mut coeffs: Series, order: u32, multiplicity: u32) -> PuiseuxBranch {
    coeffs.resize((order * ramification) as usize, Scalar::zero());
    let mut b = PuiseuxBranch::from_coeffs(ramification, coeffs, order).expect("nonzero leading term");
    b.multiplicity = multiplicity;
    b
}

fn expand(state: State, order: u32, out: &mut Vec<PuiseuxBranch>) -> Result<(), PuiseuxError> {
    let State { mut h, q_total, phi, e, tol } = state;
    let y0 = h.y_order();
    if y0 > 0 {
        if e == 0 {
            return Err(PuiseuxError::ZeroRoot);
        }
        // y ≡ 0: v = phi exactly
        out.push(finish(q_total, phi.clone(), order, y0 as u32));
        h.drop_y_power(y0);
    }
    let support = h.support();
    if support.is_empty() || !support.iter().any(|p| p.0 == 0) {
        return Ok(());
    }
    for edge in hull_edges(&support) {
        let (p, q) = reduced_slope(&edge);
        let j_end = edge[edge.len() - 1].1;
        let span = (edge[0].1 - j_end) / q;
        let mut reduced = series_zero(span as usize + 1);
        for pt in &edge {
            reduced[((pt.1 - j_end) / q) as usize] = h.coeff(pt.0, pt.1);
        }
        for (w, mult) in edge_roots(&reduced)? {
            let c = w.nth_root(q);
            let q_new = q_total * q;
            let e_new = e * q as usize + p as usize;
            let mut phi_new = series_zero(e_new + 1);
            for (k, a) in phi.iter().enumerate() {
                phi_new[k * q as usize] = a.clone();
            }
            phi_new[e_new] = c.clone();
            let tol_new = if mult > 1 && !c.is_exact() { tol.max(CLUSTER_CLEAN_TOL) } else { tol };
            let h_new = h.transform(q, p, &c, tol_new);
            let target = (order * q_new) as usize;
            if mult == 1 {
                let need = target.saturating_sub(e_new).max(1);
                let y = regular_solve(&h_new, need);
                let mut psi = series_zero(target.max(e_new + 1));
                for (k, a) in phi_new.iter().enumerate() {
                    psi[k] = a.clone();
                }
                for (k, a) in y.iter().enumerate() {
                    if e_new + k < psi.len() {
                        psi[e_new + k] = &psi[e_new + k] + a;
                    }
                }
                out.push(finish(q_new, psi, order, 1));
            } else if e_new >= target {
                out.push(finish(q_new, phi_new, order, mult));
            } else {
                expand(State { h: h_new, q_total: q_new, phi: phi_new, e: e_new, tol: tol_new }, order, out)?;
            }
        }
    }
    Ok(())
}

/// Solves `H(s, y) = 0`, `y(0) = 0`, given `∂_y H(0, 0) != 0`, mod `s^len`.
fn regular_solve(h: &Bivar, len: usize) -> Series {
    let dh = h.derivative_y();
    let mut y = series_zero(1);
    let mut prec = 1;
    while prec < len {
        prec = (2 * prec).min(len);
        y.resize(prec, Scalar::zero());
        let value = h.eval_series(&y, prec);
        let slope = dh.eval_series(&y, prec);
        let inv = series_inv(&slope, prec).expect("simple root");
        y = series_sub(&y, &series_mul(&value, &inv, prec), prec);
    }
    y.truncate(len);
    y
}

/// All branches of `g(u, v) = 0` through the origin with `v → 0`, each
/// known modulo `u^order`.
pub fn puiseux_roots(g: &MultiPoly, order: u32) -> Result<Vec<PuiseuxBranch>, PuiseuxError> {
    let polygon = newton_polygon(g)?;
    if !polygon.support.iter().any(|p| p.0 == 0) {
        return Err(PuiseuxError::NotVRegular);
    }
    let mut out = Vec::new();
    let state = State { h: Bivar::from_poly(g), q_total: 1, phi: Vec::new(), e: 0, tol: CLEAN_TOL };
    expand(state, order.max(1), &mut out)?;
    Ok(out)
}

/// `u`-valuation (floored) of `g(s^Q, ψ(s))`, capped at the truncation order.
pub fn branch_residual_valuation(g: &MultiPoly, branch: &PuiseuxBranch) -> u32 {
    let q = branch.ramification as usize;
    let len = branch.truncation_order as usize * q;
    let mut h = Bivar::from_poly(g);
    // u = s^q
    for row in &mut h.rows {
        let mut spread = series_zero(row.len() * q);
        for (i, c) in row.iter().enumerate() {
            spread[i * q] = c.clone();
        }
        *row = spread;
    }
    let value = h.eval_series(&branch.coeffs, len);
    let scale = g.terms().map(|(_, c)| c.to_complex().norm()).fold(1.0, f64::max)
        * branch.coeffs.iter().map(Scalar::norm).fold(1.0, f64::max).powi(g.degree_in(1).unwrap_or(0) as i32);
    let val = value.iter().position(|c| !negligible(c, scale)).unwrap_or(len);
    (val / q) as u32
}

fn negligible(c: &Scalar, scale: f64) -> bool {
    match c {
        Scalar::Exact(g) => g.is_zero(),
        Scalar::Approx(z) => z.norm() <= RECONSTRUCTION_TOL * scale,
    }
}

/// Monic `Π_k (v - ψ(ω^k s))` as coefficients of `v^0 .. v^Q` in `s`.
fn conjugate_product(branch: &PuiseuxBranch) -> Vec<Series> {
    let len = branch.coeffs.len();
    let mut prod: Vec<Series> = vec![{
        let mut one = series_zero(len);
        one[0] = Scalar::one();
        one
    }];
    for k in 0..branch.ramification {
        let root = branch.conjugate(k);
        let mut next = vec![series_zero(len); prod.len() + 1];
        for (j, coeff) in prod.iter().enumerate() {
            next[j + 1] = series_add(&next[j + 1], coeff, len);
            next[j] = series_sub(&next[j], &series_mul(coeff, &root, len), len);
        }
        prod = next;
    }
    prod
}

/// Outcome of dividing `g` by the product of all branch factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub truncation_order: u32,
    /// First `u`-order at which the remainder is nonzero, or the truncation
    /// order when it vanishes throughout.
    pub residual_valuation: u32,
    /// The recombined conjugate products only involve integral powers of `u`.
    pub integral_exponents: bool,
    /// Number of roots (with conjugates and multiplicity) equals the
    /// order of `g(0, v)` at 0.
    pub root_count_matches: bool,
    /// Value of the cofactor at the origin.
    pub unit_at_origin: Scalar,
}

impl Reconstruction {
    pub fn passes(&self) -> bool {
        self.residual_valuation >= self.truncation_order && self.integral_exponents && self.root_count_matches
    }
}

/// Weierstrass-divides `g` by `Π_branches Π_conjugates (v - ψ)` modulo
/// `u^order` and reports how well the product accounts for `g`.
pub fn reconstruction(g: &MultiPoly, branches: &[PuiseuxBranch], order: u32) -> Reconstruction {
    let n = order as usize;
    let mut integral = true;
    let mut w: Vec<Series> = vec![{
        let mut one = series_zero(n);
        one[0] = Scalar::one();
        one
    }];
    let mut degree = 0u32;
    for b in branches {
        let q = b.ramification as usize;
        let prod = conjugate_product(b);
        let scale = b.coeffs.iter().map(Scalar::norm).fold(1.0, f64::max).powi(b.ramification as i32);
        let in_u: Vec<Series> = prod
            .iter()
            .map(|coeff| {
                for (k, c) in coeff.iter().enumerate() {
                    if k % q != 0 && !negligible(c, scale) {
                        integral = false;
                    }
                }
                (0..n).map(|l| coeff.get(l * q).cloned().unwrap_or_else(Scalar::zero)).collect()
            })
            .collect();
        for _ in 0..b.multiplicity {
            w = poly_series_mul(&w, &in_u, n);
            degree += b.ramification;
        }
    }
    let mut rem: Vec<Series> = (0..=g.degree_in(1).unwrap_or(0))
        .map(|j| (0..n).map(|i| Scalar::Exact(g.coefficient(&[i as u32, j]))).collect())
        .collect();
    let r = w.len() - 1;
    let mut quotient = vec![series_zero(n); rem.len().saturating_sub(r).max(1)];
    // w is monic of degree r in v
    for j in (r..rem.len()).rev() {
        let lead = rem[j].clone();
        quotient[j - r] = lead.clone();
        for (k, wk) in w.iter().enumerate() {
            rem[j - r + k] = series_sub(&rem[j - r + k], &series_mul(&lead, wk, n), n);
        }
    }
    let scale = [&w, &quotient]
        .iter()
        .flat_map(|p| p.iter().flat_map(|s| s.iter().map(Scalar::norm)))
        .chain(g.terms().map(|(_, c)| c.to_complex().norm()))
        .fold(1.0, f64::max);
    let residual_valuation = rem[..r.min(rem.len())]
        .iter()
        .filter_map(|s| s.iter().position(|c| !negligible(c, scale * scale)))
        .min()
        .unwrap_or(n) as u32;
    let v_order = (0..=g.degree_in(1).unwrap_or(0)).find(|&j| !g.coefficient(&[0, j]).is_zero());
    Reconstruction {
        truncation_order: order,
        residual_valuation,
        integral_exponents: integral,
        root_count_matches: v_order == Some(degree),
        unit_at_origin: quotient[0][0].clone(),
    }
}

fn poly_series_mul(a: &[Series], b: &[Series], n: usize) -> Vec<Series> {
    let mut out = vec![series_zero(n); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = series_add(&out[i + j], &series_mul(x, y, n), n);
        }
    }
    out
}

/// `P(s, v) = Π_{i=1}^{m} (v - ψ(ω^i s)) = v^m + Σ_j v^{m-j} s^{jβ} σ_j(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassProfile {
    pub m: u32,
    pub beta: u32,
    /// `σ_1 .. σ_m`, truncated.
    pub sigma: Vec<Series>,
    /// `s`-valuation of each `σ_j`; `None` when it vanishes to the working
    /// precision.
    pub eta: Vec<Option<u32>>,
    pub sigma_m0: Scalar,
    /// `(-1)^m ω^{m(m+1)/2} b0^m`.
    pub predicted_sigma_m0: Scalar,
    /// `(-1)^m ω^{β·m(m+1)/2} b0^m`, valid without coprimality.
    pub general_sigma_m0: Scalar,
    /// All arithmetic stayed in ℚ(i).
    pub exact: bool,
}

impl WeierstrassProfile {
    /// `η_j ≥ 1` for `j = 1 .. m-1`.
    pub fn middle_valuations_positive(&self) -> bool {
        self.eta.iter().take(self.m.saturating_sub(1) as usize).all(|e| e.is_none_or(|v| v >= 1))
    }

    pub fn sigma_m0_matches(&self, tol: f64) -> bool {
        self.sigma_m0.approx_eq(&self.predicted_sigma_m0, tol, 1.0)
    }
}

pub fn weierstrass_profile(branch: &PuiseuxBranch) -> WeierstrassProfile {
    let m = branch.ramification;
    let beta = branch.beta as usize;
    let prod = conjugate_product(branch);
    let len = branch.coeffs.len();
    let keep = len.saturating_sub(beta).max(1);
    let scale = branch.coeffs.iter().map(Scalar::norm).fold(1.0, f64::max).powi(m as i32);
    let sigma: Vec<Series> = (1..=m as usize)
        .map(|j| {
            let coeff = &prod[m as usize - j];
            (0..keep).map(|k| coeff.get(j * beta + k).cloned().unwrap_or_else(Scalar::zero)).collect()
        })
        .collect();
    let eta = sigma.iter().map(|s| s.iter().position(|c| !negligible(c, scale)).map(|v| v as u32)).collect();
    let omega = Scalar::root_of_unity(m);
    let sign = if m.is_multiple_of(2) { Scalar::one() } else { -&Scalar::one() };
    let tri = m * (m + 1) / 2;
    let b0m = branch.b0.pow(m);
    let predicted = &(&sign * &omega.pow(tri % m.max(1))) * &b0m;
    let general = &(&sign * &omega.pow(((branch.beta as u64 * tri as u64) % m.max(1) as u64) as u32)) * &b0m;
    let sigma_m0 = sigma[m as usize - 1][0].clone();
    let exact = sigma.iter().all(|s| s.iter().all(Scalar::is_exact)) && omega.is_exact();
    WeierstrassProfile {
        m,
        beta: branch.beta,
        sigma,
        eta,
        sigma_m0,
        predicted_sigma_m0: predicted,
        general_sigma_m0: general,
        exact,
    }
}

/// Sorts branches by ramification, then leading exponent, then `b0`.
pub fn sort_branches(branches: &mut [PuiseuxBranch]) {
    branches.sort_by(|a, b| {
        a.ramification.cmp(&b.ramification).then(a.beta.cmp(&b.beta)).then_with(|| match (&a.b0, &b.b0) {
            (Scalar::Exact(x), Scalar::Exact(y)) => cmp_gaussian(x, y),
            (x, y) => {
                let (x, y) = (x.to_complex(), y.to_complex());
                x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
            }
        })
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn uv(s: &str) -> MultiPoly {
        parse(s, &["u", "v"]).unwrap()
    }

    fn ex(s: &str) -> Scalar {
        Scalar::Exact(s.parse().unwrap())
    }

    fn exs(v: &[&str]) -> Series {
        v.iter().map(|s| ex(s)).collect()
    }

    #[test]
    fn polygon_examples() {
        let poly = newton_polygon(&uv("v^2 - u^3")).unwrap();
        assert_eq!(poly.edges.len(), 1);
        let e = &poly.edges[0];
        assert_eq!((e.start, e.end, e.slope_num, e.slope_den), ((0, 2), (3, 0), 3, 2));
        assert_eq!(e.polynomial, UniPoly::new(vec!["-1".parse().unwrap(), "0".parse().unwrap(), "1".parse().unwrap()]));

        let poly = newton_polygon(&uv("v + u^2 - v^2")).unwrap();
        assert_eq!(poly.edges.len(), 1);
        assert_eq!((poly.edges[0].start, poly.edges[0].end), ((0, 1), (2, 0)));
        assert_eq!((poly.edges[0].slope_num, poly.edges[0].slope_den), (2, 1));

        let poly = newton_polygon(&uv("u - v^2")).unwrap();
        assert_eq!((poly.edges[0].slope_num, poly.edges[0].slope_den), (1, 2));

        assert_eq!(newton_polygon(&uv("1 + u")), Err(PuiseuxError::UnitAtOrigin));
    }

    #[test]
    fn polygon_slopes_increase_and_bound_support() {
        let g = uv("v^5 + u*v^3 + u^3*v^2 + u^4*v + u^9 + u^2*v^4");
        let poly = newton_polygon(&g).unwrap();
        let slopes: Vec<f64> = poly.edges.iter().map(|e| e.slope_num as f64 / e.slope_den as f64).collect();
        assert!(slopes.windows(2).all(|w| w[0] < w[1]), "{slopes:?}");
        for e in &poly.edges {
            let level = |p: &(u32, u32)| p.0 as i64 * e.slope_den as i64 + p.1 as i64 * e.slope_num as i64;
            let on = level(&e.start);
            assert!(poly.support.iter().all(|p| level(p) >= on));
        }
    }

    #[test]
    fn cusp_branch() {
        let br = puiseux_roots(&uv("v^2 - u^3"), 4).unwrap();
        assert_eq!(br.len(), 1);
        assert_eq!((br[0].ramification, br[0].beta), (2, 3));
        assert_eq!(br[0].b0, ex("1"));
        assert!(br[0].coeffs.iter().enumerate().all(|(k, c)| c.is_zero() == (k != 3)));
    }

    #[test]
    fn parabola_branch_series() {
        // v = -u^2 + v^2  =>  v = -u^2 + u^4 - 2u^6 + ...
        let br = puiseux_roots(&uv("v + u^2 - v^2"), 10).unwrap();
        assert_eq!(br.len(), 1);
        let b = &br[0];
        assert_eq!((b.ramification, b.beta), (1, 2));
        assert_eq!(b.b0, ex("-1"));
        // oracle: v = (1 - sqrt(1 + 4u^2)) / 2 = Σ (-1)^{k+1} Catalan(k) u^{2k+2}
        let catalan = [1i64, 1, 2, 5];
        for (k, c) in catalan.iter().enumerate() {
            let signed = if k % 2 == 0 { -c } else { *c };
            assert_eq!(b.coeffs[2 * k + 2], ex(&signed.to_string()));
            assert!(b.coeffs[2 * k + 1].is_zero());
        }
        assert_eq!(branch_residual_valuation(&uv("v + u^2 - v^2"), b), 10);
    }

    #[test]
    fn multiple_branches_and_reconstruction() {
        // (v - u)(v + u)(v^2 - u^3) · (1 + u + v)
        let g = uv("(v - u)*(v + u)*(v^2 - u^3)*(1 + u + v)");
        let br = puiseux_roots(&g, 10).unwrap();
        assert_eq!(br.iter().map(|b| b.ramification).sum::<u32>(), 4);
        let rec = reconstruction(&g, &br, 10);
        assert!(rec.passes(), "{rec:?}");
        assert_eq!(rec.unit_at_origin, ex("1"));
    }

    #[test]
    fn irrational_edge_roots_fall_back_to_floats() {
        // c^2 = 2
        let g = uv("v^2 - 2*u^2 + u^3 + v^3");
        let br = puiseux_roots(&g, 12).unwrap();
        assert_eq!(br.len(), 2);
        assert!(br.iter().all(|b| !b.is_exact()));
        for b in &br {
            assert!((b.b0.norm() - 2f64.sqrt()).abs() < 1e-12);
            assert_eq!(branch_residual_valuation(&g, b), 12);
        }
        let rec = reconstruction(&g, &br, 12);
        assert!(rec.passes(), "{rec:?}");
    }

    #[test]
    fn repeated_root_reported_with_multiplicity() {
        let g = uv("(v - u^2)^2 * (1 + v)");
        let br = puiseux_roots(&g, 6).unwrap();
        assert_eq!(br.len(), 1);
        assert_eq!(br[0].multiplicity, 2);
        assert!(reconstruction(&g, &br, 6).passes());
    }

    #[test]
    fn unreduced_infinite_series_stops_at_order() {
        // (v(1-u) - u)^2: v = u/(1-u) doubled
        let g = uv("(v*(1-u) - u)^2");
        let br = puiseux_roots(&g, 6).unwrap();
        assert_eq!(br.len(), 1);
        assert_eq!(br[0].multiplicity, 2);
        assert!(br[0].coeffs[1..6].iter().all(|c| *c == ex("1")));
    }

    #[test]
    fn guards() {
        assert_eq!(puiseux_roots(&uv("u"), 4), Err(PuiseuxError::NotVRegular));
        assert_eq!(puiseux_roots(&uv("v*(v - u)"), 4), Err(PuiseuxError::ZeroRoot));
    }

    #[test]
    fn profile_examples() {
        let b = PuiseuxBranch::from_coeffs(1, exs(&["0", "1", "0", "0"]), 4).unwrap();
        let prof = weierstrass_profile(&b);
        assert_eq!(prof.sigma_m0, ex("-1"));
        assert!(prof.sigma_m0_matches(0.0));

        // ψ = s(1 + s), m = 2: P = v^2 - 2 s^2 v + (-s^2 + s^4)
        let b = PuiseuxBranch::from_coeffs(2, exs(&["0", "1", "1", "0", "0", "0"]), 3).unwrap();
        let prof = weierstrass_profile(&b);
        assert_eq!(prof.sigma[0][..2], exs(&["0", "-2"])[..]);
        assert_eq!(prof.eta[0], Some(1));
        assert_eq!(prof.sigma[1][..3], exs(&["-1", "0", "1"])[..]);
        assert!(prof.sigma_m0_matches(0.0));
        assert!(prof.middle_valuations_positive());
        assert!(prof.exact);

        // cusp: P = v^2 - u^3
        let b = PuiseuxBranch::from_coeffs(2, exs(&["0", "0", "0", "1", "0", "0", "0", "0"]), 4).unwrap();
        let prof = weierstrass_profile(&b);
        assert_eq!(prof.eta[0], None);
        assert_eq!(prof.sigma_m0, ex("-1"));
        assert!(prof.sigma_m0_matches(0.0));
    }

    #[test]
    fn profile_needs_coprime_pair() {
        // m = 2, β = 2: ψ(s) and ψ(-s) share the leading term, so σ_1(0) != 0
        let b = PuiseuxBranch::from_coeffs(2, exs(&["0", "0", "1", "1", "0", "0"]), 3).unwrap();
        let prof = weierstrass_profile(&b);
        assert_eq!(prof.eta[0], Some(0));
        assert!(!prof.middle_valuations_positive());
        assert_eq!(prof.sigma_m0, prof.general_sigma_m0);
        assert!(!prof.sigma_m0_matches(0.0));
    }

    #[test]
    fn profile_cube_root_uses_floats() {
        let b = PuiseuxBranch::from_coeffs(3, exs(&["0", "0", "2", "1", "0", "-1", "0", "0", "0"]), 3).unwrap();
        let prof = weierstrass_profile(&b);
        assert!(!prof.exact);
        assert!(prof.sigma_m0_matches(1e-9));
        assert!(prof.middle_valuations_positive());
    }
}
