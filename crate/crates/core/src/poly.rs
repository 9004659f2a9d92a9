//! Sparse multivariate polynomials over ℚ(i) with dense exponent vectors.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::gaussian::GaussianRational;
use crate::univariate::UniPoly;

pub type Exponents = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("expected {expected} images/values, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("direction vector is zero")]
    ZeroDirection,
}

/// A polynomial in `nvars` variables. Terms with zero coefficient are never
/// stored, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, GaussianRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussianRational::one())
    }

    /// The coordinate function `x_j`.
    pub fn var(nvars: usize, j: usize) -> Self {
        assert!(j < nvars, "variable index {j} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[j] = 1;
        Self::monomial(nvars, e, GaussianRational::one())
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: GaussianRational) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Builds a polynomial from (exponents, coefficient) pairs, combining
    /// repeated exponents.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, GaussianRational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    /// Linear form `Σ coeffs[j]·x_j`.
    pub fn linear(coeffs: &[GaussianRational]) -> Self {
        let n = coeffs.len();
        Self::from_terms(
            n,
            coeffs.iter().enumerate().map(|(j, c)| {
                let mut e = vec![0; n];
                e[j] = 1;
                (e, c.clone())
            }),
        )
    }

    pub fn add_term(&mut self, exps: Exponents, c: &GaussianRational) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exps: &[u32]) -> GaussianRational {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// Constant term (value at the origin).
    pub fn constant_term(&self) -> GaussianRational {
        self.coefficient(&vec![0; self.nvars])
    }

    /// Total degree; `None` stands for the degree −∞ of the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| total(e)).max()
    }

    /// Lowest total degree among the terms (the multiplicity at the origin).
    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| total(e)).min()
    }

    pub fn degree_in(&self, j: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[j]).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| total(e));
        match degs.next() {
            None => true,
            Some(d) => degs.all(|k| k == d),
        }
    }

    /// Part of total degree exactly `k`.
    pub fn homogeneous_part(&self, k: u32) -> MultiPoly {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(e, _)| total(e) == k).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Lowest-degree homogeneous part (the tangent-cone form at the origin).
    pub fn lowest_form(&self) -> MultiPoly {
        match self.lowest_degree() {
            Some(k) => self.homogeneous_part(k),
            None => self.clone(),
        }
    }

    pub fn homogeneous_parts(&self) -> HomogeneousDecomposition {
        let parts = match self.degree() {
            None => Vec::new(),
            Some(d) => (0..=d).map(|k| self.homogeneous_part(k)).collect(),
        };
        HomogeneousDecomposition { nvars: self.nvars, parts }
    }

    /// `F(x, z) = z^d·f(x/z)` in `nvars + 1` variables, `z` last.
    /// Constants homogenize to themselves.
    pub fn homogenize(&self) -> Result<MultiPoly, PolyError> {
        let d = self.degree().ok_or(PolyError::ZeroPolynomial)?;
        Ok(Self {
            nvars: self.nvars + 1,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut ext = e.clone();
                    ext.push(d - total(e));
                    (ext, c.clone())
                })
                .collect(),
        })
    }

    /// Sets variable `j` to the constant `value` and drops it.
    pub fn specialize(&self, j: usize, value: &GaussianRational) -> MultiPoly {
        assert!(j < self.nvars);
        let mut out = Self::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let k = rest.remove(j);
            out.add_term(rest, &(c * &value.pow(k)));
        }
        out
    }

    /// `F(x, 1)` for a polynomial whose last variable is the homogenizing one.
    pub fn dehomogenize(&self) -> MultiPoly {
        self.specialize(self.nvars - 1, &GaussianRational::one())
    }

    pub fn scale(&self, c: &GaussianRational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect() }
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.same_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.same_arity(other)?;
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Replaces variable `j` by `images[j]` and expands.
    pub fn substitute(&self, images: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
        if images.len() != self.nvars {
            return Err(PolyError::ArityMismatch { expected: self.nvars, found: images.len() });
        }
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        if let Some(bad) = images.iter().find(|p| p.nvars != target) {
            return Err(PolyError::VarCountMismatch { left: target, right: bad.nvars });
        }
        // cache powers per variable
        let mut powers: Vec<Vec<MultiPoly>> = images.iter().map(|p| vec![Self::one(target), p.clone()]).collect();
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut term = Self::constant(target, c.clone());
            for (j, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[j].len() <= k as usize {
                    let next = &powers[j][powers[j].len() - 1] * &images[j];
                    powers[j].push(next);
                }
                term = &term * &powers[j][k as usize];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// `∂p/∂x_j`.
    pub fn derivative(&self, j: usize) -> MultiPoly {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[j] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[j] -= 1;
            out.add_term(d, &(c * &GaussianRational::from(e[j] as i64)));
        }
        out
    }

    /// Directional derivative `Σ ξ_j ∂p/∂x_j`.
    pub fn partial_derivative(&self, direction: &[GaussianRational]) -> Result<MultiPoly, PolyError> {
        if direction.len() != self.nvars {
            return Err(PolyError::ArityMismatch { expected: self.nvars, found: direction.len() });
        }
        if direction.iter().all(GaussianRational::is_zero) {
            return Err(PolyError::ZeroDirection);
        }
        let mut out = Self::zero(self.nvars);
        for (j, xi) in direction.iter().enumerate() {
            if !xi.is_zero() {
                out = &out + &self.derivative(j).scale(xi);
            }
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<MultiPoly> {
        (0..self.nvars).map(|j| self.derivative(j)).collect()
    }

    pub fn eval(&self, point: &[GaussianRational]) -> GaussianRational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc += &t;
        }
        acc
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars);
        self.terms.iter().map(|(e, c)| e.iter().zip(point).fold(c.to_complex(), |acc, (&k, x)| acc * x.powu(k))).sum()
    }

    /// Writes `p = Σ_k c_k·x_j^k`; `c_k` keeps all variables but has no `x_j`.
    pub fn coefficients_in(&self, j: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(j).unwrap_or(0) as usize;
        let mut out = vec![Self::zero(self.nvars); deg + 1];
        for (e, c) in &self.terms {
            let k = e[j] as usize;
            let mut rest = e.clone();
            rest[j] = 0;
            out[k].add_term(rest, c);
        }
        out
    }

    /// True when no term involves variable `j`.
    pub fn is_free_of(&self, j: usize) -> bool {
        self.terms.keys().all(|e| e[j] == 0)
    }

    /// Univariate polynomial in variable `j`, provided no other variable occurs.
    pub fn to_univariate(&self, j: usize) -> Option<UniPoly> {
        let mut coeffs = vec![GaussianRational::zero(); self.degree_in(j).unwrap_or(0) as usize + 1];
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(k, &x)| k != j && x != 0) {
                return None;
            }
            coeffs[e[j] as usize] = c.clone();
        }
        Some(UniPoly::new(coeffs))
    }

    /// Embeds a univariate polynomial as a polynomial in variable `j` of `nvars`.
    pub fn from_univariate(p: &UniPoly, nvars: usize, j: usize) -> MultiPoly {
        Self::from_terms(
            nvars,
            p.coeffs().iter().enumerate().map(|(k, c)| {
                let mut e = vec![0; nvars];
                e[j] = k as u32;
                (e, c.clone())
            }),
        )
    }

    /// Renders with the given variable names, in a form accepted by the parser.
    pub fn format_with(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.nvars);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        // highest degree first reads more naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| total(b.0).cmp(&total(a.0)).then_with(|| b.0.cmp(a.0)));
        for (idx, (e, c)) in terms.into_iter().enumerate() {
            let monomial: Vec<String> = e
                .iter()
                .zip(names)
                .filter(|(k, _)| **k > 0)
                .map(|(k, n)| if *k == 1 { n.to_string() } else { format!("{n}^{k}") })
                .collect();
            let (negative, mag) = split_sign(c);
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let coeff = format_coeff(&mag);
            match (coeff, monomial.is_empty()) {
                (None, true) => out.push('1'),
                (None, false) => out.push_str(&monomial.join("*")),
                (Some(s), true) => out.push_str(&s),
                (Some(s), false) => {
                    out.push_str(&s);
                    out.push('*');
                    out.push_str(&monomial.join("*"));
                }
            }
        }
        out
    }

    fn same_arity(&self, other: &MultiPoly) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            Err(PolyError::VarCountMismatch { left: self.nvars, right: other.nvars })
        } else {
            Ok(())
        }
    }
}

fn total(e: &[u32]) -> u32 {
    e.iter().sum()
}

/// Splits a coefficient into a sign and a "magnitude" whose leading part is
/// positive, for printing.
fn split_sign(c: &GaussianRational) -> (bool, GaussianRational) {
    use num_traits::{Signed, Zero};
    let lead_negative = if c.re.is_zero() { c.im.is_negative() } else { c.re.is_negative() };
    if lead_negative {
        (true, -c)
    } else {
        (false, c.clone())
    }
}

/// `None` for the coefficient 1. Fractions and complex values get wrapped so
/// that the printed form parses back with the same precedence.
fn format_coeff(c: &GaussianRational) -> Option<String> {
    if c.is_one() {
        return None;
    }
    let s = c.to_string();
    if c.is_real() && c.re.is_integer() {
        Some(s)
    } else {
        Some(format!("({s})"))
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.format_with(&refs))
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.nvars, self)
    }
}

/// `x, y` for two variables, `x, y, z` for three, `x1..xn` otherwise.
pub fn default_names(nvars: usize) -> Vec<String> {
    match nvars {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        n => (1..=n).map(|k| format!("x{k}")).collect(),
    }
}

// Operator forms panic on variable-count mismatch; the `checked_*` methods
// report it as an error instead.
impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("polynomial arity mismatch")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("polynomial arity mismatch")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("polynomial arity mismatch")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

/// `parts[k]` is the degree-`k` homogeneous component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousDecomposition {
    pub nvars: usize,
    pub parts: Vec<MultiPoly>,
}

impl HomogeneousDecomposition {
    pub fn part(&self, k: usize) -> MultiPoly {
        self.parts.get(k).cloned().unwrap_or_else(|| MultiPoly::zero(self.nvars))
    }

    pub fn top(&self) -> MultiPoly {
        self.parts.last().cloned().unwrap_or_else(|| MultiPoly::zero(self.nvars))
    }

    pub fn sum(&self) -> MultiPoly {
        self.parts.iter().fold(MultiPoly::zero(self.nvars), |acc, p| &acc + p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MultiPoly {
        MultiPoly::var(2, 0)
    }
    fn y() -> MultiPoly {
        MultiPoly::var(2, 1)
    }
    fn c(v: i64) -> MultiPoly {
        MultiPoly::constant(2, v.into())
    }
    fn ci(a: i64, b: i64) -> MultiPoly {
        MultiPoly::constant(2, GaussianRational::from_integers(a, b))
    }

    #[test]
    fn add_examples() {
        assert_eq!(&(&x() + &y()) + &(&x() - &y()), &c(2) * &x());
        let p = &x() * &y();
        assert_eq!(&p + &MultiPoly::zero(2), p);
        assert_eq!(&p + &p, &c(2) * &p);
        assert_eq!(x().checked_add(&MultiPoly::var(3, 0)), Err(PolyError::VarCountMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn mul_examples() {
        let lhs = &(&x() + &y()) * &(&x() - &y());
        assert_eq!(lhs, &x().pow(2) - &y().pow(2));
        let p = &x().pow(3) + &y();
        assert_eq!(&p * &MultiPoly::one(2), p);
        let iy = &ci(0, 1) * &y();
        assert_eq!(&(&x() + &iy) * &(&x() - &iy), &x().pow(2) + &y().pow(2));
        assert!(x().checked_mul(&MultiPoly::var(1, 0)).is_err());
    }

    #[test]
    fn homogeneous_parts_examples() {
        let p = &(&(&x() * &y()) + &x()) + &c(3);
        let h = p.homogeneous_parts();
        assert_eq!(h.part(2), &x() * &y());
        assert_eq!(h.part(1), x());
        assert_eq!(h.part(0), c(3));
        let q = &x() + &y().pow(2);
        let hq = q.homogeneous_parts();
        assert_eq!(hq.part(2), y().pow(2));
        assert_eq!(hq.part(1), x());
        assert!(hq.part(0).is_zero());
        assert!(MultiPoly::zero(2).homogeneous_parts().parts.is_empty());
    }

    #[test]
    fn homogenize_examples() {
        let xy = &x() * &y();
        let f = xy.homogenize().unwrap();
        assert_eq!(f, &MultiPoly::var(3, 0) * &MultiPoly::var(3, 1));
        let q = (&x() + &y().pow(2)).homogenize().unwrap();
        let (x3, y3, z3) = (MultiPoly::var(3, 0), MultiPoly::var(3, 1), MultiPoly::var(3, 2));
        assert_eq!(q, &(&x3 * &z3) + &y3.pow(2));
        assert_eq!(c(5).homogenize().unwrap(), MultiPoly::constant(3, 5.into()));
        assert_eq!(MultiPoly::zero(2).homogenize(), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn substitute_examples() {
        let (u, v) = (x(), y());
        let xy = &x() * &y();
        assert_eq!(xy.substitute(&[u.clone(), v.clone()]).unwrap(), &u * &v);
        let p = &x() + &y().pow(2);
        let images = [&x() + &(&c(2) * &y()), y()];
        let expected = &(&x() + &(&c(2) * &y())) + &y().pow(2);
        assert_eq!(p.substitute(&images).unwrap(), expected);
        assert_eq!(p.substitute(&[x(), y()]).unwrap(), p);
        assert!(matches!(p.substitute(&[x()]), Err(PolyError::ArityMismatch { .. })));
    }

    #[test]
    fn directional_derivative_examples() {
        let xy = &x() * &y();
        let dy = [GaussianRational::zero(), GaussianRational::one()];
        assert_eq!(xy.partial_derivative(&dy).unwrap(), x());
        let l = &x() + &(&c(2) * &y());
        let f = &l.pow(3) + &l;
        let xi = [GaussianRational::from(2), GaussianRational::from(-1)];
        assert!(f.partial_derivative(&xi).unwrap().is_zero());
        let dx = [GaussianRational::one(), GaussianRational::zero()];
        assert!(c(7).partial_derivative(&dx).unwrap().is_zero());
        assert_eq!(
            f.partial_derivative(&[GaussianRational::zero(), GaussianRational::zero()]),
            Err(PolyError::ZeroDirection)
        );
    }

    #[test]
    fn degree_sentinel() {
        assert_eq!(MultiPoly::zero(2).degree(), None);
        assert_eq!(c(4).degree(), Some(0));
        assert_eq!((&x() * &y().pow(2)).degree(), Some(3));
    }

    #[test]
    fn formatting() {
        let p = &(&ci(1, -2) * &x().pow(2)) - &(&c(3) * &y());
        assert_eq!(p.format_with(&["x", "y"]), "(1-2*i)*x^2 - 3*y");
        let q = &(&MultiPoly::constant(2, GaussianRational::from_ratio(-1, 2)) * &x()) + &c(1);
        assert_eq!(q.format_with(&["x", "y"]), "-(1/2)*x + 1");
    }
}
