//! Dense univariate polynomials over ℚ(i): Euclidean algorithm, square-free
//! decomposition and extraction of roots lying in ℚ(i).

use std::fmt;

use num_complex::Complex64;

use crate::gaussian::GaussianRational;
use crate::probe::roots_univariate;

/// Coefficients stored lowest degree first, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<GaussianRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(GaussianRational::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::new(vec![c])
    }

    /// `z - r`
    pub fn linear_root(r: &GaussianRational) -> Self {
        Self::new(vec![-r, GaussianRational::one()])
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> GaussianRational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn coeff(&self, k: usize) -> GaussianRational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// Order of vanishing at 0 (`None` for the zero polynomial).
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => Self::zero(),
            Some(lc) => {
                let inv = lc.inv().expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| &self.coeff(k) + &other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| &self.coeff(k) - &other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![GaussianRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(GaussianRational::one()), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics when dividing by zero.
    pub fn divrem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let inv_lc = divisor.leading().inv().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![GaussianRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &inv_lc;
            if c.is_zero() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &(&c * b);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Exact quotient; debug-asserts that the remainder vanishes.
    pub fn exact_div(&self, divisor: &Self) -> Self {
        let (q, r) = self.divrem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * &GaussianRational::from(k as i64)).collect())
    }

    pub fn eval(&self, z: &GaussianRational) -> GaussianRational {
        self.coeffs.iter().rev().fold(GaussianRational::zero(), |acc, c| &(&acc * z) + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_complex())
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(GaussianRational::to_complex).collect()
    }

    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// Yun's algorithm: returns monic square-free `a_k` with multiplicity `k`
    /// such that `self = lc · Π a_k^k`. Constant factors are omitted.
    pub fn squarefree_decomposition(&self) -> Vec<(UniPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let p = self.monic();
        let dp = p.derivative();
        let b = p.gcd(&dp);
        let mut c = p.exact_div(&b);
        let mut d = dp.exact_div(&b).sub(&c.derivative());
        let mut k = 1;
        while c.degree().unwrap_or(0) > 0 {
            let a = c.gcd(&d);
            c = c.exact_div(&a);
            d = d.exact_div(&a).sub(&c.derivative());
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, k));
            }
            k += 1;
        }
        out
    }

    /// Roots lying in ℚ(i), with multiplicities, plus the monic cofactor that
    /// has no root in ℚ(i).
    pub fn qi_roots(&self) -> QiRoots {
        let mut roots = Vec::new();
        let mut residual = UniPoly::constant(GaussianRational::one());
        for (factor, mult) in self.squarefree_decomposition() {
            let found = squarefree_qi_roots(&factor);
            let mut rest = factor.clone();
            for r in &found {
                rest = rest.exact_div(&UniPoly::linear_root(r));
                roots.push((r.clone(), mult));
            }
            if rest.degree().unwrap_or(0) > 0 {
                residual = residual.mul(&rest.pow(mult as u32));
            }
        }
        roots.sort_by(|a, b| cmp_gaussian(&a.0, &b.0));
        QiRoots { roots, residual: residual.monic() }
    }
}

/// Total order on ℚ(i) used for deterministic reporting: real part, then
/// imaginary part.
pub fn cmp_gaussian(a: &GaussianRational, b: &GaussianRational) -> std::cmp::Ordering {
    a.re.cmp(&b.re).then_with(|| a.im.cmp(&b.im))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QiRoots {
    pub roots: Vec<(GaussianRational, usize)>,
    pub residual: UniPoly,
}

impl QiRoots {
    pub fn splits(&self) -> bool {
        self.residual.degree().unwrap_or(0) == 0
    }
}

fn squarefree_qi_roots(p: &UniPoly) -> Vec<GaussianRational> {
    match p.degree() {
        None | Some(0) => Vec::new(),
        Some(1) => vec![-&(&p.coeff(0) / &p.coeff(1))],
        Some(2) => {
            let (a, b, c) = (p.coeff(2), p.coeff(1), p.coeff(0));
            let disc = &(&b * &b) - &(&GaussianRational::from(4) * &(&a * &c));
            match disc.sqrt() {
                Some(s) => {
                    let two_a = &GaussianRational::from(2) * &a;
                    vec![&(&-&b + &s) / &two_a, &(&-&b - &s) / &two_a]
                }
                None => Vec::new(),
            }
        }
        Some(_) => candidate_roots(p),
    }
}

/// Rational-root search over ℤ[i]: after clearing denominators, a root `r`
/// satisfies `a_n·r ∈ ℤ[i]`, so rounding `a_n·z` at each numeric root `z`
/// produces the only candidate, which is then checked exactly.
fn candidate_roots(p: &UniPoly) -> Vec<GaussianRational> {
    let lcm = p
        .coeffs()
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, c| num_integer::Integer::lcm(&acc, &c.denominator_lcm()));
    let scaled = p.scale(&GaussianRational::real(num_rational::BigRational::from_integer(lcm)));
    let lead = scaled.leading();
    let lead_c = lead.to_complex();
    let Ok(numeric) = roots_univariate(&scaled.to_complex()) else {
        return Vec::new();
    };
    let mut found: Vec<GaussianRational> = Vec::new();
    for z in numeric {
        let Some(g) = GaussianRational::round_complex(lead_c * z) else {
            continue;
        };
        let r = &g / &lead;
        if !found.contains(&r) && scaled.eval(&r).is_zero() {
            found.push(r);
        }
    }
    found
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> =
            self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| format!("({c})*z^{k}")).collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(a: i64, b: i64) -> GaussianRational {
        GaussianRational::from_integers(a, b)
    }

    fn from_roots(roots: &[GaussianRational]) -> UniPoly {
        roots.iter().fold(UniPoly::constant(GaussianRational::one()), |acc, r| acc.mul(&UniPoly::linear_root(r)))
    }

    #[test]
    fn division_and_gcd() {
        let a = from_roots(&[gr(1, 0), gr(2, 0), gr(0, 1)]);
        let b = from_roots(&[gr(2, 0), gr(0, 1), gr(-5, 3)]);
        let g = a.gcd(&b);
        assert_eq!(g, from_roots(&[gr(2, 0), gr(0, 1)]));
        let (q, r) = a.divrem(&g);
        assert!(r.is_zero());
        assert_eq!(q, UniPoly::linear_root(&gr(1, 0)));
    }

    #[test]
    fn yun_decomposition() {
        // (z-1)^3 (z-i)^2 (z+2)
        let p = from_roots(&[gr(1, 0), gr(1, 0), gr(1, 0), gr(0, 1), gr(0, 1), gr(-2, 0)]).scale(&gr(3, 0));
        let sf = p.squarefree_decomposition();
        assert_eq!(
            sf,
            vec![
                (UniPoly::linear_root(&gr(-2, 0)), 1),
                (UniPoly::linear_root(&gr(0, 1)), 2),
                (UniPoly::linear_root(&gr(1, 0)), 3)
            ]
        );
    }

    #[test]
    fn gaussian_roots_of_quadratic_and_higher() {
        // z^2 + 1
        let p = UniPoly::new(vec![gr(1, 0), gr(0, 0), gr(1, 0)]);
        let r = p.qi_roots();
        assert_eq!(r.roots, vec![(gr(0, -1), 1), (gr(0, 1), 1)]);
        assert!(r.splits());
        // (z^2 - 2)(3z - 1+i)(z + 7/2)
        let half7 = GaussianRational::from_ratio(-7, 2);
        let third = &gr(1, -1) / &gr(3, 0);
        let q = UniPoly::new(vec![gr(-2, 0), gr(0, 0), gr(1, 0)])
            .mul(&from_roots(&[third.clone(), half7.clone()]))
            .scale(&gr(3, 0));
        let r = q.qi_roots();
        assert_eq!(r.roots.len(), 2);
        assert!(r.roots.contains(&(third, 1)));
        assert!(r.roots.contains(&(half7, 1)));
        assert_eq!(r.residual, UniPoly::new(vec![gr(-2, 0), gr(0, 0), gr(1, 0)]));
    }

    #[test]
    fn repeated_gaussian_roots() {
        let p = from_roots(&[gr(1, 2), gr(1, 2), gr(-3, 0), gr(4, -1), gr(4, -1), gr(4, -1)]);
        let r = p.qi_roots();
        assert_eq!(r.roots, vec![(gr(-3, 0), 1), (gr(1, 2), 2), (gr(4, -1), 3)]);
        assert!(r.splits());
    }
}
