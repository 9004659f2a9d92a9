//! Field elements that stay exact in ℚ(i) until an operation forces a
//! complex float (an irrational root of unity or edge root).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::gaussian::GaussianRational;

/// Relative tolerance for deciding that a float value is zero or that two
/// floats agree.
pub const APPROX_TOL: f64 = 1e-10;

#[derive(Clone, PartialEq)]
pub enum Scalar {
    Exact(GaussianRational),
    Approx(Complex64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(GaussianRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(GaussianRational::one())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn exact(&self) -> Option<&GaussianRational> {
        match self {
            Scalar::Exact(g) => Some(g),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(g) => g.to_complex(),
            Scalar::Approx(z) => *z,
        }
    }

    pub fn norm(&self) -> f64 {
        self.to_complex().norm()
    }

    /// Exact zero test, or `|z| <= APPROX_TOL * scale` for floats.
    pub fn is_negligible(&self, scale: f64) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Approx(z) => z.norm() <= APPROX_TOL * scale,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.is_negligible(0.0)
    }

    /// Exact equality, or agreement within `tol` relative to the larger
    /// magnitude (floored at `floor`).
    pub fn approx_eq(&self, other: &Scalar, tol: f64, floor: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_complex(), other.to_complex());
                (a - b).norm() <= tol * a.norm().max(b.norm()).max(floor)
            }
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Exact(g) => g.inv().map(Scalar::Exact),
            Scalar::Approx(z) => (z.norm() > 0.0).then(|| Scalar::Approx(1.0 / z)),
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(g.pow(e)),
            Scalar::Approx(z) => Scalar::Approx(z.powu(e)),
        }
    }

    /// A primitive `n`-th root of unity: exact for n ∈ {1, 2, 4}.
    pub fn root_of_unity(n: u32) -> Scalar {
        match n {
            1 => Scalar::one(),
            2 => Scalar::Exact(GaussianRational::from_integers(-1, 0)),
            4 => Scalar::Exact(GaussianRational::i()),
            _ => Scalar::Approx(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64)),
        }
    }

    /// Some `q`-th root of `self`, exact when one exists in ℚ(i).
    pub fn nth_root(&self, q: u32) -> Scalar {
        if q == 1 {
            return self.clone();
        }
        if let Scalar::Exact(w) = self {
            if let Some(c) = exact_nth_root(w, q) {
                return Scalar::Exact(c);
            }
        }
        Scalar::Approx(self.to_complex().powf(1.0 / q as f64))
    }
}

fn exact_nth_root(w: &GaussianRational, q: u32) -> Option<GaussianRational> {
    if q == 2 {
        return w.sqrt();
    }
    if q.is_multiple_of(2) {
        return exact_nth_root(&w.sqrt()?, q / 2).or_else(|| {
            let minus = -w.sqrt()?;
            exact_nth_root(&minus, q / 2)
        });
    }
    // any root c ∈ ℚ(i) has c·L a Gaussian integer when L clears w's denominators
    let l = GaussianRational::real(num_rational::BigRational::from_integer(w.denominator_lcm()));
    let target = w * &l.pow(q);
    let principal = w.to_complex().powf(1.0 / q as f64) * l.to_complex();
    for k in 0..q {
        let cand = principal * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / q as f64);
        if let Some(z) = GaussianRational::round_complex(cand) {
            if z.pow(q) == target {
                return Some(&z / &l);
            }
        }
    }
    None
}

impl From<GaussianRational> for Scalar {
    fn from(g: GaussianRational) -> Self {
        Scalar::Exact(g)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Approx(z)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => write!(f, "{g}"),
            Scalar::Approx(z) => write!(f, "~({}{:+}*i)", z.re, z.im),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$method(b)),
                    _ => Scalar::Approx(self.to_complex().$method(rhs.to_complex())),
                }
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Approx(z) => Scalar::Approx(-z),
        }
    }
}

/// Truncated power series `Σ c_k s^k`, `k < len`.
pub type Series = Vec<Scalar>;

pub fn series_zero(len: usize) -> Series {
    vec![Scalar::zero(); len]
}

pub fn series_mul(a: &[Scalar], b: &[Scalar], len: usize) -> Series {
    let mut out = series_zero(len);
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

pub fn series_add(a: &[Scalar], b: &[Scalar], len: usize) -> Series {
    (0..len)
        .map(|k| match (a.get(k), b.get(k)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => Scalar::zero(),
        })
        .collect()
}

pub fn series_sub(a: &[Scalar], b: &[Scalar], len: usize) -> Series {
    let neg: Series = b.iter().map(|x| -x).collect();
    series_add(a, &neg, len)
}

/// Multiplicative inverse; `a[0]` must be nonzero.
pub fn series_inv(a: &[Scalar], len: usize) -> Option<Series> {
    let a0inv = a.first()?.inv()?;
    let mut out = series_zero(len);
    if len == 0 {
        return Some(out);
    }
    out[0] = a0inv.clone();
    for k in 1..len {
        let mut acc = Scalar::zero();
        for j in 1..=k.min(a.len().saturating_sub(1)) {
            acc = &acc + &(&a[j] * &out[k - j]);
        }
        out[k] = -&(&acc * &a0inv);
    }
    Some(out)
}

/// Index of the first coefficient that is not negligible.
pub fn series_valuation(a: &[Scalar], scale: f64) -> Option<usize> {
    a.iter().position(|c| !c.is_negligible(scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(re: i64, im: i64) -> Scalar {
        Scalar::Exact(GaussianRational::from_integers(re, im))
    }

    #[test]
    fn arithmetic_stays_exact() {
        let a = ex(1, 2);
        let b = ex(3, -1);
        assert_eq!(&a * &b, ex(5, 5));
        assert!((&a + &b).is_exact());
        let c = &a + &Scalar::Approx(Complex64::new(0.5, 0.0));
        assert!(!c.is_exact());
        assert!((c.to_complex() - Complex64::new(1.5, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn roots_of_unity() {
        for n in [1u32, 2, 3, 4, 6] {
            let w = Scalar::root_of_unity(n);
            assert!(w.pow(n).approx_eq(&Scalar::one(), 1e-12, 1.0));
            for k in 1..n {
                assert!(!w.pow(k).approx_eq(&Scalar::one(), 1e-6, 1.0), "n={n} k={k}");
            }
        }
        assert!(Scalar::root_of_unity(4).is_exact());
        assert!(!Scalar::root_of_unity(3).is_exact());
    }

    #[test]
    fn nth_roots() {
        assert_eq!(ex(-1, 0).nth_root(2).pow(2), ex(-1, 0));
        assert!(ex(-1, 0).nth_root(2).is_exact());
        assert!(ex(-8, 0).nth_root(3).is_exact());
        assert_eq!(ex(-8, 0).nth_root(3).pow(3), ex(-8, 0));
        assert!(ex(-4, 0).nth_root(4).is_exact());
        let r = ex(2, 0).nth_root(2);
        assert!(!r.is_exact());
        assert!((r.to_complex().norm() - 2f64.sqrt()).abs() < 1e-14);
        let frac = Scalar::Exact("8/27".parse().unwrap());
        assert_eq!(frac.nth_root(3), Scalar::Exact("2/3".parse().unwrap()));
    }

    #[test]
    fn series_inverse() {
        // 1/(1 - s) = 1 + s + s^2 + ...
        let a = vec![ex(1, 0), ex(-1, 0)];
        let inv = series_inv(&a, 5).unwrap();
        assert!(inv.iter().all(|c| *c == ex(1, 0)));
        let prod = series_mul(&a, &inv, 5);
        assert_eq!(prod[0], ex(1, 0));
        assert!(prod[1..].iter().all(Scalar::is_zero));
        assert_eq!(series_valuation(&[ex(0, 0), ex(0, 0), ex(3, 0)], 1.0), Some(2));
    }
}
