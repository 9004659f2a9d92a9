//! Exact Gaussian rationals `a + b·i` with `a, b ∈ ℚ`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An element of ℚ(i). Both parts are kept in lowest terms with positive
/// denominators (guaranteed by `BigRational`).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_integers(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(num.into(), den.into()))
    }

    pub fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn i() -> Self {
        Self::from_integers(0, 1)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_integers(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    /// `|z|²`, always a nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    /// Least common multiple of the two denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        num_integer::Integer::lcm(self.re.denom(), self.im.denom())
    }

    /// Rounds `z` to the nearest Gaussian integer. Returns `None` for
    /// non-finite input.
    pub fn round_complex(z: Complex64) -> Option<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return None;
        }
        let re = BigRational::from_float(z.re.round())?;
        let im = BigRational::from_float(z.im.round())?;
        Some(Self::new(re, im))
    }

    /// Exact square root in ℚ(i), when one exists. The returned root has
    /// nonnegative real part (and nonnegative imaginary part when purely
    /// imaginary).
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        // (x + iy)^2 = a + ib  ⇒  x^2 = (a + |z|)/2, y^2 = (|z| - a)/2
        let modulus = rational_sqrt(&self.norm_sqr())?;
        let two = BigRational::from_integer(2.into());
        let x2 = (&self.re + &modulus) / &two;
        let y2 = (&modulus - &self.re) / &two;
        let x = rational_sqrt(&x2)?;
        let mut y = rational_sqrt(&y2)?;
        if !x.is_zero() {
            // sign of y fixed by 2xy = b
            if (self.im.is_negative()) != y.is_negative() && !y.is_zero() {
                y = -y;
            }
        }
        let root = Self::new(x, y);
        debug_assert!(&(&root * &root) == self);
        Some(root)
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: fall back to a scaled division.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Square root of a nonnegative rational, when it is rational.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        Self::from_integers(v, 0)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(v: BigRational) -> Self {
        Self::real(v)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &'a GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
    };
}

impl<'a> Add<&'a GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &'a GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &'a GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &'a GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::real(&self.re * &rhs.re);
        }
        GaussianRational::new(&self.re * &rhs.re - &self.im * &rhs.im, &self.re * &rhs.im + &self.im * &rhs.re)
    }
}

impl<'a> Div<&'a GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    /// Panics on division by zero, like the integer types.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &'a GaussianRational) -> GaussianRational {
        let inv = rhs.inv().expect("division of Gaussian rational by zero");
        self * &inv
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form: `p/q`, `r/s*i`, `p/q+r/s*i` or `p/q-r/s*i`.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_ratio(&self.re)),
            (true, false) => write!(f, "{}*i", fmt_ratio(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}*i", fmt_ratio(&self.re), sign, fmt_ratio(&self.im.abs()))
            }
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed Gaussian rational literal {0:?}")]
pub struct GaussianParseError(pub String);

fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Parses the canonical [`Display`](fmt::Display) form back; a bare `i`
/// (as in `1+i` or `-i`) is also accepted.
impl FromStr for GaussianRational {
    type Err = GaussianParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || GaussianParseError(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = match (t.strip_suffix("*i"), t.strip_suffix('i')) {
            (Some(b), _) => b.to_string(),
            // bare `i`, `-i`, `2+i`: implied unit coefficient
            (None, Some(b)) if b.is_empty() || b.ends_with(['+', '-']) => format!("{b}1"),
            (None, Some(b)) if b.ends_with(|c: char| c.is_ascii_digit()) => b.to_string(),
            _ => return parse_ratio(&t).map(Self::real).ok_or_else(err),
        };
        // split at the last sign that is not the leading one
        let split = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(k, _)| k).last();
        match split {
            Some(k) => {
                let re = parse_ratio(&body[..k]).ok_or_else(err)?;
                let im_str = &body[k..];
                let im = parse_ratio(im_str.strip_prefix('+').unwrap_or(im_str)).ok_or_else(err)?;
                Ok(Self::new(re, im))
            }
            None => Ok(Self::new(BigRational::zero(), parse_ratio(&body).ok_or_else(err)?)),
        }
    }
}
