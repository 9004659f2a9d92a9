//! Points at infinity of plane curves `f = t`, local equations there, and
//! tangent cones.
//!
//! A point `[a:b]` of the line at infinity is moved to `[1:0]` by a linear
//! change of coordinates; with `[1:u:v] = [x1:x2:1]` the level `t` curve is
//! then `g_t(u, v) = F(1, u, v) - t·v^d` near the origin, and the line at
//! infinity is `{v = 0}`.

use std::fmt;

use crate::gaussian::GaussianRational;
use crate::poly::MultiPoly;
use crate::univariate::{cmp_gaussian, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InfinityError {
    #[error("polynomial is constant")]
    Constant,
    #[error("expected a polynomial in 2 variables, got {0}")]
    NotBivariate(usize),
    #[error("point {0} does not lie on the trace at infinity")]
    NotOnTrace(String),
}

/// A root `[a:b]` of the top form `f_d`, normalized so that the first
/// nonzero coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointAtInfinity {
    pub coords: [GaussianRational; 2],
    /// Multiplicity of the root in `f_d`.
    pub mult_a: u32,
}

impl PointAtInfinity {
    pub fn new(a: GaussianRational, b: GaussianRational, mult_a: u32) -> Self {
        let (a, b) = if a.is_zero() {
            (a, GaussianRational::one())
        } else {
            let b = &b / &a;
            (GaussianRational::one(), b)
        };
        Self { coords: [a, b], mult_a }
    }
}

impl fmt::Display for PointAtInfinity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.coords[0], self.coords[1])
    }
}

/// `X^∞ = {f_d = 0}`: the points over ℚ(i) and whatever part of `f_d`
/// does not split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceAtInfinity {
    pub degree: u32,
    pub points: Vec<PointAtInfinity>,
    /// Monic factor of `f_d(1, u)` without roots in ℚ(i), if nonconstant.
    pub residual: Option<UniPoly>,
}

impl TraceAtInfinity {
    pub fn splits(&self) -> bool {
        self.residual.is_none()
    }
}

fn require_bivariate(f: &MultiPoly) -> Result<u32, InfinityError> {
    if f.nvars() != 2 {
        return Err(InfinityError::NotBivariate(f.nvars()));
    }
    match f.degree() {
        Some(d) if d >= 1 => Ok(d),
        _ => Err(InfinityError::Constant),
    }
}

pub fn points_at_infinity(f: &MultiPoly) -> Result<TraceAtInfinity, InfinityError> {
    let d = require_bivariate(f)?;
    let top = f.homogeneous_part(d);
    let affine = top.specialize(0, &GaussianRational::one()).to_univariate(0).expect("bivariate form");
    let found = affine.qi_roots();
    let mut points: Vec<PointAtInfinity> =
        found.roots.iter().map(|(b, k)| PointAtInfinity::new(GaussianRational::one(), b.clone(), *k as u32)).collect();
    let finite_degree = affine.degree().unwrap_or(0) as u32;
    if finite_degree < d {
        points.push(PointAtInfinity::new(GaussianRational::zero(), GaussianRational::one(), d - finite_degree));
    }
    let residual = (!found.splits()).then_some(found.residual);
    Ok(TraceAtInfinity { degree: d, points, residual })
}

/// Linear change `x = M·X` sending the point to `[1:0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub matrix: [[GaussianRational; 2]; 2],
}

impl Chart {
    fn for_point(p: &PointAtInfinity) -> Self {
        let (zero, one) = (GaussianRational::zero(), GaussianRational::one());
        if p.coords[0].is_zero() {
            Self { matrix: [[zero.clone(), one.clone()], [one, zero]] }
        } else {
            Self { matrix: [[one.clone(), zero], [p.coords[1].clone(), one]] }
        }
    }

    pub fn apply(&self, f: &MultiPoly) -> MultiPoly {
        let images: Vec<MultiPoly> = self.matrix.iter().map(|row| MultiPoly::linear(row)).collect();
        f.substitute(&images).expect("bivariate")
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.matrix;
        let x1 = MultiPoly::linear(&m[0]).format_with(&["X1", "X2"]);
        let x2 = MultiPoly::linear(&m[1]).format_with(&["X1", "X2"]);
        write!(f, "x = {x1}, y = {x2}")
    }
}

/// `f_{d-m+k}(1, u) = u^{k + a_k}·h_k(1, u)`; `a_k` is absent when the
/// homogeneous part vanishes identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffValuation {
    pub k: u32,
    pub a_k: Option<i64>,
    pub h_nonzero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalModel {
    pub point: PointAtInfinity,
    pub chart: Chart,
    pub degree: u32,
    /// `F(1, u, v)` in variables `(u, v)`; the level-`t` equation is
    /// `g - t·v^d`.
    pub g: MultiPoly,
    pub m: u32,
    pub lowest_form: MultiPoly,
    /// `Some(λ)` when the lowest form is `λ·v^m`.
    pub lambda: Option<GaussianRational>,
    pub coeff_valuations: Vec<CoeffValuation>,
}

impl LocalModel {
    pub fn instantiate(&self, t: &GaussianRational) -> MultiPoly {
        let tv = MultiPoly::monomial(2, vec![0, self.degree], t.clone());
        &self.g - &tv
    }
}

pub fn local_model(f: &MultiPoly, p: &PointAtInfinity) -> Result<LocalModel, InfinityError> {
    let d = require_bivariate(f)?;
    let top = f.homogeneous_part(d);
    if !top.eval(&p.coords).is_zero() {
        return Err(InfinityError::NotOnTrace(p.to_string()));
    }
    let chart = Chart::for_point(p);
    let moved = chart.apply(f);
    let big_f = moved.homogenize().expect("nonzero");
    let u = MultiPoly::var(2, 0);
    let v = MultiPoly::var(2, 1);
    let g = big_f.substitute(&[MultiPoly::one(2), u, v.clone()]).expect("three variables");
    let m = g.lowest_degree().expect("nonzero");
    let lowest_form = g.lowest_form();
    let lambda = (lowest_form.num_terms() == 1 && lowest_form.coefficient(&[0, m]) != GaussianRational::zero())
        .then(|| lowest_form.coefficient(&[0, m]));
    let parts = moved.homogeneous_parts();
    let coeff_valuations = (1..=m.min(d))
        .map(|k| {
            let part = parts.part((d - m + k) as usize);
            let along = part.specialize(0, &GaussianRational::one()).to_univariate(0).expect("form");
            let a_k = along.valuation().map(|val| val as i64 - k as i64);
            CoeffValuation { k, a_k, h_nonzero: a_k.is_some() }
        })
        .collect();
    Ok(LocalModel { point: p.clone(), chart, degree: d, g, m, lowest_form, lambda, coeff_valuations })
}

/// A line through the origin of the `(u, v)` chart, given by a direction
/// `[u:v]`; `[1:0]` is the line at infinity itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeLine {
    pub direction: [GaussianRational; 2],
    pub multiplicity: u32,
}

impl ConeLine {
    pub fn is_hyperplane(&self) -> bool {
        self.direction[1].is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentCone {
    pub form: MultiPoly,
    pub lines: Vec<ConeLine>,
    /// Factor of `form(u, 1)` with no root in ℚ(i).
    pub residual: Option<UniPoly>,
}

impl TangentCone {
    pub fn degree(&self) -> u32 {
        self.form.degree().unwrap_or(0)
    }

    /// True when the cone is the line at infinity `{v = 0}` alone.
    pub fn is_hyperplane(&self) -> bool {
        self.residual.is_none() && self.lines.len() == 1 && self.lines[0].is_hyperplane()
    }

    fn affine_part(&self) -> UniPoly {
        self.form.specialize(1, &GaussianRational::one()).to_univariate(0).expect("binary form")
    }
}

pub fn tangent_cone(model: &LocalModel, t: &GaussianRational) -> TangentCone {
    let g = model.instantiate(t);
    assert!(!g.is_zero(), "local equation vanishes identically");
    cone_of(&g)
}

fn cone_of(g: &MultiPoly) -> TangentCone {
    let form = g.lowest_form();
    let deg = form.degree().unwrap_or(0);
    let along = form.specialize(1, &GaussianRational::one()).to_univariate(0).expect("binary form");
    let found = along.qi_roots();
    let mut lines: Vec<ConeLine> = found
        .roots
        .iter()
        .map(|(c, k)| {
            // u - c·v = 0 has direction [c:1]
            let direction = if c.is_zero() {
                [GaussianRational::zero(), GaussianRational::one()]
            } else {
                [GaussianRational::one(), c.inv().expect("nonzero")]
            };
            ConeLine { direction, multiplicity: *k as u32 }
        })
        .collect();
    let v_mult = deg - along.degree().unwrap_or(0) as u32;
    if v_mult > 0 {
        lines.push(ConeLine { direction: [GaussianRational::one(), GaussianRational::zero()], multiplicity: v_mult });
    }
    lines.sort_by(|a, b| {
        cmp_gaussian(&a.direction[0], &b.direction[0]).then_with(|| cmp_gaussian(&a.direction[1], &b.direction[1]))
    });
    let residual = (!found.splits()).then_some(found.residual);
    TangentCone { form, lines, residual }
}

/// True when the tangent cones of the levels `s` and `t` share a line other
/// than the line at infinity; this forces `dist(X_s, X_t) = 0`.
pub fn cone_criterion(model: &LocalModel, s: &GaussianRational, t: &GaussianRational) -> bool {
    let a = tangent_cone(model, s).affine_part();
    let b = tangent_cone(model, t).affine_part();
    a.gcd(&b).degree().unwrap_or(0) >= 1
}

/// How the tangent cones of two levels meet at the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConeHorn {
    /// Both cones are the line at infinity.
    TangentToHyperplane,
    /// The cones have no common line.
    IsolatedIntersection,
    /// They share a line other than the line at infinity.
    SharedLine,
    /// Their only common line is the line at infinity, but they are not
    /// both equal to it.
    HyperplaneLineOnly,
}

pub fn cone_horn(model: &LocalModel, s: &GaussianRational, t: &GaussianRational) -> ConeHorn {
    if cone_criterion(model, s, t) {
        return ConeHorn::SharedLine;
    }
    let a = tangent_cone(model, s);
    let b = tangent_cone(model, t);
    if a.is_hyperplane() && b.is_hyperplane() {
        ConeHorn::TangentToHyperplane
    } else if a.lines.iter().any(ConeLine::is_hyperplane) && b.lines.iter().any(ConeLine::is_hyperplane) {
        ConeHorn::HyperplaneLineOnly
    } else {
        ConeHorn::IsolatedIntersection
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn p(s: &str) -> MultiPoly {
        parse(s, &["x", "y"]).unwrap()
    }

    fn uv(s: &str) -> MultiPoly {
        parse(s, &["u", "v"]).unwrap()
    }

    fn gr(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn pt(a: &str, b: &str) -> [GaussianRational; 2] {
        [gr(a), gr(b)]
    }

    #[test]
    fn trace_examples() {
        let tr = points_at_infinity(&p("x*y")).unwrap();
        assert_eq!(tr.points.len(), 2);
        assert_eq!((tr.points[0].coords.clone(), tr.points[0].mult_a), (pt("1", "0"), 1));
        assert_eq!((tr.points[1].coords.clone(), tr.points[1].mult_a), (pt("0", "1"), 1));
        assert!(tr.splits());

        let tr = points_at_infinity(&p("x + y^2")).unwrap();
        assert_eq!(tr.points, vec![PointAtInfinity::new(gr("1"), gr("0"), 2)]);

        let tr = points_at_infinity(&p("x^2 + y^2")).unwrap();
        let coords: Vec<_> = tr.points.iter().map(|q| (q.coords.clone(), q.mult_a)).collect();
        assert_eq!(coords, vec![(pt("1", "-i"), 1), (pt("1", "i"), 1)]);

        let tr = points_at_infinity(&p("x^2 - 2*y^2 + x")).unwrap();
        assert!(tr.points.is_empty());
        assert_eq!(tr.residual.unwrap().degree(), Some(2));

        assert_eq!(points_at_infinity(&p("7")), Err(InfinityError::Constant));
    }

    #[test]
    fn trace_ignores_constant_shift() {
        for s in ["x*y", "x + y^2", "x^2*y + x", "(x+2*y)^3 + x"] {
            let f = p(s);
            let g = &f - &p("5/3 + i");
            assert_eq!(points_at_infinity(&f).unwrap(), points_at_infinity(&g).unwrap());
        }
    }

    #[test]
    fn xy_model() {
        let f = p("x*y");
        let tr = points_at_infinity(&f).unwrap();
        let model = local_model(&f, &tr.points[0]).unwrap();
        assert_eq!(model.g, uv("u"));
        assert_eq!(model.instantiate(&gr("1")), uv("u - v^2"));
        assert_eq!(model.m, 1);
        assert_eq!(model.lambda, None);
        let cone = tangent_cone(&model, &gr("1"));
        assert_eq!(cone.form, uv("u"));
        assert_eq!(cone.lines, vec![ConeLine { direction: pt("0", "1"), multiplicity: 1 }]);
        assert!(cone_criterion(&model, &gr("1"), &gr("2")));
        assert_eq!(cone_horn(&model, &gr("1"), &gr("2")), ConeHorn::SharedLine);
        // the other point is symmetric
        let other = local_model(&f, &tr.points[1]).unwrap();
        assert_eq!(other.g, uv("u"));
    }

    #[test]
    fn parabola_model() {
        let f = p("x + y^2");
        let point = PointAtInfinity::new(gr("1"), gr("0"), 2);
        let model = local_model(&f, &point).unwrap();
        assert_eq!(model.instantiate(&gr("1")), uv("v + u^2 - v^2"));
        assert_eq!(model.m, 1);
        assert_eq!(model.lambda, Some(gr("1")));
        assert_eq!(model.coeff_valuations, vec![CoeffValuation { k: 1, a_k: Some(1), h_nonzero: true }]);
        for t in ["0", "5"] {
            let cone = tangent_cone(&model, &gr(t));
            assert_eq!(cone.form, uv("v"));
            assert!(cone.is_hyperplane());
        }
        assert!(!cone_criterion(&model, &gr("1"), &gr("2")));
        assert_eq!(cone_horn(&model, &gr("1"), &gr("2")), ConeHorn::TangentToHyperplane);
    }

    #[test]
    fn linear_model() {
        let f = p("x");
        let tr = points_at_infinity(&f).unwrap();
        assert_eq!(tr.points, vec![PointAtInfinity::new(gr("0"), gr("1"), 1)]);
        let model = local_model(&f, &tr.points[0]).unwrap();
        assert_eq!(model.m, 1);
        assert_eq!(model.degree, 1);
    }

    #[test]
    fn single_variable_square_has_isolated_cones() {
        let f = p("(x+2*y)^2");
        let tr = points_at_infinity(&f).unwrap();
        assert_eq!(tr.points, vec![PointAtInfinity::new(gr("1"), gr("-1/2"), 2)]);
        let model = local_model(&f, &tr.points[0]).unwrap();
        assert_eq!(model.m, 2);
        assert!(!cone_criterion(&model, &gr("1"), &gr("4")));
        assert_eq!(cone_horn(&model, &gr("1"), &gr("4")), ConeHorn::IsolatedIntersection);
    }

    #[test]
    fn off_trace_point_rejected() {
        let f = p("x*y");
        let bad = PointAtInfinity::new(gr("1"), gr("1"), 1);
        assert!(matches!(local_model(&f, &bad), Err(InfinityError::NotOnTrace(_))));
    }

    #[test]
    fn lowest_form_is_lambda_v_m_for_all_t_when_m_below_d() {
        for s in ["x + y^2", "x + y^3", "x^2 + y^3 + x*y", "y^2 + x*(y - x^2)"] {
            let f = p(s);
            for point in points_at_infinity(&f).unwrap().points {
                let model = local_model(&f, &point).unwrap();
                if model.m < model.degree && model.lambda.is_some() {
                    for t in ["0", "1", "-3", "1+i"] {
                        assert!(tangent_cone(&model, &gr(t)).is_hyperplane(), "{s} at {point}");
                    }
                }
            }
        }
    }

    #[test]
    fn top_valuation_matches_multiplicity() {
        for s in ["x + y^2", "x + y^3", "x^2 + y^5", "y^2 + x*(y - x^2)"] {
            let f = p(s);
            for point in points_at_infinity(&f).unwrap().points {
                let model = local_model(&f, &point).unwrap();
                if model.lambda.is_some() {
                    let last = model.coeff_valuations.last().unwrap();
                    assert_eq!(last.k, model.m);
                    assert_eq!(last.a_k, Some(point.mult_a as i64 - model.m as i64), "{s}");
                }
            }
        }
    }
}
