//! Point enumeration and function evaluation on the rational curve over `F_q`
//! and the Hermitian curve `x^{q+1} = y^q + y` over `F_{q²}`, plus the
//! one-point pole-order (Weierstrass semigroup) bases both schemes draw
//! their function spaces from.
//!
//! Curve functions are stored as fractions of sparse bivariate polynomials
//! and are never normalized modulo the curve equation; all dimension counting
//! downstream happens on evaluation vectors over the admissible point set.

use crate::gf::{FieldElement, FieldParams};
use crate::linalg::Matrix;
use crate::poly::Poly;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("function has a pole at the evaluation point")]
    PoleAtPoint,
    #[error(transparent)]
    Field(#[from] crate::gf::GfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveVariant {
    Rational,
    /// Hermitian curve with parameter `q`; the constant field is `F_{q²}`.
    Hermitian {
        q: u64,
    },
}

/// A curve together with its constant field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    variant: CurveVariant,
    field: FieldParams,
}

/// An affine point. The point at infinity is never materialized; it only
/// enters divisor-degree bookkeeping. For the rational curve `y` is unused
/// and held at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CurvePoint {
    pub x: FieldElement,
    pub y: FieldElement,
}

impl Curve {
    /// The projective line over `F_q`; its affine points are the field itself.
    pub fn rational(q: u64) -> Result<Self, CurveError> {
        Ok(Curve {
            variant: CurveVariant::Rational,
            field: FieldParams::with_cardinality(q)?,
        })
    }

    /// The Hermitian curve `x^{q+1} = y^q + y` over `F_{q²}`.
    pub fn hermitian(q: u64) -> Result<Self, CurveError> {
        let (p, e) =
            crate::gf::factor_prime_power(q).ok_or(crate::gf::GfError::NotPrimePower(q))?;
        Ok(Curve {
            variant: CurveVariant::Hermitian { q },
            field: FieldParams::new(p, 2 * e)?,
        })
    }

    pub fn variant(&self) -> CurveVariant {
        self.variant
    }

    pub fn field(&self) -> &FieldParams {
        &self.field
    }

    pub fn genus(&self) -> u64 {
        match self.variant {
            CurveVariant::Rational => 0,
            CurveVariant::Hermitian { q } => q * (q - 1) / 2,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        matches!(self.variant, CurveVariant::Hermitian { .. })
    }

    /// Checks the defining equation (vacuous for the rational curve).
    pub fn contains(&self, pt: CurvePoint) -> bool {
        match self.variant {
            CurveVariant::Rational => pt.y.is_zero(),
            CurveVariant::Hermitian { q } => {
                let f = &self.field;
                let lhs = f.pow(pt.x, q + 1);
                let rhs = f.add(f.pow(pt.y, q), pt.y);
                lhs == rhs
            }
        }
    }

    /// All affine rational points, ordered by (x-index, y-index).
    ///
    /// Rational curve: one point per field element (`q` points). Hermitian:
    /// for each `α` the `q` solutions `β` of `β^q + β = α^{q+1}`, found by
    /// exhaustive scan over `F_{q²}`; `q³` points in total.
    pub fn enumerate_points(&self) -> Vec<CurvePoint> {
        match self.variant {
            CurveVariant::Rational => self
                .field
                .elements()
                .map(|x| CurvePoint {
                    x,
                    y: FieldElement::ZERO,
                })
                .collect(),
            CurveVariant::Hermitian { q } => {
                let f = &self.field;
                let mut pts = Vec::with_capacity((q * q * q) as usize);
                for x in f.elements() {
                    let target = f.pow(x, q + 1);
                    for y in f.elements() {
                        if f.add(f.pow(y, q), y) == target {
                            pts.push(CurvePoint { x, y });
                        }
                    }
                }
                pts
            }
        }
    }

    /// The affine points with `x ≠ 0`, in enumeration order. These avoid the
    /// support of both schemes' bounding divisors: the excluded places are
    /// the point at infinity and the zeros of `x` (which on the Hermitian
    /// curve include the single zero of `y`).
    pub fn admissible_points(&self) -> Vec<CurvePoint> {
        self.enumerate_points()
            .into_iter()
            .filter(|p| !p.x.is_zero())
            .collect()
    }

    /// Basis of the functions with poles only at infinity of pole order at
    /// most `max_order`, sorted by pole order.
    ///
    /// Rational: `{x^i : i ≤ max_order}`. Hermitian: `{x^i y^j : qi+(q+1)j ≤
    /// max_order, j ≤ q-1}` (pole orders in the Weierstrass semigroup at the
    /// infinite place are distinct, so the order is strict).
    pub fn one_point_basis(&self, max_order: u64) -> Vec<CurveFunction> {
        match self.variant {
            CurveVariant::Rational => (0..=max_order)
                .map(|i| CurveFunction::monomial(i as u32, 0))
                .collect(),
            CurveVariant::Hermitian { q } => {
                let mut with_order = Vec::new();
                for j in 0..q.min(max_order / (q + 1) + 1) {
                    if j > q - 1 {
                        break;
                    }
                    let base = (q + 1) * j;
                    if base > max_order {
                        break;
                    }
                    for i in 0..=(max_order - base) / q {
                        with_order.push((q * i + base, i as u32, j as u32));
                    }
                }
                with_order.sort_unstable();
                with_order
                    .into_iter()
                    .map(|(_, i, j)| CurveFunction::monomial(i, j))
                    .collect()
            }
        }
    }
}

/// Sparse bivariate polynomial: `(i, j) → coefficient of x^i y^j`. The
/// BTreeMap keeps term order canonical for serialization and digests.
pub type TermMap = BTreeMap<(u32, u32), FieldElement>;

/// A curve function stored as a fraction of sparse bivariate polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveFunction {
    num: TermMap,
    den: TermMap,
}

fn poly_to_terms(p: &Poly, y_power: u32) -> TermMap {
    p.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, &c)| ((i as u32, y_power), c))
        .collect()
}

fn term_mul(a: &TermMap, b: &TermMap, field: &FieldParams) -> TermMap {
    let mut out = TermMap::new();
    for (&(i1, j1), &c1) in a {
        for (&(i2, j2), &c2) in b {
            let key = (i1 + i2, j1 + j2);
            let add = field.mul(c1, c2);
            let entry = out.entry(key).or_insert(FieldElement::ZERO);
            *entry = field.add(*entry, add);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

impl CurveFunction {
    pub fn one() -> CurveFunction {
        CurveFunction::monomial(0, 0)
    }

    /// `x^i y^j`.
    pub fn monomial(i: u32, j: u32) -> CurveFunction {
        let mut num = TermMap::new();
        num.insert((i, j), FieldElement::ONE);
        let mut den = TermMap::new();
        den.insert((0, 0), FieldElement::ONE);
        CurveFunction { num, den }
    }

    /// A univariate polynomial in `x` as a curve function.
    pub fn from_x_poly(p: &Poly) -> CurveFunction {
        CurveFunction {
            num: poly_to_terms(p, 0),
            den: poly_to_terms(&Poly::one(), 0),
        }
    }

    /// `num / den` where both are polynomials in `x` times a power of `y`.
    pub fn ratio(num: &Poly, num_y: u32, den: &Poly, den_y: u32) -> CurveFunction {
        let den_terms = poly_to_terms(den, den_y);
        assert!(!den_terms.is_empty(), "zero denominator");
        CurveFunction {
            num: poly_to_terms(num, num_y),
            den: den_terms,
        }
    }

    pub fn from_terms(num: TermMap, den: TermMap) -> CurveFunction {
        assert!(!den.is_empty(), "zero denominator");
        CurveFunction { num, den }
    }

    pub fn num_terms(&self) -> &TermMap {
        &self.num
    }

    pub fn den_terms(&self) -> &TermMap {
        &self.den
    }

    /// Product of representations: numerators and denominators multiply.
    pub fn mul(&self, rhs: &CurveFunction, field: &FieldParams) -> CurveFunction {
        CurveFunction {
            num: term_mul(&self.num, &rhs.num, field),
            den: term_mul(&self.den, &rhs.den, field),
        }
    }

    fn eval_terms(
        terms: &TermMap,
        xpow: &[FieldElement],
        ypow: &[FieldElement],
        field: &FieldParams,
    ) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for (&(i, j), &c) in terms {
            let t = field.mul(c, field.mul(xpow[i as usize], ypow[j as usize]));
            acc = field.add(acc, t);
        }
        acc
    }

    /// `num(P) · den(P)^{-1}`.
    pub fn eval(&self, pt: CurvePoint, field: &FieldParams) -> Result<FieldElement, CurveError> {
        let (xd, yd) = self.max_degrees();
        let xpow = powers(pt.x, xd, field);
        let ypow = powers(pt.y, yd, field);
        let den = Self::eval_terms(&self.den, &xpow, &ypow, field);
        if den.is_zero() {
            return Err(CurveError::PoleAtPoint);
        }
        let num = Self::eval_terms(&self.num, &xpow, &ypow, field);
        Ok(field.mul(num, field.inv(den).expect("den is nonzero")))
    }

    fn max_degrees(&self) -> (u32, u32) {
        let mut xd = 0;
        let mut yd = 0;
        for key in self.num.keys().chain(self.den.keys()) {
            xd = xd.max(key.0);
            yd = yd.max(key.1);
        }
        (xd, yd)
    }
}

fn powers(base: FieldElement, up_to: u32, field: &FieldParams) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(up_to as usize + 1);
    let mut acc = FieldElement::ONE;
    out.push(acc);
    for _ in 0..up_to {
        acc = field.mul(acc, base);
        out.push(acc);
    }
    out
}

/// Evaluates many functions at a fixed point list, reusing per-point power
/// tables. The tables grow on demand.
pub struct BatchEvaluator<'a> {
    field: &'a FieldParams,
    points: &'a [CurvePoint],
    xpows: Vec<Vec<FieldElement>>,
    ypows: Vec<Vec<FieldElement>>,
}

impl<'a> BatchEvaluator<'a> {
    pub fn new(points: &'a [CurvePoint], field: &'a FieldParams) -> Self {
        BatchEvaluator {
            field,
            points,
            xpows: points
                .iter()
                .map(|p| vec![FieldElement::ONE, p.x])
                .collect(),
            ypows: points
                .iter()
                .map(|p| vec![FieldElement::ONE, p.y])
                .collect(),
        }
    }

    fn grow(&mut self, xd: u32, yd: u32) {
        for (k, p) in self.points.iter().enumerate() {
            while self.xpows[k].len() <= xd as usize {
                let last = *self.xpows[k].last().unwrap();
                self.xpows[k].push(self.field.mul(last, p.x));
            }
            while self.ypows[k].len() <= yd as usize {
                let last = *self.ypows[k].last().unwrap();
                self.ypows[k].push(self.field.mul(last, p.y));
            }
        }
    }

    /// One evaluation row: `f` at every point.
    pub fn eval_row(&mut self, f: &CurveFunction) -> Result<Vec<FieldElement>, CurveError> {
        let (xd, yd) = f.max_degrees();
        self.grow(xd, yd);
        let mut row = Vec::with_capacity(self.points.len());
        for k in 0..self.points.len() {
            let den = CurveFunction::eval_terms(&f.den, &self.xpows[k], &self.ypows[k], self.field);
            if den.is_zero() {
                return Err(CurveError::PoleAtPoint);
            }
            let num = CurveFunction::eval_terms(&f.num, &self.xpows[k], &self.ypows[k], self.field);
            row.push(self.field.mul(num, self.field.inv(den).expect("nonzero")));
        }
        Ok(row)
    }
}

/// Evaluation matrix: rows = functions, columns = points.
pub fn evaluate_matrix(
    fns: &[CurveFunction],
    points: &[CurvePoint],
    field: &FieldParams,
) -> Result<Matrix, CurveError> {
    let mut ev = BatchEvaluator::new(points, field);
    let mut rows = Vec::with_capacity(fns.len());
    for f in fns {
        rows.push(ev.eval_row(f)?);
    }
    Ok(Matrix::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    #[test]
    fn hermitian_point_counts() {
        for q in [2u64, 3, 4, 5] {
            let curve = Curve::hermitian(q).unwrap();
            let pts = curve.enumerate_points();
            assert_eq!(pts.len() as u64, q * q * q);
            for p in &pts {
                assert!(curve.contains(*p));
            }
            assert_eq!(curve.admissible_points().len() as u64, q * q * q - q);
        }
    }

    #[test]
    fn hermitian_q2_points_with_x_zero() {
        let curve = Curve::hermitian(2).unwrap();
        let f = curve.field();
        let zero_x: Vec<_> = curve
            .enumerate_points()
            .into_iter()
            .filter(|p| p.x.is_zero())
            .collect();
        // β² + β = 0 over F_4 has exactly the roots of F_2
        assert_eq!(
            zero_x,
            vec![
                CurvePoint {
                    x: f.zero(),
                    y: f.zero()
                },
                CurvePoint {
                    x: f.zero(),
                    y: f.one()
                },
            ]
        );
    }

    #[test]
    fn rational_point_counts() {
        let c5 = Curve::rational(5).unwrap();
        assert_eq!(c5.enumerate_points().len(), 5);
        let c7 = Curve::rational(7).unwrap();
        assert_eq!(c7.admissible_points().len(), 6);
    }

    #[test]
    fn eval_examples() {
        // f = 1/f_1 with f_1 = x²+1 over F_3, at x = 1: 1/2 = 2
        let curve = Curve::rational(3).unwrap();
        let field = curve.field();
        let f1 = Poly::from_residues(field, &[1, 0, 1]);
        let f = CurveFunction::ratio(&Poly::one(), 0, &f1, 0);
        let p = CurvePoint {
            x: field.one(),
            y: field.zero(),
        };
        assert_eq!(f.eval(p, field).unwrap(), field.embed(2));

        // f = x at any point is x(P)
        let x = CurveFunction::monomial(1, 0);
        for pt in curve.admissible_points() {
            assert_eq!(x.eval(pt, field).unwrap(), pt.x);
        }

        // a denominator of x at x = 0 is a pole
        let inv_x = CurveFunction::ratio(&Poly::one(), 0, &Poly::x(), 0);
        let origin = CurvePoint {
            x: field.zero(),
            y: field.zero(),
        };
        assert_eq!(
            inv_x.eval(origin, field).unwrap_err(),
            CurveError::PoleAtPoint
        );
    }

    #[test]
    fn one_point_basis_examples() {
        // Hermitian q=2 (g=1), max order 6: {1, x, y, x², xy, x³}
        let c2 = Curve::hermitian(2).unwrap();
        let basis = c2.one_point_basis(6);
        let keys: Vec<_> = basis
            .iter()
            .map(|f| *f.num_terms().keys().next().unwrap())
            .collect();
        assert_eq!(keys, vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (3, 0)]);
        assert_eq!(basis.len(), 6); // 6 + 1 - 1

        let c5 = Curve::hermitian(5).unwrap();
        assert_eq!(c5.one_point_basis(20).len(), 11); // 20 + 1 - 10

        let r = Curve::rational(7).unwrap();
        assert_eq!(r.one_point_basis(0).len(), 1);
    }

    #[test]
    fn rr_dimension_via_evaluation_rank() {
        // evaluation rank of the basis equals m + 1 - g once m > 2g - 2
        for q in [2u64, 3, 4, 5] {
            let curve = Curve::hermitian(q).unwrap();
            let g = curve.genus();
            let pts = curve.admissible_points();
            let field = curve.field().clone();
            let upper = (2 * q * q).min(pts.len() as u64 - 1);
            for m in (2 * g).saturating_sub(1)..=upper {
                if m <= 2 * g - 2 && g > 0 {
                    continue;
                }
                let basis = curve.one_point_basis(m);
                let mat = evaluate_matrix(&basis, &pts, &field).unwrap();
                assert_eq!(mat.rank(&field) as u64, m + 1 - g, "q={q} m={m}");
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn product_evaluation_property(
            num_a in proptest::collection::btree_map((0u32..5, 0u32..3), 1u64..9, 1..5),
            den_a in proptest::collection::btree_map((0u32..4, 0u32..2), 1u64..9, 1..3),
            num_b in proptest::collection::btree_map((0u32..5, 0u32..3), 1u64..9, 1..5),
            den_b in proptest::collection::btree_map((0u32..4, 0u32..2), 1u64..9, 1..3),
        ) {
            let curve = Curve::hermitian(3).unwrap();
            let field = curve.field().clone();
            // indices 1..9 are exactly the nonzero elements of F_9
            let to_terms = |m: &std::collections::BTreeMap<(u32, u32), u64>| -> TermMap {
                m.iter().map(|(&k, &v)| (k, field.element(v).unwrap())).collect()
            };
            let (na, da) = (to_terms(&num_a), to_terms(&den_a));
            let (nb, db) = (to_terms(&num_b), to_terms(&den_b));
            proptest::prop_assume!(!da.is_empty() && !db.is_empty());
            let f = CurveFunction::from_terms(na, da);
            let g = CurveFunction::from_terms(nb, db);
            let prod = f.mul(&g, &field);
            for pt in curve.admissible_points() {
                let (fa, ga) = (f.eval(pt, &field), g.eval(pt, &field));
                match (fa, ga) {
                    (Ok(a), Ok(b)) => {
                        proptest::prop_assert_eq!(prod.eval(pt, &field).unwrap(), field.mul(a, b));
                    }
                    // a pole in either factor is a pole of the product rep
                    _ => proptest::prop_assert!(prod.eval(pt, &field).is_err()),
                }
            }
        }
    }

    #[test]
    fn product_evaluation_is_pointwise_product() {
        let curve = Curve::hermitian(3).unwrap();
        let field = curve.field().clone();
        let pts = curve.admissible_points();
        let f = CurveFunction::ratio(
            &Poly::from_residues(&field, &[1, 2, 1]),
            1,
            &Poly::from_residues(&field, &[0, 2]),
            0,
        );
        let g = CurveFunction::ratio(&Poly::from_residues(&field, &[5, 1]), 0, &Poly::one(), 2);
        let prod = f.mul(&g, &field);
        for pt in pts.iter().filter(|p| !p.y.is_zero()) {
            let lhs = prod.eval(*pt, &field).unwrap();
            let rhs = field.mul(f.eval(*pt, &field).unwrap(), g.eval(*pt, &field).unwrap());
            assert_eq!(lhs, rhs);
        }
    }
}
