//! Univariate polynomial algebra over a finite field, irreducibility testing,
//! and the deterministic enumeration of monic quadratic irreducibles that both
//! scheme builders consume.
//!
//! Coefficients are stored constant term first with no trailing zeros; the
//! zero polynomial has an empty coefficient vector. Operations take the field
//! as context, mirroring `gf`.

use crate::gf::{FieldElement, FieldParams};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("the zero polynomial has no irreducibility status")]
    ZeroPolynomial,
    #[error("requested {requested} quadratic irreducibles but only {available} exist")]
    NotEnoughIrreducibles { requested: usize, available: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly {
            coeffs: vec![FieldElement::ONE],
        }
    }

    /// The polynomial `x`.
    pub fn x() -> Poly {
        Poly {
            coeffs: vec![FieldElement::ZERO, FieldElement::ONE],
        }
    }

    pub fn constant(c: FieldElement) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// Builds from a coefficient vector (constant first), trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<FieldElement>) -> Poly {
        while coeffs.last() == Some(&FieldElement::ZERO) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Convenience: coefficients given as integer residues.
    pub fn from_residues(field: &FieldParams, residues: &[u64]) -> Poly {
        Poly::from_coeffs(residues.iter().map(|&r| field.embed(r)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(FieldElement::ONE)
    }

    pub fn add(&self, rhs: &Poly, field: &FieldParams) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| field.add(self.coeff(i), rhs.coeff(i)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn sub(&self, rhs: &Poly, field: &FieldParams) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| field.sub(self.coeff(i), rhs.coeff(i)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: FieldElement, field: &FieldParams) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, rhs: &Poly, field: &FieldParams) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElement::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = field.add(coeffs[i + j], field.mul(a, b));
            }
        }
        Poly::from_coeffs(coeffs)
    }

    /// Quotient and remainder of `self / divisor`.
    pub fn divrem(&self, divisor: &Poly, field: &FieldParams) -> Result<(Poly, Poly), PolyError> {
        let d = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let lead_inv = field
            .inv(divisor.leading().expect("nonzero divisor"))
            .expect("leading coefficient is nonzero");
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![FieldElement::ZERO; rem.len() - d];
        for k in (d..rem.len()).rev() {
            let q = field.mul(rem[k], lead_inv);
            quot[k - d] = q;
            if q.is_zero() {
                continue;
            }
            for (t, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k - d + t] = field.sub(rem[k - d + t], field.mul(q, dc));
            }
        }
        rem.truncate(d);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, divisor: &Poly, field: &FieldParams) -> Result<Poly, PolyError> {
        Ok(self.divrem(divisor, field)?.1)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, rhs: &Poly, field: &FieldParams) -> Result<Poly, PolyError> {
        if self.is_zero() && rhs.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let (mut a, mut b) = (self.clone(), rhs.clone());
        while !b.is_zero() {
            let r = a.rem(&b, field)?;
            a = b;
            b = r;
        }
        let lead_inv = field.inv(a.leading().expect("a is nonzero")).unwrap();
        Ok(a.scale(lead_inv, field))
    }

    /// Evaluation by Horner's rule.
    pub fn eval(&self, at: FieldElement, field: &FieldParams) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = field.add(field.mul(acc, at), c);
        }
        acc
    }

    /// `self^e mod m` by square-and-multiply.
    fn pow_mod(&self, e: u64, m: &Poly, field: &FieldParams) -> Result<Poly, PolyError> {
        let mut base = self.rem(m, field)?;
        let mut acc = Poly::one().rem(m, field)?;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, field).rem(m, field)?;
            }
            base = base.mul(&base, field).rem(m, field)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// `x^(q^k) mod self`, computed as a k-fold Frobenius power so the
    /// exponent never leaves `u64`.
    fn frobenius_power(&self, k: u32, field: &FieldParams) -> Result<Poly, PolyError> {
        let mut u = Poly::x().rem(self, field)?;
        for _ in 0..k {
            u = u.pow_mod(field.cardinality(), self, field)?;
        }
        Ok(u)
    }

    /// Rabin's irreducibility test: `f` of degree `n` is irreducible over
    /// `F_q` iff `x^(q^n) ≡ x (mod f)` and `gcd(x^(q^(n/r)) - x, f) = 1` for
    /// every prime `r | n`. For degrees 2 and 3 this reduces to root absence.
    pub fn is_irreducible(&self, field: &FieldParams) -> Result<bool, PolyError> {
        let n = self.degree().ok_or(PolyError::ZeroPolynomial)?;
        if n == 0 {
            return Ok(false); // units are not irreducible
        }
        if n == 1 {
            return Ok(true);
        }
        let x = Poly::x();
        for r in prime_divisors(n as u64) {
            let u = self.frobenius_power((n as u64 / r) as u32, field)?;
            let g = u.sub(&x, field).gcd(self, field)?;
            if g.degree() != Some(0) {
                return Ok(false);
            }
        }
        let full = self.frobenius_power(n as u32, field)?;
        Ok(full == x.rem(self, field)?)
    }
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Number of monic quadratic irreducibles over a field of size `s`:
/// `(s^2 - s) / 2`.
pub fn quadratic_irreducible_count(field: &FieldParams) -> u64 {
    let s = field.cardinality();
    (s * s - s) / 2
}

/// The `n` lexicographically smallest monic quadratic irreducibles over the
/// field, comparing (constant, linear) coefficient indices. Deterministic.
pub fn quadratic_irreducibles(field: &FieldParams, n: usize) -> Result<Vec<Poly>, PolyError> {
    let available = quadratic_irreducible_count(field);
    if n as u64 > available {
        return Err(PolyError::NotEnoughIrreducibles {
            requested: n,
            available,
        });
    }
    let mut out = Vec::with_capacity(n);
    for c0 in field.elements() {
        for c1 in field.elements() {
            if out.len() == n {
                return Ok(out);
            }
            let f = Poly::from_coeffs(vec![c0, c1, FieldElement::ONE]);
            if f.is_irreducible(field).expect("degree 2, nonzero") {
                out.push(f);
            }
        }
    }
    Ok(out)
}

/// Renders a polynomial for error messages and reports (`x^2+2x+1` style).
pub fn format_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let c = c.index();
        let part = match i {
            0 => format!("{c}"),
            1 if c == 1 => "x".to_string(),
            1 => format!("{c}x"),
            _ if c == 1 => format!("x^{i}"),
            _ => format!("{c}x^{i}"),
        };
        parts.push(part);
    }
    parts.join("+")
}
