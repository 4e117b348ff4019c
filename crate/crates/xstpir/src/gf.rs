//! Exact arithmetic in prime fields `F_p` and extension fields `F_{p^m}`.
//!
//! An element is stored as its index `idx = Σ coeffs[i]·p^i` (coefficients in
//! the power basis of the field's modulus polynomial, constant term at `i = 0`).
//! The index doubles as the wire/file encoding: a single unsigned 64-bit
//! little-endian integer. Elements carry no back-reference to their field;
//! every operation takes the [`FieldParams`] as context and membership is
//! checked in debug builds only.
//!
//! Field construction is deterministic: the modulus is the lexicographically
//! smallest monic irreducible of the requested degree, comparing coefficient
//! lists constant-term first. Two runs (or two implementations following the
//! same rule) therefore agree on every element index.

use thiserror::Error;

/// Largest permitted cardinality. Keeps every element index in one machine
/// word on the wire; the schemes in this crate live far below it.
pub const MAX_CARDINALITY: u64 = 1 << 32;

/// Cardinality bound below which multiplication log tables are built.
const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("p^m = {p}^{m} exceeds the 2^32 cardinality cap")]
    TooLarge { p: u64, m: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("index {idx} is not an element of a field with {cardinality} elements")]
    NotAnElement { idx: u64, cardinality: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
}

/// An element of a finite field, stored as its index `Σ coeffs[i]·p^i`.
///
/// `ZERO` and `ONE` are the same index in every field, so they are provided
/// as constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// The wire encoding of the element.
    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Parameters of a finite field `F_{p^m}`: characteristic, extension degree,
/// and the monic modulus polynomial (coefficient list, constant term first).
#[derive(Debug, Clone)]
pub struct FieldParams {
    p: u64,
    m: u32,
    modulus: Vec<u64>,
    cardinality: u64,
    // discrete log / antilog tables for small fields; log[0] is unused
    log: Option<Vec<u32>>,
    exp: Option<Vec<u64>>,
}

impl PartialEq for FieldParams {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}
impl Eq for FieldParams {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Factors a prime power `s = p^e`; `None` if `s` is not one.
pub fn factor_prime_power(s: u64) -> Option<(u64, u32)> {
    if s < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= s {
        if s.is_multiple_of(p) {
            let mut rest = s;
            let mut e = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            return if rest == 1 { Some((p, e)) } else { None };
        }
        p += 1;
    }
    Some((s, 1))
}

impl FieldParams {
    /// Builds `F_{p^m}` with the lex-smallest monic irreducible modulus.
    pub fn new(p: u64, m: u32) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if m == 0 {
            return Err(GfError::DegreeZero);
        }
        let mut cardinality: u64 = 1;
        for _ in 0..m {
            cardinality = cardinality
                .checked_mul(p)
                .filter(|&c| c <= MAX_CARDINALITY)
                .ok_or(GfError::TooLarge { p, m })?;
        }

        let mut field = FieldParams {
            p,
            m,
            modulus: vec![0, 1], // x, correct for m = 1
            cardinality,
            log: None,
            exp: None,
        };
        if m > 1 {
            field.modulus = field.smallest_irreducible_modulus();
        }
        if cardinality <= TABLE_LIMIT {
            field.build_tables();
        }
        Ok(field)
    }

    /// Builds the field of a given prime-power cardinality.
    pub fn with_cardinality(s: u64) -> Result<Self, GfError> {
        let (p, e) = factor_prime_power(s).ok_or(GfError::NotPrimePower(s))?;
        FieldParams::new(p, e)
    }

    /// Scans monic degree-`m` polynomials in lex order (constant coefficient
    /// compared first) for the first irreducible one.
    fn smallest_irreducible_modulus(&self) -> Vec<u64> {
        let m = self.m as usize;
        let prime = FieldParams::new(self.p, 1).expect("p was checked prime");
        let mut non_leading = vec![0u64; m];
        loop {
            let mut coeffs = non_leading.clone();
            coeffs.push(1);
            let poly = crate::poly::Poly::from_residues(&prime, &coeffs);
            if poly
                .is_irreducible(&prime)
                .expect("candidate modulus is nonzero")
            {
                return coeffs;
            }
            // increment the coefficient list, least significant position last
            let mut k = m;
            loop {
                debug_assert!(k > 0, "an irreducible of every degree exists over F_p");
                k -= 1;
                non_leading[k] += 1;
                if non_leading[k] < self.p {
                    break;
                }
                non_leading[k] = 0;
            }
        }
    }

    fn build_tables(&mut self) {
        let card = self.cardinality;
        let mut log = vec![0u32; card as usize];
        let mut exp = Vec::with_capacity(card as usize - 1);
        'candidates: for g in 1..card {
            let gen = FieldElement(g);
            log.iter_mut().for_each(|v| *v = 0);
            exp.clear();
            let mut acc = FieldElement::ONE;
            for k in 0..card - 1 {
                if acc == FieldElement::ONE && k > 0 {
                    continue 'candidates; // order of g divides k < card-1
                }
                log[acc.0 as usize] = k as u32;
                exp.push(acc.0);
                acc = self.raw_mul(acc, gen);
            }
            debug_assert_eq!(acc, FieldElement::ONE);
            self.log = Some(log);
            self.exp = Some(exp);
            return;
        }
        unreachable!("the multiplicative group of a finite field is cyclic");
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn cardinality(&self) -> u64 {
        self.cardinality
    }

    /// Modulus coefficient list, constant term first, length `m + 1`.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Checked construction from a wire index.
    pub fn element(&self, idx: u64) -> Result<FieldElement, GfError> {
        if idx < self.cardinality {
            Ok(FieldElement(idx))
        } else {
            Err(GfError::NotAnElement {
                idx,
                cardinality: self.cardinality,
            })
        }
    }

    /// The residue `n mod p` as a constant field element.
    pub fn embed(&self, n: u64) -> FieldElement {
        FieldElement(n % self.p)
    }

    /// Builds an element from power-basis coefficients (length at most `m`,
    /// residues reduced mod `p`).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        assert!(coeffs.len() <= self.m as usize, "too many coefficients");
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * self.p + (c % self.p);
        }
        FieldElement(idx)
    }

    /// Power-basis coefficients of `a`, length `m`, constant term first.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u64> {
        self.check(a);
        let mut idx = a.0;
        let mut out = Vec::with_capacity(self.m as usize);
        for _ in 0..self.m {
            out.push(idx % self.p);
            idx /= self.p;
        }
        out
    }

    #[inline]
    fn check(&self, a: FieldElement) {
        debug_assert!(
            a.0 < self.cardinality,
            "index {} outside field of {} elements",
            a.0,
            self.cardinality
        );
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        if self.m == 1 {
            return FieldElement((a.0 + b.0) % self.p);
        }
        let (mut ai, mut bi, mut idx, mut scale) = (a.0, b.0, 0u64, 1u64);
        for _ in 0..self.m {
            idx += ((ai % self.p + bi % self.p) % self.p) * scale;
            ai /= self.p;
            bi /= self.p;
            scale *= self.p;
        }
        FieldElement(idx)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.check(a);
        if self.m == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let (mut ai, mut idx, mut scale) = (a.0, 0u64, 1u64);
        for _ in 0..self.m {
            let c = ai % self.p;
            idx += (if c == 0 { 0 } else { self.p - c }) * scale;
            ai /= self.p;
            scale *= self.p;
        }
        FieldElement(idx)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        if let (Some(log), Some(exp)) = (&self.log, &self.exp) {
            if a.is_zero() || b.is_zero() {
                return FieldElement::ZERO;
            }
            let order = self.cardinality - 1;
            let k = (log[a.0 as usize] as u64 + log[b.0 as usize] as u64) % order;
            return FieldElement(exp[k as usize]);
        }
        self.raw_mul(a, b)
    }

    /// Table-free multiplication: coefficient convolution reduced modulo the
    /// modulus polynomial.
    fn raw_mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.m == 1 {
            // p ≤ 2^32, so the product fits in u64
            return FieldElement(a.0 * b.0 % self.p);
        }
        let m = self.m as usize;
        let ac = self.coeffs(a);
        let bc = self.coeffs(b);
        // convolution; sums stay below 2^37 because p ≤ 2^16 when m ≥ 2
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &ai) in ac.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in bc.iter().enumerate() {
                prod[i + j] += ai * bj % self.p;
            }
        }
        // reduce degree k ≥ m via x^m = -(modulus minus leading term)
        for k in (m..prod.len()).rev() {
            let c = prod[k] % self.p;
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for t in 0..m {
                let sub = c * (self.modulus[t] % self.p) % self.p;
                prod[k - m + t] = (prod[k - m + t] + self.p * self.p - sub) % self.p;
            }
        }
        prod.truncate(m);
        prod.iter_mut().for_each(|c| *c %= self.p);
        self.from_coeffs(&prod)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        self.check(a);
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        if let (Some(log), Some(exp)) = (&self.log, &self.exp) {
            let order = self.cardinality - 1;
            let k = (order - log[a.0 as usize] as u64) % order;
            return Ok(FieldElement(exp[k as usize]));
        }
        // a^(card-2) by square-and-multiply
        Ok(self.pow(a, self.cardinality - 2))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        self.check(a);
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        if let (Some(log), Some(exp)) = (&self.log, &self.exp) {
            let order = self.cardinality - 1;
            let k =
                (log[a.0 as usize] as u64 % order) as u128 * (e % order) as u128 % order as u128;
            return FieldElement(exp[k as usize]);
        }
        let mut base = a;
        let mut acc = FieldElement::ONE;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// All `p^m` elements in index order (0, 1, 2, …); stable across runs.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.cardinality).map(FieldElement)
    }
}
