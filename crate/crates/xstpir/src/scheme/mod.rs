//! Construction of complete XSTPIR scheme instances on rational and Hermitian
//! curves, together with the closed-form maximum-rate calculators used for
//! parameter comparisons.
//!
//! A built [`SchemeSpec`] carries everything the runtime protocol needs:
//! the carrier functions `h_1..h_L` (one per file symbol), the per-symbol
//! secrecy-noise bases and the shared privacy-noise basis, the `N` selected
//! evaluation points, and the precomputed evaluation matrices `H`, `Gsec[ℓ]`,
//! `Gpriv`, and the noise row basis `W`.

mod basis;
mod hermitian;
mod rates;
mod rational;
mod serial;

pub use basis::basis_b;
pub use hermitian::{build_hermitian, h_function_counts};
pub use rates::{compare_sweep, max_rate, Rate, RateFormula, SweepRow};
pub use rational::build_rational;
pub use serial::SerialError;

use crate::curve::{Curve, CurveFunction, CurvePoint};
use crate::gf::FieldParams;
use crate::linalg::Matrix;
use crate::poly::Poly;
use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    /// A precondition failed; `condition` names the violated inequality.
    #[error("parameter violation: {condition} (got {detail})")]
    ParamViolation { condition: String, detail: String },
    #[error("duplicate factor {0} in basis construction")]
    DuplicateFactor(String),
    #[error("reducible factor {0} in basis construction")]
    ReducibleFactor(String),
    /// Cannot occur when the preconditions hold; kept as a guard against
    /// internal inconsistencies.
    #[error("information set not found: stacked rank {found}, expected {expected}")]
    InformationSetNotFound { found: usize, expected: usize },
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
    #[error(transparent)]
    Curve(#[from] crate::curve::CurveError),
    #[error(transparent)]
    Field(#[from] crate::gf::GfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Rational,
    Hermitian,
}

/// Parameters of a scheme instance. For the rational scheme `q` is the field
/// size; for the Hermitian scheme the constant field is `F_{q²}` and `m` is
/// the (even) basis parameter that determines the file length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeParams {
    pub kind: SchemeKind,
    pub q: u64,
    pub x_security: usize,
    pub t_privacy: usize,
    pub file_len: usize,
    pub herm_m: Option<usize>,
}

impl SchemeParams {
    pub fn rational(q: u64, file_len: usize, x_security: usize, t_privacy: usize) -> Self {
        SchemeParams {
            kind: SchemeKind::Rational,
            q,
            x_security,
            t_privacy,
            file_len,
            herm_m: None,
        }
    }

    pub fn hermitian(q: u64, m: usize, x_security: usize, t_privacy: usize) -> Self {
        let l = (m as i128 * q as i128 - (q as i128 * (q as i128 - 1)) / 2).max(0);
        SchemeParams {
            kind: SchemeKind::Hermitian,
            q,
            x_security,
            t_privacy,
            file_len: l as usize,
            herm_m: Some(m),
        }
    }

    /// Every precondition as (condition text, holds, detail); the condition
    /// strings quote the defining inequalities so failures are
    /// self-documenting.
    pub fn conditions(&self) -> Vec<(String, bool, String)> {
        let q = self.q as i128;
        let x = self.x_security as i128;
        let t = self.t_privacy as i128;
        let l = self.file_len as i128;
        let mut out = vec![
            (
                "q is a prime power".to_string(),
                crate::gf::factor_prime_power(self.q).is_some(),
                format!("q={}", self.q),
            ),
            ("X >= 1".to_string(), x >= 1, format!("X={x}")),
            ("T >= 1".to_string(), t >= 1, format!("T={t}")),
        ];
        match self.kind {
            SchemeKind::Rational => {
                out.push(("L >= 1".to_string(), l >= 1, format!("L={l}")));
                out.push(("2 | L".to_string(), l % 2 == 0, format!("L={l}")));
                out.push((
                    "q >= L+X+T+3".to_string(),
                    q >= l + x + t + 3,
                    format!("q={q}, L+X+T+3={}", l + x + t + 3),
                ));
            }
            SchemeKind::Hermitian => {
                let m = self.herm_m.unwrap_or(0) as i128;
                out.push(("2 | m".to_string(), m % 2 == 0, format!("m={m}")));
                out.push((
                    "m in [q-1, q^2-1]".to_string(),
                    m >= q - 1 && m < q * q,
                    format!("m={m}, range [{}, {}]", q - 1, q * q - 1),
                ));
                let need = l + x + t + (7 * q * q + 3 * q - 6) / 2 + 1;
                out.push((
                    "q^3+1-(q+1) >= L+X+T+(7q^2+3q-6)/2+1".to_string(),
                    q * q * q - q >= need,
                    format!("q^3-q={}, required {}", q * q * q - q, need),
                ));
            }
        }
        out
    }

    /// First failing condition as a `ParamViolation`.
    pub fn validate(&self) -> Result<(), SchemeError> {
        for (condition, ok, detail) in self.conditions() {
            if !ok {
                return Err(SchemeError::ParamViolation { condition, detail });
            }
        }
        Ok(())
    }

    /// The server count `N` the construction yields.
    pub fn expected_servers(&self) -> usize {
        let q = self.q as usize;
        match self.kind {
            SchemeKind::Rational => self.file_len + self.x_security + self.t_privacy + 2,
            SchemeKind::Hermitian => {
                self.file_len + self.x_security + self.t_privacy + 3 * q * q + 2 * q - 2
            }
        }
    }

    /// Degree of the divisor bounding all answer functions.
    pub fn expected_deg_dfull(&self) -> u64 {
        let q = self.q;
        let lxt = (self.file_len + self.x_security + self.t_privacy) as u64;
        match self.kind {
            SchemeKind::Rational => lxt + 1,
            SchemeKind::Hermitian => lxt + (7 * q * q + 3 * q - 6) / 2,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            SchemeKind::Rational => format!(
                "rational(q={}, l={}, x={}, t={})",
                self.q, self.file_len, self.x_security, self.t_privacy
            ),
            SchemeKind::Hermitian => format!(
                "hermitian(q={}, m={}, x={}, t={})",
                self.q,
                self.herm_m.unwrap_or(0),
                self.x_security,
                self.t_privacy
            ),
        }
    }
}

/// A fully built scheme instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    params: SchemeParams,
    field: FieldParams,
    curve: Curve,
    f_list: Vec<Poly>,
    h_fns: Vec<CurveFunction>,
    sec_basis: Vec<Vec<CurveFunction>>,
    priv_basis: Vec<CurveFunction>,
    points: Vec<CurvePoint>,
    h: Matrix,
    g_sec: Vec<Matrix>,
    g_priv: Matrix,
    w: Matrix,
    deg_dfull: u64,
}

impl SchemeSpec {
    pub fn build(params: &SchemeParams) -> Result<SchemeSpec, SchemeError> {
        match params.kind {
            SchemeKind::Rational => build_rational(
                params.q,
                params.file_len,
                params.x_security,
                params.t_privacy,
            ),
            SchemeKind::Hermitian => build_hermitian(
                params.q,
                params.herm_m.unwrap_or(0),
                params.x_security,
                params.t_privacy,
            ),
        }
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn field(&self) -> &FieldParams {
        &self.field
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn f_list(&self) -> &[Poly] {
        &self.f_list
    }

    /// The carrier functions `h_1..h_L`, one per file symbol.
    pub fn h_fns(&self) -> &[CurveFunction] {
        &self.h_fns
    }

    pub fn sec_basis(&self) -> &[Vec<CurveFunction>] {
        &self.sec_basis
    }

    pub fn priv_basis(&self) -> &[CurveFunction] {
        &self.priv_basis
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    /// `L × N` carrier evaluation matrix.
    pub fn h(&self) -> &Matrix {
        &self.h
    }

    /// Per-symbol secrecy-noise generator matrices, `dim_sec × N` each.
    pub fn g_sec(&self) -> &[Matrix] {
        &self.g_sec
    }

    /// Privacy-noise generator matrix, `dim_priv × N`, shared across symbols.
    pub fn g_priv(&self) -> &Matrix {
        &self.g_priv
    }

    /// Row basis of the evaluated noise span.
    pub fn w(&self) -> &Matrix {
        &self.w
    }

    pub fn deg_dfull(&self) -> u64 {
        self.deg_dfull
    }

    pub fn n_servers(&self) -> usize {
        self.points.len()
    }

    pub fn file_len(&self) -> usize {
        self.params.file_len
    }

    pub fn dim_sec(&self) -> usize {
        self.g_sec.first().map_or(0, |m| m.rows())
    }

    pub fn dim_priv(&self) -> usize {
        self.g_priv.rows()
    }

    /// The retrieval rate `L / N`.
    pub fn rate(&self) -> Ratio<i128> {
        Ratio::new(self.file_len() as i128, self.n_servers() as i128)
    }

    /// Canonical byte serialization; self-describing and bit-exact on
    /// round-trip. Digests of a scheme are taken over these bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        serial::to_bytes(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<SchemeSpec, SerialError> {
        serial::from_bytes(bytes)
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        params: SchemeParams,
        field: FieldParams,
        curve: Curve,
        f_list: Vec<Poly>,
        h_fns: Vec<CurveFunction>,
        sec_basis: Vec<Vec<CurveFunction>>,
        priv_basis: Vec<CurveFunction>,
        points: Vec<CurvePoint>,
        h: Matrix,
        g_sec: Vec<Matrix>,
        g_priv: Matrix,
        w: Matrix,
        deg_dfull: u64,
    ) -> SchemeSpec {
        SchemeSpec {
            params,
            field,
            curve,
            f_list,
            h_fns,
            sec_basis,
            priv_basis,
            points,
            h,
            g_sec,
            g_priv,
            w,
            deg_dfull,
        }
    }
}
