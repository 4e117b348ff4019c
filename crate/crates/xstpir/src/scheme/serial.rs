//! Canonical binary serialization of a built scheme. Little-endian
//! throughout; field elements travel as their u64 indices. The format is
//! self-describing (field description, every function, point and matrix) and
//! round-trips bit-exactly, so content digests can be taken over the bytes.
//! The header names the digest algorithm used by the simulator.

use super::{SchemeKind, SchemeParams, SchemeSpec};
use crate::curve::{Curve, CurveFunction, CurvePoint, TermMap};
use crate::gf::{FieldElement, FieldParams};
use crate::linalg::Matrix;
use crate::poly::Poly;
use thiserror::Error;

const MAGIC: &[u8; 8] = b"XSTPIRS1";

/// Digest algorithm name recorded in every scheme file.
pub const DIGEST_ALGORITHM: &str = "sha-256";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SerialError {
    #[error("bad magic: not a scheme file")]
    BadMagic,
    #[error("truncated scheme file")]
    Truncated,
    #[error("inconsistent scheme file: {0}")]
    Inconsistent(String),
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new() -> Self {
        Writer { buf: Vec::new() }
    }

    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn elem(&mut self, e: FieldElement) {
        self.u64(e.index());
    }

    fn bytes(&mut self, b: &[u8]) {
        self.u32(b.len() as u32);
        self.buf.extend_from_slice(b);
    }

    fn poly(&mut self, p: &Poly) {
        self.u32(p.coeffs().len() as u32);
        for &c in p.coeffs() {
            self.elem(c);
        }
    }

    fn terms(&mut self, t: &TermMap) {
        self.u32(t.len() as u32);
        for (&(i, j), &c) in t {
            self.u32(i);
            self.u32(j);
            self.elem(c);
        }
    }

    fn func(&mut self, f: &CurveFunction) {
        self.terms(f.num_terms());
        self.terms(f.den_terms());
    }

    fn matrix(&mut self, m: &Matrix) {
        self.u32(m.rows() as u32);
        self.u32(m.cols() as u32);
        for &e in m.data() {
            self.elem(e);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], SerialError> {
        let end = self.pos.checked_add(n).ok_or(SerialError::Truncated)?;
        if end > self.buf.len() {
            return Err(SerialError::Truncated);
        }
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, SerialError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, SerialError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, SerialError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn elem(&mut self, field: &FieldParams) -> Result<FieldElement, SerialError> {
        let idx = self.u64()?;
        field
            .element(idx)
            .map_err(|e| SerialError::Inconsistent(e.to_string()))
    }

    fn bytes(&mut self) -> Result<&'a [u8], SerialError> {
        let n = self.u32()? as usize;
        self.take(n)
    }

    fn poly(&mut self, field: &FieldParams) -> Result<Poly, SerialError> {
        let n = self.u32()? as usize;
        let mut coeffs = Vec::with_capacity(n);
        for _ in 0..n {
            coeffs.push(self.elem(field)?);
        }
        let p = Poly::from_coeffs(coeffs);
        if p.coeffs().len() != n {
            return Err(SerialError::Inconsistent(
                "polynomial with trailing zero coefficients".to_string(),
            ));
        }
        Ok(p)
    }

    fn terms(&mut self, field: &FieldParams) -> Result<TermMap, SerialError> {
        let n = self.u32()? as usize;
        let mut map = TermMap::new();
        for _ in 0..n {
            let i = self.u32()?;
            let j = self.u32()?;
            let c = self.elem(field)?;
            if c.is_zero() || map.insert((i, j), c).is_some() {
                return Err(SerialError::Inconsistent(
                    "zero or duplicate term in function".to_string(),
                ));
            }
        }
        Ok(map)
    }

    fn func(&mut self, field: &FieldParams) -> Result<CurveFunction, SerialError> {
        let num = self.terms(field)?;
        let den = self.terms(field)?;
        if den.is_empty() {
            return Err(SerialError::Inconsistent("zero denominator".to_string()));
        }
        Ok(CurveFunction::from_terms(num, den))
    }

    fn matrix(&mut self, field: &FieldParams) -> Result<Matrix, SerialError> {
        let rows = self.u32()? as usize;
        let cols = self.u32()? as usize;
        let mut m = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, self.elem(field)?);
            }
        }
        Ok(m)
    }
}

pub fn to_bytes(spec: &SchemeSpec) -> Vec<u8> {
    let mut w = Writer::new();
    w.buf.extend_from_slice(MAGIC);
    w.bytes(DIGEST_ALGORITHM.as_bytes());
    let p = spec.params();
    w.u8(match p.kind {
        SchemeKind::Rational => 0,
        SchemeKind::Hermitian => 1,
    });
    w.u64(p.q);
    w.u64(p.x_security as u64);
    w.u64(p.t_privacy as u64);
    w.u64(p.file_len as u64);
    match p.herm_m {
        None => w.u8(0),
        Some(m) => {
            w.u8(1);
            w.u64(m as u64);
        }
    }
    let field = spec.field();
    w.u64(field.p());
    w.u32(field.m());
    w.u32(field.modulus().len() as u32);
    for &c in field.modulus() {
        w.u64(c);
    }
    w.u32(spec.f_list().len() as u32);
    for f in spec.f_list() {
        w.poly(f);
    }
    w.u32(spec.h_fns().len() as u32);
    for f in spec.h_fns() {
        w.func(f);
    }
    w.u32(spec.sec_basis().len() as u32);
    for fns in spec.sec_basis() {
        w.u32(fns.len() as u32);
        for f in fns {
            w.func(f);
        }
    }
    w.u32(spec.priv_basis().len() as u32);
    for f in spec.priv_basis() {
        w.func(f);
    }
    w.u32(spec.points().len() as u32);
    for pt in spec.points() {
        w.u64(pt.x.index());
        w.u64(pt.y.index());
    }
    w.matrix(spec.h());
    w.u32(spec.g_sec().len() as u32);
    for m in spec.g_sec() {
        w.matrix(m);
    }
    w.matrix(spec.g_priv());
    w.matrix(spec.w());
    w.u64(spec.deg_dfull());
    w.u64(spec.n_servers() as u64);
    w.buf
}

pub fn from_bytes(bytes: &[u8]) -> Result<SchemeSpec, SerialError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(SerialError::BadMagic);
    }
    let algo = r.bytes()?;
    if algo != DIGEST_ALGORITHM.as_bytes() {
        return Err(SerialError::Inconsistent(format!(
            "unknown digest algorithm {}",
            String::from_utf8_lossy(algo)
        )));
    }
    let kind = match r.u8()? {
        0 => SchemeKind::Rational,
        1 => SchemeKind::Hermitian,
        k => return Err(SerialError::Inconsistent(format!("unknown kind {k}"))),
    };
    let q = r.u64()?;
    let x_security = r.u64()? as usize;
    let t_privacy = r.u64()? as usize;
    let file_len = r.u64()? as usize;
    let herm_m = match r.u8()? {
        0 => None,
        1 => Some(r.u64()? as usize),
        k => return Err(SerialError::Inconsistent(format!("bad m flag {k}"))),
    };
    let params = SchemeParams {
        kind,
        q,
        x_security,
        t_privacy,
        file_len,
        herm_m,
    };

    let p = r.u64()?;
    let m = r.u32()?;
    let curve = match kind {
        SchemeKind::Rational => Curve::rational(q),
        SchemeKind::Hermitian => Curve::hermitian(q),
    }
    .map_err(|e| SerialError::Inconsistent(e.to_string()))?;
    let field = curve.field().clone();
    if field.p() != p || field.m() != m {
        return Err(SerialError::Inconsistent(format!(
            "field description F_{p}^{m} does not match the curve's constant field"
        )));
    }
    let mod_len = r.u32()? as usize;
    let mut modulus = Vec::with_capacity(mod_len);
    for _ in 0..mod_len {
        modulus.push(r.u64()?);
    }
    if modulus != field.modulus() {
        return Err(SerialError::Inconsistent(
            "modulus differs from the deterministic construction".to_string(),
        ));
    }

    let n_f = r.u32()? as usize;
    let f_list = (0..n_f)
        .map(|_| r.poly(&field))
        .collect::<Result<Vec<_>, _>>()?;
    let n_h = r.u32()? as usize;
    let h_fns = (0..n_h)
        .map(|_| r.func(&field))
        .collect::<Result<Vec<_>, _>>()?;
    let n_sec = r.u32()? as usize;
    let mut sec_basis = Vec::with_capacity(n_sec);
    for _ in 0..n_sec {
        let k = r.u32()? as usize;
        let fns = (0..k)
            .map(|_| r.func(&field))
            .collect::<Result<Vec<_>, _>>()?;
        sec_basis.push(fns);
    }
    let n_priv = r.u32()? as usize;
    let priv_basis = (0..n_priv)
        .map(|_| r.func(&field))
        .collect::<Result<Vec<_>, _>>()?;
    let n_pts = r.u32()? as usize;
    let mut points = Vec::with_capacity(n_pts);
    for _ in 0..n_pts {
        let x = r.elem(&field)?;
        let y = r.elem(&field)?;
        let pt = CurvePoint { x, y };
        if !curve.contains(pt) {
            return Err(SerialError::Inconsistent(
                "point does not satisfy the curve equation".to_string(),
            ));
        }
        points.push(pt);
    }
    let h = r.matrix(&field)?;
    let n_gsec = r.u32()? as usize;
    let g_sec = (0..n_gsec)
        .map(|_| r.matrix(&field))
        .collect::<Result<Vec<_>, _>>()?;
    let g_priv = r.matrix(&field)?;
    let w = r.matrix(&field)?;
    let deg_dfull = r.u64()?;
    let n_recorded = r.u64()? as usize;
    if r.pos != bytes.len() {
        return Err(SerialError::Inconsistent("trailing bytes".to_string()));
    }

    if n_recorded != points.len()
        || h.rows() != file_len
        || h.cols() != points.len()
        || h_fns.len() != file_len
        || g_sec.len() != file_len
        || sec_basis.len() != file_len
        || g_priv.cols() != points.len()
        || w.cols() != points.len()
    {
        return Err(SerialError::Inconsistent(
            "recorded dimensions disagree".to_string(),
        ));
    }

    Ok(SchemeSpec::from_parts(
        params, field, curve, f_list, h_fns, sec_basis, priv_basis, points, h, g_sec, g_priv, w,
        deg_dfull,
    ))
}
