//! The rational-curve scheme: two carrier functions per quadratic irreducible
//! (`1/f_a` and `x/f_a`), secrecy noise `(1/h_ℓ)·span{1,…,x^(X-1)}`, privacy
//! noise `span{1,…,x^(T-1)}`, evaluated at the first `N = L+X+T+2` points
//! with nonzero `x`-coordinate.

use super::{SchemeError, SchemeParams, SchemeSpec};
use crate::curve::{Curve, CurveFunction};
use crate::linalg::{Matrix, RowReducer};
use crate::poly::{quadratic_irreducibles, Poly};

pub fn build_rational(
    q: u64,
    file_len: usize,
    x_security: usize,
    t_privacy: usize,
) -> Result<SchemeSpec, SchemeError> {
    let params = SchemeParams::rational(q, file_len, x_security, t_privacy);
    params.validate()?;
    let curve = Curve::rational(q)?;
    let field = curve.field().clone();

    let f_list = quadratic_irreducibles(&field, file_len / 2)?;

    // carriers (1/f_1, x/f_1, …) and their reciprocals (f_1, f_1/x, …)
    let mut h_fns = Vec::with_capacity(file_len);
    let mut inv_h = Vec::with_capacity(file_len);
    for f in &f_list {
        h_fns.push(CurveFunction::ratio(&Poly::one(), 0, f, 0));
        inv_h.push(CurveFunction::ratio(f, 0, &Poly::one(), 0));
        h_fns.push(CurveFunction::ratio(&Poly::x(), 0, f, 0));
        inv_h.push(CurveFunction::ratio(f, 0, &Poly::x(), 0));
    }

    let x_monomials: Vec<CurveFunction> = (0..x_security as u32)
        .map(|a| CurveFunction::monomial(a, 0))
        .collect();
    let sec_basis: Vec<Vec<CurveFunction>> = inv_h
        .iter()
        .map(|inv| x_monomials.iter().map(|m| inv.mul(m, &field)).collect())
        .collect();
    let priv_basis: Vec<CurveFunction> = (0..t_privacy as u32)
        .map(|b| CurveFunction::monomial(b, 0))
        .collect();

    // Noise span basis, reduced over every admissible point so the rank is
    // the true function-space dimension: the privacy span, the secrecy·query
    // span, and the per-carrier secrecy·privacy products.
    let admissible = curve.admissible_points();
    let mut ev = crate::curve::BatchEvaluator::new(&admissible, &field);
    let mut reducer = RowReducer::new(admissible.len());
    for f in priv_basis.iter().chain(x_monomials.iter()) {
        reducer.absorb(ev.eval_row(f)?, &field);
    }
    for inv in &inv_h {
        for c in 0..=(x_security + t_privacy).saturating_sub(2) as u32 {
            let f = inv.mul(&CurveFunction::monomial(c, 0), &field);
            reducer.absorb(ev.eval_row(&f)?, &field);
        }
    }
    let w_full = reducer.into_matrix();

    // any N admissible points suffice: a nonzero answer function has at most
    // deg(D^full) = N-1 zeros
    let n = params.expected_servers();
    let points = admissible[..n].to_vec();
    let selected: Vec<usize> = (0..n).collect();

    let h = crate::curve::evaluate_matrix(&h_fns, &points, &field)?;
    let g_sec = sec_basis
        .iter()
        .map(|fns| crate::curve::evaluate_matrix(fns, &points, &field))
        .collect::<Result<Vec<Matrix>, _>>()?;
    let g_priv = crate::curve::evaluate_matrix(&priv_basis, &points, &field)?;
    let w = w_full.select_columns(&selected);

    debug_assert_eq!(
        h.vstack(&w).rank(&field),
        file_len + w.rows(),
        "info and noise spans must evaluate to independent rows"
    );

    let deg_dfull = params.expected_deg_dfull();
    Ok(SchemeSpec::from_parts(
        params, field, curve, f_list, h_fns, sec_basis, priv_basis, points, h, g_sec, g_priv, w,
        deg_dfull,
    ))
}
