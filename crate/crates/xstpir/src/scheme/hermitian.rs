//! The Hermitian-curve scheme over `F_{q²}`. Carriers come in `q` families
//! indexed by the power of `y`: family `z` holds `m-z+1` functions obtained
//! from the alternative polynomial basis (with `f_0 = x` joining the factor
//! list when `m-z+1` is odd), all divided by the product `f_1⋯f_{m/2}`.
//! Point selection runs leftmost-pivot Gaussian elimination over every
//! admissible point so the stacked info/noise matrix keeps full row rank on
//! the chosen columns (the information-set step), then pads to `N` in
//! canonical order.

use super::{basis_b, SchemeError, SchemeParams, SchemeSpec};
use crate::curve::{BatchEvaluator, Curve, CurveFunction};
use crate::linalg::{pivot_columns, Matrix, RowReducer};
use crate::poly::{quadratic_irreducibles, Poly};

/// Per-family carrier counts `(m, m-1, …, m-q+1)` and their sum
/// `mq - q(q-1)/2`, the file length.
pub fn h_function_counts(q: u64, m: u64) -> Result<(Vec<u64>, u64), SchemeError> {
    if m + 1 < q {
        return Err(SchemeError::ParamViolation {
            condition: "m >= q-1".to_string(),
            detail: format!("m={m}, q-1={}", q - 1),
        });
    }
    let counts: Vec<u64> = (1..=q).map(|z| m + 1 - z).collect();
    let sum = counts.iter().sum();
    debug_assert_eq!(sum, m * q - q * (q - 1) / 2);
    Ok((counts, sum))
}

pub fn build_hermitian(
    q: u64,
    m: usize,
    x_security: usize,
    t_privacy: usize,
) -> Result<SchemeSpec, SchemeError> {
    let params = SchemeParams::hermitian(q, m, x_security, t_privacy);
    params.validate()?;
    let file_len = params.file_len;
    let curve = Curve::hermitian(q)?;
    let field = curve.field().clone();
    let genus = curve.genus();

    let f_list = quadratic_irreducibles(&field, m / 2)?;
    let mut den_poly = Poly::one();
    for f in &f_list {
        den_poly = den_poly.mul(f, &field);
    }

    // carrier families, `z` ascending, basis order within each family
    let mut h_fns = Vec::with_capacity(file_len);
    let mut inv_h = Vec::with_capacity(file_len);
    for z in 1..=q as usize {
        let count = m + 1 - z;
        if count == 0 {
            continue;
        }
        let family = if count.is_multiple_of(2) {
            basis_b(&field, &f_list[..count / 2])?
        } else {
            let mut with_x = vec![Poly::x()];
            with_x.extend_from_slice(&f_list[..(count - 1) / 2]);
            basis_b(&field, &with_x)?
        };
        debug_assert_eq!(family.len(), count);
        let y_power = (z - 1) as u32;
        for b in family {
            h_fns.push(CurveFunction::ratio(&b, y_power, &den_poly, 0));
            inv_h.push(CurveFunction::ratio(&den_poly, 0, &b, y_power));
        }
    }
    debug_assert_eq!(h_fns.len(), file_len);

    let sec_monomials = curve.one_point_basis(x_security as u64 + 2 * genus - 1);
    let sec_basis: Vec<Vec<CurveFunction>> = inv_h
        .iter()
        .map(|inv| sec_monomials.iter().map(|f| inv.mul(f, &field)).collect())
        .collect();
    let priv_basis = curve.one_point_basis(t_privacy as u64 + 2 * genus - 1);

    // noise span over every admissible point: privacy span, secrecy·query
    // span, and the per-carrier secrecy·privacy containments
    let admissible = curve.admissible_points();
    let mut ev = BatchEvaluator::new(&admissible, &field);
    let mut reducer = RowReducer::new(admissible.len());
    for f in priv_basis.iter().chain(sec_monomials.iter()) {
        reducer.absorb(ev.eval_row(f)?, &field);
    }
    let cross = curve.one_point_basis((x_security + t_privacy) as u64 + 4 * genus - 2);
    for inv in &inv_h {
        for f in &cross {
            let prod = inv.mul(f, &field);
            reducer.absorb(ev.eval_row(&prod)?, &field);
        }
    }
    let w_full = reducer.into_matrix();

    // information-set selection: leftmost pivot columns of the stacked
    // info/noise evaluation over all admissible points, padded to N
    let mut h_full_rows = Vec::with_capacity(file_len);
    for f in &h_fns {
        h_full_rows.push(ev.eval_row(f)?);
    }
    let h_full = Matrix::from_rows(h_full_rows);
    let stacked = h_full.vstack(&w_full);
    let pivots = pivot_columns(&stacked, &field);
    let expected_rank = file_len + w_full.rows();
    if pivots.len() != expected_rank {
        return Err(SchemeError::InformationSetNotFound {
            found: pivots.len(),
            expected: expected_rank,
        });
    }

    let n = params.expected_servers();
    let mut selected = pivots;
    let chosen: std::collections::BTreeSet<usize> = selected.iter().copied().collect();
    for idx in 0..admissible.len() {
        if selected.len() == n {
            break;
        }
        if !chosen.contains(&idx) {
            selected.push(idx);
        }
    }
    debug_assert_eq!(selected.len(), n, "admissible points must cover N");
    selected.sort_unstable();

    let points: Vec<_> = selected.iter().map(|&i| admissible[i]).collect();
    let h = h_full.select_columns(&selected);
    let w = w_full.select_columns(&selected);
    let g_sec = sec_basis
        .iter()
        .map(|fns| crate::curve::evaluate_matrix(fns, &points, &field))
        .collect::<Result<Vec<Matrix>, _>>()?;
    let g_priv = crate::curve::evaluate_matrix(&priv_basis, &points, &field)?;

    let deg_dfull = params.expected_deg_dfull();
    Ok(SchemeSpec::from_parts(
        params, field, curve, f_list, h_fns, sec_basis, priv_basis, points, h, g_sec, g_priv, w,
        deg_dfull,
    ))
}
