//! Closed-form maximum retrieval rates for fixed field size and noise
//! parameters, as exact rationals. Five formulas are covered: the two new
//! constructions plus the prior rational scheme, the hyperelliptic upper
//! bound (genus a parameter), and the prior Hermitian scheme.
//!
//! Conventions: the two Hermitian formulas consume the curve parameter `q`
//! (their field size is `q²`); the rational and hyperelliptic formulas
//! consume `q` as the field size itself. An infeasible parameter combination
//! (the formula's side condition fails) yields `None`, rendered as the
//! sentinel value 0 in sweeps.

use num_rational::Ratio;

/// Exact rate value.
pub type Rate = Ratio<i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateFormula {
    /// New rational-curve scheme: `L = 2⌊(q-X-T-3)/2⌋`, `N = L+X+T+2`,
    /// feasible while `⌊(q-X-T-3)/2⌋ ≥ 1`.
    NewRational,
    /// New Hermitian scheme: `m = 2⌊(q³-3q²-3q+2-X-T)/(2q)⌋`,
    /// `L = mq - q(q-1)/2`, `N = L+X+T+3q²+2q-2`, feasible while
    /// `⌊…⌋ ≥ (q-1)/2`.
    NewHermitian,
    /// Prior rational-curve scheme: `L = ⌊(q-X-T)/2⌋`, `N = L+X+T`,
    /// feasible while `L ≥ 1`.
    OldRational,
    /// Upper bound for genus-g hyperelliptic schemes:
    /// `(2q-(X+T+8g+2)) / (2q+X+T+4g+2)`, feasible while nonnegative.
    HyperellipticBound(u64),
    /// Prior Hermitian scheme: `m = ⌊(q³-3q²+q+1-X-T)/(2q)⌋`,
    /// `L = mq - q(q-1)/2`, `N = L+X+T+3q²-q-2`, feasible while `m ≥ q-1`.
    OldHermitian,
}

/// Exact maximum rate, or `None` when the formula's condition fails.
pub fn max_rate(formula: RateFormula, q: u64, x: u64, t: u64) -> Option<Rate> {
    let q = q as i128;
    let s = (x + t) as i128;
    match formula {
        RateFormula::NewRational => {
            let half = (q - s - 3).div_euclid(2);
            if half < 1 {
                return None;
            }
            let l = 2 * half;
            Some(Ratio::new(l, l + s + 2))
        }
        RateFormula::OldRational => {
            let l = (q - s).div_euclid(2);
            if l < 1 {
                return None;
            }
            Some(Ratio::new(l, l + s))
        }
        RateFormula::HyperellipticBound(g) => {
            let g = g as i128;
            let num = 2 * q - (s + 8 * g + 2);
            if num < 0 {
                return None;
            }
            Some(Ratio::new(num, 2 * q + s + 4 * g + 2))
        }
        RateFormula::OldHermitian => {
            let m = (q * q * q - 3 * q * q + q + 1 - s).div_euclid(2 * q);
            if m < q - 1 {
                return None;
            }
            let l = m * q - q * (q - 1) / 2;
            Some(Ratio::new(l, l + s + 3 * q * q - q - 2))
        }
        RateFormula::NewHermitian => {
            let half = (q * q * q - 3 * q * q - 3 * q + 2 - s).div_euclid(2 * q);
            // ⌊…⌋ ≥ (q-1)/2 with exact rational comparison
            if 2 * half < q - 1 {
                return None;
            }
            let m = 2 * half;
            let l = m * q - q * (q - 1) / 2;
            Some(Ratio::new(l, l + s + 3 * q * q + 2 * q - 2))
        }
    }
}

/// One sweep row: the noise budget split `X = ⌈(X+T)/2⌉, T = ⌊(X+T)/2⌋`
/// (all five formulas depend on X, T only through the sum) and the five
/// rates, `None` meaning infeasible.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub xt: u64,
    pub x: u64,
    pub t: u64,
    pub new_rational: Option<Rate>,
    pub old_rational: Option<Rate>,
    pub hyper_g1: Option<Rate>,
    pub old_hermitian: Option<Rate>,
    pub new_hermitian: Option<Rate>,
}

impl SweepRow {
    /// The sentinel-0 view of a column, following the convention that an
    /// infeasible combination contributes rate 0.
    pub fn or_zero(rate: Option<Rate>) -> Rate {
        rate.unwrap_or_else(|| Ratio::new(0, 1))
    }
}

/// Sweeps `X+T` over `[xt_min, xt_max]` at fixed `q`.
pub fn compare_sweep(q: u64, xt_min: u64, xt_max: u64) -> Vec<SweepRow> {
    (xt_min..=xt_max)
        .map(|xt| {
            let x = xt.div_ceil(2);
            let t = xt / 2;
            SweepRow {
                xt,
                x,
                t,
                new_rational: max_rate(RateFormula::NewRational, q, x, t),
                old_rational: max_rate(RateFormula::OldRational, q, x, t),
                hyper_g1: max_rate(RateFormula::HyperellipticBound(1), q, x, t),
                old_hermitian: max_rate(RateFormula::OldHermitian, q, x, t),
                new_hermitian: max_rate(RateFormula::NewHermitian, q, x, t),
            }
        })
        .collect()
}
