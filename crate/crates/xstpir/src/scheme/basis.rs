//! The alternative basis of `span{1, x, …, x^(k-1)}` built from distinct
//! irreducible polynomials: for `f_1, …, f_n` the set
//! `{ x^j · (f_1⋯f_n)/f_i : 1 ≤ i ≤ n, 0 ≤ j ≤ deg(f_i)-1 }`
//! has Σ deg(f_i) members and spans the polynomials of degree below that sum.
//! Both scheme constructions rest on this basis; its rank property is
//! re-verified computationally in the test suites.

use super::SchemeError;
use crate::gf::FieldParams;
use crate::poly::{format_poly, Poly};

/// Returns the basis polynomials ordered by (factor index ascending, power of
/// `x` ascending).
pub fn basis_b(field: &FieldParams, factors: &[Poly]) -> Result<Vec<Poly>, SchemeError> {
    for (a, f) in factors.iter().enumerate() {
        if !f.is_irreducible(field)? {
            return Err(SchemeError::ReducibleFactor(format_poly(f)));
        }
        if factors[..a].contains(f) {
            return Err(SchemeError::DuplicateFactor(format_poly(f)));
        }
    }
    let mut product = Poly::one();
    for f in factors {
        product = product.mul(f, field);
    }
    let mut out = Vec::new();
    for f in factors {
        let (quotient, rem) = product.divrem(f, field)?;
        debug_assert!(rem.is_zero());
        let deg = f.degree().expect("irreducible factors are nonzero");
        let mut shifted = quotient;
        for _ in 0..deg {
            out.push(shifted.clone());
            shifted = shifted.mul(&Poly::x(), field);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    /// Coefficient matrix of a polynomial list (row per polynomial).
    fn coefficient_matrix(polys: &[Poly], width: usize) -> Matrix {
        Matrix::from_rows(
            polys
                .iter()
                .map(|p| (0..width).map(|i| p.coeff(i)).collect())
                .collect(),
        )
    }

    #[test]
    fn two_quadratics_over_f3() {
        let f3 = FieldParams::new(3, 1).unwrap();
        let f1 = Poly::from_residues(&f3, &[1, 0, 1]); // x^2+1
        let f2 = Poly::from_residues(&f3, &[2, 1, 1]); // x^2+x+2
        let basis = basis_b(&f3, &[f1, f2]).unwrap();
        assert_eq!(
            basis,
            vec![
                Poly::from_residues(&f3, &[2, 1, 1]),    // f2
                Poly::from_residues(&f3, &[0, 2, 1, 1]), // x f2
                Poly::from_residues(&f3, &[1, 0, 1]),    // f1
                Poly::from_residues(&f3, &[0, 1, 0, 1]), // x f1
            ]
        );
        let mat = coefficient_matrix(&basis, 4);
        assert_eq!(mat.rank(&f3), 4);
    }

    #[test]
    fn single_linear_factor_gives_constant() {
        let f5 = FieldParams::new(5, 1).unwrap();
        let basis = basis_b(&f5, &[Poly::x()]).unwrap();
        assert_eq!(basis, vec![Poly::one()]);
    }

    #[test]
    fn single_quadratic_gives_one_and_x() {
        let f2 = FieldParams::new(2, 1).unwrap();
        let f = Poly::from_residues(&f2, &[1, 1, 1]);
        let basis = basis_b(&f2, &[f]).unwrap();
        assert_eq!(basis, vec![Poly::one(), Poly::x()]);
    }

    #[test]
    fn rejects_duplicates_and_reducibles() {
        let f3 = FieldParams::new(3, 1).unwrap();
        let f1 = Poly::from_residues(&f3, &[1, 0, 1]);
        assert!(matches!(
            basis_b(&f3, &[f1.clone(), f1.clone()]),
            Err(SchemeError::DuplicateFactor(_))
        ));
        let sq = Poly::from_residues(&f3, &[0, 0, 1]); // x^2
        assert!(matches!(
            basis_b(&f3, &[sq]),
            Err(SchemeError::ReducibleFactor(_))
        ));
    }

    #[test]
    fn random_sets_have_full_rank() {
        // 200 random sets of 1..=5 distinct quadratic irreducibles per field
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for s in [3u64, 5, 7, 9, 25] {
            let field = FieldParams::with_cardinality(s).unwrap();
            let available = crate::poly::quadratic_irreducible_count(&field) as usize;
            let pool = crate::poly::quadratic_irreducibles(&field, available.min(64)).unwrap();
            for trial in 0..200 {
                let size = 1 + trial % pool.len().min(5);
                let mut picks = pool.clone();
                picks.shuffle(&mut rng);
                picks.truncate(size);
                let basis = basis_b(&field, &picks).unwrap();
                let total: usize = picks.iter().map(|f| f.degree().unwrap()).sum();
                assert_eq!(basis.len(), total);
                let mat = coefficient_matrix(&basis, total);
                assert_eq!(mat.rank(&field), total, "field {s}, trial {trial}");
            }
        }
    }
}
