//! Test-matrix generators.

use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, C64};
use crate::subspace::CompanionForm;

/// Grcar matrix: `−1` on the subdiagonal, `1` on the diagonal and the first
/// `k` superdiagonals.
pub fn grcar(n: usize, k: usize) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::Dimension(format!("grcar needs n ≥ 2, got {n}")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        if i == j + 1 {
            c64(-1.0, 0.0)
        } else if j >= i && j - i <= k {
            c64(1.0, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    }))
}

/// Default Kahan angle `asin(0.1^(1/(n−1)))`.
pub fn kahan_default_theta(n: usize) -> f64 {
    (0.1f64.powf(1.0 / (n as f64 - 1.0))).asin()
}

/// Kahan matrix `diag(s^0, …, s^{n−1}) (I − c·triu(ones, 1))` plus the
/// diagonal perturbation `pert·eps·(n − i)` (0-based `i`), `eps = 2^−52`.
pub fn kahan(n: usize, theta: f64, pert: f64) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::Dimension(format!("kahan needs n ≥ 2, got {n}")));
    }
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
        return Err(Error::Parameter(format!("kahan angle {theta} outside (0, π/2]")));
    }
    let (s, c) = theta.sin_cos();
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let scale = s.powi(i as i32);
        if i == j {
            c64(scale + pert * f64::EPSILON * (n - i) as f64, 0.0)
        } else if j > i {
            c64(-c * scale, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    }))
}

/// Companion matrix of the monic polynomial `z^k + Σ a_i z^i`, given
/// `coeffs = [a_0, …, a_{k−1}]`.
pub fn companion_from_poly(coeffs: &[C64], form: CompanionForm) -> Result<CMatrix> {
    let k = coeffs.len();
    if k < 2 {
        return Err(Error::Dimension(format!("companion needs degree ≥ 2, got {k}")));
    }
    let mut m = CMatrix::zeros(k, k);
    for i in 0..k - 1 {
        match form {
            CompanionForm::FirstRow => m[(i + 1, i)] = c64(1.0, 0.0),
            CompanionForm::FirstColumn | CompanionForm::LastRow => m[(i, i + 1)] = c64(1.0, 0.0),
        }
    }
    for (a, (i, j)) in coeffs.iter().zip(form.coefficient_positions(k)) {
        m[(i, j)] = -a;
    }
    Ok(m)
}

/// Monic polynomial coefficients `[a_0, …, a_{k−1}]` held by a companion
/// matrix of the given form.
pub fn companion_coefficients(m: &CMatrix, form: CompanionForm) -> Vec<C64> {
    form.coefficient_positions(m.nrows())
        .into_iter()
        .map(|p| -m[p])
        .collect()
}

fn real(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    CMatrix::from_fn(n, rows[0].len(), |i, j| c64(rows[i][j], 0.0))
}

/// `diag(1, 0)`: nearest multiple-eigenvalue matrix is at distance `1/2`.
pub fn diag_one_zero() -> CMatrix {
    real(&[&[1.0, 0.0], &[0.0, 0.0]])
}

/// Companion matrix of `z² − z` in first-row form.
pub fn companion_example() -> CMatrix {
    real(&[&[1.0, 0.0], &[1.0, 0.0]])
}

/// 3×3 complex test matrix with known global distance `≈ 1.139495`.
pub fn russians_example1() -> CMatrix {
    let e = |re, im| c64(re, im);
    CMatrix::from_row_slice(
        3,
        3,
        &[
            e(1.0, 1.0),
            e(1.0, -2.0),
            e(2.0, -2.0),
            e(1.0, 2.0),
            e(2.0, 1.0),
            e(1.0, -3.0),
            e(2.0, 0.0),
            e(1.0, 2.0),
            e(2.0, 1.0),
        ],
    )
}

/// Flipped companion matrix of `z³ + 13z² + 55z + 91`.
pub fn russians_example2() -> CMatrix {
    real(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[-91.0, -55.0, -13.0]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::rng;
    use rand::Rng;

    #[test]
    fn grcar_matches_displayed_matrix() {
        let expect: [[f64; 6]; 6] = [
            [1., 1., 1., 1., 0., 0.],
            [-1., 1., 1., 1., 1., 0.],
            [0., -1., 1., 1., 1., 1.],
            [0., 0., -1., 1., 1., 1.],
            [0., 0., 0., -1., 1., 1.],
            [0., 0., 0., 0., -1., 1.],
        ];
        let g = grcar(6, 3).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(g[(i, j)], c64(expect[i][j], 0.0));
            }
        }
        let sums: Vec<f64> = (0..6).map(|i| g.row(i).iter().map(|z| z.re).sum()).collect();
        assert_eq!(sums, vec![4.0, 3.0, 3.0, 2.0, 1.0, 0.0]);
        assert_eq!(grcar(2, 3).unwrap(), real(&[&[1.0, 1.0], &[-1.0, 1.0]]));
    }

    #[test]
    fn kahan_structure() {
        let k = kahan(2, std::f64::consts::FRAC_PI_2, 25.0).unwrap();
        assert!((k[(0, 0)].re - 1.0).abs() < 1e-13);
        assert!((k[(1, 1)].re - 1.0).abs() < 1e-13);
        assert!(k[(0, 1)].re.abs() < 1e-15);

        let n = 6;
        let theta = kahan_default_theta(n);
        let k = kahan(n, theta, 0.0).unwrap();
        let s = theta.sin();
        for i in 0..n {
            assert!((k[(i, i)].re - s.powi(i as i32)).abs() <= 4.0 * f64::EPSILON);
        }
        assert!((s.powi(n as i32 - 1) - 0.1).abs() < 1e-14);
        let kp = kahan(n, theta, 25.0).unwrap();
        assert_eq!(kp[(0, 0)].re, 1.0 + 25.0 * f64::EPSILON * 6.0);
        assert!(kahan(1, theta, 0.0).is_err());
    }

    #[test]
    fn companion_examples() {
        let a = companion_from_poly(&[c64(0.0, 0.0), c64(-1.0, 0.0)], CompanionForm::FirstRow).unwrap();
        assert_eq!(a, companion_example());

        let a = companion_from_poly(
            &[c64(91.0, 0.0), c64(55.0, 0.0), c64(13.0, 0.0)],
            CompanionForm::LastRow,
        )
        .unwrap();
        assert_eq!(a, russians_example2());

        let x0 = 0.4534;
        let b = companion_from_poly(&[c64(x0 * x0, 0.0), c64(-2.0 * x0, 0.0)], CompanionForm::FirstRow)
            .unwrap();
        assert_eq!(b, real(&[&[2.0 * x0, -x0 * x0], &[1.0, 0.0]]));
    }

    #[test]
    fn companion_characteristic_polynomial() {
        let mut g = rng(9);
        for form in [CompanionForm::FirstRow, CompanionForm::FirstColumn, CompanionForm::LastRow] {
            let coeffs: Vec<C64> = (0..4)
                .map(|_| c64(g.random_range(-3.0..3.0), g.random_range(-3.0..3.0)))
                .collect();
            let m = companion_from_poly(&coeffs, form).unwrap();
            assert_eq!(companion_coefficients(&m, form), coeffs);
            for _ in 0..10 {
                let z = c64(g.random_range(-2.0..2.0), g.random_range(-2.0..2.0));
                let det = (CMatrix::identity(4, 4) * z - &m).determinant();
                let p = coeffs.iter().rev().fold(c64(1.0, 0.0), |acc, &a| acc * z + a);
                assert!((det - p).norm() <= 1e-10 * p.norm().max(1.0));
            }
        }
    }

    #[test]
    fn generators_are_bit_stable() {
        assert_eq!(grcar(9, 3).unwrap(), grcar(9, 3).unwrap());
        let t = kahan_default_theta(15);
        assert_eq!(kahan(15, t, 25.0).unwrap(), kahan(15, t, 25.0).unwrap());
    }
}
