//! Dense complex linear algebra used by every other module.
//!
//! Matrices are plain `nalgebra` dense matrices over `Complex64`. The
//! decompositions delegate to `nalgebra` where it provides them (SVD,
//! Schur, Cholesky, Householder QR) and add the pieces it does not:
//! left and right eigenvectors from the Schur form, a sign-normalized
//! thin QR, and a rank-revealing minimum-norm least-squares solve.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative Hermitian-ness tolerance accepted by [`hpd_solve`].
pub const HERMITIAN_RTOL: f64 = 1e-12;
/// Relative threshold on `|R_jj|` below which [`thin_qr`] reports rank loss.
pub const QR_RANK_RTOL: f64 = 1e-12;
/// Relative residual `‖Mδ − r‖ / ‖r‖` up to which `r ∈ Im M` is accepted.
pub const FEASIBILITY_RTOL: f64 = 1e-8;
/// Iteration cap handed to the iterative SVD and Schur drivers.
pub const MAX_DECOMPOSITION_ITERS: usize = 20_000;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn is_finite(x: &CMatrix) -> bool {
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn ensure_finite(x: &CMatrix, what: &str) -> Result<()> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::Dimension(format!("{what} is empty")));
    }
    if !is_finite(x) {
        return Err(Error::Parameter(format!("{what} has non-finite entries")));
    }
    Ok(())
}

/// `⟨X, Y⟩ = trace(Y* X)`.
pub fn frobenius_inner(x: &CMatrix, y: &CMatrix) -> Result<C64> {
    if x.shape() != y.shape() {
        return Err(Error::Dimension(format!(
            "frobenius_inner: {:?} vs {:?}",
            x.shape(),
            y.shape()
        )));
    }
    Ok(x.iter().zip(y.iter()).map(|(a, b)| b.conj() * a).sum())
}

/// Thin SVD `X = U diag(σ) V*` with `σ` sorted descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: DVector<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn sigma_min(&self) -> f64 {
        self.singular_values[self.singular_values.len() - 1]
    }

    pub fn reconstruct(&self) -> CMatrix {
        let s = self.singular_values.map(|x| c64(x, 0.0));
        &self.u * CMatrix::from_diagonal(&s) * self.v.adjoint()
    }
}

pub fn svd(x: &CMatrix) -> Result<Svd> {
    ensure_finite(x, "svd input")?;
    let dec = x
        .clone()
        .try_svd(true, true, f64::EPSILON, MAX_DECOMPOSITION_ITERS)
        .ok_or_else(|| Error::Decomposition(format!("svd of {:?} matrix", x.shape())))?;
    let u = dec.u.expect("requested U");
    let v = dec.v_t.expect("requested V").adjoint();
    Ok(Svd {
        u,
        singular_values: dec.singular_values,
        v,
    })
}

/// Eigenvalues with unit-norm right (`X x = λ x`) and left (`y* X = λ y*`)
/// eigenvectors stored column-wise in matching order.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub right: CMatrix,
    pub left: CMatrix,
}

/// Complex Schur form `X = Q T Q*` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur {
    pub q: CMatrix,
    pub t: CMatrix,
}

pub fn schur(x: &CMatrix) -> Result<Schur> {
    ensure_finite(x, "schur input")?;
    if !x.is_square() {
        return Err(Error::Dimension(format!("schur of {:?} matrix", x.shape())));
    }
    let (q, mut t) = match x.clone().try_schur(f64::EPSILON, MAX_DECOMPOSITION_ITERS) {
        Some(dec) => dec.unpack(),
        // nalgebra's double-shift sweep has no exceptional shifts and can cycle
        None => single_shift_schur(x)
            .ok_or_else(|| Error::Decomposition(format!("schur of {}x{} matrix", x.nrows(), x.nrows())))?,
    };
    let n = t.nrows();
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(Schur { q, t })
}

/// Rotation `G = [c s; −s̄ c]` with `G [x; y] = [r; 0]`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let r = x.norm().hypot(y.norm());
    if r == 0.0 {
        (1.0, C64::new(0.0, 0.0))
    } else if x.norm() == 0.0 {
        (0.0, y.conj() / y.norm())
    } else {
        (x.norm() / r, x / x.norm() * y.conj() / r)
    }
}

/// Complex Schur form by single-shift Hessenberg QR with Wilkinson shifts
/// and an exceptional shift every tenth iteration on a stuck block.
fn single_shift_schur(x: &CMatrix) -> Option<(CMatrix, CMatrix)> {
    let n = x.nrows();
    let scale = x.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    if scale == 0.0 {
        return Some((CMatrix::identity(n, n), x.clone()));
    }
    let (mut z, mut h) = nalgebra::Hessenberg::new(x / C64::new(scale, 0.0)).unpack();
    let eps = f64::EPSILON;
    let tiny = f64::MIN_POSITIVE / eps;
    let mut ihi = n - 1;
    let mut its = 0;
    let mut total = 0;
    while ihi > 0 {
        let mut l = ihi;
        while l > 0 {
            let near = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if h[(l, l - 1)].norm() <= (eps * near).max(tiny) {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == ihi {
            ihi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > 100 * n.max(10) {
            return None;
        }
        let shift = if its % 10 == 0 {
            h[(ihi, ihi)] + h[(ihi, ihi - 1)].re.abs() * 0.75
        } else {
            // eigenvalue of the trailing 2×2 block closest to its last entry
            let (p, q) = (h[(ihi - 1, ihi - 1)], h[(ihi, ihi)]);
            let half = (p - q) * 0.5;
            let disc = (half * half + h[(ihi - 1, ihi)] * h[(ihi, ihi - 1)]).sqrt();
            let (m1, m2) = (q + half - disc, q + half + disc);
            if (m1 - q).norm() <= (m2 - q).norm() {
                m1
            } else {
                m2
            }
        };
        for k in l..ihi {
            let (a, b) = if k == l {
                (h[(l, l)] - shift, h[(l + 1, l)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(a, b);
            for j in k.saturating_sub(1).max(l)..n {
                let (p, q) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = p * c + s * q;
                h[(k + 1, j)] = -s.conj() * p + q * c;
            }
            if k > l {
                h[(k + 1, k - 1)] = C64::new(0.0, 0.0);
            }
            for i in 0..=(k + 2).min(ihi) {
                let (p, q) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = p * c + q * s.conj();
                h[(i, k + 1)] = -p * s + q * c;
            }
            for i in 0..n {
                let (p, q) = (z[(i, k)], z[(i, k + 1)]);
                z[(i, k)] = p * c + q * s.conj();
                z[(i, k + 1)] = -p * s + q * c;
            }
        }
    }
    Some((z, h * C64::new(scale, 0.0)))
}

pub fn eig(x: &CMatrix) -> Result<Eigen> {
    let Schur { q, t } = schur(x)?;
    let n = t.nrows();
    let small = (f64::EPSILON * t.norm()).max(f64::MIN_POSITIVE);
    let guard = |d: C64| if d.norm() < small { C64::new(small, 0.0) } else { d };

    // Right eigenvectors of T by back substitution, left ones by forward
    // substitution on T*. Tiny pivots are replaced by `small`, which keeps
    // the vectors finite for (nearly) repeated eigenvalues.
    let mut right = CMatrix::zeros(n, n);
    let mut left = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        values.push(lambda);

        let mut w = CVector::zeros(n);
        w[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = t[(i, k)];
            for j in i + 1..k {
                acc += t[(i, j)] * w[j];
            }
            w[i] = -acc / guard(t[(i, i)] - lambda);
        }
        let x_k = &q * w;
        right.set_column(k, &(&x_k / C64::new(x_k.norm(), 0.0)));

        let mut s = CVector::zeros(n);
        s[k] = C64::new(1.0, 0.0);
        for j in k + 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for i in k..j {
                acc += t[(i, j)].conj() * s[i];
            }
            s[j] = -acc / guard(t[(j, j)].conj() - lambda.conj());
        }
        let y_k = &q * s;
        left.set_column(k, &(&y_k / C64::new(y_k.norm(), 0.0)));
    }
    Ok(Eigen {
        values,
        right,
        left,
    })
}

/// Cholesky factor of a Hermitian positive definite matrix, reusable for
/// several right-hand sides.
#[derive(Debug, Clone)]
pub struct HpdFactor {
    chol: Cholesky<C64, Dyn>,
}

impl HpdFactor {
    pub fn new(h: &CMatrix) -> Result<Self> {
        ensure_finite(h, "hpd matrix")?;
        if !h.is_square() {
            return Err(Error::Dimension(format!("hpd matrix is {:?}", h.shape())));
        }
        let asym = (h - h.adjoint()).norm();
        if asym > HERMITIAN_RTOL * h.norm() {
            return Err(Error::Factorization(format!(
                "matrix is not Hermitian (‖H − H*‖ = {asym:.3e})"
            )));
        }
        let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
        let chol = Cholesky::new(sym)
            .ok_or_else(|| Error::Factorization("matrix is not positive definite".into()))?;
        // complex square roots never fail, so the pivots must be checked here
        let l = chol.l_dirty();
        let scale = h.norm();
        for i in 0..l.nrows() {
            let d = l[(i, i)];
            if !(d.re > 0.0) || d.im.abs() > HERMITIAN_RTOL * d.re.max(scale.sqrt()) || d.re * d.re <= f64::EPSILON * scale * 1e-4 {
                return Err(Error::Factorization("matrix is not positive definite".into()));
            }
        }
        Ok(Self { chol })
    }

    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        self.chol.solve(b)
    }

    pub fn solve_vec(&self, b: &CVector) -> CVector {
        self.chol.solve(b)
    }
}

pub fn hpd_solve(h: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if h.nrows() != b.nrows() {
        return Err(Error::Dimension(format!(
            "hpd_solve: H is {:?}, B is {:?}",
            h.shape(),
            b.shape()
        )));
    }
    Ok(HpdFactor::new(h)?.solve(b))
}

/// Thin QR `X = Q R` for `X` of size `n×k`, `k ≤ n`, normalized so that the
/// diagonal of `R` is real and positive.
pub fn thin_qr(x: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    ensure_finite(x, "qr input")?;
    let (n, k) = x.shape();
    if k > n {
        return Err(Error::Dimension(format!("thin_qr needs k ≤ n, got {n}x{k}")));
    }
    let dec = x.clone().qr();
    let mut q = dec.q();
    let mut r = dec.r();
    let scale = x.norm();
    for j in 0..k {
        let d = r[(j, j)];
        let mag = d.norm();
        if mag <= QR_RANK_RTOL * scale || mag == 0.0 {
            return Err(Error::Rank(format!(
                "column {j} is dependent (|R_jj| = {mag:.3e}, ‖X‖ = {scale:.3e})"
            )));
        }
        let phase = d / mag;
        for i in 0..n {
            q[(i, j)] *= phase;
        }
        for c in 0..k {
            r[(j, c)] *= phase.conj();
        }
        r[(j, j)] = C64::new(mag, 0.0);
    }
    Ok((q, r))
}

/// Minimum-norm least-squares solution of `M δ ≈ r`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: CVector,
    /// `r ∈ Im M` within the feasibility tolerance.
    pub feasible: bool,
    /// `‖M δ − r‖`.
    pub residual: f64,
    pub rank: usize,
}

pub fn min_norm_lsq(m: &CMatrix, r: &CVector) -> Result<LeastSquares> {
    min_norm_lsq_with(m, r, FEASIBILITY_RTOL)
}

pub fn min_norm_lsq_with(m: &CMatrix, r: &CVector, feasibility_rtol: f64) -> Result<LeastSquares> {
    if m.nrows() != r.len() {
        return Err(Error::Dimension(format!(
            "min_norm_lsq: M is {:?}, r has length {}",
            m.shape(),
            r.len()
        )));
    }
    let dec = svd(m)?;
    let smax = dec.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = smax * f64::EPSILON * (m.nrows().max(m.ncols()) as f64);
    let coeffs = dec.u.adjoint() * r;
    let mut solution = CVector::zeros(m.ncols());
    let mut rank = 0;
    for (i, &s) in dec.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            rank += 1;
            solution += dec.v.column(i) * (coeffs[i] / s);
        }
    }
    let residual = (m * &solution - r).norm();
    let feasible = residual <= feasibility_rtol * r.norm();
    Ok(LeastSquares {
        solution,
        feasible,
        residual,
        rank,
    })
}

/// Hermitian part `(X + X*)/2`.
pub fn hermitian_part(x: &CMatrix) -> CMatrix {
    (x + x.adjoint()) * C64::new(0.5, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_matrix, rng};

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            values.len(),
            values.iter().map(|&v| c64(v, 0.0)),
        ))
    }

    #[test]
    fn frobenius_inner_examples() {
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(frobenius_inner(&i2, &i2).unwrap(), c64(2.0, 0.0));

        let mut x = CMatrix::zeros(2, 2);
        x[(0, 1)] = c64(1.0, 0.0);
        let mut y = CMatrix::zeros(2, 2);
        y[(0, 1)] = c64(0.0, 1.0);
        assert_eq!(frobenius_inner(&x, &y).unwrap(), c64(0.0, -1.0));

        let mut g = rng(3);
        let x = random_matrix(&mut g, 3, 3);
        let direct: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let ip = frobenius_inner(&x, &x).unwrap();
        assert!(ip.im.abs() < 1e-15);
        assert!((ip.re - direct).abs() < 1e-13 * direct);
    }

    #[test]
    fn single_shift_schur_is_unitary_triangularization() {
        let mut g = rng(5);
        let mut cases = vec![random_matrix(&mut g, 9, 9), crate::gallery::grcar(15, 3).unwrap()];
        // Jordan block with a tiny corner: eigenvalues on a small circle
        let mut j = CMatrix::zeros(8, 8);
        for i in 0..7 {
            j[(i, i + 1)] = c64(1.0, 0.0);
        }
        j[(7, 0)] = c64(1e-10, 0.0);
        cases.push(j);
        cases.push(CMatrix::zeros(3, 3));
        for x in cases {
            let (q, t) = single_shift_schur(&x).unwrap();
            let n = x.nrows();
            assert!((q.adjoint() * &q - CMatrix::identity(n, n)).norm() < 1e-12);
            assert!((&q * &t * q.adjoint() - &x).norm() <= 1e-12 * x.norm().max(1.0));
            for c in 0..n {
                for r in c + 1..n {
                    assert_eq!(t[(r, c)], c64(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn frobenius_inner_shape_mismatch() {
        let a = CMatrix::zeros(2, 2);
        let b = CMatrix::zeros(2, 3);
        assert!(matches!(frobenius_inner(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn svd_examples() {
        let s = svd(&CMatrix::identity(3, 3)).unwrap();
        for &x in s.singular_values.iter() {
            assert!((x - 1.0).abs() < 1e-15);
        }
        let x = diag(&[0.5, -0.5]);
        let s = svd(&x).unwrap();
        assert!((s.singular_values[0] - 0.5).abs() < 1e-15);
        assert!((s.singular_values[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn svd_reconstruction_random() {
        let mut g = rng(11);
        for &(m, n) in &[(4, 4), (7, 3), (3, 8), (50, 50)] {
            let x = random_matrix(&mut g, m, n);
            let s = svd(&x).unwrap();
            assert!((s.reconstruct() - &x).norm() <= 1e-12 * x.norm());
            let k = m.min(n);
            assert!((s.u.adjoint() * &s.u - CMatrix::identity(k, k)).norm() < 1e-12);
            assert!((s.v.adjoint() * &s.v - CMatrix::identity(k, k)).norm() < 1e-12);
            for w in s.singular_values.as_slice().windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn svd_rejects_nan() {
        let mut x = CMatrix::identity(2, 2);
        x[(0, 0)] = c64(f64::NAN, 0.0);
        assert!(svd(&x).is_err());
    }

    fn check_eig(x: &CMatrix, e: &Eigen) {
        let scale = x.norm();
        for (j, &l) in e.values.iter().enumerate() {
            let xr = e.right.column(j).into_owned();
            let yl = e.left.column(j).into_owned();
            assert!((xr.norm() - 1.0).abs() < 1e-12);
            assert!((yl.norm() - 1.0).abs() < 1e-12);
            assert!((x * &xr - &xr * l).norm() <= 1e-10 * scale, "right residual {j}");
            assert!((yl.adjoint() * x - yl.adjoint() * l).norm() <= 1e-10 * scale, "left residual {j}");
        }
    }

    #[test]
    fn eig_diagonal() {
        let x = diag(&[1.0, 2.0, 3.0]);
        let e = eig(&x).unwrap();
        let mut re: Vec<f64> = e.values.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(re, vec![1.0, 2.0, 3.0]);
        check_eig(&x, &e);
    }

    #[test]
    fn eig_grcar_and_random_residuals() {
        let x = crate::gallery::grcar(6, 3).unwrap();
        check_eig(&x, &eig(&x).unwrap());
        let mut g = rng(5);
        for n in [2, 5, 12, 30] {
            let x = random_matrix(&mut g, n, n);
            check_eig(&x, &eig(&x).unwrap());
        }
    }

    #[test]
    fn eig_jordan_block() {
        let mut x = CMatrix::zeros(2, 2);
        x[(0, 1)] = c64(1.0, 0.0);
        let e = eig(&x).unwrap();
        for &l in &e.values {
            assert!(l.norm() < 1e-14);
        }
        check_eig(&x, &e);
        for j in 0..2 {
            assert!(e.right[(0, j)].norm() > 1.0 - 1e-12, "right ∝ e1");
            assert!(e.left[(1, j)].norm() > 1.0 - 1e-12, "left ∝ e2");
        }
    }

    #[test]
    fn hpd_solve_examples() {
        let h = CMatrix::identity(3, 3) * c64(2.0, 0.0);
        let b = CMatrix::from_column_slice(3, 1, &[c64(1.0, 2.0), c64(-4.0, 0.0), c64(0.0, 6.0)]);
        let x = hpd_solve(&h, &b).unwrap();
        assert!((x - &b * c64(0.5, 0.0)).norm() < 1e-15);

        let mut h = CMatrix::identity(2, 2);
        h[(1, 1)] = c64(-1.0, 0.0);
        assert!(matches!(
            hpd_solve(&h, &CMatrix::identity(2, 2)),
            Err(Error::Factorization(_))
        ));
    }

    #[test]
    fn hpd_solve_against_explicit_inverse() {
        let mut g = rng(8);
        let b0 = random_matrix(&mut g, 5, 5);
        let h = &b0 * b0.adjoint() + CMatrix::identity(5, 5) * c64(0.1, 0.0);
        let b = random_matrix(&mut g, 5, 2);
        let x = hpd_solve(&h, &b).unwrap();
        let inv = h.clone().try_inverse().unwrap();
        assert!((&x - inv * &b).norm() <= 1e-10 * x.norm());
        assert!((&h * &x - &b).norm() <= 1e-10 * h.norm() * x.norm());
    }

    #[test]
    fn thin_qr_examples() {
        let mut g = rng(1);
        let (q0, _) = thin_qr(&random_matrix(&mut g, 5, 2)).unwrap();
        let (q, r) = thin_qr(&q0).unwrap();
        assert!((&q - &q0).norm() < 1e-12);
        assert!((r - CMatrix::identity(2, 2)).norm() < 1e-12);

        let mut x = CMatrix::zeros(3, 2);
        x[(0, 0)] = c64(1.0, 0.0);
        x[(1, 0)] = c64(1.0, 0.0);
        x[(1, 1)] = c64(1.0, 0.0);
        let (q, r) = thin_qr(&x).unwrap();
        assert!((&q * &r - &x).norm() < 1e-12 * x.norm());
        assert!((q.adjoint() * &q - CMatrix::identity(2, 2)).norm() < 1e-12);
        assert!((r[(0, 0)].re - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(r[(1, 0)], c64(0.0, 0.0));

        let mut x = CMatrix::zeros(3, 2);
        x[(0, 0)] = c64(1.0, 1.0);
        x[(0, 1)] = c64(1.0, 1.0);
        x[(2, 0)] = c64(0.5, 0.0);
        x[(2, 1)] = c64(0.5, 0.0);
        assert!(matches!(thin_qr(&x), Err(Error::Rank(_))));
    }

    #[test]
    fn thin_qr_is_deterministic_with_positive_diagonal() {
        let mut g = rng(2);
        let x = random_matrix(&mut g, 6, 3);
        let (q1, r1) = thin_qr(&x).unwrap();
        let (q2, _) = thin_qr(&x).unwrap();
        assert_eq!(q1, q2);
        for j in 0..3 {
            assert!(r1[(j, j)].re > 0.0 && r1[(j, j)].im == 0.0);
        }
        assert!((&q1 * &r1 - &x).norm() < 1e-12 * x.norm());
    }

    #[test]
    fn lsq_identity_and_planted() {
        let mut g = rng(4);
        let r = random_matrix(&mut g, 4, 1).column(0).into_owned();
        let sol = min_norm_lsq(&CMatrix::identity(4, 4), &r).unwrap();
        assert!(sol.feasible);
        assert!((sol.solution - &r).norm() < 1e-14);

        // rank-3 map from C^5 to C^6
        let m = random_matrix(&mut g, 6, 3) * random_matrix(&mut g, 3, 5);
        let d0 = random_matrix(&mut g, 5, 1).column(0).into_owned();
        let r = &m * &d0;
        let sol = min_norm_lsq(&m, &r).unwrap();
        assert!(sol.feasible);
        assert_eq!(sol.rank, 3);
        // oracle: project d0 onto the row space of M with an independent SVD
        let dec = svd(&m).unwrap();
        let vr = dec.v.columns(0, 3).into_owned();
        let expect = &vr * (vr.adjoint() * &d0);
        assert!((&sol.solution - &expect).norm() < 1e-10 * d0.norm());
        // orthogonal to the kernel
        let ker = dec.v.columns(3, 2).into_owned();
        assert!((ker.adjoint() * &sol.solution).norm() < 1e-10 * sol.solution.norm());

        // r outside the range
        let mut m = CMatrix::zeros(3, 2);
        m[(0, 0)] = c64(1.0, 0.0);
        m[(1, 1)] = c64(1.0, 0.0);
        let r = CVector::from_column_slice(&[c64(1.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0)]);
        let sol = min_norm_lsq(&m, &r).unwrap();
        assert!(!sol.feasible);
        assert!((sol.residual - 1.0).abs() < 1e-14);
    }
}
