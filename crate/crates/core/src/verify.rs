//! Post-hoc certification of solutions and construction of eigenvector
//! certificates for matrices that already have a multiple eigenvalue.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMatrix, CVector, C64};
use crate::objective::Frame;
use crate::random::{gaussian_matrix, seeded};
use crate::solver::SolveResult;
use crate::subspace::StructureSubspace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Eigen-residuals, relative to `‖A‖_F`.
    pub residual_rtol: f64,
    /// Multiple of `√u (1 + ‖A‖_F)` allowed for the eigenvalue gap.
    pub eigen_gap_factor: f64,
    pub uv_orthogonality: f64,
    pub delta_rank_ratio: f64,
    /// `|σ_n(A − λI) − ‖Δ‖_F|`, relative to `‖A‖_F`.
    pub sigma_min_rtol: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            residual_rtol: 1e-8,
            eigen_gap_factor: 10.0,
            uv_orthogonality: 1e-6,
            delta_rank_ratio: 1e-6,
            sigma_min_rtol: 1e-6,
        }
    }
}

impl Thresholds {
    pub fn eigen_gap_limit(&self, norm_a: f64) -> f64 {
        self.eigen_gap_factor * f64::EPSILON.sqrt() * (1.0 + norm_a)
    }
}

/// Checks on `A + Δ`; the last three apply to the unstructured problem only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Smallest distance between two eigenvalues of `A + Δ`.
    pub eigen_gap: f64,
    pub right_residual: f64,
    pub left_residual: f64,
    /// `|u_n* v_n|` for the smallest singular pair of `A − λI`.
    pub uv_orthogonality: Option<f64>,
    /// `σ₂(Δ)/σ₁(Δ)`.
    pub delta_rank_ratio: Option<f64>,
    pub sigma_min_match: Option<f64>,
    pub passed: bool,
}

fn shifted(a: &CMatrix, lambda: C64) -> CMatrix {
    let mut b = a.clone();
    for i in 0..a.nrows() {
        b[(i, i)] -= lambda;
    }
    b
}

/// Smallest pairwise distance between eigenvalues.
pub fn eigen_gap(b: &CMatrix) -> Result<f64> {
    let values = linalg::schur(b)?.t.diagonal();
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    Ok(gap)
}

pub fn verify_solution(
    a: &CMatrix,
    s: &StructureSubspace,
    result: &SolveResult,
    thresholds: &Thresholds,
) -> Result<VerificationReport> {
    verify_parts(a, s, &result.delta, result.lambda, &result.frame, thresholds)
}

/// Verification from the raw pieces of a solution.
pub fn verify_parts(
    a: &CMatrix,
    s: &StructureSubspace,
    delta: &CMatrix,
    lambda: C64,
    frame: &Frame,
    t: &Thresholds,
) -> Result<VerificationReport> {
    let norm_a = a.norm();
    let perturbed = a + delta;
    let k = shifted(&perturbed, lambda);
    let right_residual = (&k * frame.v()).norm();
    let left_residual = (k.adjoint() * frame.u()).norm();
    let gap = eigen_gap(&perturbed)?;
    let res_limit = t.residual_rtol * norm_a;
    let mut passed = right_residual <= res_limit && left_residual <= res_limit && gap <= t.eigen_gap_limit(norm_a);

    let (mut uv, mut rank, mut sigma) = (None, None, None);
    if s.is_full() {
        let svd = linalg::svd(&shifted(a, lambda))?;
        let n = a.nrows();
        let uv_val = singular_pair_orthogonality(&svd, n, norm_a);
        let dsv = linalg::svd(delta)?.singular_values;
        let rank_val = if dsv[0] > 0.0 { dsv[1] / dsv[0] } else { 0.0 };
        let sigma_val = (svd.sigma_min() - delta.norm()).abs();
        passed &= uv_val <= t.uv_orthogonality
            && rank_val <= t.delta_rank_ratio
            && sigma_val <= t.sigma_min_rtol * norm_a;
        uv = Some(uv_val);
        rank = Some(rank_val);
        sigma = Some(sigma_val);
    }
    Ok(VerificationReport {
        eigen_gap: gap,
        right_residual,
        left_residual,
        uv_orthogonality: uv,
        delta_rank_ratio: rank,
        sigma_min_match: sigma,
        passed,
    })
}

/// Relative width of a cluster of smallest singular values treated as one.
pub const SIGMA_CLUSTER_RTOL: f64 = 1e-8;

/// `min |u* v|` over singular pairs `(U c, V c)` of the smallest singular
/// value. For a simple `σ_n` this is `|u_n* v_n|`; for a cluster it is the
/// distance from 0 to the numerical range of `U_k* V_k`.
fn singular_pair_orthogonality(svd: &linalg::Svd, n: usize, norm_a: f64) -> f64 {
    let sv = &svd.singular_values;
    let smin = sv[n - 1];
    let k = (0..n).filter(|&i| sv[i] - smin <= SIGMA_CLUSTER_RTOL * norm_a.max(sv[0])).count();
    if k == 1 {
        return svd.u.column(n - 1).dotc(&svd.v.column(n - 1)).norm();
    }
    let uk = svd.u.columns(n - k, k);
    let vk = svd.v.columns(n - k, k);
    let kmat = uk.adjoint() * vk;
    // support function of the numerical range: λ_max(herm(e^{−iφ} K))
    let mut dist: f64 = 0.0;
    for step in 0..720 {
        let phi = step as f64 * std::f64::consts::PI / 360.0;
        let rotated = &kmat * C64::from_polar(1.0, -phi);
        let h = linalg::hermitian_part(&rotated);
        let top = nalgebra::SymmetricEigen::new(h).eigenvalues.max();
        dist = dist.max(-top);
    }
    dist
}

/// `c, s` with `[c s; −s̄ c] [f; g] = [r; 0]`, `c` real.
fn givens(f: C64, g: C64) -> (f64, C64) {
    let (fa, ga) = (f.norm(), g.norm());
    if ga == 0.0 {
        return (1.0, c64(0.0, 0.0));
    }
    if fa == 0.0 {
        return (0.0, g.conj() / ga);
    }
    let d = fa.hypot(ga);
    (fa / d, (f / fa) * g.conj() / d)
}

/// `x ← c x + s y`, `y ← −s̄ x + c y`.
fn rot(x: &mut [C64], y: &mut [C64], c: f64, s: C64) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let (a, b) = (*xi, *yi);
        *xi = a * c + s * b;
        *yi = -s.conj() * a + b * c;
    }
}

/// Swap the diagonal entries `k` and `k+1` of an upper-triangular Schur
/// factor by a unitary rotation, updating `Q`.
fn swap_adjacent(t: &mut CMatrix, q: &mut CMatrix, k: usize) {
    let n = t.nrows();
    let (t11, t22) = (t[(k, k)], t[(k + 1, k + 1)]);
    let (c, s) = givens(t[(k, k + 1)], t22 - t11);
    if k + 2 < n {
        let mut r1: Vec<C64> = (k + 2..n).map(|j| t[(k, j)]).collect();
        let mut r2: Vec<C64> = (k + 2..n).map(|j| t[(k + 1, j)]).collect();
        rot(&mut r1, &mut r2, c, s);
        for (o, j) in (k + 2..n).enumerate() {
            t[(k, j)] = r1[o];
            t[(k + 1, j)] = r2[o];
        }
    }
    if k > 0 {
        let mut c1: Vec<C64> = (0..k).map(|i| t[(i, k)]).collect();
        let mut c2: Vec<C64> = (0..k).map(|i| t[(i, k + 1)]).collect();
        rot(&mut c1, &mut c2, c, s.conj());
        for i in 0..k {
            t[(i, k)] = c1[i];
            t[(i, k + 1)] = c2[i];
        }
    }
    t[(k, k)] = t22;
    t[(k + 1, k + 1)] = t11;
    let mut q1: Vec<C64> = q.column(k).iter().cloned().collect();
    let mut q2: Vec<C64> = q.column(k + 1).iter().cloned().collect();
    rot(&mut q1, &mut q2, c, s.conj());
    q.set_column(k, &CVector::from_vec(q1));
    q.set_column(k + 1, &CVector::from_vec(q2));
}

/// Default gap below which two computed eigenvalues count as one double
/// eigenvalue.
pub fn default_multiplicity_tol(b: &CMatrix) -> f64 {
    1e-6 * (1.0 + b.norm())
}

/// Orthonormal `u, v` and `λ` with `B v ≈ λ v`, `u* B ≈ λ u*`, from a Schur
/// form reordered so the closest eigenvalue pair sits at positions 1 and n.
pub fn certificate_from_schur(b: &CMatrix) -> Result<(CVector, CVector, C64)> {
    certificate_from_schur_with(b, default_multiplicity_tol(b))
}

pub fn certificate_from_schur_with(b: &CMatrix, tol: f64) -> Result<(CVector, CVector, C64)> {
    let n = b.nrows();
    if !b.is_square() || n < 2 {
        return Err(Error::Dimension(format!("need square B with n ≥ 2, got {:?}", b.shape())));
    }
    let linalg::Schur { mut q, mut t } = linalg::schur(b)?;
    let mut pair = (0, 1);
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let d = (t[(i, i)] - t[(j, j)]).norm();
            if d < best {
                best = d;
                pair = (i, j);
            }
        }
    }
    if best > tol {
        return Err(Error::Certificate(format!(
            "no numerically multiple eigenvalue (closest pair {best:.3e} apart)"
        )));
    }
    let (i, j) = pair;
    for k in (0..i).rev() {
        swap_adjacent(&mut t, &mut q, k);
    }
    // i < j, so moving entry i to the front leaves j in place
    for k in j..n - 1 {
        swap_adjacent(&mut t, &mut q, k);
    }
    let lambda = (t[(0, 0)] + t[(n - 1, n - 1)]) * 0.5;
    Ok((q.column(n - 1).into_owned(), q.column(0).into_owned(), lambda))
}

/// `A = λI + δ u v* + (I − uu*) C (I − vv*)` for a random orthonormal pair:
/// `(A − λI) v = δ u` and `(A − λI)* u = δ v` hold exactly.
pub fn plant_critical_point(n: usize, lambda: C64, delta: f64, seed: u64) -> Result<(CMatrix, Frame)> {
    if !(delta > 0.0) {
        return Err(Error::Parameter(format!("δ must be positive, got {delta}")));
    }
    let mut rng = seeded(seed);
    let frame = crate::stiefel::random_frame(&mut rng, n)?;
    let (u, v) = (frame.u(), frame.v());
    let c = gaussian_matrix(&mut rng, n, n);
    let pu = CMatrix::identity(n, n) - &u * u.adjoint();
    let pv = CMatrix::identity(n, n) - &v * v.adjoint();
    let a = CMatrix::identity(n, n) * lambda + &u * v.adjoint() * c64(delta, 0.0) + pu * c * pv;
    Ok((a, frame))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::full_space;
    use crate::testutil::{random_matrix, rng};

    #[test]
    fn jordan_block_certificate() {
        let j = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
        let (u, v, l) = certificate_from_schur(&j).unwrap();
        assert!(l.norm() < 1e-15);
        assert!((v[0].norm() - 1.0).abs() < 1e-15 && (u[1].norm() - 1.0).abs() < 1e-15);

        let z = CMatrix::zeros(3, 3);
        let (u, v, l) = certificate_from_schur(&z).unwrap();
        assert_eq!(l, c64(0.0, 0.0));
        assert!(u.dotc(&v).norm() < 1e-15);
    }

    #[test]
    fn reordering_moves_pair_to_the_ends() {
        let mut g = rng(51);
        for n in [3, 5, 7] {
            // upper triangular with a repeated eigenvalue in the middle, then
            // a random unitary similarity
            let mut t = random_matrix(&mut g, n, n);
            for j in 0..n {
                for i in j + 1..n {
                    t[(i, j)] = c64(0.0, 0.0);
                }
            }
            let j = if n > 3 { n - 2 } else { n - 1 };
            t[(j, j)] = t[(1, 1)];
            let q = linalg::thin_qr(&random_matrix(&mut g, n, n)).unwrap().0;
            let b = &q * t * q.adjoint();
            let (u, v, l) = certificate_from_schur(&b).unwrap();
            let nb = b.norm();
            assert!((&b * &v - &v * l).norm() <= 1e-7 * nb);
            assert!((b.adjoint() * &u - &u * l.conj()).norm() <= 1e-7 * nb);
            assert!(u.dotc(&v).norm() < 1e-12);
            assert!((u.norm() - 1.0).abs() < 1e-12 && (v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn certificate_requires_close_pair() {
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(4.0, 0.0)]));
        assert!(matches!(certificate_from_schur(&d), Err(Error::Certificate(_))));
    }

    #[test]
    fn planted_identities() {
        let (a, f) = plant_critical_point(6, c64(1.0, -0.5), 0.8, 7).unwrap();
        let b = shifted(&a, c64(1.0, -0.5));
        assert!((&b * f.v() - f.u() * c64(0.8, 0.0)).norm() < 1e-12);
        assert!((b.adjoint() * f.u() - f.v() * c64(0.8, 0.0)).norm() < 1e-12);
        let (a2, _) = plant_critical_point(6, c64(1.0, -0.5), 0.8, 7).unwrap();
        assert_eq!(a, a2);
        assert!(plant_critical_point(3, c64(0.0, 0.0), 0.0, 1).is_err());
    }

    #[test]
    fn zero_perturbation_fails_verification() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(4.0, 0.0)]));
        let mut g = rng(52);
        let f = crate::testutil::random_frame(&mut g, 3);
        let r = verify_parts(&a, &full_space(3).unwrap(), &CMatrix::zeros(3, 3), c64(1.5, 0.0), &f, &Thresholds::default()).unwrap();
        assert!(!r.passed);
        assert!(r.right_residual > 0.1 && r.eigen_gap > 0.5);
    }

    #[test]
    fn exact_rank_one_solution_passes() {
        // diag(1, 0) with its analytic optimum
        let a = crate::gallery::diag_one_zero();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = CVector::from_vec(vec![c64(h, 0.0), c64(-h, 0.0)]);
        let v = CVector::from_vec(vec![c64(h, 0.0), c64(h, 0.0)]);
        let f = Frame::from_vectors(&u, &v).unwrap();
        let delta = CMatrix::from_row_slice(2, 2, &[c64(-0.25, 0.0), c64(-0.25, 0.0), c64(0.25, 0.0), c64(0.25, 0.0)]);
        let r = verify_parts(&a, &full_space(2).unwrap(), &delta, c64(0.5, 0.0), &f, &Thresholds::default()).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.sigma_min_match.unwrap() < 1e-12);
    }
}
