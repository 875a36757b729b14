//! Variable-projection objective over orthonormal frames `[u v]`.
//!
//! For a frame, the inner problems over the perturbation `Δ ∈ S` and the
//! eigenvalue `λ` are solved in closed form:
//!
//! ```text
//! r(λ)  = [(λI − A)v ; (λI − A)ᵀ ū] − ε y = λ r₁ + r₀
//! f     = min_λ r(λ)* (M M* + εI)⁻¹ r(λ) = (a c − |b|²) / a,   λ* = −b / a
//! z     = (M M* + εI)⁻¹ r(λ*) = [z_v ; conj(z_u)]
//! Δ*    = Π_S (z_v v* + u z_u*)
//! ∇f    = 2 [(λ* I − A − Δ*) z_u , (λ* I − A − Δ*)* z_v]
//! ```
//!
//! Structured subspaces go through the assembled `2n×p` matrix `M` and a
//! Cholesky factorization of the `2n×2n` matrix `M M* + εI`. The full space
//! uses the rank-2 Sherman–Morrison–Woodbury closed forms and never builds
//! `M`.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMatrix, CVector, HpdFactor, C64};
use crate::subspace::StructureSubspace;

/// Frames whose `‖X*X − I‖_F` exceeds this are re-orthonormalized.
pub const FRAME_ORTHONORMALITY_TOL: f64 = 1e-10;
/// Below this `ε` the regularized inverse is replaced by a pseudoinverse.
pub const EPS_FLOOR: f64 = 1e-14;

/// A point `[u v]` of the complex Stiefel manifold `V₂(Cⁿ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    x: CMatrix,
}

impl Frame {
    /// Wrap an `n×2` matrix with orthonormal columns.
    pub fn new(x: CMatrix) -> Result<Self> {
        let frame = Self::from_matrix_unchecked(x)?;
        let err = frame.orthonormality_error();
        if err > FRAME_ORTHONORMALITY_TOL {
            return Err(Error::Parameter(format!(
                "frame columns are not orthonormal (‖X*X − I‖ = {err:.3e})"
            )));
        }
        Ok(frame)
    }

    /// Wrap an `n×2` matrix without checking orthonormality.
    pub fn from_matrix_unchecked(x: CMatrix) -> Result<Self> {
        if x.ncols() != 2 || x.nrows() < 2 {
            return Err(Error::Dimension(format!("frame must be n×2 with n ≥ 2, got {:?}", x.shape())));
        }
        linalg::ensure_finite(&x, "frame")?;
        Ok(Self { x })
    }

    pub fn from_vectors(u: &CVector, v: &CVector) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::Dimension("u and v differ in length".into()));
        }
        let mut x = CMatrix::zeros(u.len(), 2);
        x.set_column(0, u);
        x.set_column(1, v);
        Self::new(x)
    }

    /// Orthonormalize the columns of an arbitrary full-rank `n×2` matrix.
    pub fn orthonormalize(x: &CMatrix) -> Result<Self> {
        let (q, _) = linalg::thin_qr(x)?;
        Self::from_matrix_unchecked(q)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.x
    }

    pub fn into_matrix(self) -> CMatrix {
        self.x
    }

    pub fn u(&self) -> CVector {
        self.x.column(0).into_owned()
    }

    pub fn v(&self) -> CVector {
        self.x.column(1).into_owned()
    }

    pub fn orthonormality_error(&self) -> f64 {
        (self.x.adjoint() * &self.x - CMatrix::identity(2, 2)).norm()
    }
}

/// Penalty parameter `ε` and multiplier `y = [y_v ; conj(y_u)] ∈ C^{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Regularization {
    pub eps: f64,
    pub y: CVector,
}

impl Regularization {
    pub fn new(eps: f64, y: CVector) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::Parameter(format!("ε must be positive and finite, got {eps}")));
        }
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parameter("multiplier has non-finite entries".into()));
        }
        Ok(Self { eps, y })
    }

    /// Pure penalty (`y = 0`).
    pub fn penalty(n: usize, eps: f64) -> Result<Self> {
        Self::new(eps, CVector::zeros(2 * n))
    }

    pub fn y_v(&self, n: usize) -> CVector {
        self.y.rows(0, n).into_owned()
    }

    pub fn y_u(&self, n: usize) -> CVector {
        self.y.rows(n, n).map(|z| z.conj())
    }

    fn check(&self, n: usize) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::Parameter(format!("ε must be positive and finite, got {}", self.eps)));
        }
        if self.y.len() != 2 * n {
            return Err(Error::Dimension(format!(
                "multiplier has length {}, expected {}",
                self.y.len(),
                2 * n
            )));
        }
        Ok(())
    }
}

/// Coefficients of `f(λ) = [λ̄ 1] [[a, b], [b̄, c]] [λ ; 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abc {
    pub a: f64,
    pub b: C64,
    pub c: f64,
}

impl Abc {
    /// Value of the quadratic form at `λ`.
    pub fn value_at(&self, lambda: C64) -> f64 {
        self.a * lambda.norm_sqr() + 2.0 * (lambda.conj() * self.b).re + self.c
    }

    /// `(a c − |b|²) / a`.
    pub fn minimum(&self) -> f64 {
        (self.a * self.c - self.b.norm_sqr()) / self.a
    }
}

/// Residual vectors `r = λ r₁ + r₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    pub r: CVector,
    pub r0: CVector,
    pub r1: CVector,
}

/// Everything computed by one objective evaluation.
#[derive(Debug, Clone)]
pub struct ObjectiveEval {
    pub abc: Abc,
    pub lambda: C64,
    pub value: f64,
    /// `[z_v ; conj(z_u)]`.
    pub z: CVector,
    /// Coordinates of `Δ*` in the subspace basis (`vec Δ*` for the full space).
    pub delta_coords: CVector,
    pub delta: CMatrix,
    /// Euclidean gradient `[∇_u ∇_v]` (`n×2`).
    pub euclid_grad: CMatrix,
    /// The input frame was re-orthonormalized before evaluation.
    pub reorthonormalized: bool,
}

impl ObjectiveEval {
    pub fn z_v(&self) -> CVector {
        let n = self.z.len() / 2;
        self.z.rows(0, n).into_owned()
    }

    pub fn z_u(&self) -> CVector {
        let n = self.z.len() / 2;
        self.z.rows(n, n).map(|z| z.conj())
    }
}

fn check_inputs(frame: &Frame, a: &CMatrix, s: &StructureSubspace) -> Result<()> {
    let n = frame.n();
    if a.shape() != (n, n) {
        return Err(Error::Dimension(format!("A is {:?}, frame has n = {n}", a.shape())));
    }
    if s.n() != n {
        return Err(Error::Dimension(format!("subspace is for n = {}, frame has n = {n}", s.n())));
    }
    Ok(())
}

fn stack(top: &CVector, bottom_conj: &CVector) -> CVector {
    let n = top.len();
    let mut out = CVector::zeros(2 * n);
    out.rows_mut(0, n).copy_from(top);
    out.rows_mut(n, n).copy_from(&bottom_conj.map(|z| z.conj()));
    out
}

/// `M(u, v)`: column `j` is `[P_j v ; P_jᵀ ū]`.
pub fn assemble_m(frame: &Frame, s: &StructureSubspace) -> Result<CMatrix> {
    let n = frame.n();
    if s.n() != n {
        return Err(Error::Dimension(format!("subspace is for n = {}, frame has n = {n}", s.n())));
    }
    let u = frame.u();
    let v = frame.v();
    if s.is_full() {
        // column-major matrix units
        let mut m = CMatrix::zeros(2 * n, n * n);
        for j in 0..n {
            for i in 0..n {
                let col = i + j * n;
                m[(i, col)] = v[j];
                m[(n + j, col)] = u[i].conj();
            }
        }
        return Ok(m);
    }
    let mut m = CMatrix::zeros(2 * n, s.dim());
    for (col, b) in s.basis().iter().enumerate() {
        for &(i, k, coef) in b.entries() {
            m[(i, col)] += coef * v[k];
            m[(n + k, col)] += coef * u[i].conj();
        }
    }
    Ok(m)
}

/// `r₁ = [v ; ū]`, `r₀ = −[A v ; Aᵀ ū] − ε y`, `r = λ r₁ + r₀`.
pub fn assemble_r(frame: &Frame, lambda: C64, a: &CMatrix, reg: &Regularization) -> Result<Residuals> {
    let n = frame.n();
    reg.check(n)?;
    if a.shape() != (n, n) {
        return Err(Error::Dimension(format!("A is {:?}, frame has n = {n}", a.shape())));
    }
    let u = frame.u();
    let v = frame.v();
    let r1 = stack(&v, &u);
    let av = a * &v;
    let ahu = a.adjoint() * &u;
    let r0 = -stack(&av, &ahu) - &reg.y * c64(reg.eps, 0.0);
    let r = &r1 * lambda + &r0;
    Ok(Residuals { r, r0, r1 })
}

/// `λ* = −b / a`.
pub fn optimal_lambda(abc: &Abc) -> Result<C64> {
    if !(abc.a > 0.0) || !abc.a.is_finite() {
        return Err(Error::Parameter(format!(
            "quadratic coefficient a = {} is not positive",
            abc.a
        )));
    }
    Ok(-abc.b / abc.a)
}

enum RegularizedInverse {
    Cholesky(HpdFactor),
    Pseudo(CMatrix),
}

impl RegularizedInverse {
    fn new(h: &CMatrix, eps: f64) -> Result<Self> {
        if eps >= EPS_FLOOR {
            return Ok(Self::Cholesky(HpdFactor::new(h)?));
        }
        let eig = SymmetricEigen::new(linalg::hermitian_part(h));
        let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let cut = top * f64::EPSILON * h.nrows() as f64;
        let mut pinv = CMatrix::zeros(h.nrows(), h.ncols());
        for (k, &w) in eig.eigenvalues.iter().enumerate() {
            if w > cut {
                let q = eig.eigenvectors.column(k);
                pinv += q * q.adjoint() * c64(1.0 / w, 0.0);
            }
        }
        Ok(Self::Pseudo(pinv))
    }

    fn solve(&self, b: &CVector) -> CVector {
        match self {
            Self::Cholesky(f) => f.solve_vec(b),
            Self::Pseudo(p) => p * b,
        }
    }
}

/// Quantities shared by the unstructured closed forms.
struct SmwParts {
    eps: f64,
    /// first block of `r₀`
    r0v: CVector,
    /// conjugate of the second block of `r₀`
    r0u: CVector,
    abc: Abc,
    /// `γ₁, γ₂`
    gamma: (C64, C64),
    /// `(γ₁ − γ₂) / ε`, formed without the division
    gamma_gap: C64,
}

fn smw_parts(frame: &Frame, a: &CMatrix, reg: &Regularization) -> SmwParts {
    let n = frame.n();
    let eps = reg.eps;
    let u = frame.u();
    let v = frame.v();
    let y_v = reg.y_v(n);
    let y_u = reg.y_u(n);
    let av = a * &v;
    let ahu = a.adjoint() * &u;
    let r0v = -&av - &y_v * c64(eps, 0.0);
    let r0u = -&ahu - &y_u * c64(eps, 0.0);

    let alpha = r0v.norm_squared() + r0u.norm_squared();
    let beta = v.dotc(&r0v) + r0u.dotc(&u);
    // γ₁ = uᴴAv + ε y_uᴴv, γ₂ = uᴴAv + ε uᴴy_v; the common part is
    // symmetrized so that y = 0 gives γ₁ = γ₂ exactly.
    let g_common = (u.dotc(&av) + ahu.dotc(&v)) * 0.5;
    let gamma_gap = y_u.dotc(&v) - u.dotc(&y_v);
    let gamma1 = g_common + y_u.dotc(&v) * eps;
    let gamma2 = g_common + u.dotc(&y_v) * eps;

    let cp = 1.0 + eps;
    let a_coef = 2.0 / cp;
    let b_coef = beta / cp;
    // [ε(γ̄₁γ₂ + γ̄₂γ₁) − |γ₁ − γ₂|²] / [ε(1+ε)(2+ε)] with the ε cancelled
    let cross = 2.0 * (gamma1.conj() * gamma2).re - eps * gamma_gap.norm_sqr();
    let c_coef = alpha / cp - cross / (cp * (2.0 + eps));
    SmwParts {
        eps,
        r0v,
        r0u,
        abc: Abc {
            a: a_coef,
            b: b_coef,
            c: c_coef,
        },
        gamma: (gamma1, gamma2),
        gamma_gap,
    }
}

fn structured_abc(
    frame: &Frame,
    a: &CMatrix,
    s: &StructureSubspace,
    reg: &Regularization,
) -> Result<(CMatrix, RegularizedInverse, Residuals, CVector, CVector, Abc)> {
    let m = assemble_m(frame, s)?;
    let mut h = &m * m.adjoint();
    for i in 0..h.nrows() {
        h[(i, i)] += c64(reg.eps, 0.0);
    }
    let inv = RegularizedInverse::new(&h, reg.eps)?;
    let res = assemble_r(frame, c64(0.0, 0.0), a, reg)?;
    let w1 = inv.solve(&res.r1);
    let w0 = inv.solve(&res.r0);
    let abc = Abc {
        a: res.r1.dotc(&w1).re,
        b: res.r1.dotc(&w0),
        c: res.r0.dotc(&w0).re,
    };
    Ok((m, inv, res, w0, w1, abc))
}

/// Coefficients `a, b, c`; closed forms for the full space, two solves with
/// the factored `M M* + εI` otherwise.
pub fn abc(frame: &Frame, a: &CMatrix, s: &StructureSubspace, reg: &Regularization) -> Result<Abc> {
    check_inputs(frame, a, s)?;
    reg.check(frame.n())?;
    if s.is_full() {
        Ok(smw_parts(frame, a, reg).abc)
    } else {
        Ok(structured_abc(frame, a, s, reg)?.5)
    }
}

/// Euclidean gradient `2 [(λ*I − A − Δ*) z_u , (λ*I − A − Δ*)* z_v]`.
pub fn euclid_gradient(eval: &ObjectiveEval, a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut bmat = -a - &eval.delta;
    for i in 0..n {
        bmat[(i, i)] += eval.lambda;
    }
    let gu = &bmat * eval.z_u() * c64(2.0, 0.0);
    let gv = bmat.adjoint() * eval.z_v() * c64(2.0, 0.0);
    let mut g = CMatrix::zeros(n, 2);
    g.set_column(0, &gu);
    g.set_column(1, &gv);
    g
}

/// Evaluate `f_{ε,y}` at a frame, with the minimizing `λ*`, `Δ*` and the
/// Euclidean gradient.
pub fn evaluate(frame: &Frame, a: &CMatrix, s: &StructureSubspace, reg: &Regularization) -> Result<ObjectiveEval> {
    check_inputs(frame, a, s)?;
    reg.check(frame.n())?;
    let (frame, reorthonormalized) = if frame.orthonormality_error() > FRAME_ORTHONORMALITY_TOL {
        (Frame::orthonormalize(frame.matrix())?, true)
    } else {
        (frame.clone(), false)
    };
    let mut eval = if s.is_full() {
        evaluate_unstructured(&frame, a, reg)?
    } else {
        evaluate_structured(&frame, a, s, reg)?
    };
    eval.reorthonormalized = reorthonormalized;
    Ok(eval)
}

fn evaluate_unstructured(frame: &Frame, a: &CMatrix, reg: &Regularization) -> Result<ObjectiveEval> {
    let u = frame.u();
    let v = frame.v();
    let p = smw_parts(frame, a, reg);
    let lambda = optimal_lambda(&p.abc)?;
    let eps = p.eps;
    let cp = 1.0 + eps;
    let (g1, g2) = p.gamma;
    // η₁ = ((1+ε)γ₁ − γ₂)/(ε(2+ε)), η₂ = ((1+ε)γ₂ − γ₁)/(ε(2+ε))
    let eta1 = (p.gamma_gap + g1) / (2.0 + eps);
    let eta2 = (g2 - p.gamma_gap) / (2.0 + eps);

    let rv = &v * lambda + &p.r0v;
    let ru = &u * lambda.conj() + &p.r0u;
    let zv = (&rv + &u * eta1) / c64(cp, 0.0);
    let zu = (&ru + &v * eta2.conj()) / c64(cp, 0.0);
    let value = rv.dotc(&zv).re + ru.dotc(&zu).re;

    let delta = &zv * v.adjoint() + &u * zu.adjoint();
    let z = stack(&zv, &zu);
    let delta_coords = CVector::from_column_slice(delta.as_slice());
    let mut eval = ObjectiveEval {
        abc: p.abc,
        lambda,
        value,
        z,
        delta_coords,
        delta,
        euclid_grad: CMatrix::zeros(0, 0),
        reorthonormalized: false,
    };
    eval.euclid_grad = euclid_gradient(&eval, a);
    Ok(eval)
}

fn evaluate_structured(
    frame: &Frame,
    a: &CMatrix,
    s: &StructureSubspace,
    reg: &Regularization,
) -> Result<ObjectiveEval> {
    let (m, inv, res, w0, w1, abc) = structured_abc(frame, a, s, reg)?;
    let lambda = optimal_lambda(&abc)?;
    let r = &res.r1 * lambda + &res.r0;
    // a third solve is more accurate near the solution than λ w₁ + w₀
    let z = if matches!(inv, RegularizedInverse::Cholesky(_)) {
        inv.solve(&r)
    } else {
        &w1 * lambda + &w0
    };
    let value = r.dotc(&z).re;
    let delta_coords = m.adjoint() * &z;
    let delta = s.combine(&delta_coords)?;
    let mut eval = ObjectiveEval {
        abc,
        lambda,
        value,
        z,
        delta_coords,
        delta,
        euclid_grad: CMatrix::zeros(0, 0),
        reorthonormalized: false,
    };
    eval.euclid_grad = euclid_gradient(&eval, a);
    Ok(eval)
}

/// Unregularized (`ε = 0`, `y = 0`) minimum-norm perturbation at a fixed
/// frame and eigenvalue.
#[derive(Debug, Clone)]
pub struct ExactProjection {
    pub delta: CMatrix,
    pub delta_coords: CVector,
    pub feasible: bool,
    /// Least-squares residual `‖M δ − r‖`.
    pub residual: f64,
}

pub fn exact_projection(frame: &Frame, lambda: C64, a: &CMatrix, s: &StructureSubspace) -> Result<ExactProjection> {
    check_inputs(frame, a, s)?;
    let n = frame.n();
    let u = frame.u();
    let v = frame.v();
    let mut b = -a.clone();
    for i in 0..n {
        b[(i, i)] += lambda;
    }
    if s.is_full() {
        // Δ = B v v* + u u* B − (u* B v) u v*
        let bv = &b * &v;
        let bhu = b.adjoint() * &u;
        let corner = u.dotc(&bv);
        let delta = &bv * v.adjoint() + &u * bhu.adjoint() - &u * v.adjoint() * corner;
        let delta_coords = CVector::from_column_slice(delta.as_slice());
        return Ok(ExactProjection {
            delta,
            delta_coords,
            feasible: true,
            residual: 0.0,
        });
    }
    let m = assemble_m(frame, s)?;
    let r = stack(&(&b * &v), &(b.adjoint() * &u));
    let lsq = linalg::min_norm_lsq(&m, &r)?;
    let delta = s.combine(&lsq.solution)?;
    Ok(ExactProjection {
        delta,
        delta_coords: lsq.solution,
        feasible: lsq.feasible,
        residual: lsq.residual,
    })
}

/// Eigenvalue minimizing the unregularized residual at a fixed frame.
///
/// Full space: `(v*Av + u*Au)/2`. Structured: minimizer of the component
/// of `r(λ)` outside `Im M`, or of `r(λ)* (M M*)⁺ r(λ)` when `r₁ ∈ Im M`.
pub fn exact_lambda(frame: &Frame, a: &CMatrix, s: &StructureSubspace) -> Result<C64> {
    check_inputs(frame, a, s)?;
    let u = frame.u();
    let v = frame.v();
    if s.is_full() {
        return Ok((v.dotc(&(a * &v)) + u.dotc(&(a * &u))) * 0.5);
    }
    let m = assemble_m(frame, s)?;
    let svd = linalg::svd(&m)?;
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = top * f64::EPSILON * (m.nrows().max(m.ncols())) as f64;
    let rank = svd.singular_values.iter().filter(|&&x| x > cut).count();
    let ur = svd.u.columns(0, rank);
    let zero = Regularization::penalty(frame.n(), 1.0)?;
    let res = assemble_r(frame, c64(0.0, 0.0), a, &zero)?;
    let perp = |x: &CVector| x - ur * (ur.adjoint() * x);
    let p1 = perp(&res.r1);
    let p0 = perp(&res.r0);
    if p1.norm_squared() > 1e-20 * res.r1.norm_squared() {
        return Ok(-p1.dotc(&p0) / p1.norm_squared());
    }
    // r₁ lies in the range: minimize the pseudoinverse-weighted norm
    let weights = svd.singular_values.rows(0, rank).map(|x| 1.0 / (x * x));
    let c1 = ur.adjoint() * &res.r1;
    let c0 = ur.adjoint() * &res.r0;
    let mut aa = 0.0;
    let mut bb = c64(0.0, 0.0);
    for k in 0..rank {
        aa += weights[k] * c1[k].norm_sqr();
        bb += c1[k].conj() * c0[k] * weights[k];
    }
    optimal_lambda(&Abc { a: aa, b: bb, c: 0.0 })
}

/// Eigenvalues (ascending) of `M M*` for the full space, assembled from its
/// rank-2 structure `I + [[0, u vᵀ], [v̄ u*, 0]]`.
pub fn mm_star_spectrum(frame: &Frame) -> Vec<f64> {
    let n = frame.n();
    let u = frame.u();
    let v = frame.v();
    let mut h = CMatrix::identity(2 * n, 2 * n);
    let uvt = &u * v.transpose();
    h.view_mut((0, n), (n, n)).copy_from(&uvt);
    h.view_mut((n, 0), (n, n)).copy_from(&uvt.adjoint());
    let mut w: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().cloned().collect();
    w.sort_by(|x, y| x.partial_cmp(y).unwrap());
    w
}

/// `‖[(A + Δ − λI) v ; (A + Δ − λI)ᵀ ū]‖`.
pub fn constraint_residual(frame: &Frame, lambda: C64, a: &CMatrix, delta: &CMatrix) -> f64 {
    constraint_vector(frame, lambda, a, delta).norm()
}

/// `[(A + Δ − λI) v ; (A + Δ − λI)ᵀ ū]`.
pub fn constraint_vector(frame: &Frame, lambda: C64, a: &CMatrix, delta: &CMatrix) -> CVector {
    let n = frame.n();
    let mut k = a + delta;
    for i in 0..n {
        k[(i, i)] -= lambda;
    }
    stack(&(&k * frame.v()), &(k.adjoint() * frame.u()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::{custom_space, full_space, toeplitz_space, CompanionForm};
    use crate::testutil::{random_frame, random_matrix, rng};
    use std::f64::consts::{FRAC_PI_4, PI};

    fn param_frame(t: f64, theta: f64) -> Frame {
        let e = C64::from_polar(1.0, theta);
        let u = CVector::from_column_slice(&[c64(t.cos(), 0.0), -e * t.sin()]);
        let v = CVector::from_column_slice(&[c64(t.sin(), 0.0), e * t.cos()]);
        Frame::from_vectors(&u, &v).unwrap()
    }

    fn units(n: usize) -> StructureSubspace {
        let gens: Vec<CMatrix> = (0..n)
            .flat_map(|j| {
                (0..n).map(move |i| {
                    let mut m = CMatrix::zeros(n, n);
                    m[(i, j)] = c64(1.0, 0.0);
                    m
                })
            })
            .collect();
        custom_space(&gens).unwrap()
    }

    #[test]
    fn assemble_m_companion_example() {
        let (t, theta) = (0.7, 0.3);
        let f = param_frame(t, theta);
        let s = crate::subspace::companion_space(2, CompanionForm::FirstRow).unwrap();
        let m = assemble_m(&f, &s).unwrap();
        // the (1,2) entry is v₂ = e^{iθ} cos t, consistent with the displayed r
        let e = C64::from_polar(1.0, theta);
        let expect = CMatrix::from_row_slice(
            4,
            2,
            &[
                c64(t.sin(), 0.0),
                e * t.cos(),
                c64(0.0, 0.0),
                c64(0.0, 0.0),
                c64(t.cos(), 0.0),
                c64(0.0, 0.0),
                c64(0.0, 0.0),
                c64(t.cos(), 0.0),
            ],
        );
        assert!((m - expect).norm() < 1e-15);
    }

    #[test]
    fn assemble_m_single_unit_and_random_action() {
        let mut g = rng(1);
        let f = random_frame(&mut g, 4);
        let mut mask = vec![vec![false; 4]; 4];
        mask[0][0] = true;
        let s = crate::subspace::pattern_space(&mask).unwrap();
        let m = assemble_m(&f, &s).unwrap();
        let mut expect = CMatrix::zeros(8, 1);
        expect[(0, 0)] = f.v()[0];
        expect[(4, 0)] = f.u()[0].conj();
        assert_eq!(m, expect);

        let s = toeplitz_space(4).unwrap();
        let m = assemble_m(&f, &s).unwrap();
        let delta = random_matrix(&mut g, s.dim(), 1).column(0).into_owned();
        let d = s.combine(&delta).unwrap();
        let direct = stack(&(&d * f.v()), &(d.adjoint() * f.u()));
        assert!((m * delta - direct).norm() < 1e-13);
    }

    #[test]
    fn assemble_r_examples() {
        let mut g = rng(2);
        let f = random_frame(&mut g, 3);
        let zero = CMatrix::zeros(3, 3);
        let reg = Regularization::penalty(3, 0.1).unwrap();
        let res = assemble_r(&f, c64(1.0, 0.0), &zero, &reg).unwrap();
        assert!((res.r - stack(&f.v(), &f.u())).norm() < 1e-15);
        assert!((res.r1.norm_squared() - 2.0).abs() < 1e-14);

        let (t, theta, lam) = (0.4, 1.1, c64(0.3, -0.2));
        let f = param_frame(t, theta);
        let a = crate::gallery::diag_one_zero();
        let res = assemble_r(&f, lam, &a, &Regularization::penalty(2, 1.0).unwrap()).unwrap();
        let e = C64::from_polar(1.0, theta);
        let expect = CVector::from_column_slice(&[
            (lam - 1.0) * t.sin(),
            lam * e * t.cos(),
            (lam - 1.0) * t.cos(),
            -lam * e.conj() * t.sin(),
        ]);
        assert!((&res.r - expect).norm() < 1e-15);

        // the multiplier enters as −εy
        let y = random_matrix(&mut g, 4, 1).column(0).into_owned();
        let r_small = assemble_r(&f, lam, &a, &Regularization::new(1e-15, y).unwrap()).unwrap();
        assert!((r_small.r - &res.r).norm() < 1e-14);
    }

    #[test]
    fn diag_example_abc() {
        let a = crate::gallery::diag_one_zero();
        let s = full_space(2).unwrap();
        for &(t, theta, eps) in &[(0.3, 0.0, 1.0), (1.2, 2.0, 0.1), (FRAC_PI_4, 0.5, 1e-3)] {
            let f = param_frame(t, theta);
            let reg = Regularization::penalty(2, eps).unwrap();
            let abc = abc(&f, &a, &s, &reg).unwrap();
            assert!((abc.a - 2.0 / (1.0 + eps)).abs() < 1e-14);
            assert!((abc.b - c64(-1.0 / (1.0 + eps), 0.0)).norm() < 1e-14);
            let c = (7.0 + (4.0 * t).cos() + 4.0 * eps) / (8.0 + 12.0 * eps + 4.0 * eps * eps);
            assert!((abc.c - c).abs() < 1e-14);
            assert!((optimal_lambda(&abc).unwrap() - c64(0.5, 0.0)).norm() < 1e-14);
            // generic path
            let g = super::abc(&f, &a, &units(2), &reg).unwrap();
            assert!((g.a - abc.a).abs() < 1e-12 && (g.b - abc.b).norm() < 1e-12 && (g.c - abc.c).abs() < 1e-12);
        }
    }

    #[test]
    fn diag_example_limit_value() {
        let a = crate::gallery::diag_one_zero();
        let s = full_space(2).unwrap();
        for &t in &[FRAC_PI_4, 0.2, 1.0] {
            let f = param_frame(t, 0.0);
            let reg = Regularization::penalty(2, 1e-13).unwrap();
            let e = evaluate(&f, &a, &s, &reg).unwrap();
            let expect = ((4.0 * t).cos() + 3.0) / 8.0;
            assert!((e.value - expect).abs() < 1e-10, "t={t}: {} vs {expect}", e.value);
        }
        let f = param_frame(FRAC_PI_4, 0.0);
        let e = evaluate(&f, &a, &s, &Regularization::penalty(2, 1e-13).unwrap()).unwrap();
        assert!((e.value - 0.25).abs() < 1e-10);
    }

    #[test]
    fn optimal_lambda_examples() {
        let l = optimal_lambda(&Abc { a: 2.0, b: c64(0.0, 0.0), c: 1.0 }).unwrap();
        assert_eq!(l, c64(0.0, 0.0));
        assert!(optimal_lambda(&Abc { a: 0.0, b: c64(1.0, 0.0), c: 1.0 }).is_err());
    }

    #[test]
    fn structured_matches_unstructured_on_full_basis() {
        let mut g = rng(3);
        for n in [2, 3, 5] {
            let a = random_matrix(&mut g, n, n);
            let f = random_frame(&mut g, n);
            let y = random_matrix(&mut g, 2 * n, 1).column(0).into_owned();
            for eps in [1.0, 0.5, 1e-3] {
                let reg = Regularization::new(eps, y.clone()).unwrap();
                let fast = evaluate(&f, &a, &full_space(n).unwrap(), &reg).unwrap();
                let slow = evaluate(&f, &a, &units(n), &reg).unwrap();
                let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
                assert!(rel(fast.value, slow.value) < 1e-10);
                assert!((fast.lambda - slow.lambda).norm() < 1e-10 * slow.lambda.norm().max(1.0));
                assert!((&fast.delta - &slow.delta).norm() < 1e-10 * slow.delta.norm().max(1.0));
                assert!((&fast.euclid_grad - &slow.euclid_grad).norm() < 1e-10 * slow.euclid_grad.norm().max(1.0));
                assert!(rel(fast.abc.minimum(), fast.value) < 1e-10);
            }
        }
    }

    #[test]
    fn planted_point_closed_forms() {
        let mut g = rng(4);
        let n = 5;
        let (lam, d) = (c64(0.3, -1.2), 0.7);
        let (a, f) = crate::testutil::planted(&mut g, n, lam, d);
        for eps in [1.0, 0.1, 1e-4] {
            let e = evaluate(&f, &a, &full_space(n).unwrap(), &Regularization::penalty(n, eps).unwrap()).unwrap();
            let expect = &f.u() * f.v().adjoint() * c64(-2.0 / (2.0 + eps) * d, 0.0);
            assert!((&e.delta - &expect).norm() < 1e-12);
            let k = 2.0 * d * d * eps / ((2.0 + eps) * (2.0 + eps));
            assert!((e.euclid_grad.column(0) - f.u() * c64(k, 0.0)).norm() < 1e-12);
            assert!((e.euclid_grad.column(1) - f.v() * c64(k, 0.0)).norm() < 1e-12);
            assert!((e.lambda - lam).norm() < 1e-12);
        }
    }

    #[test]
    fn gradient_vanishes_for_scalar_matrix() {
        let n = 4;
        let mut g = rng(5);
        let f = random_frame(&mut g, n);
        let a = CMatrix::identity(n, n) * c64(2.0, -1.0);
        let e = evaluate(&f, &a, &full_space(n).unwrap(), &Regularization::penalty(n, 0.3).unwrap()).unwrap();
        assert!(e.euclid_grad.norm() < 1e-14);
        assert!(e.value.abs() < 1e-28);
        assert!((e.lambda - c64(2.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn exact_projection_examples() {
        // companion example, θ = 0, λ = tan t
        let a = crate::gallery::companion_example();
        let s = crate::subspace::companion_space(2, CompanionForm::FirstRow).unwrap();
        for &t in &[0.3, 0.45, -0.8] {
            let f = param_frame(t, 0.0);
            let p = exact_projection(&f, c64(t.tan(), 0.0), &a, &s).unwrap();
            assert!(p.feasible);
            // basis order is (1,1), (1,2): coordinates are M⁺r directly
            assert!((p.delta_coords[0] - c64(2.0 * t.tan() - 1.0, 0.0)).norm() < 1e-12);
            assert!((p.delta_coords[1] - c64(-t.tan().powi(2), 0.0)).norm() < 1e-12);
        }
        let f = param_frame(PI / 2.0, 0.0);
        let p = exact_projection(&f, c64(0.2, 0.0), &a, &s).unwrap();
        assert!(!p.feasible);

        // unstructured 4×4 with u = e1, v = e2
        let mut g = rng(6);
        let a = random_matrix(&mut g, 4, 4);
        let lam = c64(0.4, 0.1);
        let mut x = CMatrix::zeros(4, 2);
        x[(0, 0)] = c64(1.0, 0.0);
        x[(1, 1)] = c64(1.0, 0.0);
        let f = Frame::new(x).unwrap();
        let p = exact_projection(&f, lam, &a, &full_space(4).unwrap()).unwrap();
        let b = CMatrix::identity(4, 4) * lam - &a;
        let mut expect = CMatrix::zeros(4, 4);
        for j in 0..4 {
            expect[(0, j)] = b[(0, j)];
            expect[(j, 1)] = b[(j, 1)];
        }
        assert!((&p.delta - &expect).norm() < 1e-14);
        assert!(constraint_residual(&f, lam, &a, &p.delta) < 1e-14);
        // the generic path agrees
        let q = exact_projection(&f, lam, &a, &units(4)).unwrap();
        assert!(q.feasible);
        assert!((&q.delta - &expect).norm() < 1e-12);
    }

    #[test]
    fn spectrum_of_mm_star() {
        let mut g = rng(7);
        for n in [2, 4] {
            let f = random_frame(&mut g, n);
            let w = mm_star_spectrum(&f);
            assert!(w[0].abs() < 1e-12);
            assert!((w[2 * n - 1] - 2.0).abs() < 1e-12);
            for &x in &w[1..2 * n - 1] {
                assert!((x - 1.0).abs() < 1e-12);
            }
            assert!((w.iter().sum::<f64>() - 2.0 * n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn drifted_frame_is_reorthonormalized() {
        let mut g = rng(8);
        let f = random_frame(&mut g, 3);
        let drifted = Frame::from_matrix_unchecked(f.matrix() * c64(1.0 + 1e-6, 0.0)).unwrap();
        let a = random_matrix(&mut g, 3, 3);
        let e = evaluate(&drifted, &a, &full_space(3).unwrap(), &Regularization::penalty(3, 0.5).unwrap()).unwrap();
        assert!(e.reorthonormalized);
        let e0 = evaluate(&f, &a, &full_space(3).unwrap(), &Regularization::penalty(3, 0.5).unwrap()).unwrap();
        assert!(!e0.reorthonormalized);
        assert!((e.value - e0.value).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut g = rng(9);
        let f = random_frame(&mut g, 3);
        let a = random_matrix(&mut g, 3, 3);
        assert!(Regularization::penalty(3, 0.0).is_err());
        assert!(Regularization::penalty(3, -1.0).is_err());
        let bad = Regularization { eps: 0.0, y: CVector::zeros(6) };
        assert!(matches!(abc(&f, &a, &full_space(3).unwrap(), &bad), Err(Error::Parameter(_))));
        assert!(evaluate(&f, &random_matrix(&mut g, 4, 4), &full_space(3).unwrap(), &Regularization::penalty(3, 1.0).unwrap()).is_err());
        assert!(Frame::new(random_matrix(&mut g, 3, 2)).is_err());
    }
}
