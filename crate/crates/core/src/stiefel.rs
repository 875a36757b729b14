//! Geometry of the complex Stiefel manifold `V₂(Cⁿ)` with the real metric
//! `⟨ξ, η⟩ = Re tr(ξ* η)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMatrix};
use crate::objective::Frame;
use crate::random::{gaussian_matrix, Rng};

/// Retraction used to map tangent steps back onto the manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Retraction {
    #[default]
    Qr,
    Polar,
}

/// Real inner product `Re tr(ξ* η)`.
pub fn inner(xi: &CMatrix, eta: &CMatrix) -> f64 {
    xi.iter().zip(eta.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

/// `Z − X herm(X* Z)`.
pub fn tangent_project(frame: &Frame, z: &CMatrix) -> Result<CMatrix> {
    let x = frame.matrix();
    if z.shape() != x.shape() {
        return Err(Error::Dimension(format!(
            "ambient vector is {:?}, frame is {:?}",
            z.shape(),
            x.shape()
        )));
    }
    let xz = x.adjoint() * z;
    Ok(z - x * linalg::hermitian_part(&xz))
}

/// Riemannian gradient from the Euclidean one.
pub fn riemannian_gradient(frame: &Frame, euclid: &CMatrix) -> Result<CMatrix> {
    tangent_project(frame, euclid)
}

/// `R_X(ξ)`: Q factor of `X + ξ` (positive diagonal of R) or its polar factor.
pub fn retract(frame: &Frame, xi: &CMatrix, kind: Retraction) -> Result<Frame> {
    let y = frame.matrix() + xi;
    if !linalg::is_finite(&y) {
        return Err(Error::Retraction("retraction input has non-finite entries".into()));
    }
    let q = match kind {
        Retraction::Qr => linalg::thin_qr(&y)
            .map_err(|e| Error::Retraction(format!("QR of X + ξ failed: {e}")))?
            .0,
        Retraction::Polar => {
            let svd = linalg::svd(&y).map_err(|e| Error::Retraction(e.to_string()))?;
            if svd.sigma_min() <= linalg::QR_RANK_RTOL * y.norm() {
                return Err(Error::Retraction("X + ξ is rank deficient".into()));
            }
            &svd.u * svd.v.adjoint()
        }
    };
    Frame::from_matrix_unchecked(q)
}

/// Haar-distributed frame: Q factor of a complex Gaussian `n×2` matrix.
pub fn random_frame(rng: &mut Rng, n: usize) -> Result<Frame> {
    if n < 2 {
        return Err(Error::Dimension(format!("frames need n ≥ 2, got {n}")));
    }
    loop {
        let g = gaussian_matrix(rng, n, 2);
        if let Ok(f) = Frame::orthonormalize(&g) {
            return Ok(f);
        }
    }
}

/// Random unit tangent vector at a frame.
pub fn random_tangent(rng: &mut Rng, frame: &Frame) -> Result<CMatrix> {
    let g = gaussian_matrix(rng, frame.n(), 2);
    let t = tangent_project(frame, &g)?;
    let norm = inner(&t, &t).sqrt();
    Ok(t / c64(norm, 0.0))
}
