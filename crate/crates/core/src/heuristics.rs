//! Starting points: eigenvalue condition numbers, coalescence scores and the
//! initial frame from the smallest singular pair of `A − λ₀I`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMatrix, C64};
use crate::objective::Frame;

/// `|y*x|` below this is treated as a defective eigenvalue (`p = ∞`).
pub const DEFECTIVE_TOL: f64 = 1e-14;
/// Relative shift of `λ₀` used when `u_n` and `v_n` are parallel.
pub const LAMBDA0_NUDGE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenInfo {
    pub lambda: C64,
    /// Condition number `1/|y*x|` for unit right/left eigenvectors.
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoalescenceCandidate {
    pub j: usize,
    pub k: usize,
    pub s: f64,
    pub lambda0: C64,
}

pub fn eig_condition_numbers(a: &CMatrix) -> Result<Vec<EigenInfo>> {
    let e = linalg::eig(a)?;
    Ok((0..e.values.len())
        .map(|j| {
            let overlap = e.left.column(j).dotc(&e.right.column(j)).norm();
            let p = if overlap < DEFECTIVE_TOL { f64::INFINITY } else { 1.0 / overlap };
            EigenInfo {
                lambda: e.values[j],
                p,
            }
        })
        .collect())
}

fn score(x: &EigenInfo, y: &EigenInfo) -> (f64, C64) {
    let gap = (x.lambda - y.lambda).norm();
    match (x.p.is_finite(), y.p.is_finite()) {
        (true, true) => {
            let w = x.p + y.p;
            (gap / w, (x.lambda * y.p + y.lambda * x.p) / w)
        }
        // the weight on the other eigenvalue dominates
        (false, true) => (0.0, y.lambda),
        (true, false) => (0.0, x.lambda),
        (false, false) => (0.0, (x.lambda + y.lambda) * 0.5),
    }
}

/// Rank all pairs by `s_jk = |λ_j − λ_k| / (p_j + p_k)` and keep the
/// `top_m` smallest; ties are broken by `(j, k)`.
pub fn candidates_from_info(info: &[EigenInfo], top_m: usize) -> Vec<CoalescenceCandidate> {
    let mut all = Vec::new();
    for j in 0..info.len() {
        for k in j + 1..info.len() {
            let (s, lambda0) = score(&info[j], &info[k]);
            all.push(CoalescenceCandidate { j, k, s, lambda0 });
        }
    }
    all.sort_by(|x, y| x.s.total_cmp(&y.s).then((x.j, x.k).cmp(&(y.j, y.k))));
    all.truncate(top_m);
    all
}

pub fn coalescence_candidates(a: &CMatrix, top_m: usize) -> Result<Vec<CoalescenceCandidate>> {
    if a.nrows() < 2 {
        return Err(Error::Dimension(format!("need n ≥ 2, got {}", a.nrows())));
    }
    Ok(candidates_from_info(&eig_condition_numbers(a)?, top_m))
}

/// Q factor of `[u_n, v_n]`, the singular vectors of the smallest singular
/// value of `A − λ₀I`. If they are parallel, retries once with a nudged
/// `λ₀`, then falls back to `[u_n + u_{n−1}, v_n + v_{n−1}]`.
pub fn initial_frame(a: &CMatrix, lambda0: C64) -> Result<Frame> {
    if !a.is_square() || a.nrows() < 2 {
        return Err(Error::Dimension(format!("need square A with n ≥ 2, got {:?}", a.shape())));
    }
    match frame_at(a, lambda0) {
        Err(Error::Rank(_)) => {
            let nudge = LAMBDA0_NUDGE * a.norm().max(1.0);
            match frame_at(a, lambda0 + c64(nudge, 0.0)) {
                Err(Error::Rank(_)) => mixed_frame_at(a, lambda0),
                other => other,
            }
        }
        other => other,
    }
}

fn shifted_svd(a: &CMatrix, lambda0: C64) -> Result<linalg::Svd> {
    let mut shifted = a.clone();
    for i in 0..a.nrows() {
        shifted[(i, i)] -= lambda0;
    }
    linalg::svd(&shifted)
}

fn mixed_frame_at(a: &CMatrix, lambda0: C64) -> Result<Frame> {
    let n = a.nrows();
    let svd = shifted_svd(a, lambda0)?;
    let mut x = CMatrix::zeros(n, 2);
    x.set_column(0, &(svd.u.column(n - 1) + svd.u.column(n - 2)));
    x.set_column(1, &(svd.v.column(n - 1) + svd.v.column(n - 2)));
    Frame::orthonormalize(&x)
}

fn frame_at(a: &CMatrix, lambda0: C64) -> Result<Frame> {
    let n = a.nrows();
    let svd = shifted_svd(a, lambda0)?;
    let mut x = CMatrix::zeros(n, 2);
    x.set_column(0, &svd.u.column(n - 1));
    x.set_column(1, &svd.v.column(n - 1));
    Frame::orthonormalize(&x)
}
