//! Inner minimization of `f_{ε,y}` over `V₂(Cⁿ)` at fixed `(ε, y)`.

use crate::error::Result;
use crate::linalg::{c64, CMatrix};
use crate::objective::{evaluate, Frame, ObjectiveEval, Regularization};
use crate::stiefel::{inner, retract, riemannian_gradient, tangent_project, Retraction};
use crate::subspace::StructureSubspace;

use super::{InnerSolver, SolverConfig};

const ARMIJO_SLOPE: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 50;
const BB_STEP_MIN: f64 = 1e-12;
const BB_STEP_MAX: f64 = 1e12;
const TR_ACCEPT: f64 = 0.1;
const TR_SHRINK_BELOW: f64 = 0.25;
const TR_EXPAND_ABOVE: f64 = 0.75;
const TCG_KAPPA: f64 = 0.1;
const TCG_THETA: f64 = 1.0;
const FD_STEP: f64 = 1.0 / 16384.0;
/// Consecutive rejected trust-region steps tolerated before giving up.
const TR_MAX_REJECTS: usize = 40;

/// Outcome of one inner solve.
#[derive(Debug, Clone)]
pub struct InnerOutcome {
    pub frame: Frame,
    pub eval: ObjectiveEval,
    pub grad: CMatrix,
    pub gradnorm: f64,
    pub iters: usize,
    /// The line search or trust region could not make progress.
    pub stagnated: bool,
}

pub(crate) struct Problem<'a> {
    pub a: &'a CMatrix,
    pub s: &'a StructureSubspace,
    pub reg: &'a Regularization,
    pub retraction: Retraction,
}

impl Problem<'_> {
    fn eval(&self, x: &Frame) -> Result<(ObjectiveEval, CMatrix)> {
        let e = evaluate(x, self.a, self.s, self.reg)?;
        let g = riemannian_gradient(x, &e.euclid_grad)?;
        Ok((e, g))
    }
}

fn norm(x: &CMatrix) -> f64 {
    inner(x, x).sqrt()
}

/// Minimize `f_{ε,y}` from `x0`; stops at `gradnorm ≤ tolgradnorm`, the
/// iteration cap, a value below `floor`, or stagnation.
pub fn inner_minimize(
    a: &CMatrix,
    s: &StructureSubspace,
    reg: &Regularization,
    x0: &Frame,
    cfg: &SolverConfig,
    floor: f64,
) -> Result<InnerOutcome> {
    let problem = Problem {
        a,
        s,
        reg,
        retraction: cfg.retraction,
    };
    match cfg.inner {
        InnerSolver::GradientDescent => gradient_descent(&problem, x0, cfg, floor),
        InnerSolver::TrustRegion => trust_region(&problem, x0, cfg, floor),
    }
}

fn gradient_descent(p: &Problem, x0: &Frame, cfg: &SolverConfig, floor: f64) -> Result<InnerOutcome> {
    let mut x = x0.clone();
    let (mut e, mut g) = p.eval(&x)?;
    let mut gn = norm(&g);
    let mut step = 1.0 / gn.max(1.0);
    let mut iters = 0;
    let mut stagnated = false;
    while iters < cfg.max_inner_iters && gn > cfg.tolgradnorm && e.value > floor {
        let mut t = step;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let xi = &g * c64(-t, 0.0);
            if let Ok(xn) = retract(&x, &xi, p.retraction) {
                let (en, gnew) = p.eval(&xn)?;
                if en.value <= e.value - ARMIJO_SLOPE * t * gn * gn {
                    accepted = Some((xn, en, gnew));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((xn, en, gnew)) = accepted else {
            stagnated = true;
            break;
        };
        // Barzilai–Borwein with vectors carried to the new tangent space
        let s_vec = tangent_project(&xn, &(&g * c64(-t, 0.0)))?;
        let y_vec = &gnew - tangent_project(&xn, &g)?;
        let sy = inner(&s_vec, &y_vec);
        step = if sy > 0.0 {
            let bb = if iters % 2 == 0 {
                inner(&s_vec, &s_vec) / sy
            } else {
                sy / inner(&y_vec, &y_vec)
            };
            bb.clamp(BB_STEP_MIN, BB_STEP_MAX)
        } else {
            (2.0 * t).min(BB_STEP_MAX)
        };
        x = xn;
        e = en;
        g = gnew;
        gn = norm(&g);
        iters += 1;
    }
    Ok(InnerOutcome {
        frame: x,
        eval: e,
        grad: g,
        gradnorm: gn,
        iters,
        stagnated,
    })
}

/// Finite-difference Hessian-vector product along the retraction.
fn hess_vec(p: &Problem, x: &Frame, g: &CMatrix, eta: &CMatrix) -> Result<CMatrix> {
    let en = norm(eta);
    if en == 0.0 {
        return Ok(CMatrix::zeros(g.nrows(), 2));
    }
    let h = FD_STEP / en;
    let xh = retract(x, &(eta * c64(h, 0.0)), p.retraction)?;
    let (_, gh) = p.eval(&xh)?;
    let diff = (tangent_project(x, &gh)? - g) / c64(h, 0.0);
    tangent_project(x, &diff)
}

/// Steihaug–Toint truncated conjugate gradients. Returns the step, its
/// Hessian image and whether it reached the boundary.
fn truncated_cg(p: &Problem, x: &Frame, g: &CMatrix, radius: f64, max_iters: usize) -> Result<(CMatrix, CMatrix, bool)> {
    let shape = g.shape();
    let mut eta = CMatrix::zeros(shape.0, shape.1);
    let mut h_eta = CMatrix::zeros(shape.0, shape.1);
    let mut r = g.clone();
    let mut r_r = inner(&r, &r);
    let r0 = r_r.sqrt();
    let target = r0 * r0.powf(TCG_THETA).min(TCG_KAPPA);
    let mut delta = -r.clone();
    for _ in 0..max_iters {
        let hd = hess_vec(p, x, g, &delta)?;
        let d_hd = inner(&delta, &hd);
        let alpha = r_r / d_hd;
        let e_e = inner(&eta, &eta);
        let e_d = inner(&eta, &delta);
        let d_d = inner(&delta, &delta);
        let new_norm_sq = e_e + 2.0 * alpha * e_d + alpha * alpha * d_d;
        if d_hd <= 0.0 || new_norm_sq >= radius * radius {
            // step to the boundary along delta
            let tau = (-e_d + (e_d * e_d + d_d * (radius * radius - e_e)).max(0.0).sqrt()) / d_d;
            eta += &delta * c64(tau, 0.0);
            h_eta += &hd * c64(tau, 0.0);
            return Ok((eta, h_eta, true));
        }
        eta += &delta * c64(alpha, 0.0);
        h_eta += &hd * c64(alpha, 0.0);
        r += &hd * c64(alpha, 0.0);
        r = tangent_project(x, &r)?;
        let r_r_new = inner(&r, &r);
        if r_r_new.sqrt() <= target {
            break;
        }
        let beta = r_r_new / r_r;
        r_r = r_r_new;
        delta = tangent_project(x, &(-&r + &delta * c64(beta, 0.0)))?;
    }
    Ok((eta, h_eta, false))
}

fn trust_region(p: &Problem, x0: &Frame, cfg: &SolverConfig, floor: f64) -> Result<InnerOutcome> {
    let n = x0.n();
    let dim = 4 * n - 4;
    let radius_max = (dim as f64).sqrt();
    let mut radius = radius_max / 8.0;
    let mut x = x0.clone();
    let (mut e, mut g) = p.eval(&x)?;
    let mut gn = norm(&g);
    let mut iters = 0;
    let mut rejects = 0;
    let mut stagnated = false;
    while iters < cfg.max_inner_iters && gn > cfg.tolgradnorm && e.value > floor {
        iters += 1;
        let (eta, h_eta, on_boundary) = truncated_cg(p, &x, &g, radius, dim)?;
        let model_decrease = -inner(&g, &eta) - 0.5 * inner(&eta, &h_eta);
        let candidate = retract(&x, &eta, p.retraction).ok();
        let mut accepted = false;
        if let Some(xn) = candidate {
            let (en, gnew) = p.eval(&xn)?;
            let rho_reg = e.value.abs().max(1.0) * f64::EPSILON * 1e3;
            let rho = (e.value - en.value + rho_reg) / (model_decrease + rho_reg);
            if rho < TR_SHRINK_BELOW || !rho.is_finite() {
                radius *= 0.25;
            } else if rho > TR_EXPAND_ABOVE && on_boundary {
                radius = (2.0 * radius).min(radius_max);
            }
            if rho > TR_ACCEPT && en.value <= e.value + 1e-14 * e.value.abs().max(1e-300) && rho.is_finite() {
                x = xn;
                e = en;
                g = gnew;
                gn = norm(&g);
                accepted = true;
            }
        } else {
            radius *= 0.25;
        }
        if accepted {
            rejects = 0;
        } else {
            rejects += 1;
            if rejects >= TR_MAX_REJECTS {
                stagnated = true;
                break;
            }
        }
    }
    Ok(InnerOutcome {
        frame: x,
        eval: e,
        grad: g,
        gradnorm: gn,
        iters,
        stagnated,
    })
}
