//! Outer penalty and augmented-Lagrangian loops driving `ε → 0`, and the
//! multistart driver.

mod inner;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, CVector, C64};
use crate::objective::{constraint_residual, constraint_vector, exact_lambda, exact_projection, Frame, Regularization};
use crate::stiefel::Retraction;
use crate::subspace::StructureSubspace;
use crate::verify::{verify_solution, Thresholds, VerificationReport};

pub use inner::{inner_minimize, InnerOutcome};

/// Outer values are treated as stationary below this relative change.
pub const VALUE_CHANGE_RTOL: f64 = 1e-12;
/// Values below `FLOOR_RTOL·‖A‖_F²` are indistinguishable from zero.
pub const FLOOR_RTOL: f64 = 1e-14;
/// The regularized value must be within this relative distance of the exact
/// distance² before stationarity counts: early on, a frame of near-eigenvectors
/// can have a tiny penalized value and an unrelated, stable exact projection.
pub const PENALTY_GAP_RTOL: f64 = 1e-2;
/// ALM keeps ε when the constraint residual shrinks by at least this factor.
pub const ALM_SHRINK: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Penalty,
    Alm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerSolver {
    #[default]
    GradientDescent,
    TrustRegion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub method: Method,
    pub inner: InnerSolver,
    pub tolgradnorm: f64,
    pub eps0: f64,
    pub eps_decrease: f64,
    pub eps_min: f64,
    pub max_inner_iters: usize,
    pub max_outer_iters: usize,
    /// Relative to `‖A‖_F`.
    pub feas_tol: f64,
    pub multiplier_cap: f64,
    pub retraction: Retraction,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Penalty,
            inner: InnerSolver::GradientDescent,
            tolgradnorm: 1e-9,
            eps0: 1.0,
            eps_decrease: 0.5,
            eps_min: 1e-12,
            max_inner_iters: 5000,
            max_outer_iters: 60,
            feas_tol: 1e-8,
            multiplier_cap: 1e6,
            retraction: Retraction::Qr,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tolgradnorm", self.tolgradnorm),
            ("eps0", self.eps0),
            ("eps_min", self.eps_min),
            ("feas_tol", self.feas_tol),
            ("multiplier_cap", self.multiplier_cap),
        ];
        for (name, x) in positive {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::Parameter(format!("{name} must be positive, got {x}")));
            }
        }
        if !(self.eps_decrease > 0.0 && self.eps_decrease < 1.0) {
            return Err(Error::Parameter(format!(
                "eps_decrease must lie in (0, 1), got {}",
                self.eps_decrease
            )));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::Parameter("max_outer_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    /// Exact projection feasible and the distance stationary across outer steps.
    Converged,
    /// Objective below the numerical floor.
    BelowFloor,
    EpsilonExhausted,
    OuterLimit,
}

/// One outer step of the penalty or ALM loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterStep {
    pub eps: f64,
    pub inner_iters: usize,
    pub value: f64,
    pub gradnorm: f64,
    /// `‖Δ‖_F` of the exact projection at this step.
    pub distance: f64,
    pub feasible: bool,
    pub multiplier_norm: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub delta: CMatrix,
    pub lambda: C64,
    pub distance: f64,
    pub frame: Frame,
    /// `‖[(A+Δ−λI)v ; (A+Δ−λI)ᵀū]‖` for the reported `Δ, λ`.
    pub residual: f64,
    pub gradnorm: f64,
    pub status: SolveStatus,
    pub feasible: bool,
    pub stagnated: bool,
    pub outer_trace: Vec<OuterStep>,
    pub start_index: usize,
    pub lambda0: Option<C64>,
    pub wall_time: f64,
    pub verification: VerificationReport,
}

/// A starting frame with the candidate eigenvalue it came from.
#[derive(Debug, Clone)]
pub struct Start {
    pub frame: Frame,
    pub lambda0: Option<C64>,
}

fn check_problem(a: &CMatrix, s: &StructureSubspace, x0: &Frame) -> Result<()> {
    let n = a.nrows();
    if !a.is_square() || n < 2 {
        return Err(Error::Dimension(format!("A must be square with n ≥ 2, got {:?}", a.shape())));
    }
    crate::linalg::ensure_finite(a, "A")?;
    if s.n() != n || x0.n() != n {
        return Err(Error::Dimension(format!(
            "A is {n}×{n}, subspace has n = {}, frame has n = {}",
            s.n(),
            x0.n()
        )));
    }
    Ok(())
}

/// Penalty method: `y = 0`, `ε ← ε_decrease·ε` after every inner solve.
pub fn penalty_solve(
    a: &CMatrix,
    s: &StructureSubspace,
    x0: &Frame,
    lambda0: Option<C64>,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    let cfg = SolverConfig {
        method: Method::Penalty,
        ..cfg.clone()
    };
    outer_loop(a, s, x0, lambda0, &cfg)
}

/// Augmented Lagrangian: `y ← y + g/ε`, `ε` decreased only when the
/// constraint residual `g` stalls.
pub fn alm_solve(
    a: &CMatrix,
    s: &StructureSubspace,
    x0: &Frame,
    lambda0: Option<C64>,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    let cfg = SolverConfig {
        method: Method::Alm,
        ..cfg.clone()
    };
    outer_loop(a, s, x0, lambda0, &cfg)
}

/// Dispatch on `cfg.method`.
pub fn solve(a: &CMatrix, s: &StructureSubspace, x0: &Frame, lambda0: Option<C64>, cfg: &SolverConfig) -> Result<SolveResult> {
    outer_loop(a, s, x0, lambda0, cfg)
}

fn outer_loop(a: &CMatrix, s: &StructureSubspace, x0: &Frame, lambda0: Option<C64>, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    check_problem(a, s, x0)?;
    let clock = Instant::now();
    let n = a.nrows();
    let norm_a = a.norm();
    let floor = FLOOR_RTOL * norm_a * norm_a;
    let feas_abs = cfg.feas_tol * norm_a;

    let mut eps = cfg.eps0;
    let mut y = CVector::zeros(2 * n);
    let mut x = x0.clone();
    let mut trace = Vec::new();
    let mut stagnated = false;
    let mut prev_distance_sq: Option<f64> = None;
    let mut prev_gnorm: Option<f64> = None;
    let mut status = SolveStatus::OuterLimit;
    let mut last: Option<(InnerOutcome, C64, CMatrix, bool)> = None;

    for _ in 0..cfg.max_outer_iters {
        let reg = Regularization::new(eps, y.clone())?;
        let out = inner_minimize(a, s, &reg, &x, cfg, floor)?;
        stagnated |= out.stagnated;
        x = out.frame.clone();

        let lam = exact_lambda(&x, a, s)?;
        let proj = exact_projection(&x, lam, a, s)?;
        let res = constraint_residual(&x, lam, a, &proj.delta);
        let feasible = res <= feas_abs;
        let distance_sq = proj.delta.norm_squared();
        trace.push(OuterStep {
            eps,
            inner_iters: out.iters,
            value: out.eval.value,
            gradnorm: out.gradnorm,
            distance: distance_sq.sqrt(),
            feasible,
            multiplier_norm: y.norm(),
        });
        let stationary = prev_distance_sq
            .is_some_and(|p| (distance_sq - p).abs() < VALUE_CHANGE_RTOL * (1.0 + distance_sq));
        prev_distance_sq = Some(distance_sq);
        let caught_up = (distance_sq - out.eval.value).abs() <= PENALTY_GAP_RTOL * distance_sq + floor;
        let below_floor = out.eval.value <= floor;
        let g = constraint_vector(&x, out.eval.lambda, a, &out.eval.delta);
        last = Some((out, lam, proj.delta, feasible));

        if feasible && stationary && caught_up {
            status = SolveStatus::Converged;
            break;
        }
        if below_floor {
            status = SolveStatus::BelowFloor;
            break;
        }
        match cfg.method {
            Method::Penalty => eps *= cfg.eps_decrease,
            Method::Alm => {
                y += &g / c64(eps, 0.0);
                let yn = y.norm();
                if yn > cfg.multiplier_cap {
                    y *= c64(cfg.multiplier_cap / yn, 0.0);
                }
                let gn = g.norm();
                if prev_gnorm.is_some_and(|p| gn > ALM_SHRINK * p) {
                    eps *= cfg.eps_decrease;
                }
                prev_gnorm = Some(gn);
            }
        }
        if eps < cfg.eps_min {
            status = SolveStatus::EpsilonExhausted;
            break;
        }
    }

    let (out, lam, delta_exact, feasible) = last.expect("at least one outer step");
    let (delta, lambda) = if feasible {
        (delta_exact, lam)
    } else {
        (out.eval.delta.clone(), out.eval.lambda)
    };
    let residual = constraint_residual(&x, lambda, a, &delta);
    let mut result = SolveResult {
        distance: delta.norm(),
        delta,
        lambda,
        frame: x,
        residual,
        gradnorm: out.gradnorm,
        status,
        feasible,
        stagnated,
        outer_trace: trace,
        start_index: 0,
        lambda0,
        wall_time: 0.0,
        verification: VerificationReport::default(),
    };
    result.verification = verify_solution(a, s, &result, &Thresholds::default())?;
    result.wall_time = clock.elapsed().as_secs_f64();
    Ok(result)
}

/// Solve for the nearest `A + Δ ∈ S` with a multiple eigenvalue (the
/// perturbed matrix, not the perturbation, is constrained).
pub fn affine_target_solve(
    a: &CMatrix,
    s: &StructureSubspace,
    x0: &Frame,
    lambda0: Option<C64>,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    let shift = s.shift_for_affine_target(a)?;
    let mut r = solve(&shift.a_s, s, x0, lambda0, cfg)?;
    r.delta -= &shift.a_perp;
    r.distance = (r.distance * r.distance + shift.offset_norm_sq).sqrt();
    r.residual = constraint_residual(&r.frame, r.lambda, a, &r.delta);
    Ok(r)
}

/// All results of a multistart run and the index of the selected one.
#[derive(Debug, Clone)]
pub struct MultistartOutcome {
    pub best: usize,
    pub results: Vec<SolveResult>,
    pub any_feasible: bool,
}

impl MultistartOutcome {
    pub fn best_result(&self) -> &SolveResult {
        &self.results[self.best]
    }
}

/// Run every start and keep the feasible result of smallest distance (ties
/// by residual, then start index). `jobs > 1` runs starts on a thread pool;
/// results do not depend on `jobs`.
pub fn multistart_solve(
    a: &CMatrix,
    s: &StructureSubspace,
    starts: &[Start],
    cfg: &SolverConfig,
    jobs: usize,
) -> Result<MultistartOutcome> {
    if starts.is_empty() {
        return Err(Error::Parameter("multistart needs at least one start".into()));
    }
    let run = |(i, st): (usize, &Start)| -> Result<SolveResult> {
        let mut r = solve(a, s, &st.frame, st.lambda0, cfg)?;
        r.start_index = i;
        Ok(r)
    };
    let results: Vec<SolveResult> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Parameter(format!("cannot build thread pool: {e}")))?;
        pool.install(|| starts.par_iter().enumerate().map(run).collect::<Result<Vec<_>>>())?
    } else {
        starts.iter().enumerate().map(run).collect::<Result<Vec<_>>>()?
    };
    let any_feasible = results.iter().any(|r| r.feasible);
    let best = (0..results.len())
        .filter(|&i| results[i].feasible || !any_feasible)
        .min_by(|&i, &j| {
            let (ri, rj) = (&results[i], &results[j]);
            ri.distance
                .total_cmp(&rj.distance)
                .then(ri.residual.total_cmp(&rj.residual))
                .then(i.cmp(&j))
        })
        .expect("non-empty");
    Ok(MultistartOutcome {
        best,
        results,
        any_feasible,
    })
}
