//! Time march of `∂Q/∂t = G(x,t) − Q(x,t)` from `Q(x,0) = 0`.
//!
//! Each step of the classic fourth-order Runge–Kutta scheme re-solves the
//! inner minimization at every stage, because `G` depends on the whole
//! current slice through `min_k [v·e^{−k} + a(k)·Q(x−k)]`. Within a
//! stage the per-node minimizations are independent and run in parallel;
//! every node writes only its own cell and no cross-node reduction
//! exists, so results are bit-identical for any thread count. Time steps
//! are sequential.
//!
//! The slope field is a contraction: `G − Q` moves each value toward a
//! bounded fixed point at unit rate, so the explicit scheme is stable
//! under the conservative guard `dt ≤ 0.5` enforced by [`Grid`]
//! construction. Stage values stay inside `[0, 1]` up to roundoff; the
//! completed step is clamped to `[0, 1]` as a floating-point net (the
//! overshoot, when any, is a few ulps).

use rayon::prelude::*;

use bomber_core::ModelParams;

use crate::field::{SolutionField, SolveMode};
use crate::grid::Grid;
use crate::optimize::{g_node, optimize_node, optimize_node_discrete, Axis, RowCtx};
use crate::SolverError;

/// Solves the field with golden-section refinement enabled (continuous
/// mode); see [`solve_with_options`].
pub fn solve(
    params: ModelParams,
    grid: Grid,
    mode: SolveMode,
) -> Result<SolutionField, SolverError> {
    solve_with_options(params, grid, mode, true)
}

/// Solves the field, exposing the refinement switch.
///
/// With `refine = false` the continuous-mode maximizer is the best grid
/// node only (no golden-section pass); allocations then coincide exactly
/// with discrete-unit mode at `step = dx`. Discrete mode never refines,
/// regardless of the flag.
///
/// # Errors
///
/// [`SolverError::InvalidGrid`] / [`SolverError::UnstableTimeStep`] when
/// the grid violates its construction invariants (possible because grid
/// fields are public), and [`SolverError::InvalidStep`] for a
/// non-positive or non-finite discrete unit.
pub fn solve_with_options(
    params: ModelParams,
    grid: Grid,
    mode: SolveMode,
    refine: bool,
) -> Result<SolutionField, SolverError> {
    grid.validate()?;
    if let SolveMode::DiscreteUnit { step } = mode {
        if !(step.is_finite() && step > 0.0) {
            return Err(SolverError::InvalidStep(step));
        }
    }
    let nx = grid.nx;
    let nt = grid.nt;
    let dt = grid.dt();
    let axis = Axis::new(&grid, &params);

    let mut q_hist = vec![0.0f64; nx * nt];
    let mut k_hist = vec![0.0f64; nx * nt];
    let mut g_hist = vec![0.0f64; nx * nt];

    let mut q = vec![0.0f64; nx];
    let mut stage = vec![0.0f64; nx];
    let mut g_tmp = vec![0.0f64; nx];
    let mut s1 = vec![0.0f64; nx];
    let mut s2 = vec![0.0f64; nx];
    let mut s3 = vec![0.0f64; nx];
    let mut s4 = vec![0.0f64; nx];

    for n in 0..nt {
        let row = n * nx;
        q_hist[row..row + nx].copy_from_slice(&q);
        let ctx = RowCtx::new(grid.t(n), &params);
        optimize_slice(
            &axis,
            &q,
            mode,
            refine,
            &ctx,
            &mut k_hist[row..row + nx],
            &mut g_hist[row..row + nx],
        );
        if n + 1 == nt {
            break;
        }
        let g_now = &g_hist[row..row + nx];
        for i in 0..nx {
            s1[i] = g_now[i] - q[i];
            stage[i] = q[i] + 0.5 * dt * s1[i];
        }
        g_slice(&axis, &stage, mode, refine, &mut g_tmp);
        for i in 0..nx {
            s2[i] = g_tmp[i] - stage[i];
            stage[i] = q[i] + 0.5 * dt * s2[i];
        }
        g_slice(&axis, &stage, mode, refine, &mut g_tmp);
        for i in 0..nx {
            s3[i] = g_tmp[i] - stage[i];
            stage[i] = q[i] + dt * s3[i];
        }
        g_slice(&axis, &stage, mode, refine, &mut g_tmp);
        for i in 0..nx {
            s4[i] = g_tmp[i] - stage[i];
            let next = q[i] + dt / 6.0 * (s1[i] + 2.0 * s2[i] + 2.0 * s3[i] + s4[i]);
            q[i] = next.clamp(0.0, 1.0);
        }
    }

    Ok(SolutionField::from_parts(
        grid, params, mode, q_hist, k_hist, g_hist,
    ))
}

/// Full per-node optimization over one slice, recording maximizers.
/// `ctx` carries the row time's closed-form boundary segment; only the
/// continuous refined path uses it.
fn optimize_slice(
    axis: &Axis,
    q: &[f64],
    mode: SolveMode,
    refine: bool,
    ctx: &RowCtx,
    k_out: &mut [f64],
    g_out: &mut [f64],
) {
    k_out
        .par_iter_mut()
        .zip(g_out.par_iter_mut())
        .enumerate()
        .for_each(|(i, (k, g))| {
            let (kk, gg) = match mode {
                SolveMode::Continuous => optimize_node(axis, q, i, refine, Some(ctx)),
                SolveMode::DiscreteUnit { step } => optimize_node_discrete(axis, q, i, step),
            };
            *k = kk;
            *g = gg;
        });
}

/// Value-only optimization over one slice, for integration stages.
fn g_slice(axis: &Axis, q: &[f64], mode: SolveMode, refine: bool, g_out: &mut [f64]) {
    g_out.par_iter_mut().enumerate().for_each(|(i, g)| {
        *g = match mode {
            SolveMode::Continuous => g_node(axis, q, i, refine),
            SolveMode::DiscreteUnit { step } => optimize_node_discrete(axis, q, i, step).1,
        };
    });
}
