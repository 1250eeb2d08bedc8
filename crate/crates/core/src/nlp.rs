//! General equality/inequality-constrained NLP solver: augmented-Lagrangian
//! outer iterations around an L-BFGS inner minimizer with a strong-Wolfe
//! line search.
//!
//! The augmented Lagrangian (Powell–Hestenes–Rockafellar form, inequalities
//! `g(x) ≤ 0`):
//!
//! ```text
//! L_ρ(x, λ, μ) = f + λᵀc + (ρ/2)‖c‖² + (1/2ρ) Σ_i [max(0, μ_i + ρ g_i)² − μ_i²]
//! ```
//!
//! Outer loop per iteration: minimize `L_ρ` to tolerance `ω`, then measure
//! feasibility `θ = max(‖c‖∞, ‖V‖∞)` with `V_i = max(g_i, −μ_i/ρ)` (the
//! complementarity-aware inequality measure). Multipliers are updated only
//! when `θ ≤ max(feas_tol, θ_best/4)` — feasibility must improve by at
//! least 4× between accepted steps, which makes the best-so-far feasibility
//! monotone by construction; otherwise the penalty grows tenfold.
//!
//! Multiplier updates are the first-order formulas `λ ← λ + ρc`,
//! `μ ← max(0, μ + ρg)`, safeguarded by a magnitude cap; `μ ≥ 0` is
//! therefore structural. Stationarity is always reported for the *updated*
//! candidates, which coincides with `∇L_ρ` at the inner solution.

use crate::la::{axpy, dot, inf_norm, solve_dense_in_place, BandChol, SymBand};
use crate::real::Real;
use rayon::prelude::*;

/// Structured symmetric approximation of the augmented-Lagrangian Hessian:
/// a banded core plus optional positive rank-one corrections,
/// `H ≈ B + Σ_k σ_k·u_k u_kᵀ` with `σ_k > 0` (e.g. penalty curvature of
/// dense inequality rows, which would otherwise destroy the band).
pub struct HessModel<R: Real> {
    pub band: SymBand<R>,
    pub low_rank: Vec<(R, Vec<R>)>,
}

/// Problem callbacks. Constraints are `c(x) = 0` (equalities) and
/// `g(x) ≤ 0` (inequalities); Jacobian access is matrix-free (transpose
/// products), which keeps the solver usable at large node counts.
pub trait NlpProblem<R: Real>: Sync {
    fn n_vars(&self) -> usize;

    fn n_eq(&self) -> usize {
        0
    }

    fn n_ineq(&self) -> usize {
        0
    }

    /// Objective value; fills `grad` with `∇f`.
    fn objective_grad(&self, x: &[R], grad: &mut [R]) -> R;

    /// Equality residuals into `out` (length [`Self::n_eq`]).
    fn eq_constraints(&self, _x: &[R], _out: &mut [R]) {}

    /// Inequality values `g(x)` into `out` (length [`Self::n_ineq`]).
    fn ineq_constraints(&self, _x: &[R], _out: &mut [R]) {}

    /// `out += J_cᵀ · y`.
    fn eq_jac_t_mul(&self, _x: &[R], _y: &[R], _out: &mut [R]) {}

    /// `out += J_gᵀ · y`.
    fn ineq_jac_t_mul(&self, _x: &[R], _y: &[R], _out: &mut [R]) {}

    /// Diagonal estimate of the augmented-Lagrangian Hessian,
    /// `out_i ≈ ∂²f/∂x_i² + ρ·Σ_rows J_{r,i}²`, used as a Jacobi
    /// preconditioner for the inner minimizer. Entries may be rough (they
    /// are clipped below before use); the identity default leaves the inner
    /// iteration unpreconditioned. Transcribed curve problems are badly
    /// scaled without this (acceleration variables carry O(ρh²) curvature
    /// against O(ρ) for positions).
    fn al_hess_diag(&self, _x: &[R], _rho: R, out: &mut [R]) {
        for o in out.iter_mut() {
            *o = R::one();
        }
    }

    /// Structured augmented-Lagrangian Hessian approximation at `x` for the
    /// given multipliers and penalty; `None` (the default) falls back to the
    /// Jacobi diagonal of [`Self::al_hess_diag`]. Discretized curve problems
    /// should implement this: their Hessians couple only neighboring nodes,
    /// so a banded Cholesky factorization is cheap and using it as the
    /// initial matrix turns the inner L-BFGS into a semi-Newton method —
    /// the difference between thousands of inner iterations and a handful.
    fn al_hess_model(
        &self,
        _x: &[R],
        _eq_mult: &[R],
        _ineq_mult: &[R],
        _rho: R,
    ) -> Option<HessModel<R>> {
        None
    }
}

/// Termination classification of one solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Feasibility, stationarity, and complementarity tolerances met.
    Converged,
    /// Outer iteration budget exhausted before the tolerances were met.
    MaxIterations,
    /// The method stalled: penalty exceeded its cap while infeasible, or
    /// the inner minimizer produced non-finite values.
    Degenerate,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::MaxIterations => "max_iterations",
            Self::Degenerate => "degenerate",
        }
    }
}

/// First-order optimality measures at a point. Stationarity and
/// complementarity are *scale-invariant*: they are divided by
/// `s = max(1, ‖∇f‖∞, ‖λ‖∞, ‖μ‖∞)`, so the same tolerance means the same
/// thing whether the objective is O(1) or O(10⁶) (the usual semantics of an
/// optimality tolerance in NLP solvers). Feasibility is raw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport<R: Real> {
    /// `‖∇f + J_cᵀλ + J_gᵀμ‖∞ / s`.
    pub stationarity: R,
    /// `max(‖c‖∞, ‖max(0, g)‖∞)`.
    pub feasibility: R,
    /// `max_i |μ_i · g_i| / s`.
    pub complementarity: R,
}

/// Solver configuration. Defaults suit the transcription problems in this
/// crate; `feas_tol`/`opt_tol` are the headline knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions<R: Real> {
    pub max_outer: usize,
    pub max_inner: usize,
    pub feas_tol: R,
    pub opt_tol: R,
    /// Initial penalty.
    pub rho0: R,
    /// Penalty growth factor on rejected outer iterations.
    pub rho_mult: R,
    /// Penalty cap; exceeding it while infeasible classifies the solve as
    /// degenerate.
    pub rho_max: R,
    /// Multiplier magnitude safeguard.
    pub mult_max: R,
    /// L-BFGS memory (pairs).
    pub memory: usize,
    /// Line-search evaluation budget per inner iteration.
    pub ls_max_evals: usize,
}

impl<R: Real> Default for SolveOptions<R> {
    fn default() -> Self {
        Self {
            max_outer: 60,
            max_inner: 2500,
            feas_tol: R::lit(1e-8),
            opt_tol: R::lit(1e-8),
            rho0: R::lit(10.0),
            rho_mult: R::lit(10.0),
            rho_max: R::lit(1e12),
            mult_max: R::lit(1e12),
            memory: 10,
            ls_max_evals: 40,
        }
    }
}

/// One row of the outer-iteration history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterRecord<R: Real> {
    pub outer: usize,
    pub inner_iterations: usize,
    pub objective: R,
    /// Acceptance measure `max(‖c‖∞, ‖V‖∞)`.
    pub theta: R,
    pub rho: R,
    /// Inner tolerance this iteration ran with.
    pub omega: R,
    /// Whether the multiplier update was accepted.
    pub accepted: bool,
}

/// Outcome of one solve.
#[derive(Debug, Clone)]
pub struct SolveResult<R: Real> {
    pub x: Vec<R>,
    pub objective: R,
    pub eq_multipliers: Vec<R>,
    pub ineq_multipliers: Vec<R>,
    pub status: SolveStatus,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub kkt: KktReport<R>,
    pub history: Vec<OuterRecord<R>>,
}

impl<R: Real> SolveResult<R> {
    pub fn is_converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// Raw KKT measures of `(x, λ, μ)` for a problem.
pub fn check_kkt<R: Real, P: NlpProblem<R>>(
    problem: &P,
    x: &[R],
    eq_mult: &[R],
    ineq_mult: &[R],
) -> KktReport<R> {
    let mut grad = vec![R::zero(); problem.n_vars()];
    let mut c = vec![R::zero(); problem.n_eq()];
    let mut g = vec![R::zero(); problem.n_ineq()];
    problem.objective_grad(x, &mut grad);
    let scale = R::one()
        .max(inf_norm(&grad))
        .max(inf_norm(eq_mult))
        .max(inf_norm(ineq_mult));
    problem.eq_constraints(x, &mut c);
    problem.ineq_constraints(x, &mut g);
    problem.eq_jac_t_mul(x, eq_mult, &mut grad);
    problem.ineq_jac_t_mul(x, ineq_mult, &mut grad);
    let mut feas = inf_norm(&c);
    let mut comp = R::zero();
    for i in 0..g.len() {
        feas = feas.max(g[i].max(R::zero()));
        comp = comp.max((ineq_mult[i] * g[i]).abs());
    }
    KktReport {
        stationarity: inf_norm(&grad) / scale,
        feasibility: feas,
        complementarity: comp / scale,
    }
}

/// Augmented-Lagrangian value and gradient at `x` for fixed `(λ, μ, ρ)`.
/// Returns the AL value and the plain objective; `grad` receives `∇L_ρ`,
/// and the constraint buffers receive `c(x)`, `g(x)`.
#[allow(clippy::too_many_arguments)]
fn al_eval<R: Real, P: NlpProblem<R>>(
    problem: &P,
    lam: &[R],
    mu: &[R],
    rho: R,
    x: &[R],
    grad: &mut [R],
    c: &mut [R],
    g: &mut [R],
    y_buf: &mut [R],
) -> (R, R) {
    let f = problem.objective_grad(x, grad);
    let mut val = f;
    if !c.is_empty() {
        problem.eq_constraints(x, c);
        let half_rho = rho / R::lit(2.0);
        for i in 0..c.len() {
            val = val + lam[i] * c[i] + half_rho * c[i] * c[i];
            y_buf[i] = lam[i] + rho * c[i];
        }
        problem.eq_jac_t_mul(x, &y_buf[..c.len()], grad);
    }
    if !g.is_empty() {
        problem.ineq_constraints(x, g);
        let y_i = &mut y_buf[c.len()..c.len() + g.len()];
        let inv_2rho = R::one() / (R::lit(2.0) * rho);
        for i in 0..g.len() {
            let t = (mu[i] + rho * g[i]).max(R::zero());
            val = val + (t * t - mu[i] * mu[i]) * inv_2rho;
            y_i[i] = t;
        }
        let y_copy: Vec<R> = y_i.to_vec();
        problem.ineq_jac_t_mul(x, &y_copy, grad);
    }
    (val, f)
}

/// Strong-Wolfe line search (sufficient decrease `c1 = 1e-4`, curvature
/// `c2 = 0.9`). `phi(α)` must return `(φ(α), φ′(α))`. Returns an accepted
/// step, or `None` when no decrease could be found.
fn strong_wolfe<R: Real>(
    phi: &mut impl FnMut(R) -> (R, R),
    phi0: R,
    dphi0: R,
    alpha_init: R,
    max_evals: usize,
) -> Option<R> {
    let c1 = R::lit(1e-4);
    let c2 = R::lit(0.9);
    let alpha_cap = R::lit(1e12);
    let mut evals = 0usize;
    let mut alpha_prev = R::zero();
    let mut f_prev = phi0;
    let mut df_prev = dphi0;
    let mut alpha = alpha_init.max(R::lit(1e-300));
    loop {
        let (f, df) = phi(alpha);
        evals += 1;
        let bad = !f.is_finite() || !df.is_finite();
        if bad || f > phi0 + c1 * alpha * dphi0 || (evals > 1 && f >= f_prev) {
            return zoom(
                phi,
                phi0,
                dphi0,
                alpha_prev,
                f_prev,
                df_prev,
                alpha,
                f,
                c1,
                c2,
                max_evals - evals,
            );
        }
        if df.abs() <= -c2 * dphi0 {
            return Some(alpha);
        }
        if df >= R::zero() {
            return zoom(
                phi,
                phi0,
                dphi0,
                alpha,
                f,
                df,
                alpha_prev,
                f_prev,
                c1,
                c2,
                max_evals - evals,
            );
        }
        if evals >= max_evals || alpha >= alpha_cap {
            // Decrease held the whole way; take the last good step.
            return Some(alpha);
        }
        alpha_prev = alpha;
        f_prev = f;
        df_prev = df;
        alpha = alpha * R::lit(2.0);
    }
}

/// Zoom phase of the strong-Wolfe search on the bracket `(lo, hi)` where
/// `lo` satisfies sufficient decrease. Quadratic interpolation through
/// `(lo, f_lo, df_lo)` and `(hi, f_hi)`, safeguarded to the bracket
/// interior with bisection fallback.
#[allow(clippy::too_many_arguments)]
fn zoom<R: Real>(
    phi: &mut impl FnMut(R) -> (R, R),
    phi0: R,
    dphi0: R,
    mut lo: R,
    mut f_lo: R,
    mut df_lo: R,
    mut hi: R,
    mut f_hi: R,
    c1: R,
    c2: R,
    max_evals: usize,
) -> Option<R> {
    for _ in 0..max_evals.max(8) {
        let width = hi - lo;
        if width.abs() <= R::lit(1e-16) * (R::one() + lo.abs()) {
            break;
        }
        // Minimizer of the quadratic through (lo, f_lo, df_lo), (hi, f_hi).
        let denom = f_hi - f_lo - df_lo * width;
        let mut alpha = if denom.abs() > R::lit(1e-300) && f_hi.is_finite() {
            lo - df_lo * width * width / (R::lit(2.0) * denom)
        } else {
            lo + width / R::lit(2.0)
        };
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        let margin = R::lit(0.1) * (b - a);
        if !(alpha > a + margin && alpha < b - margin) {
            alpha = lo + width / R::lit(2.0);
        }
        let (f, df) = phi(alpha);
        if !f.is_finite() || !df.is_finite() || f > phi0 + c1 * alpha * dphi0 || f >= f_lo {
            hi = alpha;
            f_hi = f;
        } else {
            if df.abs() <= -c2 * dphi0 {
                return Some(alpha);
            }
            if df * width >= R::zero() {
                hi = lo;
                f_hi = f_lo;
            }
            lo = alpha;
            f_lo = f;
            df_lo = df;
        }
    }
    // Curvature never satisfied within budget; the lo point still has
    // sufficient decrease (when positive).
    if lo > R::zero() && f_lo < phi0 {
        Some(lo)
    } else {
        None
    }
}

/// Inner-solve preconditioner: the application of an approximate inverse
/// augmented-Lagrangian Hessian.
enum Precond<R: Real> {
    /// Inverse-diagonal (Jacobi) entries.
    Diag(Vec<R>),
    /// Banded Cholesky factor of a [`HessModel`] core, with the low-rank
    /// corrections folded in by the Woodbury identity:
    /// `(B + UΣUᵀ)⁻¹v = B⁻¹v − Y(Σ⁻¹ + UᵀY)⁻¹UᵀB⁻¹v` where `Y = B⁻¹U`.
    Factored {
        chol: BandChol<R>,
        u_cols: Vec<Vec<R>>,
        y_cols: Vec<Vec<R>>,
        /// Capacitance matrix `Σ⁻¹ + UᵀY`, row-major `m×m`.
        cap: Vec<R>,
    },
}

impl<R: Real> Precond<R> {
    /// `v ← P·v` (approximate inverse-Hessian application).
    fn apply_in_place(&self, v: &mut [R]) {
        match self {
            Precond::Diag(p) => {
                for (vi, pi) in v.iter_mut().zip(p) {
                    *vi = *vi * *pi;
                }
            }
            Precond::Factored { chol, u_cols, y_cols, cap } => {
                chol.solve_in_place(v);
                let m = u_cols.len();
                if m > 0 {
                    let mut rhs: Vec<R> = u_cols.iter().map(|u| dot(u, v)).collect();
                    let mut a = cap.clone();
                    if solve_dense_in_place(&mut a, &mut rhs, m) {
                        for k in 0..m {
                            axpy(-rhs[k], &y_cols[k], v);
                        }
                    }
                }
            }
        }
    }
}

/// Assembles the preconditioner for one inner solve: the factored
/// [`HessModel`] when the problem provides one (retrying the factorization
/// with growing diagonal shifts if the model is not positive definite),
/// otherwise the clipped inverse Jacobi diagonal.
fn build_precond<R: Real, P: NlpProblem<R>>(
    problem: &P,
    lam: &[R],
    mu: &[R],
    rho: R,
    x: &[R],
) -> Precond<R> {
    if let Some(model) = problem.al_hess_model(x, lam, mu, rho) {
        let dmax = model.band.diag_max().max(R::lit(1e-300));
        let mut shift = R::zero();
        let mut bump = dmax * R::lit(1e-10);
        for _ in 0..16 {
            if let Some(chol) = model.band.cholesky(shift) {
                let mut u_cols = Vec::new();
                let mut y_cols = Vec::new();
                let mut sigmas = Vec::new();
                for (sigma, u) in &model.low_rank {
                    if *sigma > R::zero() {
                        let mut y = u.clone();
                        chol.solve_in_place(&mut y);
                        u_cols.push(u.clone());
                        y_cols.push(y);
                        sigmas.push(*sigma);
                    }
                }
                let m = u_cols.len();
                let mut cap = vec![R::zero(); m * m];
                for i in 0..m {
                    for j in 0..m {
                        cap[i * m + j] = dot(&u_cols[i], &y_cols[j]);
                    }
                    cap[i * m + i] = cap[i * m + i] + R::one() / sigmas[i];
                }
                return Precond::Factored { chol, u_cols, y_cols, cap };
            }
            shift = bump;
            bump = bump * R::lit(10.0);
        }
    }
    let mut diag = vec![R::one(); x.len()];
    problem.al_hess_diag(x, rho, &mut diag);
    let max_diag = diag.iter().fold(R::zero(), |m, &v| m.max(v.abs()));
    let floor = (R::lit(1e-12) * max_diag).max(R::lit(1e-300));
    for p in diag.iter_mut() {
        *p = R::one() / (*p).max(floor);
    }
    Precond::Diag(diag)
}

/// L-BFGS two-loop recursion with preconditioned initial matrix:
/// `d = −H·g` from stored `(s, y)` pairs, `H₀ = γ·P` where `P` is the
/// inverse-Hessian approximation and `γ` matches `H₀y ≈ s` on the latest
/// pair (maintained by the caller).
fn lbfgs_direction<R: Real>(
    grad: &[R],
    s_list: &[Vec<R>],
    y_list: &[Vec<R>],
    rho_list: &[R],
    precond: &Precond<R>,
    gamma: R,
    d: &mut [R],
    alpha_buf: &mut [R],
) {
    let m = s_list.len();
    for (di, gi) in d.iter_mut().zip(grad) {
        *di = -*gi;
    }
    for i in (0..m).rev() {
        let a = rho_list[i] * dot(&s_list[i], d);
        alpha_buf[i] = a;
        axpy(-a, &y_list[i], d);
    }
    precond.apply_in_place(d);
    if m > 0 {
        for di in d.iter_mut() {
            *di = *di * gamma;
        }
    }
    for i in 0..m {
        let b = rho_list[i] * dot(&y_list[i], d);
        axpy(alpha_buf[i] - b, &s_list[i], d);
    }
}

/// Minimizes the augmented Lagrangian for fixed multipliers/penalty from
/// `x` (in place). Returns `(AL value, objective, inner iterations, grad_inf)`.
#[allow(clippy::too_many_arguments)]
/// How an inner solve ended; the outer loop reacts differently to a
/// subproblem that ran out of budget than to one it can trust.
#[derive(Clone, Copy, PartialEq, Eq)]
enum InnerExit {
    /// Gradient norm reached the requested tolerance.
    MetTol,
    /// No further descent was measurable in floating point.
    Stagnated,
    /// The iteration cap was hit before the tolerance.
    HitCap,
}

fn inner_minimize<R: Real, P: NlpProblem<R>>(
    problem: &P,
    lam: &[R],
    mu: &[R],
    rho: R,
    omega: R,
    opts: &SolveOptions<R>,
    x: &mut Vec<R>,
    c: &mut [R],
    g: &mut [R],
) -> (R, R, usize, R, InnerExit) {
    let n = x.len();
    let mut grad = vec![R::zero(); n];
    let mut y_buf = vec![R::zero(); c.len() + g.len()];
    let (mut val, mut fobj) =
        al_eval(problem, lam, mu, rho, x, &mut grad, c, g, &mut y_buf);

    // Multipliers and penalty are fixed within one inner solve, but the
    // curvature still drifts with `x` (metric terms, residual weights), so
    // the model is refreshed periodically below.
    let mut precond = build_precond(problem, lam, mu, rho, x);
    const REFRESH_EVERY: usize = 10;

    let mem = opts.memory.max(1);
    let mut s_list: Vec<Vec<R>> = Vec::with_capacity(mem);
    let mut y_list: Vec<Vec<R>> = Vec::with_capacity(mem);
    let mut rho_list: Vec<R> = Vec::with_capacity(mem);
    let mut gamma = R::one();
    let mut alpha_buf = vec![R::zero(); mem];
    let mut d = vec![R::zero(); n];
    let mut x_trial = vec![R::zero(); n];
    let mut g_trial = vec![R::zero(); n];
    let mut stagnant = 0usize;
    let mut iters = 0usize;
    let mut exit = InnerExit::HitCap;

    while iters < opts.max_inner {
        let gnorm = inf_norm(&grad);
        if gnorm <= omega {
            exit = InnerExit::MetTol;
            break;
        }
        if !gnorm.is_finite() {
            exit = InnerExit::Stagnated;
            break;
        }
        iters += 1;
        if iters % REFRESH_EVERY == 0 {
            precond = build_precond(problem, lam, mu, rho, x);
            s_list.clear();
            y_list.clear();
            rho_list.clear();
            gamma = R::one();
        }
        lbfgs_direction(
            &grad, &s_list, &y_list, &rho_list, &precond, gamma, &mut d, &mut alpha_buf,
        );
        let mut dphi0 = dot(&d, &grad);
        if !(dphi0 < R::zero()) {
            // Not a descent direction: drop the memory and restart from the
            // preconditioned steepest-descent step.
            s_list.clear();
            y_list.clear();
            rho_list.clear();
            gamma = R::one();
            lbfgs_direction(&grad, &[], &[], &[], &precond, gamma, &mut d, &mut alpha_buf);
            dphi0 = dot(&d, &grad);
            if !(dphi0 < R::zero()) {
                for (di, gi) in d.iter_mut().zip(&grad) {
                    *di = -*gi;
                }
                dphi0 = -dot(&grad, &grad);
            }
        }
        let alpha_init = if s_list.is_empty() && matches!(precond, Precond::Diag(_)) {
            // No curvature information yet and only a diagonal model: damp
            // the first trial step to a unit move at most (the search
            // expands it again if useful). A factored model's natural step
            // is already well-sized.
            (R::one() / inf_norm(&d).max(R::lit(1e-300))).min(R::one())
        } else {
            R::one()
        };

        let last_alpha = std::cell::Cell::new(R::nan());
        let last_val = std::cell::Cell::new(R::nan());
        let last_fobj = std::cell::Cell::new(R::nan());
        let last_gnorm = std::cell::Cell::new(R::nan());
        {
            let mut phi = |a: R| -> (R, R) {
                for i in 0..n {
                    x_trial[i] = x[i] + a * d[i];
                }
                let (v, fo) = al_eval(
                    problem, lam, mu, rho, &x_trial, &mut g_trial, c, g, &mut y_buf,
                );
                last_alpha.set(a);
                last_val.set(v);
                last_fobj.set(fo);
                last_gnorm.set(inf_norm(&g_trial));
                (v, dot(&g_trial, &d))
            };
            let step = strong_wolfe(&mut phi, val, dphi0, alpha_init, opts.ls_max_evals);
            match step {
                Some(a) => {
                    if a != last_alpha.get() {
                        let _ = phi(a);
                    }
                }
                None => {
                    // No measurable decrease along d — near the minimizer the
                    // objective changes by sub-ulp amounts while the gradient
                    // still has room to shrink. Polish: accept a step that
                    // does not increase the value (within rounding) but cuts
                    // the gradient norm.
                    let gnorm0 = inf_norm(&grad);
                    let f_cap = val + R::lit(1e-14) * (R::one() + val.abs());
                    let mut a = alpha_init;
                    let mut polished = false;
                    for _ in 0..6 {
                        let _ = phi(a);
                        if last_val.get() <= f_cap && last_gnorm.get() < R::lit(0.9) * gnorm0 {
                            polished = true;
                            break;
                        }
                        a = a / R::lit(4.0);
                    }
                    if !polished {
                        if s_list.is_empty() {
                            exit = InnerExit::Stagnated;
                            break;
                        }
                        s_list.clear();
                        y_list.clear();
                        rho_list.clear();
                        gamma = R::one();
                        continue;
                    }
                }
            }
        }

        // Curvature pair from the accepted step.
        let mut s = vec![R::zero(); n];
        let mut yv = vec![R::zero(); n];
        for i in 0..n {
            s[i] = x_trial[i] - x[i];
            yv[i] = g_trial[i] - grad[i];
        }
        let sy = dot(&s, &yv);
        let s_norm = dot(&s, &s).sqrt();
        let y_norm = dot(&yv, &yv).sqrt();
        if sy > R::lit(1e-12) * s_norm * y_norm {
            if s_list.len() == mem {
                s_list.remove(0);
                y_list.remove(0);
                rho_list.remove(0);
            }
            // γ matches H₀y ≈ s on this newest pair.
            let mut py = yv.clone();
            precond.apply_in_place(&mut py);
            let ypy = dot(&yv, &py);
            if ypy > R::lit(1e-300) {
                gamma = sy / ypy;
            }
            rho_list.push(R::one() / sy);
            s_list.push(s);
            y_list.push(yv);
        }

        if (val - last_val.get()).abs() <= R::lit(1e-16) * (R::one() + val.abs()) {
            stagnant += 1;
            if stagnant >= 3 {
                std::mem::swap(x, &mut x_trial);
                std::mem::swap(&mut grad, &mut g_trial);
                val = last_val.get();
                fobj = last_fobj.get();
                exit = InnerExit::Stagnated;
                break;
            }
        } else {
            stagnant = 0;
        }
        std::mem::swap(x, &mut x_trial);
        std::mem::swap(&mut grad, &mut g_trial);
        val = last_val.get();
        fobj = last_fobj.get();
    }
    if exit == InnerExit::HitCap && inf_norm(&grad) <= omega {
        // The cap landed exactly on a converged iterate.
        exit = InnerExit::MetTol;
    }
    // Leave c, g consistent with the final x.
    problem.eq_constraints(x, c);
    problem.ineq_constraints(x, g);
    (val, fobj, iters, inf_norm(&grad), exit)
}

/// Solves from `x0` with zero initial multipliers.
pub fn solve<R: Real, P: NlpProblem<R>>(
    problem: &P,
    x0: &[R],
    opts: &SolveOptions<R>,
) -> SolveResult<R> {
    solve_warm(problem, x0, None, None, opts)
}

/// Solves from `x0`, optionally warm-starting the multipliers (lengths must
/// match the constraint counts; `None` starts from zero).
pub fn solve_warm<R: Real, P: NlpProblem<R>>(
    problem: &P,
    x0: &[R],
    eq_mult0: Option<&[R]>,
    ineq_mult0: Option<&[R]>,
    opts: &SolveOptions<R>,
) -> SolveResult<R> {
    let n = problem.n_vars();
    let m_e = problem.n_eq();
    let m_i = problem.n_ineq();
    assert_eq!(x0.len(), n, "initial point has wrong dimension");

    let mut x = x0.to_vec();
    let mut lam = match eq_mult0 {
        Some(l) => {
            assert_eq!(l.len(), m_e);
            l.to_vec()
        }
        None => vec![R::zero(); m_e],
    };
    let mut mu = match ineq_mult0 {
        Some(m) => {
            assert_eq!(m.len(), m_i);
            m.iter().map(|&v| v.max(R::zero())).collect()
        }
        None => vec![R::zero(); m_i],
    };
    let mut c = vec![R::zero(); m_e];
    let mut g = vec![R::zero(); m_i];

    let unconstrained = m_e + m_i == 0;
    let mut rho = opts.rho0;
    let mut omega = if unconstrained { opts.opt_tol } else { R::lit(1e-2) };
    let mut theta_prev = R::infinity();
    let mut history = Vec::new();
    let mut inner_total = 0usize;
    let mut status = SolveStatus::MaxIterations;
    let mut kkt = KktReport {
        stationarity: R::infinity(),
        feasibility: R::infinity(),
        complementarity: R::infinity(),
    };
    let mut fobj = R::nan();
    let mut lam_hat = lam.clone();
    let mut mu_hat = mu.clone();

    for outer in 0..opts.max_outer {
        let (_val, f, inner_iters, _ginf, exit) =
            inner_minimize(problem, &lam, &mu, rho, omega, opts, &mut x, &mut c, &mut g);
        inner_total += inner_iters;
        fobj = f;

        if !f.is_finite() || x.iter().any(|v| !v.is_finite()) {
            status = SolveStatus::Degenerate;
            history.push(OuterRecord {
                outer,
                inner_iterations: inner_iters,
                objective: f,
                theta: R::infinity(),
                rho,
                omega,
                accepted: false,
            });
            break;
        }

        // Acceptance measure: equality residual and complementarity-aware
        // inequality violation.
        let mut theta = inf_norm(&c);
        for i in 0..m_i {
            theta = theta.max(g[i].max(-mu[i] / rho).abs());
        }

        // First-order updated multiplier candidates. The raw step rho*c is
        // only meaningful at a solved subproblem; clamp it so one noisy
        // outer cannot catapult a multiplier orders of magnitude past its
        // target (the next solved outer re-estimates it anyway).
        let step_cap_e = R::lit(100.0) * (R::one() + inf_norm(&lam));
        for i in 0..m_e {
            let step = (rho * c[i]).max(-step_cap_e).min(step_cap_e);
            lam_hat[i] = (lam[i] + step).max(-opts.mult_max).min(opts.mult_max);
        }
        let step_cap_i = R::lit(100.0) * (R::one() + inf_norm(&mu));
        for i in 0..m_i {
            let step = (rho * g[i]).max(-step_cap_i).min(step_cap_i);
            mu_hat[i] = (mu[i] + step).max(R::zero()).min(opts.mult_max);
        }
        kkt = check_kkt(problem, &x, &lam_hat, &mu_hat);
        let stat_ok = kkt.stationarity <= opts.opt_tol;
        let feas_ok = kkt.feasibility <= opts.feas_tol;
        let comp_ok =
            kkt.complementarity <= opts.feas_tol.max(opts.opt_tol) * R::lit(10.0);

        // Feasibility must improve fourfold outer over outer (with the
        // target tolerance as a floor) to keep the current penalty; the
        // comparison is against the previous outer, not the running best,
        // so a transient spike after a multiplier update or a warm start
        // is not punished with an escalation storm.
        let accepted = theta <= opts.feas_tol.max(theta_prev / R::lit(4.0));
        history.push(OuterRecord {
            outer,
            inner_iterations: inner_iters,
            objective: f,
            theta,
            rho,
            omega,
            accepted,
        });

        if stat_ok && feas_ok && comp_ok {
            lam.copy_from_slice(&lam_hat);
            mu.copy_from_slice(&mu_hat);
            status = SolveStatus::Converged;
            break;
        }

        // Constraint values from an unsolved subproblem mislead both the
        // multiplier update and the penalty schedule; trust them only when
        // the inner met its tolerance or the iterate is already essentially
        // feasible (where even a noise-limited gradient leaves c and g
        // accurate at theta scale).
        let trusted =
            exit == InnerExit::MetTol || theta <= opts.feas_tol * R::lit(100.0);
        theta_prev = theta;

        if accepted && trusted {
            lam.copy_from_slice(&lam_hat);
            mu.copy_from_slice(&mu_hat);
            omega = (omega / R::lit(5.0)).max(opts.opt_tol);
        } else if accepted || exit == InnerExit::HitCap {
            // Feasibility progressed but the subproblem is unfinished (or
            // simply ran out of budget): its constraint values are not
            // reliable enough for a multiplier update, and its theta says
            // nothing about whether the penalty is too weak. Resume the same
            // subproblem next outer with a fresh inner budget.
        } else {
            rho = rho * opts.rho_mult;
            if rho > opts.rho_max {
                status = SolveStatus::Degenerate;
                break;
            }
        }
    }

    SolveResult {
        x,
        objective: fobj,
        eq_multipliers: lam,
        ineq_multipliers: mu,
        status,
        outer_iterations: history.len(),
        inner_iterations: inner_total,
        kkt,
        history,
    }
}

/// Runs [`solve_warm`] from every start in parallel; results come back in
/// input order (deterministic regardless of thread count). Starts may carry
/// warm multipliers.
pub fn multi_start<R: Real, P: NlpProblem<R>>(
    problem: &P,
    starts: &[MultiStartSeed<R>],
    opts: &SolveOptions<R>,
) -> Vec<SolveResult<R>> {
    starts
        .par_iter()
        .map(|s| {
            solve_warm(
                problem,
                &s.x0,
                s.eq_mult.as_deref(),
                s.ineq_mult.as_deref(),
                opts,
            )
        })
        .collect()
}

/// One multi-start initial point plus optional warm multipliers.
#[derive(Debug, Clone)]
pub struct MultiStartSeed<R: Real> {
    pub x0: Vec<R>,
    pub eq_mult: Option<Vec<R>>,
    pub ineq_mult: Option<Vec<R>>,
}

impl<R: Real> MultiStartSeed<R> {
    pub fn cold(x0: Vec<R>) -> Self {
        Self { x0, eq_mult: None, ineq_mult: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rosenbrock;

    impl NlpProblem<f64> for Rosenbrock {
        fn n_vars(&self) -> usize {
            2
        }

        fn objective_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
            let (a, b) = (1.0, 100.0);
            let f = (a - x[0]).powi(2) + b * (x[1] - x[0] * x[0]).powi(2);
            grad[0] = -2.0 * (a - x[0]) - 4.0 * b * x[0] * (x[1] - x[0] * x[0]);
            grad[1] = 2.0 * b * (x[1] - x[0] * x[0]);
            f
        }
    }

    #[test]
    fn rosenbrock_unconstrained() {
        let r = solve(&Rosenbrock, &[-1.2, 1.0], &SolveOptions::default());
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6, "{:?}", r.x);
        assert!((r.x[1] - 1.0).abs() < 1e-6);
        assert!(r.kkt.stationarity <= 1e-8);
    }

    /// min ‖x − p‖²  s.t.  aᵀx = b; solution is the projection of p onto
    /// the plane, multiplier λ* = 2(aᵀp − b)/‖a‖².
    struct PlaneProjection {
        p: [f64; 3],
        a: [f64; 3],
        b: f64,
        scale: f64,
    }

    impl NlpProblem<f64> for PlaneProjection {
        fn n_vars(&self) -> usize {
            3
        }

        fn n_eq(&self) -> usize {
            1
        }

        fn objective_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
            let mut f = 0.0;
            for i in 0..3 {
                f += (x[i] - self.p[i]).powi(2);
                grad[i] = self.scale * 2.0 * (x[i] - self.p[i]);
            }
            self.scale * f
        }

        fn eq_constraints(&self, x: &[f64], out: &mut [f64]) {
            out[0] = dot(&self.a, x) - self.b;
        }

        fn eq_jac_t_mul(&self, _x: &[f64], y: &[f64], out: &mut [f64]) {
            for i in 0..3 {
                out[i] += self.a[i] * y[0];
            }
        }
    }

    #[test]
    fn plane_projection_matches_analytic() {
        let prob = PlaneProjection { p: [1.0, 2.0, 3.0], a: [1.0, 1.0, 1.0], b: 1.0, scale: 1.0 };
        let r = solve(&prob, &[0.0; 3], &SolveOptions::default());
        assert_eq!(r.status, SolveStatus::Converged);
        let shift = (1.0 + 2.0 + 3.0 - 1.0) / 3.0;
        for i in 0..3 {
            assert!((r.x[i] - (prob.p[i] - shift)).abs() < 1e-7, "{:?}", r.x);
        }
        let lam_expected = 2.0 * shift;
        assert!((r.eq_multipliers[0] - lam_expected).abs() < 1e-6, "{:?}", r.eq_multipliers);
    }

    #[test]
    fn plane_projection_scaled_objective() {
        // A 10⁶ objective scaling must not break convergence (the scaled
        // stationarity test keys off multiplier magnitude).
        let prob =
            PlaneProjection { p: [1.0, 2.0, 3.0], a: [1.0, 1.0, 1.0], b: 1.0, scale: 1e6 };
        let r = solve(&prob, &[0.0; 3], &SolveOptions::default());
        assert_eq!(r.status, SolveStatus::Converged);
        let shift = 5.0 / 3.0;
        for i in 0..3 {
            assert!((r.x[i] - (prob.p[i] - shift)).abs() < 1e-6, "{:?}", r.x);
        }
    }

    /// Chebyshev-style toy: min α subject to w(F1(x)−β1) ≤ α,
    /// (1−w)(F2(x)−β2) ≤ α, α ≥ 0 with F1 = (x−1)², F2 = (x+1)².
    /// At w = 1/2 the balanced solution is x = 0, α = 1/2.
    struct ChebyToy {
        w: f64,
    }

    impl NlpProblem<f64> for ChebyToy {
        fn n_vars(&self) -> usize {
            2 // (x, α)
        }

        fn n_ineq(&self) -> usize {
            3
        }

        fn objective_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
            grad[0] = 0.0;
            grad[1] = 1.0;
            x[1]
        }

        fn ineq_constraints(&self, x: &[f64], out: &mut [f64]) {
            out[0] = self.w * (x[0] - 1.0).powi(2) - x[1];
            out[1] = (1.0 - self.w) * (x[0] + 1.0).powi(2) - x[1];
            out[2] = -x[1];
        }

        fn ineq_jac_t_mul(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
            out[0] += y[0] * self.w * 2.0 * (x[0] - 1.0)
                + y[1] * (1.0 - self.w) * 2.0 * (x[0] + 1.0);
            out[1] += -y[0] - y[1] - y[2];
        }
    }

    #[test]
    fn chebyshev_toy_balances_both_terms() {
        let r = solve(&ChebyToy { w: 0.5 }, &[0.7, 2.0], &SolveOptions::default());
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.x[0].abs() < 1e-6, "{:?}", r.x);
        assert!((r.x[1] - 0.5).abs() < 1e-6);
        // Both scalarization rows active with positive multipliers summing
        // to ~1 (gradient of α balances).
        assert!(r.ineq_multipliers[0] > 0.1);
        assert!(r.ineq_multipliers[1] > 0.1);
        assert!(r.ineq_multipliers[2].abs() < 1e-6);
        assert!(
            (r.ineq_multipliers[0] + r.ineq_multipliers[1] + r.ineq_multipliers[2] - 1.0).abs()
                < 1e-6
        );
    }

    /// min x² s.t. x ≥ 1 → x* = 1, μ* = 2.
    struct HalfLine;

    impl NlpProblem<f64> for HalfLine {
        fn n_vars(&self) -> usize {
            1
        }

        fn n_ineq(&self) -> usize {
            1
        }

        fn objective_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
            grad[0] = 2.0 * x[0];
            x[0] * x[0]
        }

        fn ineq_constraints(&self, x: &[f64], out: &mut [f64]) {
            out[0] = 1.0 - x[0];
        }

        fn ineq_jac_t_mul(&self, _x: &[f64], y: &[f64], out: &mut [f64]) {
            out[0] -= y[0];
        }
    }

    #[test]
    fn active_inequality_multiplier() {
        let r = solve(&HalfLine, &[3.0], &SolveOptions::default());
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.x[0] - 1.0).abs() < 1e-7);
        assert!((r.ineq_multipliers[0] - 2.0).abs() < 1e-5);
        // μ ≥ 0 structurally.
        assert!(r.ineq_multipliers.iter().all(|&m| m >= 0.0));
    }

    /// Convex QP with equality constraint, checked against the direct KKT
    /// system solve.
    struct Qp;

    impl Qp {
        const Q: [[f64; 2]; 2] = [[4.0, 1.0], [1.0, 3.0]];
        const B: [f64; 2] = [1.0, 2.0];
    }

    impl NlpProblem<f64> for Qp {
        fn n_vars(&self) -> usize {
            2
        }

        fn n_eq(&self) -> usize {
            1
        }

        fn objective_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
            let qx = [
                Self::Q[0][0] * x[0] + Self::Q[0][1] * x[1],
                Self::Q[1][0] * x[0] + Self::Q[1][1] * x[1],
            ];
            grad[0] = qx[0] - Self::B[0];
            grad[1] = qx[1] - Self::B[1];
            0.5 * (x[0] * qx[0] + x[1] * qx[1]) - dot(&Self::B, x)
        }

        fn eq_constraints(&self, x: &[f64], out: &mut [f64]) {
            out[0] = x[0] + x[1] - 1.0;
        }

        fn eq_jac_t_mul(&self, _x: &[f64], y: &[f64], out: &mut [f64]) {
            out[0] += y[0];
            out[1] += y[0];
        }
    }

    fn solve3(mut a: [[f64; 4]; 3]) -> [f64; 3] {
        // Tiny Gaussian elimination with partial pivoting for the KKT check.
        for col in 0..3 {
            let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
            a.swap(col, piv);
            for row in col + 1..3 {
                let f = a[row][col] / a[col][col];
                for k in col..4 {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
        let mut x = [0.0; 3];
        for row in (0..3).rev() {
            let mut s = a[row][3];
            for k in row + 1..3 {
                s -= a[row][k] * x[k];
            }
            x[row] = s / a[row][row];
        }
        x
    }

    #[test]
    fn qp_matches_kkt_system() {
        // KKT: [Q aᵀ; a 0][x; λ] = [b; 1] with a = (1,1).
        let sol = solve3([
            [4.0, 1.0, 1.0, 1.0],
            [1.0, 3.0, 1.0, 2.0],
            [1.0, 1.0, 0.0, 1.0],
        ]);
        let r = solve(&Qp, &[5.0, -3.0], &SolveOptions::default());
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.x[0] - sol[0]).abs() < 1e-7, "{:?} vs {:?}", r.x, sol);
        assert!((r.x[1] - sol[1]).abs() < 1e-7);
        assert!((r.eq_multipliers[0] - sol[2]).abs() < 1e-6);
        let kkt = check_kkt(&Qp, &r.x, &r.eq_multipliers, &[]);
        assert!(kkt.stationarity < 1e-7);
        assert!(kkt.feasibility < 1e-8);
    }

    #[test]
    fn check_kkt_flags_non_solutions() {
        let at_bad = check_kkt(&Qp, &[5.0, -3.0], &[0.0], &[]);
        // Stationarity is scaled by the gradient magnitude, so a far-off
        // point saturates near 1 rather than growing without bound.
        assert!(at_bad.stationarity > 0.5, "{at_bad:?}");
        assert!(at_bad.feasibility > 0.5);
    }

    /// Infeasible: x ≥ 1 and x ≤ −1 simultaneously.
    struct Infeasible;

    impl NlpProblem<f64> for Infeasible {
        fn n_vars(&self) -> usize {
            1
        }

        fn n_ineq(&self) -> usize {
            2
        }

        fn objective_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
            grad[0] = 2.0 * x[0];
            x[0] * x[0]
        }

        fn ineq_constraints(&self, x: &[f64], out: &mut [f64]) {
            out[0] = 1.0 - x[0];
            out[1] = x[0] + 1.0;
        }

        fn ineq_jac_t_mul(&self, _x: &[f64], y: &[f64], out: &mut [f64]) {
            out[0] += -y[0] + y[1];
        }
    }

    #[test]
    fn infeasible_problem_does_not_report_convergence() {
        let r = solve(&Infeasible, &[0.0], &SolveOptions::default());
        assert_ne!(r.status, SolveStatus::Converged);
        assert!(r.kkt.feasibility > 0.5);
    }

    /// Double well (x² − 1)²: two strict minima at ±1.
    struct DoubleWell;

    impl NlpProblem<f64> for DoubleWell {
        fn n_vars(&self) -> usize {
            1
        }

        fn objective_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
            let t = x[0] * x[0] - 1.0;
            grad[0] = 4.0 * x[0] * t;
            t * t
        }
    }

    #[test]
    fn multi_start_finds_both_wells() {
        let starts = vec![
            MultiStartSeed::cold(vec![-2.0]),
            MultiStartSeed::cold(vec![2.0]),
            MultiStartSeed::cold(vec![0.5]),
        ];
        let results = multi_start(&DoubleWell, &starts, &SolveOptions::default());
        assert_eq!(results.len(), 3);
        assert!(results[0].is_converged() && (results[0].x[0] + 1.0).abs() < 1e-6);
        assert!(results[1].is_converged() && (results[1].x[0] - 1.0).abs() < 1e-6);
        assert!(results[2].is_converged() && (results[2].x[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn history_feasibility_is_monotone_over_accepted_steps() {
        let prob = PlaneProjection { p: [3.0, -1.0, 2.0], a: [2.0, 0.0, 1.0], b: 4.0, scale: 1.0 };
        let r = solve(&prob, &[10.0, 10.0, 10.0], &SolveOptions::default());
        assert_eq!(r.status, SolveStatus::Converged, "kkt {:?} history {:#?}", r.kkt, r.history);
        let mut best = f64::INFINITY;
        for rec in r.history.iter().filter(|rec| rec.accepted) {
            assert!(rec.theta <= best.max(1e-8) || rec.theta <= 1e-8, "{:?}", r.history);
            best = best.min(rec.theta);
        }
    }

    #[test]
    fn warm_start_converges_in_fewer_inner_iterations() {
        let prob = PlaneProjection { p: [1.0, 2.0, 3.0], a: [1.0, 1.0, 1.0], b: 1.0, scale: 1.0 };
        let cold = solve(&prob, &[0.0; 3], &SolveOptions::default());
        let warm = solve_warm(
            &prob,
            &cold.x,
            Some(&cold.eq_multipliers),
            None,
            &SolveOptions::default(),
        );
        assert_eq!(warm.status, SolveStatus::Converged);
        assert!(warm.inner_iterations <= cold.inner_iterations);
    }
}
