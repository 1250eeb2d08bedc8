//! Scalarization layer and front construction.
//!
//! A weight `w ∈ [0,1)` turns the bi-objective curve problem into a scalar
//! NLP in one of two ways:
//!
//! * **Chebyshev**: minimize the attainment level `α` subject to
//!   `w·(F1 − β1) ≤ α`, `(1−w)·(F2 − β2) ≤ α`, `α ≥ 0`, with `β` a utopian
//!   reference point sitting at or below the attainable objective values.
//!   Every weakly Pareto-optimal point solves such a problem for some `w`,
//!   so sweeping `w` can trace the whole front, including nonconvex parts.
//! * **Weighted sum**: minimize `w·F1 + (1−w)·F2`, equivalently the tension
//!   form `(1−w)·(F2 + τ·F1)` with `τ = w/(1−w)`. Cheaper (no auxiliary
//!   variable) but blind to nonconvex front regions.
//!
//! The sweep pipeline is: ideal costs → essential weight interval
//! `[w0, wf]` → uniform weight grid → per-weight solves (warm-chained along
//! the grid plus randomized multistart restarts in parallel) → dominance
//! weeding → gap detection into segments.

use std::ops::Range;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::ManifoldModel;
use crate::nlp::{self, HessModel, NlpProblem, SolveOptions, SolveStatus};
use crate::real::Real;
use crate::transcription::{DiscretizedCurve, Transcription};

/// Relative dominance tolerance: a point must be beaten by more than this
/// (relative) margin in one objective to count as dominated, so near-ties
/// are kept as distinct weak-Pareto points.
pub const EPS_DOM: f64 = 1e-6;

/// Default weight cap. The `F1` infimum is asymptotic (pushing `w → 1`
/// sends `F2 → ∞`), so sweeps stop strictly below 1 to keep the scalar
/// problems bounded.
pub const W_CAP_DEFAULT: f64 = 1.0 - 1e-3;

/// Which scalar subproblem a weight is solved through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarizationMode {
    /// Min-max attainment form; finds nonconvex front regions.
    Chebyshev,
    /// Plain convex combination `w·F1 + (1−w)·F2`.
    WeightedSum,
}

impl ScalarizationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScalarizationMode::Chebyshev => "chebyshev",
            ScalarizationMode::WeightedSum => "weighted_sum",
        }
    }
}

/// Utopian reference point `β = (β1, β2)` for the Chebyshev scalarization,
/// stored together with the offsets `ε_i ≥ 0` used when deriving it from
/// ideal costs via `β_i = F_i^* − ε_i`. The default is `β = (0, 0)`, valid
/// whenever both objectives are nonnegative (always the case here: both are
/// integrals of squared norms).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtopianConfig<R: Real> {
    pub beta1: R,
    pub beta2: R,
    pub eps1: R,
    pub eps2: R,
}

impl<R: Real> Default for UtopianConfig<R> {
    fn default() -> Self {
        Self { beta1: R::zero(), beta2: R::zero(), eps1: R::zero(), eps2: R::zero() }
    }
}

impl<R: Real> UtopianConfig<R> {
    /// Derives `β_i = F_i^* − ε_i` from computed ideal costs; requires
    /// `ε_i ≥ 0` so that `β_i ≤ F_i^*`.
    pub fn from_ideal(report: &IdealCostReport<R>, eps1: R, eps2: R) -> Result<Self> {
        if !(eps1 >= R::zero()) || !(eps2 >= R::zero()) {
            return Err(Error::InvalidArgument(format!(
                "utopian offsets must be nonnegative, got eps1={eps1}, eps2={eps2}"
            )));
        }
        Ok(Self {
            beta1: report.f1_star - eps1,
            beta2: report.f2_star - eps2,
            eps1,
            eps2,
        })
    }
}

/// Ideal costs of the two single-objective problems plus the cross values
/// of each objective at the other's minimizer.
#[derive(Debug, Clone)]
pub struct IdealCostReport<R: Real> {
    /// Estimated infimum of `F1`. `F1` generally has no minimizer (its
    /// infimum is approached only as `F2 → ∞`), so this is the `F1` value
    /// of a capped-weight solve; see [`IdealCostReport::f1_asymptotic`].
    pub f1_star: R,
    /// Minimum of `F2` alone (the Riemannian cubic's objective value).
    pub f2_star: R,
    /// `F1` evaluated at the `F2` minimizer.
    pub f1_bar: R,
    /// `F2` evaluated at the curve of the `F1` estimate.
    pub f2_bar: R,
    /// `f1_star` is an asymptotic estimate taken at the weight cap, not a
    /// certified minimum.
    pub f1_asymptotic: bool,
    /// Weight cap the `F1` estimate was computed at.
    pub w_cap: R,
    /// Curve realizing the `F1` estimate.
    pub f1_curve: DiscretizedCurve<R>,
    /// Curve minimizing `F2` (the Riemannian cubic).
    pub f2_curve: DiscretizedCurve<R>,
}

/// Essential weight interval `[w0, wf]`: weights below `w0` all return the
/// `F2`-minimizer boundary point, weights above `wf` the `F1`-end boundary
/// point, so only this interval produces distinct front points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssentialInterval<R: Real> {
    pub w0: R,
    pub wf: R,
}

impl<R: Real> EssentialInterval<R> {
    /// A collapsed interval (`wf ≤ w0` up to sweep resolution) signals a
    /// degenerate front — a single point, as for boundary data solved
    /// exactly by a geodesic. The tolerance absorbs the tiny positive
    /// residual costs a converged solve leaves in place of exact zeros;
    /// an interval this narrow cannot separate weights into distinct
    /// front points anyway.
    pub fn is_collapsed(&self) -> bool {
        !(self.wf > self.w0 + R::lit(1e-4))
    }
}

/// One solved scalarization: a point of (or candidate for) the front.
#[derive(Debug, Clone)]
pub struct FrontPoint<R: Real> {
    /// Weight the point was solved at.
    pub w: R,
    pub f1: R,
    pub f2: R,
    /// Attainment level `max(w·(F1−β1), (1−w)·(F2−β2), 0)`. For Chebyshev
    /// solves this is the solver's auxiliary variable; for weighted-sum
    /// solves it is evaluated from the formula after the fact.
    pub alpha: R,
    pub mode: ScalarizationMode,
    pub status: SolveStatus,
    /// Set by [`weed_dominated`]: some other point improves on this one
    /// beyond the dominance tolerance.
    pub dominated: bool,
    pub curve: DiscretizedCurve<R>,
    /// Wall-clock seconds spent in the NLP solve for this point.
    pub solve_seconds: f64,
}

/// A computed Pareto front: weeded points plus segment structure.
#[derive(Debug, Clone)]
pub struct ParetoFront<R: Real> {
    /// Converged, mutually non-dominated points sorted by `F1` ascending
    /// (`F2` is non-increasing along this order, strictly decreasing beyond
    /// the dominance tolerance).
    pub points: Vec<FrontPoint<R>>,
    /// Maximal index runs of `points` with no detected gap between
    /// consecutive members; the ranges partition `0..points.len()`.
    pub segments: Vec<Range<usize>>,
    /// Everything else the sweep solved, kept for diagnostics: dominated
    /// local solutions (flagged) and non-converged solves.
    pub rejected: Vec<FrontPoint<R>>,
    pub ideal: IdealCostReport<R>,
    pub interval: EssentialInterval<R>,
}

/// Sweep parameters. The defaults match the solver defaults used for the
/// reported instances; `multistart_k > 0` is what finds disconnected front
/// branches (distinct local minima) on the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig<R: Real> {
    /// Number of weights on the uniform grid over `[w0, min(wf, w_cap)]`.
    pub n_weights: usize,
    /// Upper weight cap, strictly below 1.
    pub w_cap: R,
    /// Randomized restarts per weight in addition to the warm-chained solve.
    pub multistart_k: usize,
    /// Rounds of bisection refinement inserting weights between front
    /// points that jump by more than `refine_spread × median` in normalized
    /// objective space. 0 disables refinement.
    pub refine_rounds: usize,
    pub refine_spread: R,
    pub mode: ScalarizationMode,
    /// Scale of the uniform perturbation applied to restart initializers
    /// (chart units on the torus, ambient units otherwise).
    pub perturbation: R,
    /// Seed for the deterministic restart stream.
    pub seed: u64,
    /// Segment splitting threshold; see [`detect_gaps`].
    pub gap_factor: R,
}

impl<R: Real> Default for SweepConfig<R> {
    fn default() -> Self {
        Self {
            n_weights: 20,
            w_cap: R::lit(W_CAP_DEFAULT),
            multistart_k: 0,
            refine_rounds: 0,
            refine_spread: R::lit(3.0),
            mode: ScalarizationMode::Chebyshev,
            perturbation: R::lit(0.2),
            seed: 0,
            gap_factor: R::lit(10.0),
        }
    }
}

// ---------------------------------------------------------------------------
// NLP adapters
// ---------------------------------------------------------------------------

/// Weighted-sum subproblem: minimize `w·F1 + (1−w)·F2` over the transcribed
/// nodal states subject to the defect/boundary/manifold constraints.
pub struct WeightedSumProblem<'a, R: Real> {
    tr: &'a Transcription<R>,
    w: R,
}

impl<'a, R: Real> WeightedSumProblem<'a, R> {
    pub fn new(tr: &'a Transcription<R>, w: R) -> Result<Self> {
        if !(w >= R::zero() && w < R::one()) {
            return Err(Error::InvalidArgument(format!("weight must lie in [0,1), got {w}")));
        }
        Ok(Self { tr, w })
    }

    pub fn weight(&self) -> R {
        self.w
    }
}

impl<R: Real> NlpProblem<R> for WeightedSumProblem<'_, R> {
    fn n_vars(&self) -> usize {
        self.tr.n_vars()
    }

    fn n_eq(&self) -> usize {
        self.tr.n_eq()
    }

    fn objective_grad(&self, x: &[R], grad: &mut [R]) -> R {
        grad.fill(R::zero());
        let w2 = R::one() - self.w;
        let obj = self.tr.objectives(x);
        let mut g1 = vec![R::zero(); x.len()];
        self.tr.grad_f1(x, &mut g1);
        self.tr.grad_f2(x, grad);
        for i in 0..x.len() {
            grad[i] = self.w * g1[i] + w2 * grad[i];
        }
        self.w * obj.f1 + w2 * obj.f2
    }

    fn eq_constraints(&self, x: &[R], out: &mut [R]) {
        self.tr.constraints(x, out);
    }

    fn eq_jac_t_mul(&self, x: &[R], y: &[R], out: &mut [R]) {
        self.tr.jac_t_mul(x, y, out);
    }

    fn al_hess_diag(&self, x: &[R], rho: R, out: &mut [R]) {
        out.fill(R::zero());
        self.tr.objective_hess_diag(self.w, R::one() - self.w, x, out);
        let mut jtj = vec![R::zero(); out.len()];
        self.tr.jac_col_sq_sums(x, &mut jtj);
        for (o, j) in out.iter_mut().zip(jtj.iter()) {
            *o = *o + rho * *j;
        }
    }

    fn al_hess_model(
        &self,
        x: &[R],
        eq_mult: &[R],
        _ineq_mult: &[R],
        rho: R,
    ) -> Option<HessModel<R>> {
        Some(HessModel {
            band: self.tr.al_gn_band(self.w, R::one() - self.w, x, eq_mult, rho),
            low_rank: vec![],
        })
    }
}

/// Chebyshev (min-max attainment) subproblem over `z = [x; α]`:
/// minimize `α` subject to the transcription equalities on `x` and
/// `w·(F1(x) − β1) − α ≤ 0`, `(1−w)·(F2(x) − β2) − α ≤ 0`, `−α ≤ 0`.
pub struct ChebyshevProblem<'a, R: Real> {
    tr: &'a Transcription<R>,
    w: R,
    beta1: R,
    beta2: R,
}

impl<'a, R: Real> ChebyshevProblem<'a, R> {
    pub fn new(tr: &'a Transcription<R>, w: R, u: &UtopianConfig<R>) -> Result<Self> {
        if !(w >= R::zero() && w < R::one()) {
            return Err(Error::InvalidArgument(format!("weight must lie in [0,1), got {w}")));
        }
        Ok(Self { tr, w, beta1: u.beta1, beta2: u.beta2 })
    }

    /// The two attainment terms `(w·(F1−β1), (1−w)·(F2−β2))` at `x`.
    fn terms(&self, x: &[R]) -> (R, R) {
        let obj = self.tr.objectives(x);
        (
            self.w * (obj.f1 - self.beta1),
            (R::one() - self.w) * (obj.f2 - self.beta2),
        )
    }
}

impl<R: Real> NlpProblem<R> for ChebyshevProblem<'_, R> {
    fn n_vars(&self) -> usize {
        self.tr.n_vars() + 1
    }

    fn n_eq(&self) -> usize {
        self.tr.n_eq()
    }

    fn n_ineq(&self) -> usize {
        3
    }

    fn objective_grad(&self, x: &[R], grad: &mut [R]) -> R {
        grad.fill(R::zero());
        let n = self.tr.n_vars();
        grad[n] = R::one();
        x[n]
    }

    fn eq_constraints(&self, x: &[R], out: &mut [R]) {
        self.tr.constraints(&x[..self.tr.n_vars()], out);
    }

    fn eq_jac_t_mul(&self, x: &[R], y: &[R], out: &mut [R]) {
        let n = self.tr.n_vars();
        self.tr.jac_t_mul(&x[..n], y, &mut out[..n]);
    }

    fn ineq_constraints(&self, x: &[R], out: &mut [R]) {
        let n = self.tr.n_vars();
        let alpha = x[n];
        let (t1, t2) = self.terms(&x[..n]);
        out[0] = t1 - alpha;
        out[1] = t2 - alpha;
        out[2] = -alpha;
    }

    fn ineq_jac_t_mul(&self, x: &[R], y: &[R], out: &mut [R]) {
        let n = self.tr.n_vars();
        let xs = &x[..n];
        if y[0] != R::zero() {
            let mut g = vec![R::zero(); n];
            self.tr.grad_f1(xs, &mut g);
            let c = y[0] * self.w;
            for i in 0..n {
                out[i] = out[i] + c * g[i];
            }
        }
        if y[1] != R::zero() {
            let mut g = vec![R::zero(); n];
            self.tr.grad_f2(xs, &mut g);
            let c = y[1] * (R::one() - self.w);
            for i in 0..n {
                out[i] = out[i] + c * g[i];
            }
        }
        out[n] = out[n] - (y[0] + y[1] + y[2]);
    }

    fn al_hess_model(
        &self,
        x: &[R],
        eq_mult: &[R],
        ineq_mult: &[R],
        rho: R,
    ) -> Option<HessModel<R>> {
        let n = self.tr.n_vars();
        let xs = &x[..n];
        let alpha = x[n];
        let (t1, t2) = self.terms(xs);
        // Quadratic-branch tests for the three inequality rows, tie
        // inclusive: at a fresh warm start α sits exactly on the attainment
        // boundary (g = 0, μ = 0), and the penalty curvature of that row is
        // what makes the α direction tractable.
        let b1 = ineq_mult[0] + rho * (t1 - alpha) >= R::zero();
        let b2 = ineq_mult[1] + rho * (t2 - alpha) >= R::zero();
        let b3 = ineq_mult[2] - rho * alpha >= R::zero();
        // Multiplier weights for the ∇²g parts (zero exactly on the branch
        // boundary, matching the true Hessian).
        let l1 = (ineq_mult[0] + rho * (t1 - alpha)).max(R::zero());
        let l2 = (ineq_mult[1] + rho * (t2 - alpha)).max(R::zero());
        // Objective curvature enters through the active attainment rows:
        // λ̂₁·w·∇²F1 + λ̂₂·(1−w)·∇²F2 in Gauss–Newton form.
        let mut band =
            self.tr
                .al_gn_band(l1 * self.w, l2 * (R::one() - self.w), xs, eq_mult, rho);
        band.push_rows(1);
        // The α diagonal: the `α ≥ 0` row contributes ρ when active; the
        // attainment rows contribute through the dense rank-one terms below.
        // A unit ridge keeps the band factorable when no row is active (the
        // true curvature is then zero and the objective gradient is ±1, so a
        // unit step is the right scale).
        band.add(n, n, if b3 { rho + R::one() } else { R::one() });
        // Penalty curvature ρ·∇g∇gᵀ of the two dense attainment rows.
        let mut low_rank = Vec::new();
        if b1 {
            let mut u = vec![R::zero(); n + 1];
            self.tr.grad_f1(xs, &mut u[..n]);
            for t in u[..n].iter_mut() {
                *t = *t * self.w;
            }
            u[n] = -R::one();
            low_rank.push((rho, u));
        }
        if b2 {
            let mut u = vec![R::zero(); n + 1];
            self.tr.grad_f2(xs, &mut u[..n]);
            let w2 = R::one() - self.w;
            for t in u[..n].iter_mut() {
                *t = *t * w2;
            }
            u[n] = -R::one();
            low_rank.push((rho, u));
        }
        Some(HessModel { band, low_rank })
    }
}

// ---------------------------------------------------------------------------
// Ideal costs and essential interval
// ---------------------------------------------------------------------------

/// Solves the two single-objective problems: `F2` alone (weighted sum at
/// `w = 0`, the Riemannian cubic) and the asymptotic `F1` estimate
/// (Chebyshev at `w = w_cap`). Both start from the default initializer.
/// Point solves canonicalize their acceleration profile
/// ([`Transcription::repair_accelerations`]), which pins down the otherwise
/// non-unique companion cost `F̄2` of the `F1` stage.
pub fn solve_ideal_costs<R: Real>(
    tr: &Transcription<R>,
    u: &UtopianConfig<R>,
    w_cap: R,
    opts: &SolveOptions<R>,
) -> Result<IdealCostReport<R>> {
    if !(w_cap > R::zero() && w_cap < R::one()) {
        return Err(Error::InvalidArgument(format!("w_cap must lie in (0,1), got {w_cap}")));
    }

    let f2_solve = solve_point_impl(tr, R::zero(), ScalarizationMode::WeightedSum, u, None, None, None, opts)?;
    if f2_solve.point.status != SolveStatus::Converged {
        return Err(Error::SolverFailure(format!(
            "F2 ideal-cost solve ended {} (kkt feasibility/stationarity not met)",
            f2_solve.point.status.as_str()
        )));
    }

    let f1_solve = solve_point_impl(tr, w_cap, ScalarizationMode::Chebyshev, u, None, None, None, opts)?;
    if f1_solve.point.status != SolveStatus::Converged {
        return Err(Error::SolverFailure(format!(
            "F1 ideal-cost solve at the weight cap ended {}",
            f1_solve.point.status.as_str()
        )));
    }

    let report = IdealCostReport {
        f1_star: f1_solve.point.f1,
        f2_star: f2_solve.point.f2,
        f1_bar: f2_solve.point.f1,
        f2_bar: f1_solve.point.f2,
        f1_asymptotic: true,
        w_cap,
        f1_curve: f1_solve.point.curve,
        f2_curve: f2_solve.point.curve,
    };
    // Cross values can only be larger than the ideal ones; a violation means
    // one solve stopped at an inconsistent local minimum.
    let slack1 = R::lit(1e-6) * R::one().max(report.f1_bar.abs());
    let slack2 = R::lit(1e-6) * R::one().max(report.f2_bar.abs());
    if report.f1_star > report.f1_bar + slack1 || report.f2_star > report.f2_bar + slack2 {
        return Err(Error::SolverFailure(format!(
            "inconsistent ideal costs: F1*={} vs F1_bar={}, F2*={} vs F2_bar={}",
            report.f1_star, report.f1_bar, report.f2_star, report.f2_bar
        )));
    }
    Ok(report)
}

/// Essential weight interval from ideal costs and the utopian point:
/// `w0 = (F2*−β2) / ((F̄1−β1) + (F2*−β2))` and the mirrored
/// `wf = (F̄2−β2) / ((F1*−β1) + (F̄2−β2))`.
pub fn essential_interval<R: Real>(
    r: &IdealCostReport<R>,
    u: &UtopianConfig<R>,
) -> Result<EssentialInterval<R>> {
    let d0 = (r.f1_bar - u.beta1) + (r.f2_star - u.beta2);
    let df = (r.f1_star - u.beta1) + (r.f2_bar - u.beta2);
    if !(d0 > R::zero()) || !(df > R::zero()) {
        return Err(Error::DegenerateScalarization(format!(
            "essential-interval denominators must be positive, got {d0} and {df} \
             (utopian point not below the attainable objectives?)"
        )));
    }
    Ok(EssentialInterval { w0: (r.f2_star - u.beta2) / d0, wf: (r.f2_bar - u.beta2) / df })
}

// ---------------------------------------------------------------------------
// Point solves
// ---------------------------------------------------------------------------

/// Attainment level `max(w·(F1−β1), (1−w)·(F2−β2), 0)`.
fn attainment<R: Real>(w: R, f1: R, f2: R, u: &UtopianConfig<R>) -> R {
    (w * (f1 - u.beta1))
        .max((R::one() - w) * (f2 - u.beta2))
        .max(R::zero())
}

/// A solved point together with the raw solver state needed to warm-start
/// the neighboring weight.
struct PointSolve<R: Real> {
    point: FrontPoint<R>,
    /// Full decision vector (`x`, plus the trailing `α` in Chebyshev mode).
    x: Vec<R>,
    eq_mult: Vec<R>,
    ineq_mult: Vec<R>,
}

#[allow(clippy::too_many_arguments)]
fn solve_point_impl<R: Real>(
    tr: &Transcription<R>,
    w: R,
    mode: ScalarizationMode,
    u: &UtopianConfig<R>,
    init: Option<&[R]>,
    eq_mult: Option<&[R]>,
    ineq_mult: Option<&[R]>,
    opts: &SolveOptions<R>,
) -> Result<PointSolve<R>> {
    let n = tr.n_vars();
    if let Some(x0) = init {
        if x0.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
        }
    }
    let x0: Vec<R> = match init {
        Some(s) => s.to_vec(),
        None => tr.linear_init(),
    };
    let started = Instant::now();
    // Solutions are canonicalized to the F2-minimal acceleration profile.
    // Where the scalarization weights F2 this is a no-op at convergence;
    // where it does not (a slack Chebyshev row near the weight cap) it
    // replaces an arbitrary flat-family member with the honest cost.
    let (result, f1, f2, alpha) = match mode {
        ScalarizationMode::WeightedSum => {
            let prob = WeightedSumProblem::new(tr, w)?;
            let mut res = nlp::solve_warm(&prob, &x0, eq_mult, None, opts);
            tr.repair_accelerations(&mut res.x);
            let obj = tr.objectives(&res.x);
            let alpha = attainment(w, obj.f1, obj.f2, u);
            (res, obj.f1, obj.f2, alpha)
        }
        ScalarizationMode::Chebyshev => {
            let prob = ChebyshevProblem::new(tr, w, u)?;
            let mut z0 = x0;
            let o0 = tr.objectives(&z0);
            // Start α on the attainment boundary so the active-set curvature
            // is present from the first iteration.
            z0.push(attainment(w, o0.f1, o0.f2, u));
            let mut res = nlp::solve_warm(&prob, &z0, eq_mult, ineq_mult, opts);
            tr.repair_accelerations(&mut res.x[..n]);
            let obj = tr.objectives(&res.x[..n]);
            let alpha = res.x[n];
            (res, obj.f1, obj.f2, alpha)
        }
    };
    let solve_seconds = started.elapsed().as_secs_f64();
    let point = FrontPoint {
        w,
        f1,
        f2,
        alpha,
        mode,
        status: result.status,
        dominated: false,
        curve: tr.unpack(&result.x[..n]),
        solve_seconds,
    };
    Ok(PointSolve {
        point,
        x: result.x,
        eq_mult: result.eq_multipliers,
        ineq_mult: result.ineq_multipliers,
    })
}

/// Solves one scalarized subproblem at weight `w ∈ [0,1)`. Solver
/// non-convergence is reported in the returned point's `status`, not as an
/// error; sweeps keep such points for diagnostics but exclude them from
/// fronts. `init` defaults to the transcription's linear initializer.
pub fn solve_point<R: Real>(
    tr: &Transcription<R>,
    w: R,
    mode: ScalarizationMode,
    u: &UtopianConfig<R>,
    init: Option<&DiscretizedCurve<R>>,
    opts: &SolveOptions<R>,
) -> Result<FrontPoint<R>> {
    let packed = match init {
        Some(c) => Some(tr.pack(c)?),
        None => None,
    };
    let ps = solve_point_impl(tr, w, mode, u, packed.as_deref(), None, None, opts)?;
    Ok(ps.point)
}

// ---------------------------------------------------------------------------
// Dominance weeding and gap detection
// ---------------------------------------------------------------------------

/// Flags every point that some other point improves on beyond the relative
/// tolerance [`EPS_DOM`]: `i` is dominated iff there is `j` with
/// `F1_j ≤ F1_i + ε1`, `F2_j ≤ F2_i + ε2`, and strict improvement beyond
/// the tolerance in at least one objective (`ε_k = EPS_DOM·max(1, |F_k_i|)`).
/// Exact ties survive as distinct weak-Pareto points. Objective values must
/// be finite.
pub fn weed_dominated<R: Real>(points: &mut [FrontPoint<R>]) {
    let eps = R::lit(EPS_DOM);
    let vals: Vec<(R, R)> = points.iter().map(|p| (p.f1, p.f2)).collect();
    for (i, p) in points.iter_mut().enumerate() {
        let (f1i, f2i) = vals[i];
        let e1 = eps * R::one().max(f1i.abs());
        let e2 = eps * R::one().max(f2i.abs());
        p.dominated = vals.iter().enumerate().any(|(j, &(f1j, f2j))| {
            j != i
                && f1j <= f1i + e1
                && f2j <= f2i + e2
                && (f1j < f1i - e1 || f2j < f2i - e2)
        });
    }
}

/// Normalized consecutive objective-space distances of an `F1`-sorted point
/// list: each objective is scaled by its range over the list (ranges below
/// 1e-12 fall back to 1 so collapsed fronts yield zero distances).
fn normalized_distances<R: Real>(vals: &[(R, R)]) -> Vec<R> {
    if vals.len() < 2 {
        return Vec::new();
    }
    let tiny = R::lit(1e-12);
    let (mut min1, mut max1) = (vals[0].0, vals[0].0);
    let (mut min2, mut max2) = (vals[0].1, vals[0].1);
    for &(f1, f2) in vals.iter().skip(1) {
        min1 = min1.min(f1);
        max1 = max1.max(f1);
        min2 = min2.min(f2);
        max2 = max2.max(f2);
    }
    let s1 = if max1 - min1 > tiny { max1 - min1 } else { R::one() };
    let s2 = if max2 - min2 > tiny { max2 - min2 } else { R::one() };
    vals.windows(2)
        .map(|p| {
            let d1 = (p[1].0 - p[0].0) / s1;
            let d2 = (p[1].1 - p[0].1) / s2;
            (d1 * d1 + d2 * d2).sqrt()
        })
        .collect()
}

/// Median (average of the two central order statistics for even lengths).
fn median<R: Real>(xs: &[R]) -> R {
    if xs.is_empty() {
        return R::zero();
    }
    let mut s = xs.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        (s[m - 1] + s[m]) / R::lit(2.0)
    }
}

/// Splits an `F1`-sorted front into maximal runs: a gap is declared between
/// consecutive points whose normalized objective-space distance exceeds
/// `gap_factor ×` the median consecutive distance. Fronts with fewer than 3
/// points are a single segment; the returned ranges partition the input.
pub fn detect_gaps<R: Real>(points: &[FrontPoint<R>], gap_factor: R) -> Vec<Range<usize>> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    debug_assert!(
        points.windows(2).all(|p| p[0].f1 <= p[1].f1),
        "detect_gaps expects points sorted by F1"
    );
    if n < 3 {
        return vec![0..n];
    }
    let vals: Vec<(R, R)> = points.iter().map(|p| (p.f1, p.f2)).collect();
    let dists = normalized_distances(&vals);
    let med = median(&dists);
    if !(med > R::zero()) {
        return vec![0..n];
    }
    let mut segments = Vec::new();
    let mut start = 0;
    for (i, &d) in dists.iter().enumerate() {
        if d > gap_factor * med {
            segments.push(start..i + 1);
            start = i + 1;
        }
    }
    segments.push(start..n);
    segments
}

// ---------------------------------------------------------------------------
// Weight sweep
// ---------------------------------------------------------------------------

/// Smooth excursion directions for torus restarts, in units of one full
/// chart period. An initializer that loops the extra way around either
/// angle relaxes into a different basin when one exists, which is how
/// disconnected front branches are found.
const EXCURSIONS: [(f64, f64); 9] = [
    (0.0, 0.0),
    (1.0, 0.0),
    (-1.0, 0.0),
    (0.0, 1.0),
    (0.0, -1.0),
    (1.0, 1.0),
    (-1.0, -1.0),
    (1.0, -1.0),
    (-1.0, 1.0),
];

/// Deterministic per-restart seed mix.
fn restart_seed(base: u64, weight_idx: usize, restart_idx: usize) -> u64 {
    base ^ (weight_idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (restart_idx as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// Builds a randomized restart initializer: the linear initializer, sent on
/// a smooth whole-period excursion on the torus (cycled by restart index),
/// with uniform noise of the given scale on the interior nodes. Endpoint
/// nodes stay exact; sphere positions are renormalized after the noise.
fn restart_init<R: Real>(
    tr: &Transcription<R>,
    rng: &mut ChaCha8Rng,
    scale: R,
    restart_idx: usize,
) -> Vec<R> {
    let mut curve = tr.linear_init_curve();
    let d = curve.dim;
    let n = curve.n_nodes();
    let horizon = curve.grid.tf - curve.grid.t0;
    if matches!(tr.manifold, ManifoldModel::Torus { .. }) {
        let (eu, ev) = EXCURSIONS[restart_idx % EXCURSIONS.len()];
        if eu != 0.0 || ev != 0.0 {
            let two_pi = 2.0 * std::f64::consts::PI;
            let amp = [R::lit(eu * two_pi), R::lit(ev * two_pi)];
            let omega = R::lit(std::f64::consts::PI) / horizon;
            for k in 0..n {
                let t = curve.grid.t(k) - curve.grid.t0;
                let (s, c) = ((omega * t).sin(), (omega * t).cos());
                for i in 0..d {
                    curve.q[k * d + i] = curve.q[k * d + i] + amp[i] * s;
                    curve.v[k * d + i] = curve.v[k * d + i] + amp[i] * omega * c;
                    curve.a[k * d + i] = curve.a[k * d + i] - amp[i] * omega * omega * s;
                }
            }
        }
    }
    for k in 1..n.saturating_sub(1) {
        for i in 0..d {
            curve.q[k * d + i] =
                curve.q[k * d + i] + scale * R::lit(rng.gen_range(-1.0..=1.0));
            curve.v[k * d + i] =
                curve.v[k * d + i] + scale * R::lit(rng.gen_range(-1.0..=1.0));
        }
    }
    if matches!(tr.manifold, ManifoldModel::Sphere) {
        for k in 1..n.saturating_sub(1) {
            let node = &mut curve.q[k * d..(k + 1) * d];
            let norm = node.iter().map(|&x| x * x).sum::<R>().sqrt();
            if norm > R::lit(1e-12) {
                for x in node.iter_mut() {
                    *x = *x / norm;
                }
            }
        }
    }
    tr.pack(&curve).expect("restart curve built on the transcription's own grid")
}

/// Converged finite solves, weeded on a scratch copy, returned as
/// `(solve index, point)` sorted by `F1` — the current front view used by
/// bisection refinement.
fn front_view<R: Real>(solves: &[PointSolve<R>]) -> Vec<(usize, FrontPoint<R>)> {
    let mut pts: Vec<(usize, FrontPoint<R>)> = solves
        .iter()
        .enumerate()
        .filter(|(_, ps)| {
            ps.point.status == SolveStatus::Converged
                && ps.point.f1.is_finite()
                && ps.point.f2.is_finite()
        })
        .map(|(i, ps)| (i, ps.point.clone()))
        .collect();
    let mut scratch: Vec<FrontPoint<R>> = pts.iter().map(|(_, p)| p.clone()).collect();
    weed_dominated(&mut scratch);
    let mut kept: Vec<(usize, FrontPoint<R>)> = Vec::new();
    for ((i, p), s) in pts.drain(..).zip(scratch.iter()) {
        if !s.dominated {
            kept.push((i, p));
        }
    }
    kept.sort_by(|a, b| {
        (a.1.f1, a.1.f2)
            .partial_cmp(&(b.1.f1, b.1.f2))
            .expect("finite objectives")
    });
    kept
}

/// Sweeps the essential weight interval and assembles the Pareto front:
/// ideal costs, uniform weight grid on `[w0, min(wf, w_cap)]`, a
/// warm-chained solve per weight seeded by the `F2` minimizer, plus
/// `multistart_k` randomized restarts per weight solved in parallel, then
/// optional bisection refinement, dominance weeding, and gap detection.
/// Individual solver failures are kept in `rejected`; only the ideal-cost
/// stage aborts the sweep.
pub fn sweep_front<R: Real>(
    tr: &Transcription<R>,
    u: &UtopianConfig<R>,
    cfg: &SweepConfig<R>,
    opts: &SolveOptions<R>,
) -> Result<ParetoFront<R>> {
    if cfg.n_weights < 2 {
        return Err(Error::InvalidArgument(format!(
            "n_weights must be at least 2, got {}",
            cfg.n_weights
        )));
    }
    if !(cfg.w_cap > R::zero() && cfg.w_cap < R::one()) {
        return Err(Error::InvalidArgument(format!("w_cap must lie in (0,1), got {}", cfg.w_cap)));
    }

    let ideal = solve_ideal_costs(tr, u, cfg.w_cap, opts)?;
    let interval = essential_interval(&ideal, u)?;
    // A collapsed interval means every essential weight returns the same
    // boundary point; one solve at w0 represents the whole front.
    let weights: Vec<R> = if interval.is_collapsed() {
        vec![interval.w0.min(cfg.w_cap)]
    } else {
        let w_hi = interval.wf.min(cfg.w_cap);
        let w_lo = interval.w0.min(w_hi);
        let nw = cfg.n_weights;
        (0..nw)
            .map(|i| {
                let s = R::from_usize(i).unwrap() / R::from_usize(nw - 1).unwrap();
                w_lo + (w_hi - w_lo) * s
            })
            .collect()
    };
    let nw = weights.len();

    let n = tr.n_vars();
    let mut solves: Vec<PointSolve<R>> = Vec::new();

    // Warm-chained pass up the grid, seeded by the F2 minimizer (which *is*
    // the boundary point the sweep starts from at w0).
    let mut chain_x: Vec<R> = tr.pack(&ideal.f2_curve)?;
    let mut chain_eq: Option<Vec<R>> = None;
    let mut chain_ineq: Option<Vec<R>> = None;
    for &w in &weights {
        let ps = solve_point_impl(
            tr,
            w,
            cfg.mode,
            u,
            Some(&chain_x[..n]),
            chain_eq.as_deref(),
            chain_ineq.as_deref(),
            opts,
        )?;
        if ps.point.status == SolveStatus::Converged {
            chain_x = ps.x.clone();
            chain_eq = Some(ps.eq_mult.clone());
            chain_ineq = Some(ps.ineq_mult.clone());
        }
        solves.push(ps);
    }

    // Randomized restarts: independent cold solves, run in parallel.
    if cfg.multistart_k > 0 {
        let jobs: Vec<(usize, usize)> = (0..nw)
            .flat_map(|i| (0..cfg.multistart_k).map(move |k| (i, k)))
            .collect();
        let restarts: Vec<Result<PointSolve<R>>> = jobs
            .par_iter()
            .map(|&(i, k)| {
                let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(cfg.seed, i, k));
                let x0 = restart_init(tr, &mut rng, cfg.perturbation, k);
                solve_point_impl(tr, weights[i], cfg.mode, u, Some(&x0), None, None, opts)
            })
            .collect();
        for r in restarts {
            solves.push(r?);
        }
    }

    // Bisection refinement: insert weights between front neighbors that
    // jump by more than refine_spread × median in normalized objective
    // space, warm-starting from the lower-weight neighbor.
    for _ in 0..cfg.refine_rounds {
        let view = front_view(&solves);
        if view.len() < 3 {
            break;
        }
        let vals: Vec<(R, R)> = view.iter().map(|(_, p)| (p.f1, p.f2)).collect();
        let dists = normalized_distances(&vals);
        let med = median(&dists);
        if !(med > R::zero()) {
            break;
        }
        let mut inserts: Vec<(R, usize)> = Vec::new();
        for (i, &d) in dists.iter().enumerate() {
            if d > cfg.refine_spread * med {
                let (ia, pa) = &view[i];
                let (ib, pb) = &view[i + 1];
                if (pa.w - pb.w).abs() > R::lit(1e-12) {
                    let w_mid = (pa.w + pb.w) / R::lit(2.0);
                    // Warm-start from the lower-weight neighbor.
                    let src = if pa.w < pb.w { *ia } else { *ib };
                    inserts.push((w_mid, src));
                }
            }
        }
        if inserts.is_empty() {
            break;
        }
        let new_solves: Vec<Result<PointSolve<R>>> = inserts
            .par_iter()
            .map(|&(w_mid, src)| {
                solve_point_impl(
                    tr,
                    w_mid,
                    cfg.mode,
                    u,
                    Some(&solves[src].x[..n]),
                    Some(&solves[src].eq_mult),
                    Some(&solves[src].ineq_mult),
                    opts,
                )
            })
            .collect();
        for s in new_solves {
            solves.push(s?);
        }
    }

    // Assembly: converged & finite points are weeded; everything else is
    // kept for diagnostics.
    let mut candidates: Vec<FrontPoint<R>> = Vec::new();
    let mut rejected: Vec<FrontPoint<R>> = Vec::new();
    for ps in solves {
        let ok = ps.point.status == SolveStatus::Converged
            && ps.point.f1.is_finite()
            && ps.point.f2.is_finite();
        if ok {
            candidates.push(ps.point);
        } else {
            rejected.push(ps.point);
        }
    }
    weed_dominated(&mut candidates);
    let mut points: Vec<FrontPoint<R>> = Vec::new();
    for p in candidates {
        if p.dominated {
            rejected.push(p);
        } else {
            points.push(p);
        }
    }
    points.sort_by(|a, b| {
        (a.f1, a.f2).partial_cmp(&(b.f1, b.f2)).expect("finite objectives")
    });
    let segments = detect_gaps(&points, cfg.gap_factor);
    Ok(ParetoFront { points, segments, rejected, ideal, interval })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transcription::build_grid;
    use proptest::prelude::*;

    /// Front point with the given objectives and an inert 3-node curve.
    fn pt(f1: f64, f2: f64) -> FrontPoint<f64> {
        let grid = build_grid(0.0, 1.0, 3).unwrap();
        FrontPoint {
            w: 0.5,
            f1,
            f2,
            alpha: 0.0,
            mode: ScalarizationMode::Chebyshev,
            status: SolveStatus::Converged,
            dominated: false,
            curve: DiscretizedCurve::new(grid, 1, vec![0.0; 3], vec![0.0; 3], vec![0.0; 3])
                .unwrap(),
            solve_seconds: 0.0,
        }
    }

    #[test]
    fn weeding_marks_interior_point() {
        let mut pts = vec![pt(1.0, 3.0), pt(2.0, 2.0), pt(3.0, 1.0), pt(2.5, 2.5)];
        weed_dominated(&mut pts);
        assert_eq!(
            pts.iter().map(|p| p.dominated).collect::<Vec<_>>(),
            vec![false, false, false, true]
        );
    }

    #[test]
    fn weeding_keeps_singleton_and_ties() {
        let mut single = vec![pt(1.0, 1.0)];
        weed_dominated(&mut single);
        assert!(!single[0].dominated);

        let mut ties = vec![pt(1.0, 2.0), pt(1.0, 2.0)];
        weed_dominated(&mut ties);
        assert!(!ties[0].dominated && !ties[1].dominated);
    }

    #[test]
    fn weeding_tolerance_is_relative() {
        // A 0.5e-6 relative improvement is inside the tolerance band: kept.
        let mut near = vec![pt(100.0, 100.0), pt(100.0 - 5e-5, 100.0 - 5e-5)];
        weed_dominated(&mut near);
        assert!(!near[0].dominated && !near[1].dominated);
        // A 5e-6 relative improvement in both objectives dominates.
        let mut far = vec![pt(100.0, 100.0), pt(100.0 - 5e-4, 100.0 - 5e-4)];
        weed_dominated(&mut far);
        assert!(far[0].dominated && !far[1].dominated);
    }

    #[test]
    fn gaps_single_segment_when_evenly_spaced() {
        let pts: Vec<FrontPoint<f64>> =
            (0..10).map(|i| pt(i as f64, 10.0 - i as f64)).collect();
        assert_eq!(detect_gaps(&pts, 10.0), vec![0..10]);
    }

    #[test]
    fn gaps_split_two_clusters() {
        // Two clusters of 5, separated by ~20× the in-cluster spacing.
        let mut pts: Vec<FrontPoint<f64>> = Vec::new();
        for i in 0..5 {
            pts.push(pt(i as f64, 30.0 - i as f64));
        }
        for i in 0..5 {
            pts.push(pt(24.0 + i as f64, 6.0 - i as f64));
        }
        let segs = detect_gaps(&pts, 10.0);
        assert_eq!(segs, vec![0..5, 5..10]);
    }

    #[test]
    fn gaps_small_fronts_are_one_segment() {
        assert!(detect_gaps::<f64>(&[], 10.0).is_empty());
        let two = vec![pt(0.0, 1.0), pt(5.0, 0.0)];
        assert_eq!(detect_gaps(&two, 10.0), vec![0..2]);
    }

    fn report_with(f1_star: f64, f2_star: f64, f1_bar: f64, f2_bar: f64) -> IdealCostReport<f64> {
        let grid = build_grid(0.0, 1.0, 3).unwrap();
        let curve =
            DiscretizedCurve::new(grid, 1, vec![0.0; 3], vec![0.0; 3], vec![0.0; 3]).unwrap();
        IdealCostReport {
            f1_star,
            f2_star,
            f1_bar,
            f2_bar,
            f1_asymptotic: true,
            w_cap: 0.999,
            f1_curve: curve.clone(),
            f2_curve: curve,
        }
    }

    #[test]
    fn interval_matches_reference_values() {
        let u = UtopianConfig::default();
        let r = report_with(9.88, 113.2, 11.76, 1e6);
        let ei = essential_interval(&r, &u).unwrap();
        assert!((ei.w0 - 113.2 / 124.96).abs() < 1e-12);
        assert!((ei.w0 - 0.9058898848).abs() < 1e-9);
        assert!(ei.wf > 0.99);

        let r = report_with(50.0, 248.049, 170.143, 1e6);
        let ei = essential_interval(&r, &u).unwrap();
        assert!((ei.w0 - 0.5931462104).abs() < 1e-9);

        // Fully symmetric data collapses to w0 = wf = 1/2.
        let r = report_with(1.0, 1.0, 1.0, 1.0);
        let ei = essential_interval(&r, &u).unwrap();
        assert!((ei.w0 - 0.5).abs() < 1e-15);
        assert!((ei.wf - 0.5).abs() < 1e-15);
        assert!(ei.is_collapsed());
    }

    #[test]
    fn interval_rejects_bad_utopian_point() {
        // β above the attainable values makes a denominator nonpositive.
        let u = UtopianConfig { beta1: 10.0, beta2: 5.0, eps1: 0.0, eps2: 0.0 };
        let r = report_with(1.0, 2.0, 3.0, 4.0);
        assert!(matches!(
            essential_interval(&r, &u),
            Err(Error::DegenerateScalarization(_))
        ));
    }

    #[test]
    fn utopian_from_ideal_subtracts_offsets() {
        let r = report_with(9.88, 113.2, 11.76, 1e6);
        let u = UtopianConfig::from_ideal(&r, 0.5, 1.0).unwrap();
        assert_eq!(u.beta1, 9.38);
        assert_eq!(u.beta2, 112.2);
        assert!(UtopianConfig::from_ideal(&r, -0.1, 0.0).is_err());
    }

    #[test]
    fn mode_names_are_stable() {
        assert_eq!(ScalarizationMode::Chebyshev.as_str(), "chebyshev");
        assert_eq!(ScalarizationMode::WeightedSum.as_str(), "weighted_sum");
    }

    proptest! {
        /// After weeding, the surviving set is mutually non-dominated and
        /// re-weeding survivors changes nothing (idempotence).
        #[test]
        fn weeding_survivors_mutually_nondominated(
            raw in proptest::collection::vec((0.1f64..100.0, 0.1f64..100.0), 1..40)
        ) {
            let mut pts: Vec<FrontPoint<f64>> = raw.iter().map(|&(a, b)| pt(a, b)).collect();
            weed_dominated(&mut pts);
            let mut survivors: Vec<FrontPoint<f64>> =
                pts.iter().filter(|p| !p.dominated).cloned().collect();
            prop_assert!(!survivors.is_empty());
            weed_dominated(&mut survivors);
            prop_assert!(survivors.iter().all(|p| !p.dominated));
        }

        /// Segments partition the front regardless of spacing.
        #[test]
        fn segments_partition_sorted_fronts(
            mut xs in proptest::collection::vec(0.0f64..100.0, 3..30),
            factor in 1.5f64..20.0
        ) {
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let pts: Vec<FrontPoint<f64>> =
                xs.iter().enumerate().map(|(i, &x)| pt(x, 1000.0 - i as f64)).collect();
            let segs = detect_gaps(&pts, factor);
            let mut covered = 0;
            for s in &segs {
                prop_assert_eq!(s.start, covered);
                prop_assert!(s.end > s.start);
                covered = s.end;
            }
            prop_assert_eq!(covered, pts.len());
        }
    }
}
