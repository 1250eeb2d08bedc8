//! Closed-form Euclidean cubics in tension: exact curves, derivatives, and
//! objective values used as an independent oracle for the NLP pipeline.
//!
//! A cubic in tension with tension `τ > 0` on `[0, T]` solves
//! `x⁗(t) − τ ẍ(t) = 0` with clamped boundary conditions and has the form
//!
//! ```text
//! x(t) = x0 + v0 t + (sinh(√τ t) − √τ t) c1 + (cosh(√τ t) − 1) c2,
//! ```
//!
//! where `(c1, c2)` solve the per-dimension 2×2 system `A·c = b` with
//! `b = (xT − x0 − v0 T, (vT − v0) T)` and determinant
//! `Δ = √τ·T (2cosh(√τ T) − 2 − √τ T sinh(√τ T))`.
//!
//! As `τ T² → 0`, `Δ → 0` like `−(√τ T)⁵/12` and the tension curve tends to
//! the interpolating Hermite cubic polynomial; [`OracleCurve`] switches to
//! that limit automatically below the `|Δ| < 1e−12` threshold.

use crate::error::{Error, Result};
use crate::la::norm_sq;
use crate::real::Real;
use crate::transcription::ObjectivePair;

/// Threshold on `|Δ|` below which the 2×2 tension system is treated as
/// singular and the cubic-polynomial limit is used instead.
pub const DELTA_SINGULAR_THRESHOLD: f64 = 1e-12;

/// `sinh(s) − s`, evaluated without cancellation for small `s`
/// (series `Σ_{k≥1} s^{2k+1}/(2k+1)!`).
pub fn sinh_minus_id<R: Real>(s: R) -> R {
    if s.abs() < R::lit(0.5) {
        let s2 = s * s;
        let mut term = s * s2 / R::lit(6.0); // k = 1
        let mut sum = term;
        let mut k = 1.0;
        loop {
            k += 1.0;
            // term_{k} = term_{k−1} · s² / ((2k)(2k+1))
            term = term * s2 / R::lit(2.0 * k * (2.0 * k + 1.0));
            let next = sum + term;
            if next == sum {
                return sum;
            }
            sum = next;
        }
    } else {
        s.sinh() - s
    }
}

/// `cosh(s) − 1 = 2 sinh²(s/2)`, stable for all `s`.
pub fn cosh_minus_one<R: Real>(s: R) -> R {
    let sh = (s / R::lit(2.0)).sinh();
    R::lit(2.0) * sh * sh
}

/// `Δ̃(s) = 2cosh(s) − 2 − s·sinh(s)`, evaluated via the series
/// `−Σ_{k≥2} (2k−2)/(2k)! · s^{2k}` for small `s` (the direct form loses all
/// relative accuracy below `s ≈ 0.1`: the leading behavior is `−s⁴/12`).
pub fn delta_tilde<R: Real>(s: R) -> R {
    if s.abs() < R::lit(0.5) {
        let s2 = s * s;
        let mut term = s2 * s2 / R::lit(12.0); // k = 2 term magnitude
        let mut sum = term;
        let mut k = 2.0;
        loop {
            k += 1.0;
            // |term_k| = |term_{k−1}| · s² · (k−1)/(k−2) / ((2k−1)(2k))
            term = term * s2 * R::lit((k - 1.0) / (k - 2.0) / ((2.0 * k - 1.0) * 2.0 * k));
            let next = sum + term;
            if next == sum {
                return -sum;
            }
            sum = next;
        }
    } else {
        R::lit(2.0) * cosh_minus_one(s) - s * s.sinh()
    }
}

/// Solved coefficients of a tension curve, one `(c1, c2)` pair per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCoefficients<R: Real> {
    pub tau: R,
    pub t_horizon: R,
    pub x0: Vec<R>,
    pub v0: Vec<R>,
    pub xt: Vec<R>,
    pub vt: Vec<R>,
    pub c1: Vec<R>,
    pub c2: Vec<R>,
    /// `Δ` of the solved system (diagnostic).
    pub delta: R,
}

/// A sampled point of an oracle curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint<R: Real> {
    pub x: Vec<R>,
    pub dx: Vec<R>,
    pub ddx: Vec<R>,
}

fn check_boundary_dims<R: Real>(x0: &[R], v0: &[R], xt: &[R], vt: &[R]) -> Result<usize> {
    let d = x0.len();
    for other in [v0.len(), xt.len(), vt.len()] {
        if other != d {
            return Err(Error::DimensionMismatch { expected: d, got: other });
        }
    }
    if d == 0 {
        return Err(Error::InvalidArgument("boundary data must be non-empty".into()));
    }
    Ok(d)
}

/// Solves the per-dimension 2×2 system for `(c1, c2)`.
///
/// Errors with [`Error::OracleSingular`] when `|Δ|` is below
/// [`DELTA_SINGULAR_THRESHOLD`] (τT → 0); callers wanting the limit should
/// use [`OracleCurve::new`], which falls back to the Hermite cubic.
pub fn solve_coefficients<R: Real>(
    tau: R,
    t_horizon: R,
    x0: &[R],
    v0: &[R],
    xt: &[R],
    vt: &[R],
) -> Result<OracleCoefficients<R>> {
    if !(tau > R::zero()) || !(t_horizon > R::zero()) {
        return Err(Error::InvalidArgument(format!(
            "solve_coefficients requires tau > 0 and T > 0, got tau={tau}, T={t_horizon}"
        )));
    }
    let d = check_boundary_dims(x0, v0, xt, vt)?;
    let s = tau.sqrt() * t_horizon; // τ_T
    let delta = s * delta_tilde(s);
    if delta.abs() < R::lit(DELTA_SINGULAR_THRESHOLD) {
        return Err(Error::OracleSingular { delta_abs: delta.abs().to_f64_lossy() });
    }
    let sh = s.sinh();
    let cm = cosh_minus_one(s);
    let sm = sinh_minus_id(s);
    let mut c1 = Vec::with_capacity(d);
    let mut c2 = Vec::with_capacity(d);
    for i in 0..d {
        let b1 = xt[i] - x0[i] - v0[i] * t_horizon;
        let b2 = (vt[i] - v0[i]) * t_horizon;
        // Inverse rows from the paper: (c1; c2) = (1/Δ) [s·sinh, 1−cosh;
        // s(1−cosh), sinh−s] (b1; b2).
        c1.push((s * sh * b1 - cm * b2) / delta);
        c2.push((-s * cm * b1 + sm * b2) / delta);
    }
    Ok(OracleCoefficients {
        tau,
        t_horizon,
        x0: x0.to_vec(),
        v0: v0.to_vec(),
        xt: xt.to_vec(),
        vt: vt.to_vec(),
        c1,
        c2,
        delta,
    })
}

/// Exact position/velocity/acceleration of the tension curve at time `t`.
pub fn eval_curve<R: Real>(co: &OracleCoefficients<R>, t: R) -> CurvePoint<R> {
    let rt = co.tau.sqrt();
    let st = rt * t; // τ_t
    let sm = sinh_minus_id(st);
    let cm = cosh_minus_one(st);
    let sh = sm + st; // sinh(τ_t)
    let ch = cm + R::one(); // cosh(τ_t)
    let d = co.x0.len();
    let mut x = Vec::with_capacity(d);
    let mut dx = Vec::with_capacity(d);
    let mut ddx = Vec::with_capacity(d);
    for i in 0..d {
        x.push(co.x0[i] + co.v0[i] * t + sm * co.c1[i] + cm * co.c2[i]);
        dx.push(co.v0[i] + rt * (cm * co.c1[i] + sh * co.c2[i]));
        ddx.push(co.tau * (sh * co.c1[i] + ch * co.c2[i]));
    }
    CurvePoint { x, dx, ddx }
}

/// Number of trapezoid samples used by [`objectives_of_tau`].
pub const OBJECTIVE_QUADRATURE_SAMPLES: usize = 10_001;

/// `F1 = ∫‖ẋ‖²`, `F2 = ∫‖ẍ‖²` by high-resolution trapezoidal quadrature.
pub fn objectives_of_tau<R: Real>(co: &OracleCoefficients<R>) -> ObjectivePair<R> {
    objectives_by_quadrature(|t| eval_curve(co, t), co.t_horizon, OBJECTIVE_QUADRATURE_SAMPLES)
}

/// Trapezoidal `∫‖ẋ‖²` and `∫‖ẍ‖²` of an arbitrary sampled curve.
pub fn objectives_by_quadrature<R: Real>(
    eval: impl Fn(R) -> CurvePoint<R>,
    t_horizon: R,
    samples: usize,
) -> ObjectivePair<R> {
    let n = samples.max(2);
    let h = t_horizon / R::from_usize(n - 1).unwrap();
    let mut f1 = R::zero();
    let mut f2 = R::zero();
    for k in 0..n {
        let t = if k == n - 1 { t_horizon } else { h * R::from_usize(k).unwrap() };
        let p = eval(t);
        let w = if k == 0 || k == n - 1 { h / R::lit(2.0) } else { h };
        f1 = f1 + w * norm_sq(&p.dx);
        f2 = f2 + w * norm_sq(&p.ddx);
    }
    ObjectivePair { f1, f2 }
}

/// Hermite interpolating cubic `x(t) = x0 + v0 t + α t² + β t³` matching
/// clamped boundary data — the τ → 0 limit of the tension curve.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteCubic<R: Real> {
    pub t_horizon: R,
    pub x0: Vec<R>,
    pub v0: Vec<R>,
    pub alpha: Vec<R>,
    pub beta: Vec<R>,
}

impl<R: Real> HermiteCubic<R> {
    pub fn new(t_horizon: R, x0: &[R], v0: &[R], xt: &[R], vt: &[R]) -> Result<Self> {
        if !(t_horizon > R::zero()) {
            return Err(Error::InvalidArgument("HermiteCubic requires T > 0".into()));
        }
        let d = check_boundary_dims(x0, v0, xt, vt)?;
        let t = t_horizon;
        let mut alpha = Vec::with_capacity(d);
        let mut beta = Vec::with_capacity(d);
        for i in 0..d {
            let dx = xt[i] - x0[i] - v0[i] * t;
            let dv = vt[i] - v0[i];
            alpha.push(R::lit(3.0) * dx / (t * t) - dv / t);
            beta.push(R::lit(-2.0) * dx / (t * t * t) + dv / (t * t));
        }
        Ok(Self { t_horizon, x0: x0.to_vec(), v0: v0.to_vec(), alpha, beta })
    }

    pub fn eval(&self, t: R) -> CurvePoint<R> {
        let d = self.x0.len();
        let mut x = Vec::with_capacity(d);
        let mut dx = Vec::with_capacity(d);
        let mut ddx = Vec::with_capacity(d);
        for i in 0..d {
            let (a, b) = (self.alpha[i], self.beta[i]);
            x.push(self.x0[i] + self.v0[i] * t + a * t * t + b * t * t * t);
            dx.push(self.v0[i] + R::lit(2.0) * a * t + R::lit(3.0) * b * t * t);
            ddx.push(R::lit(2.0) * a + R::lit(6.0) * b * t);
        }
        CurvePoint { x, dx, ddx }
    }
}

/// A tension curve with automatic fallback to its cubic-polynomial limit
/// when the 2×2 system is numerically singular.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleCurve<R: Real> {
    Tension(OracleCoefficients<R>),
    CubicLimit(HermiteCubic<R>),
}

impl<R: Real> OracleCurve<R> {
    /// Builds the curve for `tau ≥ 0`; `tau = 0` (or `|Δ|` below threshold)
    /// yields the Hermite cubic.
    pub fn new(
        tau: R,
        t_horizon: R,
        x0: &[R],
        v0: &[R],
        xt: &[R],
        vt: &[R],
    ) -> Result<Self> {
        if tau < R::zero() {
            return Err(Error::InvalidArgument(format!("tension must be >= 0, got {tau}")));
        }
        if tau > R::zero() {
            match solve_coefficients(tau, t_horizon, x0, v0, xt, vt) {
                Ok(co) => return Ok(Self::Tension(co)),
                Err(Error::OracleSingular { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(Self::CubicLimit(HermiteCubic::new(t_horizon, x0, v0, xt, vt)?))
    }

    pub fn eval(&self, t: R) -> CurvePoint<R> {
        match self {
            Self::Tension(co) => eval_curve(co, t),
            Self::CubicLimit(h) => h.eval(t),
        }
    }

    pub fn t_horizon(&self) -> R {
        match self {
            Self::Tension(co) => co.t_horizon,
            Self::CubicLimit(h) => h.t_horizon,
        }
    }

    pub fn objectives(&self) -> ObjectivePair<R> {
        objectives_by_quadrature(
            |t| self.eval(t),
            self.t_horizon(),
            OBJECTIVE_QUADRATURE_SAMPLES,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1_X0: [f64; 3] = [0.0, 0.0, 0.0];
    const EX1_V0: [f64; 3] = [1.0, 0.0, 0.0];
    const EX1_XT: [f64; 3] = [2.0, 2.0, 1.0];
    const EX1_VT: [f64; 3] = [0.0, 1.0, -1.0];

    fn example1(tau: f64) -> OracleCoefficients<f64> {
        solve_coefficients(tau, 1.0, &EX1_X0, &EX1_V0, &EX1_XT, &EX1_VT).unwrap()
    }

    #[test]
    fn stable_forms_match_naive_in_the_safe_range() {
        for &s in &[0.6f64, 1.0, 2.5, 7.0] {
            assert!((sinh_minus_id(s) - (s.sinh() - s)).abs() <= 1e-14 * s.sinh());
            assert!((cosh_minus_one(s) - (s.cosh() - 1.0)).abs() <= 1e-14 * s.cosh());
            let naive = 2.0 * s.cosh() - 2.0 - s * s.sinh();
            assert!((delta_tilde(s) - naive).abs() <= 1e-12 * naive.abs().max(1.0));
        }
    }

    #[test]
    fn delta_tilde_small_s_leading_term() {
        // Δ̃(s) = −s⁴/12 − s⁶/180 − ... ; the naive form would return garbage
        // below s ≈ 1e−4.
        let s = 1e-4f64;
        let expected = -(s.powi(4) / 12.0 + s.powi(6) / 180.0);
        assert!((delta_tilde(s) - expected).abs() < 1e-30);
    }

    #[test]
    fn delta_at_tau_t_one() {
        // High-precision value of Δ = τ_T·Δ̃(τ_T) at τ_T = 1 is
        // −0.08903992401331390 (the spec's "−0.08907" is a miscomputation of
        // the same displayed formula).
        let delta = 1.0 * delta_tilde(1.0f64);
        assert!((delta - (-0.08903992401331390)).abs() < 1e-15);
    }

    #[test]
    fn geodesic_data_gives_zero_coefficients_and_straight_line() {
        let x0 = [1.0f64, 2.0];
        let v0 = [0.5f64, -0.25];
        let xt = [1.0 + 0.5 * 2.0, 2.0 - 0.25 * 2.0];
        let co = solve_coefficients(1.3, 2.0, &x0, &v0, &xt, &v0).unwrap();
        assert!(co.c1.iter().chain(&co.c2).all(|&c| c.abs() < 1e-14));
        let p = eval_curve(&co, 0.7);
        assert!((p.x[0] - (1.0 + 0.5 * 0.7)).abs() < 1e-14);
        assert!((p.x[1] - (2.0 - 0.25 * 0.7)).abs() < 1e-14);
        let obj = objectives_of_tau(&co);
        assert!((obj.f1 - 2.0 * (0.5 * 0.5 + 0.25 * 0.25)).abs() < 1e-12);
        assert!(obj.f2.abs() < 1e-20);
    }

    #[test]
    fn example1_frozen_values_tau_one() {
        // Frozen from an independent 30-digit evaluation of the closed form.
        let co = example1(1.0);
        let c1_expect = [-19.297880669823069, -20.297880669823069, -19.297880669823069];
        let c2_expect = [8.0669636280422082, 10.230917041780861, 8.0669636280422082];
        for i in 0..3 {
            assert!((co.c1[i] - c1_expect[i]).abs() < 1e-10, "c1[{i}] = {}", co.c1[i]);
            assert!((co.c2[i] - c2_expect[i]).abs() < 1e-10, "c2[{i}] = {}", co.c2[i]);
        }
        let mid = eval_curve(&co, 0.5);
        let mid_expect = [1.1224593312018546, 0.87754066879814544, 0.62245933120185456];
        for i in 0..3 {
            assert!((mid.x[i] - mid_expect[i]).abs() < 1e-12);
        }
        let obj = objectives_of_tau(&co);
        assert!((obj.f1 - 10.572985312641243).abs() < 1e-7 * obj.f1);
        assert!((obj.f2 - 84.013407822170548).abs() < 1e-7 * obj.f2);
    }

    #[test]
    fn example1_frozen_values_other_tensions() {
        for (tau, f1e, f2e, mid0) in [
            (0.25, 10.593133694638643, 84.000856690668864, 1.1243530017715962),
            (4.0, 10.49855468651632, 84.197144445996491, 1.1155292893150024),
        ] {
            let co = example1(tau);
            let obj = objectives_of_tau(&co);
            assert!((obj.f1 - f1e).abs() < 1e-7 * f1e, "tau={tau}: F1={}", obj.f1);
            assert!((obj.f2 - f2e).abs() < 1e-7 * f2e, "tau={tau}: F2={}", obj.f2);
            assert!((eval_curve(&co, 0.5).x[0] - mid0).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_interpolation_exact() {
        let co = example1(2.7);
        let p0 = eval_curve(&co, 0.0);
        let pt = eval_curve(&co, 1.0);
        for i in 0..3 {
            assert!((p0.x[i] - EX1_X0[i]).abs() < 1e-12);
            assert!((p0.dx[i] - EX1_V0[i]).abs() < 1e-12);
            assert!((pt.x[i] - EX1_XT[i]).abs() < 1e-10);
            assert!((pt.dx[i] - EX1_VT[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn system_residual_is_tiny() {
        // A·c = b reconstruction per dimension.
        let co = example1(1.0);
        let s = co.tau.sqrt() * co.t_horizon;
        let (a11, a12) = (sinh_minus_id(s), cosh_minus_one(s));
        let (a21, a22) = (s * cosh_minus_one(s), s * s.sinh());
        for i in 0..3 {
            let b1 = EX1_XT[i] - EX1_X0[i] - EX1_V0[i];
            let b2 = EX1_VT[i] - EX1_V0[i];
            assert!((a11 * co.c1[i] + a12 * co.c2[i] - b1).abs() < 1e-10);
            assert!((a21 * co.c1[i] + a22 * co.c2[i] - b2).abs() < 1e-10);
        }
    }

    #[test]
    fn linearity_in_boundary_data() {
        let co = example1(1.7);
        let neg_x0: Vec<f64> = EX1_X0.iter().map(|x| -x).collect();
        let neg_v0: Vec<f64> = EX1_V0.iter().map(|x| -x).collect();
        let neg_xt: Vec<f64> = EX1_XT.iter().map(|x| -x).collect();
        let neg_vt: Vec<f64> = EX1_VT.iter().map(|x| -x).collect();
        let con = solve_coefficients(1.7, 1.0, &neg_x0, &neg_v0, &neg_xt, &neg_vt).unwrap();
        for i in 0..3 {
            assert!((co.c1[i] + con.c1[i]).abs() < 1e-12);
            assert!((co.c2[i] + con.c2[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_self_refinement() {
        // Successive sample doublings must contract the change by ~4×
        // (trapezoid is second order), and the default resolution must sit
        // within 1e-7 relative of the finest level.
        let co = example1(1.0);
        let at = |samples: usize| {
            objectives_by_quadrature(|t| eval_curve(&co, t), co.t_horizon, samples)
        };
        let base = (OBJECTIVE_QUADRATURE_SAMPLES - 1) / 8;
        let levels: Vec<ObjectivePair<f64>> =
            [1usize, 2, 4, 8].iter().map(|&m| at(m * base + 1)).collect();
        let d1 = (levels[0].f2 - levels[1].f2).abs();
        let d2 = (levels[1].f2 - levels[2].f2).abs();
        let d3 = (levels[2].f2 - levels[3].f2).abs();
        assert!(d1 / d2 > 3.5 && d1 / d2 < 4.5, "ratios {} {}", d1 / d2, d2 / d3);
        assert!(d2 / d3 > 3.5 && d2 / d3 < 4.5, "ratios {} {}", d1 / d2, d2 / d3);
        // Default resolution agrees with a doubled grid to 1e-7 relative.
        let default = objectives_of_tau(&co);
        let fine = at(2 * (OBJECTIVE_QUADRATURE_SAMPLES - 1) + 1);
        assert!((default.f1 - fine.f1).abs() < 1e-7 * fine.f1);
        assert!((default.f2 - fine.f2).abs() < 1e-7 * fine.f2);
    }

    #[test]
    fn el_residual_fourth_difference() {
        // x⁗ − τẍ = 0 identically; check via 5-point fourth differences on a
        // moderately fine grid (h = 1e−2 balances truncation vs. round-off).
        let co = example1(1.0);
        let n = 101;
        let h = 1.0 / (n - 1) as f64;
        let xs: Vec<CurvePoint<f64>> =
            (0..n).map(|k| eval_curve(&co, k as f64 * h)).collect();
        let mut max_res: f64 = 0.0;
        for k in 2..n - 2 {
            for i in 0..3 {
                let d4 = (xs[k - 2].x[i] - 4.0 * xs[k - 1].x[i] + 6.0 * xs[k].x[i]
                    - 4.0 * xs[k + 1].x[i]
                    + xs[k + 2].x[i])
                    / h.powi(4);
                max_res = max_res.max((d4 - co.tau * xs[k].ddx[i]).abs());
            }
        }
        assert!(max_res < 1e-3, "max |x4 - tau*ddx| = {max_res}");
    }

    #[test]
    fn singular_system_errors_and_curve_falls_back() {
        // s = √τ·T = 1e−3 → Δ ≈ −8.3e−17, below the 1e−12 threshold.
        let tau = 1e-6;
        assert!(matches!(
            solve_coefficients(tau, 1.0, &EX1_X0, &EX1_V0, &EX1_XT, &EX1_VT),
            Err(Error::OracleSingular { .. })
        ));
        let curve = OracleCurve::new(tau, 1.0, &EX1_X0, &EX1_V0, &EX1_XT, &EX1_VT).unwrap();
        assert!(matches!(curve, OracleCurve::CubicLimit(_)));
        // Boundary interpolation still exact.
        let p = curve.eval(1.0);
        for i in 0..3 {
            assert!((p.x[i] - EX1_XT[i]).abs() < 1e-12);
            assert!((p.dx[i] - EX1_VT[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn small_tension_approaches_cubic_limit() {
        // Max deviation from the Hermite cubic decreases with τ; at
        // s = √τ·T = 1e−2 the tension curve is ~3.3e−7 from the cubic, at
        // s = 1e−3 the oracle already returns the cubic limit (deviation 0).
        let cubic = HermiteCubic::new(1.0, &EX1_X0, &EX1_V0, &EX1_XT, &EX1_VT).unwrap();
        let mut devs = Vec::new();
        for &s in &[1e-2f64, 1e-3] {
            let curve = OracleCurve::new(s * s, 1.0, &EX1_X0, &EX1_V0, &EX1_XT, &EX1_VT).unwrap();
            let mut dev: f64 = 0.0;
            for k in 0..=200 {
                let t = k as f64 / 200.0;
                let a = curve.eval(t);
                let b = cubic.eval(t);
                for i in 0..3 {
                    dev = dev.max((a.x[i] - b.x[i]).abs());
                }
            }
            devs.push(dev);
        }
        assert!(devs[0] < 1e-5, "dev at s=1e-2: {}", devs[0]);
        assert!(devs[1] < devs[0], "deviation must decrease with tau: {devs:?}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(solve_coefficients(0.0, 1.0, &EX1_X0, &EX1_V0, &EX1_XT, &EX1_VT).is_err());
        assert!(solve_coefficients(1.0, 0.0, &EX1_X0, &EX1_V0, &EX1_XT, &EX1_VT).is_err());
        assert!(solve_coefficients(1.0, 1.0, &EX1_X0[..2], &EX1_V0, &EX1_XT, &EX1_VT).is_err());
        assert!(OracleCurve::new(-1.0, 1.0, &EX1_X0, &EX1_V0, &EX1_XT, &EX1_VT).is_err());
    }
}
