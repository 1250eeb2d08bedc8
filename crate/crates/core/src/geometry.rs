//! Manifold-specific formulas: metrics, Christoffel symbols, covariant
//! accelerations, and embeddings for the unit sphere and the torus.
//!
//! Everything here is a pure formula on value types; feasibility (unit norm,
//! tangency, ...) is the caller's concern and is only validated where the
//! docs say so.

use crate::error::{Error, Result};
use crate::la::norm3_sq;
use crate::real::Real;

/// Workspace description: Euclidean space, the unit sphere embedded in
/// 3-space, or a torus with small radius `a` and large radius `c` in chart
/// coordinates `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ManifoldModel<R: Real> {
    /// Flat `R^dim` with the standard inner product.
    Euclidean { dim: usize },
    /// Unit sphere `S^2 ⊂ R^3` (radius fixed at 1).
    Sphere,
    /// Torus embedded by
    /// `x = ((c + a cos v) cos u, (c + a cos v) sin u, a sin v)`,
    /// requiring `c > a > 0`.
    Torus { a: R, c: R },
}

impl<R: Real> ManifoldModel<R> {
    /// Euclidean model; `dim` must be positive.
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidManifold("Euclidean dim must be >= 1".into()));
        }
        Ok(Self::Euclidean { dim })
    }

    /// Unit sphere model.
    pub fn sphere() -> Self {
        Self::Sphere
    }

    /// Torus model; requires `c > a > 0` (non-degenerate, non-self
    /// intersecting).
    pub fn torus(a: R, c: R) -> Result<Self> {
        if !(a > R::zero()) || !(c > a) || !a.is_finite() || !c.is_finite() {
            return Err(Error::InvalidManifold(format!(
                "torus radii must satisfy c > a > 0, got a={a}, c={c}"
            )));
        }
        Ok(Self::Torus { a, c })
    }

    /// Dimension of the native coordinates a curve carries per node:
    /// `dim` for Euclidean, 3 for the sphere (ambient), 2 for the torus
    /// (chart).
    pub fn native_dim(&self) -> usize {
        match self {
            Self::Euclidean { dim } => *dim,
            Self::Sphere => 3,
            Self::Torus { .. } => 2,
        }
    }

    fn torus_radii(&self) -> Result<(R, R)> {
        match self {
            Self::Torus { a, c } => Ok((*a, *c)),
            _ => Err(Error::InvalidArgument(
                "operation requires a torus manifold".into(),
            )),
        }
    }
}

/// Chart state on the torus. Angles live on the real line (NOT wrapped):
/// winding matters both for boundary data like `u_f = π` and for multi-wind
/// curves; wrapping is applied only at export time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartState<R: Real> {
    pub u: R,
    pub v: R,
    pub du: R,
    pub dv: R,
    pub ddu: R,
    pub ddv: R,
}

/// Embedded state in `R^3` (sphere or exported torus curves).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddedState<R: Real> {
    pub x: [R; 3],
    pub dx: [R; 3],
    pub ddx: [R; 3],
}

/// Chart data of the torus at a given `v`: the Appendix-style shorthands
/// `r = c + a cos v`, `p = 2a sin v / r`, `q = sin v (c/a + cos v)`, the
/// Christoffel symbols, and the metric coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusChart<R: Real> {
    pub r: R,
    pub p: R,
    pub q: R,
    /// `Γ^u_{uv} = Γ^u_{vu} = −a sin v / r`
    pub gamma_u_uv: R,
    /// `Γ^v_{uu} = q`
    pub gamma_v_uu: R,
    /// `g_uu = r²`
    pub g_uu: R,
    /// `g_vv = a²`
    pub g_vv: R,
}

/// Derivatives of the torus chart shorthands with respect to `v`
/// (`r′ = −a sin v`, `p′ = 2a(c cos v + a)/r²`,
/// `p″ = 2a sin v (ac cos v + 2a² − c²)/r³`,
/// `q′ = (c/a) cos v + cos 2v`, `q″ = −(c/a) sin v − 2 sin 2v`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusChartDerivs<R: Real> {
    pub r_v: R,
    pub p_v: R,
    pub p_vv: R,
    pub q_v: R,
    pub q_vv: R,
}

/// Analytic `v`-derivatives of the chart shorthands at angle `v`.
pub fn torus_chart_derivs<R: Real>(v: R, m: &ManifoldModel<R>) -> Result<TorusChartDerivs<R>> {
    let (a, c) = m.torus_radii()?;
    let two = R::lit(2.0);
    let (sv, cv) = (v.sin(), v.cos());
    let r = c + a * cv;
    let r2 = r * r;
    Ok(TorusChartDerivs {
        r_v: -a * sv,
        p_v: two * a * (c * cv + a) / r2,
        p_vv: two * a * sv * (a * c * cv + two * a * a - c * c) / (r2 * r),
        q_v: (c / a) * cv + (two * v).cos(),
        q_vv: -(c / a) * sv - two * (two * v).sin(),
    })
}

/// Squared covariant acceleration on the unit sphere:
/// `‖∇_t ẋ‖² = ‖ẍ‖² − ‖ẋ‖⁴`.
///
/// Valid for states satisfying the sphere constraint and its differentiated
/// forms; the caller validates feasibility. The value is `≥ −tol` for
/// near-feasible states (Cauchy–Schwarz), but this function does not clamp.
pub fn sphere_accel_sq<R: Real>(s: &EmbeddedState<R>) -> R {
    let sp2 = norm3_sq(&s.dx);
    norm3_sq(&s.ddx) - sp2 * sp2
}

/// Covariant acceleration vector on the unit sphere: `∇_t ẋ = ẍ + ‖ẋ‖² x`.
pub fn sphere_cov_accel<R: Real>(s: &EmbeddedState<R>) -> [R; 3] {
    let sp2 = norm3_sq(&s.dx);
    [
        s.ddx[0] + sp2 * s.x[0],
        s.ddx[1] + sp2 * s.x[1],
        s.ddx[2] + sp2 * s.x[2],
    ]
}

/// Chart quantities of the torus at angle `v`.
pub fn torus_chart<R: Real>(v: R, m: &ManifoldModel<R>) -> Result<TorusChart<R>> {
    let (a, c) = m.torus_radii()?;
    let (sv, cv) = (v.sin(), v.cos());
    let r = c + a * cv;
    Ok(TorusChart {
        r,
        p: R::lit(2.0) * a * sv / r,
        q: sv * (c / a + cv),
        gamma_u_uv: -a * sv / r,
        gamma_v_uu: sv * (c / a + cv),
        g_uu: r * r,
        g_vv: a * a,
    })
}

/// Chart components of the covariant acceleration on the torus:
/// `a1 = ü − p u̇ v̇`, `a2 = v̈ + q u̇²`.
pub fn torus_cov_accel<R: Real>(s: &ChartState<R>, m: &ManifoldModel<R>) -> Result<(R, R)> {
    let ch = torus_chart(s.v, m)?;
    Ok((
        s.ddu - ch.p * s.du * s.dv,
        s.ddv + ch.q * s.du * s.du,
    ))
}

/// Embedding of the torus chart point `(u, v)` into `R^3`.
pub fn torus_embed<R: Real>(u: R, v: R, m: &ManifoldModel<R>) -> Result<[R; 3]> {
    let (a, c) = m.torus_radii()?;
    let r = c + a * v.cos();
    Ok([r * u.cos(), r * u.sin(), a * v.sin()])
}

/// Embedded position and velocity of a torus chart state (used for curve
/// export; the embedding is isometric, so `‖dx‖` equals the chart speed).
pub fn torus_embed_state<R: Real>(
    u: R,
    v: R,
    du: R,
    dv: R,
    m: &ManifoldModel<R>,
) -> Result<([R; 3], [R; 3])> {
    let (a, c) = m.torus_radii()?;
    let (su, cu) = (u.sin(), u.cos());
    let (sv, cv) = (v.sin(), v.cos());
    let r = c + a * cv;
    let dr = -a * sv * dv;
    let x = [r * cu, r * su, a * sv];
    let dx = [
        dr * cu - r * su * du,
        dr * su + r * cu * du,
        a * cv * dv,
    ];
    Ok((x, dx))
}

/// Squared norm of the covariant acceleration of a torus chart state in the
/// torus metric. The paper's F2 integrand on the torus is the *component*
/// sum `a1² + a2²` (consistent with its Appendix B Euler–Lagrange system),
/// which is what [`crate::transcription::eval_objectives`] integrates; this
/// helper exists for diagnostics that want the metric norm instead.
pub fn torus_cov_accel_metric_sq<R: Real>(
    s: &ChartState<R>,
    m: &ManifoldModel<R>,
) -> Result<R> {
    let ch = torus_chart(s.v, m)?;
    let (a1, a2) = torus_cov_accel(s, m)?;
    Ok(ch.g_uu * a1 * a1 + ch.g_vv * a2 * a2)
}

/// Kinetic-energy integrand `‖ẋ‖²` of a torus chart state:
/// `g_uu u̇² + g_vv v̇²` (first fundamental form).
pub fn torus_speed_sq<R: Real>(v: R, du: R, dv: R, m: &ManifoldModel<R>) -> Result<R> {
    let ch = torus_chart(v, m)?;
    Ok(ch.g_uu * du * du + ch.g_vv * dv * dv)
}

/// Pointwise norm of the covariant acceleration used in curve export:
/// sphere `√(max(0, ‖ẍ‖²−‖ẋ‖⁴))`, torus `√(a1²+a2²)`, Euclidean `‖a‖`.
pub fn cov_accel_norm<R: Real>(
    m: &ManifoldModel<R>,
    q: &[R],
    v: &[R],
    a: &[R],
) -> Result<R> {
    match m {
        ManifoldModel::Euclidean { .. } => {
            Ok(crate::la::norm_sq(a).sqrt())
        }
        ManifoldModel::Sphere => {
            let s = EmbeddedState {
                x: [q[0], q[1], q[2]],
                dx: [v[0], v[1], v[2]],
                ddx: [a[0], a[1], a[2]],
            };
            Ok(sphere_accel_sq(&s).max(R::zero()).sqrt())
        }
        ManifoldModel::Torus { .. } => {
            let s = ChartState {
                u: q[0],
                v: q[1],
                du: v[0],
                dv: v[1],
                ddu: a[0],
                ddv: a[1],
            };
            let (a1, a2) = torus_cov_accel(&s, m)?;
            Ok((a1 * a1 + a2 * a2).sqrt())
        }
    }
}
