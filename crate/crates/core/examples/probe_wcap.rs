use paretopath_core::geometry::ManifoldModel;
use paretopath_core::nlp::{self, SolveOptions};
use paretopath_core::scalarize::{ChebyshevProblem, UtopianConfig, WeightedSumProblem};
use paretopath_core::transcription::{BoundaryData, Transcription};

fn main() {
    let m = ManifoldModel::euclidean(3).unwrap();
    let b = BoundaryData::new(
        &m,
        vec![0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![2.0, 2.0, 1.0],
        vec![0.0, 1.0, -1.0],
        0.0,
        1.0,
    )
    .unwrap();
    let tr: Transcription<f64> = Transcription::new(m, b, 201).unwrap();
    let u = UtopianConfig::default();
    let mode = std::env::args().nth(1).unwrap_or_default();
    let res = if mode == "ws" {
        let prob = WeightedSumProblem::new(&tr, 0.999).unwrap();
        nlp::solve(&prob, &tr.linear_init(), &SolveOptions::default())
    } else {
        let prob = ChebyshevProblem::new(&tr, 0.999, &u).unwrap();
        let mut z0 = tr.linear_init();
        let o0 = tr.objectives(&z0);
        z0.push((0.999 * o0.f1).max(0.001 * o0.f2).max(0.0));
        nlp::solve(&prob, &z0, &SolveOptions::default())
    };
    for rec in &res.history {
        println!(
            "outer {:>2} inner {:>5} obj {:.9e} theta {:.3e} rho {:.1e} omega {:.1e} acc {}",
            rec.outer, rec.inner_iterations, rec.objective, rec.theta, rec.rho, rec.omega, rec.accepted
        );
    }
    let n = tr.n_vars();
    let obj = tr.objectives(&res.x[..n]);
    println!(
        "status {:?} inners {} kkt {:?} F1 {:.6} F2 {:.6} mu {:?}",
        res.status, res.inner_iterations, res.kkt, obj.f1, obj.f2, res.ineq_multipliers
    );
}
