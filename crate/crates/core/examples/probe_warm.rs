use paretopath_core::geometry::ManifoldModel;
use paretopath_core::nlp::{self, NlpProblem, SolveOptions};
use paretopath_core::scalarize::WeightedSumProblem;
use paretopath_core::transcription::{BoundaryData, Transcription};

fn main() {
    let m = ManifoldModel::euclidean(3).unwrap();
    let b = BoundaryData::new(
        &m,
        vec![0.0; 3],
        vec![1.0, 0.0, 0.0],
        vec![2.0, 2.0, 1.0],
        vec![0.0, 1.0, -1.0],
        0.0,
        1.0,
    )
    .unwrap();
    let tr = Transcription::new(m, b, 201).unwrap();
    let opts = SolveOptions::default();

    let p0 = WeightedSumProblem::new(&tr, 0.887953).unwrap();
    let r0 = nlp::solve(&p0, &tr.linear_init(), &opts);
    println!("cold w=0.887953: {:?} inners {}", r0.status, r0.inner_iterations);

    let p1 = WeightedSumProblem::new(&tr, 0.906451).unwrap();
    let r1 = nlp::solve_warm(&p1, &r0.x, Some(&r0.eq_multipliers), None, &opts);
    for h in &r1.history {
        println!(
            "outer {:2} inner {:5} obj {:.9e} theta {:.3e} rho {:.1e} omega {:.1e} acc {}",
            h.outer, h.inner_iterations, h.objective, h.theta, h.rho, h.omega, h.accepted
        );
    }
    println!(
        "warm w=0.906451: {:?} inners {} kkt {:?}",
        r1.status, r1.inner_iterations, r1.kkt
    );
    let n = p1.n_vars();
    let mut g: Vec<f64> = vec![0.0; n];
    let f = p1.objective_grad(&r1.x, &mut g);
    println!("objective {:.9} grad_inf {:.3e}", f, g.iter().fold(0.0f64, |a, &v| a.max(v.abs())));
}
