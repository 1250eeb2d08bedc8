//! End-to-end checks of transcription + NLP against the closed-form
//! Euclidean solutions.

use paretopath_core::euclid_oracle::{objectives_of_tau, solve_coefficients};
use paretopath_core::geometry::ManifoldModel;
use paretopath_core::nlp::{self, SolveOptions, SolveStatus};
use paretopath_core::scalarize::WeightedSumProblem;
use paretopath_core::transcription::{BoundaryData, Transcription};

fn example1_boundary(m: &ManifoldModel<f64>) -> BoundaryData<f64> {
    BoundaryData::new(
        m,
        vec![0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![2.0, 2.0, 1.0],
        vec![0.0, 1.0, -1.0],
        0.0,
        1.0,
    )
    .unwrap()
}

#[test]
fn euclidean_weighted_sum_matches_oracle() {
    // w = 1/2 ⇒ tension τ = w/(1−w) = 1 in the closed form (the weighted
    // sum is proportional to F2 + τ F1).
    let m = ManifoldModel::euclidean(3).unwrap();
    let b = example1_boundary(&m);
    let tr = Transcription::new(m, b, 201).unwrap();
    let prob = WeightedSumProblem::new(&tr, 0.5).unwrap();
    let result = nlp::solve(&prob, &tr.linear_init(), &SolveOptions::default());
    assert_eq!(result.status, SolveStatus::Converged, "kkt {:?}", result.kkt);

    let co = solve_coefficients(
        1.0,
        1.0,
        &[0.0, 0.0, 0.0],
        &[1.0, 0.0, 0.0],
        &[2.0, 2.0, 1.0],
        &[0.0, 1.0, -1.0],
    )
    .unwrap();
    let exact = objectives_of_tau(&co);
    let got = tr.objectives(&result.x);
    // Trapezoid transcription at n=201 carries O(h²) ≈ 2.5e-5 relative
    // discretization error.
    assert!(
        (got.f1 - exact.f1).abs() < 2e-3 * exact.f1,
        "F1 {} vs exact {}",
        got.f1,
        exact.f1
    );
    assert!(
        (got.f2 - exact.f2).abs() < 2e-3 * exact.f2,
        "F2 {} vs exact {}",
        got.f2,
        exact.f2
    );

    // Midpoint of the optimal curve matches the closed form.
    let curve = tr.unpack(&result.x);
    let mid = curve.q_node(100);
    assert!((mid[0] - 1.1224593312018546).abs() < 1e-3, "{mid:?}");
    assert!((mid[1] - 0.87754066879814544).abs() < 1e-3);
    assert!((mid[2] - 0.62245933120185456).abs() < 1e-3);
}

#[test]
fn euclidean_refinement_converges_to_oracle() {
    // Discretization error in F2 must shrink ~4× per node doubling.
    let m = ManifoldModel::euclidean(3).unwrap();
    let co = solve_coefficients(
        4.0,
        1.0,
        &[0.0, 0.0, 0.0],
        &[1.0, 0.0, 0.0],
        &[2.0, 2.0, 1.0],
        &[0.0, 1.0, -1.0],
    )
    .unwrap();
    let exact = objectives_of_tau(&co);
    let mut errs = Vec::new();
    for n in [51usize, 101, 201] {
        let b = example1_boundary(&m);
        let tr = Transcription::new(m.clone(), b, n).unwrap();
        let prob = WeightedSumProblem::new(&tr, 0.8).unwrap(); // τ = 0.8/0.2 = 4
        let result = nlp::solve(&prob, &tr.linear_init(), &SolveOptions::default());
        assert_eq!(result.status, SolveStatus::Converged, "n={n} kkt {:?}", result.kkt);
        let got = tr.objectives(&result.x);
        errs.push((got.f2 - exact.f2).abs());
    }
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[0] / errs[2] > 8.0, "expected ≥~16× shrink over 4× nodes, got {errs:?}");
}

#[test]
fn sphere_cubic_reaches_reported_objectives() {
    // Near-antipodal instance: minimizing F2 alone yields the Riemannian
    // cubic whose objective pair is reported as (11.76, 113.2).
    let m: ManifoldModel<f64> = ManifoldModel::sphere();
    let b = BoundaryData::new(
        &m,
        vec![1.0, 0.0, 0.0],
        vec![0.0, 0.1, 0.0],
        vec![-1.0, 0.0, 0.0],
        vec![0.0, 0.0, -0.1],
        0.0,
        1.0,
    )
    .unwrap();
    let tr = Transcription::new(m, b, 401).unwrap();
    let prob = WeightedSumProblem::new(&tr, 0.0).unwrap();
    let result = nlp::solve(&prob, &tr.linear_init(), &SolveOptions::default());
    let got = tr.objectives(&result.x);
    println!(
        "sphere: status {:?} kkt {:?} F1 {:.6} F2 {:.6} inners {}",
        result.status, result.kkt, got.f1, got.f2, result.inner_iterations
    );
    assert_eq!(result.status, SolveStatus::Converged, "kkt {:?}", result.kkt);
    assert!((got.f1 - 11.7566).abs() / 11.7566 < 0.01, "F1 {}", got.f1);
    assert!((got.f2 - 113.2003).abs() / 113.2003 < 0.01, "F2 {}", got.f2);
    // The unit-norm rows hold at the solver's feasibility level.
    let curve = tr.unpack(&result.x);
    for k in 0..curve.n_nodes() {
        let q = curve.q_node(k);
        let r = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
        assert!((r - 1.0).abs() < 1e-7, "node {k}: |q| = {r}");
    }
}

#[test]
fn torus_weighted_sum_converges_from_straight_chart_line() {
    let m = ManifoldModel::torus(1.0, 2.0).unwrap();
    let b = BoundaryData::new(
        &m,
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![std::f64::consts::PI, std::f64::consts::FRAC_PI_2],
        vec![0.0, -1.0],
        0.0,
        1.0,
    )
    .unwrap();
    let tr = Transcription::new(m, b, 201).unwrap();
    let prob = WeightedSumProblem::new(&tr, 0.5931462104).unwrap();
    let result = nlp::solve(&prob, &tr.linear_init(), &SolveOptions::default());
    let got = tr.objectives(&result.x);
    println!(
        "torus: status {:?} kkt {:?} F1 {:.6} F2 {:.6} inners {}",
        result.status, result.kkt, got.f1, got.f2, result.inner_iterations
    );
    assert_eq!(result.status, SolveStatus::Converged, "kkt {:?}", result.kkt);
    assert!(got.f1.is_finite() && got.f2.is_finite());
    assert!(got.f1 > 0.0 && got.f2 > 0.0);
}
