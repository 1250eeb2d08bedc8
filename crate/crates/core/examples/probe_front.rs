use paretopath_core::geometry::ManifoldModel;
use paretopath_core::nlp::SolveOptions;
use paretopath_core::scalarize::{
    essential_interval, solve_ideal_costs, sweep_front, ScalarizationMode, SweepConfig,
    UtopianConfig,
};
use paretopath_core::transcription::{BoundaryData, Transcription};

fn main() {
    let u: UtopianConfig<f64> = UtopianConfig::default();
    let opts = SolveOptions::default();

    // Geodesic data: the straight line minimizes both costs at once.
    let m = ManifoldModel::euclidean(3).unwrap();
    let b = BoundaryData::new(
        &m,
        vec![0.0; 3],
        vec![1.0, 1.0, 1.0],
        vec![1.0, 1.0, 1.0],
        vec![1.0, 1.0, 1.0],
        0.0,
        1.0,
    )
    .unwrap();
    let tr = Transcription::new(m, b, 101).unwrap();
    let r = solve_ideal_costs(&tr, &u, 0.999, &opts).unwrap();
    println!(
        "geodesic ideal: f1*={:.6e} f2*={:.6e} f1_bar={:.6e} f2_bar={:.6e}",
        r.f1_star, r.f2_star, r.f1_bar, r.f2_bar
    );
    let iv = essential_interval(&r, &u).unwrap();
    println!(
        "interval: w0={:.6e} wf={:.6e} collapsed={}",
        iv.w0,
        iv.wf,
        iv.is_collapsed()
    );

    // Euclid example sweep, both modes.
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
    for mode in [ScalarizationMode::Chebyshev, ScalarizationMode::WeightedSum] {
        let cfg = SweepConfig {
            n_weights: 7,
            mode,
            ..SweepConfig::default()
        };
        let front = sweep_front(&tr, &u, &cfg, &opts).unwrap();
        println!(
            "mode {:?}: {} points, {} rejected",
            mode,
            front.points.len(),
            front.rejected.len()
        );
        for p in &front.points {
            println!(
                "  w={:.6} f1={:.9} f2={:.9} alpha={:.6} status={:?} dom={}",
                p.w, p.f1, p.f2, p.alpha, p.status, p.dominated
            );
        }
        for p in &front.rejected {
            println!(
                "  REJ w={:.6} f1={:.9} f2={:.9} status={:?} dom={}",
                p.w, p.f1, p.f2, p.status, p.dominated
            );
        }
    }
}
