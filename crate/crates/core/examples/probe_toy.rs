use paretopath_core::nlp::{self, NlpProblem, SolveOptions};

struct ChebyToy {
    w: f64,
}

impl NlpProblem<f64> for ChebyToy {
    fn n_vars(&self) -> usize {
        2
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
        out[0] += y[0] * self.w * 2.0 * (x[0] - 1.0) + y[1] * (1.0 - self.w) * 2.0 * (x[0] + 1.0);
        out[1] += -y[0] - y[1] - y[2];
    }
}

fn main() {
    let r = nlp::solve(&ChebyToy { w: 0.5 }, &[0.7, 2.0], &SolveOptions::default());
    for h in &r.history {
        println!(
            "outer {:2} inner {:5} obj {:.9e} theta {:.3e} rho {:.1e} omega {:.1e} acc {}",
            h.outer, h.inner_iterations, h.objective, h.theta, h.rho, h.omega, h.accepted
        );
    }
    println!(
        "status {:?} inners {} kkt {:?} x {:?} mu {:?}",
        r.status, r.inner_iterations, r.kkt, r.x, r.ineq_multipliers
    );
}
