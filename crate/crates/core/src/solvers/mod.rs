//! Linear solves: single-layer Dirichlet problems on either side, the
//! interface (double-layer) problem, the Shortley-Weller discretization,
//! and quadratic extrapolation of its solution past the boundary.

mod interface;
mod poisson;
mod shortley_weller;
mod single_layer;
mod sparse;

pub use interface::InterfaceSolver;
pub use poisson::FastPoisson;
pub use shortley_weller::{quadratic_extrapolate, shortley_weller};
pub use single_layer::SingleLayerSolver;
pub use sparse::{
    bicgstab_solve, cg_solve, default_max_iters, CsrMatrix, SolveStats, SparseSystem,
    DEFAULT_CG_TOL,
};

/// Value at `x` of the quadratic through three points with distinct
/// abscissae.
pub(crate) fn quadratic_eval(nodes: [(f64, f64); 3], x: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        let (xi, yi) = nodes[i];
        let mut l = 1.0;
        for j in 0..3 {
            if i != j {
                let xj = nodes[j].0;
                l *= (x - xj) / (xi - xj);
            }
        }
        acc += yi * l;
    }
    acc
}
