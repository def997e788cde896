//! Manufactured-solution convergence studies.

use std::time::Instant;

use crate::driver::{l2_node_error, max_node_error, solve_dirichlet};
use crate::error::{ConfigError, Result};
use crate::fields::{BoundaryFn, BoundaryIndex};
use crate::geometry::GridGeometry;

use super::report::{ConvergenceRow, Report};
use super::StudyConfig;

/// Sanity band for observed max-norm orders on the finest pair.  The
/// generic behavior is second order; solutions whose fourth derivatives
/// vanish (cubics and below) superconverge toward third order — and can
/// overshoot it on coarse pairs — so the band is deliberately wider than
/// the generic [1.7, 2.3].
const ORDER_BAND: (f64, f64) = (1.5, 3.6);

/// Run a convergence sweep over `config.resolutions`, recording node
/// errors against the exact solution and observed orders.
pub fn run_convergence(config: &StudyConfig) -> Result<Report> {
    config.validate()?;
    let solution = config.solution.clone().ok_or_else(|| {
        ConfigError::Invalid("convergence study needs a [solution] section".into())
    })?;
    let exact = |p: &[f64; 3]| solution.eval(p);
    let mut report = Report::new("convergence", config, config.seed);
    let solve_config = config.solve_config();

    let mut prev: Option<(f64, f64)> = None;
    for &n in &config.resolutions {
        let t0 = Instant::now();
        let geom = GridGeometry::build(&config.domain, n, config.delta)?;
        let f = BoundaryFn::sample(&geom, BoundaryIndex::Gamma0, exact);
        let solve = solve_dirichlet(&geom, &f, &solve_config)?;
        let err_max = max_node_error(&geom, &solve.solution, exact);
        let err_l2 = l2_node_error(&geom, &solve.solution, exact);
        let (order_max, order_l2) = match prev {
            Some((pm, pl)) if err_max > 0.0 && err_l2 > 0.0 => {
                (Some((pm / err_max).log2()), Some((pl / err_l2).log2()))
            }
            _ => (None, None),
        };
        report.rows.push(ConvergenceRow {
            n,
            h: geom.h,
            err_max,
            err_l2,
            order_max,
            order_l2,
            iters: solve.iterations,
            seconds: t0.elapsed().as_secs_f64(),
        });
        prev = Some((err_max, err_l2));
    }

    if report.rows.len() >= 2 {
        let last = report.rows.last().unwrap();
        // quadratic-and-below data is solved to the iteration noise floor;
        // order checks are meaningless there
        let at_floor = last.err_max <= 100.0 * config.fp_tol;
        if at_floor {
            report.check(
                "errors-at-noise-floor",
                true,
                last.err_max,
                format!("≤ {:.1e}", 100.0 * config.fp_tol),
            );
        } else if let Some(order) = last.order_max {
            report.check(
                "finest-pair-order",
                (ORDER_BAND.0..=ORDER_BAND.1).contains(&order),
                order,
                format!("in [{}, {}]", ORDER_BAND.0, ORDER_BAND.1),
            );
        }
    }
    Ok(report)
}
