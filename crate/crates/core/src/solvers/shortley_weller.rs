//! Shortley-Weller discretization of the Dirichlet problem on the interior
//! side, with boundary data at the assigned cut points `Γ_h⁰`, plus the
//! quadratic extrapolation that extends its solution across each cut
//! interval.
//!
//! Near the boundary the centered second difference is replaced by the
//! unequal-spacing three-point formula using the exact crossing distance
//! `s·h`.  The resulting matrix is a nonsymmetric M-matrix, solved with
//! preconditioned BiCGSTAB.

use crate::error::Result;
use crate::fields::{BoundaryFn, BoundaryIndex, ExtendedField};
use crate::geometry::{GridGeometry, Side};

use super::quadratic_eval;
use super::sparse::{bicgstab_solve, CsrMatrix, SolveStats, SparseSystem};

/// Solve the interior Dirichlet problem `Δ_h^{sw} w = 0`, `w = f` on
/// `Γ_h⁰`.  Returns the grid values (meaningful on `Ω_h⁺`).
pub fn shortley_weller(
    geom: &GridGeometry,
    f: &BoundaryFn,
    tol: f64,
) -> Result<(Vec<f64>, SolveStats)> {
    f.expect(geom, BoundaryIndex::Gamma0)?;
    let n_unknowns = geom.plus_points.len();
    let mut slot = vec![usize::MAX; geom.total_points()];
    for (i, &p) in geom.plus_points.iter().enumerate() {
        slot[p] = i;
    }

    // rows are scaled by h², so the uncut stencil is (−1, 2, −1)
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; n_unknowns];
    for (i, &p) in geom.plus_points.iter().enumerate() {
        for axis in 0..geom.dim {
            let left = geom.cut_on_arm(p, axis, -1);
            let right = geom.cut_on_arm(p, axis, 1);
            match (left, right) {
                (None, None) => {
                    triplets.push((i, i, 2.0));
                    for dir in [-1i64, 1] {
                        let q = geom.neighbor(p, axis, dir).expect("interior stencil");
                        triplets.push((i, slot[q], -1.0));
                    }
                }
                (None, Some(id)) => {
                    let s = geom.s_from_plus(&geom.cuts[id]);
                    let q = geom.neighbor(p, axis, -1).expect("interior stencil");
                    triplets.push((i, i, 2.0 / s));
                    triplets.push((i, slot[q], -2.0 / (1.0 + s)));
                    rhs[i] += 2.0 / ((1.0 + s) * s) * f.values[geom.cuts[id].gamma0];
                }
                (Some(id), None) => {
                    let s = geom.s_from_plus(&geom.cuts[id]);
                    let q = geom.neighbor(p, axis, 1).expect("interior stencil");
                    triplets.push((i, i, 2.0 / s));
                    triplets.push((i, slot[q], -2.0 / (1.0 + s)));
                    rhs[i] += 2.0 / ((1.0 + s) * s) * f.values[geom.cuts[id].gamma0];
                }
                (Some(il), Some(ir)) => {
                    let sl = geom.s_from_plus(&geom.cuts[il]);
                    let sr = geom.s_from_plus(&geom.cuts[ir]);
                    let fl = f.values[geom.cuts[il].gamma0];
                    let fr = f.values[geom.cuts[ir].gamma0];
                    triplets.push((i, i, 2.0 / (sl * sr)));
                    rhs[i] += 2.0 / (sl + sr) * (fr / sr + fl / sl);
                }
            }
        }
    }

    let matrix = CsrMatrix::from_triplets(n_unknowns, &triplets);
    let system = SparseSystem::new(matrix, rhs, tol);
    let (x, stats) = bicgstab_solve(&system)?;
    let mut w = vec![0.0; geom.total_points()];
    for (i, &p) in geom.plus_points.iter().enumerate() {
        w[p] = x[i];
    }
    Ok((w, stats))
}

/// Extend interior grid values across each cut interval by evaluating, at
/// the exterior endpoint, the quadratic through the two nearest interior
/// nodes (or an opposite-arm boundary value when the stencil is cut on
/// both sides) and the boundary value at the crossing.
pub fn quadratic_extrapolate(
    geom: &GridGeometry,
    w: &[f64],
    f: &BoundaryFn,
) -> Result<ExtendedField> {
    f.expect(geom, BoundaryIndex::Gamma0)?;
    let mut field = ExtendedField::zeros(geom, Side::Plus);
    field.interior.copy_from_slice(w);
    for (id, cut) in geom.cuts.iter().enumerate() {
        let p = cut.plus_end;
        // direction from the plus endpoint toward the minus endpoint
        let dir: i64 = if cut.minus_end == cut.upper { 1 } else { -1 };
        let s = geom.s_from_plus(cut);
        let back = geom
            .neighbor(p, cut.axis, -dir)
            .expect("stencil inside the box");
        let back_node = if geom.is_plus(back) {
            (-1.0, w[back])
        } else {
            let other = geom
                .cut_on_arm(p, cut.axis, -dir)
                .expect("opposite arm is cut");
            (
                -geom.s_from_plus(&geom.cuts[other]),
                f.values[geom.cuts[other].gamma0],
            )
        };
        field.ext[id] = quadratic_eval(
            [back_node, (0.0, w[p]), (s, f.values[cut.gamma0])],
            1.0,
        );
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ImplicitDomain, LevelSet};

    fn circle(n: usize) -> GridGeometry {
        let d = ImplicitDomain::new(LevelSet::Circle { radius: 0.7 }, 1.0);
        GridGeometry::build(&d, n, 0.1).unwrap()
    }

    fn solve_with_data(
        geom: &GridGeometry,
        exact: impl Fn(&[f64; 3]) -> f64 + Copy,
    ) -> Vec<f64> {
        let f = BoundaryFn::sample(geom, BoundaryIndex::Gamma0, exact);
        shortley_weller(geom, &f, 1e-12).unwrap().0
    }

    fn max_error(geom: &GridGeometry, w: &[f64], exact: impl Fn(&[f64; 3]) -> f64) -> f64 {
        geom.plus_points
            .iter()
            .map(|&p| (w[p] - exact(&geom.position(p))).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn constant_data_reproduced_exactly() {
        let geom = circle(24);
        let w = solve_with_data(&geom, |_| 3.0);
        assert!(max_error(&geom, &w, |_| 3.0) < 1e-10);
    }

    #[test]
    fn harmonic_quadratic_reproduced_exactly() {
        // the unequal-spacing formula is exact on quadratics, so x² − y²
        // and xy solve the discrete problem with zero truncation error
        let geom = circle(32);
        for exact in [
            (|p: &[f64; 3]| p[0] * p[0] - p[1] * p[1]) as fn(&[f64; 3]) -> f64,
            |p| p[0] * p[1],
        ] {
            let w = solve_with_data(&geom, exact);
            assert!(max_error(&geom, &w, exact) < 1e-9);
        }
    }

    #[test]
    fn second_order_convergence_on_smooth_harmonic() {
        let exact = |p: &[f64; 3]| (p[0] * p[0] * p[0] - 3.0 * p[0] * p[1] * p[1]) + 0.5 * p[1];
        let mut errs = Vec::new();
        for n in [32, 64] {
            let geom = circle(n);
            let w = solve_with_data(&geom, exact);
            errs.push(max_error(&geom, &w, exact));
        }
        let ratio = errs[0] / errs[1];
        assert!(ratio > 3.0, "error ratio {ratio} below second order");
    }

    #[test]
    fn discrete_maximum_principle() {
        let geom = circle(24);
        let f = BoundaryFn::sample(&geom, BoundaryIndex::Gamma0, |p| p[0].sin() + 0.5 * p[1]);
        let (w, _) = shortley_weller(&geom, &f, 1e-12).unwrap();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in &f.values {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
        let tol = 1e-9;
        for &p in &geom.plus_points {
            assert!(w[p] >= lo - tol && w[p] <= hi + tol, "w = {}", w[p]);
        }
    }

    #[test]
    fn extrapolation_is_exact_on_quadratics() {
        let geom = circle(32);
        let exact = |p: &[f64; 3]| p[0] * p[0] - p[1] * p[1] + 0.3 * p[0];
        let mut w = vec![0.0; geom.total_points()];
        for &p in &geom.plus_points {
            w[p] = exact(&geom.position(p));
        }
        // boundary values must be sampled at the true crossing points
        let f = BoundaryFn::sample(&geom, BoundaryIndex::Gamma0, exact);
        let field = quadratic_extrapolate(&geom, &w, &f).unwrap();
        for (id, cut) in geom.cuts.iter().enumerate() {
            let want = exact(&geom.position(cut.minus_end));
            assert!(
                (field.ext[id] - want).abs() < 1e-10,
                "ext {} vs {want}",
                field.ext[id]
            );
        }
    }

    #[test]
    fn works_on_sphere() {
        let d = ImplicitDomain::new(LevelSet::Sphere { radius: 0.6 }, 1.0);
        let geom = GridGeometry::build(&d, 12, 0.1).unwrap();
        let exact = |p: &[f64; 3]| p[0] * p[1] + p[2];
        let w = solve_with_data(&geom, exact);
        assert!(max_error(&geom, &w, exact) < 1e-9);
    }
}
