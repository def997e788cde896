//! One-sided Dirichlet solves in weak form.
//!
//! The unknown field is discretely harmonic on its side with prescribed
//! trace `ψ` on `Γ_h¹`.  Extension values are eliminated through the trace
//! relation, which leaves a symmetric positive definite system in the
//! own-side grid values alone, solved by preconditioned conjugate
//! gradients.  The assembled matrix depends only on the geometry and the
//! side, so a solver is built once per side and reused across traces.

use crate::error::Result;
use crate::fields::{laplacian_h, lift_from_trace, BoundaryFn, BoundaryIndex, ExtendedField};
use crate::geometry::{GridGeometry, Side};

use super::sparse::{cg_solve, CsrMatrix, SolveStats, SparseSystem};

pub struct SingleLayerSolver<'a> {
    geom: &'a GridGeometry,
    side: Side,
    tol: f64,
    /// Grid point → unknown slot (box-boundary points are pinned to zero
    /// on the minus side).
    unknown: Vec<Option<usize>>,
    unknown_points: Vec<usize>,
    matrix: CsrMatrix,
}

impl<'a> SingleLayerSolver<'a> {
    pub fn new(geom: &'a GridGeometry, side: Side, tol: f64) -> Self {
        let own_plus = side == Side::Plus;
        let mut unknown = vec![None; geom.total_points()];
        let mut unknown_points = Vec::new();
        let own = match side {
            Side::Plus => &geom.plus_points,
            Side::Minus => &geom.minus_points,
        };
        for &p in own {
            if side == Side::Minus && geom.box_boundary[p] {
                continue;
            }
            unknown[p] = Some(unknown_points.len());
            unknown_points.push(p);
        }

        let hd2 = geom.h.powi(geom.dim as i32 - 2);
        let shape = geom.shape();
        let mut triplets = Vec::new();
        for axis in 0..geom.dim {
            for lower in 0..geom.total_points() {
                let c = geom.point_coords(lower);
                if c[axis] + 1 >= shape[axis] {
                    continue;
                }
                let mut cu = c;
                cu[axis] += 1;
                let upper = geom.point_index(cu);
                let (pl, pu) = (geom.is_plus(lower), geom.is_plus(upper));
                if pl == pu {
                    if pl != own_plus {
                        continue;
                    }
                    match (unknown[lower], unknown[upper]) {
                        (Some(i), Some(j)) => {
                            triplets.push((i, i, hd2));
                            triplets.push((j, j, hd2));
                            triplets.push((i, j, -hd2));
                            triplets.push((j, i, -hd2));
                        }
                        // one endpoint pinned to zero on ∂ℬ_h
                        (Some(i), None) | (None, Some(i)) => triplets.push((i, i, hd2)),
                        (None, None) => {}
                    }
                } else {
                    let id = geom.cut_between(lower, axis).expect("cut interval");
                    let cut = &geom.cuts[id];
                    let own_end = if own_plus { cut.plus_end } else { cut.minus_end };
                    let i = unknown[own_end].expect("cut endpoint is an unknown");
                    let s = geom.own_fraction(cut, side);
                    let w = if own_plus { cut.xi } else { 1.0 - cut.xi };
                    triplets.push((i, i, w * hd2 / (s * s)));
                }
            }
        }
        let matrix = CsrMatrix::from_triplets(unknown_points.len(), &triplets);
        Self {
            geom,
            side,
            tol,
            unknown,
            unknown_points,
            matrix,
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Solve for the discretely harmonic field with trace `psi`.
    pub fn solve(&self, psi: &BoundaryFn) -> Result<(ExtendedField, SolveStats)> {
        psi.expect(self.geom, BoundaryIndex::Gamma1)?;
        let geom = self.geom;
        let hd2 = geom.h.powi(geom.dim as i32 - 2);
        let own_plus = self.side == Side::Plus;
        let mut rhs = vec![0.0; self.unknown_points.len()];
        for (id, cut) in geom.cuts.iter().enumerate() {
            let own_end = if own_plus { cut.plus_end } else { cut.minus_end };
            let i = self.unknown[own_end].expect("cut endpoint is an unknown");
            let s = geom.own_fraction(cut, self.side);
            let w = if own_plus { cut.xi } else { 1.0 - cut.xi };
            rhs[i] += w * psi.values[id] * hd2 / (s * s);
        }
        let system = SparseSystem::new(self.matrix.clone(), rhs, self.tol);
        let (x, stats) = cg_solve(&system)?;
        let mut interior = vec![0.0; geom.total_points()];
        for (slot, &p) in self.unknown_points.iter().enumerate() {
            interior[p] = x[slot];
        }
        let field = lift_from_trace(geom, interior, psi, self.side)?;
        Ok((field, stats))
    }

    /// Max-norm of `Δ_h` applied to a solution, over the own-side points
    /// away from the boundary stencils (diagnostic).
    pub fn harmonic_residual(&self, field: &ExtendedField) -> Result<f64> {
        let lap = laplacian_h(self.geom, field)?;
        let own = match self.side {
            Side::Plus => &self.geom.plus_points,
            Side::Minus => &self.geom.minus_points,
        };
        let mut worst: f64 = 0.0;
        for &p in own {
            if self.side == Side::Minus && self.geom.box_boundary[p] {
                continue;
            }
            // skip points whose stencil touches a cut interval
            let mut cut_arm = false;
            for axis in 0..self.geom.dim {
                for dir in [-1i64, 1] {
                    if self.geom.cut_on_arm(p, axis, dir).is_some() {
                        cut_arm = true;
                    }
                }
            }
            if !cut_arm {
                worst = worst.max(lap[p].abs());
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{green_residual, inner, trace_m};
    use crate::geometry::{ImplicitDomain, LevelSet};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn circle(n: usize) -> GridGeometry {
        let d = ImplicitDomain::new(LevelSet::Circle { radius: 0.7 }, 1.0);
        GridGeometry::build(&d, n, 0.1).unwrap()
    }

    #[test]
    fn constant_trace_gives_constant_plus_solution() {
        let geom = circle(24);
        let solver = SingleLayerSolver::new(&geom, Side::Plus, 1e-12);
        let psi = BoundaryFn::constant(&geom, BoundaryIndex::Gamma1, 2.0);
        let (u, _) = solver.solve(&psi).unwrap();
        for &p in &geom.plus_points {
            assert!((u.interior[p] - 2.0).abs() < 1e-9, "u = {}", u.interior[p]);
        }
        for e in &u.ext {
            assert!((e - 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn solution_is_discretely_harmonic() {
        let geom = circle(24);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for side in [Side::Plus, Side::Minus] {
            let solver = SingleLayerSolver::new(&geom, side, 1e-12);
            let psi = BoundaryFn::gamma1(
                (0..geom.cuts.len())
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect(),
            );
            let (u, _) = solver.solve(&psi).unwrap();
            // the weak equations enforce Δ_h u = 0 at every stencil whose
            // test function is unconstrained, which here is all of them
            let lap = laplacian_h(&geom, &u).unwrap();
            let own = match side {
                Side::Plus => &geom.plus_points,
                Side::Minus => &geom.minus_points,
            };
            for &p in own {
                if side == Side::Minus && geom.box_boundary[p] {
                    continue;
                }
                assert!(lap[p].abs() < 1e-6, "side {side}: lap {}", lap[p]);
            }
            // and the trace is reproduced
            let tr = trace_m(&geom, &u);
            for (a, b) in tr.values.iter().zip(&psi.values) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn energy_minimization_among_admissible_fields() {
        // the solve minimizes ⟨v, v⟩ over fields with the given trace
        let geom = circle(16);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for side in [Side::Plus, Side::Minus] {
            let solver = SingleLayerSolver::new(&geom, side, 1e-12);
            let psi = BoundaryFn::gamma1(
                (0..geom.cuts.len())
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect(),
            );
            let (u, _) = solver.solve(&psi).unwrap();
            let base = inner(&geom, &u, &u).unwrap();
            for trial in 0..10 {
                let interior: Vec<f64> = (0..geom.total_points())
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect();
                let mut interior = interior;
                for idx in 0..geom.total_points() {
                    if side == Side::Minus && geom.box_boundary[idx] {
                        interior[idx] = 0.0;
                    }
                }
                let v = lift_from_trace(&geom, interior, &psi, side).unwrap();
                let e = inner(&geom, &v, &v).unwrap();
                assert!(
                    e >= base * (1.0 - 1e-9),
                    "trial {trial}: {e} < minimum {base}"
                );
            }
        }
    }

    #[test]
    fn green_identity_holds_for_solutions() {
        let geom = circle(24);
        let solver = SingleLayerSolver::new(&geom, Side::Plus, 1e-12);
        let psi = BoundaryFn::sample(&geom, BoundaryIndex::Gamma1, |p| p[0] + 0.3 * p[1]);
        let (u, _) = solver.solve(&psi).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut v = ExtendedField::zeros(&geom, Side::Plus);
        for &p in &geom.plus_points {
            v.interior[p] = rng.gen_range(-1.0..1.0);
        }
        for e in v.ext.iter_mut() {
            *e = rng.gen_range(-1.0..1.0);
        }
        assert!(green_residual(&geom, &u, &v).unwrap() < 1e-9);
    }

    #[test]
    fn matrix_is_symmetric() {
        let geom = circle(16);
        for side in [Side::Plus, Side::Minus] {
            let solver = SingleLayerSolver::new(&geom, side, 1e-12);
            assert!(solver.matrix.max_asymmetry() < 1e-14);
        }
    }
}
