//! The two-sided interface solve: a pair of fields, discretely harmonic on
//! their own sides, with matching traces up to a prescribed jump `φ` and
//! matching flux across every cut interval.
//!
//! Folding the jump into the extension values turns the pair into a single
//! grid function on all of `ℬ_h`, and the matching conditions reduce to one
//! Poisson problem with zero box boundary data and point sources at the cut
//! endpoints.  That problem is solved directly by sine-transform
//! diagonalization, so the result is exact up to round-off.

use crate::error::Result;
use crate::fields::{BoundaryFn, BoundaryIndex, ExtendedField};
use crate::geometry::{GridGeometry, Side};

use super::poisson::FastPoisson;

pub struct InterfaceSolver<'a> {
    geom: &'a GridGeometry,
    poisson: FastPoisson,
}

impl<'a> InterfaceSolver<'a> {
    pub fn new(geom: &'a GridGeometry) -> Self {
        let poisson = FastPoisson::new(geom.dim, geom.n, geom.h);
        Self { geom, poisson }
    }

    /// Solve for the pair `(u⁺, u⁻)` with trace jump `Mu⁺ − Mu⁻ = φ` on
    /// every cut interval.
    pub fn solve(&self, phi: &BoundaryFn) -> Result<(ExtendedField, ExtendedField)> {
        phi.expect(self.geom, BoundaryIndex::Gamma1)?;
        let geom = self.geom;
        let h2 = geom.h * geom.h;
        let mut rhs = vec![0.0; geom.total_points()];
        for (id, cut) in geom.cuts.iter().enumerate() {
            rhs[cut.plus_end] -= phi.values[id] / h2;
            rhs[cut.minus_end] += phi.values[id] / h2;
        }
        let u = self.poisson.solve(&rhs);

        let mut plus = ExtendedField::zeros(geom, Side::Plus);
        let mut minus = ExtendedField::zeros(geom, Side::Minus);
        plus.interior.copy_from_slice(&u);
        minus.interior.copy_from_slice(&u);
        for (id, cut) in geom.cuts.iter().enumerate() {
            plus.ext[id] = u[cut.minus_end] + phi.values[id];
            minus.ext[id] = u[cut.plus_end] - phi.values[id];
        }
        Ok((plus, minus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{inner, jump_pairing, laplacian_h, trace_m};
    use crate::geometry::{ImplicitDomain, LevelSet};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn circle(n: usize) -> GridGeometry {
        let d = ImplicitDomain::new(LevelSet::Circle { radius: 0.7 }, 1.0);
        GridGeometry::build(&d, n, 0.1).unwrap()
    }

    fn random_phi(geom: &GridGeometry, seed: u64) -> BoundaryFn {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BoundaryFn::gamma1(
            (0..geom.cuts.len())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        )
    }

    #[test]
    fn zero_jump_gives_zero_pair() {
        let geom = circle(16);
        let solver = InterfaceSolver::new(&geom);
        let phi = BoundaryFn::constant(&geom, BoundaryIndex::Gamma1, 0.0);
        let (up, um) = solver.solve(&phi).unwrap();
        assert!(up.interior.iter().all(|v| v.abs() < 1e-13));
        assert!(um.ext.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn unit_jump_gives_indicator_pair() {
        // φ ≡ 1: u⁺ ≡ 1 on its side, u⁻ ≡ 0
        let geom = circle(24);
        let solver = InterfaceSolver::new(&geom);
        let phi = BoundaryFn::constant(&geom, BoundaryIndex::Gamma1, 1.0);
        let (up, um) = solver.solve(&phi).unwrap();
        for &p in &geom.plus_points {
            assert!((up.interior[p] - 1.0).abs() < 1e-10, "{}", up.interior[p]);
        }
        for &p in &geom.minus_points {
            assert!(um.interior[p].abs() < 1e-10);
        }
        for id in 0..geom.cuts.len() {
            assert!((up.ext[id] - 1.0).abs() < 1e-10);
            assert!(um.ext[id].abs() < 1e-10);
        }
    }

    #[test]
    fn pair_satisfies_all_matching_conditions() {
        let geom = circle(24);
        let solver = InterfaceSolver::new(&geom);
        let phi = random_phi(&geom, 4);
        let (up, um) = solver.solve(&phi).unwrap();

        // discretely harmonic on each side
        let lp = laplacian_h(&geom, &up).unwrap();
        for &p in &geom.plus_points {
            assert!(lp[p].abs() < 1e-8, "plus lap {}", lp[p]);
        }
        let lm = laplacian_h(&geom, &um).unwrap();
        for &p in &geom.minus_points {
            assert!(lm[p].abs() < 1e-8, "minus lap {}", lm[p]);
        }

        // trace jump equals φ
        let tp = trace_m(&geom, &up);
        let tm = trace_m(&geom, &um);
        for id in 0..geom.cuts.len() {
            let jump = tp.values[id] - tm.values[id];
            assert!((jump - phi.values[id]).abs() < 1e-10);
        }

        // flux matches across every cut interval
        for id in 0..geom.cuts.len() {
            let dp = up.cut_diff(&geom, id);
            let dm = um.cut_diff(&geom, id);
            assert!((dp - dm).abs() < 1e-8, "flux jump {}", dp - dm);
        }
    }

    #[test]
    fn energy_identity_with_boundary_pairing() {
        // summing the two one-sided Green's identities and using the
        // matching flux gives
        //   ⟨u⁺,u⁺⟩⁺ + ⟨u⁻,u⁻⟩⁻ = −Σ (D_ν u) φ (D_ν χ) h^d
        let geom = circle(24);
        let solver = InterfaceSolver::new(&geom);
        let phi = random_phi(&geom, 8);
        let (up, um) = solver.solve(&phi).unwrap();
        let energy = inner(&geom, &up, &up).unwrap() + inner(&geom, &um, &um).unwrap();
        assert!(energy > 0.0);
        let hd = geom.cell_volume();
        let mut pairing = 0.0;
        for (id, cut) in geom.cuts.iter().enumerate() {
            let dchi = geom.chi_step(cut) / geom.h;
            pairing -= up.cut_diff(&geom, id) * phi.values[id] * dchi * hd;
        }
        assert!(
            (energy - pairing).abs() < 1e-9 * energy,
            "{energy} vs {pairing}"
        );
        // the flux jump vanishes, so the single-layer pairing of the pair
        // against any density is zero
        let tp = trace_m(&geom, &up);
        assert!(jump_pairing(&geom, &up, &um, &tp).unwrap().abs() < 1e-8);
    }

    #[test]
    fn works_on_star_and_sphere() {
        let star = ImplicitDomain::new(
            LevelSet::Star {
                a: 0.7,
                b: 0.15,
                k: 5,
            },
            1.0,
        );
        let sphere = ImplicitDomain::new(LevelSet::Sphere { radius: 0.6 }, 1.0);
        for (domain, n) in [(&star, 32usize), (&sphere, 12)] {
            let geom = GridGeometry::build(domain, n, 0.1).unwrap();
            let solver = InterfaceSolver::new(&geom);
            let phi = BoundaryFn::constant(&geom, BoundaryIndex::Gamma1, 1.0);
            let (up, um) = solver.solve(&phi).unwrap();
            for &p in &geom.plus_points {
                assert!((up.interior[p] - 1.0).abs() < 1e-9);
            }
            for &p in &geom.minus_points {
                assert!(um.interior[p].abs() < 1e-9);
            }
        }
    }
}
