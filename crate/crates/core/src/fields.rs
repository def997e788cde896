//! Discrete calculus on extended grid functions: traces, divided
//! differences, the discrete Laplacian, side inner products, and the
//! Green's-identity residuals.
//!
//! Extension values are owned by cut intervals, never by grid points, so a
//! grid point shared by several cut intervals carries one value per
//! interval (the multi-valued bookkeeping for boundary data).

use crate::error::{FieldError, Result};
use crate::geometry::{CutInterval, GridGeometry, Side};

/// Which boundary point set a [`BoundaryFn`] is indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryIndex {
    /// One value per cut interval.
    Gamma1,
    /// One value per distinct assigned cut point.
    Gamma0,
}

impl std::fmt::Display for BoundaryIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryIndex::Gamma1 => write!(f, "gamma1"),
            BoundaryIndex::Gamma0 => write!(f, "gamma0"),
        }
    }
}

/// Real values on `Γ_h¹` or `Γ_h⁰`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFn {
    pub indexing: BoundaryIndex,
    pub values: Vec<f64>,
}

impl BoundaryFn {
    pub fn gamma1(values: Vec<f64>) -> Self {
        Self {
            indexing: BoundaryIndex::Gamma1,
            values,
        }
    }

    pub fn gamma0(values: Vec<f64>) -> Self {
        Self {
            indexing: BoundaryIndex::Gamma0,
            values,
        }
    }

    pub fn constant(geom: &GridGeometry, indexing: BoundaryIndex, c: f64) -> Self {
        let len = match indexing {
            BoundaryIndex::Gamma1 => geom.cuts.len(),
            BoundaryIndex::Gamma0 => geom.gamma0.len(),
        };
        Self {
            indexing,
            values: vec![c; len],
        }
    }

    /// Sample a function of space at the boundary points.
    pub fn sample(
        geom: &GridGeometry,
        indexing: BoundaryIndex,
        f: impl Fn(&[f64; 3]) -> f64,
    ) -> Self {
        match indexing {
            BoundaryIndex::Gamma0 => {
                let values = geom.gamma0.iter().map(|g| f(&g.position)).collect();
                Self::gamma0(values)
            }
            BoundaryIndex::Gamma1 => {
                let values = geom
                    .cuts
                    .iter()
                    .map(|c| {
                        let mut p = geom.position(c.lower);
                        p[c.axis] += c.s1 * geom.h;
                        f(&p)
                    })
                    .collect();
                Self::gamma1(values)
            }
        }
    }

    pub fn expect(&self, geom: &GridGeometry, indexing: BoundaryIndex) -> Result<()> {
        if self.indexing != indexing {
            return Err(FieldError::IndexingMismatch {
                expected: indexing.to_string(),
                got: self.indexing.to_string(),
            }
            .into());
        }
        let want = match indexing {
            BoundaryIndex::Gamma1 => geom.cuts.len(),
            BoundaryIndex::Gamma0 => geom.gamma0.len(),
        };
        assert_eq!(self.values.len(), want, "boundary function length");
        Ok(())
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A grid function on one side, extended by one value per incident cut
/// interval (the value at the interval's opposite-side endpoint).
#[derive(Debug, Clone)]
pub struct ExtendedField {
    pub side: Side,
    /// One slot per grid point; meaningful on the own-side points only.
    pub interior: Vec<f64>,
    /// One value per cut interval.
    pub ext: Vec<f64>,
}

impl ExtendedField {
    pub fn zeros(geom: &GridGeometry, side: Side) -> Self {
        Self {
            side,
            interior: vec![0.0; geom.total_points()],
            ext: vec![0.0; geom.cuts.len()],
        }
    }

    /// Sample a smooth function on the own-side points and at the extended
    /// endpoints.  Minus-side fields are forced to zero on `∂ℬ_h`.
    pub fn sample(geom: &GridGeometry, side: Side, f: impl Fn(&[f64; 3]) -> f64) -> Self {
        let mut field = Self::zeros(geom, side);
        let own = match side {
            Side::Plus => &geom.plus_points,
            Side::Minus => &geom.minus_points,
        };
        for &p in own {
            if side == Side::Minus && geom.box_boundary[p] {
                continue;
            }
            field.interior[p] = f(&geom.position(p));
        }
        for (id, cut) in geom.cuts.iter().enumerate() {
            let opposite = match side {
                Side::Plus => cut.minus_end,
                Side::Minus => cut.plus_end,
            };
            field.ext[id] = f(&geom.position(opposite));
        }
        field
    }

    fn own_end(&self, cut: &CutInterval) -> usize {
        match self.side {
            Side::Plus => cut.plus_end,
            Side::Minus => cut.minus_end,
        }
    }

    /// Values at the (lower, upper) endpoints of a cut interval, using the
    /// interval-owned extension for the opposite-side endpoint.
    #[inline]
    pub fn cut_values(&self, geom: &GridGeometry, cut_id: usize) -> (f64, f64) {
        let cut = &geom.cuts[cut_id];
        let own = self.own_end(cut);
        if own == cut.lower {
            (self.interior[cut.lower], self.ext[cut_id])
        } else {
            (self.ext[cut_id], self.interior[cut.upper])
        }
    }

    /// Divided difference over a cut interval.
    #[inline]
    pub fn cut_diff(&self, geom: &GridGeometry, cut_id: usize) -> f64 {
        let (lo, up) = self.cut_values(geom, cut_id);
        (up - lo) / geom.h
    }

    pub fn expect_side(&self, side: Side) -> Result<()> {
        if self.side != side {
            return Err(FieldError::SideMismatch {
                expected: side.to_string(),
                got: self.side.to_string(),
            }
            .into());
        }
        Ok(())
    }

    /// Mean of the interior values over the own-side points.
    pub fn own_mean(&self, geom: &GridGeometry) -> f64 {
        let own = match self.side {
            Side::Plus => &geom.plus_points,
            Side::Minus => &geom.minus_points,
        };
        own.iter().map(|&p| self.interior[p]).sum::<f64>() / own.len() as f64
    }
}

/// Trace operator `M`: linear interpolation to the `Γ_h¹` point of each
/// cut interval.
pub fn trace_m(geom: &GridGeometry, u: &ExtendedField) -> BoundaryFn {
    let values = (0..geom.cuts.len())
        .map(|id| {
            let (lo, up) = u.cut_values(geom, id);
            let s1 = geom.cuts[id].s1;
            (1.0 - s1) * lo + s1 * up
        })
        .collect();
    BoundaryFn::gamma1(values)
}

/// Build an extended field from interior values and a prescribed trace:
/// each extension value solves the trace relation for its interval, so
/// `trace_m(lift_from_trace(v, ψ)) = ψ` to round-off.
pub fn lift_from_trace(
    geom: &GridGeometry,
    interior: Vec<f64>,
    psi: &BoundaryFn,
    side: Side,
) -> Result<ExtendedField> {
    psi.expect(geom, BoundaryIndex::Gamma1)?;
    let mut ext = vec![0.0; geom.cuts.len()];
    for (id, cut) in geom.cuts.iter().enumerate() {
        let own = match side {
            Side::Plus => cut.plus_end,
            Side::Minus => cut.minus_end,
        };
        let s_own = geom.own_fraction(cut, side);
        // s_own ≥ δ by construction, so the division is bounded
        ext[id] = (psi.values[id] - (1.0 - s_own) * interior[own]) / s_own;
    }
    Ok(ExtendedField {
        side,
        interior,
        ext,
    })
}

/// Centered discrete Laplacian on the own-side points.  Returns one slot
/// per grid point; entries off the own side (and on `∂ℬ_h` for the minus
/// side) are zero.
pub fn laplacian_h(geom: &GridGeometry, u: &ExtendedField) -> Result<Vec<f64>> {
    let h2 = geom.h * geom.h;
    let own_plus = u.side == Side::Plus;
    let own = match u.side {
        Side::Plus => &geom.plus_points,
        Side::Minus => &geom.minus_points,
    };
    let mut out = vec![0.0; geom.total_points()];
    for &p in own {
        if !own_plus && geom.box_boundary[p] {
            continue;
        }
        let center = u.interior[p];
        let mut acc = 0.0;
        for axis in 0..geom.dim {
            for dir in [-1i64, 1] {
                let q = geom
                    .neighbor(p, axis, dir)
                    .ok_or(FieldError::MissingExtension(p))?;
                let v = if geom.is_plus(q) == own_plus {
                    u.interior[q]
                } else {
                    let cut = geom
                        .cut_on_arm(p, axis, dir)
                        .ok_or(FieldError::MissingExtension(p))?;
                    u.ext[cut]
                };
                acc += v - center;
            }
        }
        out[p] = acc / h2;
    }
    Ok(out)
}

/// Weighted Dirichlet inner product of two fields on the same side:
/// differences over own-side and cut intervals, weighted by `ξ^ν` on the
/// plus side and `1 − ξ^ν` on the minus side.
pub fn inner(geom: &GridGeometry, u: &ExtendedField, v: &ExtendedField) -> Result<f64> {
    u.expect_side(v.side)?;
    let own_plus = u.side == Side::Plus;
    let hd = geom.cell_volume();
    let h = geom.h;
    let shape = geom.shape();
    let mut acc = 0.0;
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
                let du = (u.interior[upper] - u.interior[lower]) / h;
                let dv = (v.interior[upper] - v.interior[lower]) / h;
                acc += du * dv * hd;
            } else {
                let cut = geom
                    .cut_between(lower, axis)
                    .ok_or(FieldError::MissingExtension(lower))?;
                let w = if own_plus {
                    geom.cuts[cut].xi
                } else {
                    1.0 - geom.cuts[cut].xi
                };
                acc += u.cut_diff(geom, cut) * v.cut_diff(geom, cut) * w * hd;
            }
        }
    }
    Ok(acc)
}

/// Boundary term of the Green's identities:
/// `Σ (D_ν u)(M_ν v)(D_ν χ) h^d` over cut intervals.
pub fn boundary_term(geom: &GridGeometry, u: &ExtendedField, v: &ExtendedField) -> f64 {
    let hd = geom.cell_volume();
    let h = geom.h;
    let mv = trace_m(geom, v);
    let mut acc = 0.0;
    for (id, cut) in geom.cuts.iter().enumerate() {
        let du = u.cut_diff(geom, id);
        let dchi = geom.chi_step(cut) / h;
        acc += du * mv.values[id] * dchi * hd;
    }
    acc
}

/// Relative residual of the discrete Green's identity on `u`'s side.
///
/// Zero in exact arithmetic; the relative scale guards against
/// division by a vanishing magnitude.
pub fn green_residual(geom: &GridGeometry, u: &ExtendedField, v: &ExtendedField) -> Result<f64> {
    u.expect_side(v.side)?;
    let own_plus = u.side == Side::Plus;
    let hd = geom.cell_volume();
    let lap = laplacian_h(geom, u)?;
    let own = match u.side {
        Side::Plus => &geom.plus_points,
        Side::Minus => &geom.minus_points,
    };
    let mut vol = 0.0;
    let mut vol_abs = 0.0;
    for &p in own {
        vol += lap[p] * v.interior[p] * hd;
        vol_abs += (lap[p] * v.interior[p]).abs() * hd;
    }
    let energy = inner(geom, u, v)?;
    let bterm = boundary_term(geom, u, v);
    // the boundary term enters with opposite signs on the two sides
    let residual = if own_plus {
        vol + energy + bterm
    } else {
        vol + energy - bterm
    };
    let scale = (vol_abs + energy.abs()).max(1.0);
    Ok(residual.abs() / scale)
}

/// The single-layer pairing written as a discrete boundary integral:
/// `−Σ [D_ν v] ζ (D_ν χ) h^d` with `[D_ν v] = D_ν v⁺ − D_ν v⁻`.
pub fn jump_pairing(
    geom: &GridGeometry,
    v_plus: &ExtendedField,
    v_minus: &ExtendedField,
    zeta: &BoundaryFn,
) -> Result<f64> {
    v_plus.expect_side(Side::Plus)?;
    v_minus.expect_side(Side::Minus)?;
    zeta.expect(geom, BoundaryIndex::Gamma1)?;
    let hd = geom.cell_volume();
    let h = geom.h;
    let mut acc = 0.0;
    for (id, cut) in geom.cuts.iter().enumerate() {
        let jump = v_plus.cut_diff(geom, id) - v_minus.cut_diff(geom, id);
        let dchi = geom.chi_step(cut) / h;
        acc -= jump * zeta.values[id] * dchi * hd;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ImplicitDomain, LevelSet};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn circle(n: usize) -> GridGeometry {
        let d = ImplicitDomain::new(LevelSet::Circle { radius: 0.7 }, 1.0);
        GridGeometry::build(&d, n, 0.1).unwrap()
    }

    fn random_field(geom: &GridGeometry, side: Side, seed: u64) -> ExtendedField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = ExtendedField::zeros(geom, side);
        let own = match side {
            Side::Plus => &geom.plus_points,
            Side::Minus => &geom.minus_points,
        };
        for &p in own {
            if side == Side::Minus && geom.box_boundary[p] {
                continue;
            }
            f.interior[p] = rng.gen_range(-1.0..1.0);
        }
        for e in f.ext.iter_mut() {
            *e = rng.gen_range(-1.0..1.0);
        }
        f
    }

    #[test]
    fn trace_interpolates_linearly() {
        let geom = circle(16);
        // pick a cut with the plus endpoint at the lower index
        let id = (0..geom.cuts.len())
            .find(|&i| geom.cuts[i].plus_end == geom.cuts[i].lower)
            .unwrap();
        let mut u = ExtendedField::zeros(&geom, Side::Plus);
        u.interior[geom.cuts[id].plus_end] = 1.0;
        u.ext[id] = 3.0;
        let tr = trace_m(&geom, &u);
        let s1 = geom.cuts[id].s1;
        assert!((tr.values[id] - ((1.0 - s1) + 3.0 * s1)).abs() < 1e-15);
    }

    #[test]
    fn trace_of_constant_is_constant() {
        let geom = circle(16);
        for side in [Side::Plus, Side::Minus] {
            let u = ExtendedField::sample(&geom, side, |_| 2.5);
            let tr = trace_m(&geom, &u);
            // minus-side interior is pinned to zero on ∂ℬ_h, which no cut touches
            for v in tr.values {
                assert!((v - 2.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn lift_then_trace_roundtrip() {
        let geom = circle(16);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for side in [Side::Plus, Side::Minus] {
            let interior: Vec<f64> = (0..geom.total_points())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let psi = BoundaryFn::gamma1(
                (0..geom.cuts.len())
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect(),
            );
            let u = lift_from_trace(&geom, interior, &psi, side).unwrap();
            let tr = trace_m(&geom, &u);
            for (a, b) in tr.values.iter().zip(&psi.values) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn lift_inverts_trace_on_existing_field() {
        let geom = circle(16);
        let u = random_field(&geom, Side::Plus, 3);
        let psi = trace_m(&geom, &u);
        let lifted = lift_from_trace(&geom, u.interior.clone(), &psi, Side::Plus).unwrap();
        for (a, b) in lifted.ext.iter().zip(&u.ext) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lift_example_values() {
        let geom = circle(16);
        // interior zero, psi = 1: extension = 1/s'
        let psi = BoundaryFn::constant(&geom, BoundaryIndex::Gamma1, 1.0);
        let u = lift_from_trace(&geom, vec![0.0; geom.total_points()], &psi, Side::Plus).unwrap();
        for (id, cut) in geom.cuts.iter().enumerate() {
            let s = geom.own_fraction(cut, Side::Plus);
            assert!((u.ext[id] - 1.0 / s).abs() < 1e-13);
        }
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let geom = circle(16);
        let u = ExtendedField::sample(&geom, Side::Plus, |_| 4.0);
        let lap = laplacian_h(&geom, &u).unwrap();
        for &p in &geom.plus_points {
            assert!(lap[p].abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_exact_on_harmonic_quadratic() {
        let geom = circle(16);
        let u = ExtendedField::sample(&geom, Side::Plus, |p| p[0] * p[0] - p[1] * p[1]);
        let lap = laplacian_h(&geom, &u).unwrap();
        for &p in &geom.plus_points {
            assert!(lap[p].abs() < 1e-10, "lap = {}", lap[p]);
        }
    }

    #[test]
    fn laplacian_stencil_weights() {
        let geom = circle(16);
        let h2 = geom.h * geom.h;
        // an interior point with no cut arms
        let p = *geom
            .plus_points
            .iter()
            .find(|&&p| {
                (0..2).all(|ax| {
                    [-1i64, 1].iter().all(|&d| {
                        geom.is_plus(geom.neighbor(p, ax, d).unwrap())
                    })
                })
            })
            .unwrap();
        let mut u = ExtendedField::zeros(&geom, Side::Plus);
        u.interior[p] = h2;
        let lap = laplacian_h(&geom, &u).unwrap();
        assert!((lap[p] - (-4.0)).abs() < 1e-12);
        let q = geom.neighbor(p, 0, 1).unwrap();
        assert!((lap[q] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inner_product_symmetric_bilinear() {
        let geom = circle(16);
        let u = random_field(&geom, Side::Plus, 1);
        let v = random_field(&geom, Side::Plus, 2);
        let uv = inner(&geom, &u, &v).unwrap();
        let vu = inner(&geom, &v, &u).unwrap();
        assert!((uv - vu).abs() <= 1e-12 * uv.abs().max(1.0));
        let zero = ExtendedField::zeros(&geom, Side::Plus);
        assert_eq!(inner(&geom, &zero, &zero).unwrap(), 0.0);
        let uu = inner(&geom, &u, &u).unwrap();
        assert!(uu > 0.0);
    }

    #[test]
    fn inner_rejects_side_mismatch() {
        let geom = circle(16);
        let u = random_field(&geom, Side::Plus, 1);
        let v = random_field(&geom, Side::Minus, 2);
        assert!(inner(&geom, &u, &v).is_err());
    }

    #[test]
    fn green_identity_holds_on_random_fields() {
        for n in [16, 40] {
            let geom = circle(n);
            for side in [Side::Plus, Side::Minus] {
                for seed in 0..5 {
                    let u = random_field(&geom, side, 100 + seed);
                    let v = random_field(&geom, side, 200 + seed);
                    let r = green_residual(&geom, &u, &v).unwrap();
                    assert!(r <= 1e-11, "side {side}, n {n}: residual {r}");
                }
            }
        }
    }

    #[test]
    fn green_identity_star_domain() {
        let d = ImplicitDomain::new(LevelSet::Star { a: 0.7, b: 0.15, k: 5 }, 1.0);
        let geom = GridGeometry::build(&d, 40, 0.1).unwrap();
        for side in [Side::Plus, Side::Minus] {
            let u = random_field(&geom, side, 11);
            let v = random_field(&geom, side, 12);
            assert!(green_residual(&geom, &u, &v).unwrap() <= 1e-11);
        }
    }

    #[test]
    fn green_residual_zero_for_constant_u() {
        let geom = circle(16);
        let u = ExtendedField::sample(&geom, Side::Plus, |_| 3.0);
        let v = random_field(&geom, Side::Plus, 5);
        assert!(green_residual(&geom, &u, &v).unwrap() <= 1e-12);
    }

    #[test]
    fn product_rule_on_cut_intervals() {
        // D(fχ) = (Df)ξ + (Mf)(Dχ) on every cut interval, any extension
        let geom = circle(24);
        let f = random_field(&geom, Side::Plus, 9);
        let mf = trace_m(&geom, &f);
        let h = geom.h;
        for (id, cut) in geom.cuts.iter().enumerate() {
            // single-valued fχ: f on Ω_h⁺, 0 on Ω_h⁻
            let fl = if geom.is_plus(cut.lower) {
                f.interior[cut.lower]
            } else {
                0.0
            };
            let fu = if geom.is_plus(cut.upper) {
                f.interior[cut.upper]
            } else {
                0.0
            };
            let lhs = (fu - fl) / h;
            let dchi = geom.chi_step(cut) / h;
            let rhs = f.cut_diff(&geom, id) * cut.xi + mf.values[id] * dchi;
            assert!((lhs - rhs).abs() < 1e-12 / h);
        }
    }

    #[test]
    fn jump_pairing_of_zero_is_zero() {
        let geom = circle(16);
        let vp = ExtendedField::zeros(&geom, Side::Plus);
        let vm = ExtendedField::zeros(&geom, Side::Minus);
        let z = BoundaryFn::constant(&geom, BoundaryIndex::Gamma1, 1.0);
        assert_eq!(jump_pairing(&geom, &vp, &vm, &z).unwrap(), 0.0);
    }
}
