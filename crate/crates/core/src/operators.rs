//! Boundary operators on the cut-point function spaces: the layer maps,
//! the trace operators `𝒜` and `ℬ` of the double-layer formulation, the
//! single-layer inner product and norm, the lift between `Γ_h⁰` and
//! `Γ_h¹` data, quadratic interpolation back to `Γ_h⁰`, the composite
//! boundary map, dense assembly, and spectra.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use crate::error::{ConfigError, OperatorError, Result};
use crate::fields::{inner, trace_m, BoundaryFn, BoundaryIndex, ExtendedField};
use crate::geometry::{GridGeometry, Side};
use crate::solvers::{
    quadratic_extrapolate, shortley_weller, InterfaceSolver, SingleLayerSolver,
};

/// Relative tolerance for the single-valuedness assertions at multiple
/// cut points.
const SHARP_REL_TOL: f64 = 1e-9;

/// Default cap on boundary DOF count for dense assembly.
pub const DENSE_CAP: usize = 2000;

/// Which boundary operator a dense assembly or application refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorTag {
    /// `φ ↦ Mu⁺` on `Γ_h¹`.
    CalA,
    /// `φ ↦ Mu⁻` on `Γ_h¹`.
    CalB,
    /// The composite map on `Γ_h⁰`.
    Ah,
}

/// Spectral data of the trace operators in the single-layer geometry.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues of `ℬ`, ascending.
    pub b_eigs: Vec<f64>,
    /// Eigenvalues of `𝒜 = I + ℬ`, ascending.
    pub a_eigs: Vec<f64>,
    /// Contraction estimate `r̂ = −min eig(ℬ)`.
    pub r_hat: f64,
}

pub struct Operators<'a> {
    geom: &'a GridGeometry,
    cg_tol: f64,
    pub dense_cap: usize,
    interface: InterfaceSolver<'a>,
    plus: SingleLayerSolver<'a>,
    minus: SingleLayerSolver<'a>,
}

impl<'a> Operators<'a> {
    pub fn new(geom: &'a GridGeometry, cg_tol: f64) -> Self {
        Self {
            geom,
            cg_tol,
            dense_cap: DENSE_CAP,
            interface: InterfaceSolver::new(geom),
            plus: SingleLayerSolver::new(geom, Side::Plus, cg_tol),
            minus: SingleLayerSolver::new(geom, Side::Minus, cg_tol),
        }
    }

    pub fn geometry(&self) -> &GridGeometry {
        self.geom
    }

    pub fn cg_tol(&self) -> f64 {
        self.cg_tol
    }

    /// The double-layer pair with trace jump `φ`.
    pub fn double_layer(&self, phi: &BoundaryFn) -> Result<(ExtendedField, ExtendedField)> {
        self.interface.solve(phi)
    }

    /// `𝒜φ = Mu⁺` with `(u⁺, u⁻)` the double layer of `φ`.
    pub fn apply_cal_a(&self, phi: &BoundaryFn) -> Result<BoundaryFn> {
        let (up, _) = self.interface.solve(phi)?;
        Ok(trace_m(self.geom, &up))
    }

    /// `ℬφ = Mu⁻`.
    pub fn apply_cal_b(&self, phi: &BoundaryFn) -> Result<BoundaryFn> {
        let (_, um) = self.interface.solve(phi)?;
        Ok(trace_m(self.geom, &um))
    }

    /// The single-layer pair: discretely harmonic on each side with common
    /// trace `ψ`.
    pub fn single_layer(&self, psi: &BoundaryFn) -> Result<(ExtendedField, ExtendedField)> {
        let (sp, _) = self.plus.solve(psi)?;
        let (sm, _) = self.minus.solve(psi)?;
        Ok((sp, sm))
    }

    /// Single-layer inner product of two already-computed pairs.
    pub fn sl_inner_pairs(
        &self,
        a: &(ExtendedField, ExtendedField),
        b: &(ExtendedField, ExtendedField),
    ) -> Result<f64> {
        Ok(inner(self.geom, &a.0, &b.0)? + inner(self.geom, &a.1, &b.1)?)
    }

    /// Single-layer inner product of two `Γ_h¹` functions.
    pub fn sl_inner(&self, psi: &BoundaryFn, zeta: &BoundaryFn) -> Result<f64> {
        let a = self.single_layer(psi)?;
        let b = self.single_layer(zeta)?;
        self.sl_inner_pairs(&a, &b)
    }

    pub fn sl_norm(&self, psi: &BoundaryFn) -> Result<f64> {
        let a = self.single_layer(psi)?;
        Ok(self.sl_inner_pairs(&a, &a)?.max(0.0).sqrt())
    }

    /// Copy each `Γ_h⁰` value to every cut interval sharing the point.
    pub fn tilde_lift(&self, phi: &BoundaryFn) -> Result<BoundaryFn> {
        phi.expect(self.geom, BoundaryIndex::Gamma0)?;
        let values = self
            .geom
            .cuts
            .iter()
            .map(|c| phi.values[c.gamma0])
            .collect();
        Ok(BoundaryFn::gamma1(values))
    }

    /// Invert the lift: requires the input constant across each
    /// multiplicity group.
    pub fn restrict_sharp(&self, psi: &BoundaryFn) -> Result<BoundaryFn> {
        psi.expect(self.geom, BoundaryIndex::Gamma1)?;
        let mut values = Vec::with_capacity(self.geom.gamma0.len());
        for (gid, point) in self.geom.gamma0.iter().enumerate() {
            let group: Vec<f64> = point.cuts.iter().map(|&c| psi.values[c]).collect();
            check_sharp(gid, &group)?;
            values.push(group[0]);
        }
        Ok(BoundaryFn::gamma0(values))
    }

    /// Quadratic interpolation of an interior-side extended field to the
    /// cut points: along each owning interval's axis, the quadratic
    /// through the three consecutive nodes straddling the crossing.
    pub fn interp_q(&self, u: &ExtendedField) -> Result<BoundaryFn> {
        u.expect_side(Side::Plus)?;
        let geom = self.geom;
        let mut values = Vec::with_capacity(geom.gamma0.len());
        for (gid, point) in geom.gamma0.iter().enumerate() {
            if point.grid_point.is_some() {
                // the cut point is a grid node in Ω_h⁻; its value is the
                // shared extension value of the incident intervals
                let group: Vec<f64> = point.cuts.iter().map(|&c| u.ext[c]).collect();
                check_sharp(gid, &group)?;
                values.push(group[0]);
                continue;
            }
            let id = point.cuts[0];
            let cut = &geom.cuts[id];
            let p = cut.plus_end;
            let dir: i64 = if cut.minus_end == cut.upper { 1 } else { -1 };
            let back = geom
                .neighbor(p, cut.axis, -dir)
                .expect("stencil inside the box");
            let back_value = if geom.is_plus(back) {
                u.interior[back]
            } else {
                let other = geom
                    .cut_on_arm(p, cut.axis, -dir)
                    .expect("opposite arm is cut");
                u.ext[other]
            };
            let s = geom.s_from_plus(cut);
            values.push(crate::solvers::quadratic_eval(
                [(-1.0, back_value), (0.0, u.interior[p]), (1.0, u.ext[id])],
                s,
            ));
        }
        Ok(BoundaryFn::gamma0(values))
    }

    /// The composite boundary map on `Γ_h⁰`: lift, double-layer solve,
    /// interpolate the interior-side field back to the cut points.
    pub fn apply_ah(&self, phi: &BoundaryFn) -> Result<BoundaryFn> {
        let lifted = self.tilde_lift(phi)?;
        let (up, _) = self.interface.solve(&lifted)?;
        self.interp_q(&up)
    }

    /// `‖φ‖₁`: single-layer norm of the lifted density.
    pub fn norm1(&self, phi: &BoundaryFn) -> Result<f64> {
        let lifted = self.tilde_lift(phi)?;
        self.sl_norm(&lifted)
    }

    /// `‖f‖₂`: single-layer norm of the trace of the extended interior
    /// finite-difference solution with data `f`.
    pub fn norm2(&self, f: &BoundaryFn) -> Result<f64> {
        let (w, _) = shortley_weller(self.geom, f, self.cg_tol)?;
        let extended = quadratic_extrapolate(self.geom, &w, f)?;
        self.sl_norm(&trace_m(self.geom, &extended))
    }

    fn dof(&self, tag: OperatorTag) -> usize {
        match tag {
            OperatorTag::CalA | OperatorTag::CalB => self.geom.cuts.len(),
            OperatorTag::Ah => self.geom.gamma0.len(),
        }
    }

    fn check_cap(&self, count: usize) -> Result<()> {
        if count > self.dense_cap {
            return Err(ConfigError::DenseCapExceeded {
                count,
                cap: self.dense_cap,
            }
            .into());
        }
        Ok(())
    }

    /// Column-by-column dense assembly from the matrix-free application.
    pub fn assemble_dense(&self, tag: OperatorTag) -> Result<DMatrix<f64>> {
        let n = self.dof(tag);
        self.check_cap(n)?;
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = match tag {
                OperatorTag::CalA => self.apply_cal_a(&BoundaryFn::gamma1(e))?,
                OperatorTag::CalB => self.apply_cal_b(&BoundaryFn::gamma1(e))?,
                OperatorTag::Ah => self.apply_ah(&BoundaryFn::gamma0(e))?,
            };
            for i in 0..n {
                m[(i, j)] = col.values[i];
            }
        }
        Ok(m)
    }

    /// Gram matrix of the single-layer inner product on the `Γ_h¹` basis.
    pub fn assemble_gram(&self) -> Result<DMatrix<f64>> {
        let n = self.geom.cuts.len();
        self.check_cap(n)?;
        let mut pairs = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            pairs.push(self.single_layer(&BoundaryFn::gamma1(e))?);
        }
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.sl_inner_pairs(&pairs[i], &pairs[j])?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }

    /// Eigenvalues of `ℬ` (and `𝒜 = I + ℬ`) via the Gram-symmetric
    /// eigenproblem: with `G = LLᵀ`, the eigenvalues of `ℬ` are those of
    /// the symmetric matrix `L⁻¹ (G·matB) L⁻ᵀ`.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let matb = self.assemble_dense(OperatorTag::CalB)?;
        let g = self.assemble_gram()?;
        let chol = Cholesky::new(g.clone()).ok_or(OperatorError::GramNotSpd)?;
        let l = chol.l();
        let s = &g * &matb;
        let t1 = l
            .solve_lower_triangular(&s)
            .ok_or(OperatorError::GramNotSpd)?;
        let t2 = l
            .solve_lower_triangular(&t1.transpose())
            .ok_or(OperatorError::GramNotSpd)?;
        let sym = 0.5 * (&t2 + t2.transpose());
        let eig = SymmetricEigen::new(sym);
        let mut b_eigs: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        b_eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let a_eigs: Vec<f64> = b_eigs.iter().map(|l| 1.0 + l).collect();
        let r_hat = -b_eigs[0];
        Ok(Spectrum {
            b_eigs,
            a_eigs,
            r_hat,
        })
    }
}

fn check_sharp(group: usize, values: &[f64]) -> Result<()> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    let scale = lo.abs().max(hi.abs()).max(1.0);
    if spread > SHARP_REL_TOL * scale {
        return Err(OperatorError::NotSharp { group, spread }.into());
    }
    Ok(())
}

/// Row-major CSV rendering of a dense matrix, 17 significant digits.
pub fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
