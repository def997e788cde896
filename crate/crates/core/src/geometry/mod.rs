//! Embedded-boundary grid data: classification of grid points, cut
//! intervals with crossing fractions, the boundary point sets `Γ_h⁰` and
//! `Γ_h¹`, and the interval weights `ξ^ν`.

mod build;
mod domain;

pub use domain::{HarmonicSolution, ImplicitDomain, LevelSet};

use std::collections::HashMap;

/// Which side of the boundary a field or solve lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Plus => write!(f, "plus"),
            Side::Minus => write!(f, "minus"),
        }
    }
}

/// A grid interval with one endpoint in `Ω_h⁺` and one in `Ω_h⁻`.
#[derive(Debug, Clone)]
pub struct CutInterval {
    pub axis: usize,
    /// Lower-index endpoint.
    pub lower: usize,
    pub upper: usize,
    pub plus_end: usize,
    pub minus_end: usize,
    /// Crossing fraction from the lower endpoint, in `[0, 1]`; endpoints
    /// are possible only on the `Ω_h⁻` side (exact grid-point crossings).
    pub s_cross: f64,
    /// `Γ_h¹` fraction from the lower endpoint, clamped to `[δ, 1−δ]`.
    pub s1: f64,
    /// Interval weight `ξ^ν = s₁·χ(lower) + (1−s₁)·χ(upper)`.
    pub xi: f64,
    /// Index of the assigned `Γ_h⁰` point.
    pub gamma0: usize,
}

/// A distinct assigned boundary point (one per cut interval, merged when
/// the crossing lands exactly on a grid point shared by several intervals).
#[derive(Debug, Clone)]
pub struct Gamma0Point {
    pub position: [f64; 3],
    /// Cut intervals assigned to this point (len > 1 for multiple cut points).
    pub cuts: Vec<usize>,
    /// Set when the point coincides with a grid point (necessarily in `Ω_h⁻`).
    pub grid_point: Option<usize>,
}

/// The full embedded-boundary grid data for one resolution.
///
/// Immutable after construction; safely shareable read-only.
#[derive(Debug, Clone)]
pub struct GridGeometry {
    pub dim: usize,
    /// Intervals per axis; `n+1` grid points per axis.
    pub n: usize,
    pub h: f64,
    pub half_width: f64,
    pub delta: f64,
    shape: [usize; 3],
    total: usize,
    /// `χ = true` on `Ω_h⁺` (level set negative).
    pub chi: Vec<bool>,
    /// Marks points of `∂ℬ_h`.
    pub box_boundary: Vec<bool>,
    pub cuts: Vec<CutInterval>,
    cut_lookup: HashMap<(usize, usize), usize>,
    pub gamma0: Vec<Gamma0Point>,
    pub plus_points: Vec<usize>,
    pub minus_points: Vec<usize>,
}

impl GridGeometry {
    /// Classify the grid, locate cut intervals, and assign `Γ_h⁰`, `Γ_h¹`.
    pub fn build(domain: &ImplicitDomain, n: usize, delta: f64) -> crate::error::Result<Self> {
        build::build(domain, n, delta)
    }

    pub fn total_points(&self) -> usize {
        self.total
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    #[inline]
    pub fn point_coords(&self, idx: usize) -> [usize; 3] {
        let mut c = [0usize; 3];
        let mut rem = idx;
        for ax in 0..3 {
            c[ax] = rem % self.shape[ax];
            rem /= self.shape[ax];
        }
        c
    }

    #[inline]
    pub fn point_index(&self, c: [usize; 3]) -> usize {
        c[0] + self.shape[0] * (c[1] + self.shape[1] * c[2])
    }

    /// Physical position of a grid point.
    #[inline]
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let c = self.point_coords(idx);
        let mut p = [0.0; 3];
        for ax in 0..self.dim {
            p[ax] = -self.half_width + c[ax] as f64 * self.h;
        }
        p
    }

    /// Neighbor along `axis` in direction `dir` (±1), or None past the box.
    #[inline]
    pub fn neighbor(&self, idx: usize, axis: usize, dir: i64) -> Option<usize> {
        let c = self.point_coords(idx);
        let v = c[axis] as i64 + dir;
        if v < 0 || v >= self.shape[axis] as i64 {
            return None;
        }
        let mut c2 = c;
        c2[axis] = v as usize;
        Some(self.point_index(c2))
    }

    #[inline]
    pub fn is_plus(&self, idx: usize) -> bool {
        self.chi[idx]
    }

    /// Cut interval with the given lower endpoint along `axis`, if any.
    #[inline]
    pub fn cut_between(&self, lower: usize, axis: usize) -> Option<usize> {
        self.cut_lookup.get(&(lower, axis)).copied()
    }

    /// Cut interval on the arm from `p` along `axis` in direction `dir`.
    #[inline]
    pub fn cut_on_arm(&self, p: usize, axis: usize, dir: i64) -> Option<usize> {
        if dir > 0 {
            self.cut_between(p, axis)
        } else {
            let q = self.neighbor(p, axis, -1)?;
            self.cut_between(q, axis)
        }
    }

    /// `Γ_h¹` distance fraction measured from the endpoint on `side`.
    #[inline]
    pub fn own_fraction(&self, cut: &CutInterval, side: Side) -> f64 {
        let own = match side {
            Side::Plus => cut.plus_end,
            Side::Minus => cut.minus_end,
        };
        if own == cut.lower {
            cut.s1
        } else {
            1.0 - cut.s1
        }
    }

    /// Exact crossing fraction measured from the `Ω_h⁺` endpoint (the
    /// Shortley-Weller stencil distance; unclamped).
    #[inline]
    pub fn s_from_plus(&self, cut: &CutInterval) -> f64 {
        if cut.plus_end == cut.lower {
            cut.s_cross
        } else {
            1.0 - cut.s_cross
        }
    }

    /// `D_ν χ · h` on a cut interval: `−1` if the upper endpoint is in
    /// `Ω_h⁻`, `+1` otherwise.
    #[inline]
    pub fn chi_step(&self, cut: &CutInterval) -> f64 {
        if cut.plus_end == cut.lower {
            -1.0
        } else {
            1.0
        }
    }

    /// Cell volume `h^d`.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Number of `Γ_h⁰` points that are shared by more than one interval.
    pub fn multiple_cut_points(&self) -> usize {
        self.gamma0.iter().filter(|g| g.cuts.len() > 1).count()
    }

    pub(crate) fn from_parts(
        dim: usize,
        n: usize,
        h: f64,
        half_width: f64,
        delta: f64,
        shape: [usize; 3],
        chi: Vec<bool>,
        box_boundary: Vec<bool>,
        cuts: Vec<CutInterval>,
        cut_lookup: HashMap<(usize, usize), usize>,
        gamma0: Vec<Gamma0Point>,
        plus_points: Vec<usize>,
        minus_points: Vec<usize>,
    ) -> Self {
        let total = shape[0] * shape[1] * shape[2];
        Self {
            dim,
            n,
            h,
            half_width,
            delta,
            shape,
            total,
            chi,
            box_boundary,
            cuts,
            cut_lookup,
            gamma0,
            plus_points,
            minus_points,
        }
    }
}
