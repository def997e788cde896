//! Geometry construction: classification, cut-interval root finding,
//! `Γ_h⁰` / `Γ_h¹` assignment, and structural validation.

use std::collections::HashMap;

use super::{CutInterval, Gamma0Point, GridGeometry, ImplicitDomain};
use crate::error::{ConfigError, GeometryError, Result};

/// Crossings within this fraction of an endpoint are treated as exact
/// grid-point crossings (multiple cut points).
const SNAP_FRACTION: f64 = 1e-10;

const BISECTION_STEPS: usize = 60;

pub fn build(domain: &ImplicitDomain, n: usize, delta: f64) -> Result<GridGeometry> {
    if n < 8 {
        return Err(ConfigError::Invalid(format!("resolution n = {n} below minimum 8")).into());
    }
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(ConfigError::Invalid(format!("delta = {delta} outside (0, 1/2]")).into());
    }
    let dim = domain.dim();
    let half_width = domain.half_width;
    let h = 2.0 * half_width / n as f64;
    let mut shape = [1usize; 3];
    for s in shape.iter_mut().take(dim) {
        *s = n + 1;
    }
    let total = shape[0] * shape[1] * shape[2];

    // classification χ and ∂ℬ_h
    let mut chi = vec![false; total];
    let mut box_boundary = vec![false; total];
    let mut plus_points = Vec::new();
    let mut minus_points = Vec::new();
    for idx in 0..total {
        let c = coords(idx, &shape);
        let p = position(&c, dim, half_width, h);
        let phi = domain.eval(&p);
        chi[idx] = phi < 0.0;
        let on_box = (0..dim).any(|ax| c[ax] == 0 || c[ax] == n);
        box_boundary[idx] = on_box;
        if chi[idx] {
            plus_points.push(idx);
        } else {
            minus_points.push(idx);
        }
        if on_box && chi[idx] {
            return Err(GeometryError::BoundaryTouchesBox(format!(
                "box boundary point at {:?} classified interior",
                &p[..dim]
            ))
            .into());
        }
    }
    if plus_points.is_empty() {
        return Err(GeometryError::TooCoarse("no grid points inside the domain".into()).into());
    }

    // cut intervals, lexicographic by (axis, lower index)
    let mut cuts: Vec<CutInterval> = Vec::new();
    let mut cut_lookup: HashMap<(usize, usize), usize> = HashMap::new();
    for axis in 0..dim {
        for lower in 0..total {
            let c = coords(lower, &shape);
            if c[axis] + 1 >= shape[axis] {
                continue;
            }
            let mut cu = c;
            cu[axis] += 1;
            let upper = index(&cu, &shape);
            check_single_crossing(domain, &c, axis, dim, half_width, h, chi[lower], chi[upper])?;
            if chi[lower] == chi[upper] {
                continue;
            }
            if box_boundary[lower] || box_boundary[upper] {
                return Err(GeometryError::BoundaryTouchesBox(format!(
                    "cut interval touches the box boundary at axis {axis}, point {:?}",
                    &position(&c, dim, half_width, h)[..dim]
                ))
                .into());
            }
            let s_cross = find_crossing(domain, &c, axis, dim, half_width, h, chi[lower])?;
            let (plus_end, minus_end) = if chi[lower] {
                (lower, upper)
            } else {
                (upper, lower)
            };
            let s1 = s_cross.clamp(delta, 1.0 - delta);
            let xi = s1 * (chi[lower] as u8 as f64) + (1.0 - s1) * (chi[upper] as u8 as f64);
            let id = cuts.len();
            cuts.push(CutInterval {
                axis,
                lower,
                upper,
                plus_end,
                minus_end,
                s_cross,
                s1,
                xi,
                gamma0: usize::MAX,
            });
            cut_lookup.insert((lower, axis), id);
        }
    }

    // Γ_h⁰ assignment with grid-point merging
    let mut gamma0: Vec<Gamma0Point> = Vec::new();
    let mut by_grid_point: HashMap<usize, usize> = HashMap::new();
    for id in 0..cuts.len() {
        let cut = &cuts[id];
        let snapped = if cut.s_cross <= SNAP_FRACTION {
            Some(cut.lower)
        } else if cut.s_cross >= 1.0 - SNAP_FRACTION {
            Some(cut.upper)
        } else {
            None
        };
        let gid = match snapped {
            Some(gp) => {
                if chi[gp] {
                    return Err(GeometryError::TooCoarse(format!(
                        "crossing coincides with interior grid point {gp}"
                    ))
                    .into());
                }
                *by_grid_point.entry(gp).or_insert_with(|| {
                    let c = coords(gp, &shape);
                    gamma0.push(Gamma0Point {
                        position: position(&c, dim, half_width, h),
                        cuts: Vec::new(),
                        grid_point: Some(gp),
                    });
                    gamma0.len() - 1
                })
            }
            None => {
                let c = coords(cut.lower, &shape);
                let mut pos = position(&c, dim, half_width, h);
                pos[cut.axis] += cut.s_cross * h;
                gamma0.push(Gamma0Point {
                    position: pos,
                    cuts: Vec::new(),
                    grid_point: None,
                });
                gamma0.len() - 1
            }
        };
        gamma0[gid].cuts.push(id);
        cuts[id].gamma0 = gid;
    }

    // connectivity through uncut intervals (one component per side)
    check_connectivity(&shape, dim, &chi)?;

    // every interior point keeps at least one uncut arm per stencil
    for &p in &plus_points {
        let c = coords(p, &shape);
        let mut uncut = 0;
        for axis in 0..dim {
            for dir in [-1i64, 1] {
                let v = c[axis] as i64 + dir;
                if v < 0 || v > n as i64 {
                    continue;
                }
                let mut c2 = c;
                c2[axis] = v as usize;
                if chi[index(&c2, &shape)] {
                    uncut += 1;
                }
            }
        }
        if uncut == 0 {
            return Err(GeometryError::AllArmsCut { point: p }.into());
        }
    }

    Ok(GridGeometry::from_parts(
        dim,
        n,
        h,
        half_width,
        delta,
        shape,
        chi,
        box_boundary,
        cuts,
        cut_lookup,
        gamma0,
        plus_points,
        minus_points,
    ))
}

fn coords(idx: usize, shape: &[usize; 3]) -> [usize; 3] {
    let mut c = [0usize; 3];
    let mut rem = idx;
    for ax in 0..3 {
        c[ax] = rem % shape[ax];
        rem /= shape[ax];
    }
    c
}

fn index(c: &[usize; 3], shape: &[usize; 3]) -> usize {
    c[0] + shape[0] * (c[1] + shape[1] * c[2])
}

fn position(c: &[usize; 3], dim: usize, half_width: f64, h: f64) -> [f64; 3] {
    let mut p = [0.0; 3];
    for ax in 0..dim {
        p[ax] = -half_width + c[ax] as f64 * h;
    }
    p
}

fn eval_at(
    domain: &ImplicitDomain,
    lower: &[usize; 3],
    axis: usize,
    s: f64,
    dim: usize,
    half_width: f64,
    h: f64,
) -> f64 {
    let mut p = position(lower, dim, half_width, h);
    p[axis] += s * h;
    domain.eval(&p)
}

/// Reject intervals the level set crosses more than once, by sign checks
/// at the quarter points.
#[allow(clippy::too_many_arguments)]
fn check_single_crossing(
    domain: &ImplicitDomain,
    lower: &[usize; 3],
    axis: usize,
    dim: usize,
    half_width: f64,
    h: f64,
    plus_lower: bool,
    plus_upper: bool,
) -> Result<()> {
    let mut signs = [plus_lower, false, false, false, plus_upper];
    for (k, s) in [0.25, 0.5, 0.75].iter().enumerate() {
        signs[k + 1] = eval_at(domain, lower, axis, *s, dim, half_width, h) < 0.0;
    }
    let transitions = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if transitions >= 2 {
        let p = position(lower, dim, half_width, h);
        return Err(GeometryError::MultipleCrossings {
            interval: format!("axis {axis} at {:?}", &p[..dim]),
        }
        .into());
    }
    Ok(())
}

/// Bracketed bisection for the crossing fraction along a cut interval.
#[allow(clippy::too_many_arguments)]
fn find_crossing(
    domain: &ImplicitDomain,
    lower: &[usize; 3],
    axis: usize,
    dim: usize,
    half_width: f64,
    h: f64,
    plus_lower: bool,
) -> Result<f64> {
    let f0 = eval_at(domain, lower, axis, 0.0, dim, half_width, h);
    let f1 = eval_at(domain, lower, axis, 1.0, dim, half_width, h);
    if f0 == 0.0 {
        return Ok(0.0);
    }
    if f1 == 0.0 {
        return Ok(1.0);
    }
    if (f0 < 0.0) == (f1 < 0.0) {
        let p = position(lower, dim, half_width, h);
        return Err(GeometryError::RootFinding {
            interval: format!("axis {axis} at {:?}", &p[..dim]),
            detail: "endpoint values do not bracket a sign change".into(),
        }
        .into());
    }
    // keep a in Ω⁺ (negative), b in Ω⁻
    let (mut a, mut b) = if plus_lower { (0.0, 1.0) } else { (1.0, 0.0) };
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (a + b);
        let fm = eval_at(domain, lower, axis, mid, dim, half_width, h);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if (a - b).abs() <= 1e-13 {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

fn check_connectivity(shape: &[usize; 3], dim: usize, chi: &[bool]) -> Result<()> {
    let total = shape[0] * shape[1] * shape[2];
    let mut uf = UnionFind::new(total);
    for axis in 0..dim {
        for lower in 0..total {
            let c = coords(lower, shape);
            if c[axis] + 1 >= shape[axis] {
                continue;
            }
            let mut cu = c;
            cu[axis] += 1;
            let upper = index(&cu, shape);
            if chi[lower] == chi[upper] {
                uf.union(lower, upper);
            }
        }
    }
    for (side, plus) in [("plus", true), ("minus", false)] {
        let mut roots = std::collections::HashSet::new();
        for idx in 0..total {
            if chi[idx] == plus {
                roots.insert(uf.find(idx));
            }
        }
        if roots.len() != 1 {
            return Err(GeometryError::Disconnected {
                side: side.into(),
                components: roots.len(),
            }
            .into());
        }
    }
    Ok(())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}
