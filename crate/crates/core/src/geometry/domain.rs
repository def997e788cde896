use serde::{Deserialize, Serialize};

/// Implicit description of the boundary `Γ` as a level-set zero.
///
/// The convention throughout: negative level-set values are strictly inside
/// the domain `Ω⁺`, positive values strictly outside, zero on `Γ`.  Grid
/// points with an exact zero are assigned to the exterior side.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LevelSet {
    /// `x² + y² − r²` in 2D.
    Circle { radius: f64 },
    /// `x²·b2 + y²·a2 − a2·b2`, i.e. an ellipse with squared semi-axes
    /// `a2`, `b2` given directly so degenerate grid alignments can be
    /// constructed exactly in floating point.
    Ellipse { a2: f64, b2: f64 },
    /// `√(x²+y²) − (a + b·cos(kθ))`: a k-lobed star, non-convex for b > 0.
    Star { a: f64, b: f64, k: u32 },
    /// `x² + y² + z² − r²` in 3D.
    Sphere { radius: f64 },
    /// `x²·b2·c2 + y²·a2·c2 + z²·a2·b2 − a2·b2·c2` in 3D.
    Ellipsoid { a2: f64, b2: f64, c2: f64 },
}

impl LevelSet {
    pub fn dim(&self) -> usize {
        match self {
            LevelSet::Circle { .. } | LevelSet::Ellipse { .. } | LevelSet::Star { .. } => 2,
            LevelSet::Sphere { .. } | LevelSet::Ellipsoid { .. } => 3,
        }
    }

    pub fn eval(&self, p: &[f64; 3]) -> f64 {
        let [x, y, z] = *p;
        match *self {
            LevelSet::Circle { radius } => x * x + y * y - radius * radius,
            LevelSet::Ellipse { a2, b2 } => x * x * b2 + y * y * a2 - a2 * b2,
            LevelSet::Star { a, b, k } => {
                let r = (x * x + y * y).sqrt();
                let theta = y.atan2(x);
                r - (a + b * (k as f64 * theta).cos())
            }
            LevelSet::Sphere { radius } => x * x + y * y + z * z - radius * radius,
            LevelSet::Ellipsoid { a2, b2, c2 } => {
                x * x * b2 * c2 + y * y * a2 * c2 + z * z * a2 * b2 - a2 * b2 * c2
            }
        }
    }
}

/// Exact harmonic functions with singularities outside `Ω⁺`, used as
/// manufactured solutions.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HarmonicSolution {
    /// `Re((z − z0)^m)` in 2D.
    RePow { m: u32, z0: [f64; 2] },
    /// `Im((z − z0)^m)` in 2D.
    ImPow { m: u32, z0: [f64; 2] },
    /// `log|z − z0|` in 2D; `z0` must lie outside `Ω⁺`.
    LogAbs { z0: [f64; 2] },
    /// `1/|x − x0|` in 3D; `x0` must lie outside `Ω⁺`.
    InvDist { x0: [f64; 3] },
    /// `x² − y²`, harmonic in 2D and 3D.
    QuadXY,
    /// `sin(x)·cosh(y)`.
    SinCosh,
    /// `c0 + c1·x + c2·y + c3·z`.
    Linear { c: [f64; 4] },
}

impl HarmonicSolution {
    pub fn eval(&self, p: &[f64; 3]) -> f64 {
        let [x, y, z] = *p;
        match *self {
            HarmonicSolution::RePow { m, z0 } => complex_pow(x - z0[0], y - z0[1], m).0,
            HarmonicSolution::ImPow { m, z0 } => complex_pow(x - z0[0], y - z0[1], m).1,
            HarmonicSolution::LogAbs { z0 } => {
                let (dx, dy) = (x - z0[0], y - z0[1]);
                0.5 * (dx * dx + dy * dy).ln()
            }
            HarmonicSolution::InvDist { x0 } => {
                let (dx, dy, dz) = (x - x0[0], y - x0[1], z - x0[2]);
                1.0 / (dx * dx + dy * dy + dz * dz).sqrt()
            }
            HarmonicSolution::QuadXY => x * x - y * y,
            HarmonicSolution::SinCosh => x.sin() * y.cosh(),
            HarmonicSolution::Linear { c } => c[0] + c[1] * x + c[2] * y + c[3] * z,
        }
    }

    /// Singular point of the solution, if it has one.
    pub fn singularity(&self) -> Option<[f64; 3]> {
        match *self {
            HarmonicSolution::RePow { z0, .. } | HarmonicSolution::ImPow { z0, .. } => {
                // polynomial for m ≥ 0, no singularity
                let _ = z0;
                None
            }
            HarmonicSolution::LogAbs { z0 } => Some([z0[0], z0[1], 0.0]),
            HarmonicSolution::InvDist { x0 } => Some(x0),
            _ => None,
        }
    }
}

fn complex_pow(x: f64, y: f64, m: u32) -> (f64, f64) {
    let (mut re, mut im) = (1.0, 0.0);
    for _ in 0..m {
        let r = re * x - im * y;
        let i = re * y + im * x;
        re = r;
        im = i;
    }
    (re, im)
}

/// A smooth domain embedded in the box `[−L, L]^d`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImplicitDomain {
    pub level_set: LevelSet,
    /// Half-width `L` of the bounding box.
    pub half_width: f64,
}

impl ImplicitDomain {
    pub fn new(level_set: LevelSet, half_width: f64) -> Self {
        Self {
            level_set,
            half_width,
        }
    }

    pub fn dim(&self) -> usize {
        self.level_set.dim()
    }

    pub fn eval(&self, p: &[f64; 3]) -> f64 {
        self.level_set.eval(p)
    }

    /// True if `p` is strictly inside `Ω⁺` (level set negative).
    pub fn inside(&self, p: &[f64; 3]) -> bool {
        self.eval(p) < 0.0
    }
}
