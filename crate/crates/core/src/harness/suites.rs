//! Property suites: executable versions of the structural claims of the
//! discrete potential theory, run on seeded random data over at least two
//! geometries and two resolutions each.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{ConfigError, Result};
use crate::fields::{
    green_residual, inner, lift_from_trace, BoundaryFn, BoundaryIndex, ExtendedField,
};
use crate::geometry::{GridGeometry, ImplicitDomain, LevelSet, Side};
use crate::operators::{Operators, OperatorTag};
use crate::solvers::{quadratic_extrapolate, shortley_weller, SingleLayerSolver};

use super::report::Report;
use super::StudyConfig;

pub const SUITE_NAMES: &[&str] = &[
    "green",
    "minimization",
    "symmetry",
    "extension",
    "poincare",
    "norm2-bounded",
    "fsharp",
];

/// Run one named property suite.  Unknown names are a config error.
pub fn run_property_suite(name: &str, config: &StudyConfig) -> Result<Report> {
    config.validate()?;
    let mut report = Report::new(format!("props:{name}"), config, config.seed);
    match name {
        "green" => green_suite(config, &mut report)?,
        "minimization" => minimization_suite(config, &mut report)?,
        "symmetry" | "spectrum" => symmetry_suite(config, &mut report)?,
        "extension" => extension_suite(config, &mut report)?,
        "poincare" => poincare_suite(config, &mut report)?,
        "norm2-bounded" => norm2_suite(config, &mut report)?,
        "fsharp" => fsharp_suite(config, &mut report)?,
        other => {
            return Err(ConfigError::Invalid(format!(
                "unknown property suite '{other}' (known: {})",
                SUITE_NAMES.join(", ")
            ))
            .into())
        }
    }
    Ok(report)
}

/// The study's own domain plus a companion, so every suite exercises both
/// a circle-like and a star-like geometry.
fn suite_domains(config: &StudyConfig) -> Vec<(String, ImplicitDomain)> {
    let own = (domain_label(&config.domain), config.domain.clone());
    if config.domain.dim() != 2 {
        return vec![own];
    }
    let companion = match config.domain.level_set {
        LevelSet::Star { .. } => ImplicitDomain::new(LevelSet::Circle { radius: 0.7 }, 1.0),
        _ => ImplicitDomain::new(
            LevelSet::Star {
                a: 0.7,
                b: 0.15,
                k: 5,
            },
            1.0,
        ),
    };
    vec![own, (domain_label(&companion), companion)]
}

fn domain_label(domain: &ImplicitDomain) -> String {
    match domain.level_set {
        LevelSet::Circle { .. } => "circle".into(),
        LevelSet::Ellipse { .. } => "ellipse".into(),
        LevelSet::Star { .. } => "star".into(),
        LevelSet::Sphere { .. } => "sphere".into(),
        LevelSet::Ellipsoid { .. } => "ellipsoid".into(),
    }
}

fn random_field(geom: &GridGeometry, side: Side, rng: &mut ChaCha8Rng) -> ExtendedField {
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

fn random_gamma1(geom: &GridGeometry, rng: &mut ChaCha8Rng) -> BoundaryFn {
    BoundaryFn::gamma1(
        (0..geom.cuts.len())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect(),
    )
}

/// A smooth random polynomial (total degree ≤ 2) with coefficients drawn
/// once, so the same function can be evaluated at every resolution.
fn random_poly(rng: &mut ChaCha8Rng) -> impl Fn(&[f64; 3]) -> f64 {
    let c: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
    move |p: &[f64; 3]| {
        let [x, y, z] = *p;
        c[0] + c[1] * x
            + c[2] * y
            + c[3] * z
            + c[4] * x * x
            + c[5] * y * y
            + c[6] * z * z
            + c[7] * x * y
            + c[8] * x * z
            + c[9] * y * z
    }
}

fn green_suite(config: &StudyConfig, report: &mut Report) -> Result<()> {
    for (label, domain) in suite_domains(config) {
        for &n in &config.resolutions {
            let geom = GridGeometry::build(&domain, n, config.delta)?;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x67_72_65_65);
            let mut worst: f64 = 0.0;
            for side in [Side::Plus, Side::Minus] {
                for _ in 0..20 {
                    let u = random_field(&geom, side, &mut rng);
                    let v = random_field(&geom, side, &mut rng);
                    worst = worst.max(green_residual(&geom, &u, &v)?);
                }
            }
            report.check(
                format!("green-residual[{label},n={n}]"),
                worst <= 1e-11,
                worst,
                "≤ 1e-11",
            );
        }
    }
    Ok(())
}

fn minimization_suite(config: &StudyConfig, report: &mut Report) -> Result<()> {
    for (label, domain) in suite_domains(config) {
        let n = config.resolutions[0];
        let geom = GridGeometry::build(&domain, n, config.delta)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x6d_69_6e);
        // worst energy deficit of a competitor against the solve; a
        // positive value beyond solver noise breaks Dirichlet minimality
        let mut worst: f64 = 0.0;
        for side in [Side::Plus, Side::Minus] {
            let solver = SingleLayerSolver::new(&geom, side, config.cg_tol);
            for _ in 0..10 {
                let psi = random_gamma1(&geom, &mut rng);
                let (u, _) = solver.solve(&psi)?;
                let base = inner(&geom, &u, &u)?;
                for _ in 0..20 {
                    let mut interior: Vec<f64> = (0..geom.total_points())
                        .map(|_| rng.gen_range(-1.0..1.0))
                        .collect();
                    if side == Side::Minus {
                        for idx in 0..geom.total_points() {
                            if geom.box_boundary[idx] {
                                interior[idx] = 0.0;
                            }
                        }
                    }
                    let z = lift_from_trace(&geom, interior, &psi, side)?;
                    worst = worst.max(base - inner(&geom, &z, &z)?);
                }
            }
        }
        report.check(
            format!("minimization-deficit[{label},n={n}]"),
            worst <= 10.0 * config.cg_tol,
            worst,
            format!("≤ {:.1e}", 10.0 * config.cg_tol),
        );
    }
    Ok(())
}

fn symmetry_suite(config: &StudyConfig, report: &mut Report) -> Result<()> {
    for (label, domain) in suite_domains(config) {
        let mut r_hats = Vec::new();
        for &n in config.resolutions.iter().take(2) {
            let geom = GridGeometry::build(&domain, n, config.delta)?;
            let ops = Operators::new(&geom, config.cg_tol);
            let matb = ops.assemble_dense(OperatorTag::CalB)?;
            let g = ops.assemble_gram()?;
            let gb = &g * &matb;
            let asym = (&gb - gb.transpose()).norm() / gb.norm();
            report.check(
                format!("B-self-adjoint[{label},n={n}]"),
                asym <= 1e-8,
                asym,
                "≤ 1e-8 relative",
            );
            let spec = ops.spectrum()?;
            let max_b = *spec.b_eigs.last().unwrap();
            report.check(
                format!("B-nonpositive[{label},n={n}]"),
                max_b <= 1e-8,
                max_b,
                "≤ 1e-8",
            );
            report.check(
                format!("r-hat-below-one[{label},n={n}]"),
                spec.r_hat < 1.0,
                spec.r_hat,
                "< 1",
            );
            let min_a = spec.a_eigs[0];
            report.check(
                format!("A-spectrum-low-edge[{label},n={n}]"),
                min_a >= 1.0 - spec.r_hat - 1e-10,
                min_a,
                "≥ 1 − r̂",
            );
            // constants are an eigenvector of 𝒜 with eigenvalue 1
            let one = BoundaryFn::constant(&geom, BoundaryIndex::Gamma1, 1.0);
            let a_one = ops.apply_cal_a(&one)?;
            let dev = a_one
                .values
                .iter()
                .fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
            report.check(
                format!("A-fixes-constants[{label},n={n}]"),
                dev <= 10.0 * config.cg_tol,
                dev,
                format!("≤ {:.1e}", 10.0 * config.cg_tol),
            );
            r_hats.push(spec.r_hat);
        }
        if r_hats.len() == 2 {
            let factor = (r_hats[0] / r_hats[1]).max(r_hats[1] / r_hats[0]);
            report.check(
                format!("r-hat-stable[{label}]"),
                factor <= 1.5,
                factor,
                "≤ 1.5",
            );
        }
    }
    Ok(())
}

fn extension_suite(config: &StudyConfig, report: &mut Report) -> Result<()> {
    for (label, domain) in suite_domains(config) {
        let mut fwd = Vec::new();
        let mut rev = Vec::new();
        for &n in &config.resolutions {
            let geom = GridGeometry::build(&domain, n, config.delta)?;
            let ops = Operators::new(&geom, config.cg_tol);
            let mut worst_fwd: f64 = 0.0;
            let mut worst_rev: f64 = 0.0;
            for sample in 0..5u64 {
                // the same smooth trace at every resolution
                let mut coeff_rng = ChaCha8Rng::seed_from_u64(config.seed ^ (0xe0 + sample));
                let poly = random_poly(&mut coeff_rng);
                let psi = BoundaryFn::sample(&geom, BoundaryIndex::Gamma1, &poly);
                let (sp, sm) = ops.single_layer(&psi)?;
                let e_plus = inner(&geom, &sp, &sp)?;
                let e_minus = inner(&geom, &sm, &sm)?;
                worst_fwd = worst_fwd.max(e_plus / e_minus);
                // reverse direction after removing the interior mean
                let mean = sp.own_mean(&geom);
                let psi_adj = BoundaryFn::gamma1(psi.values.iter().map(|v| v - mean).collect());
                let (_, sm_adj) = ops.single_layer(&psi_adj)?;
                let e_minus_adj = inner(&geom, &sm_adj, &sm_adj)?;
                worst_rev = worst_rev.max(e_minus_adj / e_plus);
            }
            fwd.push(worst_fwd);
            rev.push(worst_rev);
        }
        for (tag, values) in [("fwd", &fwd), ("rev", &rev)] {
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(0.0f64, f64::max);
            report.check(
                format!("extension-C1-{tag}-stable[{label}]"),
                hi / lo <= 2.0,
                hi / lo,
                "spread factor ≤ 2",
            );
        }
    }
    Ok(())
}

fn poincare_suite(config: &StudyConfig, report: &mut Report) -> Result<()> {
    for (label, domain) in suite_domains(config) {
        // ratios ‖v‖²/⟨v,v⟩ for the three inequality variants, one value
        // per resolution per variant
        let mut ratios: [Vec<f64>; 3] = Default::default();
        for &n in &config.resolutions {
            let geom = GridGeometry::build(&domain, n, config.delta)?;
            let hd = geom.cell_volume();
            let l = geom.half_width;
            let mut worst = [0.0f64; 3];
            for sample in 0..3u64 {
                let mut coeff_rng = ChaCha8Rng::seed_from_u64(config.seed ^ (0x70 + sample));
                let poly = random_poly(&mut coeff_rng);

                // (1) minus side, zero on the box boundary
                let bump = |p: &[f64; 3]| {
                    let mut b = 1.0;
                    for ax in 0..geom.dim {
                        b *= (std::f64::consts::PI * p[ax] / (2.0 * l)).cos();
                    }
                    b * poly(p)
                };
                let vm = ExtendedField::sample(&geom, Side::Minus, bump);
                let norm2: f64 = geom
                    .minus_points
                    .iter()
                    .map(|&p| vm.interior[p] * vm.interior[p] * hd)
                    .sum();
                worst[0] = worst[0].max(norm2 / inner(&geom, &vm, &vm)?);

                // (2) plus side with zero trace
                let mut interior = vec![0.0; geom.total_points()];
                for &p in &geom.plus_points {
                    let pos = geom.position(p);
                    interior[p] = domain.eval(&pos) * poly(&pos);
                }
                let zero = BoundaryFn::constant(&geom, BoundaryIndex::Gamma1, 0.0);
                let vp = lift_from_trace(&geom, interior, &zero, Side::Plus)?;
                let norm2: f64 = geom
                    .plus_points
                    .iter()
                    .map(|&p| vp.interior[p] * vp.interior[p] * hd)
                    .sum();
                worst[1] = worst[1].max(norm2 / inner(&geom, &vp, &vp)?);

                // (3) plus side, mean removed
                let mut vc = ExtendedField::sample(&geom, Side::Plus, &poly);
                let mean = vc.own_mean(&geom);
                for &p in &geom.plus_points {
                    vc.interior[p] -= mean;
                }
                for e in vc.ext.iter_mut() {
                    *e -= mean;
                }
                let norm2: f64 = geom
                    .plus_points
                    .iter()
                    .map(|&p| vc.interior[p] * vc.interior[p] * hd)
                    .sum();
                worst[2] = worst[2].max(norm2 / inner(&geom, &vc, &vc)?);
            }
            for k in 0..3 {
                ratios[k].push(worst[k]);
            }
        }
        for (k, name) in ["minus-zero-bc", "plus-zero-trace", "plus-mean-zero"]
            .iter()
            .enumerate()
        {
            let lo = ratios[k].iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ratios[k].iter().cloned().fold(0.0f64, f64::max);
            report.check(
                format!("poincare-{name}-stable[{label}]"),
                hi / lo <= 2.0,
                hi / lo,
                "spread factor ≤ 2",
            );
        }
    }
    Ok(())
}

fn norm2_suite(config: &StudyConfig, report: &mut Report) -> Result<()> {
    let fbar = |p: &[f64; 3]| p[0].sin() * p[1].cosh();
    for (label, domain) in suite_domains(config) {
        let mut norms = Vec::new();
        let mut flux_uncut = Vec::new();
        let mut flux_energy = Vec::new();
        for &n in &config.resolutions {
            let geom = GridGeometry::build(&domain, n, config.delta)?;
            let ops = Operators::new(&geom, config.cg_tol);
            let f = BoundaryFn::sample(&geom, BoundaryIndex::Gamma0, fbar);
            norms.push(ops.norm2(&f)?);
            // the flux sums behind the boundedness argument
            let (w, _) = shortley_weller(&geom, &f, config.cg_tol)?;
            let extended = quadratic_extrapolate(&geom, &w, &f)?;
            let mut uncut = 0.0;
            let shape = geom.shape();
            for axis in 0..geom.dim {
                for lower in 0..geom.total_points() {
                    let c = geom.point_coords(lower);
                    if c[axis] + 1 >= shape[axis] {
                        continue;
                    }
                    let mut cu = c;
                    cu[axis] += 1;
                    let upper = geom.point_index(cu);
                    if geom.is_plus(lower) && geom.is_plus(upper) {
                        let d = (w[upper] - w[lower]) / geom.h;
                        uncut += d * d * geom.cell_volume();
                    }
                }
            }
            flux_uncut.push(uncut);
            flux_energy.push(inner(&geom, &extended, &extended)?);
        }
        let lo = norms.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = norms.iter().cloned().fold(0.0f64, f64::max);
        report.check(
            format!("norm2-spread[{label}]"),
            (hi - lo) / lo <= 0.2,
            (hi - lo) / lo,
            "≤ 0.2",
        );
        for (tag, values) in [("uncut", &flux_uncut), ("energy", &flux_energy)] {
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(0.0f64, f64::max);
            report.check(
                format!("flux-sum-{tag}-stable[{label}]"),
                hi / lo <= 2.0,
                hi / lo,
                "spread factor ≤ 2",
            );
        }
    }
    Ok(())
}

fn fsharp_suite(config: &StudyConfig, report: &mut Report) -> Result<()> {
    // a geometry constructed to have genuine multiple cut points, plus the
    // study's own domains
    let degenerate = ImplicitDomain::new(LevelSet::Ellipse { a2: 0.5, b2: 0.125 }, 1.0);
    let mut cases = vec![("degenerate-ellipse".to_string(), degenerate, 16usize)];
    for (label, domain) in suite_domains(config) {
        cases.push((label, domain, config.resolutions[0]));
    }
    for (label, domain, n) in cases {
        let geom = GridGeometry::build(&domain, n, config.delta)?;
        let ops = Operators::new(&geom, config.cg_tol);
        if label == "degenerate-ellipse" {
            report.check(
                format!("has-multiple-cut-points[{label}]"),
                geom.multiple_cut_points() > 0,
                geom.multiple_cut_points() as f64,
                "> 0",
            );
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xf5);
        let phi = BoundaryFn::gamma0(
            (0..geom.gamma0.len())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        );
        let lifted = ops.tilde_lift(&phi)?;
        let back = ops.restrict_sharp(&lifted)?;
        let roundtrip = back
            .values
            .iter()
            .zip(&phi.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        report.check(
            format!("lift-restrict-roundtrip[{label}]"),
            roundtrip == 0.0,
            roundtrip,
            "exactly 0",
        );
        // the double-layer interior field is single-valued at shared points
        let (up, _) = ops.double_layer(&lifted)?;
        let mut spread: f64 = 0.0;
        for point in geom.gamma0.iter().filter(|p| p.cuts.len() > 1) {
            let vals: Vec<f64> = point.cuts.iter().map(|&c| up.ext[c]).collect();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let scale = lo.abs().max(hi.abs()).max(1.0);
            spread = spread.max((hi - lo) / scale);
        }
        report.check(
            format!("double-layer-single-valued[{label}]"),
            spread <= 1e-9,
            spread,
            "≤ 1e-9 relative",
        );
        report.check(
            format!("interp-q-accepts-solution[{label}]"),
            ops.interp_q(&up).is_ok(),
            0.0,
            "no sharpness error",
        );
    }
    Ok(())
}

/// Geometry facts for the `geom-dump` CLI verb.
pub fn geometry_summary(geom: &GridGeometry) -> serde_json::Value {
    let xi: Vec<f64> = geom.cuts.iter().map(|c| c.xi).collect();
    let (xi_min, xi_max) = xi
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    serde_json::json!({
        "dim": geom.dim,
        "n": geom.n,
        "h": geom.h,
        "delta": geom.delta,
        "plus_points": geom.plus_points.len(),
        "minus_points": geom.minus_points.len(),
        "cut_intervals": geom.cuts.len(),
        "gamma0_points": geom.gamma0.len(),
        "multiple_cut_points": geom.multiple_cut_points(),
        "xi_min": xi_min,
        "xi_max": xi_max,
    })
}
