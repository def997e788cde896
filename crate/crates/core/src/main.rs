//! Command-line driver: one-shot Dirichlet solves, convergence studies,
//! property suites, operator spectra, and geometry dumps.
//!
//! Exit code is 0 when every executed check passes, 1 when a check fails,
//! and 2 on configuration or solver errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gridlayer::driver::solve_dirichlet;
use gridlayer::fields::{BoundaryFn, BoundaryIndex};
use gridlayer::geometry::GridGeometry;
use gridlayer::harness::{
    geometry_summary, run_convergence, run_property_suite, Report, ReportFormat, StudyConfig,
    SUITE_NAMES,
};
use gridlayer::operators::Operators;
use gridlayer::error::Result;

#[derive(Parser)]
#[command(name = "gridlayer", version, about = "Embedded-boundary Laplace solver")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Solve one Dirichlet problem against the configured exact solution.
    Solve(CommonOpts),
    /// Run a manufactured-solution convergence study.
    Converge(CommonOpts),
    /// Run a property suite (or `all`).
    Props {
        /// Suite name; see `--help` for the list.
        #[arg(value_name = "SUITE")]
        suite: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Report the boundary-operator spectrum.
    Spectrum(CommonOpts),
    /// Dump geometry statistics as JSON.
    GeomDump(CommonOpts),
}

#[derive(Args)]
struct CommonOpts {
    /// TOML study config; defaults to a circle of radius 0.7.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the resolution list with a single value.
    #[arg(long)]
    n: Option<usize>,
    /// Override the interface-offset parameter.
    #[arg(long)]
    delta: Option<f64>,
    /// Override the solve method (fixed_point | dense_direct).
    #[arg(long)]
    method: Option<String>,
    /// Override the random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the report into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: json | csv | text.
    #[arg(long, default_value = "text")]
    format: String,
    /// Run everything on one thread in a fixed order.  Execution is
    /// sequential by construction, so this only pins the report order.
    #[arg(long)]
    single_thread: bool,
}

impl CommonOpts {
    fn study_config(&self) -> Result<StudyConfig> {
        let mut config = match &self.config {
            Some(path) => StudyConfig::from_path(path)?,
            None => StudyConfig::circle(vec![32, 64]),
        };
        if let Some(n) = self.n {
            config.resolutions = vec![n];
        }
        if let Some(delta) = self.delta {
            config.delta = delta;
        }
        if let Some(method) = &self.method {
            config.method = method.clone();
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        config.validate()?;
        Ok(config)
    }

    fn format(&self) -> Result<ReportFormat> {
        self.format
            .parse()
            .map_err(|e| gridlayer::error::ConfigError::Invalid(e).into())
    }

    fn emit(&self, report: &Report, stem: &str) -> Result<()> {
        let format = self.format()?;
        print!("{}", report.render(format));
        if let Some(dir) = &self.out {
            let path = report.write_to(dir, stem, format)?;
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.verb {
        Verb::Solve(opts) => {
            let config = opts.study_config()?;
            let report = solve_once(&config)?;
            opts.emit(&report, "solve")?;
            Ok(report.all_passed())
        }
        Verb::Converge(opts) => {
            let config = opts.study_config()?;
            let report = run_convergence(&config)?;
            opts.emit(&report, "converge")?;
            Ok(report.all_passed())
        }
        Verb::Props { suite, opts } => {
            let config = opts.study_config()?;
            let names: Vec<&str> = if suite == "all" {
                SUITE_NAMES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let mut all = true;
            for name in names {
                let report = run_property_suite(name, &config)?;
                opts.emit(&report, &format!("props-{name}"))?;
                all &= report.all_passed();
            }
            Ok(all)
        }
        Verb::Spectrum(opts) => {
            let config = opts.study_config()?;
            let report = spectrum_report(&config)?;
            opts.emit(&report, "spectrum")?;
            Ok(report.all_passed())
        }
        Verb::GeomDump(opts) => {
            let config = opts.study_config()?;
            let n = *config.resolutions.last().unwrap();
            let geom = GridGeometry::build(&config.domain, n, config.delta)?;
            let summary = geometry_summary(&geom);
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            if let Some(dir) = &opts.out {
                std::fs::create_dir_all(dir).map_err(|source| gridlayer::Error::Io {
                    path: dir.display().to_string(),
                    source,
                })?;
                let path = dir.join("geom-dump.json");
                std::fs::write(&path, summary.to_string()).map_err(|source| {
                    gridlayer::Error::Io {
                        path: path.display().to_string(),
                        source,
                    }
                })?;
                eprintln!("wrote {}", path.display());
            }
            Ok(true)
        }
    }
}

/// One Dirichlet solve at the finest configured resolution, with the
/// configured exact solution supplying boundary data and the error norm.
fn solve_once(config: &StudyConfig) -> Result<Report> {
    let solution = config.solution.clone().ok_or_else(|| {
        gridlayer::error::ConfigError::Invalid("solve needs a [solution] section".into())
    })?;
    let n = *config.resolutions.last().unwrap();
    let geom = GridGeometry::build(&config.domain, n, config.delta)?;
    let f = BoundaryFn::sample(&geom, BoundaryIndex::Gamma0, |p| solution.eval(p));
    let solve = solve_dirichlet(&geom, &f, &config.solve_config())?;
    let mut report = Report::new("solve", config, config.seed);
    let residual = solve.residual_trace.last().copied().unwrap_or(0.0);
    report.check(
        format!("residual[n={n}]"),
        residual <= config.fp_tol,
        residual,
        format!("≤ {:.1e}", config.fp_tol),
    );
    report.check(
        "residual-monotone-after-warmup",
        !solve.monotone_violation,
        solve.monotone_violation as u8 as f64,
        "no violation",
    );
    if let Some(err) = solve.max_error {
        // informational: compares against the exact solution at grid nodes
        report.check(format!("max-node-error[n={n}]"), true, err, "reported");
    }
    Ok(report)
}

fn spectrum_report(config: &StudyConfig) -> Result<Report> {
    let mut report = Report::new("spectrum", config, config.seed);
    for &n in &config.resolutions {
        let geom = GridGeometry::build(&config.domain, n, config.delta)?;
        let ops = Operators::new(&geom, config.cg_tol);
        let spec = ops.spectrum()?;
        report.check(
            format!("r-hat[n={n}]"),
            spec.r_hat < 1.0,
            spec.r_hat,
            "< 1",
        );
        let max_b = *spec.b_eigs.last().unwrap();
        report.check(format!("max-eig-B[n={n}]"), max_b <= 1e-8, max_b, "≤ 1e-8");
        let min_a = spec.a_eigs[0];
        report.check(
            format!("min-eig-A[n={n}]"),
            min_a > 0.0,
            min_a,
            "> 0",
        );
    }
    Ok(report)
}
