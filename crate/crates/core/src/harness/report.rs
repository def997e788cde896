//! Report assembly and serialization.
//!
//! JSON output is byte-deterministic for a fixed config and seed (timing
//! fields are excluded from it); CSV carries the per-resolution timing
//! column for external plotting.

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "text" | "table" => Ok(ReportFormat::Text),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

/// One named measurement with its pass/fail verdict.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    /// Human-readable description of the accepted range.
    pub threshold: String,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, passed: bool, measured: f64, threshold: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            measured,
            threshold: threshold.into(),
        }
    }
}

/// One row of a convergence table.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub err_max: f64,
    pub err_l2: f64,
    pub order_max: Option<f64>,
    pub order_l2: Option<f64>,
    pub iters: usize,
    /// Wall-clock seconds; excluded from JSON to keep it deterministic.
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub title: String,
    /// Echo of the configuration that produced the report.
    pub config: toml::Value,
    pub seed: u64,
    pub rows: Vec<ConvergenceRow>,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new(title: impl Into<String>, config: &impl Serialize, seed: u64) -> Self {
        let config = toml::Value::try_from(config).unwrap_or(toml::Value::String(
            "unserializable config".into(),
        ));
        Self {
            title: title.into(),
            config,
            seed,
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn check(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        measured: f64,
        threshold: impl Into<String>,
    ) {
        self.checks.push(CheckResult::new(name, passed, measured, threshold));
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Convergence table as CSV with the documented column set.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,h,err_max,err_l2,order_max,order_l2,iters,seconds\n");
        for r in &self.rows {
            let fmt_order = |o: Option<f64>| o.map(|v| format!("{v:.6}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{:.10e},{:.10e},{:.10e},{},{},{},{:.3}\n",
                r.n,
                r.h,
                r.err_max,
                r.err_l2,
                fmt_order(r.order_max),
                fmt_order(r.order_l2),
                r.iters,
                r.seconds
            ));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("== {} ==\n", self.title);
        if !self.rows.is_empty() {
            out.push_str(&format!(
                "{:>6} {:>12} {:>12} {:>12} {:>9} {:>9} {:>7}\n",
                "n", "h", "err_max", "err_l2", "ord_max", "ord_l2", "iters"
            ));
            for r in &self.rows {
                let fmt_order =
                    |o: Option<f64>| o.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
                out.push_str(&format!(
                    "{:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>9} {:>9} {:>7}\n",
                    r.n,
                    r.h,
                    r.err_max,
                    r.err_l2,
                    fmt_order(r.order_max),
                    fmt_order(r.order_l2),
                    r.iters
                ));
            }
        }
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {}: measured {:.6e} (want {})\n",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.measured,
                c.threshold
            ));
        }
        out.push_str(&format!(
            "{}: {}/{} checks passed\n",
            if self.all_passed() { "OK" } else { "FAILED" },
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        ));
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Text => self.to_text(),
        }
    }

    pub fn write_to(&self, dir: &std::path::Path, stem: &str, format: ReportFormat) -> Result<std::path::PathBuf> {
        let ext = match format {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Text => "txt",
        };
        let path = dir.join(format!("{stem}.{ext}"));
        std::fs::create_dir_all(dir).map_err(|source| crate::Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
        std::fs::write(&path, self.render(format)).map_err(|source| crate::Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(path)
    }
}
