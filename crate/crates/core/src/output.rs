//! CSV tables with a provenance preamble.
//!
//! Every file starts with `# pnlab <experiment>`, then one `# config: key = value`
//! line per effective setting, then any `# result: ...` lines, then a CSV
//! header row and the data rows.

use std::path::Path;

use crate::analysis::{LemmaTable, SymbolComparison};
use crate::Result;

/// Shortest representation that round-trips; deterministic across runs.
pub fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub experiment: String,
    pub config: Vec<(String, String)>,
    pub results: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(experiment: &str, header: &[&str]) -> Self {
        Self {
            experiment: experiment.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn config(mut self, config: Vec<(String, String)>) -> Self {
        self.config = config;
        self
    }

    pub fn result(&mut self, line: impl Into<String>) {
        self.results.push(line.into());
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        out.extend_from_slice(format!("# pnlab {}\n", self.experiment).as_bytes());
        for (k, v) in &self.config {
            out.extend_from_slice(format!("# config: {k} = {v}\n").as_bytes());
        }
        for r in &self.results {
            out.extend_from_slice(format!("# result: {r}\n").as_bytes());
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| crate::Error::Io(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }
}

/// Columns `l, mean_re, mean_im, var, stderr, nested_path_re, nested_path_im`.
pub fn lemma_table(experiment: &str, t: &LemmaTable) -> Table {
    let mut out = Table::new(
        experiment,
        &[
            "l",
            "mean_re",
            "mean_im",
            "var",
            "stderr",
            "nested_path_re",
            "nested_path_im",
        ],
    );
    out.result(format!("limit = {} {}", fmt_f64(t.limit.re), fmt_f64(t.limit.im)));
    match t.variance_slope {
        Some(s) => out.result(format!("variance_slope = {}", fmt_f64(s))),
        None => out.result("variance_slope = none (variance identically zero)"),
    }
    for r in &t.rows {
        out.push(vec![
            r.level.to_string(),
            fmt_f64(r.mean.re),
            fmt_f64(r.mean.im),
            fmt_f64(r.variance),
            fmt_f64(r.stderr),
            fmt_f64(r.nested_path.re),
            fmt_f64(r.nested_path.im),
        ]);
    }
    out
}

/// One row per symbol of a pipeline-versus-oracle comparison.
pub fn equivalent_table(experiment: &str, cmp: &[SymbolComparison]) -> Table {
    let mut out = Table::new(
        experiment,
        &[
            "slot",
            "symbol_re",
            "symbol_im",
            "pipeline_mean_re",
            "pipeline_mean_im",
            "oracle_mean_re",
            "oracle_mean_im",
            "mean_stderr",
            "pipeline_var",
            "residual",
            "oracle_var",
            "var_stderr",
        ],
    );
    for c in cmp {
        out.push(vec![
            c.slot.to_string(),
            fmt_f64(c.symbol.re),
            fmt_f64(c.symbol.im),
            fmt_f64(c.pipeline_mean.re),
            fmt_f64(c.pipeline_mean.im),
            fmt_f64(c.oracle_mean.re),
            fmt_f64(c.oracle_mean.im),
            fmt_f64(c.mean_stderr),
            fmt_f64(c.pipeline_variance),
            fmt_f64(c.residual),
            fmt_f64(c.oracle_variance),
            fmt_f64(c.variance_stderr),
        ]);
    }
    out
}
