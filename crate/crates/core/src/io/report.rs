use serde::{Deserialize, Serialize};

use crate::depth::{assign_shells, ShellOrder};
use crate::vmoments::{analyze, shell_medians, VMedadConfig, VMedadReport};
use crate::{baseline_report, BaselineReport, CovDivisor, DataMatrix, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub vmedad: VMedadConfig,
    pub emit_baselines: bool,
    pub cov_divisor: CovDivisor,
    pub seed: Option<u64>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            vmedad: VMedadConfig::default(),
            emit_baselines: true,
            cov_divisor: CovDivisor::Sample,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub n: usize,
    pub d: usize,
    pub columns: Vec<String>,
    pub source: Option<String>,
    pub config: ReportConfig,
    pub tool_version: String,
}

/// Shell sizes and per-shell coordinate medians of the centered sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellDiagnostics {
    pub order: ShellOrder,
    pub b: usize,
    pub sizes: Vec<usize>,
    pub medians: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub metadata: ReportMetadata,
    pub vmedad: VMedadReport,
    pub baselines: Option<BaselineReport>,
    pub shell_diagnostics: Vec<ShellDiagnostics>,
}

impl ReportDocument {
    /// Runs the full analysis. Shell diagnostics cover every `b` in
    /// `2..=b_max` under both shell orders. Baselines are omitted when
    /// disabled or when the covariance is singular.
    pub fn build(x: &DataMatrix, columns: Vec<String>, source: Option<String>, config: &ReportConfig) -> Result<Self> {
        let a = analyze(x, &config.vmedad)?;
        let mut shell_diagnostics = Vec::new();
        for order in [ShellOrder::CenterOut, ShellOrder::DepthAscending] {
            for b in 2..=config.vmedad.b_max {
                let p = assign_shells(&a.depths, b, order)?;
                shell_diagnostics.push(ShellDiagnostics {
                    order,
                    b,
                    sizes: p.shell_sizes(),
                    medians: shell_medians(&a.centered, &p)?,
                });
            }
        }
        let baselines = if config.emit_baselines {
            baseline_report(x, config.cov_divisor).ok()
        } else {
            None
        };
        Ok(Self {
            schema: SCHEMA_VERSION,
            metadata: ReportMetadata {
                n: x.nrows(),
                d: x.ncols(),
                columns,
                source,
                config: config.clone(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
            },
            vmedad: a.report,
            baselines,
            shell_diagnostics,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
