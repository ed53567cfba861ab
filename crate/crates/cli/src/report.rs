use serde::Serialize;
use serde_json::Value;

/// Uniform JSON wrapper written to stdout by every verifying subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub pass: bool,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ReportEnvelope {
    pub fn new(command: &str, inputs: Value, results: Value) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            results,
            max_residual: None,
            tolerance: None,
            pass: true,
            version: env!("CARGO_PKG_VERSION"),
            seed: None,
        }
    }

    /// Residual-based verdict: `pass = max_residual <= tol`. NaN fails.
    pub fn residual(mut self, max_residual: f64, tol: f64) -> Self {
        self.max_residual = Some(max_residual);
        self.tolerance = Some(tol);
        self.pass = max_residual <= tol;
        self
    }

    pub fn pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Short table for `--pretty`, written to stderr.
    pub fn table(&self) -> String {
        let mut rows = vec![("command".to_string(), self.command.clone())];
        if let Value::Object(map) = &self.inputs {
            for (k, v) in map {
                rows.push((format!("  {k}"), v.to_string()));
            }
        }
        if let Some(r) = self.max_residual {
            rows.push(("max_residual".into(), format!("{r:.3e}")));
        }
        if let Some(t) = self.tolerance {
            rows.push(("tolerance".into(), format!("{t:.0e}")));
        }
        if let Some(s) = self.seed {
            rows.push(("seed".into(), s.to_string()));
        }
        rows.push(("pass".into(), self.pass.to_string()));
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
    }
}

/// Anything a subcommand can print.
pub enum Output {
    Report(ReportEnvelope),
    /// Verbatim text (CSV, or a bare JSON document) with its verdict.
    Raw { text: String, pass: bool },
}
