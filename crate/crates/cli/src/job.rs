//! Job files: one JSON object per run, merged under explicit flags.

use std::collections::BTreeMap;
use std::path::PathBuf;

use fraclie::cantor::Normalization;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Set,
    Staircase,
    Dim,
    Deriv,
    Integ,
    Ode,
    Symcheck,
    Prolong,
    Noether,
    Figure,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Set => "set",
            CommandKind::Staircase => "staircase",
            CommandKind::Dim => "dim",
            CommandKind::Deriv => "deriv",
            CommandKind::Integ => "integ",
            CommandKind::Ode => "ode",
            CommandKind::Symcheck => "symcheck",
            CommandKind::Prolong => "prolong",
            CommandKind::Noether => "noether",
            CommandKind::Figure => "figure",
        }
    }

    /// Command-specific fields accepted on top of the shared ones.
    fn fields(self) -> &'static [&'static str] {
        match self {
            CommandKind::Set | CommandKind::Staircase | CommandKind::Dim => &[],
            CommandKind::Deriv => &["expr", "window", "samples"],
            CommandKind::Integ => &["expr", "from", "to"],
            CommandKind::Ode => &["coeffs", "initial"],
            CommandKind::Symcheck => &[
                "example",
                "ode",
                "solved",
                "params",
                "generators",
                "options",
                "first_order",
            ],
            CommandKind::Prolong => &["xi", "phi", "order", "params"],
            CommandKind::Noether => &["lagrangian", "eta", "gauge", "energy", "coeffs", "initial"],
            CommandKind::Figure => &["figure", "bodytext"],
        }
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            CommandKind::Deriv | CommandKind::Integ => &["expr"],
            CommandKind::Ode => &["coeffs", "initial"],
            CommandKind::Prolong => &["xi", "phi"],
            CommandKind::Noether => &["lagrangian", "coeffs", "initial"],
            CommandKind::Figure => &["figure"],
            _ => &[],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationArg {
    GammaFactor,
    Unit,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::GammaFactor => Normalization::GammaFactor,
            NormalizationArg::Unit => Normalization::Unit,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub xi: String,
    pub phi: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymcheckOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub on_shell: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub xi: String,
    pub h: String,
}

/// `y^(α) = f(x, y)` with candidate `ξ(x)`, `h(x)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirstOrderSpec {
    pub f: String,
    pub candidates: Vec<CandidateSpec>,
}

/// Every field is optional so that a job file and flags can be layered.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub copies: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<NormalizationArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub example: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solved: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<GeneratorSpec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub options: Option<SymcheckOptions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_order: Option<FirstOrderSpec>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub lagrangian: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<bool>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bodytext: Option<bool>,
}

const SHARED: &[&str] = &[
    "command",
    "copies",
    "ratio",
    "depth",
    "bounds",
    "gamma",
    "normalization",
    "tol",
    "format",
    "out",
    "seed",
];

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("job file: {e}")))
    }

    /// Fields set in `top` win over those in `self`.
    pub fn overlay(self, top: JobConfig) -> Result<JobConfig, CliError> {
        let mut base = self.fields_map();
        base.extend(top.fields_map());
        serde_json::from_value(serde_json::Value::Object(base.into_iter().collect()))
            .map_err(|e| CliError::Usage(e.to_string()))
    }

    fn fields_map(&self) -> BTreeMap<String, serde_json::Value> {
        match serde_json::to_value(self).expect("job config serializes") {
            serde_json::Value::Object(m) => m.into_iter().collect(),
            _ => unreachable!("struct serializes to an object"),
        }
    }

    /// Checks that the command is known, required fields are present and no
    /// field belongs to another command. All offending fields are listed.
    pub fn validate(&self) -> Result<CommandKind, CliError> {
        let Some(cmd) = self.command else {
            return Err(CliError::Usage(
                "no command given (use a subcommand or a job file with `command`)".into(),
            ));
        };
        let present = self.fields_map();
        let mut problems = Vec::new();
        for key in present.keys() {
            if !SHARED.contains(&key.as_str()) && !cmd.fields().contains(&key.as_str()) {
                problems.push(format!("`{key}` does not apply to {}", cmd.name()));
            }
        }
        for key in cmd.required() {
            if !present.contains_key(*key) {
                problems.push(format!("`{key}` is required for {}", cmd.name()));
            }
        }
        if cmd == CommandKind::Symcheck {
            let sources = [
                present.contains_key("example"),
                present.contains_key("ode"),
                present.contains_key("first_order"),
            ];
            match sources.iter().filter(|&&b| b).count() {
                0 => {
                    problems.push("symcheck needs one of `example`, `ode` or `first_order`".into())
                }
                1 => {}
                _ => problems
                    .push("`example`, `ode` and `first_order` are mutually exclusive".into()),
            }
            if present.contains_key("ode") && !present.contains_key("generators") {
                problems.push("`generators` is required with `ode`".into());
            }
        }
        if let Some(r) = self.ratio {
            if !(r > 0.0 && r <= 0.5) {
                problems.push(format!("`ratio` must lie in (0, 1/2], got {r}"));
            }
        }
        if let Some(t) = self.tol {
            if t.is_nan() || t <= 0.0 {
                problems.push(format!("`tol` must be positive, got {t}"));
            }
        }
        if problems.is_empty() {
            Ok(cmd)
        } else {
            Err(CliError::Usage(problems.join("; ")))
        }
    }
}
