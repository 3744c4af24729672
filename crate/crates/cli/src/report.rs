use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// One measured quantity compared with its bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    /// The result being checked, e.g. `radial catalog: BlockiHe`.
    pub anchor: String,
    /// `None` when the pipeline step failed before producing a value.
    pub measured: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Record {
    pub fn at_most(name: impl Into<String>, anchor: &str, measured: f64, threshold: f64) -> Record {
        Record {
            name: name.into(),
            anchor: anchor.to_string(),
            measured: Some(measured),
            threshold,
            pass: measured <= threshold,
            detail: None,
        }
    }

    /// Passes when `lo <= measured <= hi`; `hi` is stored as the threshold.
    pub fn within(name: impl Into<String>, anchor: &str, measured: f64, lo: f64, hi: f64) -> Record {
        Record {
            name: name.into(),
            anchor: anchor.to_string(),
            measured: Some(measured),
            threshold: hi,
            pass: (lo..=hi).contains(&measured),
            detail: Some(format!("accepted range [{lo}, {hi}]")),
        }
    }

    pub fn failed(name: impl Into<String>, anchor: &str, threshold: f64, err: impl std::fmt::Display) -> Record {
        Record {
            name: name.into(),
            anchor: anchor.to_string(),
            measured: None,
            threshold,
            pass: false,
            detail: Some(err.to_string()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Record {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub overall_pass: bool,
    pub records: Vec<Record>,
    pub config: RunConfig,
}

impl Report {
    pub fn new(records: Vec<Record>, config: RunConfig) -> Report {
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            overall_pass: !records.is_empty() && records.iter().all(|r| r.pass),
            records,
            config,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn exit_code(&self) -> u8 {
        if self.overall_pass {
            0
        } else {
            1
        }
    }
}
