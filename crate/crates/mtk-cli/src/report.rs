//! The report printed by every command, as JSON or a markdown summary.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use mtk_core::multicat::{Multicat, ValidationReport};

use crate::error::{CliError, Status};
use crate::jobs::{JobOutcome, Settings};

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub file: String,
    pub settings: Settings,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub validation: Vec<ValidationEntry>,
    pub jobs: Vec<JobOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub status: Status,
    pub exit_code: i32,
}

#[derive(Debug, Serialize)]
pub struct ValidationEntry {
    pub name: String,
    pub objects: Vec<String>,
    pub multimaps: usize,
    pub report: ValidationReport,
}

fn overall(statuses: impl Iterator<Item = Status>) -> Status {
    statuses.max().unwrap_or(Status::Pass)
}

impl Report {
    pub fn validation(file: &str, settings: &Settings, built: BTreeMap<String, (Multicat, ValidationReport)>) -> Report {
        let validation: Vec<ValidationEntry> = built
            .into_iter()
            .map(|(name, (mc, report))| ValidationEntry {
                name,
                objects: mc.objects().to_vec(),
                multimaps: mc.ops().len(),
                report,
            })
            .collect();
        let status = overall(validation.iter().map(|v| if v.report.valid { Status::Pass } else { Status::Fail }));
        Report {
            command: "validate".into(),
            file: file.into(),
            settings: settings.clone(),
            validation,
            jobs: Vec::new(),
            error: None,
            status,
            exit_code: status.exit_code(),
        }
    }

    pub fn jobs(command: &str, file: &str, settings: &Settings, jobs: Vec<JobOutcome>) -> Report {
        let status = overall(jobs.iter().map(|j| j.status));
        Report {
            command: command.into(),
            file: file.into(),
            settings: settings.clone(),
            validation: Vec::new(),
            jobs,
            error: None,
            status,
            exit_code: status.exit_code(),
        }
    }

    pub fn failed(command: &str, file: &str, settings: &Settings, err: &CliError) -> Report {
        let status = match err {
            CliError::Input(_) => Status::InputError,
        };
        Report {
            command: command.into(),
            file: file.into(),
            settings: settings.clone(),
            validation: Vec::new(),
            jobs: Vec::new(),
            error: Some(err.to_string()),
            status,
            exit_code: err.exit_code(),
        }
    }

    pub fn markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# mtk {}: {}\n", self.command, self.file);
        let _ = writeln!(
            out,
            "Settings: bound {}, budget {}, mode {}\n",
            opt(self.settings.bound),
            opt(self.settings.budget),
            self.settings.mode.map_or("default".to_string(), |m| format!("{m:?}"))
        );
        if let Some(e) = &self.error {
            let _ = writeln!(out, "Error: {e}\n");
        }
        if !self.validation.is_empty() {
            let _ = writeln!(out, "| multicategory | valid | unit checks | associativity checks | violations |");
            let _ = writeln!(out, "|---|---|---|---|---|");
            for v in &self.validation {
                let r = &v.report;
                let mut problems: Vec<&str> = r.unit_violations.iter().map(String::as_str).collect();
                problems.extend(r.assoc_violations.iter().map(String::as_str));
                problems.extend(r.closure_gaps.iter().map(String::as_str));
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    v.name,
                    r.valid,
                    r.unit_instances,
                    r.assoc_instances,
                    if problems.is_empty() { "none".to_string() } else { problems.join("; ") }
                );
            }
            out.push('\n');
        }
        if !self.jobs.is_empty() {
            let _ = writeln!(out, "| job | command | target | status | summary |");
            let _ = writeln!(out, "|---|---|---|---|---|");
            for j in &self.jobs {
                let _ = writeln!(out, "| {} | {} | {} | {:?} | {} |", j.index, j.command, j.target, j.status, j.summary);
            }
            out.push('\n');
        }
        let _ = writeln!(out, "Status: {:?} (exit {})", self.status, self.exit_code);
        out
    }
}

fn opt(v: Option<usize>) -> String {
    v.map_or("default".to_string(), |b| b.to_string())
}
