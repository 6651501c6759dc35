//! Verification reports, run files and the merged CSV table.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// The statement a report checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// ∫ over G̊₁(x) of Z[φ₁]Z̃² = (2/π)H sin x + error term, and the G̊₂ twin.
    MeanValueMirrored,
    /// t − φ₁(t) ~ (1 − c)π(t).
    LadderAsymptotic,
    /// ρ between a window and its mirror ~ (1 − c)π(T).
    Separation,
    /// Union and difference of the two mean values.
    UnionDifference,
    /// x = y = π/2: difference (4/π)H and coverage of the mirrored window.
    HalfPiPair,
    /// Positive and negative areas of Z[φ₁]Z̃² over G̊₁ ∪ G̊₂ agree.
    AreaEquality,
    /// Z̃² = dφ₁/dt as a change of variables with f ≡ 1.
    SubstitutionLemma,
    /// ∫ over [T̊, (T+U)°] of f[φ₁]Z̃² = ∫ over [T, T+U] of f.
    SubstitutionWindow,
    /// ∫ over G̊ of Z[φ₁]Z̃² = ∫ over G of Z.
    ZTildeTransform,
    /// ∫ over G₁(x) of Z = (2/π)H sin x + error term, and the G₂ twin.
    MeanValueDirect,
}

impl Relation {
    pub const ALL: [Relation; 10] = [
        Relation::MeanValueMirrored,
        Relation::LadderAsymptotic,
        Relation::Separation,
        Relation::UnionDifference,
        Relation::HalfPiPair,
        Relation::AreaEquality,
        Relation::SubstitutionLemma,
        Relation::SubstitutionWindow,
        Relation::ZTildeTransform,
        Relation::MeanValueDirect,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::MeanValueMirrored => "mean-value-mirrored",
            Relation::LadderAsymptotic => "ladder-asymptotic",
            Relation::Separation => "separation",
            Relation::UnionDifference => "union-difference",
            Relation::HalfPiPair => "half-pi-pair",
            Relation::AreaEquality => "area-equality",
            Relation::SubstitutionLemma => "substitution-lemma",
            Relation::SubstitutionWindow => "substitution-window",
            Relation::ZTildeTransform => "z-tilde-transform",
            Relation::MeanValueDirect => "mean-value-direct",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Informative,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Informative => "informative",
        })
    }
}

/// How `measured` is judged against `predicted`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Check {
    /// |measured − predicted| ≤ tolerance.
    Within { tolerance: f64 },
    /// measured ≥ bound.
    AtLeast { bound: f64 },
    /// measured ≤ bound.
    AtMost { bound: f64 },
    /// No hard tolerance.
    Trend,
    /// The step raised an error; always a failure.
    Aborted,
}

impl Check {
    pub fn verdict(&self, measured: f64, predicted: f64) -> Verdict {
        let ok = match *self {
            Check::Within { tolerance } => (measured - predicted).abs() <= tolerance,
            Check::AtLeast { bound } => measured >= bound,
            Check::AtMost { bound } => measured <= bound,
            Check::Trend => return Verdict::Informative,
            Check::Aborted => false,
        };
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub runtime_s: f64,
    pub finished_unix: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub config: ExperimentConfig,
    #[serde(rename = "H")]
    pub h: f64,
    pub ladder: Option<String>,
    pub evaluations: usize,
    pub notes: Vec<String>,
    pub timing: Timing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub experiment_id: String,
    pub relation: Relation,
    pub measured: f64,
    pub predicted: f64,
    pub error_estimate: f64,
    pub check: Check,
    pub verdict: Verdict,
    pub metadata: Metadata,
}

impl VerificationReport {
    pub fn new(
        experiment_id: impl Into<String>,
        relation: Relation,
        measured: f64,
        predicted: f64,
        error_estimate: f64,
        check: Check,
        cfg: &ExperimentConfig,
    ) -> Self {
        let h = cfg.h().unwrap_or(f64::NAN);
        VerificationReport {
            experiment_id: experiment_id.into(),
            relation,
            measured,
            predicted,
            error_estimate,
            check,
            verdict: check.verdict(measured, predicted),
            metadata: Metadata {
                config: cfg.clone(),
                h,
                ladder: None,
                evaluations: 0,
                notes: Vec::new(),
                timing: Timing {
                    runtime_s: 0.0,
                    finished_unix: 0,
                },
            },
        }
    }

    /// Failure row for a step that raised `err`.
    pub fn aborted(experiment_id: impl Into<String>, relation: Relation, err: &Error, cfg: &ExperimentConfig) -> Self {
        Self::new(experiment_id, relation, 0.0, 0.0, 0.0, Check::Aborted, cfg).note(err.to_string())
    }

    pub fn with_evaluations(mut self, n: usize) -> Self {
        self.metadata.evaluations = n;
        self
    }

    pub fn with_ladder(mut self, kind: impl fmt::Display) -> Self {
        self.metadata.ladder = Some(kind.to_string());
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.metadata.notes.push(s.into());
        self
    }

    pub fn is_hard_failure(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        format!(
            "[{}] {} ({}): measured {:.6e} predicted {:.6e} check {}",
            self.verdict,
            self.experiment_id,
            self.relation,
            self.measured,
            self.predicted,
            match self.check {
                Check::Within { tolerance } => format!("|diff| <= {tolerance:.3e}"),
                Check::AtLeast { bound } => format!(">= {bound:.3e}"),
                Check::AtMost { bound } => format!("<= {bound:.3e}"),
                Check::Trend => "trend".to_string(),
                Check::Aborted => "aborted".to_string(),
            }
        )
    }
}

/// Stamp runtime and wall-clock time on every report of a run.
pub fn stamp(reports: &mut [VerificationReport], runtime_s: f64) {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    for r in reports {
        r.metadata.timing = Timing {
            runtime_s,
            finished_unix: now,
        };
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunFile {
    pub schema_version: u32,
    pub command: String,
    pub reports: Vec<VerificationReport>,
}

/// Write `<dir>/<command>.json` through a temporary file and a rename.
pub fn write_run(dir: &Path, command: &str, reports: &[VerificationReport]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let run = RunFile {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        reports: reports.to_vec(),
    };
    let path = dir.join(format!("{command}.json"));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    serde_json::to_writer_pretty(&mut tmp, &run)?;
    tmp.write_all(b"\n")?;
    tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
    Ok(path)
}

pub fn read_run(path: &Path) -> Result<RunFile> {
    let run: RunFile = serde_json::from_reader(std::io::BufReader::new(fs::File::open(path)?))?;
    if run.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "{}: schema version {} (expected {SCHEMA_VERSION})",
            path.display(),
            run.schema_version
        )));
    }
    Ok(run)
}

#[derive(Serialize)]
struct MergedRow<'a> {
    #[serde(rename = "T")]
    t: f64,
    #[serde(rename = "H")]
    h: f64,
    x: f64,
    y: f64,
    command: &'a str,
    experiment_id: &'a str,
    relation: &'a str,
    measured: f64,
    predicted: f64,
    error_estimate: f64,
    verdict: String,
}

/// Merge every run file in `dir` into one CSV sorted by (T, H, x, y),
/// then command and experiment id. Returns the number of rows.
pub fn merge_runs<W: Write>(dir: &Path, out: W) -> Result<usize> {
    let mut runs = Vec::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    entries.sort();
    for p in entries {
        runs.push(read_run(&p)?);
    }
    let mut rows: Vec<(&str, &VerificationReport)> = runs
        .iter()
        .flat_map(|r| r.reports.iter().map(move |rep| (r.command.as_str(), rep)))
        .collect();
    let key = |r: &VerificationReport| {
        let c = &r.metadata.config;
        [c.t, r.metadata.h, c.x, c.y]
    };
    rows.sort_by(|a, b| {
        let (ka, kb) = (key(a.1), key(b.1));
        ka.iter()
            .zip(&kb)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(b.0))
            .then_with(|| a.1.experiment_id.cmp(&b.1.experiment_id))
    });
    let mut w = csv::Writer::from_writer(out);
    for (cmd, r) in &rows {
        let c = &r.metadata.config;
        w.serialize(MergedRow {
            t: c.t,
            h: r.metadata.h,
            x: c.x,
            y: c.y,
            command: cmd,
            experiment_id: &r.experiment_id,
            relation: r.relation.as_str(),
            measured: r.measured,
            predicted: r.predicted,
            error_estimate: r.error_estimate,
            verdict: r.verdict.to_string(),
        })?;
    }
    w.flush()?;
    Ok(rows.len())
}

/// Plot data with columns x, measured, predicted.
pub fn write_plot_csv(path: &Path, rows: &[(f64, f64, f64)]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "measured", "predicted"])?;
    for (x, m, p) in rows {
        w.write_record([format!("{x:?}"), format!("{m:?}"), format!("{p:?}")])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        assert_eq!(Check::Within { tolerance: 1.0 }.verdict(2.0, 1.5), Verdict::Pass);
        assert_eq!(Check::Within { tolerance: 0.1 }.verdict(2.0, 1.5), Verdict::Fail);
        assert_eq!(Check::AtLeast { bound: 0.0 }.verdict(-1.0, 0.0), Verdict::Fail);
        assert_eq!(Check::AtMost { bound: 0.0 }.verdict(-1.0, 0.0), Verdict::Pass);
        assert_eq!(Check::Trend.verdict(5.0, 0.0), Verdict::Informative);
    }

    #[test]
    fn relation_names_round_trip() {
        for r in Relation::ALL {
            let json = serde_json::to_string(&r).unwrap();
            assert_eq!(json, format!("\"{}\"", r.as_str()));
            assert_eq!(serde_json::from_str::<Relation>(&json).unwrap(), r);
        }
    }

    #[test]
    fn write_read_merge() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::default();
        let a = VerificationReport::new("b", Relation::Separation, 1.0, 1.0, 0.0, Check::Trend, &cfg);
        let mut cfg2 = cfg.clone();
        cfg2.t = 1e5;
        let b = VerificationReport::new("a", Relation::MeanValueDirect, 2.0, 1.0, 0.1, Check::Within { tolerance: 2.0 }, &cfg2);
        let p = write_run(dir.path(), "one", &[a.clone(), b.clone()]).unwrap();
        assert_eq!(read_run(&p).unwrap().reports, vec![a, b]);
        let mut buf = Vec::new();
        assert_eq!(merge_runs(dir.path(), &mut buf).unwrap(), 2);
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("T,H,x,y,command"));
        assert!(lines[1].starts_with("100000.0,"));
    }
}
