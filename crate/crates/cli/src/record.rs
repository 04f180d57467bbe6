//! Result records and their CSV / JSON-lines emission.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sumrank::logscale::round_sig12;
use sumrank::stats::Estimate;

/// Fixed CSV header; JSON-lines records carry the same keys.
pub const CSV_HEADER: [&str; 10] = [
    "verb",
    "statistic",
    "trial",
    "value",
    "exact",
    "ci_low",
    "ci_high",
    "seed",
    "trials",
    "config",
];

/// Environment variable naming the base directory for relative `--out` paths.
pub const OUTPUT_DIR_ENV: &str = "SRK_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub verb: String,
    pub statistic: String,
    /// Trial index for stochastic rows, sweep index otherwise.
    pub trial: Option<u64>,
    pub value: String,
    /// Exact rational `num/den` when available.
    pub exact: Option<String>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub config: Value,
}

pub fn fmt_float(x: f64) -> String {
    format!("{}", round_sig12(x))
}

impl Record {
    pub fn new(verb: &str, statistic: impl Into<String>, value: impl Into<String>, config: &Value) -> Self {
        Record {
            verb: verb.to_string(),
            statistic: statistic.into(),
            trial: None,
            value: value.into(),
            exact: None,
            ci_low: None,
            ci_high: None,
            seed: None,
            trials: None,
            config: config.clone(),
        }
    }

    pub fn count(verb: &str, statistic: impl Into<String>, value: &BigUint, config: &Value) -> Self {
        Self::new(verb, statistic, value.to_string(), config)
    }

    pub fn float(verb: &str, statistic: impl Into<String>, value: f64, config: &Value) -> Self {
        Self::new(verb, statistic, fmt_float(value), config)
    }

    pub fn rational(verb: &str, statistic: impl Into<String>, value: &BigRational, config: &Value) -> Self {
        let f = sumrank::qcomb::rational_to_f64(value);
        let mut r = Self::float(verb, statistic, f, config);
        r.exact = Some(format!("{}/{}", value.numer(), value.denom()));
        r
    }

    pub fn estimate(verb: &str, statistic: impl Into<String>, e: &Estimate, config: &Value) -> Self {
        let mut r = Self::float(verb, statistic, e.estimate, config);
        r.ci_low = Some(round_sig12(e.ci_low));
        r.ci_high = Some(round_sig12(e.ci_high));
        r.seed = Some(e.seed);
        r.trials = Some(e.trials);
        r
    }

    pub fn at(mut self, trial: u64) -> Self {
        self.trial = Some(trial);
        self
    }

    pub fn seeded(mut self, seed: u64, trials: u64) -> Self {
        self.seed = Some(seed);
        self.trials = Some(trials);
        self
    }

    fn csv_row(&self) -> Vec<String> {
        let opt = |x: Option<String>| x.unwrap_or_default();
        vec![
            self.verb.clone(),
            self.statistic.clone(),
            opt(self.trial.map(|t| t.to_string())),
            self.value.clone(),
            opt(self.exact.clone()),
            opt(self.ci_low.map(fmt_float)),
            opt(self.ci_high.map(fmt_float)),
            opt(self.seed.map(|s| s.to_string())),
            opt(self.trials.map(|s| s.to_string())),
            self.config.to_string(),
        ]
    }
}

/// Stable sort by (trial, statistic); rows without a trial come first.
pub fn sort_records(records: &mut [Record]) {
    records.sort_by(|a, b| (a.trial, &a.statistic).cmp(&(b.trial, &b.statistic)));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub fn write_records<W: Write>(records: &[Record], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in records {
                w.write_record(r.csv_row())?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            for r in records {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

/// Resolves relative paths against `$SRK_OUTPUT_DIR` when it is set.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes to `path` (see [`resolve_output`]) or to stdout.
pub fn emit(records: &[Record], format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let p = resolve_output(p);
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            let f = std::fs::File::create(&p).with_context(|| format!("writing {}", p.display()))?;
            write_records(records, format, std::io::BufWriter::new(f))
        }
        None => write_records(records, format, std::io::stdout().lock()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_csv_is_header_only() {
        let mut buf = Vec::new();
        write_records(&[], Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn json_round_trip() {
        let cfg = json!({"q": 2});
        let recs = vec![
            Record::count("volume", "sphere", &BigUint::from(9u32), &cfg),
            Record::rational("capacity", "capacity", &BigRational::new(1.into(), 4.into()), &cfg).at(3),
        ];
        let mut buf = Vec::new();
        write_records(&recs, Format::Json, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        let back: Vec<Record> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(back, recs);
        assert_eq!(back[1].value, "0.25");
        assert_eq!(back[1].exact.as_deref(), Some("1/4"));
    }

    #[test]
    fn sorting_is_by_trial_then_statistic() {
        let cfg = json!({});
        let mut recs = vec![
            Record::new("x", "b", "1", &cfg).at(1),
            Record::new("x", "a", "2", &cfg).at(1),
            Record::new("x", "z", "3", &cfg),
            Record::new("x", "a", "4", &cfg).at(0),
        ];
        sort_records(&mut recs);
        let order: Vec<&str> = recs.iter().map(|r| r.value.as_str()).collect();
        assert_eq!(order, ["3", "4", "2", "1"]);
    }
}
