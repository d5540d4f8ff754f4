//! Experiment configuration: a flat JSON object whose keys mirror the
//! command-line flags. Flags override file values.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, ValueEnum};
use grouplab::Group;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::experiments;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every setting, all optional. Serves as the config-file schema and as
/// the `run` flags.
#[derive(Clone, Debug, Default, PartialEq, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[arg(long)]
    pub experiment: Option<String>,
    /// Group spec: zmod:<N>, bits:<n>, sym:<n> or prod:<spec>,<spec>
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long)]
    pub s: Option<u64>,
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long)]
    pub qc: Option<u64>,
    #[arg(long)]
    pub qf: Option<u64>,
    #[arg(long)]
    pub qg: Option<u64>,
    #[arg(long)]
    pub r: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

pub const BUDGET_KEYS: [&str; 8] = ["d", "s", "t", "qc", "qf", "qg", "r", "q"];

impl Settings {
    /// Parses a config file. Errors carry the line and column.
    pub fn from_json(text: &str) -> Result<Settings, CliError> {
        serde_json::from_str(text).map_err(|e| {
            let full = e.to_string();
            let message = match full.rsplit_once(" at line ") {
                Some((head, _)) => head.to_string(),
                None => full,
            };
            CliError::ConfigSyntax {
                line: e.line(),
                column: e.column(),
                message,
            }
        })
    }

    /// Parses `run`-style flags, e.g. `--group zmod:8 --r 10`.
    pub fn from_flags<I, S>(flags: I) -> Result<Settings, clap::Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<std::ffi::OsString> + Clone,
    {
        #[derive(Parser)]
        #[command(no_binary_name = true)]
        struct Flags {
            #[command(flatten)]
            settings: Settings,
        }
        Flags::try_parse_from(flags).map(|f| f.settings)
    }

    /// `self` with every unset field taken from `lower`.
    pub fn or(self, lower: Settings) -> Settings {
        Settings {
            experiment: self.experiment.or(lower.experiment),
            group: self.group.or(lower.group),
            trials: self.trials.or(lower.trials),
            seed: self.seed.or(lower.seed),
            d: self.d.or(lower.d),
            s: self.s.or(lower.s),
            t: self.t.or(lower.t),
            qc: self.qc.or(lower.qc),
            qf: self.qf.or(lower.qf),
            qg: self.qg.or(lower.qg),
            r: self.r.or(lower.r),
            q: self.q.or(lower.q),
            output: self.output.or(lower.output),
            format: self.format.or(lower.format),
        }
    }

    fn budgets(&self) -> BTreeMap<String, u64> {
        let values = [
            self.d, self.s, self.t, self.qc, self.qf, self.qg, self.r, self.q,
        ];
        BUDGET_KEYS
            .iter()
            .zip(values)
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub group: Group,
    pub trials: u64,
    pub seed: u64,
    pub budgets: BTreeMap<String, u64>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentConfig {
    /// A budget the experiment needs; every experiment's smoke settings
    /// supply defaults for the ones it reads.
    pub fn budget(&self, key: &'static str) -> Result<u64, CliError> {
        self.budgets.get(key).copied().ok_or(CliError::Missing(key))
    }

    /// `seed=… trials=… d=…`, enough to reproduce the run.
    pub fn params(&self) -> String {
        let mut parts = vec![
            format!("seed={}", self.seed),
            format!("trials={}", self.trials),
        ];
        parts.extend(self.budgets.iter().map(|(k, v)| format!("{k}={v}")));
        parts.join(" ")
    }
}

/// Combines a config file (if any) with flags. Flags win; anything still
/// unset except the seed falls back to the experiment's smoke settings.
pub fn parse_config(file: Option<&str>, flags: &Settings) -> Result<ExperimentConfig, CliError> {
    let from_file = match file {
        Some(text) => Settings::from_json(text)?,
        None => Settings::default(),
    };
    let merged = flags.clone().or(from_file);
    let name = merged
        .experiment
        .clone()
        .ok_or(CliError::Missing("experiment"))?;
    let experiment =
        experiments::find(&name).ok_or_else(|| CliError::UnknownExperiment(name.clone()))?;
    let seed = merged.seed.ok_or(CliError::Missing("seed"))?;
    let merged = merged.or(experiment.smoke_settings());

    let spec = merged.group.clone().ok_or(CliError::Missing("group"))?;
    let group: Group = spec
        .parse()
        .map_err(|e: grouplab::Error| CliError::ConfigValue {
            key: "group".into(),
            message: e.to_string(),
        })?;
    let trials = merged.trials.ok_or(CliError::Missing("trials"))?;
    if trials == 0 {
        return Err(CliError::ConfigValue {
            key: "trials".into(),
            message: "must be at least 1".into(),
        });
    }
    Ok(ExperimentConfig {
        experiment: name,
        group,
        trials,
        seed,
        budgets: merged.budgets(),
        output: merged.output.clone(),
        format: merged.format.unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(s: &str) -> Settings {
        Settings::from_flags(s.split_whitespace()).unwrap()
    }

    #[test]
    fn flags_alone_make_a_config() {
        let cfg = parse_config(
            None,
            &flags("--group zmod:1024 --experiment slide-attack --d 32 --trials 2000 --seed 42"),
        )
        .unwrap();
        assert_eq!(cfg.group.to_string(), "zmod:1024");
        assert_eq!(cfg.trials, 2000);
        assert_eq!(cfg.budget("d").unwrap(), 32);
        assert_eq!(cfg.format, Format::Csv);
    }

    #[test]
    fn flags_override_the_file() {
        let file = r#"{"experiment": "slide-attack", "trials": 100, "seed": 1}"#;
        let cfg = parse_config(Some(file), &flags("--trials 500")).unwrap();
        assert_eq!(cfg.trials, 500);
        assert_eq!(cfg.seed, 1);
    }

    #[test]
    fn symmetric_degree_is_capped() {
        let err = parse_config(
            None,
            &flags("--experiment roundtrip --seed 1 --group sym:25"),
        )
        .unwrap_err();
        assert!(
            matches!(&err, CliError::ConfigValue { key, .. } if key == "group"),
            "{err}"
        );
    }

    #[test]
    fn unknown_keys_report_their_position() {
        let file = "{\n  \"experiment\": \"roundtrip\",\n  \"sed\": 3\n}";
        match parse_config(Some(file), &Settings::default()).unwrap_err() {
            CliError::ConfigSyntax { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("sed"), "{message}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn malformed_json_reports_its_position() {
        let err =
            parse_config(Some("{\"seed\": 1,\n \"trials\": }"), &Settings::default()).unwrap_err();
        assert!(
            matches!(err, CliError::ConfigSyntax { line: 2, .. }),
            "{err}"
        );
    }

    #[test]
    fn bad_flags_name_the_flag() {
        let err = Settings::from_flags(["--trials", "many"]).unwrap_err();
        assert!(err.to_string().contains("--trials"), "{err}");
    }

    #[test]
    fn seed_is_required() {
        let err = parse_config(None, &flags("--experiment roundtrip")).unwrap_err();
        assert!(matches!(err, CliError::Missing("seed")), "{err}");
    }

    #[test]
    fn zero_trials_rejected() {
        let err =
            parse_config(None, &flags("--experiment roundtrip --seed 1 --trials 0")).unwrap_err();
        assert!(matches!(err, CliError::ConfigValue { .. }), "{err}");
    }

    #[test]
    fn unknown_experiment_rejected() {
        let err = parse_config(None, &flags("--experiment nope --seed 1")).unwrap_err();
        assert!(matches!(err, CliError::UnknownExperiment(_)), "{err}");
    }
}
