//! Runs an experiment and writes its CSV, JSON and plot-data files.
//!
//! Everything except `timing_<name>.json` is a pure function of the config, so
//! repeated runs produce identical bytes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::output::{plotdata, to_json, write_text};
use super::{run_baire_example, run_bound_audit, run_ensemble, run_kahane_search, run_profile, run_sharpness};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Profile,
    Sharpness,
    Ensemble,
    BoundAudit,
    Baire,
    Kahane,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Profile => "profile",
            Experiment::Sharpness => "sharpness",
            Experiment::Ensemble => "ensemble",
            Experiment::BoundAudit => "bound_audit",
            Experiment::Baire => "baire",
            Experiment::Kahane => "kahane",
        }
    }
}

#[derive(Serialize)]
struct Summary<'a, T> {
    experiment: &'static str,
    /// The config file exactly as read.
    config_text: &'a str,
    /// The config after defaults and command-line overrides.
    config: &'a ExperimentConfig,
    seed: u64,
    results: &'a T,
}

#[derive(Serialize)]
struct Timing {
    experiment: &'static str,
    seconds: f64,
}

fn summary<T: Serialize>(exp: Experiment, cfg: &ExperimentConfig, text: &str, results: &T) -> String {
    to_json(&Summary {
        experiment: exp.name(),
        config_text: text,
        config: cfg,
        seed: cfg.seed,
        results,
    })
}

fn x_of(s: f64) -> f64 {
    -s.ln()
}

/// Runs `exp` and writes its outputs into `dir`; returns the written paths.
pub fn run_experiment(exp: Experiment, cfg: &ExperimentConfig, config_text: &str, dir: &Path) -> Result<Vec<PathBuf>> {
    let start = Instant::now();
    let name = exp.name();
    let json_name = format!("{name}.json");
    let plot_name = format!("plotdata_{name}.csv");
    let mut paths = Vec::new();
    match exp {
        Experiment::Profile => {
            let run = run_profile(cfg)?;
            paths.push(write_text(dir, "profile.csv", &run.to_csv())?);
            paths.push(write_text(dir, &json_name, &summary(exp, cfg, config_text, &run))?);
            let pts = run.rows.iter().map(|p| (x_of(p.r.gap()), p.delta_h));
            paths.push(write_text(dir, &plot_name, &plotdata(pts))?);
        }
        Experiment::Sharpness => {
            let run = run_sharpness(cfg)?;
            paths.push(write_text(dir, &json_name, &summary(exp, cfg, config_text, &run))?);
            let pts = run.sweep.points.iter().map(|p| (x_of(p.s), Some(p.ratio)));
            paths.push(write_text(dir, &plot_name, &plotdata(pts))?);
        }
        Experiment::Ensemble => {
            let run = run_ensemble(cfg)?;
            paths.push(write_text(dir, "ensemble.csv", &run.to_csv())?);
            paths.push(write_text(dir, &json_name, &summary(exp, cfg, config_text, &run))?);
            paths.push(write_text(dir, &plot_name, &run.plotdata())?);
        }
        Experiment::BoundAudit => {
            let run = run_bound_audit(cfg)?;
            paths.push(write_text(dir, &json_name, &summary(exp, cfg, config_text, &run))?);
        }
        Experiment::Baire => {
            let run = run_baire_example(cfg)?;
            paths.push(write_text(dir, &json_name, &summary(exp, cfg, config_text, &run))?);
            let pts = run.lower.points.iter().map(|p| (x_of(p.s), Some(p.ratio)));
            paths.push(write_text(dir, &plot_name, &plotdata(pts))?);
        }
        Experiment::Kahane => {
            let run = run_kahane_search(cfg)?;
            paths.push(write_text(dir, &json_name, &summary(exp, cfg, config_text, &run))?);
        }
    }
    let timing = Timing {
        experiment: name,
        seconds: start.elapsed().as_secs_f64(),
    };
    paths.push(write_text(dir, &format!("timing_{name}.json"), &to_json(&timing))?);
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::{GridSpec, SequenceSpec};

    #[test]
    fn profile_files_are_reproducible() {
        let text = "[sequence]\nkind = \"geometric\"\n[grid]\nper_decade = 2\nk_max = 2\n";
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let pa = run_experiment(Experiment::Profile, &cfg, text, a.path()).unwrap();
        run_experiment(Experiment::Profile, &cfg, text, b.path()).unwrap();
        assert_eq!(pa.len(), 4);
        for f in ["profile.csv", "profile.json", "plotdata_profile.csv"] {
            assert_eq!(
                std::fs::read(a.path().join(f)).unwrap(),
                std::fs::read(b.path().join(f)).unwrap()
            );
        }
        let json: serde_json::Value =
            serde_json::from_slice(&std::fs::read(a.path().join("profile.json")).unwrap()).unwrap();
        assert_eq!(json["config_text"], text);
        assert_eq!(json["results"]["rows"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn missing_kahane_table_is_a_config_error() {
        let mut cfg = ExperimentConfig::new(SequenceSpec::Geometric);
        cfg.grid = GridSpec {
            per_decade: 1,
            k_max: 1,
            j_min: 1,
        };
        let d = tempfile::tempdir().unwrap();
        assert!(run_experiment(Experiment::Kahane, &cfg, "", d.path()).is_err());
    }
}
