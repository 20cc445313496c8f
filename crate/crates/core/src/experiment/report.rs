use std::fmt::Write as _;

use super::evaluate::ModelStats;
use crate::fcm::format_value;

#[derive(Debug, Clone, PartialEq)]
pub struct ExpertReport {
    pub name: String,
    pub weight: f64,
    pub phantoms: Vec<String>,
    /// Expert map without phantoms.
    pub pre: ModelStats,
    /// Expert map with learned phantoms.
    pub post: ModelStats,
    /// Distinct training samples, zero for pretrained experts.
    pub samples: usize,
    pub initial_loss: Option<f64>,
    pub final_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    /// SHA-256 of the effective scenario file.
    pub config_hash: String,
    pub train_seed: u64,
    pub eval_seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub scenario: String,
    pub exhaustive: bool,
    pub experts: Vec<ExpertReport>,
    pub mixture: ModelStats,
    pub universe: Vec<String>,
    pub provenance: Provenance,
}

impl EvaluationReport {
    pub fn expert(&self, name: &str) -> Option<&ExpertReport> {
        self.experts.iter().find(|e| e.name == name)
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario: {}", self.scenario);
        let _ = writeln!(
            out,
            "evaluation: {} initial states ({})",
            self.mixture.evaluated,
            if self.exhaustive {
                "exhaustive"
            } else {
                "sampled"
            }
        );
        let _ = writeln!(out, "mixture universe: {}", self.universe.join(","));
        out.push('\n');
        let _ = writeln!(
            out,
            "{:<12} {:>7} {:>9} {:>10} {:>9} {:>10} {:>12} {:>12}",
            "model",
            "weight",
            "pre_rate",
            "pre_dist",
            "post_rate",
            "post_dist",
            "loss_first",
            "loss_last"
        );
        for e in &self.experts {
            let _ = writeln!(
                out,
                "{:<12} {:>7.4} {:>9.4} {:>10.4} {:>9.4} {:>10.4} {:>12} {:>12}",
                e.name,
                e.weight,
                e.pre.match_rate(),
                e.pre.mean_distance,
                e.post.match_rate(),
                e.post.mean_distance,
                e.initial_loss.map_or("-".into(), |v| format!("{v:.6}")),
                e.final_loss.map_or("-".into(), |v| format!("{v:.6}")),
            );
        }
        let m = &self.mixture;
        let _ = writeln!(
            out,
            "{:<12} {:>7} {:>9} {:>10} {:>9.4} {:>10.4}",
            "mixture",
            "-",
            "-",
            "-",
            m.match_rate(),
            m.mean_distance
        );
        out.push('\n');
        let _ = writeln!(
            out,
            "mixture attractors: {} distinct, reproduces {} of {} target attractors, {} unresolved runs",
            m.model_attractors, m.reproduced, m.target_attractors, m.unresolved
        );
        let p = &self.provenance;
        let _ = writeln!(
            out,
            "config sha256 {}  train seed {}  eval seed {}  version {}",
            p.config_hash, p.train_seed, p.eval_seed, p.version
        );
        out
    }

    /// Long-format CSV: `model,metric,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,metric,value\n");
        let mut row = |model: &str, metric: &str, value: String| {
            let _ = writeln!(out, "{model},{metric},{value}");
        };
        let p = &self.provenance;
        row("scenario", "name", self.scenario.clone());
        row("scenario", "config_sha256", p.config_hash.clone());
        row("scenario", "train_seed", p.train_seed.to_string());
        row("scenario", "eval_seed", p.eval_seed.to_string());
        row("scenario", "version", p.version.clone());
        row("scenario", "exhaustive", self.exhaustive.to_string());
        for e in &self.experts {
            row(&e.name, "weight", format_value(e.weight));
            row(&e.name, "phantoms", e.phantoms.join(" "));
            row(&e.name, "samples", e.samples.to_string());
            if let Some(v) = e.initial_loss {
                row(&e.name, "initial_loss", format_value(v));
            }
            if let Some(v) = e.final_loss {
                row(&e.name, "final_loss", format_value(v));
            }
            stats_rows(&mut row, &e.name, "pre", &e.pre);
            stats_rows(&mut row, &e.name, "post", &e.post);
        }
        stats_rows(&mut row, "mixture", "post", &self.mixture);
        out
    }
}

fn stats_rows(row: &mut impl FnMut(&str, &str, String), model: &str, prefix: &str, s: &ModelStats) {
    row(
        model,
        &format!("{prefix}_evaluated"),
        s.evaluated.to_string(),
    );
    row(model, &format!("{prefix}_matches"), s.matches.to_string());
    row(
        model,
        &format!("{prefix}_match_rate"),
        format_value(s.match_rate()),
    );
    row(
        model,
        &format!("{prefix}_mean_distance"),
        format_value(s.mean_distance),
    );
    row(
        model,
        &format!("{prefix}_unresolved"),
        s.unresolved.to_string(),
    );
    row(
        model,
        &format!("{prefix}_target_attractors"),
        s.target_attractors.to_string(),
    );
    row(
        model,
        &format!("{prefix}_model_attractors"),
        s.model_attractors.to_string(),
    );
    row(
        model,
        &format!("{prefix}_reproduced"),
        s.reproduced.to_string(),
    );
}
