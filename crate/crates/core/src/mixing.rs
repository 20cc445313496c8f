//! Zero-padding augmentation and convex mixing of expert maps.
//!
//! Mixing bipolar matrices with convex weights always yields a bipolar
//! matrix, so FCMs are closed under mixing. Markov chains over different
//! state sets are not: padding drops probability mass from the rows.

use std::fmt::Write as _;

use crate::error::{FcmError, Result};
use crate::fcm::{format_value, EdgeMatrix};

/// Allowed deviation of the weight sum from one.
pub const CONVEX_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedExpert {
    pub fcm: EdgeMatrix,
    pub weight: f64,
}

impl WeightedExpert {
    pub fn new(fcm: EdgeMatrix, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(FcmError::domain(format!(
                "mixing weight must be nonnegative, got {weight}"
            )));
        }
        Ok(WeightedExpert { fcm, weight })
    }
}

/// Rejects weights that are negative or do not sum to one.
pub fn check_convex(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(FcmError::domain("mixing needs at least one weight"));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(FcmError::domain(format!(
            "mixing weight must be nonnegative, got {w}"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > CONVEX_TOLERANCE {
        return Err(FcmError::domain(format!(
            "mixing weights sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

/// Union of label lists in first-appearance order.
pub fn union_universe<'a, I, L>(label_lists: I) -> Vec<String>
where
    I: IntoIterator<Item = L>,
    L: IntoIterator<Item = &'a String>,
{
    let mut out: Vec<String> = Vec::new();
    for list in label_lists {
        for l in list {
            if !out.contains(l) {
                out.push(l.clone());
            }
        }
    }
    out
}

fn positions(labels: &[String], universe: &[String]) -> Result<Vec<usize>> {
    labels
        .iter()
        .map(|l| {
            universe.iter().position(|u| u == l).ok_or_else(|| {
                FcmError::structural(format!("label `{l}` is not in the mixing universe"))
            })
        })
        .collect()
}

fn check_universe(universe: &[String]) -> Result<()> {
    for (i, u) in universe.iter().enumerate() {
        if universe[..i].contains(u) {
            return Err(FcmError::structural(format!(
                "duplicate universe label `{u}`"
            )));
        }
    }
    Ok(())
}

/// Embeds `fcm` into `universe`, padding absent nodes with zero rows and columns.
pub fn augment<S: AsRef<str>>(fcm: &EdgeMatrix, universe: &[S]) -> Result<EdgeMatrix> {
    let universe: Vec<String> = universe.iter().map(|s| s.as_ref().to_string()).collect();
    check_universe(&universe)?;
    let pos = positions(fcm.labels(), &universe)?;
    let n = universe.len();
    let mut w = vec![0.0; n * n];
    for (i, &pi) in pos.iter().enumerate() {
        for (j, &pj) in pos.iter().enumerate() {
            w[pi * n + pj] = fcm.get(i, j);
        }
    }
    EdgeMatrix::new(universe, w)
}

/// Entrywise convex combination of conformable matrices.
pub fn mix(experts: &[WeightedExpert]) -> Result<EdgeMatrix> {
    let weights: Vec<f64> = experts.iter().map(|e| e.weight).collect();
    check_convex(&weights)?;
    let first = &experts[0].fcm;
    for e in &experts[1..] {
        if e.fcm.labels() != first.labels() {
            return Err(FcmError::structural(format!(
                "cannot mix matrices over [{}] and [{}]; augment them to a shared universe first",
                first.labels().join(","),
                e.fcm.labels().join(",")
            )));
        }
    }
    let mut acc = vec![0.0; first.weights().len()];
    for e in experts {
        for (a, &v) in acc.iter_mut().zip(e.fcm.weights()) {
            *a += e.weight * v;
        }
    }
    // rounding can push a sum of unit entries a hair past 1
    acc.iter_mut().for_each(|v| *v = v.clamp(-1.0, 1.0));
    EdgeMatrix::new(first.labels().to_vec(), acc)
}

/// Augments every matrix into `universe` and mixes them.
pub fn augment_and_mix<S: AsRef<str>>(
    experts: &[(EdgeMatrix, f64)],
    universe: &[S],
) -> Result<EdgeMatrix> {
    let padded = experts
        .iter()
        .map(|(m, w)| WeightedExpert::new(augment(m, universe)?, *w))
        .collect::<Result<Vec<_>>>()?;
    mix(&padded)
}

/// Row-stochastic transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl StochasticMatrix {
    pub fn new<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        probs: Vec<f64>,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        check_universe(&labels)?;
        let n = labels.len();
        if n == 0 || probs.len() != n * n {
            return Err(FcmError::structural(format!(
                "{n} labels need {} probabilities, got {}",
                n * n,
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(FcmError::domain(format!("probability {p} outside [0, 1]")));
        }
        for (i, row) in probs.chunks(n).enumerate() {
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > CONVEX_TOLERANCE {
                return Err(FcmError::domain(format!(
                    "row {} sums to {s}, not 1",
                    labels[i]
                )));
            }
        }
        Ok(StochasticMatrix { labels, probs })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Result of mixing padded chains: a plain matrix plus its row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMix {
    pub labels: Vec<String>,
    /// Row-major.
    pub matrix: Vec<f64>,
    pub row_sums: Vec<f64>,
    pub is_stochastic: bool,
}

impl StochasticMix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.labels.len() + j]
    }

    /// CSV with a label column and a trailing `row_sum` column.
    pub fn to_csv(&self) -> String {
        let n = self.labels.len();
        let mut out = format!("from,{},row_sum\n", self.labels.join(","));
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format_value(self.get(i, j))).collect();
            let _ = writeln!(
                out,
                "{},{},{}",
                self.labels[i],
                row.join(","),
                format_value(self.row_sums[i])
            );
        }
        out
    }
}

pub fn mix_stochastic<S: AsRef<str>>(
    chains: &[(StochasticMatrix, f64)],
    universe: &[S],
) -> Result<StochasticMix> {
    let weights: Vec<f64> = chains.iter().map(|(_, w)| *w).collect();
    check_convex(&weights)?;
    let universe: Vec<String> = universe.iter().map(|s| s.as_ref().to_string()).collect();
    check_universe(&universe)?;
    let n = universe.len();
    let mut acc = vec![0.0; n * n];
    for (chain, w) in chains {
        let pos = positions(&chain.labels, &universe)?;
        let m = chain.labels.len();
        for (i, &pi) in pos.iter().enumerate() {
            for (j, &pj) in pos.iter().enumerate() {
                acc[pi * n + pj] += w * chain.probs[i * m + j];
            }
        }
    }
    let row_sums: Vec<f64> = acc.chunks(n).map(|r| r.iter().sum()).collect();
    let is_stochastic = acc.iter().all(|p| (0.0..=1.0).contains(p))
        && row_sums.iter().all(|s| (s - 1.0).abs() <= CONVEX_TOLERANCE);
    Ok(StochasticMix {
        labels: universe,
        matrix: acc,
        row_sums,
        is_stochastic,
    })
}
