//! Fuzzy cognitive map data model and state evolution.
//!
//! An FCM is a square bipolar matrix `E` whose entry `e_ij` is the causal
//! degree of node `i` on node `j`. A state is a row vector `C(t)` in
//! `[0, 1]^n` and evolves as `C_j(t+1) = phi(sum_i C_i(t) e_ij)`, except for
//! clamped nodes which hold their constant.

use std::collections::HashSet;
use std::fmt;

use crate::error::{FcmError, Result};
use crate::threshold::ThresholdFunction;

/// Square causal-edge matrix with unique node labels. Entries lie in `[-1, 1]`.
#[derive(Clone, PartialEq)]
pub struct EdgeMatrix {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl EdgeMatrix {
    /// Builds a matrix from row-major weights.
    pub fn new<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n == 0 {
            return Err(FcmError::structural("an FCM needs at least one node"));
        }
        if weights.len() != n * n {
            return Err(FcmError::structural(format!(
                "{} labels need {} weights, got {}",
                n,
                n * n,
                weights.len()
            )));
        }
        let mut seen = HashSet::with_capacity(n);
        for l in &labels {
            if l.is_empty() {
                return Err(FcmError::structural("empty node label"));
            }
            if !seen.insert(l.as_str()) {
                return Err(FcmError::structural(format!("duplicate node label `{l}`")));
            }
        }
        for (k, &w) in weights.iter().enumerate() {
            check_bipolar(w).map_err(|_| {
                FcmError::domain(format!(
                    "edge {} -> {} has weight {} outside [-1, 1]",
                    labels[k / n],
                    labels[k % n],
                    w
                ))
            })?;
        }
        let weights = weights.into_iter().map(normalize_zero).collect();
        Ok(EdgeMatrix { labels, weights })
    }

    pub fn from_rows<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        rows: &[Vec<f64>],
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(FcmError::structural(format!(
                "expected {n}x{n} rows for {n} labels, got {} rows with lengths {:?}",
                rows.len(),
                rows.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        Self::new(labels, rows.concat())
    }

    /// All-zero matrix over the given labels.
    pub fn zeros<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        Self::new(labels, vec![0.0; n * n])
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.weights[from * self.dim() + to]
    }

    /// Weight of the edge `from -> to` by label.
    pub fn weight(&self, from: &str, to: &str) -> Option<f64> {
        Some(self.get(self.index_of(from)?, self.index_of(to)?))
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.weights[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Returns a copy with one entry replaced, re-checking the bipolar bound.
    pub fn with_weight(&self, from: usize, to: usize, w: f64) -> Result<Self> {
        check_bipolar(w)?;
        let mut out = self.clone();
        let n = out.dim();
        out.weights[from * n + to] = normalize_zero(w);
        Ok(out)
    }

    /// Consumes the matrix, returning labels and row-major weights.
    pub fn into_parts(self) -> (Vec<String>, Vec<f64>) {
        (self.labels, self.weights)
    }

    /// Row vector times matrix: `out_j = sum_i x_i e_ij`.
    pub fn propagate(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let row = &self.weights[i * n..(i + 1) * n];
            for (o, &e) in out.iter_mut().zip(row) {
                *o += xi * e;
            }
        }
    }

    /// Principal submatrix over `keep`, preserving this matrix's label order.
    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<EdgeMatrix> {
        if keep.is_empty() {
            return Err(FcmError::structural(
                "restriction must keep at least one node",
            ));
        }
        let mut mark = vec![false; self.dim()];
        for k in keep {
            let idx = self.index_of(k.as_ref()).ok_or_else(|| {
                FcmError::structural(format!("unknown node label `{}`", k.as_ref()))
            })?;
            mark[idx] = true;
        }
        let idx: Vec<usize> = (0..self.dim()).filter(|&i| mark[i]).collect();
        let labels: Vec<String> = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let mut weights = Vec::with_capacity(idx.len() * idx.len());
        for &i in &idx {
            for &j in &idx {
                weights.push(self.get(i, j));
            }
        }
        EdgeMatrix::new(labels, weights)
    }

    /// Restriction that removes the named nodes.
    pub fn drop_nodes<S: AsRef<str>>(&self, dropped: &[S]) -> Result<EdgeMatrix> {
        for d in dropped {
            if self.index_of(d.as_ref()).is_none() {
                return Err(FcmError::structural(format!(
                    "unknown node label `{}`",
                    d.as_ref()
                )));
            }
        }
        let keep: Vec<&str> = self
            .labels
            .iter()
            .map(String::as_str)
            .filter(|l| !dropped.iter().any(|d| d.as_ref() == *l))
            .collect();
        self.restrict(&keep)
    }
}

impl fmt::Debug for EdgeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "EdgeMatrix [{}]", self.labels.join(", "))?;
        for i in 0..self.dim() {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

fn check_bipolar(w: f64) -> Result<()> {
    if w.is_finite() && (-1.0..=1.0).contains(&w) {
        Ok(())
    } else {
        Err(FcmError::domain(format!("weight {w} outside [-1, 1]")))
    }
}

#[inline]
fn normalize_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Node activations in `[0, 1]` with an optional per-node clamp.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    values: Vec<f64>,
    clamp: Vec<Option<f64>>,
}

impl StateVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(FcmError::domain(format!(
                    "state entry {i} = {v} outside [0, 1]"
                )));
            }
        }
        let n = values.len();
        Ok(StateVector {
            values: values.into_iter().map(normalize_zero).collect(),
            clamp: vec![None; n],
        })
    }

    pub fn zeros(n: usize) -> Self {
        StateVector {
            values: vec![0.0; n],
            clamp: vec![None; n],
        }
    }

    /// Binary state from 0/1 flags.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(FcmError::domain(format!("bit value {b} is not 0 or 1")));
        }
        Self::new(bits.iter().map(|&b| b as f64).collect())
    }

    /// Parses comma-separated activations such as `1,0,0,1`.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let values = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| FcmError::domain(format!("bad state entry `{}`: {e}", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    /// Holds node `i` at constant `c` through every update.
    pub fn with_clamp(mut self, i: usize, c: f64) -> Result<Self> {
        if i >= self.len() {
            return Err(FcmError::structural(format!(
                "clamp index {i} out of range for {} nodes",
                self.len()
            )));
        }
        if !(c.is_finite() && (0.0..=1.0).contains(&c)) {
            return Err(FcmError::domain(format!(
                "clamp constant {c} outside [0, 1]"
            )));
        }
        self.clamp[i] = Some(c);
        self.values[i] = normalize_zero(c);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn clamp(&self) -> &[Option<f64>] {
        &self.clamp
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Comma-separated rendering with binary entries printed as `0`/`1`.
    pub fn to_csv(&self) -> String {
        self.values
            .iter()
            .map(|v| format_value(*v))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Compact bit string (`10011`) for binary states; falls back to CSV.
    pub fn bit_string(&self) -> String {
        if self.is_binary() {
            self.values
                .iter()
                .map(|&v| if v == 1.0 { '1' } else { '0' })
                .collect()
        } else {
            self.to_csv()
        }
    }

    /// Values at the given indices, without clamps.
    pub fn project(&self, indices: &[usize]) -> StateVector {
        StateVector {
            values: indices.iter().map(|&i| self.values[i]).collect(),
            clamp: vec![None; indices.len()],
        }
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        let n = values.len();
        StateVector {
            values,
            clamp: vec![None; n],
        }
    }
}

pub(crate) fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn check_dims(state: &StateVector, fcm: &EdgeMatrix) -> Result<()> {
    if state.len() != fcm.dim() {
        return Err(FcmError::structural(format!(
            "state has {} entries but the FCM has {} nodes",
            state.len(),
            fcm.dim()
        )));
    }
    Ok(())
}

/// One synchronous update `C(t+1) = phi(C(t) E)`, honouring clamps.
pub fn step(state: &StateVector, fcm: &EdgeMatrix, phi: &ThresholdFunction) -> Result<StateVector> {
    check_dims(state, fcm)?;
    Ok(step_unchecked(state, fcm, phi))
}

pub(crate) fn step_unchecked(
    state: &StateVector,
    fcm: &EdgeMatrix,
    phi: &ThresholdFunction,
) -> StateVector {
    let mut sums = vec![0.0; fcm.dim()];
    fcm.propagate(&state.values, &mut sums);
    let values = sums
        .iter()
        .zip(&state.clamp)
        .map(|(&x, c)| normalize_zero(c.unwrap_or_else(|| phi.apply(x))))
        .collect();
    StateVector {
        values,
        clamp: state.clamp.clone(),
    }
}

/// `[C(0), C(1), ..., C(max_steps)]`.
pub fn trajectory(
    initial: &StateVector,
    fcm: &EdgeMatrix,
    phi: &ThresholdFunction,
    max_steps: usize,
) -> Result<Vec<StateVector>> {
    check_dims(initial, fcm)?;
    let mut out = Vec::with_capacity(max_steps + 1);
    out.push(initial.clone());
    for _ in 0..max_steps {
        let next = step_unchecked(out.last().unwrap(), fcm, phi);
        out.push(next);
    }
    Ok(out)
}

/// Principal submatrix over the kept node names.
pub fn restrict<S: AsRef<str>>(fcm: &EdgeMatrix, keep: &[S]) -> Result<EdgeMatrix> {
    fcm.restrict(keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::dolphin;

    fn bits(b: &[u8]) -> StateVector {
        StateVector::from_bits(b).unwrap()
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(matches!(
            EdgeMatrix::new(["a", "b"], vec![0.0; 3]),
            Err(FcmError::Structural(_))
        ));
        assert!(matches!(
            EdgeMatrix::new(["a", "a"], vec![0.0; 4]),
            Err(FcmError::Structural(_))
        ));
        assert!(matches!(
            EdgeMatrix::new(["a", "b"], vec![0.0, 1.5, 0.0, 0.0]),
            Err(FcmError::Domain(_))
        ));
        assert!(EdgeMatrix::new(["a"], vec![f64::NAN]).is_err());
        assert!(EdgeMatrix::new(Vec::<String>::new(), vec![]).is_err());
    }

    #[test]
    fn state_rejects_out_of_range() {
        assert!(StateVector::new(vec![0.5, 1.2]).is_err());
        assert!(StateVector::new(vec![-0.1]).is_err());
        assert!(StateVector::zeros(2).with_clamp(0, 2.0).is_err());
        assert!(StateVector::zeros(2).with_clamp(5, 0.0).is_err());
    }

    #[test]
    fn dolphin_worked_step() {
        let e = dolphin();
        let h = ThresholdFunction::hard_binary();
        // a single active node selects its row of the matrix
        assert_eq!(
            step(&bits(&[0, 0, 0, 1, 0]), &e, &h).unwrap(),
            bits(&[1, 0, 0, 0, 1])
        );
        assert_eq!(
            step(&bits(&[0, 0, 1, 0, 0]), &e, &h).unwrap(),
            bits(&[0, 0, 0, 1, 0])
        );
        // rows 1 and 4 sum to (1,1,-1,-1,1)
        assert_eq!(
            step(&bits(&[1, 0, 0, 1, 0]), &e, &h).unwrap(),
            bits(&[1, 1, 0, 0, 1])
        );
    }

    #[test]
    fn zero_state_is_fixed() {
        let e = dolphin();
        let h = ThresholdFunction::hard_binary();
        let z = StateVector::zeros(5);
        assert_eq!(step(&z, &e, &h).unwrap(), z);
    }

    #[test]
    fn step_dimension_mismatch_names_both() {
        let e = dolphin();
        let err = step(
            &StateVector::zeros(3),
            &e,
            &ThresholdFunction::hard_binary(),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('3') && msg.contains('5'), "{msg}");
    }

    #[test]
    fn clamped_node_holds() {
        let e = dolphin();
        let h = ThresholdFunction::hard_binary();
        let s = bits(&[0, 0, 1, 0, 0]).with_clamp(4, 0.25).unwrap();
        let next = step(&s, &e, &h).unwrap();
        assert_eq!(next.values(), &[0.0, 0.0, 0.0, 1.0, 0.25]);
        assert_eq!(next.clamp()[4], Some(0.25));
        let traj = trajectory(&s, &e, &h, 6).unwrap();
        assert!(traj.iter().all(|st| st.values()[4] == 0.25));
    }

    #[test]
    fn trajectory_fig3_top() {
        let e = dolphin();
        let h = ThresholdFunction::hard_binary();
        let t = trajectory(&bits(&[0, 0, 0, 1, 0]), &e, &h, 4).unwrap();
        let expect = [
            [0, 0, 0, 1, 0],
            [1, 0, 0, 0, 1],
            [0, 1, 0, 0, 0],
            [0, 0, 1, 0, 0],
            [0, 0, 0, 1, 0],
        ];
        assert_eq!(t.len(), 5);
        for (s, e) in t.iter().zip(expect) {
            assert_eq!(s, &bits(&e));
        }
        assert_eq!(
            trajectory(&bits(&[0, 0, 0, 1, 0]), &dolphin(), &h, 0)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn restrict_drop_c4() {
        let r = dolphin().restrict(&["C1", "C2", "C3", "C5"]).unwrap();
        assert_eq!(r.labels(), &["C1", "C2", "C3", "C5"]);
        assert_eq!(
            r.rows(),
            vec![
                vec![0.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, -1.0],
                vec![0.0, -1.0, 0.0, -1.0],
                vec![-1.0, 1.0, 0.0, 0.0],
            ]
        );
        assert_eq!(dolphin().drop_nodes(&["C4"]).unwrap(), r);
        // keep order follows the matrix, not the request
        assert_eq!(dolphin().restrict(&["C5", "C3", "C2", "C1"]).unwrap(), r);
    }

    #[test]
    fn restrict_edge_cases() {
        let e = dolphin();
        assert_eq!(e.restrict(e.labels()).unwrap(), e);
        let one = e.restrict(&["C3"]).unwrap();
        assert_eq!(one.weights(), &[0.0]);
        assert!(e.restrict(&["C9"]).unwrap_err().to_string().contains("C9"));
        assert!(e.restrict::<&str>(&[]).is_err());
    }
}
