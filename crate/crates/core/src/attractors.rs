//! Fixed points, limit cycles, basins of attraction and cycle comparison.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{FcmError, Result};
use crate::fcm::{format_value, step_unchecked, EdgeMatrix, StateVector};
use crate::threshold::ThresholdFunction;

/// Largest node count for which exhaustive binary enumeration is allowed.
pub const MAX_EXHAUSTIVE_NODES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttractorKind {
    FixedPoint,
    LimitCycle {
        period: usize,
    },
    /// No state repeated within the step budget.
    Unresolved,
}

/// Where a trajectory settles.
///
/// Cycle states are stored rotated so the lexicographically smallest state
/// comes first. Equality compares kind and states only, so two trajectories
/// that enter the same cycle at different points or after different
/// transients yield equal attractors.
#[derive(Debug, Clone)]
pub struct Attractor {
    pub kind: AttractorKind,
    pub states: Vec<StateVector>,
    /// Steps taken before the first attractor state.
    pub transient: usize,
}

impl PartialEq for Attractor {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.states == other.states
    }
}

impl Attractor {
    pub fn period(&self) -> Option<usize> {
        match self.kind {
            AttractorKind::FixedPoint => Some(1),
            AttractorKind::LimitCycle { period } => Some(period),
            AttractorKind::Unresolved => None,
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.kind != AttractorKind::Unresolved
    }

    /// Builds an attractor from one period of states in trajectory order.
    pub fn from_cycle(states: Vec<StateVector>, transient: usize) -> Self {
        let kind = match states.len() {
            0 => AttractorKind::Unresolved,
            1 => AttractorKind::FixedPoint,
            k => AttractorKind::LimitCycle { period: k },
        };
        Attractor {
            kind,
            states: canonical_rotation(states),
            transient,
        }
    }

    fn unresolved(transient: usize) -> Self {
        Attractor {
            kind: AttractorKind::Unresolved,
            states: Vec::new(),
            transient,
        }
    }

    /// Grouping key: the quantized canonical states.
    pub fn key(&self, tol: f64) -> AttractorKey {
        AttractorKey(
            self.states
                .iter()
                .map(|s| quantize(s.values(), tol))
                .collect(),
        )
    }

    pub fn kind_label(&self) -> String {
        match self.kind {
            AttractorKind::FixedPoint => "fixed_point".into(),
            AttractorKind::LimitCycle { period } => format!("limit_cycle({period})"),
            AttractorKind::Unresolved => "unresolved".into(),
        }
    }
}

/// Hashable, totally ordered identity of a canonical attractor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttractorKey(Vec<Vec<i64>>);

fn quantize(values: &[f64], tol: f64) -> Vec<i64> {
    values
        .iter()
        .map(|&v| {
            if tol > 0.0 {
                (v / tol).round() as i64
            } else {
                // -0.0 and 0.0 must share a key
                let v = if v == 0.0 { 0.0 } else { v };
                v.to_bits() as i64
            }
        })
        .collect()
}

fn lex_cmp(a: &StateVector, b: &StateVector) -> std::cmp::Ordering {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

fn canonical_rotation(mut states: Vec<StateVector>) -> Vec<StateVector> {
    if let Some(start) = (0..states.len()).min_by(|&i, &j| lex_cmp(&states[i], &states[j])) {
        states.rotate_left(start);
    }
    states
}

/// Runs the map until a state repeats (within `tol`) or `max_steps` updates pass.
pub fn find_attractor(
    initial: &StateVector,
    fcm: &EdgeMatrix,
    phi: &ThresholdFunction,
    max_steps: usize,
    tol: f64,
) -> Result<Attractor> {
    if initial.len() != fcm.dim() {
        return Err(FcmError::structural(format!(
            "state has {} entries but the FCM has {} nodes",
            initial.len(),
            fcm.dim()
        )));
    }
    if max_steps == 0 {
        return Err(FcmError::domain("max_steps must be at least 1"));
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(FcmError::domain(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut traj = Vec::with_capacity(max_steps.min(1024) + 1);
    let mut state = initial.clone();
    for t in 0..=max_steps {
        let key = quantize(state.values(), tol);
        if let Some(&first) = seen.get(&key) {
            let cycle = traj.split_off(first);
            return Ok(Attractor::from_cycle(cycle, first));
        }
        seen.insert(key, t);
        let next = step_unchecked(&state, fcm, phi);
        traj.push(state);
        state = next;
    }
    Ok(Attractor::unresolved(max_steps))
}

/// Initial states for a basin census.
#[derive(Debug, Clone)]
pub enum InitialStates {
    Explicit(Vec<StateVector>),
    /// All `2^n` binary states, node 0 as the most significant bit.
    ExhaustiveBinary,
    RandomBinary {
        count: usize,
        seed: u64,
    },
    RandomUniform {
        count: usize,
        seed: u64,
    },
}

impl InitialStates {
    pub fn materialize(&self, n: usize) -> Result<Vec<StateVector>> {
        match self {
            InitialStates::Explicit(v) => Ok(v.clone()),
            InitialStates::ExhaustiveBinary => exhaustive_binary(n),
            InitialStates::RandomBinary { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..*count)
                    .map(|_| {
                        StateVector::from_raw(
                            (0..n)
                                .map(|_| if rng.gen::<bool>() { 1.0 } else { 0.0 })
                                .collect(),
                        )
                    })
                    .collect())
            }
            InitialStates::RandomUniform { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..*count)
                    .map(|_| StateVector::from_raw((0..n).map(|_| rng.gen::<f64>()).collect()))
                    .collect())
            }
        }
    }
}

/// Every binary state on `n` nodes in counting order.
pub fn exhaustive_binary(n: usize) -> Result<Vec<StateVector>> {
    if n > MAX_EXHAUSTIVE_NODES {
        return Err(FcmError::Resource(format!(
            "exhaustive enumeration of {n} nodes needs 2^{n} states (limit is {MAX_EXHAUSTIVE_NODES} nodes); use random sampling instead"
        )));
    }
    Ok((0..1usize << n)
        .map(|i| StateVector::from_raw((0..n).map(|j| ((i >> (n - 1 - j)) & 1) as f64).collect()))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Basin {
    pub attractor: Attractor,
    pub count: usize,
    /// First initial state (in input order) that reached this attractor.
    pub example: StateVector,
}

/// Partition of sampled initial states by the attractor they reach.
#[derive(Debug, Clone, PartialEq)]
pub struct BasinCensus {
    /// Ordered by attractor key.
    pub basins: Vec<Basin>,
    pub total: usize,
}

impl BasinCensus {
    pub fn find(&self, attractor: &Attractor) -> Option<&Basin> {
        self.basins.iter().find(|b| &b.attractor == attractor)
    }

    pub fn unresolved(&self) -> usize {
        self.basins
            .iter()
            .filter(|b| !b.attractor.is_resolved())
            .map(|b| b.count)
            .sum()
    }
}

pub fn basin_census(
    fcm: &EdgeMatrix,
    phi: &ThresholdFunction,
    initials: &InitialStates,
    max_steps: usize,
) -> Result<BasinCensus> {
    let states = initials.materialize(fcm.dim())?;
    let tol = phi.default_tolerance();
    let found: Vec<Attractor> = states
        .par_iter()
        .map(|s| find_attractor(s, fcm, phi, max_steps, tol))
        .collect::<Result<_>>()?;
    let mut groups: BTreeMap<AttractorKey, Basin> = BTreeMap::new();
    for (init, att) in states.iter().zip(found) {
        groups
            .entry(att.key(tol))
            .and_modify(|b| b.count += 1)
            .or_insert_with(|| Basin {
                attractor: Attractor {
                    transient: 0,
                    ..att
                },
                count: 1,
                example: init.clone(),
            });
    }
    Ok(BasinCensus {
        basins: groups.into_values().collect(),
        total: states.len(),
    })
}

/// Index maps that project two label sets onto shared observable nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableMap {
    pub names: Vec<String>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl ObservableMap {
    pub fn new<S: AsRef<str>>(
        names: &[S],
        a_labels: &[String],
        b_labels: &[String],
    ) -> Result<Self> {
        let lookup = |labels: &[String], name: &str, side: &str| {
            labels.iter().position(|l| l == name).ok_or_else(|| {
                FcmError::structural(format!("observable `{name}` missing from {side} labels"))
            })
        };
        let mut a = Vec::with_capacity(names.len());
        let mut b = Vec::with_capacity(names.len());
        for n in names {
            a.push(lookup(a_labels, n.as_ref(), "first")?);
            b.push(lookup(b_labels, n.as_ref(), "second")?);
        }
        Ok(ObservableMap {
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
            a,
            b,
        })
    }

    /// Labels present in both sets, in the order of `a_labels`.
    pub fn shared(a_labels: &[String], b_labels: &[String]) -> Self {
        let names: Vec<String> = a_labels
            .iter()
            .filter(|l| b_labels.contains(l))
            .cloned()
            .collect();
        Self::new(&names, a_labels, b_labels).expect("shared labels exist on both sides")
    }

    /// Same `n` nodes on both sides.
    pub fn identity(labels: &[String]) -> Self {
        Self::shared(labels, labels)
    }
}

fn project_cycle(att: &Attractor, idx: &[usize]) -> Vec<Vec<f64>> {
    let seq: Vec<Vec<f64>> = att
        .states
        .iter()
        .map(|s| idx.iter().map(|&i| s.values()[i]).collect())
        .collect();
    let period = minimal_period(&seq);
    seq[..period].to_vec()
}

/// Smallest `d` such that the cyclic sequence repeats with shift `d`.
pub(crate) fn minimal_period<T: PartialEq>(seq: &[T]) -> usize {
    let k = seq.len();
    (1..=k)
        .find(|&d| k.is_multiple_of(d) && (0..k).all(|i| seq[i] == seq[(i + d) % k]))
        .unwrap_or(k)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Mean per-node absolute difference between two cycles on the observable
/// nodes, minimised over relative phase after unrolling both to the least
/// common multiple of their projected periods.
pub fn cycle_distance(a: &Attractor, b: &Attractor, map: &ObservableMap) -> Result<f64> {
    if !a.is_resolved() || !b.is_resolved() {
        return Err(FcmError::domain("cannot compare an unresolved attractor"));
    }
    let m = map.names.len();
    if m == 0 {
        return Ok(0.0);
    }
    let pa = project_cycle(a, &map.a);
    let pb = project_cycle(b, &map.b);
    let (ka, kb) = (pa.len(), pb.len());
    let l = ka / gcd(ka, kb) * kb;
    let best = (0..kb)
        .map(|r| {
            let total: f64 = (0..l)
                .map(|i| {
                    pa[i % ka]
                        .iter()
                        .zip(&pb[(i + r) % kb])
                        .map(|(x, y)| (x - y).abs())
                        .sum::<f64>()
                })
                .sum();
            total / (l * m) as f64
        })
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

/// Structured text: a header line, then one state per line, `--` between cycles.
pub fn attractor_text(att: &Attractor, labels: &[String]) -> String {
    let mut out = format!(
        "# {} transient={} labels={}\n",
        att.kind_label(),
        att.transient,
        labels.join(",")
    );
    for s in &att.states {
        out.push_str(&s.to_csv());
        out.push('\n');
    }
    out
}

pub fn census_text(census: &BasinCensus, labels: &[String]) -> String {
    let mut out = format!(
        "# basins={} total={} labels={}\n",
        census.basins.len(),
        census.total,
        labels.join(",")
    );
    for (i, b) in census.basins.iter().enumerate() {
        if i > 0 {
            out.push_str("--\n");
        }
        let _ = writeln!(
            out,
            "# {} count={} example={}",
            b.attractor.kind_label(),
            b.count,
            b.example.to_csv()
        );
        for s in &b.attractor.states {
            out.push_str(&s.to_csv());
            out.push('\n');
        }
    }
    out
}

/// One row per basin: `basin,kind,period,count,fraction,states` with states
/// joined by `|` as bit strings.
pub fn census_csv(census: &BasinCensus) -> String {
    let mut out = String::from("basin,kind,period,count,fraction,states\n");
    for (i, b) in census.basins.iter().enumerate() {
        let states: Vec<String> = b.attractor.states.iter().map(|s| s.bit_string()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            i,
            b.attractor.kind_label(),
            b.attractor.period().unwrap_or(0),
            b.count,
            format_value(b.count as f64 / census.total.max(1) as f64),
            states.join("|")
        );
    }
    out
}

/// Trajectory as CSV, one row per step.
pub fn trajectory_csv(traj: &[StateVector], labels: &[String]) -> String {
    let mut out = format!("step,{}\n", labels.join(","));
    for (t, s) in traj.iter().enumerate() {
        let _ = writeln!(out, "{t},{}", s.to_csv());
    }
    out
}

/// Binary PGM raster: one row per node, one column per step, activation
/// scaled to 0..=255.
pub fn trajectory_pgm(traj: &[StateVector]) -> Vec<u8> {
    let width = traj.len();
    let height = traj.first().map_or(0, StateVector::len);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    for node in 0..height {
        for s in traj {
            out.push((s.values()[node].clamp(0.0, 1.0) * 255.0).round() as u8);
        }
    }
    out
}
