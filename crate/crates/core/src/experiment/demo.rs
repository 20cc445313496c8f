//! Closure demonstrations: Markov chains are not closed under padded mixing,
//! FCMs are.

use std::fmt::Write as _;

use crate::error::Result;
use crate::fcm::{format_value, EdgeMatrix};
use crate::format::write_matrix;
use crate::mixing::{augment_and_mix, mix_stochastic, union_universe, StochasticMix};
use crate::presets::{closure_experts, markov_chains, markov_universe};

pub struct MarkovDemo {
    pub mix: StochasticMix,
    pub text: String,
}

pub fn demo_markov_nonclosure() -> Result<MarkovDemo> {
    let (chains, weights) = markov_chains();
    let mut text = String::from("Mixing three padded 2-state Markov chains\n\n");
    for ((c, w), i) in chains.iter().zip(weights).zip(1..) {
        let _ = writeln!(
            text,
            "chain {i} over {{{}}}, weight {w}: {:?}",
            c.labels().join(","),
            c.probs()
        );
    }
    let pairs: Vec<_> = chains.into_iter().zip(weights).collect();
    let mix = mix_stochastic(&pairs, &markov_universe())?;
    text.push_str("\nmixed matrix with row sums:\n");
    let _ = writeln!(text, "from,{},row_sum", mix.labels.join(","));
    for (i, l) in mix.labels.iter().enumerate() {
        let row: Vec<String> = (0..mix.labels.len())
            .map(|j| rounded(mix.get(i, j)))
            .collect();
        let _ = writeln!(text, "{l},{},{}", row.join(","), rounded(mix.row_sums[i]));
    }
    let _ = writeln!(
        text,
        "\nverdict: {}",
        if mix.is_stochastic {
            "stochastic"
        } else {
            "not stochastic"
        }
    );
    Ok(MarkovDemo { mix, text })
}

fn rounded(v: f64) -> String {
    format_value((v * 1e9).round() / 1e9)
}

pub struct ClosureDemo {
    pub mixture: EdgeMatrix,
    pub text: String,
}

pub fn demo_fcm_closure() -> Result<ClosureDemo> {
    let (experts, weights) = closure_experts();
    let universe = union_universe(experts.iter().map(|e| e.labels()));
    let pairs: Vec<_> = experts.into_iter().zip(weights).collect();
    let mixture = augment_and_mix(&pairs, &universe)?;
    let mut text = String::from("Mixing three padded 4-node FCMs\n\n");
    for ((m, w), i) in pairs.iter().zip(1..) {
        let _ = writeln!(text, "expert {i}, weight {}:", format_value(*w));
        text.push_str(&write_matrix(m));
    }
    text.push_str("\nmixture:\n");
    text.push_str(&write_matrix(&mixture));
    let bipolar = mixture.weights().iter().all(|w| (-1.0..=1.0).contains(w));
    let _ = writeln!(
        text,
        "\nverdict: {}",
        if bipolar {
            "every edge in [-1, 1]"
        } else {
            "out of range"
        }
    );
    Ok(ClosureDemo { mixture, text })
}
