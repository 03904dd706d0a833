use serde::{Deserialize, Serialize};

use super::{Graph, Labelling, ModelParams, Sense};
use crate::{Error, Result};

/// Signed majority of `v`: same-label neighbors minus other-label neighbors,
/// negated for [`Sense::Disassortative`].
///
/// `v` has a majority of size `k` iff the margin is at least `k`; a margin
/// of zero or less is a minority.
pub fn majority_margin(g: &Graph, lab: &Labelling, v: usize, sense: Sense) -> i64 {
    let own = lab.sign(v);
    let raw: i64 = g
        .neighbors(v)
        .iter()
        .map(|&u| if lab.sign(u as usize) == own { 1 } else { -1 })
        .sum();
    raw * sense.sign()
}

/// Where the edge probability in the `V_eps` thresholds comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum EdgeDensity {
    /// Known generating parameters. The majority-side probability is used:
    /// `p` when assortative, `q` when disassortative.
    Model(ModelParams),
    /// Empirical density of majority-side pairs under the given labelling.
    Estimated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorityCensus {
    pub margins: Vec<i64>,
    pub minority_count: usize,
    /// Minorities carrying label `+1` and `-1` respectively.
    pub minority_by_label: [usize; 2],
    pub epsilon: f64,
    /// Nodes whose margin is below `epsilon * sqrt(n p ln n)` or whose degree
    /// exceeds `100 n p`, in increasing order.
    pub v_epsilon: Vec<usize>,
    /// Probability used for the `V_eps` thresholds.
    pub density: f64,
    pub density_source: DensitySource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensitySource {
    Model,
    Estimated,
}

impl MajorityCensus {
    pub fn is_minority(&self, v: usize) -> bool {
        self.margins[v] <= 0
    }

    pub fn minority_fraction(&self) -> f64 {
        if self.margins.is_empty() {
            return 0.0;
        }
        self.minority_count as f64 / self.margins.len() as f64
    }

    /// True when nodes of both labels have minorities.
    pub fn both_labels_have_minorities(&self) -> bool {
        self.minority_by_label[0] > 0 && self.minority_by_label[1] > 0
    }
}

/// Per-node majority margins, minority counts and the `V_eps` set.
///
/// `n` in the thresholds is half the node count and `ln` is the natural log.
pub fn census(
    g: &Graph,
    lab: &Labelling,
    sense: Sense,
    epsilon: f64,
    density: EdgeDensity,
) -> Result<MajorityCensus> {
    if lab.len() != g.num_nodes() {
        return Err(Error::LengthMismatch {
            left: lab.len(),
            right: g.num_nodes(),
        });
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be >= 0")));
    }
    let margins: Vec<i64> = (0..g.num_nodes())
        .map(|v| majority_margin(g, lab, v, sense))
        .collect();
    let mut minority_by_label = [0usize; 2];
    for (v, &m) in margins.iter().enumerate() {
        if m <= 0 {
            minority_by_label[usize::from(lab.sign(v) == -1)] += 1;
        }
    }

    let (p, density_source) = match density {
        EdgeDensity::Model(params) => (
            match sense {
                Sense::Assortative => params.p,
                Sense::Disassortative => params.q,
            },
            DensitySource::Model,
        ),
        EdgeDensity::Estimated => (estimate_density(g, lab, sense), DensitySource::Estimated),
    };
    let n = g.num_nodes() as f64 / 2.0;
    let log_n = if n > 1.0 { n.ln() } else { 0.0 };
    let margin_cut = epsilon * (n * p * log_n).sqrt();
    let degree_cut = 100.0 * n * p;
    let v_epsilon = (0..g.num_nodes())
        .filter(|&v| (margins[v] as f64) < margin_cut || g.degree(v) as f64 > degree_cut)
        .collect();

    Ok(MajorityCensus {
        minority_count: minority_by_label[0] + minority_by_label[1],
        minority_by_label,
        margins,
        epsilon,
        v_epsilon,
        density: p,
        density_source,
    })
}

/// Edge density among same-label pairs (assortative) or cross pairs
/// (disassortative). Zero when there are no such pairs.
fn estimate_density(g: &Graph, lab: &Labelling, sense: Sense) -> f64 {
    let plus = lab.plus_count() as f64;
    let minus = lab.len() as f64 - plus;
    let same_edges = g
        .edges()
        .filter(|&(u, v)| lab.sign(u) == lab.sign(v))
        .count() as f64;
    let (edges, pairs) = match sense {
        Sense::Assortative => (
            same_edges,
            plus * (plus - 1.0) / 2.0 + minus * (minus - 1.0) / 2.0,
        ),
        Sense::Disassortative => (g.num_edges() as f64 - same_edges, plus * minus),
    };
    if pairs > 0.0 {
        edges / pairs
    } else {
        0.0
    }
}
