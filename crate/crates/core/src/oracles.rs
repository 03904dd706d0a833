//! Exact ground truth for small instances: the planted-model likelihood,
//! brute-force MAP and minimum bisection, and the minority swap check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph_model::{majority_margin, Graph, Labelling, Sense};
use crate::{Error, Result};

/// Largest node count the enumerators accept.
pub const ENUMERATION_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodBreakdown {
    /// `ln Pr(G | sigma = tau)`; `-inf` when the graph is impossible.
    pub log_likelihood: f64,
    /// Same-label pairs `|A_tau|`.
    pub same_pairs: u64,
    /// Cross-label pairs `|B_tau|`.
    pub cross_pairs: u64,
    /// Edges inside `A_tau`.
    pub same_edges: u64,
    /// Edges inside `B_tau`.
    pub cross_edges: u64,
}

/// `k ln(x)` with `0 ln 0 = 0`.
fn xlog(k: u64, ln_x: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * ln_x
    }
}

fn from_counts(same_pairs: u64, cross_pairs: u64, same_edges: u64, cross_edges: u64, p: f64, q: f64) -> LikelihoodBreakdown {
    let log_likelihood = xlog(same_edges, p.ln())
        + xlog(cross_edges, q.ln())
        + xlog(same_pairs - same_edges, (-p).ln_1p())
        + xlog(cross_pairs - cross_edges, (-q).ln_1p());
    LikelihoodBreakdown {
        log_likelihood,
        same_pairs,
        cross_pairs,
        same_edges,
        cross_edges,
    }
}

fn check_prob(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("{name} = {x} is not in [0, 1]")));
    }
    Ok(())
}

fn check_len(g: &Graph, tau: &Labelling) -> Result<()> {
    if tau.len() != g.num_nodes() {
        return Err(Error::LengthMismatch {
            left: tau.len(),
            right: g.num_nodes(),
        });
    }
    Ok(())
}

fn choose2(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// `ln Pr(G | sigma = tau)` under the planted model with parameters `p`, `q`.
pub fn log_likelihood(g: &Graph, tau: &Labelling, p: f64, q: f64) -> Result<LikelihoodBreakdown> {
    check_len(g, tau)?;
    check_prob("p", p)?;
    check_prob("q", q)?;
    let plus = tau.plus_count() as u64;
    let minus = tau.len() as u64 - plus;
    let same_edges = g.edges().filter(|&(u, v)| tau.sign(u) == tau.sign(v)).count() as u64;
    Ok(from_counts(
        choose2(plus) + choose2(minus),
        plus * minus,
        same_edges,
        g.num_edges() as u64 - same_edges,
        p,
        q,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapResult {
    /// Every maximizer with node 0 labelled `+1`, in enumeration order.
    pub argmax: Vec<Labelling>,
    pub max_log_likelihood: f64,
    /// Number of balanced labellings examined (one per sign pair).
    pub examined: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectionResult {
    pub cut: u64,
    /// Every minimizer with node 0 labelled `+1`, in enumeration order.
    pub argmin: Vec<Labelling>,
    pub examined: u64,
}

fn check_enumerable(g: &Graph) -> Result<()> {
    let n = g.num_nodes();
    if n > ENUMERATION_CAP {
        return Err(Error::TooLarge {
            nodes: n,
            cap: ENUMERATION_CAP,
        });
    }
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidGraph(format!(
            "enumeration needs an even, positive node count (got {n})"
        )));
    }
    Ok(())
}

/// Plus-sets of all balanced labellings with node 0 in the plus set, as bit
/// masks in increasing order.
fn balanced_masks(size: usize) -> Vec<u32> {
    let half = size / 2;
    let rest = size - 1;
    let k = half - 1;
    let mut out = Vec::new();
    let limit = 1u32 << rest;
    let mut x: u32 = (1u32 << k) - 1;
    loop {
        out.push((x << 1) | 1);
        if k == 0 {
            break;
        }
        // Gosper's hack: next integer with the same popcount.
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
        if x >= limit {
            break;
        }
    }
    out
}

fn mask_labelling(size: usize, mask: u32) -> Labelling {
    Labelling::from_plus_set(size, |v| mask >> v & 1 == 1)
}

/// Edges with both ends on the same side, using per-node neighbor masks.
fn same_side_edges(adj: &[u32], mask: u32, full: u32) -> u64 {
    let minus = full & !mask;
    let twice: u32 = adj
        .iter()
        .enumerate()
        .map(|(v, &a)| {
            if mask >> v & 1 == 1 {
                (a & mask).count_ones()
            } else {
                (a & minus).count_ones()
            }
        })
        .sum();
    u64::from(twice / 2)
}

/// Maximum a posteriori balanced labellings by exhaustive enumeration.
///
/// All maximizers are returned; with `p == q` every balanced labelling ties.
pub fn map_bruteforce(g: &Graph, p: f64, q: f64) -> Result<MapResult> {
    check_enumerable(g)?;
    check_prob("p", p)?;
    check_prob("q", q)?;
    let size = g.num_nodes();
    let half = (size / 2) as u64;
    let adj: Vec<u32> = (0..size)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let full = if size == 32 { u32::MAX } else { (1u32 << size) - 1 };
    let edges = g.num_edges() as u64;
    let masks = balanced_masks(size);
    let same: Vec<u64> = masks.par_iter().map(|&m| same_side_edges(&adj, m, full)).collect();

    // The likelihood of a balanced labelling depends only on its same-side
    // edge count, so maximize over the distinct counts first.
    let mut distinct = same.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let ll = |e: u64| from_counts(half * (half - 1), half * half, e, edges - e, p, q).log_likelihood;
    let (best, winners): (f64, Vec<u64>) = if p == q {
        (ll(distinct[0]), distinct)
    } else {
        let best = distinct.iter().map(|&e| ll(e)).fold(f64::NEG_INFINITY, f64::max);
        (best, distinct.into_iter().filter(|&e| ll(e) == best).collect())
    };
    let argmax = masks
        .iter()
        .zip(&same)
        .filter(|(_, e)| winners.contains(e))
        .map(|(&m, _)| mask_labelling(size, m))
        .collect();
    Ok(MapResult {
        argmax,
        max_log_likelihood: best,
        examined: masks.len() as u64,
    })
}

/// Minimum bisection by exhaustive enumeration, counting cut edges from the
/// edge list.
pub fn min_bisection_bruteforce(g: &Graph) -> Result<BisectionResult> {
    check_enumerable(g)?;
    let size = g.num_nodes();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let masks = balanced_masks(size);
    let cuts: Vec<u64> = masks
        .par_iter()
        .map(|&m| {
            edges
                .iter()
                .filter(|&&(u, v)| (m >> u & 1) != (m >> v & 1))
                .count() as u64
        })
        .collect();
    let cut = *cuts.iter().min().expect("at least one bisection");
    let argmin = masks
        .iter()
        .zip(&cuts)
        .filter(|&(_, &c)| c == cut)
        .map(|(&m, _)| mask_labelling(size, m))
        .collect();
    Ok(BisectionResult {
        cut,
        argmin,
        examined: masks.len() as u64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapReport {
    /// Whether a `+1` minority and a `-1` minority coexist.
    pub pair_exists: bool,
    pub plus_minorities: usize,
    pub minus_minorities: usize,
    /// `(u, v)` with `tau_u = +1` and `tau_v = -1`.
    pub witness: Option<(usize, usize)>,
    pub adjacent: bool,
    pub margins: Option<(i64, i64)>,
    pub original: Option<LikelihoodBreakdown>,
    pub swapped: Option<LikelihoodBreakdown>,
    /// `swapped >= original` in log-likelihood; `None` without a pair.
    pub inequality_holds: Option<bool>,
}

/// Change in the same-side edge count when `u` (`+1`) and `v` (`-1`) trade
/// labels, expressed through their margins.
fn swap_gain(mu: i64, mv: i64, adjacent: bool, sense: Sense) -> i64 {
    let adj = 2 * i64::from(adjacent);
    match sense {
        Sense::Assortative => -(mu + mv) - adj,
        Sense::Disassortative => mu + mv - adj,
    }
}

/// Looks for a `+1` and a `-1` node that both have minorities under `tau`
/// and compares the likelihood before and after swapping their labels.
///
/// Among all such pairs the first (lexicographic) one whose swap cannot
/// lower the likelihood is reported. The only pairs that can lower it are
/// adjacent assortative pairs with margin sum above `-2`; one of those is
/// reported only when nothing else exists, and `inequality_holds` then
/// records the failure.
pub fn minority_swap_check(g: &Graph, tau: &Labelling, p: f64, q: f64, sense: Sense) -> Result<SwapReport> {
    check_len(g, tau)?;
    if p == q {
        return Err(Error::InvalidParameter("swap check needs p != q".into()));
    }
    if Sense::of_model(p, q) != sense {
        return Err(Error::InvalidParameter(format!(
            "sense {sense:?} contradicts p = {p}, q = {q}"
        )));
    }
    let margins: Vec<i64> = (0..g.num_nodes())
        .map(|v| majority_margin(g, tau, v, sense))
        .collect();
    let minorities = |s: i8| -> Vec<usize> {
        (0..g.num_nodes())
            .filter(|&v| tau.sign(v) == s && margins[v] <= 0)
            .collect()
    };
    let (plus, minus) = (minorities(1), minorities(-1));
    let mut report = SwapReport {
        pair_exists: !plus.is_empty() && !minus.is_empty(),
        plus_minorities: plus.len(),
        minus_minorities: minus.len(),
        witness: None,
        adjacent: false,
        margins: None,
        original: None,
        swapped: None,
        inequality_holds: None,
    };
    if !report.pair_exists {
        return Ok(report);
    }
    let pairs = plus.iter().flat_map(|&u| minus.iter().map(move |&v| (u, v)));
    let (u, v) = pairs
        .clone()
        .find(|&(u, v)| swap_gain(margins[u], margins[v], g.has_edge(u, v), sense) >= 0)
        .unwrap_or((plus[0], minus[0]));
    let original = log_likelihood(g, tau, p, q)?;
    let swapped = log_likelihood(g, &tau.swapped(u, v), p, q)?;
    report.witness = Some((u, v));
    report.adjacent = g.has_edge(u, v);
    report.margins = Some((margins[u], margins[v]));
    report.inequality_holds = Some(swapped.log_likelihood >= original.log_likelihood);
    report.original = Some(original);
    report.swapped = Some(swapped);
    Ok(report)
}
