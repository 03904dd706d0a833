//! Replica accuracy boost followed by a single majority pass.
//!
//! [`replica_boost`] holds out each block of a random equipartition, labels
//! the rest with a black-box partitioner, aligns that labelling with a
//! reference, and labels the held-out block by neighbor majority.
//! [`majority_relabel`] then moves every node to the side most of its
//! neighbors occupy. [`recover`] chains spectral start, boost and relabel.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph_model::{induced_subgraph, Graph, Labelling, Sense};
use crate::seeds;
use crate::spectral::{top_two_eigenpairs, SenseEstimate, SpectralPartition};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicaConfig {
    /// Number of hold-out blocks; ignored when `use_paper_m` is set.
    pub m: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub use_paper_m: bool,
}

impl Default for ReplicaConfig {
    fn default() -> Self {
        ReplicaConfig {
            m: 10,
            epsilon: 0.5,
            seed: 0,
            use_paper_m: false,
        }
    }
}

impl ReplicaConfig {
    pub fn new(m: usize, epsilon: f64, seed: u64) -> Result<Self> {
        let cfg = ReplicaConfig {
            m,
            epsilon,
            seed,
            use_paper_m: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Block count taken from [`paper_m`].
    pub fn paper(epsilon: f64, seed: u64) -> Result<Self> {
        let m = paper_m(epsilon)?;
        let cfg = ReplicaConfig {
            m: usize::try_from(m)
                .map_err(|_| Error::InvalidParameter(format!("m = {m} overflows usize")))?,
            epsilon,
            seed,
            use_paper_m: true,
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive (got {})",
                self.epsilon
            )));
        }
        if !self.use_paper_m && self.m < 2 {
            return Err(Error::InvalidParameter(format!("m must be >= 2 (got {})", self.m)));
        }
        Ok(())
    }

    /// The block count actually used.
    pub fn effective_m(&self) -> Result<usize> {
        self.validate()?;
        if self.use_paper_m {
            let m = paper_m(self.epsilon)?;
            usize::try_from(m)
                .map_err(|_| Error::InvalidParameter(format!("m = {m} overflows usize")))
        } else {
            Ok(self.m)
        }
    }
}

fn paper_condition(m: u64, eps: f64) -> bool {
    let mf = m as f64;
    (1.0 - 2.0 / mf) * eps - 80.0 / mf.sqrt() >= eps / 2.0
}

/// Smallest `m` with `(1 - 2/m) eps - 80 / sqrt(m) >= eps / 2`.
///
/// The left side increases with `m` towards `eps`, so a doubling search
/// followed by bisection finds it.
pub fn paper_m(epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive (got {epsilon})"
        )));
    }
    let mut hi = 2u64;
    while !paper_condition(hi, epsilon) {
        hi = hi.checked_mul(2).ok_or_else(|| {
            Error::InvalidParameter(format!("no representable m for epsilon = {epsilon}"))
        })?;
    }
    let mut lo = hi / 2;
    if paper_condition(lo, epsilon) {
        return Ok(lo);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if paper_condition(mid, epsilon) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One black-box partition request.
#[derive(Debug, Clone, Copy)]
pub struct BbCall<'a> {
    pub graph: &'a Graph,
    /// Original node ids of `graph`'s nodes, in order.
    pub nodes: &'a [usize],
    /// 0 for the whole graph, `i + 1` for the graph without block `i`.
    pub index: usize,
}

/// Block of every node in a seeded random equipartition into `m` blocks.
/// Block sizes differ by at most one.
pub fn random_equipartition(num_nodes: usize, m: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..num_nodes).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut block = vec![0; num_nodes];
    for (j, &v) in order.iter().enumerate() {
        block[v] = j % m;
    }
    block
}

fn check_even(g: &Graph) -> Result<()> {
    if !g.num_nodes().is_multiple_of(2) {
        return Err(Error::InvalidGraph(format!(
            "node count {} is odd",
            g.num_nodes()
        )));
    }
    Ok(())
}

fn check_output(lab: &Labelling, expected: usize) -> Result<()> {
    if lab.len() != expected {
        return Err(Error::LengthMismatch {
            left: lab.len(),
            right: expected,
        });
    }
    Ok(())
}

/// `+1` when the neighbor counts favor the plus side under `sense`; ties go
/// to `-1`.
fn vote(plus: usize, minus: usize, sense: Sense) -> i8 {
    let wins = match sense {
        Sense::Assortative => plus > minus,
        Sense::Disassortative => plus < minus,
    };
    if wins {
        1
    } else {
        -1
    }
}

/// Replica accuracy boost.
///
/// Blocks are processed in parallel and merged by block index, so the output
/// depends only on `(g, sense, cfg)` and `bb`. Empty blocks (possible when
/// `m` exceeds the node count) are skipped.
pub fn replica_boost<F>(g: &Graph, sense: Sense, cfg: &ReplicaConfig, bb: F) -> Result<Labelling>
where
    F: Fn(BbCall<'_>) -> Result<Labelling> + Sync,
{
    check_even(g)?;
    let size = g.num_nodes();
    let half = size / 2;
    let m = cfg.effective_m()?;
    let block = random_equipartition(size, m, cfg.seed);

    let all: Vec<usize> = (0..size).collect();
    let reference = bb(BbCall {
        graph: g,
        nodes: &all,
        index: 0,
    })?;
    check_output(&reference, size)?;

    let used = m.min(size);
    let labelled: Vec<Result<Vec<(usize, i8)>>> = (0..used)
        .into_par_iter()
        .map(|i| {
            let keep: Vec<usize> = (0..size).filter(|&v| block[v] != i).collect();
            let (sub, map) = induced_subgraph(g, &keep)?;
            let lab = bb(BbCall {
                graph: &sub,
                nodes: &map,
                index: i + 1,
            })
            .and_then(|lab| check_output(&lab, map.len()).map(|_| lab))
            .map_err(|e| Error::Block {
                block: i,
                source: Box::new(e),
            })?;

            let disagree = map
                .iter()
                .enumerate()
                .filter(|&(j, &v)| lab.sign(j) != reference.sign(v))
                .count();
            let flip: i8 = if 2 * disagree >= half { -1 } else { 1 };

            let mut side = vec![0i8; size];
            for (j, &v) in map.iter().enumerate() {
                side[v] = flip * lab.sign(j);
            }
            Ok((0..size)
                .filter(|&v| block[v] == i)
                .map(|v| {
                    let (mut plus, mut minus) = (0, 0);
                    for &u in g.neighbors(v) {
                        match side[u as usize] {
                            1 => plus += 1,
                            -1 => minus += 1,
                            _ => {}
                        }
                    }
                    (v, vote(plus, minus, sense))
                })
                .collect())
        })
        .collect();

    let mut signs = vec![-1i8; size];
    for block_labels in labelled {
        for (v, s) in block_labels? {
            signs[v] = s;
        }
    }
    Labelling::new(signs)
}

/// One simultaneous majority pass: every node takes the side holding more
/// of its neighbors (fewer when disassortative); ties go to `-1`.
pub fn majority_relabel(g: &Graph, initial: &Labelling, sense: Sense) -> Result<Labelling> {
    check_output(initial, g.num_nodes())?;
    let signs = (0..g.num_nodes())
        .map(|v| {
            let plus = g.neighbors(v).iter().filter(|&&u| initial.sign(u as usize) == 1).count();
            vote(plus, g.degree(v) - plus, sense)
        })
        .collect();
    Labelling::new(signs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageErrors {
    pub spectral: Option<usize>,
    pub replica: Option<usize>,
    #[serde(rename = "final")]
    pub final_stage: Option<usize>,
}

/// Wall times in seconds. The spectral stage includes sense detection,
/// which shares its eigenpairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub spectral: f64,
    pub replica: f64,
    #[serde(rename = "final")]
    pub final_stage: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Spectral,
    Replica,
    Final,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub message: String,
}

/// Everything [`recover`] produced. Labellings of stages after a failure
/// are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryTrace {
    pub sense: Option<SenseEstimate>,
    pub spectral_labelling: Option<Labelling>,
    pub replica_labelling: Option<Labelling>,
    pub final_labelling: Option<Labelling>,
    /// Hamming distances to the hidden labelling, minimized over global
    /// sign. Only present when the hidden labelling was supplied.
    pub stage_errors: Option<StageErrors>,
    pub spectral_converged: bool,
    /// Replica subproblems whose power iteration hit the cap.
    pub replica_unconverged_blocks: usize,
    pub m: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub timings: StageTimings,
    pub failure: Option<StageFailure>,
}

impl RecoveryTrace {
    /// The last labelling produced.
    pub fn output(&self) -> Option<&Labelling> {
        self.final_labelling
            .as_ref()
            .or(self.replica_labelling.as_ref())
            .or(self.spectral_labelling.as_ref())
    }
}

const SPECTRAL_STREAM: u64 = 0;
const REPLICA_STREAM: u64 = 1;
const BLOCK_STREAM: u64 = 2;

/// Full pipeline: sense detection and spectral partition, replica boost with
/// the spectral partitioner as black box, then one majority pass.
///
/// The spectral labelling doubles as the replica reference. A spectral run
/// that hits the iteration cap is still used; the trace flags it. `hidden`
/// is only read for error accounting.
pub fn recover(g: &Graph, cfg: &ReplicaConfig, hidden: Option<&Labelling>) -> Result<RecoveryTrace> {
    check_even(g)?;
    if let Some(h) = hidden {
        check_output(h, g.num_nodes())?;
    }
    let m = cfg.effective_m()?;
    let started = Instant::now();
    let mut trace = RecoveryTrace {
        sense: None,
        spectral_labelling: None,
        replica_labelling: None,
        final_labelling: None,
        stage_errors: None,
        spectral_converged: false,
        replica_unconverged_blocks: 0,
        m,
        epsilon: cfg.epsilon,
        seed: cfg.seed,
        timings: StageTimings::default(),
        failure: None,
    };

    let clock = Instant::now();
    let spectral = if g.num_nodes() < 2 {
        Ok((
            SenseEstimate {
                sense: Sense::Assortative,
                low_confidence: true,
                lambda1: 0.0,
                lambda2: 0.0,
            },
            Labelling::from_plus_set(g.num_nodes(), |_| false),
            true,
        ))
    } else {
        top_two_eigenpairs(g, seeds::derive(cfg.seed, SPECTRAL_STREAM)).map(|(a, b)| {
            let part = SpectralPartition::from_pairs(&a, &b);
            (SenseEstimate::from_pairs(&a, &b), part.labelling, part.converged)
        })
    };
    trace.timings.spectral = clock.elapsed().as_secs_f64();
    let (sense, spectral_lab) = match spectral {
        Ok((sense, lab, converged)) => {
            trace.sense = Some(sense);
            trace.spectral_converged = converged;
            trace.spectral_labelling = Some(lab.clone());
            (sense.sense, lab)
        }
        Err(e) => return Ok(fail(trace, Stage::Spectral, e, started, hidden)),
    };

    let clock = Instant::now();
    let unconverged = AtomicUsize::new(0);
    let replica_cfg = ReplicaConfig {
        m,
        use_paper_m: false,
        seed: seeds::derive(cfg.seed, REPLICA_STREAM),
        ..*cfg
    };
    let boosted = replica_boost(g, sense, &replica_cfg, |call| {
        if call.index == 0 {
            return Ok(spectral_lab.clone());
        }
        let part = crate::spectral::bb_partition(
            call.graph,
            seeds::derive(cfg.seed, BLOCK_STREAM + call.index as u64),
        )?;
        if !part.converged {
            unconverged.fetch_add(1, Ordering::Relaxed);
        }
        Ok(part.labelling)
    });
    trace.timings.replica = clock.elapsed().as_secs_f64();
    trace.replica_unconverged_blocks = unconverged.into_inner();
    let replica_lab = match boosted {
        Ok(lab) => lab,
        Err(e) => return Ok(fail(trace, Stage::Replica, e, started, hidden)),
    };
    trace.replica_labelling = Some(replica_lab.clone());

    let clock = Instant::now();
    let relabelled = majority_relabel(g, &replica_lab, sense);
    trace.timings.final_stage = clock.elapsed().as_secs_f64();
    match relabelled {
        Ok(lab) => trace.final_labelling = Some(lab),
        Err(e) => return Ok(fail(trace, Stage::Final, e, started, hidden)),
    }
    trace.timings.total = started.elapsed().as_secs_f64();
    trace.stage_errors = stage_errors(&trace, hidden);
    Ok(trace)
}

fn fail(
    mut trace: RecoveryTrace,
    stage: Stage,
    e: Error,
    started: Instant,
    hidden: Option<&Labelling>,
) -> RecoveryTrace {
    trace.failure = Some(StageFailure {
        stage,
        message: e.to_string(),
    });
    trace.timings.total = started.elapsed().as_secs_f64();
    trace.stage_errors = stage_errors(&trace, hidden);
    trace
}

fn stage_errors(trace: &RecoveryTrace, hidden: Option<&Labelling>) -> Option<StageErrors> {
    let hidden = hidden?;
    let err = |lab: &Option<Labelling>| lab.as_ref().and_then(|l| l.sign_min_hamming(hidden).ok());
    Some(StageErrors {
        spectral: err(&trace.spectral_labelling),
        replica: err(&trace.replica_labelling),
        final_stage: err(&trace.final_labelling),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_model::overlap_error;

    fn two_cliques(k: usize) -> Graph {
        let mut edges = Vec::new();
        for base in [0, k] {
            for u in base..base + k {
                for v in u + 1..base + k {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(2 * k, &edges).unwrap()
    }

    fn components(k: usize) -> Labelling {
        Labelling::from_plus_set(2 * k, |v| v < k)
    }

    fn oracle<'a>(
        truth: &'a Labelling,
    ) -> impl Fn(BbCall<'_>) -> Result<Labelling> + Sync + 'a {
        move |call| Ok(truth.restrict(call.nodes))
    }

    #[test]
    fn paper_m_is_minimal() {
        for &eps in &[0.5, 1.0, 2.0, 0.1] {
            let m = paper_m(eps).unwrap();
            assert!(paper_condition(m, eps));
            assert!(!paper_condition(m - 1, eps));
        }
        assert!(paper_m(0.5).unwrap() > 100_000);
        assert!(paper_m(0.0).is_err());
    }

    #[test]
    fn equipartition_sizes() {
        let block = random_equipartition(23, 5, 9);
        let mut sizes = [0usize; 5];
        block.iter().for_each(|&b| sizes[b] += 1);
        assert_eq!(sizes.iter().sum::<usize>(), 23);
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn oracle_black_box_gives_hidden() {
        let g = two_cliques(8);
        let truth = components(8);
        for seed in 0..5 {
            let cfg = ReplicaConfig::new(4, 0.5, seed).unwrap();
            let got = replica_boost(&g, Sense::Assortative, &cfg, oracle(&truth)).unwrap();
            assert_eq!(got, truth);
        }
    }

    #[test]
    fn single_flip_is_outvoted() {
        // Two K6's; the black box always mislabels node 0 when it is present.
        let g = two_cliques(6);
        let truth = components(6);
        let bb = |call: BbCall<'_>| {
            let lab = truth.restrict(call.nodes);
            Ok(match call.nodes.iter().position(|&v| v == 0) {
                Some(j) => lab.flipped(j),
                None => lab,
            })
        };
        let (mut clean, mut tied) = (0, 0);
        for seed in 0..40 {
            let cfg = ReplicaConfig::new(3, 0.5, seed).unwrap();
            let got = replica_boost(&g, Sense::Assortative, &cfg, bb).unwrap();
            // A block made of four plus nodes other than 0 leaves each of them
            // with one correct neighbor and node 0 outside: a tie, sent to -1.
            let block = random_equipartition(12, 3, cfg.seed);
            let bad = (0..3).any(|i| (1..6).filter(|&v| block[v] == i).count() == 4);
            if bad {
                tied += 1;
                assert_ne!(got, truth);
            } else {
                clean += 1;
                assert_eq!(got, truth, "seed {seed}");
            }
        }
        assert!(clean > 0 && tied > 0);
    }

    #[test]
    fn alignment_undoes_global_sign() {
        let g = two_cliques(6);
        let truth = components(6);
        let bb = |call: BbCall<'_>| {
            let lab = truth.restrict(call.nodes);
            Ok(if call.index % 2 == 1 { lab.negated() } else { lab })
        };
        let cfg = ReplicaConfig::new(3, 0.5, 4).unwrap();
        assert_eq!(replica_boost(&g, Sense::Assortative, &cfg, bb).unwrap(), truth);
    }

    #[test]
    fn block_errors_carry_index() {
        let g = two_cliques(4);
        let cfg = ReplicaConfig::new(2, 0.5, 1).unwrap();
        let err = replica_boost(&g, Sense::Assortative, &cfg, |call: BbCall<'_>| {
            if call.index == 2 {
                Err(Error::NotConverged { iterations: 1 })
            } else {
                Ok(Labelling::from_plus_set(call.nodes.len(), |v| v % 2 == 0))
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::Block { block: 1, .. }));
    }

    #[test]
    fn relabel_fixes_one_flip() {
        let g = two_cliques(4);
        let truth = components(4);
        let got = majority_relabel(&g, &truth.flipped(0), Sense::Assortative).unwrap();
        assert_eq!(got, truth);
        assert_eq!(majority_relabel(&g, &truth, Sense::Assortative).unwrap(), truth);
        let neg = truth.negated();
        assert_eq!(majority_relabel(&g, &neg, Sense::Assortative).unwrap(), neg);
    }

    #[test]
    fn relabel_disassortative_bipartite() {
        // K_{3,3}: every node's neighbors sit on the other side.
        let mut edges = Vec::new();
        for u in 0..3 {
            for v in 3..6 {
                edges.push((u, v));
            }
        }
        let g = Graph::from_edges(6, &edges).unwrap();
        let truth = Labelling::from_plus_set(6, |v| v < 3);
        assert_eq!(majority_relabel(&g, &truth, Sense::Disassortative).unwrap(), truth);
        assert_eq!(
            majority_relabel(&g, &truth.flipped(4), Sense::Disassortative).unwrap(),
            truth
        );
    }

    #[test]
    fn relabel_ties_go_minus() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2)]).unwrap();
        let lab = Labelling::new(vec![1, 1, -1, -1]).unwrap();
        let got = majority_relabel(&g, &lab, Sense::Assortative).unwrap();
        assert_eq!(got.signs(), &[-1, 1, 1, -1]);
    }

    #[test]
    fn recover_two_cliques() {
        let g = two_cliques(8);
        let truth = components(8);
        let trace = recover(&g, &ReplicaConfig::default(), Some(&truth)).unwrap();
        let errs = trace.stage_errors.unwrap();
        assert_eq!(
            (errs.spectral, errs.replica, errs.final_stage),
            (Some(0), Some(0), Some(0))
        );
        let out = trace.final_labelling.as_ref().unwrap();
        assert_eq!(overlap_error(out, &truth).unwrap(), 0.0);
        assert!(trace.failure.is_none());
        let json = serde_json::to_string(&trace).unwrap();
        let back: RecoveryTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(back.final_labelling, trace.final_labelling);
    }

    #[test]
    fn recover_is_deterministic() {
        let g = two_cliques(6);
        let cfg = ReplicaConfig::new(3, 0.5, 77).unwrap();
        let a = recover(&g, &cfg, None).unwrap();
        let b = recover(&g, &cfg, None).unwrap();
        assert_eq!(a.final_labelling, b.final_labelling);
        assert_eq!(a.replica_labelling, b.replica_labelling);
        assert!(a.stage_errors.is_none());
    }

    #[test]
    fn recover_rejects_odd_graphs() {
        assert!(recover(&Graph::empty(5), &ReplicaConfig::default(), None).is_err());
    }
}
