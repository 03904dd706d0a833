//! Spectral partitioning on the adjacency operator.
//!
//! Eigenpairs come from power iteration with projection deflation; every
//! step is one sparse matrix-vector product, so the cost per iteration is
//! `O(|E|)`. The partitioner rounds the second eigenvector to a balanced
//! labelling by taking the largest half of its coordinates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph_model::{Graph, Labelling, PlantedInstance, Sense};
use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 10_000;
/// Convergence threshold on the max-norm change of the normalized iterate.
pub const TOLERANCE: f64 = 1e-10;
/// Fixed iteration count of the centered-norm estimate.
pub const NORM_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    /// Unit-norm eigenvector estimate.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `||A v - value v||_2`.
    pub residual: f64,
    pub converged: bool,
}

impl EigenPair {
    fn residual_tolerance(&self) -> f64 {
        1e-6 * self.value.abs().max(1.0)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: &mut [f64], s: f64) {
    a.iter_mut().for_each(|x| *x *= s);
}

fn project_out(x: &mut [f64], unit: &[f64]) {
    let c = dot(x, unit);
    x.iter_mut().zip(unit).for_each(|(xi, ui)| *xi -= c * ui);
}

fn max_abs_diff(a: &[f64], b: &[f64], sign: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - sign * y).abs())
        .fold(0.0, f64::max)
}

/// Adjacency operator, optionally restricted to the complement of a unit
/// vector.
struct Operator<'a> {
    graph: &'a Graph,
    deflate: Option<&'a [f64]>,
}

impl Operator<'_> {
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.graph.mul_adjacency(x, y);
        if let Some(u) = self.deflate {
            project_out(y, u);
        }
    }

    fn finish(&self, vector: Vec<f64>, iterations: usize, converged: bool) -> EigenPair {
        let mut av = vec![0.0; vector.len()];
        self.apply(&vector, &mut av);
        let value = dot(&vector, &av);
        av.iter_mut().zip(&vector).for_each(|(a, v)| *a -= value * v);
        EigenPair {
            value,
            residual: norm(&av),
            vector,
            iterations,
            converged,
        }
    }

    /// Power iteration from `start` for the eigenvalue of largest magnitude.
    fn power_iterate(&self, mut x: Vec<f64>) -> Option<EigenPair> {
        if let Some(u) = self.deflate {
            project_out(&mut x, u);
        }
        let len = norm(&x);
        if len == 0.0 {
            return None;
        }
        scale(&mut x, 1.0 / len);
        let mut y = vec![0.0; x.len()];
        let mut two_back = x.clone();
        for it in 1..=MAX_ITERATIONS {
            self.apply(&x, &mut y);
            let len = norm(&y);
            if len == 0.0 {
                // x is in the kernel: an exact eigenvector for 0.
                return Some(self.finish(x, it, true));
            }
            scale(&mut y, 1.0 / len);
            let change = max_abs_diff(&y, &x, 1.0).min(max_abs_diff(&y, &x, -1.0));
            let cycle = max_abs_diff(&y, &two_back, 1.0);
            std::mem::swap(&mut two_back, &mut x);
            std::mem::swap(&mut x, &mut y);
            if change < TOLERANCE {
                return Some(self.finish(x, it, true));
            }
            if it > 2 && cycle < TOLERANCE {
                // Two dominant eigenvalues +l and -l: the iterate alternates
                // inside their span, which Rayleigh-Ritz splits exactly.
                return Some(self.split_pair(x, it));
            }
        }
        Some(self.finish(x, MAX_ITERATIONS, false))
    }

    /// Rayleigh-Ritz on `span{x, A x}`; keeps the Ritz pair of larger
    /// magnitude (the positive one on an exact tie).
    fn split_pair(&self, x: Vec<f64>, iterations: usize) -> EigenPair {
        let mut ax = vec![0.0; x.len()];
        self.apply(&x, &mut ax);
        let h11 = dot(&x, &ax);
        let mut b2: Vec<f64> = ax.iter().zip(&x).map(|(a, v)| a - h11 * v).collect();
        let len = norm(&b2);
        if len == 0.0 {
            return self.finish(x, iterations, true);
        }
        scale(&mut b2, 1.0 / len);
        let mut ab2 = vec![0.0; x.len()];
        self.apply(&b2, &mut ab2);
        let h12 = dot(&x, &ab2);
        let h22 = dot(&b2, &ab2);
        let mid = 0.5 * (h11 + h22);
        let rad = (0.25 * (h11 - h22).powi(2) + h12 * h12).sqrt();
        let (hi, lo) = (mid + rad, mid - rad);
        let mu = if hi.abs() >= lo.abs() { hi } else { lo };
        let (c1, c2) = if (mu - h22).abs() >= (mu - h11).abs() {
            (mu - h22, h12)
        } else {
            (h12, mu - h11)
        };
        let mut v: Vec<f64> = x.iter().zip(&b2).map(|(a, b)| c1 * a + c2 * b).collect();
        let len = norm(&v);
        scale(&mut v, 1.0 / len);
        self.finish(v, iterations, true)
    }

    /// Runs once from `first`; on non-convergence restarts once from
    /// `second` and keeps whichever result has the smaller residual.
    fn solve(&self, first: Vec<f64>, second: Vec<f64>) -> Result<EigenPair> {
        let a = self.power_iterate(first);
        if let Some(pair) = &a {
            if pair.converged {
                return Ok(a.unwrap());
            }
        }
        let b = self.power_iterate(second);
        match (a, b) {
            (Some(a), Some(b)) => {
                let total = a.iterations + b.iterations;
                let mut best = if b.converged || b.residual < a.residual { b } else { a };
                best.iterations = total;
                Ok(best)
            }
            (Some(x), None) | (None, Some(x)) => Ok(x),
            (None, None) => Err(Error::InvalidParameter(
                "start vectors vanish after deflation".into(),
            )),
        }
    }
}

/// The two eigenpairs of largest magnitude of the adjacency matrix.
///
/// Start vectors are drawn from `seed`, so the result is deterministic.
/// Non-convergence within the iteration cap is reported through
/// [`EigenPair::converged`] together with the best iterate.
pub fn top_two_eigenpairs(g: &Graph, seed: u64) -> Result<(EigenPair, EigenPair)> {
    let n = g.num_nodes();
    if n < 2 {
        return Err(Error::InvalidGraph(format!(
            "need at least two nodes for two eigenpairs, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positive = || -> Vec<f64> { (0..n).map(|_| rng.gen_range(0.5..1.5)).collect() };
    let (s1, s1b) = (positive(), positive());
    let mut signed = || -> Vec<f64> { (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let (s2, s2b) = (signed(), signed());

    let first = Operator {
        graph: g,
        deflate: None,
    }
    .solve(s1, s1b)?;
    let mut second = Operator {
        graph: g,
        deflate: Some(&first.vector),
    }
    .solve(s2, s2b)?;
    // One more projection keeps the pair orthogonal to rounding error.
    project_out(&mut second.vector, &first.vector);
    let len = norm(&second.vector);
    scale(&mut second.vector, 1.0 / len);
    let mut resid = vec![0.0; n];
    g.mul_adjacency(&second.vector, &mut resid);
    resid
        .iter_mut()
        .zip(&second.vector)
        .for_each(|(r, v)| *r -= second.value * v);
    second.residual = norm(&resid);
    Ok((first, second))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SenseEstimate {
    pub sense: Sense,
    /// Set when the second eigenvalue is indistinguishable from zero or its
    /// power iteration did not converge.
    pub low_confidence: bool,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Sense from the sign of the second-largest-magnitude eigenvalue.
pub fn detect_sense(g: &Graph, seed: u64) -> Result<SenseEstimate> {
    let (first, second) = top_two_eigenpairs(g, seed)?;
    Ok(SenseEstimate::from_pairs(&first, &second))
}

impl SenseEstimate {
    pub fn from_pairs(first: &EigenPair, second: &EigenPair) -> Self {
        let tie = second.value.abs() < second.residual_tolerance().max(second.residual);
        SenseEstimate {
            sense: if second.value < 0.0 && !tie {
                Sense::Disassortative
            } else {
                Sense::Assortative
            },
            low_confidence: tie || !second.converged,
            lambda1: first.value,
            lambda2: second.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPartition {
    pub labelling: Labelling,
    pub lambda2: f64,
    pub converged: bool,
}

/// Balanced spectral partition: the `floor(N/2)` largest coordinates of the
/// second eigenvector get `+1` (ties broken by node index), the rest `-1`.
///
/// Exactly balanced on even node counts. Odd counts (which arise on
/// hold-out subgraphs) get one more `-1` than `+1`.
pub fn bb_partition(g: &Graph, seed: u64) -> Result<SpectralPartition> {
    let n = g.num_nodes();
    if n < 2 {
        return Ok(SpectralPartition {
            labelling: Labelling::from_plus_set(n, |_| false),
            lambda2: 0.0,
            converged: true,
        });
    }
    let (first, second) = top_two_eigenpairs(g, seed)?;
    Ok(SpectralPartition::from_pairs(&first, &second))
}

impl SpectralPartition {
    pub fn from_pairs(first: &EigenPair, second: &EigenPair) -> Self {
        SpectralPartition {
            labelling: round_top_half(&second.vector),
            lambda2: second.value,
            converged: first.converged && second.converged,
        }
    }
}

/// `+1` on the `floor(len/2)` largest entries, ties to the smaller index.
pub fn round_top_half(vector: &[f64]) -> Labelling {
    let mut order: Vec<usize> = (0..vector.len()).collect();
    order.sort_by(|&a, &b| vector[b].total_cmp(&vector[a]).then(a.cmp(&b)));
    let mut plus = vec![false; vector.len()];
    for &v in &order[..vector.len() / 2] {
        plus[v] = true;
    }
    Labelling::from_plus_set(vector.len(), |v| plus[v])
}

/// Lower-bound estimate of `||A - E[A | sigma]||` by power iteration on the
/// centered operator.
///
/// `E[A | sigma] = ((p+q)/2) 1 1^T + ((p-q)/2) sigma sigma^T`, diagonal
/// included, is applied as a rank-2 correction. With `p = q = 1` the
/// centered matrix is `-I` and the estimate is exactly 1.
pub fn centered_norm_estimate(inst: &PlantedInstance, seed: u64) -> f64 {
    let g = &inst.graph;
    let n = g.num_nodes();
    if n == 0 {
        return 0.0;
    }
    let (p, q) = (inst.params.p, inst.params.q);
    let sigma: Vec<f64> = inst.hidden.signs().iter().map(|&s| s as f64).collect();
    let apply = |x: &[f64], y: &mut [f64]| {
        g.mul_adjacency(x, y);
        let ones = 0.5 * (p + q) * x.iter().sum::<f64>();
        let along = 0.5 * (p - q) * dot(&sigma, x);
        y.iter_mut()
            .zip(&sigma)
            .for_each(|(yi, si)| *yi -= ones + along * si);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let len = norm(&x);
    scale(&mut x, 1.0 / len);
    let mut y = vec![0.0; n];
    let mut best: f64 = 0.0;
    for _ in 0..NORM_ITERATIONS {
        apply(&x, &mut y);
        let len = norm(&y);
        best = best.max(len);
        if len == 0.0 {
            break;
        }
        scale(&mut y, 1.0 / len);
        std::mem::swap(&mut x, &mut y);
    }
    best
}
