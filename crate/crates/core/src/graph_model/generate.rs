use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, Labelling};
use crate::{Error, Result};

/// Parameters of the planted bisection model on `2n` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Nodes per class.
    pub n: usize,
    /// Within-class edge probability.
    pub p: f64,
    /// Cross-class edge probability.
    pub q: f64,
}

impl ModelParams {
    pub fn new(n: usize, p: f64, q: f64) -> Result<Self> {
        let params = ModelParams { n, p, q };
        params.validate()?;
        Ok(params)
    }

    /// `p = a ln n / n`, `q = b ln n / n`.
    pub fn from_log_scaled(n: usize, a: f64, b: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "log scaling needs n >= 2, got {n}"
            )));
        }
        let scale = (n as f64).ln() / n as f64;
        Self::new(n, a * scale, b * scale)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        for (name, x) in [("p", self.p), ("q", self.q)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidParameter(format!("{name} = {x} not in [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        2 * self.n
    }
}

/// A sampled graph together with the hidden balanced labelling behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedInstance {
    pub graph: Graph,
    pub hidden: Labelling,
    pub params: ModelParams,
    pub seed: u64,
}

/// Samples `(G, sigma)` from the planted bisection model.
///
/// The hidden labelling is a seeded shuffle of `n` pluses and `n` minuses.
/// Edges are drawn by geometric skip-sampling over three pair streams
/// (within the plus class, within the minus class, across), so the cost is
/// `O(n + |E|)` at any density. Identical `(params, seed)` give identical
/// instances.
pub fn generate(params: ModelParams, seed: u64) -> Result<PlantedInstance> {
    params.validate()?;
    let n = params.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut signs: Vec<i8> = std::iter::repeat_n(1, n).chain(std::iter::repeat_n(-1, n)).collect();
    signs.shuffle(&mut rng);
    let hidden = Labelling::balanced(signs)?;

    let plus: Vec<usize> = (0..2 * n).filter(|&v| hidden.sign(v) == 1).collect();
    let minus: Vec<usize> = (0..2 * n).filter(|&v| hidden.sign(v) == -1).collect();

    let mut edges = Vec::new();
    for class in [&plus, &minus] {
        let mut rows = TriangleWalker::new(class.len());
        skip_sample(pairs(class.len()), params.p, &mut rng, |idx| {
            let (i, j) = rows.locate(idx);
            edges.push((class[i], class[j]));
        });
    }
    let cross = (n as u64) * (n as u64);
    skip_sample(cross, params.q, &mut rng, |idx| {
        edges.push((plus[(idx / n as u64) as usize], minus[(idx % n as u64) as usize]));
    });

    Ok(PlantedInstance {
        graph: Graph::from_simple_edges(2 * n, &edges),
        hidden,
        params,
        seed,
    })
}

fn pairs(k: usize) -> u64 {
    let k = k as u64;
    k * k.saturating_sub(1) / 2
}

/// Calls `hit` with the index of every success in a stream of `total`
/// independent Bernoulli(`prob`) trials, jumping between successes with
/// geometric gaps.
fn skip_sample<R: Rng>(total: u64, prob: f64, rng: &mut R, mut hit: impl FnMut(u64)) {
    if prob <= 0.0 || total == 0 {
        return;
    }
    if prob >= 1.0 {
        (0..total).for_each(hit);
        return;
    }
    let log_fail = (-prob).ln_1p();
    let mut next: u64 = 0;
    loop {
        // 1 - u lies in (0, 1], so the logarithm is finite.
        let u: f64 = rng.gen();
        let gap = ((1.0 - u).ln() / log_fail).floor();
        if gap >= (total - next) as f64 {
            return;
        }
        next += gap as u64;
        hit(next);
        next += 1;
        if next >= total {
            return;
        }
    }
}

/// Maps increasing lexicographic pair indices to `(i, j)` with `i < j`.
struct TriangleWalker {
    row: usize,
    row_start: u64,
    row_len: u64,
}

impl TriangleWalker {
    fn new(k: usize) -> Self {
        TriangleWalker {
            row: 0,
            row_start: 0,
            row_len: k.saturating_sub(1) as u64,
        }
    }

    fn locate(&mut self, idx: u64) -> (usize, usize) {
        while idx >= self.row_start + self.row_len {
            self.row_start += self.row_len;
            self.row += 1;
            self.row_len -= 1;
        }
        (self.row, self.row + 1 + (idx - self.row_start) as usize)
    }
}
