use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A `±1` label per node.
///
/// `balanced` is set by the constructor that produced the value; when it is
/// true the signs sum to zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct Labelling {
    signs: Vec<i8>,
    balanced: bool,
}

impl Labelling {
    /// Any `±1` vector. The balanced flag is set iff the signs sum to zero.
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(i) = signs.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidLabelling(format!(
                "entry {i} is {} (expected +1 or -1)",
                signs[i]
            )));
        }
        let balanced = signs.iter().map(|&s| s as i64).sum::<i64>() == 0;
        Ok(Labelling { signs, balanced })
    }

    /// Like [`Labelling::new`] but fails unless the signs sum to zero.
    pub fn balanced(signs: Vec<i8>) -> Result<Self> {
        let lab = Self::new(signs)?;
        if !lab.balanced {
            return Err(Error::InvalidLabelling("signs do not sum to zero".into()));
        }
        Ok(lab)
    }

    /// Labels from a membership predicate: `true` maps to `+1`.
    pub fn from_plus_set(len: usize, is_plus: impl Fn(usize) -> bool) -> Self {
        let signs: Vec<i8> = (0..len).map(|v| if is_plus(v) { 1 } else { -1 }).collect();
        let balanced = signs.iter().map(|&s| s as i64).sum::<i64>() == 0;
        Labelling { signs, balanced }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn is_balanced(&self) -> bool {
        self.balanced
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    #[inline]
    pub fn sign(&self, v: usize) -> i8 {
        self.signs[v]
    }

    pub fn plus_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s == 1).count()
    }

    pub fn negated(&self) -> Self {
        Labelling {
            signs: self.signs.iter().map(|&s| -s).collect(),
            balanced: self.balanced,
        }
    }

    /// Copy with the labels of `u` and `v` exchanged.
    pub fn swapped(&self, u: usize, v: usize) -> Self {
        let mut out = self.clone();
        out.signs.swap(u, v);
        out
    }

    /// Copy with the label of `v` flipped. The result is never balanced.
    pub fn flipped(&self, v: usize) -> Self {
        let mut signs = self.signs.clone();
        signs[v] = -signs[v];
        Labelling {
            balanced: signs.iter().map(|&s| s as i64).sum::<i64>() == 0,
            signs,
        }
    }

    /// Restriction to the listed nodes, in the given order.
    pub fn restrict(&self, nodes: &[usize]) -> Self {
        Self::from_plus_set(nodes.len(), |i| self.signs[nodes[i]] == 1)
    }

    /// Number of disagreeing positions, minimized over the global sign.
    pub fn sign_min_hamming(&self, other: &Labelling) -> Result<usize> {
        check_len(self, other)?;
        let diff = self
            .signs
            .iter()
            .zip(&other.signs)
            .filter(|(a, b)| a != b)
            .count();
        Ok(diff.min(self.len() - diff))
    }
}

impl TryFrom<Vec<i8>> for Labelling {
    type Error = Error;

    fn try_from(signs: Vec<i8>) -> Result<Self> {
        Self::new(signs)
    }
}

impl From<Labelling> for Vec<i8> {
    fn from(lab: Labelling) -> Self {
        lab.signs
    }
}

fn check_len(a: &Labelling, b: &Labelling) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Overlap error `1 - |sum_i a_i b_i| / len`.
///
/// Symmetric and invariant under negating either argument. Zero iff
/// `b = ±a`. Empty labellings have error zero.
pub fn overlap_error(a: &Labelling, b: &Labelling) -> Result<f64> {
    check_len(a, b)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    let dot: i64 = a
        .signs
        .iter()
        .zip(&b.signs)
        .map(|(&x, &y)| (x * y) as i64)
        .sum();
    Ok(1.0 - dot.unsigned_abs() as f64 / a.len() as f64)
}

/// Whether edges prefer to stay inside a class (`p > q`) or to cross it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Assortative,
    Disassortative,
}

impl Sense {
    /// Sense of the generating model. `p == q` is reported as assortative.
    pub fn of_model(p: f64, q: f64) -> Self {
        if p >= q {
            Sense::Assortative
        } else {
            Sense::Disassortative
        }
    }

    /// `+1` for assortative, `-1` for disassortative.
    pub fn sign(self) -> i64 {
        match self {
            Sense::Assortative => 1,
            Sense::Disassortative => -1,
        }
    }
}
