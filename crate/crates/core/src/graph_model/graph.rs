use crate::{Error, Result};

/// Undirected simple graph in compressed sparse row form.
///
/// Node ids are dense `0..num_nodes` and stored as `u32`. Every neighbor list is sorted
/// ascending without duplicates, there are no self-loops and adjacency is
/// symmetric. The only way to build one is through [`Graph::from_edges`]
/// (or the derived constructors in this module), all of which establish
/// those invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

/// Largest supported node count.
pub const MAX_NODES: usize = u32::MAX as usize;

impl Graph {
    /// Graph on `num_nodes` nodes with no edges.
    pub fn empty(num_nodes: usize) -> Self {
        Graph {
            offsets: vec![0; num_nodes + 1],
            targets: Vec::new(),
        }
    }

    /// Builds a graph from an undirected edge list.
    ///
    /// Each edge may be given in either orientation. Self-loops, duplicate
    /// edges and out-of-range endpoints are rejected.
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if num_nodes > MAX_NODES {
            return Err(Error::InvalidGraph(format!("{num_nodes} nodes exceed {MAX_NODES}")));
        }
        let mut degree = vec![0usize; num_nodes];
        for &(u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {num_nodes} nodes"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let graph = Self::fill(num_nodes, &degree, edges.iter().copied());
        for v in 0..num_nodes {
            if graph.neighbors(v).windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("duplicate edge at node {v}")));
            }
        }
        Ok(graph)
    }

    /// Counting-sort construction. Callers guarantee the edges are valid.
    fn fill(
        num_nodes: usize,
        degree: &[usize],
        edges: impl Iterator<Item = (usize, usize)>,
    ) -> Self {
        let mut offsets = Vec::with_capacity(num_nodes + 1);
        offsets.push(0);
        let mut acc = 0;
        for &d in degree {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets[..num_nodes].to_vec();
        let mut targets = vec![0u32; acc];
        for (u, v) in edges {
            targets[cursor[u]] = v as u32;
            cursor[u] += 1;
            targets[cursor[v]] = u as u32;
            cursor[v] += 1;
        }
        for v in 0..num_nodes {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Graph { offsets, targets }
    }

    /// Trusted constructor for edge streams that are already known to be
    /// simple (used by the generator and the derived-graph operations).
    pub(crate) fn from_simple_edges(num_nodes: usize, edges: &[(usize, usize)]) -> Self {
        let mut degree = vec![0usize; num_nodes];
        for &(u, v) in edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        Self::fill(num_nodes, &degree, edges.iter().copied())
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u32::try_from(v).is_ok_and(|v| self.neighbors(u).binary_search(&v).is_ok())
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Edges as `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// `y = A x` for the adjacency matrix `A`.
    pub fn mul_adjacency(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.num_nodes());
        assert_eq!(y.len(), self.num_nodes());
        for (v, out) in y.iter_mut().enumerate() {
            *out = self.neighbors(v).iter().map(|&u| x[u as usize]).sum();
        }
    }

    /// Checks every structural invariant by direct scan.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_nodes();
        if self.offsets[0] != 0 || *self.offsets.last().unwrap() != self.targets.len() {
            return Err(Error::InvalidGraph("offsets do not span targets".into()));
        }
        if self.offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidGraph("offsets not monotone".into()));
        }
        for v in 0..n {
            let nb = self.neighbors(v);
            if nb.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGraph(format!("list of {v} not strictly sorted")));
            }
            for &u in nb {
                let u = u as usize;
                if u >= n || u == v {
                    return Err(Error::InvalidGraph(format!("bad neighbor {u} of {v}")));
                }
                if !self.has_edge(u, v) {
                    return Err(Error::InvalidGraph(format!("asymmetric edge {v} -> {u}")));
                }
            }
        }
        Ok(())
    }
}

/// Subgraph induced by `keep`, relabelled contiguously.
///
/// `keep` may be in any order and may contain duplicates; it is sorted and
/// deduplicated first. The returned mapping sends new ids to original ids,
/// so `mapping[i]` is the original node behind new node `i`.
pub fn induced_subgraph(g: &Graph, keep: &[usize]) -> Result<(Graph, Vec<usize>)> {
    let mut mapping = keep.to_vec();
    mapping.sort_unstable();
    mapping.dedup();
    if let Some(&bad) = mapping.iter().find(|&&v| v >= g.num_nodes()) {
        return Err(Error::InvalidGraph(format!(
            "node {bad} not in graph of {} nodes",
            g.num_nodes()
        )));
    }
    let mut new_id = vec![u32::MAX; g.num_nodes()];
    for (i, &v) in mapping.iter().enumerate() {
        new_id[v] = i as u32;
    }
    let mut offsets = Vec::with_capacity(mapping.len() + 1);
    offsets.push(0);
    let mut targets = Vec::new();
    for &v in &mapping {
        // Original lists are sorted and `new_id` is monotone on kept nodes,
        // so the filtered lists stay sorted.
        targets.extend(
            g.neighbors(v)
                .iter()
                .map(|&u| new_id[u as usize])
                .filter(|&u| u != u32::MAX),
        );
        offsets.push(targets.len());
    }
    Ok((Graph { offsets, targets }, mapping))
}

/// Complement graph: `u ~ v` in the output iff `u != v` and `u !~ v` in `g`.
pub fn complement(g: &Graph) -> Graph {
    let n = g.num_nodes();
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut targets = Vec::with_capacity(n * n.saturating_sub(1) - g.targets.len());
    for v in 0..n {
        let mut nb = g.neighbors(v).iter().peekable();
        for u in 0..n as u32 {
            if nb.peek() == Some(&&u) {
                nb.next();
            } else if u as usize != v {
                targets.push(u);
            }
        }
        offsets.push(targets.len());
    }
    Graph { offsets, targets }
}
