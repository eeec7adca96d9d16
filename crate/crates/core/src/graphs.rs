//! Circulant graphs and their joins.
//!
//! A circulant graph is stored by the 0/1 defining vector of its adjacency
//! matrix. Joining graphs connects every vertex of one part to every vertex
//! of the others, which produces a [`JoinSpec`] with all couplings equal to
//! one.

use std::f64::consts::PI;

use crate::circulant::CirculantMatrix;
use crate::dense::C64;
use crate::error::{Error, Result};
use crate::join::JoinSpec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CirculantGraph {
    connections: Vec<bool>,
    directed: bool,
}

impl CirculantGraph {
    /// `connections[j]` is true when vertex `r + j` links to vertex `r`
    /// (mod k), i.e. the adjacency matrix is `Circ(connections)`.
    pub fn new(connections: Vec<bool>, directed: bool) -> Result<Self> {
        let k = connections.len();
        if k == 0 {
            return Err(Error::EmptyBlock { block: 0 });
        }
        if connections[0] {
            return Err(Error::Precondition("circulant graphs have no self-loops (c_0 must be 0)".into()));
        }
        if !directed && (1..k).any(|j| connections[j] != connections[k - j]) {
            return Err(Error::Precondition("undirected circulant graph needs c_j == c_(k-j) for all j".into()));
        }
        Ok(Self { connections, directed })
    }

    pub fn size(&self) -> usize {
        self.connections.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn connections(&self) -> &[bool] {
        &self.connections
    }

    pub fn adjacency(&self) -> CirculantMatrix {
        CirculantMatrix::from_real(&self.connections.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect::<Vec<_>>())
            .expect("non-empty finite vector")
    }

    /// Out-degree, equal to the row sum of the adjacency matrix.
    pub fn valency(&self) -> usize {
        self.connections.iter().filter(|&&b| b).count()
    }
}

/// `K_n`: `Circ(0, 1, ..., 1)`.
pub fn complete_graph(n: usize) -> Result<CirculantGraph> {
    if n == 0 {
        return Err(Error::Precondition("complete graph needs n >= 1".into()));
    }
    CirculantGraph::new((0..n).map(|j| j != 0).collect(), false)
}

/// Directed `k`-cycle `1 -> 2 -> ... -> k -> 1`, with adjacency entries
/// `A[i][i+1] = 1` and `A[k][1] = 1`.
pub fn directed_cycle(k: usize) -> Result<CirculantGraph> {
    if k < 2 {
        return Err(Error::Precondition(format!("directed cycle needs k >= 2, got {k}")));
    }
    // A[r][r+1] = c_{(r - r - 1) mod k} = c_{k-1}
    let directed = k > 2;
    CirculantGraph::new((0..k).map(|j| j == k - 1).collect(), directed)
}

/// Ring graph: each of the `k` vertices on a circle is adjacent to its `m`
/// nearest neighbours on each side. Collapses to `K_k` when `k <= 2m + 1`.
pub fn ring_graph(k: usize, m: usize) -> Result<CirculantGraph> {
    if k == 0 || m == 0 {
        return Err(Error::Precondition(format!("ring graph needs k >= 1 and m >= 1, got k={k}, m={m}")));
    }
    if k <= 2 * m + 1 {
        return complete_graph(k);
    }
    CirculantGraph::new((0..k).map(|j| (1..=m).contains(&j) || j >= k - m).collect(), false)
}

/// Complement graph; adjacency `1 - I - A`.
pub fn complement(g: &CirculantGraph) -> CirculantGraph {
    let connections = g.connections.iter().enumerate().map(|(j, &b)| j != 0 && !b).collect();
    CirculantGraph { connections, directed: g.directed }
}

/// Join of the given graphs: every pair of vertices in different parts is
/// adjacent.
pub fn join(parts: &[CirculantGraph]) -> Result<JoinSpec> {
    if parts.is_empty() {
        return Err(Error::NoBlocks);
    }
    JoinSpec::uniform(parts.iter().map(CirculantGraph::adjacency).collect(), C64::new(1.0, 0.0))
}

/// The graph left after deleting a `k`-cycle from `K_n`, written as the join
/// of the `k` cycle vertices (with the cycle edges removed) and `K_{n-k}`.
pub fn remove_cycle_from_complete(n: usize, k: usize, directed: bool) -> Result<JoinSpec> {
    if k < 3 {
        return Err(Error::Precondition(format!("cycle length must be at least 3, got {k}")));
    }
    if n <= k {
        return Err(Error::Precondition(format!("need n > k, got n={n}, k={k}")));
    }
    let cycle_part = if directed { complement(&directed_cycle(k)?) } else { complement(&ring_graph(k, 1)?) };
    join(&[cycle_part, complete_graph(n - k)?])
}

/// The two condensed eigenvalues of `RG(k1, m1) + RG(k2, m2)` when both
/// parts are proper rings: `m1 + m2 +- sqrt((m1 - m2)^2 + k1 k2)`.
pub fn ring_join_condensed_eigenvalues(k1: usize, m1: usize, k2: usize, m2: usize) -> [f64; 2] {
    let (k1, m1, k2, m2) = (k1 as f64, m1 as f64, k2 as f64, m2 as f64);
    let root = ((m1 - m2).powi(2) + k1 * k2).sqrt();
    [m1 + m2 + root, m1 + m2 - root]
}

/// Condensed eigenvalues after removing a `k`-cycle from `K_n`:
/// `((n - 4) +- sqrt((n + 2)^2 - 8k)) / 2` for an undirected cycle and
/// `((n - 3) +- sqrt((n + 1)^2 - 4k)) / 2` for a directed one.
pub fn cycle_removal_condensed_eigenvalues(n: usize, k: usize, directed: bool) -> [f64; 2] {
    let (n, k) = (n as f64, k as f64);
    let (mid, disc) =
        if directed { (n - 3.0, (n + 1.0).powi(2) - 4.0 * k) } else { (n - 4.0, (n + 2.0).powi(2) - 8.0 * k) };
    let root = disc.sqrt();
    [(mid + root) / 2.0, (mid - root) / 2.0]
}

/// Closed-form spectrum of `K_n` minus a `k`-cycle: the Fourier sums
/// `sum_r w^{rj}` over the remaining cycle offsets for `j = 1..k-1`, then
/// `-1` with multiplicity `n - k - 1`, then the two condensed eigenvalues.
pub fn cycle_removal_spectrum(n: usize, k: usize, directed: bool) -> Vec<C64> {
    let offsets = if directed { 2..k } else { 2..k - 1 };
    let mut out: Vec<C64> = (1..k)
        .map(|j| offsets.clone().map(|r| C64::from_polar(1.0, 2.0 * PI * (r * j) as f64 / k as f64)).sum())
        .collect();
    out.extend(std::iter::repeat_n(C64::new(-1.0, 0.0), n - k - 1));
    out.extend(cycle_removal_condensed_eigenvalues(n, k, directed).map(|x| C64::new(x, 0.0)));
    out
}
