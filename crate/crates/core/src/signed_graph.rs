//! Signed directed graphs: construction, switching transformations, and
//! structural tests for eventual positivity.
//!
//! A graph is stored as its dense signed adjacency matrix. Row `i` lists the
//! agents (or topics) that node `i` senses, so the in-degree of node `i` is
//! the number of nonzero entries in row `i`.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::error::{CoreError, Result};
use crate::spectral;

/// Relative tolerance below which an eigenvector entry counts as zero when
/// extracting a sign pattern.
pub const SIGN_ZERO_TOL: f64 = 1e-8;

/// A signed directed graph on `n` nodes, held as its dense adjacency matrix.
///
/// Invariants enforced at construction: the matrix is square, every entry is
/// finite, and the diagonal is exactly zero (self-influence is a model gain,
/// not an edge).
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph {
    n: usize,
    adjacency: DMatrix<f64>,
}

impl SignedGraph {
    /// Builds a graph from an explicit adjacency matrix.
    pub fn from_adjacency(adjacency: DMatrix<f64>) -> Result<Self> {
        let n = adjacency.nrows();
        if n == 0 {
            return Err(CoreError::Graph("graph must have at least one node".into()));
        }
        if adjacency.ncols() != n {
            return Err(CoreError::Graph(format!(
                "adjacency matrix must be square, got {}x{}",
                n,
                adjacency.ncols()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if !adjacency[(i, j)].is_finite() {
                    return Err(CoreError::Graph(format!("non-finite entry at ({}, {})", i + 1, j + 1)));
                }
            }
            if adjacency[(i, i)] != 0.0 {
                return Err(CoreError::Graph(format!(
                    "nonzero diagonal entry at node {} (self-loops are not allowed)",
                    i + 1
                )));
            }
        }
        Ok(Self { n, adjacency })
    }

    /// Builds a graph from a signed edge list with 1-based node indices.
    ///
    /// Edge `(i, k, w)` means node `i` senses node `k` with weight `w`.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::Graph("graph must have at least one node".into()));
        }
        let mut adjacency = DMatrix::zeros(n, n);
        let mut seen = BTreeSet::new();
        for &(i, k, w) in edges {
            if i == 0 || i > n || k == 0 || k > n {
                return Err(CoreError::Graph(format!(
                    "edge ({i}, {k}) out of range for {n} nodes"
                )));
            }
            if i == k {
                return Err(CoreError::Graph(format!("self-loop at node {i}")));
            }
            if !seen.insert((i, k)) {
                return Err(CoreError::Graph(format!("duplicate edge ({i}, {k})")));
            }
            if !w.is_finite() {
                return Err(CoreError::Graph(format!("non-finite weight on edge ({i}, {k})")));
            }
            adjacency[(i - 1, k - 1)] = w;
        }
        Ok(Self { n, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    /// True iff the adjacency matrix equals its transpose exactly.
    pub fn is_undirected(&self) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.adjacency[(i, j)] != self.adjacency[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    /// True iff some entry lies outside {-1, 0, +1}; such weights are valid
    /// but unusual for signed unweighted graphs, so callers may warn.
    pub fn has_nonunit_weights(&self) -> bool {
        self.adjacency
            .iter()
            .any(|&w| w != 0.0 && w != 1.0 && w != -1.0)
    }

    /// The graph with every edge reversed (adjacency transposed).
    pub fn reversed(&self) -> Self {
        Self {
            n: self.n,
            adjacency: self.adjacency.transpose(),
        }
    }
}

/// A diagonal gauge (switching) pattern with entries in {+1, -1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchingSigns(Vec<i8>);

impl SwitchingSigns {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(CoreError::Graph("switching pattern must be nonempty".into()));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(CoreError::Graph("switching entries must be +1 or -1".into()));
        }
        Ok(Self(signs))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        f64::from(self.0[i])
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    /// The globally negated pattern; switching by `-m` equals switching by `m`.
    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }
}

/// Directed cycle `1 -> 2 -> ... -> n -> 1` with +1 weights, except -1 on the
/// edges whose 1-based position appears in `negative_edges` (position `p` is
/// the edge from node `p` to its successor).
pub fn signed_cycle(n: usize, negative_edges: &BTreeSet<usize>) -> Result<SignedGraph> {
    if n < 2 {
        return Err(CoreError::Graph(format!("cycle needs at least 2 nodes, got {n}")));
    }
    if let Some(&p) = negative_edges.iter().find(|&&p| p == 0 || p > n) {
        return Err(CoreError::Graph(format!(
            "negative edge position {p} out of range 1..={n}"
        )));
    }
    let mut adjacency = DMatrix::zeros(n, n);
    for p in 1..=n {
        let w = if negative_edges.contains(&p) { -1.0 } else { 1.0 };
        adjacency[(p - 1, p % n)] = w;
    }
    SignedGraph::from_adjacency(adjacency)
}

/// Conjugates the adjacency by the switching matrix: entry `(i, k)` is
/// multiplied by `signs[i] * signs[k]`. An involution that preserves spectra.
pub fn switch_graph(g: &SignedGraph, m: &SwitchingSigns) -> Result<SignedGraph> {
    if m.len() != g.n() {
        return Err(CoreError::Dimension(format!(
            "switching pattern length {} does not match node count {}",
            m.len(),
            g.n()
        )));
    }
    let mut adjacency = g.adjacency().clone();
    for i in 0..g.n() {
        for k in 0..g.n() {
            adjacency[(i, k)] *= m.get(i) * m.get(k);
        }
    }
    SignedGraph::from_adjacency(adjacency)
}

/// Searches for a switching pattern `m` such that `M A M` is eventually
/// positive (the graph is eventually structurally balanced).
///
/// The candidate sign pattern is read off the right eigenvector of the
/// dominant eigenvalue; it is accepted only if the switched matrix passes the
/// full eventual-positivity test. Returns `None` when the spectrum rules the
/// transformation out (no simple, real, strictly dominant eigenvalue) or when
/// an eigenvector entry vanishes so no strict sign pattern exists.
pub fn find_switching_to_eventually_positive(g: &SignedGraph) -> Result<Option<SwitchingSigns>> {
    let spectrum = spectral::eig(g.adjacency())?;
    let Some(dom) = spectrum.strict_dominant_real_positive() else {
        return Ok(None);
    };
    let pair = &spectrum.pairs()[dom];

    let extract_signs = |v: &nalgebra::DVector<num_complex::Complex64>| -> Option<Vec<i8>> {
        let max_mod = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut signs = Vec::with_capacity(v.len());
        for z in v.iter() {
            if z.norm() <= SIGN_ZERO_TOL * max_mod || z.re.abs() <= SIGN_ZERO_TOL * max_mod {
                return None; // zero entry: no strict sign pattern
            }
            signs.push(if z.re > 0.0 { 1 } else { -1 });
        }
        Some(signs)
    };

    let Some(v_signs) = extract_signs(&pair.right) else {
        return Ok(None);
    };
    let Some(mut w_signs) = extract_signs(&pair.left) else {
        return Ok(None);
    };
    // Sign-align the left eigenvector (it is only defined up to global sign).
    if v_signs[0] != w_signs[0] {
        for s in &mut w_signs {
            *s = -*s;
        }
    }
    if v_signs != w_signs {
        return Ok(None);
    }

    let m = SwitchingSigns::new(v_signs)?;
    let switched = switch_graph(g, &m)?;
    if spectral::is_eventually_positive(switched.adjacency())? {
        Ok(Some(m))
    } else {
        Ok(None)
    }
}
