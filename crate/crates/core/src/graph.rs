//! The stable-graph data model.
//!
//! Half-edges are not materialized: every external leg contributes one,
//! every internal edge two (both at the same vertex for a loop). A graph is
//! stored as a vertex list carrying `(genus, ext)` and a list of unordered
//! vertex pairs; the position of an edge in that list is its identifier.

use std::fmt;

use num::{BigUint, One};
use serde::{Deserialize, Serialize};

use crate::canon::{CanonicalKey, ColoredMultigraph};
use crate::error::{Error, Result};
use crate::rational::factorial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub genus: u32,
    /// Number of external legs attached here.
    pub ext: u32,
}

impl Vertex {
    pub fn new(genus: u32, ext: u32) -> Self {
        Vertex { genus, ext }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct StableGraph {
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
}

/// Wire form: `{"vertices":[{"genus":..,"ext":..}],"edges":[[u,v],...]}`.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<Vertex>,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for StableGraph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Self> {
        StableGraph::new(j.vertices, j.edges.into_iter().map(|[u, v]| (u, v)).collect())
    }
}

impl From<StableGraph> for GraphJson {
    fn from(g: StableGraph) -> Self {
        GraphJson {
            vertices: g.vertices,
            edges: g.edges.into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl StableGraph {
    /// Builds a graph, checking only that the indices make sense. Stability
    /// and connectivity are reported by [`is_stable`](Self::is_stable) and
    /// [`is_connected`](Self::is_connected).
    pub fn new(vertices: Vec<Vertex>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::structure("a graph needs at least one vertex"));
        }
        let n = vertices.len();
        let edges = edges
            .into_iter()
            .map(|(u, v)| {
                if u >= n || v >= n {
                    Err(Error::structure(format!(
                        "edge ({u},{v}) refers to a vertex outside 0..{n}"
                    )))
                } else {
                    Ok((u.min(v), u.max(v)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StableGraph { vertices, edges })
    }

    /// The stable vertex `Ver_{g,n}`: one vertex, no internal edges.
    pub fn stable_vertex(genus: u32, ext: u32) -> Self {
        StableGraph {
            vertices: vec![Vertex::new(genus, ext)],
            edges: Vec::new(),
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Total number of external legs.
    pub fn num_legs(&self) -> u32 {
        self.vertices.iter().map(|v| v.ext).sum()
    }

    pub fn loops_at(&self, v: usize) -> u32 {
        self.edges.iter().filter(|&&(a, b)| a == v && b == v).count() as u32
    }

    /// Number of half-edges at `v`: legs, non-loop edge ends, and two per loop.
    pub fn valence(&self, v: usize) -> u32 {
        let ends: u32 = self
            .edges
            .iter()
            .map(|&(a, b)| u32::from(a == v) + u32::from(b == v))
            .sum();
        self.vertices[v].ext + ends
    }

    pub fn num_half_edges(&self) -> usize {
        self.num_legs() as usize + 2 * self.num_edges()
    }

    pub fn is_vertex_stable(&self, v: usize) -> bool {
        2 * self.vertices[v].genus as i64 - 2 + self.valence(v) as i64 > 0
    }

    pub fn is_stable(&self) -> bool {
        (0..self.num_vertices()).all(|v| self.is_vertex_stable(v))
    }

    /// Connected components, each a sorted list of vertex indices.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        for &(u, v) in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for v in 0..n {
            let r = find(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = comps.len();
                comps.push(Vec::new());
            }
            comps[slot[r]].push(v);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// First Betti number `|E| - |V| + (#components)`.
    pub fn betti(&self) -> i64 {
        self.num_edges() as i64 - self.num_vertices() as i64 + self.components().len() as i64
    }

    /// Genus `h^1 + Σ g_v` of a connected graph; for `k` components the
    /// component genera are summed and `k - 1` subtracted, which may be
    /// negative.
    pub fn genus(&self) -> i64 {
        let k = self.components().len() as i64;
        let vertex_genus: i64 = self.vertices.iter().map(|v| v.genus as i64).sum();
        self.betti() + vertex_genus - k + 1
    }

    pub(crate) fn multigraph(&self) -> ColoredMultigraph {
        let labels = self.vertices.iter().map(|v| vec![v.genus, v.ext]).collect();
        ColoredMultigraph::new(labels, &self.edges)
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        self.multigraph().canonical().key
    }

    /// The canonical key together with the representative whose vertex
    /// order realizes it (edges sorted).
    pub fn canonical_form(&self) -> (CanonicalKey, StableGraph) {
        let canon = self.multigraph().canonical();
        (canon.key, self.permuted(&canon.order))
    }

    /// Relabels vertices so that new vertex `i` is old vertex `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> StableGraph {
        let mut position = vec![0usize; order.len()];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let vertices = order.iter().map(|&old| self.vertices[old]).collect();
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (position[u], position[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        StableGraph { vertices, edges }
    }

    pub fn is_isomorphic(&self, other: &StableGraph) -> bool {
        self.canonical_key() == other.canonical_key()
    }

    /// `|Aut(Γ)|` for a connected graph, counting vertex and half-edge
    /// bijections jointly with external legs permutable:
    /// `|Aut_vert| · Π mult(u,v)! · Π 2^{loops}·loops! · Π ext!`.
    pub fn aut_order(&self) -> Result<BigUint> {
        if !self.is_connected() {
            return Err(Error::domain("automorphism order requires a connected graph"));
        }
        let legs: BigUint = self
            .vertices
            .iter()
            .map(|v| factorial(v.ext))
            .fold(BigUint::one(), |a, b| a * b);
        Ok(self.edge_symmetry() * legs)
    }

    /// `|Aut_vert| · Π mult! · Π 2^ℓ ℓ!`: the automorphism count without
    /// the external-leg factor, for a vertex-color set given by `multigraph`.
    pub(crate) fn edge_symmetry_with(&self, multigraph: &ColoredMultigraph) -> BigUint {
        let n = self.num_vertices();
        let mut total = BigUint::from(multigraph.count_automorphisms());
        for u in 0..n {
            let loops = multigraph.multiplicity(u, u);
            total *= factorial(loops) << loops as usize;
            for v in u + 1..n {
                total *= factorial(multigraph.multiplicity(u, v));
            }
        }
        total
    }

    fn edge_symmetry(&self) -> BigUint {
        self.edge_symmetry_with(&self.multigraph())
    }

    /// Human-readable `g=[..] E=[..] ext=[..]` signature.
    pub fn signature(&self) -> String {
        let genera: Vec<String> = self.vertices.iter().map(|v| v.genus.to_string()).collect();
        let edges: Vec<String> = self.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
        let ext: Vec<String> = self.vertices.iter().map(|v| v.ext.to_string()).collect();
        format!(
            "g=[{}] E=[{}] ext=[{}]",
            genera.join(","),
            edges.join(","),
            ext.join(",")
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("graph serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        Ok(serde_json::from_value(value.clone())?)
    }
}

impl fmt::Display for StableGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.signature())
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn g(vertices: &[(u32, u32)], edges: &[(usize, usize)]) -> StableGraph {
        StableGraph::new(
            vertices.iter().map(|&(g, e)| Vertex::new(g, e)).collect(),
            edges.to_vec(),
        )
        .unwrap()
    }

    /// Two genus-0 vertices, one loop each, joined by an edge.
    pub fn dumbbell() -> StableGraph {
        g(&[(0, 0), (0, 0)], &[(0, 0), (1, 1), (0, 1)])
    }

    pub fn theta() -> StableGraph {
        g(&[(0, 0), (0, 0)], &[(0, 1), (0, 1), (0, 1)])
    }

    /// Genus-1 vertex joined to a genus-0 vertex carrying a loop.
    pub fn one_loop_bridge() -> StableGraph {
        g(&[(1, 0), (0, 0)], &[(0, 1), (1, 1)])
    }
}
