//! The duality map `φ_{g,n}` on `V^c_{g,n}`.
//!
//! `φ(Γ)` replaces every vertex of `Γ` by the full Aut-weighted sum over
//! stable graphs of its `(genus, valence)` with named legs, reglues the
//! legs along the edges of `Γ`, forgets the names and multiplies by
//! `(-1)^{|E(Γ)|}`. The production path computes the same element from the
//! contraction poset as `(-1)^{|E(Γ)|} Σ_{Γ' ≤ Γ} ζ̃(Γ', Γ) Γ'`;
//! [`dotted_expand_direct`] performs the gluing literally.

use std::collections::HashMap;
use std::sync::Arc;

use num::{BigUint, One, Zero};

use crate::cache::CatalogCache;
use crate::canon::{CanonicalKey, ColoredMultigraph};
use crate::enumerate::{FormalSum, GraphCatalog};
use crate::error::{Error, Result};
use crate::graph::{StableGraph, Vertex};
use crate::poset::ContractionPoset;
use crate::rational::{factorial_q, from_biguint, sign, Rational};

/// A stable graph whose external legs carry the distinct names
/// `0..n`; `leg_vertex[name]` is the vertex holding that leg.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledStableGraph {
    graph: StableGraph,
    leg_vertex: Vec<usize>,
}

impl LabeledStableGraph {
    pub fn new(graph: StableGraph, leg_vertex: Vec<usize>) -> Result<Self> {
        let mut held = vec![0u32; graph.num_vertices()];
        for &v in &leg_vertex {
            if v >= graph.num_vertices() {
                return Err(Error::structure(format!("leg attached to missing vertex {v}")));
            }
            held[v] += 1;
        }
        if held.iter().zip(graph.vertices()).any(|(&h, vert)| h != vert.ext) {
            return Err(Error::structure("leg names do not match the ext counts"));
        }
        Ok(LabeledStableGraph { graph, leg_vertex })
    }

    pub fn graph(&self) -> &StableGraph {
        &self.graph
    }

    pub fn leg_vertex(&self) -> &[usize] {
        &self.leg_vertex
    }

    fn multigraph(&self) -> ColoredMultigraph {
        let labels = (0..self.graph.num_vertices())
            .map(|v| {
                let vert = self.graph.vertices()[v];
                let mut label = vec![vert.genus, vert.ext];
                label.extend(
                    (0..self.leg_vertex.len())
                        .filter(|&name| self.leg_vertex[name] == v)
                        .map(|name| name as u32),
                );
                label
            })
            .collect();
        ColoredMultigraph::new(labels, self.graph.edges())
    }

    /// Isomorphism class up to name-preserving isomorphism.
    pub fn canonical_key(&self) -> CanonicalKey {
        self.multigraph().canonical().key
    }

    /// Order of the automorphism group fixing every named leg.
    pub fn aut_order(&self) -> Result<BigUint> {
        if !self.graph.is_connected() {
            return Err(Error::domain("automorphism order requires a connected graph"));
        }
        Ok(self.graph.edge_symmetry_with(&self.multigraph()))
    }
}

/// `S_Γ`: the inequivalent ways of naming the legs of `graph`.
pub fn leg_namings(graph: &StableGraph) -> Vec<LabeledStableGraph> {
    fn assign(
        name: usize,
        capacity: &mut [u32],
        current: &mut Vec<usize>,
        graph: &StableGraph,
        seen: &mut HashMap<CanonicalKey, LabeledStableGraph>,
    ) {
        if name == current.capacity() {
            let labeled = LabeledStableGraph {
                graph: graph.clone(),
                leg_vertex: current.clone(),
            };
            seen.entry(labeled.canonical_key()).or_insert(labeled);
            return;
        }
        for v in 0..capacity.len() {
            if capacity[v] == 0 {
                continue;
            }
            capacity[v] -= 1;
            current.push(v);
            assign(name + 1, capacity, current, graph, seen);
            current.pop();
            capacity[v] += 1;
        }
    }
    let mut capacity: Vec<u32> = graph.vertices().iter().map(|v| v.ext).collect();
    let mut current = Vec::with_capacity(graph.num_legs() as usize);
    let mut seen = HashMap::new();
    assign(0, &mut capacity, &mut current, graph, &mut seen);
    let mut out: Vec<(CanonicalKey, LabeledStableGraph)> = seen.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, l)| l).collect()
}

/// Every connected stable graph of genus `g` with legs named `0..n`, with
/// its name-preserving automorphism order: the expansion of a dotted
/// vertex.
pub fn labeled_catalog(catalog: &GraphCatalog) -> Result<Vec<(LabeledStableGraph, BigUint)>> {
    let mut out = Vec::new();
    for graph in catalog.graphs() {
        for labeled in leg_namings(graph) {
            let aut = labeled.aut_order()?;
            out.push((labeled, aut));
        }
    }
    Ok(out)
}

/// `φ(Γ_index) = (-1)^{|E(Γ)|} Σ_{Γ' ≤ Γ} ζ̃(Γ', Γ) Γ'`.
pub fn duality_map(poset: &ContractionPoset, index: usize) -> FormalSum {
    let mut out = hat_g(poset, index);
    if poset.catalog().num_edges(index) % 2 == 1 {
        out = out.scaled(&-Rational::one());
    }
    out
}

/// `ĝ(Γ) = Σ_{Γ' ≤ Γ} ζ̃(Γ', Γ) Γ'`.
pub fn hat_g(poset: &ContractionPoset, index: usize) -> FormalSum {
    let cat = poset.catalog();
    let mut out = FormalSum::zero(cat.clone());
    for lower in 0..poset.len() {
        if poset.leq(lower, index) {
            let coeff = from_biguint(cat.aut(index)) / from_biguint(cat.aut(lower))
                * Rational::from_integer(poset.contraction_count(lower, index).into());
            out.add_term(lower, &coeff);
        }
    }
    out
}

/// `φ(Γ)` computed by cutting every edge, expanding each vertex over named
/// stable graphs, regluing and forgetting names.
pub fn dotted_expand_direct(graph: &StableGraph, cache: &CatalogCache) -> Result<FormalSum> {
    if !graph.is_connected() || !graph.is_stable() {
        return Err(Error::domain("dotted expansion needs a connected stable graph"));
    }
    let target = cache.catalog(graph.genus() as u32, graph.num_legs())?;

    // Local leg names at each vertex: first its external legs, then one
    // name per edge end in edge order (two for a loop).
    let nv = graph.num_vertices();
    let mut next_name = vec![0usize; nv];
    let mut leg_names: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for v in 0..nv {
        for _ in 0..graph.vertices()[v].ext {
            leg_names[v].push(next_name[v]);
            next_name[v] += 1;
        }
    }
    let mut edge_ends: Vec<(LegSlot, LegSlot)> = Vec::new();
    for &(u, v) in graph.edges() {
        let a = next_name[u];
        next_name[u] += 1;
        let b = next_name[v];
        next_name[v] += 1;
        edge_ends.push(((u, a), (v, b)));
    }

    let mut expansions: Vec<Vec<(LabeledStableGraph, Rational)>> = Vec::with_capacity(nv);
    for (v, &val) in next_name.iter().enumerate() {
        let cat = cache.catalog(graph.vertices()[v].genus, val as u32)?;
        expansions.push(
            labeled_catalog(&cat)?
                .into_iter()
                .map(|(l, aut)| (l, Rational::one() / from_biguint(&aut)))
                .collect(),
        );
    }

    let mut result = FormalSum::zero(target.clone());
    let mut choice = vec![0usize; nv];
    loop {
        let glued = glue(&expansions, &choice, &leg_names, &edge_ends)?;
        let coeff: Rational = (0..nv).map(|v| expansions[v][choice[v]].1.clone()).product();
        let index = target.index_of(&glued).ok_or_else(|| {
            Error::Inconsistent(format!("glued graph {glued} is not in the target catalog"))
        })?;
        result.add_term(index, &coeff);

        // odometer over the product of expansions
        let mut v = 0;
        loop {
            if v == nv {
                return Ok(result.scaled(&sign(graph.num_edges())));
            }
            choice[v] += 1;
            if choice[v] < expansions[v].len() {
                break;
            }
            choice[v] = 0;
            v += 1;
        }
    }
}

/// `(vertex of Γ, local leg name)` for one end of a cut edge.
type LegSlot = (usize, usize);

fn glue(
    expansions: &[Vec<(LabeledStableGraph, Rational)>],
    choice: &[usize],
    leg_names: &[Vec<usize>],
    edge_ends: &[(LegSlot, LegSlot)],
) -> Result<StableGraph> {
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut offset = Vec::with_capacity(choice.len());
    for (v, &c) in choice.iter().enumerate() {
        let piece = &expansions[v][c].0;
        offset.push(vertices.len());
        let base = vertices.len();
        vertices.extend(piece.graph.vertices().iter().map(|vert| Vertex::new(vert.genus, 0)));
        edges.extend(piece.graph.edges().iter().map(|&(a, b)| (a + base, b + base)));
    }
    let holder = |v: usize, name: usize| offset[v] + expansions[v][choice[v]].0.leg_vertex[name];
    for (v, names) in leg_names.iter().enumerate() {
        for &name in names {
            vertices[holder(v, name)].ext += 1;
        }
    }
    for &((u, a), (v, b)) in edge_ends {
        edges.push((holder(u, a), holder(v, b)));
    }
    StableGraph::new(vertices, edges)
}

/// Matrix of `φ` in the catalog basis: column `j` holds `φ(Γ_j)`.
#[allow(clippy::needless_range_loop)]
pub fn duality_matrix(poset: &ContractionPoset) -> Vec<Vec<Rational>> {
    let size = poset.len();
    let mut m = vec![vec![Rational::zero(); size]; size];
    for j in 0..size {
        for (i, q) in duality_map(poset, j).terms() {
            m[i][j] = q.clone();
        }
    }
    m
}

#[derive(Debug, Clone)]
pub struct InvolutionReport {
    pub g: u32,
    pub n: u32,
    pub size: usize,
    /// Entries of `M² - I` that are nonzero.
    pub failures: Vec<(usize, usize, Rational)>,
}

impl InvolutionReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `φ² = Id` exactly via the matrix of `φ`.
pub fn verify_involution(poset: &ContractionPoset) -> InvolutionReport {
    let m = duality_matrix(poset);
    let size = m.len();
    let mut failures = Vec::new();
    for i in 0..size {
        for j in 0..size {
            let mut entry: Rational = (0..size).map(|k| &m[i][k] * &m[k][j]).sum();
            if i == j {
                entry -= Rational::one();
            }
            if !entry.is_zero() {
                failures.push((i, j, entry));
            }
        }
    }
    InvolutionReport {
        g: poset.catalog().genus(),
        n: poset.catalog().legs(),
        size,
        failures,
    }
}

#[derive(Debug, Clone)]
pub struct DualitySumReport {
    pub lhs: FormalSum,
    pub expected: FormalSum,
}

impl DualitySumReport {
    pub fn holds(&self) -> bool {
        self.lhs == self.expected
    }
}

/// Checks `Σ_Γ (-1)^{|E(Γ)|} / |Aut Γ| · ĝ(Γ) = Ver_{g,n} / n!`.
pub fn verify_duality_sum(poset: &ContractionPoset) -> DualitySumReport {
    let cat: &Arc<GraphCatalog> = poset.catalog();
    let mut lhs = FormalSum::zero(cat.clone());
    for i in 0..poset.len() {
        let weight = sign(cat.num_edges(i)) / from_biguint(cat.aut(i));
        lhs.add_scaled(&hat_g(poset, i), &weight).expect("same catalog");
    }
    let mut expected = FormalSum::zero(cat.clone());
    expected.add_term(cat.vertex_index(), &(Rational::one() / factorial_q(cat.legs())));
    DualitySumReport { lhs, expected }
}
