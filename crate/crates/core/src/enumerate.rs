//! Enumeration of `G^c_{g,n}` and formal sums over it.
//!
//! Every connected stable graph contracts to the stable vertex, so the
//! catalog is the closure of `Ver_{g,n}` under the two inverse contractions:
//! splitting a vertex in two along a new edge, and trading one unit of
//! vertex genus for a loop.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use num::{BigUint, One, Zero};
use serde::{Deserialize, Serialize};

use crate::canon::CanonicalKey;
use crate::error::{Error, Result};
use crate::euler_grade;
use crate::graph::{StableGraph, Vertex};
use crate::rational::{format_rational, from_biguint, parse_rational, Rational};

/// The connected stable graphs of genus `g` with `n` legs, one canonical
/// representative per isomorphism class, ordered by `(|E|, key)`. Index 0
/// is always `Ver_{g,n}`.
#[derive(Debug, Clone)]
pub struct GraphCatalog {
    g: u32,
    n: u32,
    graphs: Vec<StableGraph>,
    keys: Vec<CanonicalKey>,
    auts: Vec<BigUint>,
    index: HashMap<CanonicalKey, usize>,
}

/// On-disk form of a catalog.
#[derive(Debug, Serialize, Deserialize)]
pub struct CatalogFile {
    pub g: u32,
    pub n: u32,
    pub graphs: Vec<StableGraph>,
    /// `|Aut|` of each graph as a decimal string, parallel to `graphs`.
    pub aut: Vec<String>,
}

pub fn check_stable_pair(g: u32, n: u32) -> Result<()> {
    if euler_grade(g, n) <= 0 {
        return Err(Error::domain(format!(
            "(g,n) = ({g},{n}) is unstable: 2g-2+n must be positive"
        )));
    }
    Ok(())
}

pub fn enumerate(g: u32, n: u32) -> Result<GraphCatalog> {
    check_stable_pair(g, n)?;
    let mut seen: HashMap<CanonicalKey, StableGraph> = HashMap::new();
    let mut queue = VecDeque::new();
    let (key, root) = StableGraph::stable_vertex(g, n).canonical_form();
    seen.insert(key, root.clone());
    queue.push_back(root);
    while let Some(graph) = queue.pop_front() {
        for child in degenerations(&graph) {
            let (key, rep) = child.canonical_form();
            if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(key) {
                slot.insert(rep.clone());
                queue.push_back(rep);
            }
        }
    }
    GraphCatalog::from_canonical(g, n, seen.into_iter().collect())
}

/// All graphs obtained from `graph` by one loop insertion or vertex split
/// (unreduced: isomorphic results appear repeatedly).
pub fn degenerations(graph: &StableGraph) -> Vec<StableGraph> {
    let mut out = Vec::new();
    for v in 0..graph.num_vertices() {
        let vert = graph.vertices()[v];
        if vert.genus >= 1 {
            let mut vertices = graph.vertices().to_vec();
            vertices[v].genus -= 1;
            let mut edges = graph.edges().to_vec();
            edges.push((v, v));
            out.push(StableGraph::new(vertices, edges).expect("indices stay in range"));
        }
        split_vertex(graph, v, &mut out);
    }
    out
}

/// Replaces `v` by `v` and a new vertex `w` joined by a new edge, over
/// every distribution of genus, legs, loops and edge ends in which both
/// halves stay stable. Parallel edges and loops are treated as distinct
/// slots; duplicates are left to the caller.
fn split_vertex(graph: &StableGraph, v: usize, out: &mut Vec<StableGraph>) {
    let vert = graph.vertices()[v];
    let w = graph.num_vertices();
    let loops: Vec<usize> = (0..graph.num_edges())
        .filter(|&e| graph.edges()[e] == (v, v))
        .collect();
    let ends: Vec<usize> = (0..graph.num_edges())
        .filter(|&e| {
            let (a, b) = graph.edges()[e];
            (a == v) != (b == v)
        })
        .collect();
    let loop_choices = 3usize.pow(loops.len() as u32);
    let end_choices = 1usize << ends.len();
    for genus_v in 0..=vert.genus {
        for ext_v in 0..=vert.ext {
            for mut loop_code in 0..loop_choices {
                for end_mask in 0..end_choices {
                    let mut vertices = graph.vertices().to_vec();
                    vertices[v] = Vertex::new(genus_v, ext_v);
                    vertices.push(Vertex::new(vert.genus - genus_v, vert.ext - ext_v));
                    let mut edges = graph.edges().to_vec();
                    for &e in &loops {
                        edges[e] = match loop_code % 3 {
                            0 => (v, v),
                            1 => (w, w),
                            _ => (v, w),
                        };
                        loop_code /= 3;
                    }
                    for (bit, &e) in ends.iter().enumerate() {
                        if end_mask >> bit & 1 == 1 {
                            let (a, b) = edges[e];
                            edges[e] = if a == v { (b, w) } else { (a, w) };
                        }
                    }
                    edges.push((v, w));
                    let child = StableGraph::new(vertices, edges).expect("indices stay in range");
                    if child.is_vertex_stable(v) && child.is_vertex_stable(w) {
                        out.push(child);
                    }
                }
            }
        }
    }
}

impl GraphCatalog {
    fn from_canonical(g: u32, n: u32, entries: Vec<(CanonicalKey, StableGraph)>) -> Result<Self> {
        let mut entries = entries;
        entries.sort_by(|(ka, a), (kb, b)| a.num_edges().cmp(&b.num_edges()).then_with(|| ka.cmp(kb)));
        let mut catalog = GraphCatalog {
            g,
            n,
            graphs: Vec::with_capacity(entries.len()),
            keys: Vec::with_capacity(entries.len()),
            auts: Vec::with_capacity(entries.len()),
            index: HashMap::with_capacity(entries.len()),
        };
        for (i, (key, graph)) in entries.into_iter().enumerate() {
            catalog.auts.push(graph.aut_order()?);
            catalog.index.insert(key.clone(), i);
            catalog.keys.push(key);
            catalog.graphs.push(graph);
        }
        Ok(catalog)
    }

    /// Rebuilds a catalog from stored graphs and automorphism orders,
    /// re-deriving keys and checking every stored value.
    pub fn from_file(file: CatalogFile) -> Result<Self> {
        check_stable_pair(file.g, file.n)?;
        if file.graphs.len() != file.aut.len() {
            return Err(Error::Inconsistent("graph and aut arrays differ in length".into()));
        }
        let mut entries = Vec::with_capacity(file.graphs.len());
        for graph in &file.graphs {
            if !graph.is_stable()
                || !graph.is_connected()
                || graph.genus() != file.g as i64
                || graph.num_legs() != file.n
            {
                return Err(Error::Inconsistent(format!(
                    "stored graph {graph} is not in G^c_({},{})",
                    file.g, file.n
                )));
            }
            entries.push(graph.canonical_form());
        }
        let catalog = GraphCatalog::from_canonical(file.g, file.n, entries)?;
        if catalog.index.len() != file.graphs.len() {
            return Err(Error::Inconsistent("stored catalog has duplicate graphs".into()));
        }
        for (graph, aut) in file.graphs.iter().zip(&file.aut) {
            let i = catalog.index_of(graph).expect("inserted above");
            if catalog.auts[i].to_string() != *aut {
                return Err(Error::Inconsistent(format!(
                    "stored |Aut| {aut} disagrees with {} for {graph}",
                    catalog.auts[i]
                )));
            }
        }
        Ok(catalog)
    }

    pub fn to_file(&self) -> CatalogFile {
        CatalogFile {
            g: self.g,
            n: self.n,
            graphs: self.graphs.clone(),
            aut: self.auts.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn legs(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graphs(&self) -> &[StableGraph] {
        &self.graphs
    }

    pub fn graph(&self, i: usize) -> &StableGraph {
        &self.graphs[i]
    }

    pub fn key(&self, i: usize) -> &CanonicalKey {
        &self.keys[i]
    }

    pub fn aut(&self, i: usize) -> &BigUint {
        &self.auts[i]
    }

    pub fn num_edges(&self, i: usize) -> usize {
        self.graphs[i].num_edges()
    }

    pub fn index_of_key(&self, key: &CanonicalKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn index_of(&self, graph: &StableGraph) -> Option<usize> {
        self.index_of_key(&graph.canonical_key())
    }

    /// Index of `Ver_{g,n}`.
    pub fn vertex_index(&self) -> usize {
        0
    }
}

/// A rational linear combination of the graphs of one catalog, an element
/// of `V^c_{g,n}`. Absent indices have coefficient zero.
#[derive(Debug, Clone)]
pub struct FormalSum {
    catalog: Arc<GraphCatalog>,
    terms: BTreeMap<usize, Rational>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct FormalSumJson {
    pub g: u32,
    pub n: u32,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub key: String,
    pub coeff: String,
}

impl FormalSum {
    pub fn zero(catalog: Arc<GraphCatalog>) -> Self {
        FormalSum {
            catalog,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(catalog: Arc<GraphCatalog>, index: usize) -> Self {
        let mut s = FormalSum::zero(catalog);
        s.add_term(index, &Rational::one());
        s
    }

    pub fn catalog(&self) -> &Arc<GraphCatalog> {
        &self.catalog
    }

    pub fn coeff(&self, index: usize) -> Rational {
        self.terms.get(&index).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero terms in catalog order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.terms.iter().map(|(&i, q)| (i, q))
    }

    pub fn add_term(&mut self, index: usize, coeff: &Rational) {
        assert!(index < self.catalog.len(), "index {index} outside catalog");
        let entry = self.terms.entry(index).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&index);
        }
    }

    fn same_catalog(&self, other: &FormalSum) -> Result<()> {
        if Arc::ptr_eq(&self.catalog, &other.catalog)
            || (self.catalog.g == other.catalog.g
                && self.catalog.n == other.catalog.n
                && self.catalog.keys == other.catalog.keys)
        {
            Ok(())
        } else {
            Err(Error::domain("formal sums over different catalogs"))
        }
    }

    /// `self + factor · other`.
    pub fn add_scaled(&mut self, other: &FormalSum, factor: &Rational) -> Result<()> {
        self.same_catalog(other)?;
        for (&i, q) in &other.terms {
            self.add_term(i, &(q * factor));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: &Rational) -> FormalSum {
        let mut out = FormalSum::zero(self.catalog.clone());
        for (&i, q) in &self.terms {
            out.add_term(i, &(q * factor));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_json(&self) -> FormalSumJson {
        FormalSumJson {
            g: self.catalog.g,
            n: self.catalog.n,
            terms: self
                .terms
                .iter()
                .map(|(&i, q)| TermJson {
                    key: self.catalog.key(i).to_hex(),
                    coeff: format_rational(q),
                })
                .collect(),
        }
    }

    pub fn from_json(catalog: Arc<GraphCatalog>, json: &FormalSumJson) -> Result<Self> {
        if json.g != catalog.g || json.n != catalog.n {
            return Err(Error::domain("formal sum is over a different (g,n)"));
        }
        let mut out = FormalSum::zero(catalog);
        for term in &json.terms {
            let key = CanonicalKey::from_hex(&term.key)
                .map_err(|e| Error::domain(format!("bad key {:?}: {e}", term.key)))?;
            let i = out
                .catalog
                .index_of_key(&key)
                .ok_or_else(|| Error::domain(format!("key {} not in catalog", term.key)))?;
            out.add_term(i, &parse_rational(&term.coeff)?);
        }
        Ok(out)
    }
}

impl PartialEq for FormalSum {
    fn eq(&self, other: &Self) -> bool {
        self.same_catalog(other).is_ok() && self.terms == other.terms
    }
}

/// `F̂_{g,n} = Σ Γ / |Aut(Γ)|`.
pub fn abstract_npoint(catalog: &Arc<GraphCatalog>) -> FormalSum {
    let mut sum = FormalSum::zero(catalog.clone());
    for i in 0..catalog.len() {
        sum.add_term(i, &(Rational::one() / from_biguint(catalog.aut(i))));
    }
    sum
}
