//! Brute-force oracles shared by the integration tests. Nothing here goes
//! through colour refinement, BFS degeneration or the contraction poset.

#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use sgm_core::{StableGraph, Vertex};

pub fn g(vertices: &[(u32, u32)], edges: &[(usize, usize)]) -> StableGraph {
    StableGraph::new(
        vertices.iter().map(|&(genus, ext)| Vertex::new(genus, ext)).collect(),
        edges.to_vec(),
    )
    .unwrap()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

struct HalfEdges {
    vertex: Vec<usize>,
    partner: Vec<Option<usize>>,
    /// Leg name for external half-edges.
    name: Vec<Option<usize>>,
}

fn half_edges(graph: &StableGraph, leg_vertex: Option<&[usize]>) -> HalfEdges {
    let mut h = HalfEdges { vertex: Vec::new(), partner: Vec::new(), name: Vec::new() };
    match leg_vertex {
        Some(lv) => {
            for (name, &v) in lv.iter().enumerate() {
                h.vertex.push(v);
                h.partner.push(None);
                h.name.push(Some(name));
            }
        }
        None => {
            for (v, vert) in graph.vertices().iter().enumerate() {
                for _ in 0..vert.ext {
                    h.vertex.push(v);
                    h.partner.push(None);
                    h.name.push(None);
                }
            }
        }
    }
    for &(u, v) in graph.edges() {
        let a = h.vertex.len();
        h.vertex.extend([u, v]);
        h.partner.extend([Some(a + 1), Some(a)]);
        h.name.extend([None, None]);
    }
    h
}

/// Number of bijections of half-edges that preserve the edge pairing, send
/// legs to legs and come from a genus-preserving bijection of vertices.
/// With `leg_vertex` the legs are named and must be fixed.
fn count_half_edge_automorphisms(graph: &StableGraph, leg_vertex: Option<&[usize]>) -> u64 {
    let h = half_edges(graph, leg_vertex);
    let nv = graph.num_vertices();
    let total = h.vertex.len();
    let genus: Vec<u32> = graph.vertices().iter().map(|v| v.genus).collect();

    struct State {
        image: Vec<usize>,
        used: Vec<bool>,
        vmap: Vec<Option<usize>>,
        vinv: Vec<Option<usize>>,
    }

    fn go(k: usize, h: &HalfEdges, genus: &[u32], s: &mut State) -> u64 {
        if k == h.vertex.len() {
            return 1;
        }
        let mut count = 0;
        for c in 0..h.vertex.len() {
            if s.used[c] || h.partner[k].is_some() != h.partner[c].is_some() {
                continue;
            }
            if h.name[k].is_some() && h.name[k] != h.name[c] {
                continue;
            }
            let (v, w) = (h.vertex[k], h.vertex[c]);
            if genus[v] != genus[w] {
                continue;
            }
            let fresh = match (s.vmap[v], s.vinv[w]) {
                (Some(x), _) if x != w => continue,
                (Some(_), _) => false,
                (None, Some(_)) => continue,
                (None, None) => true,
            };
            if let Some(p) = h.partner[k] {
                if p < k && Some(s.image[p]) != h.partner[c] {
                    continue;
                }
            }
            s.used[c] = true;
            s.image[k] = c;
            if fresh {
                s.vmap[v] = Some(w);
                s.vinv[w] = Some(v);
            }
            count += go(k + 1, h, genus, s);
            if fresh {
                s.vmap[v] = None;
                s.vinv[w] = None;
            }
            s.used[c] = false;
        }
        count
    }

    let mut s = State {
        image: vec![0; total],
        used: vec![false; total],
        vmap: vec![None; nv],
        vinv: vec![None; nv],
    };
    let count = go(0, &h, &genus, &mut s);
    // Vertices without half-edges only occur for a bare vertex.
    assert!(total > 0 || nv == 1, "disconnected input");
    count
}

pub fn brute_aut(graph: &StableGraph) -> u64 {
    count_half_edge_automorphisms(graph, None)
}

pub fn brute_labeled_aut(graph: &StableGraph, leg_vertex: &[usize]) -> u64 {
    count_half_edge_automorphisms(graph, Some(leg_vertex))
}

/// Lexicographically least `[V, (genus, ext, names..)*, sorted edges]`
/// over all vertex orderings.
pub fn brute_canonical_labeled(graph: &StableGraph, leg_vertex: Option<&[usize]>) -> Vec<u32> {
    let nv = graph.num_vertices();
    let mut best: Option<Vec<u32>> = None;
    for perm in permutations(nv) {
        // perm[v] is the new position of vertex v
        let mut at = vec![0; nv];
        for v in 0..nv {
            at[perm[v]] = v;
        }
        let mut word = vec![nv as u32];
        for &v in &at {
            let vert = graph.vertices()[v];
            word.extend([vert.genus, vert.ext]);
            if let Some(lv) = leg_vertex {
                let names: Vec<u32> = (0..lv.len()).filter(|&i| lv[i] == v).map(|i| i as u32).collect();
                word.push(names.len() as u32);
                word.extend(names);
            }
        }
        let mut edges: Vec<(u32, u32)> = graph
            .edges()
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a] as u32, perm[b] as u32);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        for (x, y) in edges {
            word.extend([x, y]);
        }
        if best.as_ref().is_none_or(|b| word < *b) {
            best = Some(word);
        }
    }
    best.unwrap()
}

pub fn brute_canonical(graph: &StableGraph) -> Vec<u32> {
    brute_canonical_labeled(graph, None)
}

pub fn brute_isomorphic(a: &StableGraph, b: &StableGraph) -> bool {
    a.num_vertices() == b.num_vertices()
        && a.num_edges() == b.num_edges()
        && brute_canonical(a) == brute_canonical(b)
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn multisets<T: Clone>(items: &[T], size: usize) -> Vec<Vec<T>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, item) in items.iter().enumerate() {
        for mut rest in multisets(&items[i..], size - 1) {
            rest.insert(0, item.clone());
            out.push(rest);
        }
    }
    out
}

fn nondecreasing(max_sum: u32, len: usize, min: u32) -> Vec<Vec<u32>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in min..=max_sum {
        for mut rest in nondecreasing(max_sum - first, len - 1, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All connected stable graphs of type `(g, n)` by direct search over
/// vertex counts, genus vectors, leg distributions and edge multisets,
/// deduplicated by [`brute_canonical`].
pub fn brute_enumerate(g: u32, n: u32) -> BTreeMap<Vec<u32>, StableGraph> {
    let mut out = BTreeMap::new();
    let max_vertices = (2 * g + n).saturating_sub(2) as usize;
    for nv in 1..=max_vertices.max(1) {
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|u| (u..nv).map(move |v| (u, v))).collect();
        for genera in nondecreasing(g, nv, 0) {
            let betti = g - genera.iter().sum::<u32>();
            let ne = betti as usize + nv - 1;
            let edge_sets = multisets(&pairs, ne);
            for ext in compositions(n, nv) {
                let vertices: Vec<Vertex> = genera.iter().zip(&ext).map(|(&gg, &e)| Vertex::new(gg, e)).collect();
                for edges in &edge_sets {
                    let graph = StableGraph::new(vertices.clone(), edges.clone()).unwrap();
                    if graph.is_connected() && graph.is_stable() {
                        out.entry(brute_canonical(&graph)).or_insert(graph);
                    }
                }
            }
        }
    }
    out
}

/// Distinct namings of the legs of `graph` up to name-preserving
/// isomorphism, as leg-to-vertex vectors.
pub fn brute_namings(graph: &StableGraph) -> BTreeMap<Vec<u32>, Vec<usize>> {
    let slots: Vec<usize> = graph
        .vertices()
        .iter()
        .enumerate()
        .flat_map(|(v, vert)| std::iter::repeat_n(v, vert.ext as usize))
        .collect();
    let mut out = BTreeMap::new();
    for perm in permutations(slots.len()) {
        let leg_vertex: Vec<usize> = perm.iter().map(|&i| slots[i]).collect();
        out.entry(brute_canonical_labeled(graph, Some(&leg_vertex))).or_insert(leg_vertex);
    }
    out
}

/// Connected graphs with at most `max_vertices` vertices and at most
/// `max_half_edges` half-edges; stability is not required.
pub fn arb_connected_graph(max_vertices: usize, max_half_edges: usize) -> impl Strategy<Value = StableGraph> {
    (1..=max_vertices)
        .prop_flat_map(move |nv| {
            (
                prop::collection::vec((0u32..3, 0u32..3), nv),
                prop::collection::vec((0..nv, 0..nv), 0..=max_half_edges / 2),
            )
        })
        .prop_map(|(verts, edges)| {
            StableGraph::new(verts.into_iter().map(|(gg, e)| Vertex::new(gg, e)).collect(), edges).unwrap()
        })
        .prop_filter("connected and small", move |gr| gr.is_connected() && gr.num_half_edges() <= max_half_edges)
}

/// `graph` with its vertices reordered by `order` (new vertex `i` is old
/// vertex `order[i]`) and its edge list reversed.
pub fn relabel(graph: &StableGraph, order: &[usize]) -> StableGraph {
    let mut position = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let vertices = order.iter().map(|&v| graph.vertices()[v]).collect();
    let edges = graph.edges().iter().rev().map(|&(a, b)| (position[b], position[a])).collect();
    StableGraph::new(vertices, edges).unwrap()
}
