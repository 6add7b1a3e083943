//! Edge contraction and the contraction order on `G^c_{g,n}`.
//!
//! `Γ' ≤ Γ` when `Γ` is obtained from `Γ'` by contracting internal edges;
//! more contracted graphs are larger and `Ver_{g,n}` is the maximum. The
//! incidence algebra over this order carries the classical zeta and Möbius
//! functions and the Aut-weighted variants
//! `ζ̃(Γ',Γ) = |Aut Γ| / |Aut Γ'| · |C(Γ',Γ)|` and its inverse `μ̃`.
//!
//! In catalog order (by edge count) `Γ_i < Γ_j` implies `i > j`, so every
//! matrix here is lower triangular.

use std::fmt::Write as _;
use std::sync::Arc;

use num::{One, Zero};
use rayon::prelude::*;

use crate::enumerate::GraphCatalog;
use crate::error::{Error, Result};
use crate::graph::{StableGraph, Vertex};
use crate::rational::{factorial_q, from_biguint, sign, Coefficient, Rational};

/// Contracts a single internal edge: a loop raises its vertex's genus by
/// one, any other edge merges its endpoints (genera add, parallel edges
/// become loops).
pub fn contract(graph: &StableGraph, edge: usize) -> Result<StableGraph> {
    contract_edges(graph, &[edge])
}

/// Contracts a set of edges simultaneously. Each connected piece of the
/// contracted subgraph becomes one vertex whose genus is the sum of its
/// vertex genera plus its first Betti number.
pub fn contract_edges(graph: &StableGraph, edges: &[usize]) -> Result<StableGraph> {
    let nv = graph.num_vertices();
    let ne = graph.num_edges();
    let mut selected = vec![false; ne];
    for &e in edges {
        if e >= ne {
            return Err(Error::domain(format!(
                "edge {e} is not an internal edge (graph has {ne})"
            )));
        }
        if std::mem::replace(&mut selected[e], true) {
            return Err(Error::domain(format!("edge {e} listed twice")));
        }
    }
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in (0..ne).filter(|&e| selected[e]) {
        let (u, v) = graph.edges()[e];
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru.max(rv)] = ru.min(rv);
        }
    }
    let mut slot = vec![usize::MAX; nv];
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut members = Vec::new();
    for v in 0..nv {
        let r = find(&mut parent, v);
        if slot[r] == usize::MAX {
            slot[r] = vertices.len();
            vertices.push(Vertex::new(0, 0));
            members.push(0i64);
        }
        let s = slot[r];
        slot[v] = s;
        vertices[s].genus += graph.vertices()[v].genus;
        vertices[s].ext += graph.vertices()[v].ext;
        members[s] += 1;
    }
    let mut contracted_in = vec![0i64; vertices.len()];
    let mut kept = Vec::new();
    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        if selected[e] {
            contracted_in[slot[u]] += 1;
        } else {
            kept.push((slot[u], slot[v]));
        }
    }
    for (s, vert) in vertices.iter_mut().enumerate() {
        // h^1 of a connected piece with k vertices and m edges is m - k + 1.
        vert.genus += (contracted_in[s] - members[s] + 1) as u32;
    }
    StableGraph::new(vertices, kept)
}

/// The contraction order on one catalog together with the contraction
/// counts `c[i][j] = |C(Γ_i, Γ_j)|`.
#[derive(Debug, Clone)]
pub struct ContractionPoset {
    catalog: Arc<GraphCatalog>,
    counts: Vec<Vec<u64>>,
    leq: Vec<Vec<bool>>,
    covers: Vec<(usize, usize)>,
}

/// Builds the poset by contracting every edge subset of every graph and
/// bucketing the results by canonical key.
pub fn build_poset(catalog: Arc<GraphCatalog>) -> Result<ContractionPoset> {
    let size = catalog.len();
    let counts = (0..size)
        .into_par_iter()
        .map(|i| {
            let graph = catalog.graph(i);
            let ne = graph.num_edges();
            if ne >= 64 {
                return Err(Error::domain("graph too large for subset enumeration"));
            }
            let mut row = vec![0u64; size];
            let mut subset = Vec::with_capacity(ne);
            for mask in 0u64..(1u64 << ne) {
                subset.clear();
                subset.extend((0..ne).filter(|&e| mask >> e & 1 == 1));
                let contracted = contract_edges(graph, &subset)?;
                let j = catalog.index_of(&contracted).ok_or_else(|| {
                    Error::Inconsistent(format!(
                        "contracting {graph} gave {contracted}, which is not in the catalog"
                    ))
                })?;
                row[j] += 1;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let leq: Vec<Vec<bool>> = counts
        .iter()
        .map(|row| row.iter().map(|&c| c > 0).collect())
        .collect();
    let mut covers = Vec::new();
    for i in 0..size {
        for j in 0..size {
            if i != j && leq[i][j] && !(0..size).any(|k| k != i && k != j && leq[i][k] && leq[k][j]) {
                covers.push((i, j));
            }
        }
    }
    Ok(ContractionPoset {
        catalog,
        counts,
        leq,
        covers,
    })
}

impl ContractionPoset {
    pub fn catalog(&self) -> &Arc<GraphCatalog> {
        &self.catalog
    }

    pub fn len(&self) -> usize {
        self.catalog.len()
    }

    pub fn is_empty(&self) -> bool {
        self.catalog.is_empty()
    }

    /// `Γ_i ≤ Γ_j`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// `|C(Γ_i, Γ_j)|`: edge subsets of `Γ_i` whose contraction gives `Γ_j`.
    pub fn contraction_count(&self, i: usize, j: usize) -> u64 {
        self.counts[i][j]
    }

    /// Covering pairs `(lower, upper)` with nothing strictly between.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.leq[i][j]))
            .collect()
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.leq[j][i]))
            .collect()
    }

    /// Elements `z` with `lo ≤ z ≤ hi`.
    pub fn interval(&self, lo: usize, hi: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&z| self.leq[lo][z] && self.leq[z][hi])
            .collect()
    }

    fn same_as(&self, other: &ContractionPoset) -> bool {
        std::ptr::eq(self, other)
            || (self.catalog.genus() == other.catalog.genus()
                && self.catalog.legs() == other.catalog.legs()
                && (0..self.len()).all(|i| self.catalog.key(i) == other.catalog.key(i))
                && self.counts == other.counts)
    }

    /// Graphviz digraph of the covering relation, arrows pointing from the
    /// larger (more contracted) graph to the smaller one.
    pub fn to_dot(&self) -> String {
        let cat = &self.catalog;
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"G_{}_{}\" {{", cat.genus(), cat.legs());
        let _ = writeln!(out, "  rankdir=TB;");
        let _ = writeln!(out, "  node [shape=box, fontname=\"monospace\"];");
        for i in 0..self.len() {
            let hex = cat.key(i).to_hex();
            let prefix = &hex[..hex.len().min(12)];
            let _ = writeln!(
                out,
                "  n{i} [label=\"{prefix}\\n{}\"];",
                cat.graph(i).signature()
            );
        }
        let mut arrows: Vec<(usize, usize)> = self.covers.iter().map(|&(lo, hi)| (hi, lo)).collect();
        arrows.sort_unstable();
        for (hi, lo) in arrows {
            let _ = writeln!(out, "  n{hi} -> n{lo};");
        }
        out.push_str("}\n");
        out
    }
}

/// A rational function on ordered pairs of one poset, zero off the order.
#[derive(Debug, Clone)]
pub struct IncidenceFunction<'p> {
    poset: &'p ContractionPoset,
    values: Vec<Vec<Rational>>,
}

impl<'p> IncidenceFunction<'p> {
    fn from_fn(poset: &'p ContractionPoset, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let size = poset.len();
        let values = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| if poset.leq(i, j) { f(i, j) } else { Rational::zero() })
                    .collect()
            })
            .collect();
        IncidenceFunction { poset, values }
    }

    /// Builds a function from arbitrary values; entries off the order are
    /// rejected.
    pub fn from_values(poset: &'p ContractionPoset, values: Vec<Vec<Rational>>) -> Result<Self> {
        let size = poset.len();
        if values.len() != size || values.iter().any(|r| r.len() != size) {
            return Err(Error::domain("value matrix has the wrong shape"));
        }
        for (i, row) in values.iter().enumerate() {
            for (j, q) in row.iter().enumerate() {
                if !q.is_zero() && !poset.leq(i, j) {
                    return Err(Error::domain(format!("nonzero value at incomparable pair ({i},{j})")));
                }
            }
        }
        Ok(IncidenceFunction { poset, values })
    }

    pub fn delta(poset: &'p ContractionPoset) -> Self {
        Self::from_fn(poset, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    /// Classical zeta: 1 on every comparable pair.
    pub fn zeta(poset: &'p ContractionPoset) -> Self {
        Self::from_fn(poset, |_, _| Rational::one())
    }

    pub fn poset(&self) -> &'p ContractionPoset {
        self.poset
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.values[i][j]
    }

    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }

    /// `(f * g)(x, y) = Σ_{z ∈ [x, y]} f(x, z) g(z, y)`.
    pub fn convolve(&self, other: &IncidenceFunction<'_>) -> Result<IncidenceFunction<'p>> {
        if !self.poset.same_as(other.poset) {
            return Err(Error::domain("incidence functions live on different posets"));
        }
        let p = self.poset;
        Ok(Self::from_fn(p, |x, y| {
            p.interval(x, y)
                .into_iter()
                .map(|z| &self.values[x][z] * &other.values[z][y])
                .sum()
        }))
    }

    pub fn is_delta(&self) -> bool {
        self.values.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, q)| if i == j { q.is_one() } else { q.is_zero() })
        })
    }
}

impl PartialEq for IncidenceFunction<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.poset.same_as(other.poset) && self.values == other.values
    }
}

/// `μ(x, x) = 1`, `μ(x, y) = -Σ_{x ≤ z < y} μ(x, z)`.
pub fn classical_mobius(poset: &ContractionPoset) -> IncidenceFunction<'_> {
    let size = poset.len();
    let mut mu = vec![vec![Rational::zero(); size]; size];
    for (x, row) in mu.iter_mut().enumerate() {
        // Larger elements have smaller indices: walk y downward from x.
        for y in (0..=x).rev() {
            if !poset.leq(x, y) {
                continue;
            }
            row[y] = if x == y {
                Rational::one()
            } else {
                -(y + 1..=x)
                    .filter(|&z| poset.leq(x, z) && poset.leq(z, y))
                    .map(|z| row[z].clone())
                    .sum::<Rational>()
            };
        }
    }
    IncidenceFunction { poset, values: mu }
}

/// `ζ̃(Γ', Γ) = |Aut Γ| / |Aut Γ'| · |C(Γ', Γ)|` on comparable pairs.
pub fn generalized_zeta(poset: &ContractionPoset) -> IncidenceFunction<'_> {
    let cat = poset.catalog().clone();
    IncidenceFunction::from_fn(poset, |i, j| {
        from_biguint(cat.aut(j)) / from_biguint(cat.aut(i)) * Rational::from_integer(poset.contraction_count(i, j).into())
    })
}

/// `μ̃(x, x) = 1`, `μ̃(x, z) = -Σ_{y ∈ (x, z]} ζ̃(x, y) μ̃(y, z)`.
#[allow(clippy::needless_range_loop)]
pub fn generalized_mobius(poset: &ContractionPoset) -> IncidenceFunction<'_> {
    let zeta = generalized_zeta(poset);
    let size = poset.len();
    let mut mu = vec![vec![Rational::zero(); size]; size];
    for z in 0..size {
        // (x, z] only holds indices below x, so increasing x sees them first.
        for x in z..size {
            if !poset.leq(x, z) {
                continue;
            }
            mu[x][z] = if x == z {
                Rational::one()
            } else {
                -(z..x)
                    .filter(|&y| poset.leq(x, y) && poset.leq(y, z))
                    .map(|y| zeta.get(x, y) * &mu[y][z])
                    .sum::<Rational>()
            };
        }
    }
    IncidenceFunction { poset, values: mu }
}

/// The generalized Möbius inversion pair on one poset:
/// `g̃(x) = Σ_{y ≤ x} f̃(y) ζ̃(y, x)` and `f̃(x) = Σ_{y ≤ x} g̃(y) μ̃(y, x)`.
pub struct MobiusInversion<'p> {
    zeta: IncidenceFunction<'p>,
    mobius: IncidenceFunction<'p>,
}

impl<'p> MobiusInversion<'p> {
    pub fn new(poset: &'p ContractionPoset) -> Self {
        MobiusInversion {
            zeta: generalized_zeta(poset),
            mobius: generalized_mobius(poset),
        }
    }

    pub fn zeta(&self) -> &IncidenceFunction<'p> {
        &self.zeta
    }

    pub fn mobius(&self) -> &IncidenceFunction<'p> {
        &self.mobius
    }

    pub fn forward<T: Coefficient>(&self, f: &[T]) -> Result<Vec<T>> {
        apply(&self.zeta, f)
    }

    pub fn backward<T: Coefficient>(&self, g: &[T]) -> Result<Vec<T>> {
        apply(&self.mobius, g)
    }
}

/// Outcome of one identity in [`check_identities`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub holds: bool,
}

/// The incidence-algebra identities on one poset: `ζ ∗ μ = δ = μ ∗ ζ`,
/// `ζ̃ ∗ μ̃ = δ = μ̃ ∗ ζ̃`, and `μ̃(Γ, Ver) = (-1)^{|E(Γ)|} n! / |Aut Γ|` for
/// every `Γ`.
pub fn check_identities(poset: &ContractionPoset) -> Result<Vec<IdentityCheck>> {
    let zeta = IncidenceFunction::zeta(poset);
    let mu = classical_mobius(poset);
    let zt = generalized_zeta(poset);
    let mt = generalized_mobius(poset);
    let cat = poset.catalog();
    let top = cat.vertex_index();
    let n_fact = factorial_q(cat.legs());
    let lemma = (0..poset.len()).all(|i| {
        *mt.get(i, top) == sign(cat.num_edges(i)) * &n_fact / from_biguint(cat.aut(i))
    });
    Ok(vec![
        IdentityCheck { name: "zeta * mu = delta", holds: zeta.convolve(&mu)?.is_delta() },
        IdentityCheck { name: "mu * zeta = delta", holds: mu.convolve(&zeta)?.is_delta() },
        IdentityCheck { name: "zeta~ * mu~ = delta", holds: zt.convolve(&mt)?.is_delta() },
        IdentityCheck { name: "mu~ * zeta~ = delta", holds: mt.convolve(&zt)?.is_delta() },
        IdentityCheck { name: "mu~(G, Ver) = (-1)^|E| n!/|Aut G|", holds: lemma },
    ])
}

fn apply<T: Coefficient>(kernel: &IncidenceFunction<'_>, input: &[T]) -> Result<Vec<T>> {
    let size = kernel.poset.len();
    if input.len() != size {
        return Err(Error::domain(format!(
            "vector of length {} on a poset of size {size}",
            input.len()
        )));
    }
    Ok((0..size)
        .map(|x| {
            let mut acc = T::null();
            for (y, value) in input.iter().enumerate() {
                let k = kernel.get(y, x);
                if !k.is_zero() {
                    acc.add_scaled(value, k);
                }
            }
            acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate;
    use crate::graph::fixtures::*;
    use crate::rational::{int, rat};

    fn poset(g: u32, n: u32) -> ContractionPoset {
        build_poset(Arc::new(enumerate(g, n).unwrap())).unwrap()
    }

    #[test]
    fn contraction_examples() {
        // Contracting the loop of genus1—genus0+loop gives genus1—genus1.
        let c = contract(&one_loop_bridge(), 1).unwrap();
        assert!(c.is_isomorphic(&g(&[(1, 0), (1, 0)], &[(0, 1)])));
        let c = contract(&g(&[(1, 0), (1, 0)], &[(0, 1)]), 0).unwrap();
        assert_eq!(c, StableGraph::stable_vertex(2, 0));
        let c = contract(&theta(), 1).unwrap();
        assert_eq!(c, g(&[(0, 0)], &[(0, 0), (0, 0)]));
    }

    #[test]
    fn contraction_rejects_bad_edges() {
        assert!(matches!(contract(&theta(), 3), Err(Error::Domain(_))));
        assert!(matches!(
            contract(&StableGraph::stable_vertex(0, 3), 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn contraction_preserves_genus_and_legs() {
        let cat = enumerate(2, 1).unwrap();
        for gr in cat.graphs() {
            for e in 0..gr.num_edges() {
                let c = contract(gr, e).unwrap();
                assert_eq!(c.genus(), 2);
                assert_eq!(c.num_legs(), 1);
                assert!(c.is_stable());
            }
        }
    }

    #[test]
    fn chain_in_genus_zero_five_legs() {
        let p = poset(0, 5);
        // star (0) > two-vertex (1) > three-vertex chain (2)
        assert_eq!(p.covers(), &[(1, 0), (2, 1)]);
        assert!(p.leq(2, 0));
    }

    #[test]
    fn worked_contraction_count() {
        let p = poset(2, 0);
        let cat = p.catalog();
        let d = cat.index_of(&dumbbell()).unwrap();
        let b = cat.index_of(&one_loop_bridge()).unwrap();
        assert_eq!(p.contraction_count(d, b), 2);
        for i in 0..p.len() {
            assert_eq!(p.contraction_count(i, i), 1);
        }
        let zeta = generalized_zeta(&p);
        assert_eq!(zeta.get(d, b), &rat(1, 2));
        let t = cat.index_of(&theta()).unwrap();
        assert_eq!(zeta.get(t, 0), &rat(1, 12));
    }

    #[test]
    fn generalized_mobius_values() {
        let p = poset(2, 0);
        let cat = p.catalog();
        let mu = generalized_mobius(&p);
        let d = cat.index_of(&dumbbell()).unwrap();
        let t = cat.index_of(&theta()).unwrap();
        assert_eq!(mu.get(d, 0), &rat(-1, 8));
        assert_eq!(mu.get(t, 0), &rat(-1, 12));
        for i in 0..p.len() {
            assert_eq!(mu.get(i, i), &int(1));
        }
    }

    #[test]
    fn convolution_laws_on_small_posets() {
        let p = poset(0, 5);
        let zeta = IncidenceFunction::zeta(&p);
        let mu = classical_mobius(&p);
        assert!(zeta.convolve(&mu).unwrap().is_delta());
        assert_eq!(mu.get(2, 0), &int(0));
        assert_eq!(mu.get(1, 0), &int(-1));

        let p4 = poset(0, 4);
        let zeta4 = IncidenceFunction::zeta(&p4);
        assert_eq!(zeta4.convolve(&zeta4).unwrap().get(1, 0), &int(2));
        assert!(matches!(zeta4.convolve(&zeta), Err(Error::Domain(_))));
    }

    #[test]
    fn delta_is_identity() {
        let p = poset(1, 2);
        let delta = IncidenceFunction::delta(&p);
        let zt = generalized_zeta(&p);
        assert_eq!(delta.convolve(&zt).unwrap(), zt);
        assert_eq!(zt.convolve(&delta).unwrap(), zt);
    }

    #[test]
    fn single_element_poset() {
        let p = poset(0, 3);
        assert!(generalized_zeta(&p).is_delta());
        assert!(generalized_mobius(&p).is_delta());
        assert!(classical_mobius(&p).is_delta());
    }

    #[test]
    fn from_values_checks_support() {
        let p = poset(0, 4);
        let ok = vec![vec![int(1), int(0)], vec![int(5), int(1)]];
        assert!(IncidenceFunction::from_values(&p, ok).is_ok());
        let bad = vec![vec![int(1), int(5)], vec![int(0), int(1)]];
        assert!(IncidenceFunction::from_values(&p, bad).is_err());
    }

    #[test]
    fn inversion_roundtrip_from_minimum() {
        let p = poset(0, 4);
        let inv = MobiusInversion::new(&p);
        let f = vec![int(0), int(1)];
        let g = inv.forward(&f).unwrap();
        assert_eq!(g.iter().filter(|q| !q.is_zero()).count(), 2);
        assert_eq!(inv.backward(&g).unwrap(), f);
        assert!(inv.forward(&[int(1)]).is_err());
    }

    #[test]
    fn dot_export_shape() {
        let dot = poset(0, 4).to_dot();
        assert_eq!(dot.matches("->").count(), 1);
        assert_eq!(dot.matches("[label=").count(), 2);
        assert!(dot.contains("n0 -> n1;"));
        assert!(dot.contains("g=[0] E=[] ext=[4]"));
    }

    #[test]
    fn identity_suite_on_genus_one() {
        let p = poset(1, 2);
        let checks = check_identities(&p).unwrap();
        assert_eq!(checks.len(), 5);
        assert!(checks.iter().all(|c| c.holds), "{checks:?}");
    }
}
