//! Canonical labeling of small vertex-colored multigraphs.
//!
//! Colors are refined by iterated neighborhood-multiset signatures until the
//! partition is equitable. Remaining ties are broken by individualizing each
//! vertex of the first non-singleton cell in turn and recursing; every leaf
//! yields a vertex order, and the lexicographically least serialization over
//! all leaves is the canonical form.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Deterministic byte encoding of an isomorphism class.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
        hex::decode(s).map(CanonicalKey)
    }

    fn from_words(words: &[u32]) -> Self {
        let mut bytes = Vec::with_capacity(words.len());
        for &w in words {
            // LEB128
            let mut w = w;
            loop {
                let byte = (w & 0x7f) as u8;
                w >>= 7;
                if w == 0 {
                    bytes.push(byte);
                    break;
                }
                bytes.push(byte | 0x80);
            }
        }
        CanonicalKey(bytes)
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl From<CanonicalKey> for String {
    fn from(k: CanonicalKey) -> String {
        k.to_hex()
    }
}

impl TryFrom<String> for CanonicalKey {
    type Error = hex::FromHexError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        CanonicalKey::from_hex(&s)
    }
}

/// An undirected multigraph with loops whose vertices carry a label word.
/// `adjacency[u][v]` is the number of edges between `u` and `v`; the
/// diagonal counts loops.
#[derive(Debug, Clone)]
pub struct ColoredMultigraph {
    labels: Vec<Vec<u32>>,
    adjacency: Vec<Vec<u32>>,
}

/// Result of canonicalization: the key and the vertex order realizing it
/// (`order[i]` is the original index of canonical vertex `i`).
#[derive(Debug, Clone)]
pub struct Canonical {
    pub key: CanonicalKey,
    pub order: Vec<usize>,
}

impl ColoredMultigraph {
    pub fn new(labels: Vec<Vec<u32>>, edges: &[(usize, usize)]) -> Self {
        let n = labels.len();
        let mut adjacency = vec![vec![0u32; n]; n];
        for &(u, v) in edges {
            if u == v {
                adjacency[u][u] += 1;
            } else {
                adjacency[u][v] += 1;
                adjacency[v][u] += 1;
            }
        }
        ColoredMultigraph { labels, adjacency }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        self.adjacency[u][v]
    }

    fn initial_colors(&self) -> Vec<usize> {
        let sig: Vec<(&Vec<u32>, u32, u32)> = (0..self.len())
            .map(|v| {
                let degree: u32 = (0..self.len())
                    .filter(|&u| u != v)
                    .map(|u| self.adjacency[v][u])
                    .sum();
                (&self.labels[v], self.adjacency[v][v], degree)
            })
            .collect();
        rank(&sig)
    }

    /// Refines `colors` to the coarsest equitable partition below it. Ranks
    /// are assigned by sorting signatures, so the result is equivariant
    /// under relabeling, and cells are only ever split in place.
    pub fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let n = self.len();
        let mut classes = count_classes(&colors);
        loop {
            let sigs: Vec<(usize, Vec<(usize, u32)>)> = (0..n)
                .map(|v| {
                    let mut nbrs: Vec<(usize, u32)> = (0..n)
                        .filter(|&u| u != v && self.adjacency[v][u] > 0)
                        .map(|u| (colors[u], self.adjacency[v][u]))
                        .collect();
                    nbrs.sort_unstable();
                    (colors[v], nbrs)
                })
                .collect();
            colors = rank(&sigs);
            let next = count_classes(&colors);
            if next == classes {
                return colors;
            }
            classes = next;
        }
    }

    fn serialize(&self, order: &[usize]) -> Vec<u32> {
        let n = order.len();
        let mut out = Vec::with_capacity(1 + 3 * n + n * (n + 1) / 2);
        out.push(n as u32);
        for &v in order {
            out.push(self.labels[v].len() as u32);
            out.extend_from_slice(&self.labels[v]);
        }
        for i in 0..n {
            for j in i..n {
                out.push(self.adjacency[order[i]][order[j]]);
            }
        }
        out
    }

    pub fn canonical(&self) -> Canonical {
        let colors = self.initial_colors();
        let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
        self.search(colors, &mut best);
        let (words, order) = best.expect("search visits at least one leaf");
        Canonical {
            key: CanonicalKey::from_words(&words),
            order,
        }
    }

    fn search(&self, colors: Vec<usize>, best: &mut Option<(Vec<u32>, Vec<usize>)>) {
        let colors = self.refine(colors);
        match first_nonsingleton_cell(&colors) {
            None => {
                let mut order: Vec<usize> = (0..self.len()).collect();
                order.sort_by_key(|&v| colors[v]);
                let words = self.serialize(&order);
                if best.as_ref().is_none_or(|(b, _)| words < *b) {
                    *best = Some((words, order));
                }
            }
            Some(cell) => {
                let members: Vec<usize> = (0..self.len()).filter(|&v| colors[v] == cell).collect();
                for &v in &members {
                    let individualized: Vec<usize> = colors
                        .iter()
                        .enumerate()
                        .map(|(x, &c)| 2 * c + usize::from(c == cell && x != v))
                        .collect();
                    self.search(individualized, best);
                }
            }
        }
    }

    /// Number of vertex permutations preserving labels and all edge
    /// multiplicities (loops included).
    pub fn count_automorphisms(&self) -> u64 {
        let colors = self.refine(self.initial_colors());
        let n = self.len();
        let mut image = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.extend_automorphism(0, &colors, &mut image, &mut used)
    }

    fn extend_automorphism(
        &self,
        v: usize,
        colors: &[usize],
        image: &mut [usize],
        used: &mut [bool],
    ) -> u64 {
        let n = self.len();
        if v == n {
            return 1;
        }
        let mut total = 0;
        for w in 0..n {
            if used[w] || colors[w] != colors[v] {
                continue;
            }
            let consistent = self.adjacency[v][v] == self.adjacency[w][w]
                && (0..v).all(|u| self.adjacency[u][v] == self.adjacency[image[u]][w]);
            if !consistent {
                continue;
            }
            image[v] = w;
            used[w] = true;
            total += self.extend_automorphism(v + 1, colors, image, used);
            used[w] = false;
        }
        image[v] = usize::MAX;
        total
    }
}

fn rank<T: Ord>(sigs: &[T]) -> Vec<usize> {
    let mut sorted: Vec<&T> = sigs.iter().collect();
    sorted.sort();
    sorted.dedup();
    sigs.iter()
        .map(|s| sorted.binary_search(&s).expect("signature present"))
        .collect()
}

fn count_classes(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn first_nonsingleton_cell(colors: &[usize]) -> Option<usize> {
    let mut counts = vec![0usize; colors.len()];
    for &c in colors {
        counts[c] += 1;
    }
    counts.iter().position(|&k| k > 1)
}
