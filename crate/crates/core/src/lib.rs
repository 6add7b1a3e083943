//! Exact combinatorics of stable graphs.
//!
//! The crate enumerates connected stable graphs of genus `g` with `n`
//! unlabeled external legs up to isomorphism, orders them by edge
//! contraction, and builds the Aut-weighted zeta and Möbius functions of
//! that poset. On top of this sit the duality map on formal sums of graphs,
//! the Feynman-rule graph sums and their inversion, a Wick-expansion oracle
//! for those sums, and the orbifold Euler characteristics of the moduli
//! spaces of curves.
//!
//! All arithmetic is over [`num::BigRational`]; nothing is approximated.

pub mod cache;
pub mod canon;
pub mod duality;
pub mod enumerate;
pub mod error;
pub mod euler;
pub mod feynman;
pub mod gaussian;
pub mod graph;
pub mod poset;
pub mod rational;

pub use cache::{CatalogCache, CatalogStore};
pub use canon::CanonicalKey;
pub use enumerate::{abstract_npoint, enumerate, FormalSum, GraphCatalog};
pub use error::{Error, Result};
pub use graph::{StableGraph, Vertex};
pub use poset::{build_poset, contract, ContractionPoset, IncidenceFunction};
pub use rational::Rational;

/// `2g - 2 + n`, the negative Euler characteristic of a genus-`g` surface
/// with `n` punctures. Stable pairs have a positive value.
pub fn euler_grade(g: u32, n: u32) -> i64 {
    2 * g as i64 - 2 + n as i64
}

/// All pairs `(g, n)` with `1 <= 2g - 2 + n <= max_grade`, sorted by
/// `(g, n)`.
pub fn stable_pairs(max_grade: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let max = max_grade as i64;
    let mut g = 0u32;
    while 2 * g as i64 - 2 <= max {
        for n in 0..=(max + 2 - 2 * g as i64).max(0) as u32 {
            let grade = euler_grade(g, n);
            if grade >= 1 && grade <= max {
                out.push((g, n));
            }
        }
        g += 1;
    }
    out
}
