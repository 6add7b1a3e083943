//! Orbifold Euler characteristics of `M_{g,n}` and `M̄_{g,n}`.
//!
//! `χ(M_{g,n})` is the Harer-Zagier value. `χ(M̄_{g,n})` is the forward
//! graph sum with `F_{g,n} = χ(M_{g,n})` and `κ = 1`; the inverse sum with
//! vertex values `χ(M̄)` gives back `χ(M)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num::One;
use serde::Serialize;

use crate::cache::CatalogCache;
use crate::enumerate::check_stable_pair;
use crate::error::{Error, Result};
use crate::feynman::{graph_sum_forward, graph_sum_inverse, FeynmanAssignment};
use crate::rational::{binomial, factorial_q, format_rational, from_biguint, int, sign, Rational};
use crate::stable_pairs;

/// `B_k` for even `k`, with `B_1 = -1/2` in the recurrence.
pub fn bernoulli(k: u32) -> Result<Rational> {
    if k % 2 == 1 {
        return Err(Error::domain(format!("B_{k}: only even indices are supported")));
    }
    let mut b: Vec<Rational> = vec![Rational::one()];
    for m in 1..=k {
        let s: Rational = (0..m).map(|j| from_biguint(&binomial(m + 1, j)) * &b[j as usize]).sum();
        b.push(-s / int(m as i64 + 1));
    }
    Ok(b[k as usize].clone())
}

/// `χ(M_{g,n}) = (-1)^n (2g-1) B_{2g} / (2g)! · (2g+n-3)!`.
pub fn harer_zagier(g: u32, n: u32) -> Result<Rational> {
    check_stable_pair(g, n)?;
    let b = bernoulli(2 * g)?;
    Ok(sign(n as usize) * int(2 * g as i64 - 1) * b / factorial_q(2 * g) * factorial_q(2 * g + n - 3))
}

/// Harer-Zagier values for all pairs of grade at most `max_grade`, `κ = 1`.
pub fn harer_zagier_assignment(max_grade: u32) -> Result<FeynmanAssignment> {
    let values = stable_pairs(max_grade)
        .into_iter()
        .map(|(g, n)| Ok(((g, n), harer_zagier(g, n)?)))
        .collect::<Result<_>>()?;
    Ok(FeynmanAssignment::new(values, Rational::one()))
}

fn grade_of(g: u32, n: u32) -> u32 {
    2 * g + n - 2
}

/// `χ(M̄_{g,n}) = n! Σ_Γ 1/|Aut Γ| Π_v χ(M_{g_v, val_v})`.
pub fn chi_closed(g: u32, n: u32, cache: &CatalogCache) -> Result<Rational> {
    check_stable_pair(g, n)?;
    let assignment = harer_zagier_assignment(grade_of(g, n))?;
    graph_sum_forward(&*cache.catalog(g, n)?).evaluate(&assignment)
}

/// `n! Σ_Γ (-1)^{|E|}/|Aut Γ| Π_v χ(M̄_{g_v, val_v})`, which should be
/// `χ(M_{g,n})`.
pub fn chi_open_inverted(g: u32, n: u32, cache: &CatalogCache) -> Result<Rational> {
    check_stable_pair(g, n)?;
    let closed = stable_pairs(grade_of(g, n))
        .into_iter()
        .map(|(h, l)| Ok(((h, l), chi_closed(h, l, cache)?)))
        .collect::<Result<_>>()?;
    let assignment = FeynmanAssignment::new(closed, Rational::one());
    graph_sum_inverse(&*cache.catalog(g, n)?).evaluate(&assignment)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerEntry {
    pub g: u32,
    pub n: u32,
    #[serde(with = "crate::rational::serde_rational")]
    pub chi_open: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub chi_closed: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerTable {
    pub max_grade: u32,
    pub entries: Vec<EulerEntry>,
}

impl EulerTable {
    pub fn get(&self, g: u32, n: u32) -> Option<&EulerEntry> {
        self.entries.iter().find(|e| e.g == g && e.n == n)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("g,n,chi_open,chi_closed\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                e.g,
                e.n,
                format_rational(&e.chi_open),
                format_rational(&e.chi_closed)
            );
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("table serializes")
    }
}

/// Both columns for every `1 <= 2g - 2 + n <= max_grade`, checking that the
/// inverted sum reproduces the Harer-Zagier value at each entry.
pub fn euler_table(max_grade: u32, cache: &CatalogCache) -> Result<EulerTable> {
    if max_grade < 1 {
        return Err(Error::domain("the maximal grade must be at least 1"));
    }
    let pairs = stable_pairs(max_grade);
    let open = harer_zagier_assignment(max_grade)?;
    let mut closed = BTreeMap::new();
    for &(g, n) in &pairs {
        let value = graph_sum_forward(&*cache.catalog(g, n)?).evaluate(&open)?;
        closed.insert((g, n), value);
    }
    let closed = FeynmanAssignment::new(closed, Rational::one());
    let mut entries = Vec::with_capacity(pairs.len());
    for &(g, n) in &pairs {
        let inverted = graph_sum_inverse(&*cache.catalog(g, n)?).evaluate(&closed)?;
        let expected = open.value(g, n)?;
        if &inverted != expected {
            return Err(Error::Inconsistent(format!(
                "chi({g},{n}): inverted sum {} differs from Harer-Zagier {}",
                format_rational(&inverted),
                format_rational(expected)
            )));
        }
        entries.push(EulerEntry {
            g,
            n,
            chi_open: inverted,
            chi_closed: closed.value(g, n)?.clone(),
        });
    }
    Ok(EulerTable { max_grade, entries })
}
