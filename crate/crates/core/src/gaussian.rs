//! The one-dimensional formal Gaussian integral as a graph-free oracle for
//! the forward graph sums.
//!
//! With `t = λ²`, the integrand is `exp(S(z + y))` for
//! `S(x) = Σ t^{g-1} F_{g,n} x^n / n!`. The integral over `y` is the Wick
//! functional `y^{2m} ↦ (2m-1)!! (tκ)^m`, odd powers ↦ 0. Taking the log
//! and reading off `n! · [t^{g-1} z^n]` gives `F̃_{g,n}`.
//!
//! Every monomial `t^a z^b y^c` carries the grade `2a + b + c`. Each term
//! of `S` has grade `2g - 2 + n >= 1`, the grade is additive and the Wick
//! rule preserves it, so truncating at grade `D` is exact below `D`.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde::Serialize;

use crate::cache::CatalogCache;
use crate::error::{Error, Result};
use crate::feynman::{graph_sum_forward, FeynmanAssignment};
use crate::rational::{factorial_q, int, Rational};
use crate::{euler_grade, stable_pairs};

/// Exponents `(a, b, c)` of `t^a z^b y^c`.
type Exponent = (i64, u32, u32);

/// A polynomial in `t^{±1}, z, y` with every term of grade at most
/// `max_grade`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    max_grade: i64,
    terms: BTreeMap<Exponent, Rational>,
}

fn grade(&(a, b, c): &Exponent) -> i64 {
    2 * a + b as i64 + c as i64
}

impl TruncatedSeries {
    pub fn zero(max_grade: i64) -> Self {
        TruncatedSeries { max_grade, terms: BTreeMap::new() }
    }

    pub fn one(max_grade: i64) -> Self {
        let mut s = Self::zero(max_grade);
        s.add_term((0, 0, 0), Rational::one());
        s
    }

    pub fn max_grade(&self) -> i64 {
        self.max_grade
    }

    pub fn coeff(&self, a: i64, b: u32, c: u32) -> Rational {
        self.terms.get(&(a, b, c)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, e: Exponent, q: Rational) {
        if q.is_zero() || grade(&e) > self.max_grade {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, q) in &other.terms {
            out.add_term(*e, q.clone());
        }
        out
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.max_grade);
        for (e, q) in &self.terms {
            out.add_term(*e, q * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.max_grade.min(other.max_grade));
        for (&(a1, b1, c1), p) in &self.terms {
            for (&(a2, b2, c2), q) in &other.terms {
                out.add_term((a1 + a2, b1 + b2, c1 + c2), p * q);
            }
        }
        out
    }

    fn min_grade(&self) -> Option<i64> {
        self.terms.keys().map(grade).min()
    }

    /// `exp(s)` for `s` without terms of grade `<= 0`.
    pub fn exp(&self) -> Result<Self> {
        if self.min_grade().is_some_and(|m| m <= 0) {
            return Err(Error::domain("exp needs a series of positive grade"));
        }
        let mut out = Self::one(self.max_grade);
        let mut power = Self::one(self.max_grade);
        for k in 1..=self.max_grade.max(0) {
            power = power.mul(self).scaled(&(Rational::one() / int(k)));
            out = out.add(&power);
        }
        Ok(out)
    }

    /// `log(s)` for `s = 1 + (terms of positive grade)`.
    pub fn log(&self) -> Result<Self> {
        let mut rest = self.clone();
        if rest.coeff(0, 0, 0) != Rational::one() {
            return Err(Error::domain("log needs constant term 1"));
        }
        rest.add_term((0, 0, 0), -Rational::one());
        if rest.min_grade().is_some_and(|m| m <= 0) {
            return Err(Error::domain("log needs 1 plus a series of positive grade"));
        }
        let mut out = Self::zero(self.max_grade);
        let mut power = Self::one(self.max_grade);
        for k in 1..=self.max_grade.max(0) {
            power = power.mul(&rest);
            let c = (if k % 2 == 1 { int(1) } else { int(-1) }) / int(k);
            out = out.add(&power.scaled(&c));
        }
        Ok(out)
    }

    /// Applies `y^{2m} ↦ (2m-1)!! (tκ)^m`, `y^{odd} ↦ 0`.
    pub fn wick(&self, kappa: &Rational) -> Self {
        let mut out = Self::zero(self.max_grade);
        for (&(a, b, c), q) in &self.terms {
            if c % 2 == 1 {
                continue;
            }
            let m = c / 2;
            let pairings: Rational = (1..=m).map(|i| int(2 * i as i64 - 1)).product();
            let factor = pairings * num::pow(kappa.clone(), m as usize);
            out.add_term((a + m as i64, b, 0), q * factor);
        }
        out
    }
}

/// `S(z + y) = Σ t^{g-1} F_{g,n} (z + y)^n / n!` truncated at grade `max_grade`.
fn action(assignment: &FeynmanAssignment, max_grade: u32) -> Result<TruncatedSeries> {
    let mut s = TruncatedSeries::zero(max_grade as i64);
    for (g, n) in stable_pairs(max_grade) {
        let f = assignment.value(g, n)?;
        let mut binom = Rational::one();
        for j in 0..=n {
            // F x^n / n! expands to F Σ_j z^j y^{n-j} / (j! (n-j)!)
            let c = f / factorial_q(n) * &binom;
            s.add_term((g as i64 - 1, j, n - j), c);
            binom = binom * int((n - j) as i64) / int(j as i64 + 1);
        }
    }
    Ok(s)
}

/// `F̃_{g,n}` for every `1 <= 2g - 2 + n <= max_grade`.
pub fn gaussian_forward(assignment: &FeynmanAssignment, max_grade: u32) -> Result<BTreeMap<(u32, u32), Rational>> {
    if max_grade < 1 {
        return Err(Error::domain("the maximal grade must be at least 1"));
    }
    let integrand = action(assignment, max_grade)?.exp()?;
    let free_energy = integrand.wick(&assignment.kappa).log()?;
    Ok(stable_pairs(max_grade)
        .into_iter()
        .map(|(g, n)| ((g, n), factorial_q(n) * free_energy.coeff(g as i64 - 1, n, 0)))
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundtripEntry {
    pub g: u32,
    pub n: u32,
    #[serde(with = "crate::rational::serde_rational")]
    pub input: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub transformed: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub recovered: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundtripReport {
    pub max_grade: u32,
    pub entries: Vec<RoundtripEntry>,
}

impl RoundtripReport {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.input == e.recovered)
    }
}

/// Runs the transform with `κ`, then with `-κ` on its output.
pub fn gaussian_roundtrip(assignment: &FeynmanAssignment, max_grade: u32) -> Result<RoundtripReport> {
    let forward = gaussian_forward(assignment, max_grade)?;
    let back = gaussian_forward(&FeynmanAssignment::new(forward.clone(), -assignment.kappa.clone()), max_grade)?;
    let entries = forward
        .iter()
        .map(|(&(g, n), f)| {
            Ok(RoundtripEntry {
                g,
                n,
                input: assignment.value(g, n)?.clone(),
                transformed: f.clone(),
                recovered: back[&(g, n)].clone(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(RoundtripReport { max_grade, entries })
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleEntry {
    pub g: u32,
    pub n: u32,
    #[serde(with = "crate::rational::serde_rational")]
    pub oracle: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub graph_sum: Rational,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub max_grade: u32,
    pub entries: Vec<OracleEntry>,
}

impl OracleReport {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.matches)
    }
}

/// Compares the Gaussian values with the evaluated graph sums.
pub fn compare_with_graph_sums(
    assignment: &FeynmanAssignment,
    max_grade: u32,
    cache: &CatalogCache,
) -> Result<OracleReport> {
    let oracle = gaussian_forward(assignment, max_grade)?;
    let mut entries = Vec::with_capacity(oracle.len());
    for ((g, n), value) in oracle {
        debug_assert!(euler_grade(g, n) >= 1);
        let graph_sum = graph_sum_forward(&*cache.catalog(g, n)?).evaluate(assignment)?;
        entries.push(OracleEntry {
            g,
            n,
            matches: graph_sum == value,
            oracle: value,
            graph_sum,
        });
    }
    Ok(OracleReport { max_grade, entries })
}
