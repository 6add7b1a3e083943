//! Feynman-rule graph sums.
//!
//! A vertex of type `(g, n)` carries the commuting symbol `F_{g,n}` and an
//! edge carries `κ`. Weights and graph sums are polynomials in these
//! symbols with rational coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cache::CatalogCache;
use crate::enumerate::GraphCatalog;
use crate::error::{Error, Result};
use crate::graph::StableGraph;
use crate::poset::ContractionPoset;
use crate::rational::{factorial_q, format_rational, from_biguint, parse_rational, sign, Coefficient, Rational};

/// `κ^kappa · Π F_{g,n}` over a sorted multiset of `(g, n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub kappa: u32,
    pub factors: Vec<(u32, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { kappa: 0, factors: Vec::new() }
    }

    pub fn new(kappa: u32, mut factors: Vec<(u32, u32)>) -> Self {
        factors.sort_unstable();
        Monomial { kappa, factors }
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Monomial::new(self.kappa + other.kappa, factors)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolicWeight {
    terms: BTreeMap<Monomial, Rational>,
}

impl SymbolicWeight {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut w = Self::zero();
        w.add_term(m, c);
        w
    }

    /// The bare symbol `F_{g,n}`.
    pub fn symbol(g: u32, n: u32) -> Self {
        Self::monomial(Monomial::new(0, vec![(g, n)]), Rational::one())
    }

    pub fn kappa() -> Self {
        Self::monomial(Monomial::new(1, Vec::new()), Rational::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SymbolicWeight {
            terms: self.terms.iter().map(|(m, q)| (m.clone(), q * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(Rational::one()), |acc, _| &acc * self)
    }

    /// Replaces every `F_{g,n}` by `images[(g, n)]`; `κ` is kept.
    pub fn substitute(&self, images: &HashMap<(u32, u32), SymbolicWeight>) -> Result<Self> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut product = Self::monomial(Monomial::new(m.kappa, Vec::new()), c.clone());
            for pair in &m.factors {
                let image = images
                    .get(pair)
                    .ok_or_else(|| Error::domain(format!("no substitution for F_{{{},{}}}", pair.0, pair.1)))?;
                product = &product * image;
            }
            out = out + product;
        }
        Ok(out)
    }

    /// `κ ↦ -κ`.
    pub fn flip_kappa(&self) -> Self {
        SymbolicWeight {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * sign(m.kappa as usize)))
                .collect(),
        }
    }

    pub fn evaluate(&self, assignment: &FeynmanAssignment) -> Result<Rational> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c * num::pow(assignment.kappa.clone(), m.kappa as usize);
            for &(g, n) in &m.factors {
                term *= assignment.value(g, n)?;
            }
            total += term;
        }
        Ok(total)
    }

    pub fn to_json(&self) -> WeightJson {
        WeightJson {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| MonomialJson {
                    kappa: m.kappa,
                    factors: m.factors.iter().map(|&(g, n)| [g, n]).collect(),
                    coeff: c.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &WeightJson) -> Self {
        let mut w = Self::zero();
        for t in &json.terms {
            let factors = t.factors.iter().map(|&[g, n]| (g, n)).collect();
            w.add_term(Monomial::new(t.kappa, factors), t.coeff.clone());
        }
        w
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightJson {
    pub terms: Vec<MonomialJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonomialJson {
    pub kappa: u32,
    #[serde(rename = "F")]
    pub factors: Vec<[u32; 2]>,
    #[serde(with = "crate::rational::serde_rational")]
    pub coeff: Rational,
}

impl Add for SymbolicWeight {
    type Output = SymbolicWeight;

    fn add(mut self, rhs: SymbolicWeight) -> SymbolicWeight {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Neg for SymbolicWeight {
    type Output = SymbolicWeight;

    fn neg(self) -> SymbolicWeight {
        self.scaled(&-Rational::one())
    }
}

impl Mul for &SymbolicWeight {
    type Output = SymbolicWeight;

    fn mul(self, rhs: &SymbolicWeight) -> SymbolicWeight {
        let mut out = SymbolicWeight::zero();
        for (a, p) in &self.terms {
            for (b, q) in &rhs.terms {
                out.add_term(a.times(b), p * q);
            }
        }
        out
    }
}

impl Coefficient for SymbolicWeight {
    fn null() -> Self {
        SymbolicWeight::zero()
    }

    fn add_scaled(&mut self, other: &Self, factor: &Rational) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * factor);
        }
    }
}

impl fmt::Display for SymbolicWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", format_rational(c))?;
            match m.kappa {
                0 => {}
                1 => write!(f, "*k")?,
                k => write!(f, "*k^{k}")?,
            }
            for (g, n) in &m.factors {
                write!(f, "*F({g},{n})")?;
            }
        }
        Ok(())
    }
}

/// Numeric values for the symbols `F_{g,n}` and for `κ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeynmanAssignment {
    pub values: BTreeMap<(u32, u32), Rational>,
    pub kappa: Rational,
}

impl FeynmanAssignment {
    pub fn new(values: BTreeMap<(u32, u32), Rational>, kappa: Rational) -> Self {
        FeynmanAssignment { values, kappa }
    }

    pub fn value(&self, g: u32, n: u32) -> Result<&Rational> {
        self.values
            .get(&(g, n))
            .ok_or_else(|| Error::domain(format!("no value for F_({g},{n})")))
    }

    /// Keys are written `"(g,n)"`, values `"p/q"`.
    pub fn values_to_json(&self) -> serde_json::Value {
        let map = self
            .values
            .iter()
            .map(|(&(g, n), q)| (format!("({g},{n})"), serde_json::Value::String(format_rational(q))))
            .collect();
        serde_json::Value::Object(map)
    }

    pub fn values_from_json(json: &serde_json::Value) -> Result<BTreeMap<(u32, u32), Rational>> {
        let obj = json
            .as_object()
            .ok_or_else(|| Error::domain("expected an object mapping \"(g,n)\" to \"p/q\""))?;
        let mut out = BTreeMap::new();
        for (k, v) in obj {
            let pair = parse_pair(k)?;
            let q = match v {
                serde_json::Value::String(s) => parse_rational(s)?,
                serde_json::Value::Number(num) if num.is_i64() => Rational::from_integer(num.as_i64().unwrap().into()),
                _ => return Err(Error::domain(format!("value for {k} is not a rational string"))),
            };
            out.insert(pair, q);
        }
        Ok(out)
    }
}

fn parse_pair(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::domain(format!("bad key {s:?}; expected \"(g,n)\""));
    let inner = s.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
    let (g, n) = inner.split_once(',').ok_or_else(bad)?;
    Ok((g.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?))
}

/// `w_Γ = κ^{|E|} Π_v F_{g_v, val_v}`.
pub fn graph_weight(graph: &StableGraph) -> SymbolicWeight {
    let factors = (0..graph.num_vertices())
        .map(|v| (graph.vertices()[v].genus, graph.valence(v)))
        .collect();
    SymbolicWeight::monomial(Monomial::new(graph.num_edges() as u32, factors), Rational::one())
}

/// `F̃_{g,n} = n! Σ_Γ w_Γ / |Aut Γ|`.
pub fn graph_sum_forward(catalog: &GraphCatalog) -> SymbolicWeight {
    graph_sum(catalog, false)
}

/// `n! Σ_Γ (-κ)^{|E|} / |Aut Γ| Π_v F̃_{g_v, val_v}`; the vertex symbols
/// stand for `F̃`.
pub fn graph_sum_inverse(catalog: &GraphCatalog) -> SymbolicWeight {
    graph_sum(catalog, true)
}

fn graph_sum(catalog: &GraphCatalog, flip: bool) -> SymbolicWeight {
    let n_fact = factorial_q(catalog.legs());
    let mut out = SymbolicWeight::zero();
    for (i, graph) in catalog.graphs().iter().enumerate() {
        let mut c = &n_fact / from_biguint(catalog.aut(i));
        if flip {
            c *= sign(graph.num_edges());
        }
        for (m, q) in graph_weight(graph).terms {
            out.add_term(m, q * &c);
        }
    }
    out
}

/// Forward graph sums for every pair in `pairs`.
pub fn forward_table(pairs: &[(u32, u32)], cache: &CatalogCache) -> Result<HashMap<(u32, u32), SymbolicWeight>> {
    pairs
        .iter()
        .map(|&(g, n)| Ok(((g, n), graph_sum_forward(&*cache.catalog(g, n)?))))
        .collect()
}

/// Substitutes the forward sums into the inverse sum for `(g, n)`; the
/// result should be the bare symbol `F_{g,n}`.
pub fn symbolic_roundtrip(g: u32, n: u32, cache: &CatalogCache) -> Result<SymbolicWeight> {
    let catalog = cache.catalog(g, n)?;
    let inverse = graph_sum_inverse(&catalog);
    let needed = vertex_types(&catalog);
    inverse.substitute(&forward_table(&needed, cache)?)
}

fn vertex_types(catalog: &GraphCatalog) -> Vec<(u32, u32)> {
    let mut pairs: Vec<(u32, u32)> = catalog
        .graphs()
        .iter()
        .flat_map(|gr| (0..gr.num_vertices()).map(move |v| (gr.vertices()[v].genus, gr.valence(v))))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// `g̃(Γ)` as `Σ_{Γ' ≤ Γ} ζ̃(Γ', Γ) w_{Γ'}`, checked against the product
/// `κ^{|E(Γ)|} Π_v F̃_{g_v, val_v}`.
pub fn gtilde_of_graph(poset: &ContractionPoset, index: usize, cache: &CatalogCache) -> Result<SymbolicWeight> {
    let cat = poset.catalog();
    let mut via_poset = SymbolicWeight::zero();
    for lower in 0..poset.len() {
        if poset.leq(lower, index) {
            let zeta = from_biguint(cat.aut(index)) / from_biguint(cat.aut(lower))
                * Rational::from_integer(poset.contraction_count(lower, index).into());
            via_poset.add_scaled(&graph_weight(cat.graph(lower)), &zeta);
        }
    }

    let graph = cat.graph(index);
    let mut via_product = SymbolicWeight::monomial(Monomial::new(graph.num_edges() as u32, Vec::new()), Rational::one());
    for v in 0..graph.num_vertices() {
        let local = cache.catalog(graph.vertices()[v].genus, graph.valence(v))?;
        via_product = &via_product * &graph_sum_forward(&local);
    }

    if via_poset != via_product {
        return Err(Error::Inconsistent(format!(
            "g~ of {graph}: poset sum {via_poset} differs from product {via_product}"
        )));
    }
    Ok(via_poset)
}
