//! Lie algebras of polynomial differential operators attached to a diagram.
//!
//! The nilpotent algebra has the natural basis {x^m ∂_j} where the exponent
//! support lies among the strict ancestors of j and Σ m_s κ(s,j) ≤ κ(j).
//! The solvable extension adds the Euler operators h_i = x_i ∂_i.  Brackets
//! of basis elements always collapse to an integer multiple of a single
//! basis element; the structure table records exactly those entries.

use crate::diagram::{DiagramError, NodeId, TreeDiagram};
use num::bigint::Sign;
use num::{BigInt, Zero};
use serde_json::json;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Integer vector of length n+1; index 0 is the homogenizer coordinate.
/// Coordinates always sum to zero.
pub type WeightVector = Vec<i64>;

/// Largest basis the enumerator will produce before giving up.
pub const MAX_BASIS: usize = 1_000_000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LieError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("natural basis exceeds {MAX_BASIS} elements")]
    BasisTooLarge,
    #[error("bracket of basis elements {i} and {j} is not a multiple of one basis element: {detail}")]
    ClosureViolation { i: usize, j: usize, detail: String },
}

/// A monomial differential operator x^m ∂_target.  `exps` never stores zero
/// exponents.  Ordering is (target ascending, exponents colex ascending):
/// exponent vectors compare at the highest node where they differ.  Colex
/// puts x1*d3 before x2*d3, extending the natural filtration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialOperator {
    pub exps: BTreeMap<NodeId, u64>,
    pub target: NodeId,
}

impl MonomialOperator {
    pub fn new(exps: BTreeMap<NodeId, u64>, target: NodeId) -> Self {
        let exps = exps.into_iter().filter(|&(_, e)| e > 0).collect();
        MonomialOperator { exps, target }
    }

    /// ∂_j (zero exponents).
    pub fn partial(target: NodeId) -> Self {
        MonomialOperator { exps: BTreeMap::new(), target }
    }

    /// Euler operator h_i = x_i ∂_i.
    pub fn euler(i: NodeId) -> Self {
        MonomialOperator { exps: BTreeMap::from([(i, 1)]), target: i }
    }

    pub fn exponent(&self, node: NodeId) -> u64 {
        self.exps.get(&node).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u64 {
        self.exps.values().sum()
    }

    /// Renumbers nodes through an embedding (`embedding[k-1]` is the image of
    /// node k).
    pub fn embed(&self, embedding: &[NodeId]) -> Self {
        MonomialOperator {
            exps: self.exps.iter().map(|(&s, &e)| (embedding[s - 1], e)).collect(),
            target: embedding[self.target - 1],
        }
    }
}

fn colex_cmp(a: &BTreeMap<NodeId, u64>, b: &BTreeMap<NodeId, u64>) -> Ordering {
    let mut ai = a.iter().rev().peekable();
    let mut bi = b.iter().rev().peekable();
    loop {
        match (ai.peek(), bi.peek()) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(&(&na, &ea)), Some(&(&nb, &eb))) => {
                if na != nb {
                    // The map with a positive exponent at the higher node wins.
                    return na.cmp(&nb);
                }
                if ea != eb {
                    return ea.cmp(&eb);
                }
                ai.next();
                bi.next();
            }
        }
    }
}

impl Ord for MonomialOperator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.target
            .cmp(&other.target)
            .then_with(|| colex_cmp(&self.exps, &other.exps))
    }
}

impl PartialOrd for MonomialOperator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MonomialOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&s, &e) in &self.exps {
            if e == 1 {
                write!(f, "x{s}*")?;
            } else {
                write!(f, "x{s}^{e}*")?;
            }
        }
        write!(f, "d{}", self.target)
    }
}

/// [x^a ∂_j, x^b ∂_k] = b_j x^{a+b-e_j} ∂_k − a_k x^{a+b-e_k} ∂_j, zero terms
/// dropped and equal monomials merged (the two terms coincide iff j = k).
/// The same formula covers Euler operators.
pub fn bracket(u: &MonomialOperator, v: &MonomialOperator) -> Vec<(BigInt, MonomialOperator)> {
    let mut terms: BTreeMap<MonomialOperator, BigInt> = BTreeMap::new();
    let mut add = |coef: BigInt, differentiated: NodeId, target: NodeId| {
        if coef.is_zero() {
            return;
        }
        let mut exps = u.exps.clone();
        for (&s, &e) in &v.exps {
            *exps.entry(s).or_insert(0) += e;
        }
        let slot = exps.get_mut(&differentiated).expect("positive exponent was just checked");
        *slot -= 1;
        if *slot == 0 {
            exps.remove(&differentiated);
        }
        *terms.entry(MonomialOperator { exps, target }).or_insert_with(BigInt::zero) += coef;
    };
    let b_j = v.exponent(u.target);
    if b_j > 0 {
        add(BigInt::from(b_j), u.target, v.target);
    }
    let a_k = u.exponent(v.target);
    if a_k > 0 {
        add(-BigInt::from(a_k), v.target, u.target);
    }
    terms.into_iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (c, m)).collect()
}

/// All x^m ∂_j with support(m) among the strict ancestors of j and
/// Σ m_s κ(s,j) ≤ κ(j), in canonical order.
pub fn natural_basis(diagram: &TreeDiagram) -> Result<Vec<MonomialOperator>, LieError> {
    let mut out = Vec::new();
    for j in 1..=diagram.node_count() {
        let mut ancestors: Vec<NodeId> = diagram.ancestors(j)?.into_iter().collect();
        ancestors.retain(|&s| s != j);
        let costs: Vec<BigInt> =
            ancestors.iter().map(|&s| diagram.kappa_rel(s, j)).collect::<Result<_, _>>()?;
        let budget = diagram.kappa(j)?;
        let mut exps: Vec<u64> = vec![0; ancestors.len()];
        enumerate(&ancestors, &costs, budget, 0, &mut exps, j, &mut out)?;
    }
    out.sort();
    Ok(out)
}

fn enumerate(
    ancestors: &[NodeId],
    costs: &[BigInt],
    budget: BigInt,
    pos: usize,
    exps: &mut Vec<u64>,
    target: NodeId,
    out: &mut Vec<MonomialOperator>,
) -> Result<(), LieError> {
    if pos == ancestors.len() {
        if out.len() >= MAX_BASIS {
            return Err(LieError::BasisTooLarge);
        }
        let map = ancestors
            .iter()
            .zip(exps.iter())
            .filter(|&(_, &e)| e > 0)
            .map(|(&s, &e)| (s, e))
            .collect();
        out.push(MonomialOperator { exps: map, target });
        return Ok(());
    }
    let mut remaining = budget.clone();
    let mut m = 0u64;
    loop {
        if remaining.sign() == Sign::Minus {
            break;
        }
        exps[pos] = m;
        enumerate(ancestors, costs, remaining.clone(), pos + 1, exps, target, out)?;
        remaining -= &costs[pos];
        m += 1;
    }
    exps[pos] = 0;
    Ok(())
}

/// Homogenized weight ε_j − Σ m_s ε_s − (1 − Σ m_s) ε₀; coordinates sum to 0.
/// Euler operators land on the zero vector.
pub fn weight_of(u: &MonomialOperator, node_count: usize) -> WeightVector {
    let mut w = vec![0i64; node_count + 1];
    w[u.target] += 1;
    let mut total: i64 = 0;
    for (&s, &e) in &u.exps {
        let e = i64::try_from(e).expect("exponent fits in i64");
        w[s] -= e;
        total += e;
    }
    w[0] -= 1 - total;
    debug_assert_eq!(w.iter().sum::<i64>(), 0);
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// The nilpotent algebra spanned by the natural basis.
    Nilpotent,
    /// The solvable extension by the Euler operators h_i.
    Solvable,
}

/// A Lie algebra with a fixed ordered basis and a complete integer structure
/// table.  Immutable after construction.
#[derive(Debug, Clone)]
pub struct LieAlgebraModel {
    pub diagram: TreeDiagram,
    pub flavor: Flavor,
    pub basis: Vec<MonomialOperator>,
    pub weights: Vec<WeightVector>,
    /// Entries for index pairs i < j only; absent means zero bracket.
    table: BTreeMap<(usize, usize), (BigInt, usize)>,
}

impl LieAlgebraModel {
    pub fn nilpotent(diagram: &TreeDiagram) -> Result<Self, LieError> {
        Self::build(diagram, Flavor::Nilpotent)
    }

    pub fn solvable(diagram: &TreeDiagram) -> Result<Self, LieError> {
        Self::build(diagram, Flavor::Solvable)
    }

    fn build(diagram: &TreeDiagram, flavor: Flavor) -> Result<Self, LieError> {
        let mut basis = natural_basis(diagram)?;
        if flavor == Flavor::Solvable {
            basis.extend((1..=diagram.node_count()).map(MonomialOperator::euler));
            basis.sort();
        }
        let index: BTreeMap<&MonomialOperator, usize> =
            basis.iter().enumerate().map(|(i, u)| (u, i)).collect();
        let weights = basis.iter().map(|u| weight_of(u, diagram.node_count())).collect();
        let mut table = BTreeMap::new();
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let terms = bracket(&basis[i], &basis[j]);
                match terms.len() {
                    0 => {}
                    1 => {
                        let (coef, mono) = &terms[0];
                        let Some(&k) = index.get(mono) else {
                            return Err(LieError::ClosureViolation {
                                i,
                                j,
                                detail: format!("{coef}*{mono} is outside the basis"),
                            });
                        };
                        table.insert((i, j), (coef.clone(), k));
                    }
                    _ => {
                        return Err(LieError::ClosureViolation {
                            i,
                            j,
                            detail: format!("{} independent terms", terms.len()),
                        });
                    }
                }
            }
        }
        Ok(LieAlgebraModel { diagram: diagram.clone(), flavor, basis, weights, table })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, u: &MonomialOperator) -> Option<usize> {
        self.basis.binary_search(u).ok()
    }

    /// [u_i, u_j] as (coefficient, basis index); None when zero.
    pub fn bracket_entry(&self, i: usize, j: usize) -> Option<(BigInt, usize)> {
        match i.cmp(&j) {
            Ordering::Equal => None,
            Ordering::Less => self.table.get(&(i, j)).cloned(),
            Ordering::Greater => self.table.get(&(j, i)).map(|(c, k)| (-c, *k)),
        }
    }

    /// Iterates over the stored (i, j, coef, k) entries with i < j.
    pub fn table_entries(&self) -> impl Iterator<Item = (usize, usize, &BigInt, usize)> {
        self.table.iter().map(|(&(i, j), (c, k))| (i, j, c, *k))
    }

    /// Basis indices commuting with the whole algebra.
    pub fn center(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| (0..self.dim()).all(|j| self.bracket_entry(i, j).is_none()))
            .collect()
    }

    /// Checks [[u_i,u_j],u_k] + [[u_j,u_k],u_i] + [[u_k,u_i],u_j] = 0 for all
    /// triples; returns the first failing triple.
    pub fn verify_jacobi(&self) -> Result<(), (usize, usize, usize)> {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        if let Some((alpha, l)) = self.bracket_entry(a, b) {
                            if let Some((beta, m)) = self.bracket_entry(l, c) {
                                *acc.entry(m).or_insert_with(BigInt::zero) += alpha * beta;
                            }
                        }
                    }
                    if acc.values().any(|c| !c.is_zero()) {
                        return Err((i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    /// Spans of the lower central series g, [g,g], [g,[g,g]], … as index
    /// sets, ending at the first empty or repeated term.
    pub fn lower_central_series(&self) -> Vec<BTreeSet<usize>> {
        self.descending_series(false)
    }

    /// Spans of the derived series g, [g,g], [[g,g],[g,g]], …
    pub fn derived_series(&self) -> Vec<BTreeSet<usize>> {
        self.descending_series(true)
    }

    fn descending_series(&self, derived: bool) -> Vec<BTreeSet<usize>> {
        let mut series: Vec<BTreeSet<usize>> = vec![(0..self.dim()).collect()];
        loop {
            let cur = series.last().unwrap();
            let mut next = BTreeSet::new();
            for &j in cur {
                let left: Box<dyn Iterator<Item = usize>> = if derived {
                    Box::new(cur.iter().copied())
                } else {
                    Box::new(0..self.dim())
                };
                for i in left {
                    if let Some((_, k)) = self.bracket_entry(i, j) {
                        next.insert(k);
                    }
                }
            }
            let stop = next.is_empty() || next == *cur;
            series.push(next);
            if stop {
                if series.last().unwrap() == &series[series.len() - 2] {
                    series.pop();
                }
                return series;
            }
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().last().unwrap().is_empty()
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().last().unwrap().is_empty()
    }

    /// Schema: {basis: [{exps: {node: exp}, target}], brackets: [[i, j, coef, k]]}
    /// with 0-based basis indices and entries only for i < j.
    pub fn dump_json(&self) -> serde_json::Value {
        let basis: Vec<_> = self
            .basis
            .iter()
            .map(|u| {
                let exps: serde_json::Map<String, serde_json::Value> = u
                    .exps
                    .iter()
                    .map(|(&s, &e)| (s.to_string(), json!(e)))
                    .collect();
                json!({"exps": exps, "target": u.target})
            })
            .collect();
        let brackets: Vec<_> = self
            .table_entries()
            .map(|(i, j, c, k)| {
                let c = i64::try_from(c).expect("structure constant fits in i64");
                json!([i, j, c, k])
            })
            .collect();
        json!({"basis": basis, "brackets": brackets})
    }
}
