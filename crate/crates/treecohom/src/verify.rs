//! Exact identity checkers over the computed cohomology.
//!
//! Each check returns a `CheckReport` rather than failing: a false identity
//! is data, not a panic.  Construction problems (bad diagram, oversized
//! basis) are still hard errors.  All comparisons are exact; inequalities
//! are compared over the integers.

use std::collections::BTreeMap;

use num::{BigInt, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::closedform::{self, ClosedFormError};
use crate::complex::{BettiMethod, ComplexError, ExteriorComplex, ExteriorMonomial, SparseExactMatrix};
use crate::diagram::{BuiltinFamily, DiagramError, TreeDiagram};
use crate::liealg::{Flavor, LieAlgebraModel, LieError, MonomialOperator, WeightVector};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error("coefficient {0} does not fit in a matrix entry")]
    CoefficientTooLarge(BigInt),
}

/// Sparse Laurent polynomial: exponent vectors in Z^dim mapped to integer
/// coefficients, no zero coefficients stored.  Keys compare lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<Vec<i64>, BigInt>,
}

impl LaurentPoly {
    pub fn zero(dim: usize) -> Self {
        LaurentPoly { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        LaurentPoly::monomial(vec![0; dim], BigInt::from(1))
    }

    pub fn monomial(exps: Vec<i64>, coef: BigInt) -> Self {
        let mut p = LaurentPoly::zero(exps.len());
        p.add_term(exps, coef);
        p
    }

    /// 1 - e^w; collapses to zero when w = 0.
    pub fn one_minus_exp(w: &[i64]) -> Self {
        let mut p = LaurentPoly::one(w.len());
        p.add_term(w.to_vec(), BigInt::from(-1));
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, BigInt> {
        &self.terms
    }

    pub fn coeff(&self, exps: &[i64]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Vec<i64>, coef: BigInt) {
        debug_assert_eq!(exps.len(), self.dim);
        if coef.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps).or_insert_with(BigInt::zero);
        *slot += coef;
        if slot.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, c)| c.is_zero())
                .map(|(k, _)| k.clone())
                .expect("zero entry present");
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.dim, other.dim);
        let mut out = LaurentPoly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<i64> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    /// Lex-first exponent vector where the coefficients differ.
    pub fn first_difference(&self, other: &LaurentPoly) -> Option<(Vec<i64>, BigInt, BigInt)> {
        let keys: std::collections::BTreeSet<&Vec<i64>> =
            self.terms.keys().chain(other.terms.keys()).collect();
        for k in keys {
            let a = self.coeff(k);
            let b = other.coeff(k);
            if a != b {
                return Some((k.clone(), a, b));
            }
        }
        None
    }
}

/// Graded Euler product over the basis: the product of 1 - e^{weight(u)}.
pub fn euler_lhs(model: &LieAlgebraModel) -> LaurentPoly {
    let dim = model.diagram.node_count() + 1;
    let mut out = LaurentPoly::one(dim);
    for w in &model.weights {
        out = out.mul(&LaurentPoly::one_minus_exp(w));
    }
    out
}

/// Signed sum of per-weight cohomology dimensions.
pub fn euler_rhs(
    exp_dim: usize,
    per_weight: &BTreeMap<(usize, WeightVector), usize>,
) -> LaurentPoly {
    let mut out = LaurentPoly::zero(exp_dim);
    for ((p, w), b) in per_weight {
        let sign = if p % 2 == 0 { 1 } else { -1 };
        out.add_term(w.clone(), BigInt::from(*b as i64 * sign));
    }
    out
}

/// Plumbing for the checkers below.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub details: Value,
    pub witness: Option<Value>,
}

impl CheckReport {
    fn new(check: &str, pass: bool, details: Value, witness: Option<Value>) -> Self {
        debug_assert!(pass || witness.is_some(), "failing report needs a witness");
        CheckReport { check: check.to_string(), pass, details, witness }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": self.check,
            "pass": self.pass,
            "details": self.details,
            "witness": self.witness.clone().unwrap_or(Value::Null),
        })
    }
}

fn difference_witness(side_a: &str, lhs: &LaurentPoly, side_b: &str, rhs: &LaurentPoly) -> Value {
    match lhs.first_difference(rhs) {
        Some((exps, a, b)) => json!({
            "exponent": exps,
            side_a: a.to_string(),
            side_b: b.to_string(),
        }),
        None => Value::Null,
    }
}

/// Sum of the basis weights over the factors of a wedge word.
fn monomial_weight(model: &LieAlgebraModel, mono: ExteriorMonomial) -> WeightVector {
    let mut w = vec![0i64; model.diagram.node_count() + 1];
    for index in mono.indices() {
        for (slot, x) in model.weights[index].iter().enumerate() {
            w[slot] += x;
        }
    }
    w
}

/// Euler characteristic per weight: the graded product over the basis must
/// equal the signed sum of per-weight Betti numbers.
pub fn check_euler(model: &LieAlgebraModel) -> Result<CheckReport, VerifyError> {
    let complex = ExteriorComplex::new(model)?;
    let table = complex.betti(BettiMethod::Laplacian)?;
    let lhs = euler_lhs(model);
    let rhs = euler_rhs(model.diagram.node_count() + 1, &table.per_weight);
    let pass = lhs == rhs;
    let details = json!({
        "flavor": match model.flavor {
            Flavor::Nilpotent => "nilpotent",
            Flavor::Solvable => "solvable",
        },
        "dim": model.dim(),
        "product_terms": lhs.term_count(),
        "betti": table.betti,
    });
    let witness =
        (!pass).then(|| difference_witness("product", &lhs, "cohomology_sum", &rhs));
    Ok(CheckReport::new("euler", pass, details, witness))
}

/// Signed weight vector of a permutation: the sum of e_{s(p)} - e_{s(q)}
/// over inverted position pairs p < q.
fn tau(order: &closedform::TotalOrder) -> Vec<i64> {
    let sigma = order.ascending();
    let mut w = vec![0i64; sigma.len()];
    for p in 0..sigma.len() {
        for q in p + 1..sigma.len() {
            if sigma[p] > sigma[q] {
                w[sigma[p]] += 1;
                w[sigma[q]] -= 1;
            }
        }
    }
    w
}

/// The path-diagram Euler identity and its Vandermonde determinant form.
/// Stage one checks the graded product against the signed permutation sum;
/// stage two multiplies both sides by e^{(n-i) eps_i} and checks the
/// resulting alternant against the determinant expansion.
pub fn check_vandermonde(n: usize) -> Result<CheckReport, VerifyError> {
    let diagram = TreeDiagram::builtin(BuiltinFamily::Path(n))?;
    let model = LieAlgebraModel::nilpotent(&diagram)?;
    let lhs = euler_lhs(&model);
    let harmonics = closedform::harmonic_monomials_an0(n);
    let mut rhs = LaurentPoly::zero(n + 1);
    for (_, order) in &harmonics {
        rhs.add_term(tau(order), BigInt::from(order.sign()));
    }
    let stage_one = lhs == rhs;

    let mut shift = vec![0i64; n + 1];
    for (i, s) in shift.iter_mut().enumerate() {
        *s = (n - i) as i64;
    }
    let mult = LaurentPoly::monomial(shift, BigInt::from(1));
    let mut vandermonde = LaurentPoly::one(n + 1);
    for i in 0..=n {
        for j in i + 1..=n {
            let mut zi = vec![0i64; n + 1];
            zi[i] = 1;
            let mut zj = vec![0i64; n + 1];
            zj[j] = 1;
            let factor =
                LaurentPoly::monomial(zi, BigInt::from(1)).sub(&LaurentPoly::monomial(zj, BigInt::from(1)));
            vandermonde = vandermonde.mul(&factor);
        }
    }
    let mut determinant = LaurentPoly::zero(n + 1);
    for (_, order) in &harmonics {
        let sigma = order.ascending();
        let mut exps = vec![0i64; n + 1];
        for (i, &s) in sigma.iter().enumerate() {
            exps[s] += (n - i) as i64;
        }
        determinant.add_term(exps, BigInt::from(order.sign()));
    }
    let shifted_lhs = lhs.mul(&mult);
    let shifted_rhs = rhs.mul(&mult);
    let stage_two =
        shifted_lhs == vandermonde && shifted_rhs == determinant && vandermonde == determinant;

    let pass = stage_one && stage_two;
    let details = json!({
        "n": n,
        "signed_terms": determinant.term_count(),
    });
    let witness = (!pass).then(|| {
        if !stage_one {
            difference_witness("product", &lhs, "permutation_sum", &rhs)
        } else {
            difference_witness("alternant", &vandermonde, "determinant", &determinant)
        }
    });
    Ok(CheckReport::new("vandermonde", pass, details, witness))
}

/// Euler identity of the branched path, with the cohomology side read off
/// the basic elements: each contributes (-1)^degree e^{weight of its chain}.
pub fn check_anm_identity(n: usize, m: usize) -> Result<CheckReport, VerifyError> {
    let diagram = TreeDiagram::builtin(BuiltinFamily::BranchedPath(n, m))?;
    let model = LieAlgebraModel::nilpotent(&diagram)?;
    let lhs = euler_lhs(&model);
    let mut rhs = LaurentPoly::zero(n + m + 1);
    for element in closedform::basic_elements(n, m)? {
        let mono = element.chain.leading().expect("basic element chains are nonzero");
        debug_assert!(element
            .chain
            .terms
            .keys()
            .all(|t| monomial_weight(&model, *t) == monomial_weight(&model, mono)));
        let sign = if element.degree() % 2 == 0 { 1 } else { -1 };
        rhs.add_term(monomial_weight(&model, mono), BigInt::from(sign));
    }
    let pass = lhs == rhs;
    let details = json!({
        "n": n,
        "m": m,
        "product_terms": lhs.term_count(),
    });
    let witness = (!pass).then(|| difference_witness("product", &lhs, "basic_sum", &rhs));
    Ok(CheckReport::new("anm", pass, details, witness))
}

/// Total rank bound: the Betti sum must reach 2^(number of tips), and the
/// explicit witness wedges of tip operators must be harmonic.  Each tip
/// contributes x_p^d d_t for its heaviest-tail in-edge (p, t, d); the bare
/// derivation when the diagram is a single node.
pub fn check_total_rank(model: &LieAlgebraModel) -> Result<CheckReport, VerifyError> {
    debug_assert_eq!(model.flavor, Flavor::Nilpotent);
    let complex = ExteriorComplex::new(model)?;
    let table = complex.betti(BettiMethod::Laplacian)?;
    let total: usize = table.betti.iter().sum();
    let tips = model.diagram.tips();
    let bound = 1usize << tips.len();

    let mut witness_indices = Vec::with_capacity(tips.len());
    for &t in &tips {
        let op = match model.diagram.edges().iter().filter(|e| e.head == t).max_by_key(|e| e.tail)
        {
            Some(e) => MonomialOperator::new(BTreeMap::from([(e.tail, e.weight)]), t),
            None => MonomialOperator::partial(t),
        };
        let index = model.index_of(&op).expect("tip witness saturates its budget");
        witness_indices.push(index);
    }
    let mut broken = None;
    for mask in 0u64..bound as u64 {
        let mut bits = 0u64;
        for (pos, &index) in witness_indices.iter().enumerate() {
            if mask & (1 << pos) != 0 {
                bits |= 1 << index;
            }
        }
        let mono = ExteriorMonomial::from_bits(bits);
        if !complex.apply_coboundary(mono).is_empty() || !complex.apply_boundary(mono).is_empty()
        {
            broken = Some(mono);
            break;
        }
    }

    let pass = total >= bound && broken.is_none();
    let details = json!({
        "total_cohomology": total,
        "tips": tips.len(),
        "bound": bound,
    });
    let witness = (!pass).then(|| match broken {
        Some(mono) => json!({
            "reason": "witness wedge is not harmonic",
            "monomial": mono.indices(),
        }),
        None => json!({
            "reason": "Betti sum below bound",
            "total_cohomology": total,
            "bound": bound,
        }),
    });
    Ok(CheckReport::new("totalrank", pass, details, witness))
}

/// First and second Betti numbers: b1 must count roots plus edges, b2 must
/// exceed b1^2/4, and b2 is compared against the pair bound C(b1, 2).
pub fn check_b2(model: &LieAlgebraModel) -> Result<CheckReport, VerifyError> {
    debug_assert_eq!(model.flavor, Flavor::Nilpotent);
    let complex = ExteriorComplex::new(model)?;
    let table = complex.betti(BettiMethod::Laplacian)?;
    let b1 = table.betti.get(1).copied().unwrap_or(0);
    let b2 = table.betti.get(2).copied().unwrap_or(0);
    let expected_b1 = model.diagram.roots().len() + model.diagram.edges().len();
    let pair_bound = expected_b1 * expected_b1.saturating_sub(1) / 2;

    let clause_count = b1 == expected_b1;
    let clause_quarter = 4 * b2 > b1 * b1;
    let clause_pairs = b2 >= pair_bound;
    let pass = clause_count && clause_quarter && clause_pairs;

    let details = json!({
        "b1": b1,
        "b2": b2,
        "roots_plus_edges": expected_b1,
        "pair_bound": pair_bound,
    });
    let witness = (!pass).then(|| {
        let mut violated = Vec::new();
        if !clause_count {
            violated.push(format!("b1 = {b1} != roots + edges = {expected_b1}"));
        }
        if !clause_quarter {
            violated.push(format!("4*b2 = {} <= b1^2 = {}", 4 * b2, b1 * b1));
        }
        if !clause_pairs {
            violated.push(format!("b2 = {b2} < C(b1, 2) = {pair_bound}"));
        }
        json!({ "violated": violated })
    });
    Ok(CheckReport::new("b2", pass, details, witness))
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut out = 1usize;
    for x in 0..k.min(n - k) {
        out = out * (n - x) / (x + 1);
    }
    out
}

/// Cohomology of the solvable extension: Betti numbers must be the binomial
/// coefficients over the node count, and the weight-zero subcomplex must be
/// exactly the wedges of the Euler operators with vanishing differentials.
pub fn check_solvable(diagram: &TreeDiagram) -> Result<CheckReport, VerifyError> {
    let model = LieAlgebraModel::solvable(diagram)?;
    let complex = ExteriorComplex::new(&model)?;
    let table = complex.betti(BettiMethod::Laplacian)?;
    let nodes = diagram.node_count();

    let expected: Vec<usize> = (0..=model.dim()).map(|p| binomial(nodes, p)).collect();
    let clause_betti = table.betti == expected;

    let euler_indices: Vec<usize> = (1..=nodes)
        .map(|i| model.index_of(&MonomialOperator::euler(i)).expect("Euler operator in basis"))
        .collect();
    let zero_weight = vec![0i64; nodes + 1];
    let mut bad_block = None;
    for p in 0..=model.dim() {
        let block = complex.block_monomials(p, &zero_weight);
        let mut expected_block: Vec<ExteriorMonomial> = subsets_of(&euler_indices, p)
            .into_iter()
            .map(|s| ExteriorMonomial::from_indices(&s))
            .collect();
        expected_block.sort();
        if block != expected_block {
            bad_block = Some(json!({
                "degree": p,
                "reason": "weight-zero block differs from the Euler wedges",
                "block_size": block.len(),
                "expected_size": expected_block.len(),
            }));
            break;
        }
        if let Some(mono) = block.iter().find(|&&m| {
            !complex.apply_coboundary(m).is_empty() || !complex.apply_boundary(m).is_empty()
        }) {
            bad_block = Some(json!({
                "degree": p,
                "reason": "differential does not vanish on an Euler wedge",
                "monomial": mono.indices(),
            }));
            break;
        }
    }

    let pass = clause_betti && bad_block.is_none();
    let details = json!({
        "nodes": nodes,
        "dim": model.dim(),
        "betti": table.betti,
    });
    let witness = (!pass).then(|| match bad_block {
        Some(w) => w,
        None => json!({
            "reason": "Betti numbers are not binomial",
            "betti": table.betti,
            "expected": expected,
        }),
    });
    Ok(CheckReport::new("solvable", pass, details, witness))
}

fn subsets_of(values: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(values: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..values.len() {
            cur.push(values[i]);
            rec(values, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(values, k, 0, &mut cur, &mut out);
    out
}

/// Closed-form basis against the Laplacian: per degree the basic element
/// count must match the Betti number and the Poincare polynomial, and inside
/// every (degree, weight) block the chains must have full rank equal to the
/// Laplacian kernel dimension.
pub fn check_closedform(n: usize, m: usize) -> Result<CheckReport, VerifyError> {
    let diagram = TreeDiagram::builtin(BuiltinFamily::BranchedPath(n, m))?;
    let model = LieAlgebraModel::nilpotent(&diagram)?;
    let complex = ExteriorComplex::new(&model)?;
    let table = complex.betti(BettiMethod::Laplacian)?;
    let basics = closedform::basic_elements(n, m)?;
    let poly = closedform::poincare_poly_anm(n, m)?;

    let mut counts = vec![0usize; model.dim() + 1];
    let mut blocks: BTreeMap<(usize, WeightVector), Vec<&crate::complex::ChainVector>> =
        BTreeMap::new();
    for element in &basics {
        counts[element.degree()] += 1;
        let mono = element.chain.leading().expect("basic element chains are nonzero");
        blocks
            .entry((element.degree(), monomial_weight(&model, mono)))
            .or_default()
            .push(&element.chain);
    }

    let poly_counts: Vec<usize> =
        (0..=model.dim()).map(|p| poly.coeff(p).to_usize().unwrap_or(usize::MAX)).collect();
    let clause_counts = counts == table.betti && counts == poly_counts;

    let mut bad_block = None;
    for ((p, w), chains) in &blocks {
        let kernel = table.per_weight.get(&(*p, w.clone())).copied().unwrap_or(0);
        let mut rows: Vec<ExteriorMonomial> =
            chains.iter().flat_map(|c| c.terms.keys().copied()).collect();
        rows.sort();
        rows.dedup();
        let row_of: BTreeMap<ExteriorMonomial, usize> =
            rows.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let cols: Vec<ExteriorMonomial> =
            chains.iter().map(|c| c.leading().expect("nonzero")).collect();
        let mut matrix = SparseExactMatrix::zero(rows.clone(), cols);
        for (j, chain) in chains.iter().enumerate() {
            let mut entries = Vec::with_capacity(chain.terms.len());
            for (mono, coef) in &chain.terms {
                let value = coef
                    .to_i64()
                    .ok_or_else(|| VerifyError::CoefficientTooLarge(coef.clone()))?;
                entries.push((row_of[mono], value));
            }
            matrix.set_col(j, entries);
        }
        let rank = matrix.exact_rank();
        if rank != chains.len() || kernel != chains.len() {
            bad_block = Some(json!({
                "degree": p,
                "weight": w,
                "chains": chains.len(),
                "rank": rank,
                "laplacian_kernel": kernel,
            }));
            break;
        }
    }

    // Every nonzero Laplacian kernel block must be hit by some basic element.
    if bad_block.is_none() {
        if let Some(((p, w), b)) =
            table.per_weight.iter().find(|((p, w), _)| !blocks.contains_key(&(*p, w.clone())))
        {
            bad_block = Some(json!({
                "degree": p,
                "weight": w,
                "chains": 0,
                "laplacian_kernel": b,
            }));
        }
    }

    let pass = clause_counts && bad_block.is_none();
    let details = json!({
        "n": n,
        "m": m,
        "counts": counts,
        "betti": table.betti,
    });
    let witness = (!pass).then(|| match bad_block {
        Some(w) => w,
        None => json!({
            "reason": "per-degree counts disagree",
            "counts": counts,
            "betti": table.betti,
            "poincare": poly_counts,
        }),
    });
    Ok(CheckReport::new("closedform", pass, details, witness))
}
