//! Closed-form harmonic cocycles for branched path diagrams.
//!
//! For the path diagram on n nodes the harmonic monomials are indexed by
//! total orders on {0, ..., n}, where 0 stands for the homogenizing slot.
//! Attaching m extra tips to node n (the branched path a(n, m)) multiplies
//! that basis by row-strict tableaux: each tableau column J produces a
//! symmetrized wedge phi over the tip operators, and the wedge of a harmonic
//! path monomial with the phi of every column is again harmonic.
//!
//! Basis indices used here are the closed forms for the natural basis of the
//! branched path: operator x_i d_j with i < j sits at index j(j-1)/2 + i
//! (i = 0 meaning the plain derivation d_j), and the tip operator x_i d_{y_k}
//! sits at n(n+1)/2 + (k-1)(n+1) + i.  Both are pinned against
//! `LieAlgebraModel::index_of` in tests.

use std::fmt;

use num::{BigInt, One, Signed, Zero};

use crate::complex::{ChainVector, ExteriorMonomial};

#[derive(Debug, thiserror::Error)]
pub enum ClosedFormError {
    #[error("descending list must be a permutation of 0..=n")]
    NotPermutation,
    #[error("factor pattern does not define a total order")]
    NotTotalOrder,
    #[error("index {index} is outside the path basis of rank {n}")]
    NotPathBasis { index: usize, n: usize },
    #[error("column {column:?} must be weakly increasing with entries in 1..={m}")]
    BadColumn { column: Vec<usize>, m: usize },
    #[error("column height {height} exceeds {max}")]
    ColumnTooTall { height: usize, max: usize },
    #[error("tableau count mismatch at size {size}: enumeration {enumerated}, hook content {hooks}")]
    CountMismatch { size: usize, enumerated: usize, hooks: BigInt },
}

/// Index of x_i d_j (i = 0 meaning d_j) in the natural basis of any path or
/// branched path diagram with at least j path nodes.  Requires i < j.
pub fn path_operator_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j && j >= 1);
    j * (j - 1) / 2 + i
}

/// Index of x_i d_{y_k} in the natural basis of a(n, m), where y_k = node
/// n + k is the k-th tip and i ranges over 0..=n (i = 0 meaning d_{y_k}).
pub fn tip_operator_index(n: usize, k: usize, i: usize) -> usize {
    debug_assert!(k >= 1 && i <= n);
    n * (n + 1) / 2 + (k - 1) * (n + 1) + i
}

/// Inverse of `path_operator_index` for indices below n(n+1)/2.
fn decode_path_operator(index: usize, n: usize) -> Option<(usize, usize)> {
    if index >= n * (n + 1) / 2 {
        return None;
    }
    let mut j = 1;
    while j * (j + 1) / 2 <= index {
        j += 1;
    }
    Some((index - j * (j - 1) / 2, j))
}

/// A total order on {0, ..., n}, stored as its descending enumeration: the
/// first entry is the largest element.  Element 0 stands for the homogenizing
/// slot, elements 1..=n for the path nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalOrder {
    desc: Vec<usize>,
}

impl TotalOrder {
    pub fn from_descending(desc: Vec<usize>) -> Result<Self, ClosedFormError> {
        let mut sorted = desc.clone();
        sorted.sort_unstable();
        if desc.is_empty() || sorted.iter().enumerate().any(|(p, &v)| p != v) {
            return Err(ClosedFormError::NotPermutation);
        }
        Ok(TotalOrder { desc })
    }

    /// The order 0 < 1 < ... < n.
    pub fn identity(n: usize) -> Self {
        TotalOrder { desc: (0..=n).rev().collect() }
    }

    /// Largest element of {0..=n}, i.e. the underlying rank n.
    pub fn rank(&self) -> usize {
        self.desc.len() - 1
    }

    pub fn descending(&self) -> &[usize] {
        &self.desc
    }

    /// Ascending enumeration; read as one-line notation this is the
    /// permutation whose inversion count matches the monomial degree.
    pub fn ascending(&self) -> Vec<usize> {
        self.desc.iter().rev().copied().collect()
    }

    /// True iff a comes before b (a is smaller).
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        let pos = |v| self.desc.iter().position(|&x| x == v).expect("element in range");
        pos(a) > pos(b)
    }

    /// Number of value pairs i < j with j preceding i; equals the degree of
    /// the associated harmonic monomial.
    pub fn inversions(&self) -> usize {
        let asc = self.ascending();
        let mut count = 0;
        for p in 0..asc.len() {
            for q in p + 1..asc.len() {
                if asc[p] > asc[q] {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn sign(&self) -> i64 {
        if self.inversions() % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// The wedge of x_i d_j over all pairs i < j with j preceding i.
pub fn monomial_of_order(order: &TotalOrder) -> ExteriorMonomial {
    let n = order.rank();
    let mut bits = 0u64;
    for i in 0..=n {
        for j in i + 1..=n {
            if order.precedes(j, i) {
                bits |= 1u64 << path_operator_index(i, j);
            }
        }
    }
    ExteriorMonomial::from_bits(bits)
}

/// Recovers the total order from a wedge word over the path basis: the
/// presence of the factor x_i d_j puts j before i, its absence puts i before
/// j.  Fails if that pattern is not transitive.
pub fn order_from_monomial(a: ExteriorMonomial, n: usize) -> Result<TotalOrder, ClosedFormError> {
    for index in a.indices() {
        if decode_path_operator(index, n).is_none() {
            return Err(ClosedFormError::NotPathBasis { index, n });
        }
    }
    let factor = |i: usize, j: usize| a.contains(path_operator_index(i, j));
    // Score sequence: in a total order the k-th largest element beats exactly
    // n + 1 - k others.  Sort by score, then verify every pair.
    let mut wins = vec![0usize; n + 1];
    for i in 0..=n {
        for j in i + 1..=n {
            if factor(i, j) {
                wins[i] += 1;
            } else {
                wins[j] += 1;
            }
        }
    }
    let mut desc: Vec<usize> = (0..=n).collect();
    desc.sort_by(|&a, &b| wins[b].cmp(&wins[a]).then(a.cmp(&b)));
    for p in 0..=n {
        for q in p + 1..=n {
            let (hi, lo) = (desc[p], desc[q]);
            let present = factor(hi.min(lo), hi.max(lo));
            let consistent = if hi < lo { present } else { !present };
            if !consistent {
                return Err(ClosedFormError::NotTotalOrder);
            }
        }
    }
    Ok(TotalOrder { desc })
}

/// All harmonic wedge monomials of the path diagram on n nodes, paired with
/// their total orders.  Built recursively: node j enters an existing order at
/// every possible position, wedging the factor x_i d_j for each element i
/// placed above it.  Exactly (n+1)! results, sorted by ascending enumeration.
pub fn harmonic_monomials_an0(n: usize) -> Vec<(ExteriorMonomial, TotalOrder)> {
    assert!(n >= 1, "rank must be at least 1");
    assert!(n * (n + 1) / 2 <= 64, "path basis does not fit in a 64-bit wedge word");
    let mut level: Vec<(u64, Vec<usize>)> = vec![(0, vec![0])];
    for node in 1..=n {
        let mut next = Vec::with_capacity(level.len() * (node + 1));
        for (bits, desc) in &level {
            for cut in 0..=node {
                let mut b = *bits;
                for &i in &desc[..cut] {
                    b |= 1u64 << path_operator_index(i, node);
                }
                let mut d = desc.clone();
                d.insert(cut, node);
                next.push((b, d));
            }
        }
        level = next;
    }
    let mut out: Vec<(ExteriorMonomial, TotalOrder)> = level
        .into_iter()
        .map(|(bits, desc)| (ExteriorMonomial::from_bits(bits), TotalOrder { desc }))
        .collect();
    out.sort_by_key(|(_, order)| order.ascending());
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; k];
    fn rec(k: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..k {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(k, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    rec(k, &mut cur, &mut used, &mut out);
    out
}

/// Sorts distinct indices ascending and reports the sign of that shuffle.
fn sort_with_sign(indices: &[usize]) -> (Vec<usize>, i64) {
    let mut word = indices.to_vec();
    let mut swaps = 0usize;
    for i in 1..word.len() {
        let mut j = i;
        while j > 0 && word[j - 1] > word[j] {
            debug_assert_ne!(word[j - 1], word[j]);
            word.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    (word, if swaps % 2 == 0 { 1 } else { -1 })
}

/// Symmetrized wedge over one tableau column.  For a column (j_1 <= ... <=
/// j_k) with entries in 1..=m and the k largest elements i_1 > ... > i_k of
/// the order, this is the sum over all assignments of columns entries to the
/// i's of the wedge x_{i_1} d_{y_{j_s(1)}} ^ ... ^ x_{i_k} d_{y_{j_s(k)}}.
/// Repeated column entries collapse to integer multiplicities.
pub fn phi(
    order: &TotalOrder,
    column: &[usize],
    m: usize,
) -> Result<ChainVector, ClosedFormError> {
    let n = order.rank();
    let k = column.len();
    if k > n + 1 {
        return Err(ClosedFormError::ColumnTooTall { height: k, max: n + 1 });
    }
    if column.windows(2).any(|w| w[0] > w[1]) || column.iter().any(|&j| j < 1 || j > m) {
        return Err(ClosedFormError::BadColumn { column: column.to_vec(), m });
    }
    let tops = &order.descending()[..k];
    let mut out = ChainVector::zero(k);
    for perm in permutations(k) {
        let indices: Vec<usize> = (0..k)
            .map(|q| tip_operator_index(n, column[perm[q]], tops[q]))
            .collect();
        let (word, sign) = sort_with_sign(&indices);
        out.add_term(ExteriorMonomial::from_indices(&word), BigInt::from(sign));
    }
    Ok(out)
}

/// Row-strict tableau: rows strictly increase, columns weakly increase, row
/// lengths weakly decrease.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Tableau {
    pub rows: Vec<Vec<usize>>,
}

impl Tableau {
    pub fn shape(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn size(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Columns read top to bottom; each is weakly increasing and the heights
    /// weakly decrease left to right.
    pub fn columns(&self) -> Vec<Vec<usize>> {
        let width = self.rows.first().map_or(0, Vec::len);
        (0..width)
            .map(|s| self.rows.iter().filter(|r| r.len() > s).map(|r| r[s]).collect())
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "shape": self.shape(), "rows": self.rows })
    }
}

/// Partitions of `total` with parts at most `max_part` and at most
/// `max_parts` parts, parts weakly decreasing.
fn partitions_bounded(total: usize, max_part: usize, max_parts: usize) -> Vec<Vec<usize>> {
    fn rec(
        remaining: usize,
        max_part: usize,
        slots: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        if slots == 0 || max_part == 0 {
            return;
        }
        for part in (1..=max_part.min(remaining)).rev() {
            cur.push(part);
            rec(remaining - part, part, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, max_part, max_parts, &mut Vec::new(), &mut out);
    out
}

/// All tableaux with entries in 1..=m, at most n + 1 rows, and `size` cells.
pub fn enumerate_tableaux(m: usize, n: usize, size: usize) -> Vec<Tableau> {
    fn fill(m: usize, shape: &[usize], rows: &mut Vec<Vec<usize>>, out: &mut Vec<Tableau>) {
        let r = rows.len();
        if r == shape.len() {
            out.push(Tableau { rows: rows.clone() });
            return;
        }
        let len = shape[r];
        let mut row = Vec::with_capacity(len);
        fn grow(
            m: usize,
            len: usize,
            shape: &[usize],
            rows: &mut Vec<Vec<usize>>,
            row: &mut Vec<usize>,
            out: &mut Vec<Tableau>,
        ) {
            if row.len() == len {
                rows.push(row.clone());
                fill(m, shape, rows, out);
                rows.pop();
                return;
            }
            let p = row.len();
            let lo_strict = row.last().map_or(1, |&v| v + 1);
            let lo_column = rows.last().map_or(1, |prev| prev[p]);
            for v in lo_strict.max(lo_column)..=m {
                row.push(v);
                grow(m, len, shape, rows, row, out);
                row.pop();
            }
        }
        grow(m, len, shape, rows, &mut row, out);
    }
    let mut out = Vec::new();
    for shape in partitions_bounded(size, m, n + 1) {
        fill(m, &shape, &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

/// Number of column-strict fillings of `shape` with entries in 1..=m, by the
/// hook content formula.  Zero when the first column is taller than m.
pub fn hook_content(shape: &[usize], m: usize) -> BigInt {
    assert!(
        shape.windows(2).all(|w| w[0] >= w[1]) && shape.iter().all(|&l| l > 0),
        "shape must be a partition"
    );
    let conj = |j: usize| shape.iter().filter(|&&l| l >= j).count();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (row, &len) in shape.iter().enumerate() {
        let i = row + 1;
        for j in 1..=len {
            num *= BigInt::from(m as i64 + j as i64 - i as i64);
            den *= BigInt::from((len - j) + (conj(j) - i) + 1);
        }
    }
    if num.is_zero() {
        return BigInt::zero();
    }
    let (q, r) = num::Integer::div_rem(&num, &den);
    assert!(r.is_zero(), "hook content product must divide the content product");
    debug_assert!(!q.is_negative());
    q
}

/// Independent count of `enumerate_tableaux(m, n, size)`: row-strict fillings
/// of a shape are column-strict fillings of its conjugate, so the count is
/// the hook content sum over partitions of `size` with parts at most n + 1
/// and at most m parts.
pub fn tableau_count_via_hooks(m: usize, n: usize, size: usize) -> BigInt {
    partitions_bounded(size, n + 1, m)
        .iter()
        .map(|shape| hook_content(shape, m))
        .sum()
}

/// One closed-form harmonic cocycle of a(n, m): a harmonic path monomial
/// wedged with the phi of every column of a tableau.
#[derive(Clone, Debug)]
pub struct BasicElement {
    pub order: TotalOrder,
    pub columns: Vec<Vec<usize>>,
    pub chain: ChainVector,
}

impl BasicElement {
    pub fn degree(&self) -> usize {
        self.chain.degree
    }
}

/// Every basic element of a(n, m), sorted by (ascending enumeration of the
/// order, column sequence).  Their count per degree matches the coefficients
/// of `poincare_poly_anm`.
pub fn basic_elements(n: usize, m: usize) -> Result<Vec<BasicElement>, ClosedFormError> {
    assert!(
        n * (n + 1) / 2 + m * (n + 1) <= 64,
        "branched path basis does not fit in a 64-bit wedge word"
    );
    let harmonics = harmonic_monomials_an0(n);
    let tableaux: Vec<Tableau> =
        (0..=(n + 1) * m).flat_map(|size| enumerate_tableaux(m, n, size)).collect();
    let mut out = Vec::new();
    for (mono, order) in &harmonics {
        let base = ChainVector::from_terms(mono.degree(), [(*mono, BigInt::one())]);
        for tableau in &tableaux {
            let mut chain = base.clone();
            for column in tableau.columns() {
                chain = chain.wedge(&phi(order, &column, m)?);
            }
            out.push(BasicElement {
                order: order.clone(),
                columns: tableau.columns(),
                chain,
            });
        }
    }
    out.sort_by(|a, b| {
        (a.order.ascending(), &a.columns).cmp(&(b.order.ascending(), &b.columns))
    });
    Ok(out)
}

/// Dense integer polynomial in one variable t; index = power, no trailing
/// zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly { coeffs: vec![BigInt::one()] }
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len().max(other.coeffs.len())];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        IntPoly::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (a, ca) in self.coeffs.iter().enumerate() {
            for (b, cb) in other.coeffs.iter().enumerate() {
                coeffs[a + b] += ca * cb;
            }
        }
        IntPoly::from_coeffs(coeffs)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Long division; Some(quotient) only when the division is exact over
    /// the integers.
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        if self.coeffs.len() < divisor.coeffs.len() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let lead = divisor.coeffs.last().expect("nonzero divisor");
        let qlen = rem.len() - divisor.coeffs.len() + 1;
        let mut quot = vec![BigInt::zero(); qlen];
        for k in (0..qlen).rev() {
            let top = rem[k + divisor.coeffs.len() - 1].clone();
            if top.is_zero() {
                continue;
            }
            let (q, r) = num::Integer::div_rem(&top, lead);
            if !r.is_zero() {
                return None;
            }
            for (off, d) in divisor.coeffs.iter().enumerate() {
                let sub = &q * d;
                rem[k + off] -= sub;
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(IntPoly::from_coeffs(quot))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = mag.is_one();
            match (k, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{mag}*t")?,
                (_, true) => write!(f, "t^{k}")?,
                (_, false) => write!(f, "{mag}*t^{k}")?,
            }
        }
        Ok(())
    }
}

/// Poincare polynomial of the path diagram on n nodes: the product of
/// 1 + t + ... + t^i for i = 1..=n.  Degree n(n+1)/2, value (n+1)! at t = 1.
pub fn poincare_poly_an0(n: usize) -> IntPoly {
    let mut p = IntPoly::one();
    for i in 1..=n {
        p = p.mul(&IntPoly::from_coeffs(vec![BigInt::one(); i + 1]));
    }
    p
}

/// Poincare polynomial of the branched path a(n, m): the tableau counting
/// polynomial times `poincare_poly_an0(n)`.  The tableau counts are computed
/// twice, by enumeration and by hook contents; a disagreement is an error.
pub fn poincare_poly_anm(n: usize, m: usize) -> Result<IntPoly, ClosedFormError> {
    let mut counts = Vec::with_capacity((n + 1) * m + 1);
    for size in 0..=(n + 1) * m {
        let enumerated = enumerate_tableaux(m, n, size).len();
        let hooks = tableau_count_via_hooks(m, n, size);
        if BigInt::from(enumerated) != hooks {
            return Err(ClosedFormError::CountMismatch { size, enumerated, hooks });
        }
        counts.push(BigInt::from(enumerated));
    }
    Ok(IntPoly::from_coeffs(counts).mul(&poincare_poly_an0(n)))
}
