//! Exterior cochain complex of a Lie algebra model, graded by weight.
//!
//! Both differentials act blockwise: the coboundary D raises degree through
//! the cap product expansion of Δ, the boundary δ lowers degree through
//! brackets of wedge factors, and both preserve the lattice weight.  Betti
//! numbers of a block come out of exact ranks two independent ways (Laplacian
//! kernel and rank-nullity), which must agree.
//!
//! Sign conventions, fixed once for the whole crate:
//! - wedge words are written with ascending basis indices;
//! - D(r_1∧…∧r_p) = Σ_k (-1)^{k+1} r_1∧…∧Δ(r_k)∧…∧r_p (splice in place);
//! - δ(r_1∧…∧r_p) = Σ_{i<j} (-1)^{i+j} [r_i,r_j]∧…r̂_i…r̂_j…;
//! - with these choices ⟨Da,b⟩ = -⟨a,δb⟩ on orthonormal monomials.  The
//!   global sign has no effect on any kernel, image, or Betti number.

mod matrix;

pub use matrix::SparseExactMatrix;

use crate::liealg::{LieAlgebraModel, WeightVector};
use num::{BigInt, Zero};
use rayon::prelude::*;
use serde_json::json;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("algebra dimension {dim} exceeds the 64 wedge-factor limit")]
    DimensionTooLarge { dim: usize },
    #[error("structure constant for pair ({i},{j}) does not fit in i64")]
    ConstantOverflow { i: usize, j: usize },
    #[error("Laplacian kernel ({laplacian}) differs from ker D ∩ ker δ ({joint}) at p={p}, weight={weight:?}")]
    HodgeMismatch { p: usize, weight: WeightVector, laplacian: usize, joint: usize },
    #[error("Betti methods disagree at p={p}, weight={weight:?}: laplacian {laplacian} vs rank {rank}")]
    MethodDisagreement { p: usize, weight: WeightVector, laplacian: usize, rank: usize },
}

/// A wedge word as a bitset over basis indices; factor order is always
/// ascending index.  Monomials compare lexicographically on their ascending
/// index sequences.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExteriorMonomial(u64);

impl ExteriorMonomial {
    pub const EMPTY: ExteriorMonomial = ExteriorMonomial(0);

    pub fn from_bits(bits: u64) -> Self {
        ExteriorMonomial(bits)
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        let mut bits = 0u64;
        for &i in indices {
            debug_assert!(i < 64);
            bits |= 1 << i;
        }
        ExteriorMonomial(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn indices(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        let mut rem = self.0;
        while rem != 0 {
            out.push(rem.trailing_zeros() as usize);
            rem &= rem - 1;
        }
        out
    }
}

impl Ord for ExteriorMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.0;
        let mut b = other.0;
        loop {
            match (a == 0, b == 0) {
                (true, true) => return Ordering::Equal,
                (true, false) => return Ordering::Less,
                (false, true) => return Ordering::Greater,
                _ => {}
            }
            let ia = a.trailing_zeros();
            let ib = b.trailing_zeros();
            if ia != ib {
                return ia.cmp(&ib);
            }
            a &= a - 1;
            b &= b - 1;
        }
    }
}

impl PartialOrd for ExteriorMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ExteriorMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "em{:?}", self.indices())
    }
}

/// Homogeneous element of the exterior algebra: integer combination of
/// same-degree monomials, no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainVector {
    pub degree: usize,
    pub terms: BTreeMap<ExteriorMonomial, BigInt>,
}

impl ChainVector {
    pub fn zero(degree: usize) -> Self {
        ChainVector { degree, terms: BTreeMap::new() }
    }

    pub fn from_terms(
        degree: usize,
        terms: impl IntoIterator<Item = (ExteriorMonomial, BigInt)>,
    ) -> Self {
        let mut v = ChainVector::zero(degree);
        for (m, c) in terms {
            v.add_term(m, c);
        }
        v
    }

    pub fn add_term(&mut self, mono: ExteriorMonomial, coef: BigInt) {
        debug_assert_eq!(mono.degree(), self.degree);
        if coef.is_zero() {
            return;
        }
        let slot = self.terms.entry(mono).or_insert_with(BigInt::zero);
        *slot += coef;
        if slot.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// First monomial in canonical order with nonzero coefficient.
    pub fn leading(&self) -> Option<ExteriorMonomial> {
        self.terms.keys().next().copied()
    }

    /// Exterior product; terms sharing a factor vanish, the rest pick up the
    /// sign of sorting the concatenated factor words.
    pub fn wedge(&self, other: &ChainVector) -> ChainVector {
        let mut out = ChainVector::zero(self.degree + other.degree);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma.bits() & mb.bits() != 0 {
                    continue;
                }
                let mut inversions = 0u32;
                for y in mb.indices() {
                    inversions += ((ma.bits() >> y) >> 1).count_ones();
                }
                let coef = if inversions % 2 == 0 { ca * cb } else { -(ca * cb) };
                out.add_term(ExteriorMonomial::from_bits(ma.bits() | mb.bits()), coef);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BettiMethod {
    Laplacian,
    Rank,
    /// Run both and fail loudly on any disagreement.
    Both,
}

impl std::str::FromStr for BettiMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "laplacian" => Ok(BettiMethod::Laplacian),
            "rank" => Ok(BettiMethod::Rank),
            "both" => Ok(BettiMethod::Both),
            other => Err(format!("unknown method {other:?} (expected laplacian, rank, or both)")),
        }
    }
}

/// Betti numbers, total and per weight block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiTable {
    /// Dimension of the underlying algebra; betti has dim+1 entries.
    pub dim: usize,
    pub betti: Vec<usize>,
    /// Only nonzero blocks are listed.
    pub per_weight: BTreeMap<(usize, WeightVector), usize>,
}

impl BettiTable {
    pub fn to_json(&self) -> serde_json::Value {
        let per_weight: Vec<_> = self
            .per_weight
            .iter()
            .map(|((p, w), d)| json!({"p": p, "weight": w, "dim": d}))
            .collect();
        json!({"dim": self.dim, "betti": self.betti, "per_weight": per_weight})
    }
}

fn low_mask(index: usize) -> u64 {
    (1u64 << index) - 1
}

fn parity_sign(bits: u64) -> i64 {
    if bits.count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The exterior complex of a Lie algebra model.  Immutable; all operators
/// are derived from the precomputed Δ table and flat bracket lookup.
pub struct ExteriorComplex {
    model: LieAlgebraModel,
    /// delta[i] lists (j, k, α) with j < k and [u_j, u_k] = α·u_i.
    delta: Vec<Vec<(usize, usize, i64)>>,
    /// Flat dim*dim bracket table: flat[i*dim+j] = Some((α, k)) iff [u_i,u_j] = α·u_k.
    flat: Vec<Option<(i64, usize)>>,
}

impl ExteriorComplex {
    pub fn new(model: &LieAlgebraModel) -> Result<Self, ComplexError> {
        let dim = model.dim();
        if dim > 64 {
            return Err(ComplexError::DimensionTooLarge { dim });
        }
        let mut delta = vec![Vec::new(); dim];
        let mut flat = vec![None; dim * dim];
        for (i, j, c, k) in model.table_entries() {
            let c = i64::try_from(c).map_err(|_| ComplexError::ConstantOverflow { i, j })?;
            delta[k].push((i, j, c));
            flat[i * dim + j] = Some((c, k));
            flat[j * dim + i] = Some((-c, k));
        }
        Ok(ExteriorComplex { model: model.clone(), delta, flat })
    }

    pub fn model(&self) -> &LieAlgebraModel {
        &self.model
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Δ(u_i) = Σ α·u_j∧u_k over pairs j < k with [u_j, u_k] = α·u_i.
    pub fn delta_cap(&self, i: usize) -> ChainVector {
        ChainVector::from_terms(
            2,
            self.delta[i]
                .iter()
                .map(|&(j, k, c)| (ExteriorMonomial::from_indices(&[j, k]), BigInt::from(c))),
        )
    }

    pub fn weight_of_monomial(&self, m: ExteriorMonomial) -> WeightVector {
        let mut w = vec![0i64; self.model.diagram.node_count() + 1];
        for i in m.indices() {
            for (slot, v) in w.iter_mut().zip(&self.model.weights[i]) {
                *slot += v;
            }
        }
        w
    }

    /// D on a single monomial: replace each factor by its Δ expansion with
    /// sign (-1)^{k+1} at 1-based position k, then sort factors back in.
    pub fn apply_coboundary(&self, m: ExteriorMonomial) -> BTreeMap<ExteriorMonomial, i64> {
        let bits = m.bits();
        let mut out: BTreeMap<ExteriorMonomial, i64> = BTreeMap::new();
        let mut rem = bits;
        while rem != 0 {
            let ik = rem.trailing_zeros() as usize;
            rem &= rem - 1;
            let pos_sign = parity_sign(bits & low_mask(ik));
            let rest = bits & !(1u64 << ik);
            for &(a, b, alpha) in &self.delta[ik] {
                if rest & (1u64 << a) != 0 || rest & (1u64 << b) != 0 {
                    continue;
                }
                // The spliced pair rides to the front for free (two factors
                // cross every prefix letter together), leaving a∧b∧rest.
                let s_b = parity_sign(rest & low_mask(b));
                let s_a = parity_sign(rest & low_mask(a));
                let coef = alpha
                    .checked_mul(pos_sign * s_a * s_b)
                    .expect("coboundary coefficient fits in i64");
                let key = ExteriorMonomial::from_bits(rest | (1u64 << a) | (1u64 << b));
                let slot = out.entry(key).or_insert(0);
                *slot = slot.checked_add(coef).expect("coboundary coefficient fits in i64");
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    /// δ on a single monomial: Σ_{i<j} (-1)^{i+j} [r_i,r_j]∧(rest).
    pub fn apply_boundary(&self, m: ExteriorMonomial) -> BTreeMap<ExteriorMonomial, i64> {
        let dim = self.dim();
        let letters = m.indices();
        let mut out: BTreeMap<ExteriorMonomial, i64> = BTreeMap::new();
        for i in 0..letters.len() {
            for j in i + 1..letters.len() {
                let Some((alpha, c)) = self.flat[letters[i] * dim + letters[j]] else {
                    continue;
                };
                let rest = m.bits() & !(1u64 << letters[i]) & !(1u64 << letters[j]);
                if rest & (1u64 << c) != 0 {
                    continue;
                }
                // 1-based positions i+1 and j+1 give (-1)^{(i+1)+(j+1)} = (-1)^{i+j}.
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                let s_c = parity_sign(rest & low_mask(c));
                let coef = alpha
                    .checked_mul(sign * s_c)
                    .expect("boundary coefficient fits in i64");
                let key = ExteriorMonomial::from_bits(rest | (1u64 << c));
                let slot = out.entry(key).or_insert(0);
                *slot = slot.checked_add(coef).expect("boundary coefficient fits in i64");
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    pub fn apply_coboundary_chain(&self, v: &ChainVector) -> ChainVector {
        let mut out = ChainVector::zero(v.degree + 1);
        for (&m, c) in &v.terms {
            for (m2, c2) in self.apply_coboundary(m) {
                out.add_term(m2, c * BigInt::from(c2));
            }
        }
        out
    }

    pub fn apply_boundary_chain(&self, v: &ChainVector) -> ChainVector {
        let mut out = ChainVector::zero(v.degree.saturating_sub(1));
        for (&m, c) in &v.terms {
            for (m2, c2) in self.apply_boundary(m) {
                out.add_term(m2, c * BigInt::from(c2));
            }
        }
        out
    }

    /// Degree-p monomials of the given weight, in canonical order.
    pub fn block_monomials(&self, p: usize, w: &WeightVector) -> Vec<ExteriorMonomial> {
        let dim = self.dim();
        if p > dim {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut v: u64 = match p {
            0 => 0,
            64 => u64::MAX,
            _ => (1u64 << p) - 1,
        };
        loop {
            let m = ExteriorMonomial::from_bits(v);
            if self.weight_of_monomial(m) == *w {
                out.push(m);
            }
            if p == 0 {
                break;
            }
            v = match next_combination(v) {
                Some(next) if dim == 64 || next < (1u64 << dim) => next,
                _ => break,
            };
        }
        out.sort();
        out
    }

    /// All monomials bucketed by weight, then degree; every list sorted.
    fn monomials_by_weight(
        &self,
    ) -> BTreeMap<WeightVector, BTreeMap<usize, Vec<ExteriorMonomial>>> {
        let dim = self.dim();
        let mut buckets: BTreeMap<WeightVector, BTreeMap<usize, Vec<ExteriorMonomial>>> =
            BTreeMap::new();
        for bits in 0..(1u128 << dim) {
            let m = ExteriorMonomial::from_bits(bits as u64);
            let w = self.weight_of_monomial(m);
            buckets.entry(w).or_default().entry(m.degree()).or_default().push(m);
        }
        for per_degree in buckets.values_mut() {
            for list in per_degree.values_mut() {
                list.sort();
            }
        }
        buckets
    }

    fn assemble<F>(
        &self,
        dom: &[ExteriorMonomial],
        cod: &[ExteriorMonomial],
        f: F,
    ) -> SparseExactMatrix
    where
        F: Fn(ExteriorMonomial) -> BTreeMap<ExteriorMonomial, i64>,
    {
        let mut mat = SparseExactMatrix::zero(cod.to_vec(), dom.to_vec());
        for (c, &mono) in dom.iter().enumerate() {
            let col: Vec<(usize, i64)> = f(mono)
                .into_iter()
                .map(|(im, v)| {
                    let r = cod
                        .binary_search(&im)
                        .expect("differential image stays inside the weight block");
                    (r, v)
                })
                .collect();
            mat.set_col(c, col);
        }
        mat
    }

    /// Matrix of D_p on the weight-w block (rows: degree p+1, cols: degree p).
    pub fn coboundary_matrix(&self, p: usize, w: &WeightVector) -> SparseExactMatrix {
        let dom = self.block_monomials(p, w);
        let cod = self.block_monomials(p + 1, w);
        self.assemble(&dom, &cod, |m| self.apply_coboundary(m))
    }

    /// Matrix of δ_p on the weight-w block (rows: degree p-1, cols: degree p).
    pub fn boundary_matrix(&self, p: usize, w: &WeightVector) -> SparseExactMatrix {
        let dom = self.block_monomials(p, w);
        let cod = if p == 0 { Vec::new() } else { self.block_monomials(p - 1, w) };
        self.assemble(&dom, &cod, |m| self.apply_boundary(m))
    }

    /// Matrix of ℒ_p = δ_{p+1}∘D_p + D_{p-1}∘δ_p on the weight-w block.
    pub fn laplacian_matrix(&self, p: usize, w: &WeightVector) -> SparseExactMatrix {
        let lists = self.block_lists_around(p, w);
        self.laplacian_from_lists(&lists, p)
    }

    fn block_lists_around(
        &self,
        p: usize,
        w: &WeightVector,
    ) -> BTreeMap<usize, Vec<ExteriorMonomial>> {
        let mut lists = BTreeMap::new();
        let lo = p.saturating_sub(1);
        for q in lo..=p + 1 {
            lists.insert(q, self.block_monomials(q, w));
        }
        lists
    }

    fn fetch<'a>(
        lists: &'a BTreeMap<usize, Vec<ExteriorMonomial>>,
        q: usize,
    ) -> &'a [ExteriorMonomial] {
        lists.get(&q).map(Vec::as_slice).unwrap_or(&[])
    }

    fn cobound_from_lists(
        &self,
        lists: &BTreeMap<usize, Vec<ExteriorMonomial>>,
        q: usize,
    ) -> SparseExactMatrix {
        self.assemble(Self::fetch(lists, q), Self::fetch(lists, q + 1), |m| {
            self.apply_coboundary(m)
        })
    }

    fn bound_from_lists(
        &self,
        lists: &BTreeMap<usize, Vec<ExteriorMonomial>>,
        q: usize,
    ) -> SparseExactMatrix {
        let cod = if q == 0 { &[] } else { Self::fetch(lists, q - 1) };
        self.assemble(Self::fetch(lists, q), cod, |m| self.apply_boundary(m))
    }

    fn laplacian_from_lists(
        &self,
        lists: &BTreeMap<usize, Vec<ExteriorMonomial>>,
        p: usize,
    ) -> SparseExactMatrix {
        let up = self.bound_from_lists(lists, p + 1).mul(&self.cobound_from_lists(lists, p));
        if p == 0 {
            return up;
        }
        let down = self.cobound_from_lists(lists, p - 1).mul(&self.bound_from_lists(lists, p));
        up.add(&down)
    }

    /// Kernel dimension of ℒ_p on the block, cross-checked against
    /// dim(ker D_p ∩ ker δ_p); a mismatch is a hard error.
    pub fn laplacian_kernel_dim(&self, p: usize, w: &WeightVector) -> Result<usize, ComplexError> {
        let lists = self.block_lists_around(p, w);
        self.laplacian_kernel_from_lists(&lists, p, w)
    }

    fn laplacian_kernel_from_lists(
        &self,
        lists: &BTreeMap<usize, Vec<ExteriorMonomial>>,
        p: usize,
        w: &WeightVector,
    ) -> Result<usize, ComplexError> {
        let size = Self::fetch(lists, p).len();
        if size == 0 {
            return Ok(0);
        }
        let stacked =
            self.cobound_from_lists(lists, p).stack_vertical(&self.bound_from_lists(lists, p));
        let joint = size - stacked.exact_rank();
        let laplacian = size - self.laplacian_from_lists(lists, p).exact_rank();
        if laplacian != joint {
            return Err(ComplexError::HodgeMismatch { p, weight: w.clone(), laplacian, joint });
        }
        Ok(laplacian)
    }

    fn rank_kernel_from_lists(
        &self,
        lists: &BTreeMap<usize, Vec<ExteriorMonomial>>,
        p: usize,
    ) -> usize {
        let size = Self::fetch(lists, p).len();
        let ker = size - self.cobound_from_lists(lists, p).exact_rank();
        let im = if p == 0 { 0 } else { self.cobound_from_lists(lists, p - 1).exact_rank() };
        ker - im
    }

    /// Harmonic (closed and co-closed) basis of the block: primitive integer
    /// vectors ordered by their leading monomial.
    pub fn harmonic_basis(&self, p: usize, w: &WeightVector) -> Vec<ChainVector> {
        let lists = self.block_lists_around(p, w);
        let dom = Self::fetch(&lists, p);
        let stacked =
            self.cobound_from_lists(&lists, p).stack_vertical(&self.bound_from_lists(&lists, p));
        let mut out: Vec<ChainVector> = stacked
            .nullspace()
            .into_iter()
            .map(|coords| {
                ChainVector::from_terms(
                    p,
                    dom.iter().copied().zip(coords).filter(|(_, c)| !c.is_zero()),
                )
            })
            .collect();
        for v in &out {
            assert!(self.apply_coboundary_chain(v).is_zero(), "harmonic vector must be closed");
            assert!(self.apply_boundary_chain(v).is_zero(), "harmonic vector must be co-closed");
        }
        out.sort_by_key(|v| v.leading());
        out
    }

    /// Full Betti table.  `Rank` uses b = dim ker D_p − rank D_{p-1} per
    /// block; `Laplacian` uses the ℒ kernel (with the built-in Hodge check);
    /// `Both` runs the two and insists they agree.
    pub fn betti(&self, method: BettiMethod) -> Result<BettiTable, ComplexError> {
        let buckets = self.monomials_by_weight();
        let jobs: Vec<(&WeightVector, &BTreeMap<usize, Vec<ExteriorMonomial>>)> =
            buckets.iter().collect();
        let per_weight_results: Result<Vec<_>, ComplexError> = jobs
            .par_iter()
            .map(|(w, lists)| {
                let mut blocks = Vec::new();
                for (&p, monos) in lists.iter() {
                    if monos.is_empty() {
                        continue;
                    }
                    let b = match method {
                        BettiMethod::Rank => self.rank_kernel_from_lists(lists, p),
                        BettiMethod::Laplacian => {
                            self.laplacian_kernel_from_lists(lists, p, w)?
                        }
                        BettiMethod::Both => {
                            let lap = self.laplacian_kernel_from_lists(lists, p, w)?;
                            let rank = self.rank_kernel_from_lists(lists, p);
                            if lap != rank {
                                return Err(ComplexError::MethodDisagreement {
                                    p,
                                    weight: (*w).clone(),
                                    laplacian: lap,
                                    rank,
                                });
                            }
                            lap
                        }
                    };
                    blocks.push((p, b));
                }
                Ok(((*w).clone(), blocks))
            })
            .collect();
        let mut betti = vec![0usize; self.dim() + 1];
        let mut per_weight = BTreeMap::new();
        for (w, blocks) in per_weight_results? {
            for (p, b) in blocks {
                if b > 0 {
                    betti[p] += b;
                    per_weight.insert((p, w.clone()), b);
                }
            }
        }
        Ok(BettiTable { dim: self.dim(), betti, per_weight })
    }
}

/// Next degree-preserving bitset (Gosper); None when the value would wrap.
fn next_combination(v: u64) -> Option<u64> {
    if v == 0 {
        return None;
    }
    let t = v | (v - 1);
    let next = t.checked_add(1)?;
    Some(next | (((!t & t.wrapping_add(1)) - 1) >> (v.trailing_zeros() + 1)))
}
