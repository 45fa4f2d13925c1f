//! Sparse integer matrices with exact rank and nullspace computations.
//!
//! Entries stay machine integers during assembly; rank falls back to
//! fraction-free elimination over big integers, with a modular shortcut that
//! is only trusted when it is provably tight.  Exact arithmetic is always
//! the source of truth.

use super::ExteriorMonomial;
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use std::collections::BTreeMap;

/// Column-major sparse matrix over the integers, rows and columns labeled by
/// exterior monomials.  No zero entries are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseExactMatrix {
    rows: Vec<ExteriorMonomial>,
    cols: Vec<ExteriorMonomial>,
    /// Per column: (row index, value), sorted by row index.
    entries: Vec<Vec<(usize, i64)>>,
}

impl SparseExactMatrix {
    pub fn zero(rows: Vec<ExteriorMonomial>, cols: Vec<ExteriorMonomial>) -> Self {
        let entries = vec![Vec::new(); cols.len()];
        SparseExactMatrix { rows, cols, entries }
    }

    /// Replaces one column; entries must be sorted by row with no duplicates.
    pub fn set_col(&mut self, col: usize, entries: Vec<(usize, i64)>) {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(r, v)| r < self.rows.len() && v != 0));
        self.entries[col] = entries;
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn row_labels(&self) -> &[ExteriorMonomial] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[ExteriorMonomial] {
        &self.cols
    }

    pub fn col(&self, c: usize) -> &[(usize, i64)] {
        &self.entries[c]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|c| c.is_empty())
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }

    /// Matrix product self * rhs (self: m x n, rhs: n x k).
    pub fn mul(&self, rhs: &SparseExactMatrix) -> SparseExactMatrix {
        assert_eq!(self.ncols(), rhs.nrows(), "inner dimensions must agree");
        let mut out = SparseExactMatrix::zero(self.rows.clone(), rhs.cols.clone());
        for c in 0..rhs.ncols() {
            let mut acc: BTreeMap<usize, i128> = BTreeMap::new();
            for &(mid, v2) in rhs.col(c) {
                for &(r, v1) in self.col(mid) {
                    *acc.entry(r).or_insert(0) += v1 as i128 * v2 as i128;
                }
            }
            let col: Vec<(usize, i64)> = acc
                .into_iter()
                .filter(|&(_, v)| v != 0)
                .map(|(r, v)| (r, i64::try_from(v).expect("matrix product entry fits in i64")))
                .collect();
            out.entries[c] = col;
        }
        out
    }

    /// Elementwise sum; dimensions must match.
    pub fn add(&self, rhs: &SparseExactMatrix) -> SparseExactMatrix {
        assert_eq!(self.nrows(), rhs.nrows());
        assert_eq!(self.ncols(), rhs.ncols());
        let mut out = SparseExactMatrix::zero(self.rows.clone(), self.cols.clone());
        for c in 0..self.ncols() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(r, v) in self.col(c).iter().chain(rhs.col(c)) {
                let slot = acc.entry(r).or_insert(0);
                *slot = slot.checked_add(v).expect("matrix sum entry fits in i64");
            }
            out.entries[c] = acc.into_iter().filter(|&(_, v)| v != 0).collect();
        }
        out
    }

    /// Vertical stack [self; bottom]; column labels must match.
    pub fn stack_vertical(&self, bottom: &SparseExactMatrix) -> SparseExactMatrix {
        assert_eq!(self.ncols(), bottom.ncols());
        let offset = self.nrows();
        let rows = self.rows.iter().chain(bottom.rows.iter()).copied().collect();
        let mut out = SparseExactMatrix::zero(rows, self.cols.clone());
        for c in 0..self.ncols() {
            let mut col = self.col(c).to_vec();
            col.extend(bottom.col(c).iter().map(|&(r, v)| (r + offset, v)));
            out.entries[c] = col;
        }
        out
    }

    fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.ncols()]; self.nrows()];
        for (r, c, v) in self.iter_entries() {
            m[r][c] = v;
        }
        m
    }

    /// Exact rank.  Two single-word modular eliminations run first; their
    /// answer is a lower bound on the true rank, so it is accepted only when
    /// both agree and hit the min(rows, cols) ceiling.  Anything else falls
    /// through to fraction-free integer elimination.
    pub fn exact_rank(&self) -> usize {
        let bound = self.nrows().min(self.ncols());
        if bound == 0 || self.is_zero() {
            return 0;
        }
        let dense = self.to_dense();
        const P1: u64 = 2_147_483_647;
        const P2: u64 = 2_147_483_629;
        let r1 = rank_mod(&dense, P1);
        if r1 == bound && rank_mod(&dense, P2) == bound {
            return bound;
        }
        rank_bareiss(dense)
    }

    /// Primitive integer basis of the right nullspace, one vector per free
    /// column, coordinates aligned with the column order.  Each vector has
    /// coprime entries and a positive first nonzero coordinate.
    pub fn nullspace(&self) -> Vec<Vec<BigInt>> {
        let nr = self.nrows();
        let nc = self.ncols();
        let mut a: Vec<Vec<BigRational>> =
            vec![vec![BigRational::zero(); nc]; nr];
        for (r, c, v) in self.iter_entries() {
            a[r][c] = BigRational::from_integer(BigInt::from(v));
        }
        // Reduced row echelon form.
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut r = 0;
        for c in 0..nc {
            let Some(pr) = (r..nr).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, pr);
            let inv = a[r][c].recip();
            for j in c..nc {
                let v = &a[r][j] * &inv;
                a[r][j] = v;
            }
            for i in 0..nr {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in c..nc {
                        let v = &a[i][j] - &f * &a[r][j];
                        a[i][j] = v;
                    }
                }
            }
            pivots.push((r, c));
            r += 1;
            if r == nr {
                break;
            }
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for f in 0..nc {
            if pivot_cols.contains(&f) {
                continue;
            }
            let mut v = vec![BigRational::zero(); nc];
            v[f] = BigRational::one();
            for &(pr, pc) in &pivots {
                v[pc] = -a[pr][f].clone();
            }
            basis.push(primitive(&v));
        }
        basis
    }
}

/// Scales a rational vector to coprime integers with positive first nonzero
/// coordinate.
fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let mut scale = BigInt::one();
    for x in v {
        scale = scale.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> =
        v.iter().map(|x| (x * BigRational::from_integer(scale.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if !g.is_zero() && !g.is_one() {
        for x in &mut ints {
            *x /= &g;
        }
    }
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut ints {
                *x = -std::mem::take(x);
            }
        }
    }
    ints
}

fn rank_mod(m: &[Vec<i64>], p: u64) -> usize {
    let nr = m.len();
    if nr == 0 {
        return 0;
    }
    let nc = m[0].len();
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .map(|row| row.iter().map(|&v| v.rem_euclid(p as i64) as u64).collect())
        .collect();
    let mut rank = 0;
    for c in 0..nc {
        if rank == nr {
            break;
        }
        let Some(pr) = (rank..nr).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, pr);
        let inv = mod_pow(a[rank][c], p - 2, p);
        for i in rank + 1..nr {
            if a[i][c] == 0 {
                continue;
            }
            let f = mul_mod(a[i][c], inv, p);
            for j in c..nc {
                let sub = mul_mod(f, a[rank][j], p);
                a[i][j] = (a[i][j] + p - sub) % p;
            }
        }
        rank += 1;
    }
    rank
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Fraction-free (Bareiss) elimination; every division is exact.
fn rank_bareiss(m: Vec<Vec<i64>>) -> usize {
    let nr = m.len();
    if nr == 0 {
        return 0;
    }
    let nc = m[0].len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..nc {
        if rank == nr {
            break;
        }
        let Some(pr) = (rank..nr).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, pr);
        for i in rank + 1..nr {
            for j in c + 1..nc {
                let num = &a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                a[i][j] = num / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}
