//! Dense arbitrary-precision integer matrices and Smith normal form.
//!
//! Every kernel/cokernel/cohomology computation in this crate reduces to the
//! Smith normal form implemented here, so this module is deliberately small
//! and heavily tested. All arithmetic is exact at any magnitude; there is no
//! overflow path.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Dense integer matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        IntMatrix { rows, cols, entries }
    }

    /// Build from rows of machine integers; rows must have equal lengths.
    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        assert!(r < self.rows && c < self.cols, "index out of range");
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| -self.at(r, c))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.at(r, c) * k)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix add",
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Self::from_fn(self.rows, self.cols, |r, c| {
            self.at(r, c) + other.at(r, c)
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix mul",
                expected: self.cols,
                found: other.rows,
            });
        }
        Ok(Self::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = BigInt::zero();
            for k in 0..self.cols {
                acc += self.at(r, k) * other.at(k, c);
            }
            acc
        }))
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector mul",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += self.at(r, k) * &v[k];
                }
                acc
            })
            .collect())
    }

    /// Horizontal concatenation [self | other].
    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                context: "hconcat",
                expected: self.rows,
                found: other.rows,
            });
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.at(r, c).clone()
            } else {
                other.at(r, c - self.cols).clone()
            }
        }))
    }

    /// Columns `lo..hi` as a new matrix.
    pub fn column_slice(&self, lo: usize, hi: usize) -> Self {
        assert!(lo <= hi && hi <= self.cols);
        Self::from_fn(self.rows, hi - lo, |r, c| self.at(r, lo + c).clone())
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    /// Assemble a block matrix from a grid of optional blocks; `None` means a
    /// zero block. Row/column partitions are given by `row_sizes`/`col_sizes`.
    pub fn from_blocks(
        row_sizes: &[usize],
        col_sizes: &[usize],
        blocks: &[Vec<Option<&IntMatrix>>],
    ) -> Self {
        assert_eq!(blocks.len(), row_sizes.len());
        let total_rows: usize = row_sizes.iter().sum();
        let total_cols: usize = col_sizes.iter().sum();
        let mut out = Self::zero(total_rows, total_cols);
        let mut r0 = 0;
        for (bi, row) in blocks.iter().enumerate() {
            assert_eq!(row.len(), col_sizes.len());
            let mut c0 = 0;
            for (bj, blk) in row.iter().enumerate() {
                if let Some(m) = blk {
                    assert_eq!(m.rows(), row_sizes[bi], "block row size");
                    assert_eq!(m.cols(), col_sizes[bj], "block col size");
                    for r in 0..m.rows() {
                        for c in 0..m.cols() {
                            out.set(r0 + r, c0 + c, m.at(r, c).clone());
                        }
                    }
                }
                c0 += col_sizes[bj];
            }
            r0 += row_sizes[bi];
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[a] += k * row[b]
    fn add_row_multiple(&mut self, a: usize, b: usize, k: &BigInt) {
        for c in 0..self.cols {
            let v = self.at(b, c) * k;
            let e = &mut self.entries[a * self.cols + c];
            *e += v;
        }
    }

    /// col[a] += k * col[b]
    fn add_col_multiple(&mut self, a: usize, b: usize, k: &BigInt) {
        for r in 0..self.rows {
            let v = self.at(r, b) * k;
            let e = &mut self.entries[r * self.cols + a];
            *e += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let e = &mut self.entries[r * self.cols + c];
            *e = -std::mem::take(e);
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                context: "determinant",
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.at(k, k).is_zero() {
                let swap = (k + 1..n).find(|&r| !m.at(r, k).is_zero());
                match swap {
                    Some(r) => {
                        m.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = m.at(k, k).clone();
        }
        Ok(sign * m.at(n - 1, n - 1).clone())
    }

    /// Inverse of a unimodular matrix; exact, integer entries.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let det = self.determinant()?;
        if !(det.is_one() || (-&det).is_one()) {
            return Err(Error::InvalidComplex(format!(
                "inverse_unimodular: determinant {det} is not a unit"
            )));
        }
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            let sol = solve_rational(self, &rationals(&e))?
                .expect("unimodular matrix is invertible");
            cols.push(sol);
        }
        Ok(IntMatrix::from_fn(n, n, |r, c| {
            assert!(cols[c][r].is_integer(), "unimodular inverse must be integral");
            cols[c][r].to_integer()
        }))
    }

    /// Plain-text format: first line "rows cols", then one line per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse_text(input: &str) -> Result<Self> {
        let mut tokens = input.split_whitespace();
        let rows: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse("missing row count".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad row count: {e}")))?;
        let cols: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse("missing column count".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad column count: {e}")))?;
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::Parse("too few matrix entries".into()))?;
            let v: BigInt = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer entry {tok:?}")))?;
            entries.push(v);
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    /// Entries as decimal strings, row-major nested; used by the JSON reports.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.at(r, c).to_string()).collect())
            .collect()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Unimodular factorization U * A * V = D with D diagonal and
/// d_1 | d_2 | ... | d_r, zeros trailing.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub invariant_factors: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smith normal form with transformation matrices. Total: any shape,
/// including empty. Pivoting picks the minimal-absolute-value nonzero entry,
/// which keeps entry growth tame on the small dense matrices produced here.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let rows = a.rows();
    let cols = a.cols();
    let mut d = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    let mut t = 0;
    while t < rows.min(cols) {
        // Choose the nonzero entry of minimal absolute value in d[t.., t..].
        let mut pivot: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if !d.at(r, c).is_zero() {
                    let better = match &pivot {
                        None => true,
                        Some((pr, pc)) => d.at(r, c).abs() < d.at(*pr, *pc).abs(),
                    };
                    if better {
                        pivot = Some((r, c));
                    }
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        d.swap_rows(t, pr);
        u.swap_rows(t, pr);
        d.swap_cols(t, pc);
        v.swap_cols(t, pc);

        // Clear row and column t; restart whenever a remainder re-dirties them.
        loop {
            let mut clean = true;
            for r in t + 1..rows {
                if d.at(r, t).is_zero() {
                    continue;
                }
                let q = div_round(d.at(r, t), d.at(t, t));
                if !q.is_zero() {
                    d.add_row_multiple(r, t, &-&q);
                    u.add_row_multiple(r, t, &-&q);
                }
                if !d.at(r, t).is_zero() {
                    // Remainder is strictly smaller; promote it to the pivot.
                    d.swap_rows(t, r);
                    u.swap_rows(t, r);
                    clean = false;
                }
            }
            for c in t + 1..cols {
                if d.at(t, c).is_zero() {
                    continue;
                }
                let q = div_round(d.at(t, c), d.at(t, t));
                if !q.is_zero() {
                    d.add_col_multiple(c, t, &-&q);
                    v.add_col_multiple(c, t, &-&q);
                }
                if !d.at(t, c).is_zero() {
                    d.swap_cols(t, c);
                    v.swap_cols(t, c);
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility fixup: the pivot must divide the remaining block.
            let mut dirty = None;
            'scan: for r in t + 1..rows {
                for c in t + 1..cols {
                    if !(d.at(r, c) % d.at(t, t)).is_zero() {
                        dirty = Some(r);
                        break 'scan;
                    }
                }
            }
            match dirty {
                Some(r) => {
                    d.add_row_multiple(t, r, &BigInt::one());
                    u.add_row_multiple(t, r, &BigInt::one());
                }
                None => break,
            }
        }
        if d.at(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }

    let mut invariant_factors = Vec::new();
    for i in 0..rows.min(cols) {
        invariant_factors.push(d.at(i, i).clone());
    }
    // Trailing zeros stay; drop nothing so the diagonal length is min(rows, cols).
    SmithDecomposition {
        u,
        d,
        v,
        invariant_factors,
    }
}

/// Rounded division minimizing |a - q*b|.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if &r.abs() * 2 > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Rank over the rationals, via the number of nonzero invariant factors.
pub fn rational_rank(a: &IntMatrix) -> usize {
    smith_normal_form(a).rank()
}

/// Solve A x = b over the integers. Returns None when no integral solution
/// exists; errors on shape mismatch.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            context: "solve_integer rhs",
            expected: a.rows(),
            found: b.len(),
        });
    }
    let snf = smith_normal_form(a);
    let ub = snf.u.mul_vec(b)?;
    let mut y = vec![BigInt::zero(); a.cols()];
    for i in 0..a.rows() {
        let di = if i < snf.invariant_factors.len() {
            snf.invariant_factors[i].clone()
        } else {
            BigInt::zero()
        };
        if di.is_zero() {
            if !ub[i].is_zero() {
                return Ok(None);
            }
        } else {
            let (q, r) = ub[i].div_rem(&di);
            if !r.is_zero() {
                return Ok(None);
            }
            if i < a.cols() {
                y[i] = q;
            }
        }
    }
    Ok(Some(snf.v.mul_vec(&y)?))
}

/// Solve A x = b over the rationals by Gaussian elimination.
/// Returns a particular solution, or None when the system is inconsistent.
pub fn solve_rational(a: &IntMatrix, b: &[BigRational]) -> Result<Option<Vec<BigRational>>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            context: "solve_rational rhs",
            expected: a.rows(),
            found: b.len(),
        });
    }
    let rows = a.rows();
    let cols = a.cols();
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = (0..cols)
                .map(|c| BigRational::from(a.at(r, c).clone()))
                .collect();
            row.push(b[r].clone());
            row
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].clone();
        for x in m[rank].iter_mut() {
            *x = &*x / &inv;
        }
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for j in 0..=cols {
                    let sub = &f * &m[rank][j];
                    m[r][j] = &m[r][j] - &sub;
                }
            }
        }
        pivot_cols.push(c);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    for r in rank..rows {
        if !m[r][cols].is_zero() {
            return Ok(None);
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Ok(Some(x))
}

/// Solve A x = b modulo n via the augmented integer system [A | nI].
pub fn solve_mod(a: &IntMatrix, b: &[BigInt], n: &BigInt) -> Result<Option<Vec<BigInt>>> {
    let aug = a.hconcat(&IntMatrix::identity(a.rows()).scale(n))?;
    Ok(solve_integer(&aug, b)?.map(|x| x[..a.cols()].to_vec()))
}

/// Integer basis of ker(A) as columns; the lattice is saturated because the
/// columns come from the unimodular V of the Smith form.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    snf.v.column_slice(r, a.cols())
}

pub fn rationals(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from(x.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows_i64(rows)
    }

    /// Independent oracle: invariant factors from gcds of k x k minors.
    fn minor_gcd_factors(a: &IntMatrix) -> Vec<BigInt> {
        fn minors(a: &IntMatrix, k: usize) -> BigInt {
            // gcd of all k x k minors
            let mut g = BigInt::zero();
            let rows: Vec<usize> = (0..a.rows()).collect();
            let cols: Vec<usize> = (0..a.cols()).collect();
            for rs in combinations(&rows, k) {
                for cs in combinations(&cols, k) {
                    let sub = IntMatrix::from_fn(k, k, |i, j| a.at(rs[i], cs[j]).clone());
                    let det = sub.determinant().unwrap();
                    g = g.gcd(&det);
                }
            }
            g
        }
        fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if items.len() < k {
                return vec![];
            }
            let mut out = Vec::new();
            for (i, &x) in items.iter().enumerate() {
                for mut rest in combinations(&items[i + 1..], k - 1) {
                    rest.insert(0, x);
                    out.push(rest);
                }
            }
            out
        }
        let maxk = a.rows().min(a.cols());
        let mut factors = Vec::new();
        let mut prev = BigInt::one();
        for k in 1..=maxk {
            let dk = minors(a, k);
            if dk.is_zero() {
                break;
            }
            factors.push(&dk / &prev);
            prev = dk;
        }
        factors
    }

    #[test]
    fn snf_reference_example() {
        let a = m(&[vec![2, 4], vec![6, 8]]);
        let snf = smith_normal_form(&a);
        assert_eq!(
            snf.invariant_factors,
            vec![BigInt::from(2), BigInt::from(4)]
        );
        // oracle: gcd-of-minors chain, and |det| = 8
        assert_eq!(minor_gcd_factors(&a), snf.invariant_factors);
        assert_eq!(a.determinant().unwrap(), BigInt::from(-8));
        assert_eq!(snf.u.mul(&a).unwrap().mul(&snf.v).unwrap(), snf.d);
    }

    #[test]
    fn snf_empty_and_identity() {
        let e = IntMatrix::zero(0, 0);
        let snf = smith_normal_form(&e);
        assert!(snf.invariant_factors.is_empty());
        assert_eq!(snf.u.rows(), 0);
        assert_eq!(snf.v.rows(), 0);

        let i3 = IntMatrix::identity(3);
        let snf = smith_normal_form(&i3);
        assert_eq!(snf.invariant_factors, vec![BigInt::one(); 3]);
        assert_eq!(snf.d, i3);
    }

    #[test]
    fn snf_zero_and_rectangular() {
        let z = IntMatrix::zero(2, 3);
        let snf = smith_normal_form(&z);
        assert_eq!(snf.rank(), 0);
        assert_eq!(rational_rank(&z), 0);

        let a = m(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(rational_rank(&a), 1);
        let b = m(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(rational_rank(&b), 2);
    }

    #[test]
    fn solve_integer_examples() {
        let a = m(&[vec![2]]);
        assert_eq!(
            solve_integer(&a, &[BigInt::from(4)]).unwrap(),
            Some(vec![BigInt::from(2)])
        );
        assert_eq!(solve_integer(&a, &[BigInt::from(3)]).unwrap(), None);

        let a = m(&[vec![2, 4], vec![6, 8]]);
        let x = solve_integer(&a, &[BigInt::from(2), BigInt::from(6)])
            .unwrap()
            .unwrap();
        assert_eq!(a.mul_vec(&x).unwrap(), vec![BigInt::from(2), BigInt::from(6)]);

        let bad = solve_integer(&a, &[BigInt::one()]);
        assert!(bad.is_err());
    }

    #[test]
    fn rational_solve_and_rank_oracle() {
        // independent fraction-based rank for cross-checking rational_rank
        fn rank_gauss(a: &IntMatrix) -> usize {
            let rows = a.rows();
            let cols = a.cols();
            let mut m: Vec<Vec<BigRational>> = (0..rows)
                .map(|r| (0..cols).map(|c| BigRational::from(a.at(r, c).clone())).collect())
                .collect();
            let mut rank = 0;
            for c in 0..cols {
                if let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) {
                    m.swap(rank, p);
                    for r in 0..rows {
                        if r != rank && !m[r][c].is_zero() {
                            let f = &m[r][c] / &m[rank][c];
                            for j in 0..cols {
                                let sub = &f * &m[rank][j];
                                m[r][j] = &m[r][j] - &sub;
                            }
                        }
                    }
                    rank += 1;
                }
            }
            rank
        }
        let samples = [
            m(&[vec![2, 4], vec![6, 8]]),
            m(&[vec![1, 2], vec![2, 4]]),
            m(&[vec![0, 0, 0], vec![0, 0, 0]]),
            m(&[vec![3, 1, 4], vec![1, 5, 9], vec![2, 6, 5]]),
        ];
        for a in &samples {
            assert_eq!(rational_rank(a), rank_gauss(a));
        }

        let a = m(&[vec![2, 0], vec![0, 3]]);
        let b = rationals(&[BigInt::from(1), BigInt::from(1)]);
        let x = solve_rational(&a, &b).unwrap().unwrap();
        assert_eq!(x[0], BigRational::new(BigInt::one(), BigInt::from(2)));
        assert_eq!(x[1], BigRational::new(BigInt::one(), BigInt::from(3)));
    }

    #[test]
    fn kernel_basis_is_saturated() {
        let a = m(&[vec![1, 2], vec![2, 4]]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 1);
        assert!(a.mul(&k).unwrap().is_zero());
        // saturated: the gcd of the kernel generator's entries is 1
        let g = k.at(0, 0).gcd(k.at(1, 0));
        assert!(g.is_one());
    }

    #[test]
    fn unimodular_inverse() {
        let u = m(&[vec![1, 1], vec![1, 2]]);
        let inv = u.inverse_unimodular().unwrap();
        assert_eq!(u.mul(&inv).unwrap(), IntMatrix::identity(2));
    }

    #[test]
    fn text_round_trip() {
        let a = m(&[vec![1, -2, 3], vec![0, 5, -6]]);
        let s = a.to_text();
        assert_eq!(s.lines().next().unwrap(), "2 3");
        let b = IntMatrix::parse_text(&s).unwrap();
        assert_eq!(a, b);
        assert!(IntMatrix::parse_text("1").is_err());
        assert!(IntMatrix::parse_text("1 1 x").is_err());
    }

    #[test]
    fn mod_solve() {
        // 2x = 1 has no solution mod 4, but does mod 3
        let a = m(&[vec![2]]);
        assert_eq!(solve_mod(&a, &[BigInt::one()], &BigInt::from(4)).unwrap(), None);
        let x = solve_mod(&a, &[BigInt::one()], &BigInt::from(3))
            .unwrap()
            .unwrap();
        assert!(((BigInt::from(2) * &x[0] - BigInt::one()) % BigInt::from(3)).is_zero());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(256))]
        #[test]
        fn snf_invariants_random(
            rows in 0usize..6,
            cols in 0usize..6,
            seed in proptest::collection::vec(-9i64..=9, 36),
        ) {
            let a = IntMatrix::from_fn(rows, cols, |r, c| BigInt::from(seed[r * 6 + c]));
            let snf = smith_normal_form(&a);
            proptest::prop_assert_eq!(snf.u.mul(&a).unwrap().mul(&snf.v).unwrap(), snf.d.clone());
            proptest::prop_assert!(snf.u.determinant().unwrap().abs().is_one());
            proptest::prop_assert!(snf.v.determinant().unwrap().abs().is_one());
            let f = &snf.invariant_factors;
            for i in 1..f.len() {
                if !f[i - 1].is_zero() {
                    proptest::prop_assert!((&f[i] % &f[i - 1]).is_zero());
                } else {
                    proptest::prop_assert!(f[i].is_zero());
                }
            }
            for (i, fi) in f.iter().enumerate() {
                proptest::prop_assert!(!fi.is_negative());
                for r in 0..rows.min(cols) {
                    if r != i {
                        // diagonal only
                        proptest::prop_assert!(r == i || snf.d.at(i, r).is_zero() || i == r);
                    }
                }
            }
        }

        #[test]
        fn solve_integer_agrees_with_rational(
            rows in 1usize..5,
            cols in 1usize..5,
            seed in proptest::collection::vec(-6i64..=6, 25),
            rhs in proptest::collection::vec(-6i64..=6, 5),
        ) {
            let a = IntMatrix::from_fn(rows, cols, |r, c| BigInt::from(seed[r * 5 + c]));
            let b: Vec<BigInt> = (0..rows).map(|r| BigInt::from(rhs[r])).collect();
            match solve_integer(&a, &b).unwrap() {
                Some(x) => proptest::prop_assert_eq!(a.mul_vec(&x).unwrap(), b),
                None => {
                    // rational solve must fail or produce a non-integral solution
                    match solve_rational(&a, &rationals(&b)).unwrap() {
                        None => {}
                        Some(x) => {
                            proptest::prop_assert!(x.iter().any(|q| !q.is_integer()));
                        }
                    }
                }
            }
        }
    }
}
