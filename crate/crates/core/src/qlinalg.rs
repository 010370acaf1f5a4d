//! Exact linear algebra over the rationals and the Gaussian rationals.
//!
//! Vectors are plain `Vec<K>`. Matrices act on column vectors, so a map
//! `K^n -> K^m` is an `m x n` matrix. Subspaces are kept in reduced row
//! echelon form, which makes equality of subspaces structural equality.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
pub use crate::rational::Q;

/// Field operations used by the elimination routines.
pub trait Field: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn over(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Complex conjugation; the identity on the rationals.
    fn conj(&self) -> Self;
    fn from_q(q: Q) -> Self;
    /// Whether the value lies in the rational subfield.
    fn is_rational(&self) -> bool;

    fn inverse(&self) -> Self {
        Self::one().over(self)
    }
    fn from_int(n: i64) -> Self {
        Self::from_q(Q::from_integer(BigInt::from(n)))
    }
}

impl Field for Q {
    fn zero() -> Self {
        Q::Small(0, 1)
    }
    fn one() -> Self {
        Q::Small(1, 1)
    }
    fn is_zero(&self) -> bool {
        Q::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn from_q(q: Q) -> Self {
        q
    }
    fn is_rational(&self) -> bool {
        true
    }
    fn from_int(n: i64) -> Self {
        Q::from(n)
    }
}

/// Gaussian rational `re + im * i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gauss {
    pub re: Q,
    pub im: Q,
}

impl Gauss {
    pub fn new(re: Q, im: Q) -> Self {
        Gauss { re, im }
    }
    pub fn i() -> Self {
        Gauss::new(Zero::zero(), One::one())
    }
}

impl fmt::Debug for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_gauss(self))
    }
}

impl Field for Gauss {
    fn zero() -> Self {
        Gauss::new(Zero::zero(), Zero::zero())
    }
    fn one() -> Self {
        Gauss::new(One::one(), Zero::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn plus(&self, o: &Self) -> Self {
        Gauss::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn minus(&self, o: &Self) -> Self {
        Gauss::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn times(&self, o: &Self) -> Self {
        Gauss::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
    fn over(&self, o: &Self) -> Self {
        let norm = &o.re * &o.re + &o.im * &o.im;
        let num = self.times(&o.conj());
        Gauss::new(num.re / &norm, num.im / &norm)
    }
    fn negated(&self) -> Self {
        Gauss::new(-&self.re, -&self.im)
    }
    fn conj(&self) -> Self {
        Gauss::new(self.re.clone(), -&self.im)
    }
    fn from_q(q: Q) -> Self {
        Gauss::new(q, Zero::zero())
    }
    fn is_rational(&self) -> bool {
        Zero::is_zero(&self.im)
    }
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical `p/q` rendering; the denominator is always written.
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if Zero::is_zero(&d) {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// `p/q+r/s i`, always with both parts.
pub fn format_gauss(x: &Gauss) -> String {
    let sign = if x.im.is_negative() { "-" } else { "+" };
    format!("{}{}{} i", format_q(&x.re), sign, format_q(&x.im.abs()))
}

pub fn parse_gauss(s: &str) -> Result<Gauss> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Gauss::from_q(parse_q(s)?));
    };
    let body = body.trim_end();
    // split at the last sign that is not the leading one
    let idx = body
        .char_indices()
        .skip(1)
        .filter(|(_, c)| *c == '+' || *c == '-')
        .map(|(i, _)| i)
        .last()
        .ok_or_else(|| Error::Parse(format!("bad gaussian rational {s:?}")))?;
    let re = parse_q(&body[..idx])?;
    let im_txt = body[idx..].trim();
    let im = if let Some(rest) = im_txt.strip_prefix('+') {
        parse_q(rest)?
    } else {
        -parse_q(&im_txt[1..])?
    };
    Ok(Gauss::new(re, im))
}

/// Dense matrix acting on column vectors.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<K> {
    rows: usize,
    cols: usize,
    data: Vec<K>,
}

impl<K: fmt::Debug> fmt::Debug for Matrix<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl<K: Field> Matrix<K> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![K::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, K::one());
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Vec<K>>) -> Result<Self> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "matrix entries do not match declared shape {rows}x{cols}"
            )));
        }
        Ok(Matrix { rows, cols, data: entries.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<K>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_ints(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Matrix { rows, cols, data: entries.iter().map(|&x| K::from_int(x)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &K {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: K) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[K] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<K> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<K>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<K>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn apply(&self, v: &[K]) -> Vec<K> {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix columns");
        (0..self.rows)
            .map(|r| {
                let mut acc = K::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.plus(&a.times(b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, o: &Matrix<K>) -> Matrix<K> {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut m: Matrix<K> = Matrix::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = o.get(k, c);
                    if !b.is_zero() {
                        let idx = r * m.cols + c;
                        m.data[idx] = m.data[idx].plus(&a.times(b));
                    }
                }
            }
        }
        m
    }

    pub fn add(&self, o: &Matrix<K>) -> Matrix<K> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.plus(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Matrix<K>) -> Matrix<K> {
        self.add(&o.scale(&K::one().negated()))
    }

    pub fn scale(&self, s: &K) -> Matrix<K> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.times(s)).collect(),
        }
    }

    pub fn conj(&self) -> Matrix<K> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(K::conj).collect() }
    }

    /// Place `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix<K>) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix<K> {
        let mut m = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, self.get(r0 + r, c0 + c).clone());
            }
        }
        m
    }

    pub fn map<L: Field>(&self, f: impl Fn(&K) -> L) -> Matrix<L> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn rank(&self) -> usize {
        rref(self.row_vecs(), self.cols).1.len()
    }

    /// Exact null space.
    pub fn kernel(&self) -> Subspace<K> {
        let (rows, pivots) = rref(self.row_vecs(), self.cols);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut gens = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![K::zero(); self.cols];
            v[f] = K::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                if !row[f].is_zero() {
                    v[p] = row[f].negated();
                }
            }
            gens.push(v);
        }
        Subspace::span(self.cols, gens)
    }

    /// Column space.
    pub fn image(&self) -> Subspace<K> {
        Subspace::span(self.rows, self.columns())
    }

    pub fn inverse(&self) -> Option<Matrix<K>> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug: Vec<Vec<K>> = (0..n)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.extend((0..n).map(|c| if c == r { K::one() } else { K::zero() }));
                row
            })
            .collect();
        let (rows, pivots) = {
            let (rows, pivots) = rref(std::mem::take(&mut aug), 2 * n);
            (rows, pivots)
        };
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for (r, row) in rows.iter().enumerate().take(n) {
            for c in 0..n {
                inv.set(r, c, row[n + c].clone());
            }
        }
        Some(inv)
    }

    pub fn hstack(a: &Matrix<K>, b: &Matrix<K>) -> Matrix<K> {
        assert_eq!(a.rows, b.rows);
        let mut m = Matrix::zeros(a.rows, a.cols + b.cols);
        m.set_block(0, 0, a);
        m.set_block(0, a.cols, b);
        m
    }

    pub fn vstack(a: &Matrix<K>, b: &Matrix<K>) -> Matrix<K> {
        assert_eq!(a.cols, b.cols);
        let mut m = Matrix::zeros(a.rows + b.rows, a.cols);
        m.set_block(0, 0, a);
        m.set_block(a.rows, 0, b);
        m
    }

    pub fn block_diag(blocks: &[&Matrix<K>]) -> Matrix<K> {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            m.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }
}

/// Sparse matrix in triplet form; duplicate entries are summed.
#[derive(Clone, Debug)]
pub struct Sparse<K> {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, K)>,
}

impl<K: Field> Sparse<K> {
    pub fn new(rows: usize, cols: usize) -> Self {
        Sparse { rows, cols, entries: Vec::new() }
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn push(&mut self, r: usize, c: usize, v: K) {
        assert!(r < self.rows && c < self.cols, "sparse entry out of range");
        if !v.is_zero() {
            self.entries.push((r, c, v));
        }
    }
    /// Adds `sign * block` with its top-left corner at `(r0, c0)`.
    pub fn push_block(&mut self, r0: usize, c0: usize, block: &Matrix<K>, sign: &K) {
        for r in 0..block.rows() {
            for c in 0..block.cols() {
                let v = block.get(r, c);
                if !v.is_zero() {
                    self.push(r0 + r, c0 + c, v.times(sign));
                }
            }
        }
    }
    /// Raw triplets; positions may repeat.
    pub fn entries(&self) -> &[(usize, usize, K)] {
        &self.entries
    }
    pub fn to_dense(&self) -> Matrix<K> {
        let mut m: Matrix<K> = Matrix::zeros(self.rows, self.cols);
        for (r, c, v) in &self.entries {
            let cur = m.get(*r, *c).plus(v);
            m.set(*r, *c, cur);
        }
        m
    }

    fn row_lists(&self) -> Vec<Vec<(usize, K)>> {
        let mut rows: Vec<std::collections::BTreeMap<usize, K>> = vec![Default::default(); self.rows];
        for (r, c, v) in &self.entries {
            let e = rows[*r].entry(*c).or_insert_with(K::zero);
            *e = e.plus(v);
        }
        rows.into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect()
    }

    /// Rank by incremental elimination against normalized pivot rows.
    pub fn rank(&self) -> usize {
        let mut rows = self.row_lists();
        rows.sort_by_key(|r| r.len());
        let mut pivots: std::collections::HashMap<usize, Vec<(usize, K)>> = std::collections::HashMap::new();
        for mut row in rows {
            while let Some(&(lead, ref a)) = row.first() {
                match pivots.get(&lead) {
                    Some(p) => {
                        let a = a.clone();
                        row = sparse_axpy(&row, p, &a.negated());
                    }
                    None => {
                        let inv = a.inverse();
                        let normalized: Vec<(usize, K)> = row.iter().map(|(c, v)| (*c, v.times(&inv))).collect();
                        pivots.insert(lead, normalized);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }
}

/// `x + s * y` for sorted sparse rows.
fn sparse_axpy<K: Field>(x: &[(usize, K)], y: &[(usize, K)], s: &K) -> Vec<(usize, K)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i].clone());
            i += 1;
        } else if take_y {
            out.push((y[j].0, y[j].1.times(s)));
            j += 1;
        } else {
            let v = x[i].1.plus(&y[j].1.times(s));
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Reduced row echelon form of the given rows; returns the nonzero rows and
/// their pivot columns.
pub fn rref<K: Field>(mut rows: Vec<Vec<K>>, ncols: usize) -> (Vec<Vec<K>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r >= rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inverse();
        if inv != K::one() {
            for x in rows[r].iter_mut().skip(c) {
                if !x.is_zero() {
                    *x = x.times(&inv);
                }
            }
        }
        let support: Vec<(usize, K)> =
            rows[r].iter().enumerate().skip(c).filter(|(_, x)| !x.is_zero()).map(|(j, x)| (j, x.clone())).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (j, x) in &support {
                row[*j] = row[*j].minus(&f.times(x));
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn is_zero_vec<K: Field>(v: &[K]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn vec_add<K: Field>(a: &[K], b: &[K]) -> Vec<K> {
    a.iter().zip(b).map(|(x, y)| x.plus(y)).collect()
}

pub fn vec_sub<K: Field>(a: &[K], b: &[K]) -> Vec<K> {
    a.iter().zip(b).map(|(x, y)| x.minus(y)).collect()
}

pub fn vec_scale<K: Field>(a: &[K], s: &K) -> Vec<K> {
    a.iter().map(|x| x.times(s)).collect()
}

pub fn unit<K: Field>(n: usize, i: usize) -> Vec<K> {
    let mut v = vec![K::zero(); n];
    v[i] = K::one();
    v
}

/// A linear subspace of `K^ambient`, stored as RREF rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace<K> {
    ambient: usize,
    basis: Vec<Vec<K>>,
    pivots: Vec<usize>,
}

impl<K: fmt::Debug> fmt::Debug for Subspace<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}; {:?})", self.basis.len(), self.ambient, self.basis)
    }
}

impl<K: Field> Subspace<K> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient).map(|i| unit(ambient, i)).collect(),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn span(ambient: usize, gens: Vec<Vec<K>>) -> Self {
        debug_assert!(gens.iter().all(|g| g.len() == ambient));
        let (basis, pivots) = rref(gens, ambient);
        Subspace { ambient, basis, pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Vec<K>] {
        &self.basis
    }
    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }
    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    fn check(&self, o: &Subspace<K>) -> Result<()> {
        if self.ambient != o.ambient {
            return Err(Error::Dimension(format!(
                "ambient dimensions differ: {} vs {}",
                self.ambient, o.ambient
            )));
        }
        Ok(())
    }

    /// Reduce `v` against the echelon basis; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[K]) -> Vec<K> {
        let mut v = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (x, y) in v.iter_mut().zip(row).skip(p) {
                    if !y.is_zero() {
                        *x = x.minus(&f.times(y));
                    }
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[K]) -> bool {
        assert_eq!(v.len(), self.ambient);
        is_zero_vec(&self.reduce(v))
    }

    pub fn contains_subspace(&self, o: &Subspace<K>) -> bool {
        self.ambient == o.ambient && o.basis.iter().all(|b| self.contains(b))
    }

    pub fn try_sum(&self, o: &Subspace<K>) -> Result<Subspace<K>> {
        self.check(o)?;
        Ok(self.sum(o))
    }

    pub fn sum(&self, o: &Subspace<K>) -> Subspace<K> {
        assert_eq!(self.ambient, o.ambient, "ambient mismatch in sum");
        if o.is_zero() || self.is_full() {
            return self.clone();
        }
        if self.is_zero() || o.is_full() {
            return o.clone();
        }
        let mut gens = self.basis.clone();
        gens.extend(o.basis.iter().cloned());
        Subspace::span(self.ambient, gens)
    }

    pub fn try_intersect(&self, o: &Subspace<K>) -> Result<Subspace<K>> {
        self.check(o)?;
        Ok(self.intersect(o))
    }

    /// Intersection: combinations of `self`'s basis whose residue modulo `o`
    /// vanishes.
    pub fn intersect(&self, o: &Subspace<K>) -> Subspace<K> {
        assert_eq!(self.ambient, o.ambient, "ambient mismatch in intersection");
        if self.is_zero() || o.is_full() {
            return self.clone();
        }
        if o.is_zero() || self.is_full() {
            return o.clone();
        }
        let n = self.ambient;
        let a = self.dim();
        let rows: Vec<Vec<K>> = self
            .basis
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let mut r = o.reduce(b);
                r.extend((0..a).map(|j| if i == j { K::one() } else { K::zero() }));
                r
            })
            .collect();
        let (rows, pivots) = rref(rows, n + a);
        let gens = rows
            .iter()
            .zip(&pivots)
            .filter(|(_, &p)| p >= n)
            .map(|(row, _)| {
                let mut v = vec![K::zero(); n];
                for (c, b) in row[n..].iter().zip(&self.basis) {
                    if !c.is_zero() {
                        for (x, y) in v.iter_mut().zip(b) {
                            if !y.is_zero() {
                                *x = x.plus(&c.times(y));
                            }
                        }
                    }
                }
                v
            })
            .collect();
        Subspace::span(n, gens)
    }

    /// Image under `m` (a map out of this subspace's ambient space).
    pub fn image_under(&self, m: &Matrix<K>) -> Subspace<K> {
        assert_eq!(m.cols(), self.ambient);
        Subspace::span(m.rows(), self.basis.iter().map(|b| m.apply(b)).collect())
    }

    /// Annihilator rows: a matrix whose kernel is exactly this subspace.
    pub fn annihilator(&self) -> Matrix<K> {
        let ann = Matrix::from_columns(self.ambient, &self.basis).transpose().kernel();
        let rows = ann.basis;
        let n = rows.len();
        Matrix::from_rows(n, self.ambient, rows).expect("annihilator shape")
    }

    /// `{x : m x in self}`.
    pub fn preimage(&self, m: &Matrix<K>) -> Subspace<K> {
        assert_eq!(m.rows(), self.ambient);
        if self.is_full() {
            return Subspace::full(m.cols());
        }
        let free: Vec<usize> = (0..self.ambient).filter(|c| self.pivots.binary_search(c).is_err()).collect();
        let mut rel = Matrix::zeros(free.len(), m.cols());
        for (j, c) in m.columns().iter().enumerate() {
            let r = self.reduce(c);
            for (i, &f) in free.iter().enumerate() {
                if !r[f].is_zero() {
                    rel.set(i, j, r[f].clone());
                }
            }
        }
        rel.kernel()
    }

    pub fn basis_matrix(&self) -> Matrix<K> {
        Matrix::from_columns(self.ambient, &self.basis)
    }

    pub fn conj(&self) -> Subspace<K> {
        Subspace::span(self.ambient, self.basis.iter().map(|b| b.iter().map(K::conj).collect()).collect())
    }

    /// Basis vectors of `self` extending a basis of `sub` (which must be contained).
    pub fn complement_reps(&self, sub: &Subspace<K>) -> Vec<Vec<K>> {
        let mut echelon: Vec<(usize, Vec<K>)> = sub.pivots.iter().copied().zip(sub.basis.iter().cloned()).collect();
        let mut reps = Vec::new();
        for b in &self.basis {
            let mut v = b.clone();
            for (p, row) in &echelon {
                if !v[*p].is_zero() {
                    let f = v[*p].over(&row[*p]);
                    for (x, y) in v.iter_mut().zip(row) {
                        if !y.is_zero() {
                            *x = x.minus(&f.times(y));
                        }
                    }
                }
            }
            if let Some(p) = v.iter().position(|x| !x.is_zero()) {
                reps.push(b.clone());
                echelon.push((p, v));
            }
        }
        reps
    }

    /// Pad into a larger ambient space with `before` zero coordinates in front
    /// and `after` behind.
    pub fn embed(&self, before: usize, after: usize) -> Subspace<K> {
        let basis = self
            .basis
            .iter()
            .map(|b| {
                let mut v = vec![K::zero(); before];
                v.extend(b.iter().cloned());
                v.extend(std::iter::repeat(K::zero()).take(after));
                v
            })
            .collect();
        Subspace { ambient: before + self.ambient + after, basis, pivots: self.pivots.iter().map(|p| p + before).collect() }
    }

    pub fn direct_sum(a: &Subspace<K>, b: &Subspace<K>) -> Subspace<K> {
        let mut s = a.embed(0, b.ambient);
        let t = b.embed(a.ambient, 0);
        s.basis.extend(t.basis);
        s.pivots.extend(t.pivots);
        s
    }
}

/// The subquotient `top / bottom` of `K^ambient` with explicit coordinates.
///
/// The representatives are in reduced echelon form with pivots off the
/// bottom's pivots, so the class of `v` has coordinates
/// `v[p_j] - Σ_i v[b_i] B_i[p_j]`.
#[derive(Clone, Debug)]
pub struct Quotient<K> {
    ambient: usize,
    top: Subspace<K>,
    bottom: Subspace<K>,
    reps: Vec<Vec<K>>,
    rep_pivots: Vec<usize>,
    /// Per bottom row, its nonzero entries at the representative pivots.
    corr: Vec<Vec<(usize, K)>>,
}

impl<K: Field> Quotient<K> {
    pub fn new(top: Subspace<K>, bottom: Subspace<K>) -> Result<Self> {
        if top.ambient() != bottom.ambient() {
            return Err(Error::Dimension("subquotient ambient mismatch".into()));
        }
        let full = top.is_full();
        if !full && !top.contains_subspace(&bottom) {
            return Err(Error::Dimension("subquotient bottom not contained in top".into()));
        }
        let n = top.ambient();
        let (reps, rep_pivots) = if full {
            let free: Vec<usize> = (0..n).filter(|c| bottom.pivots.binary_search(c).is_err()).collect();
            (free.iter().map(|&c| unit(n, c)).collect(), free)
        } else {
            let reduced: Vec<Vec<K>> = top.basis.iter().map(|v| bottom.reduce(v)).collect();
            rref(reduced, n)
        };
        let corr = bottom
            .basis
            .iter()
            .map(|row| {
                rep_pivots.iter().enumerate().filter(|(_, &p)| !row[p].is_zero()).map(|(j, &p)| (j, row[p].clone())).collect()
            })
            .collect();
        Ok(Quotient { ambient: n, top, bottom, reps, rep_pivots, corr })
    }

    /// `K^n / sub`.
    pub fn of(sub: Subspace<K>) -> Self {
        Quotient::new(Subspace::full(sub.ambient()), sub).expect("subspace of its ambient")
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn top(&self) -> &Subspace<K> {
        &self.top
    }
    pub fn bottom(&self) -> &Subspace<K> {
        &self.bottom
    }
    pub fn reps(&self) -> &[Vec<K>] {
        &self.reps
    }

    /// Coordinates of the class of `v`, which must lie in `top`.
    pub fn project(&self, v: &[K]) -> Vec<K> {
        debug_assert!(self.top.contains(v), "projected vector outside the subquotient top");
        let mut c: Vec<K> = self.rep_pivots.iter().map(|&p| v[p].clone()).collect();
        for (&b, row) in self.bottom.pivots.iter().zip(&self.corr) {
            let x = &v[b];
            if x.is_zero() {
                continue;
            }
            for (j, e) in row {
                c[*j] = c[*j].minus(&x.times(e));
            }
        }
        c
    }

    /// Representative in the ambient space for given coordinates.
    pub fn lift(&self, c: &[K]) -> Vec<K> {
        let mut v = vec![K::zero(); self.ambient];
        for (x, r) in c.iter().zip(&self.reps) {
            if !x.is_zero() {
                for (y, e) in v.iter_mut().zip(r) {
                    if !e.is_zero() {
                        *y = y.plus(&x.times(e));
                    }
                }
            }
        }
        v
    }

    /// Projection matrix `top -> top/bottom`, as a map out of the ambient
    /// space (valid on `top`).
    pub fn projection_matrix(&self) -> Matrix<K> {
        let mut m = Matrix::zeros(self.dim(), self.ambient);
        for (j, &p) in self.rep_pivots.iter().enumerate() {
            m.set(j, p, K::one());
        }
        for (&b, row) in self.bottom.pivots.iter().zip(&self.corr) {
            for (j, e) in row {
                m.set(*j, b, e.negated());
            }
        }
        m
    }

    /// Image of `s ∩ top` in the quotient coordinates.
    pub fn image_of(&self, s: &Subspace<K>) -> Subspace<K> {
        let inter = s.intersect(&self.top);
        Subspace::span(self.dim(), inter.basis().iter().map(|b| self.project(b)).collect())
    }

    /// Image of a subspace already known to lie in `top`.
    pub fn image_of_contained(&self, s: &Subspace<K>) -> Subspace<K> {
        Subspace::span(self.dim(), s.basis().iter().map(|b| self.project(b)).collect())
    }

    /// Preimage in the ambient space (inside `top`) of a subspace of the quotient.
    pub fn preimage_of(&self, s: &Subspace<K>) -> Subspace<K> {
        let mut gens: Vec<Vec<K>> = s.basis().iter().map(|c| self.lift(c)).collect();
        gens.extend(self.bottom.basis().iter().cloned());
        Subspace::span(self.ambient, gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, e: &[i64]) -> Matrix<Q> {
        Matrix::from_ints(rows, cols, e)
    }

    fn v(e: &[i64]) -> Vec<Q> {
        e.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn kernel_examples() {
        assert!(Matrix::<Q>::identity(3).kernel().is_zero());
        assert!(Matrix::<Q>::zeros(2, 2).kernel().is_full());
        let k = m(1, 2, &[1, 0]).kernel();
        assert_eq!(k, Subspace::span(2, vec![v(&[0, 1])]));
    }

    #[test]
    fn sum_intersection_preimage() {
        let e1 = Subspace::span(2, vec![v(&[1, 0])]);
        let e2 = Subspace::span(2, vec![v(&[0, 1])]);
        assert!(e1.sum(&e2).is_full());
        assert!(e1.intersect(&e2).is_zero());
        let f = m(2, 2, &[1, 1, 0, 0]);
        assert!(e1.preimage(&f).is_full());
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = Subspace::<Q>::full(2);
        let b = Subspace::<Q>::full(3);
        assert!(a.try_sum(&b).is_err());
        assert!(a.try_intersect(&b).is_err());
    }

    #[test]
    fn quotient_projection_kernel_is_sub() {
        let a = Subspace::span(3, vec![v(&[1, 1, 0])]);
        let quo = Quotient::of(a.clone());
        assert_eq!(quo.dim(), 2);
        assert_eq!(quo.projection_matrix().kernel(), a);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(3, 3, &[2, 1, 0, 0, 1, 3, 1, 0, 1]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(3));
        assert!(m(2, 2, &[1, 2, 2, 4]).inverse().is_none());
    }

    #[test]
    fn rational_text_roundtrip() {
        for s in ["3/1", "-7/4", "0/1"] {
            assert_eq!(format_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("6/4").unwrap(), qf(3, 2));
        assert!(parse_q("1/0").is_err());
        for s in ["1/2+3/1 i", "0/1-1/3 i", "-2/1+0/1 i"] {
            assert_eq!(format_gauss(&parse_gauss(s).unwrap()), s);
        }
    }

    #[test]
    fn gaussian_conjugation_is_involution_fixing_rationals() {
        let z = Gauss::new(qf(1, 2), qf(-3, 5));
        assert_eq!(z.conj().conj(), z);
        assert_ne!(z.conj(), z);
        let r = Gauss::from_q(qf(7, 3));
        assert_eq!(r.conj(), r);
        let w = z.times(&z.inverse());
        assert_eq!(w, Gauss::one());
    }

    #[test]
    fn gaussian_left_inverse_needs_no_hermitian_form() {
        // (1, i) has zero bilinear self-pairing; coordinates must still work
        let top = Subspace::span(2, vec![vec![Gauss::one(), Gauss::i()]]);
        let quo = Quotient::new(top, Subspace::zero(2)).unwrap();
        let c = quo.project(&[Gauss::from_int(2), Gauss::i().times(&Gauss::from_int(2))]);
        assert_eq!(c, vec![Gauss::from_int(2)]);
    }
}
