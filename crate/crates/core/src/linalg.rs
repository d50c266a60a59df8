//! Dense linear algebra over the scalar tower.
//!
//! Rational matrices go through fraction-free (Bareiss) elimination on
//! integer rows; cyclotomic matrices use ordinary field elimination; complex
//! matrices use partial pivoting with a relative zero threshold of
//! 2^(-prec/2) times the row norm.
//!
//! Pivot choice for exact input: leftmost nonzero column, then the candidate
//! entry of smallest bit height, then the lowest row index. Free variables
//! are set to zero in `solve_linear`, so (1 1 | 2) solves to (2, 0).

use std::fmt;

use rug::{Float, Integer, Rational};
use thiserror::Error;

use crate::scalar::{BigComplex, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix mixes exact and floating entries")]
    MixedInexactExact,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(Matrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    /// Builds from row vectors; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        if rows.iter().any(|v| v.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_rational_rows(rows: &[Vec<Rational>]) -> Result<Self, LinalgError> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().cloned().map(Scalar::Rational).collect())
                .collect(),
        )
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|v| Scalar::from_i64(*v)).collect())
                .collect(),
        )
        .expect("ragged rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Rows as rationals when every entry is rational.
    pub fn to_rational_rows(&self) -> Option<Vec<Vec<Rational>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|s| s.to_rational()).collect())
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != o.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = Scalar::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if !a.is_zero() {
                    acc = acc.add(&a.mul(o.get(k, j)));
                }
            }
            acc
        }))
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc.add(&a.mul(x));
                    }
                }
                acc
            })
            .collect())
    }

    pub fn to_complex(&self, prec: u32) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|s| Scalar::Complex(s.to_complex(prec)))
                .collect(),
        }
    }

    fn kind(&self) -> Result<Kind, LinalgError> {
        let mut exact_rat = true;
        let mut any_exact = false;
        let mut any_complex = false;
        for e in &self.entries {
            match e {
                Scalar::Rational(_) => any_exact = true,
                Scalar::Cyclotomic(_) => {
                    any_exact = true;
                    exact_rat = false;
                }
                Scalar::Complex(_) => any_complex = true,
            }
        }
        match (any_exact, any_complex) {
            (true, true) => Err(LinalgError::MixedInexactExact),
            (_, true) => Ok(Kind::Complex),
            _ if exact_rat => Ok(Kind::Rational),
            _ => Ok(Kind::Field),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|s| s.to_string()).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Rational,
    Field,
    Complex,
}

pub fn mat_rank(m: &Matrix) -> Result<usize, LinalgError> {
    match m.kind()? {
        Kind::Rational => Ok(rank_rational(&m.to_rational_rows().unwrap())),
        Kind::Field => Ok(field_echelon(m.row_vecs()).1.len()),
        Kind::Complex => Ok(complex_echelon(m.row_vecs()).1.len()),
    }
}

/// Basis of the right kernel; exact when the input is exact.
pub fn mat_kernel(m: &Matrix) -> Result<Vec<Vec<Scalar>>, LinalgError> {
    match m.kind()? {
        Kind::Rational => Ok(kernel_rational(&m.to_rational_rows().unwrap())
            .into_iter()
            .map(|v| v.into_iter().map(Scalar::Rational).collect())
            .collect()),
        Kind::Field => {
            let (rref, piv) = field_rref(m.row_vecs());
            Ok(kernel_from_rref(&rref, &piv, m.cols))
        }
        Kind::Complex => {
            let (ech, piv) = complex_echelon(m.row_vecs());
            let rref = complex_back_substitute(ech, &piv);
            Ok(kernel_from_rref(&rref, &piv, m.cols))
        }
    }
}

/// One solution of M x = b, or None when inconsistent.
pub fn solve_linear(m: &Matrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, LinalgError> {
    if b.len() != m.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            m.rows
        )));
    }
    let mut aug = m.row_vecs();
    for (row, bi) in aug.iter_mut().zip(b) {
        row.push(bi.clone());
    }
    let augm = Matrix::new(m.rows, m.cols + 1, aug.into_iter().flatten().collect())?;
    let kind = augm.kind()?;
    match kind {
        Kind::Rational => {
            let rows = m.to_rational_rows().unwrap();
            let rhs: Vec<Rational> = b.iter().map(|s| s.to_rational().unwrap()).collect();
            Ok(solve_rational(&rows, &rhs)
                .map(|v| v.into_iter().map(Scalar::Rational).collect()))
        }
        Kind::Field => {
            let (rref, piv) = field_rref(augm.row_vecs());
            Ok(solution_from_rref(&rref, &piv, m.cols))
        }
        Kind::Complex => {
            let (ech, piv) = complex_echelon(augm.row_vecs());
            let rref = complex_back_substitute(ech, &piv);
            Ok(solution_from_rref(&rref, &piv, m.cols))
        }
    }
}

fn kernel_from_rref(rref: &[Vec<Scalar>], piv: &[usize], cols: usize) -> Vec<Vec<Scalar>> {
    let mut is_piv = vec![None; cols];
    for (r, &c) in piv.iter().enumerate() {
        is_piv[c] = Some(r);
    }
    let mut out = Vec::new();
    for free in 0..cols {
        if is_piv[free].is_some() {
            continue;
        }
        let mut v = vec![Scalar::zero(); cols];
        v[free] = Scalar::one();
        for (r, &c) in piv.iter().enumerate() {
            v[c] = rref[r][free].neg();
        }
        out.push(v);
    }
    out
}

fn solution_from_rref(rref: &[Vec<Scalar>], piv: &[usize], cols: usize) -> Option<Vec<Scalar>> {
    if piv.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); cols];
    for (r, &c) in piv.iter().enumerate() {
        x[c] = rref[r][cols].clone();
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// generic exact field elimination (cyclotomic entries)

fn field_echelon(mut rows: Vec<Vec<Scalar>>) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let best = (r..nrows)
            .filter(|&i| !rows[i][c].is_zero())
            .min_by_key(|&i| (rows[i][c].height_bits(), i));
        let Some(best) = best else { continue };
        rows.swap(r, best);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        for j in c..ncols {
            rows[r][j] = rows[r][j].mul(&inv);
        }
        for i in r + 1..nrows {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            for j in c..ncols {
                if !rows[r][j].is_zero() {
                    let t = f.mul(&rows[r][j]);
                    rows[i][j] = rows[i][j].sub(&t);
                }
            }
        }
        piv.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, piv)
}

fn field_rref(rows: Vec<Vec<Scalar>>) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    let (mut ech, piv) = field_echelon(rows);
    for k in (0..piv.len()).rev() {
        let c = piv[k];
        for i in 0..k {
            if ech[i][c].is_zero() {
                continue;
            }
            let f = ech[i][c].clone();
            let pivot_row = ech[k].clone();
            for (j, pv) in pivot_row.iter().enumerate().skip(c) {
                if !pv.is_zero() {
                    ech[i][j] = ech[i][j].sub(&f.mul(pv));
                }
            }
        }
    }
    (ech, piv)
}

// ---------------------------------------------------------------------------
// complex elimination with a relative threshold

fn is_negligible(x: &BigComplex, row_norm: &Float) -> bool {
    let prec = x.prec();
    let thr = Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32))) * row_norm;
    x.abs() <= thr
}

fn complex_prec(rows: &[Vec<Scalar>]) -> u32 {
    rows.iter()
        .flatten()
        .map(|s| match s {
            Scalar::Complex(z) => z.prec(),
            _ => 0,
        })
        .max()
        .unwrap_or(crate::scalar::DEFAULT_PRECISION)
        .max(crate::scalar::MIN_PRECISION)
}

fn complex_echelon(rows: Vec<Vec<Scalar>>) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    let prec = complex_prec(&rows);
    let mut rows: Vec<Vec<BigComplex>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|s| s.to_complex(prec)).collect())
        .collect();
    let norms: Vec<Float> = rows
        .iter()
        .map(|r| {
            let mut acc = Float::new(prec);
            for z in r {
                acc += z.norm_sqr();
            }
            acc.sqrt()
        })
        .collect();
    let mut norms = norms;
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let mut best: Option<(usize, Float)> = None;
        for i in r..nrows {
            if is_negligible(&rows[i][c], &norms[i]) {
                continue;
            }
            let mag = rows[i][c].abs();
            if best.as_ref().is_none_or(|(_, m)| mag > *m) {
                best = Some((i, mag));
            }
        }
        let Some((best, _)) = best else { continue };
        rows.swap(r, best);
        norms.swap(r, best);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        for j in c..ncols {
            rows[r][j] = rows[r][j].mul(&inv);
        }
        for i in r + 1..nrows {
            let f = rows[i][c].clone();
            if f.is_zero() {
                continue;
            }
            for j in c..ncols {
                let t = f.mul(&rows[r][j]);
                rows[i][j] = rows[i][j].sub(&t);
            }
        }
        piv.push(c);
        r += 1;
    }
    rows.truncate(r);
    let out = rows
        .into_iter()
        .map(|row| row.into_iter().map(Scalar::Complex).collect())
        .collect();
    (out, piv)
}

fn complex_back_substitute(mut ech: Vec<Vec<Scalar>>, piv: &[usize]) -> Vec<Vec<Scalar>> {
    for k in (0..piv.len()).rev() {
        let c = piv[k];
        let pivot_row = ech[k].clone();
        for row in ech.iter_mut().take(k) {
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for (j, pv) in pivot_row.iter().enumerate().skip(c) {
                row[j] = row[j].sub(&f.mul(pv));
            }
        }
    }
    ech
}

// ---------------------------------------------------------------------------
// rational fast path

/// Multiplies a rational row by the lcm of its denominators.
pub fn clear_denominators(row: &[Rational]) -> Vec<Integer> {
    let mut l = Integer::from(1);
    for c in row {
        if *c.denom() != 1 {
            l.lcm_mut(c.denom());
        }
    }
    row.iter()
        .map(|c| {
            if *c == 0 {
                Integer::new()
            } else {
                Integer::from(c.numer() * Integer::from(&l / c.denom()))
            }
        })
        .collect()
}

/// Fraction-free row echelon form. Returns the first `rank` rows (integers)
/// and their pivot columns. Only the columns `< col_limit` are eligible as
/// pivots, which lets callers reduce an augmented matrix.
pub fn bareiss_echelon(rows: Vec<Vec<Integer>>, col_limit: usize) -> (Vec<Vec<Integer>>, Vec<usize>) {
    let mut a = rows;
    let nrows = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut prev = Integer::from(1);
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..col_limit.min(ncols) {
        if r == nrows {
            break;
        }
        let best = (r..nrows)
            .filter(|&i| a[i][c] != 0)
            .min_by_key(|&i| (a[i][c].significant_bits(), i));
        let Some(best) = best else { continue };
        a.swap(r, best);
        let (top, rest) = a.split_at_mut(r + 1);
        let prow = &top[r];
        let p = prow[c].clone();
        for row in rest.iter_mut() {
            let f = std::mem::take(&mut row[c]);
            for j in c + 1..ncols {
                let mut v = Integer::from(&p * &row[j]);
                if f != 0 && prow[j] != 0 {
                    v -= Integer::from(&f * &prow[j]);
                }
                if prev != 1 {
                    v.div_exact_mut(&prev);
                }
                row[j] = v;
            }
        }
        prev = p;
        piv.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, piv)
}

pub fn rank_rational(rows: &[Vec<Rational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    // eliminate along the shorter side
    if rows.len() > rows[0].len() {
        let t = transpose_rational(rows);
        return rank_rational(&t);
    }
    let ints: Vec<Vec<Integer>> = rows.iter().map(|r| clear_denominators(r)).collect();
    let cols = ints[0].len();
    bareiss_echelon(ints, cols).1.len()
}

pub fn transpose_rational(rows: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let c = rows[0].len();
    (0..c)
        .map(|j| rows.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Reduced row echelon form over Q: (rows with unit pivots, pivot columns).
pub fn rref_rational(rows: &[Vec<Rational>], col_limit: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let ints: Vec<Vec<Integer>> = rows.iter().map(|r| clear_denominators(r)).collect();
    let (ech, piv) = bareiss_echelon(ints, col_limit);
    let mut rr: Vec<Vec<Rational>> = ech
        .into_iter()
        .zip(&piv)
        .map(|(row, &c)| {
            let p = row[c].clone();
            row.into_iter().map(|v| Rational::from((v, p.clone()))).collect()
        })
        .collect();
    for k in (0..piv.len()).rev() {
        let c = piv[k];
        let (upper, lower) = rr.split_at_mut(k);
        let prow = &lower[0];
        for row in upper.iter_mut() {
            if row[c] == 0 {
                continue;
            }
            let f = row[c].clone();
            for (j, pv) in prow.iter().enumerate().skip(c) {
                if *pv != 0 {
                    row[j] -= Rational::from(&f * pv);
                }
            }
        }
    }
    (rr, piv)
}

pub fn kernel_rational(rows: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.is_empty() {
        return Vec::new();
    }
    let (rref, piv) = rref_rational(rows, cols);
    let mut is_piv = vec![false; cols];
    for &c in &piv {
        is_piv[c] = true;
    }
    let mut out = Vec::new();
    for free in 0..cols {
        if is_piv[free] {
            continue;
        }
        let mut v = vec![Rational::new(); cols];
        v[free] = Rational::from(1);
        for (r, &c) in piv.iter().enumerate() {
            v[c] = Rational::from(-&rref[r][free]);
        }
        out.push(v);
    }
    out
}

/// Kernel dimension, cols - rank.
pub fn nullity_rational(rows: &[Vec<Rational>]) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    cols - rank_rational(rows)
}

pub fn solve_rational(rows: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.is_empty() {
        return Some(Vec::new());
    }
    let aug: Vec<Vec<Rational>> = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut v = r.clone();
            v.push(bi.clone());
            v
        })
        .collect();
    let (rref, piv) = rref_rational(&aug, cols);
    // consistency: residual rows of the augmented column must vanish
    let ints: Vec<Vec<Integer>> = aug.iter().map(|r| clear_denominators(r)).collect();
    let (_, full_piv) = bareiss_echelon(ints, cols + 1);
    if full_piv.len() > piv.len() {
        return None;
    }
    let mut x = vec![Rational::new(); cols];
    for (r, &c) in piv.iter().enumerate() {
        x[c] = rref[r][cols].clone();
    }
    Some(x)
}

pub fn mat_vec_rational(rows: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    rows.iter()
        .map(|r| {
            let mut acc = Rational::new();
            for (a, x) in r.iter().zip(v) {
                if *a != 0 && *x != 0 {
                    acc += Rational::from(a * x);
                }
            }
            acc
        })
        .collect()
}

pub fn mat_mul_rational(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Rational::new();
                    for k in 0..inner {
                        if row[k] != 0 && b[k][j] != 0 {
                            acc += Rational::from(&row[k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Inverse of a square rational matrix.
pub fn inverse_rational(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let aug: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..n).map(|j| Rational::from((i == j) as i32)));
            v
        })
        .collect();
    let (rref, piv) = rref_rational(&aug, n);
    if piv.len() < n {
        return None;
    }
    Some(rref.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn identity_rational(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| (0..n).map(|j| Rational::from((i == j) as i32)).collect())
        .collect()
}
