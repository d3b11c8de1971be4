//! Square and rectangular integer matrices, and square matrices over `Z/aZ`.
//!
//! Matrices act on column vectors from the left.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus.
pub const MAX_MODULUS: u32 = 1 << 15;

/// A dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<i64>]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|col| col.len() != r) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        let mut m = IntMatrix::zeros(r, c);
        for (j, col) in columns.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn zip_with(&self, other: &IntMatrix, f: impl Fn(i64, i64) -> i64) -> Result<IntMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("shapes differ".into()));
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack with different widths".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Non-negative integer power of a square matrix.
    pub fn pow(&self, k: u64) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("power of a non-square matrix".into()));
        }
        let mut result = IntMatrix::identity(self.rows);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base)?;
            }
            base = base.mul(&base)?;
            k >>= 1;
        }
        Ok(result)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == IntMatrix::identity(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<i64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a: Vec<Vec<i128>> = (0..n)
            .map(|i| self.row(i).iter().map(|&x| x as i128).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(p) => {
                        a.swap(k, p);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        Ok((sign * if n == 0 { 1 } else { a[n - 1][n - 1] }) as i64)
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<i128>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|&x| x as i128).collect())
            .collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&i| a[i][c] != 0) else {
                continue;
            };
            a.swap(rank, p);
            for i in rank + 1..self.rows {
                if a[i][c] != 0 {
                    let (x, y) = (a[rank][c], a[i][c]);
                    let g = gcd_i128(x, y);
                    for j in c..self.cols {
                        a[i][j] = a[i][j] * (x / g) - a[rank][j] * (y / g);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Inverse of a matrix with determinant `±1`.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let d = self.det()?;
        if d.abs() != 1 {
            return Err(Error::NotCoprime(format!("determinant {d}")));
        }
        let n = self.rows;
        let mut a: Vec<Vec<i128>> = (0..n)
            .map(|i| {
                let mut row: Vec<i128> = self.row(i).iter().map(|&x| x as i128).collect();
                row.extend((0..n).map(|j| i128::from(i == j)));
                row
            })
            .collect();
        for c in 0..n {
            for i in c + 1..n {
                while a[i][c] != 0 {
                    let q = a[c][c].div_euclid(a[i][c]);
                    for j in 0..2 * n {
                        a[c][j] -= q * a[i][j];
                    }
                    a.swap(c, i);
                }
            }
            if a[c][c] < 0 {
                for x in a[c].iter_mut() {
                    *x = -*x;
                }
            }
        }
        for c in (0..n).rev() {
            for i in 0..c {
                let f = a[i][c];
                if f != 0 {
                    for j in 0..2 * n {
                        a[i][j] -= f * a[c][j];
                    }
                }
            }
        }
        let mut out = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, i64::try_from(a[i][n + j]).map_err(|_| {
                    Error::DimensionMismatch("inverse entry overflow".into())
                })?);
            }
        }
        Ok(out)
    }

    /// Reduces entries into `[0, a)`.
    pub fn to_mod(&self, a: u32) -> Result<ModMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("only square matrices reduce to ModMatrix".into()));
        }
        ModMatrix::from_ints(a, self.rows, &self.data)
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        IntMatrix::from_rows(&rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.data.iter().map(|x| x.to_string().len()).max().unwrap_or(1);
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| format!("{x:>width$}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    gcd_i128(a as i128, b as i128) as i64
}

/// Extended Euclid: returns `(g, s, t)` with `g = s*a + t*b`, `g >= 0`.
pub(crate) fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Inverse of `x` modulo `a`, if it exists.
pub fn mod_inverse(x: i64, a: i64) -> Option<i64> {
    let (g, s, _) = ext_gcd(x.rem_euclid(a), a);
    (g == 1).then(|| s.rem_euclid(a))
}

/// A square matrix over `Z/aZ` with entries stored in `[0, a)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModMatrix {
    modulus: u32,
    dim: usize,
    data: Vec<u16>,
}

impl ModMatrix {
    pub fn from_ints(modulus: u32, dim: usize, entries: &[i64]) -> Result<Self> {
        check_modulus(modulus)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        let a = modulus as i64;
        Ok(ModMatrix {
            modulus,
            dim,
            data: entries.iter().map(|&x| x.rem_euclid(a) as u16).collect(),
        })
    }

    pub fn identity(modulus: u32, dim: usize) -> Result<Self> {
        check_modulus(modulus)?;
        let mut data = vec![0u16; dim * dim];
        if modulus > 1 {
            for i in 0..dim {
                data[i * dim + i] = 1;
            }
        }
        Ok(ModMatrix { modulus, dim, data })
    }

    pub(crate) fn from_raw(modulus: u32, dim: usize, data: Vec<u16>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        ModMatrix { modulus, dim, data }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[u16] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> u16 {
        self.data[i * self.dim + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) as i64).collect())
            .collect()
    }

    fn check_compatible(&self, other: &ModMatrix) -> Result<()> {
        if self.modulus != other.modulus || self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} mod {} against {}x{} mod {}",
                self.dim, self.dim, self.modulus, other.dim, other.dim, other.modulus
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &ModMatrix) -> Result<ModMatrix> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &ModMatrix) -> ModMatrix {
        let n = self.dim;
        let a = self.modulus as u64;
        let mut data = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0u64;
                for k in 0..n {
                    s += self.data[i * n + k] as u64 * other.data[k * n + j] as u64;
                }
                data[i * n + j] = (s % a) as u16;
            }
        }
        ModMatrix {
            modulus: self.modulus,
            dim: n,
            data,
        }
    }

    pub fn mul_vec(&self, v: &[u16]) -> Vec<u16> {
        let n = self.dim;
        let a = self.modulus as u64;
        (0..n)
            .map(|i| {
                let s: u64 = (0..n).map(|k| self.data[i * n + k] as u64 * v[k] as u64).sum();
                (s % a) as u16
            })
            .collect()
    }

    pub fn pow(&self, k: u64) -> ModMatrix {
        let mut result = ModMatrix::identity(self.modulus, self.dim).expect("modulus already checked");
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            k >>= 1;
        }
        result
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let want = u16::from(i == j && self.modulus > 1);
                self.get(i, j) == want
            })
        })
    }

    /// Multiplicative order, searched up to `limit`.
    pub fn order(&self, limit: u64) -> Option<u64> {
        let mut p = self.clone();
        for k in 1..=limit {
            if p.is_identity() {
                return Some(k);
            }
            p = p.mul_unchecked(self);
        }
        None
    }

    /// Reduces to a divisor modulus `b | a`.
    pub fn reduce(&self, b: u32) -> Result<ModMatrix> {
        if b == 0 || !self.modulus.is_multiple_of(b) {
            return Err(Error::UnsupportedParameter(format!(
                "{b} does not divide {}",
                self.modulus
            )));
        }
        Ok(ModMatrix {
            modulus: b,
            dim: self.dim,
            data: self.data.iter().map(|&x| x % b as u16).collect(),
        })
    }

    /// Inverse over `Z/aZ`, by unimodular row reduction.
    pub fn inverse(&self) -> Result<ModMatrix> {
        let n = self.dim;
        let a = self.modulus as i64;
        let mut m: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut row: Vec<i64> = (0..n).map(|j| self.get(i, j) as i64).collect();
                row.extend((0..n).map(|j| i64::from(i == j)));
                row
            })
            .collect();
        for c in 0..n {
            for i in c + 1..n {
                let (x, y) = (m[c][c], m[i][c]);
                if y == 0 {
                    continue;
                }
                let (g, s, t) = ext_gcd(x, y);
                let (u, v) = (x / g, y / g);
                for j in 0..2 * n {
                    let (p, q) = (m[c][j], m[i][j]);
                    m[c][j] = (s * p + t * q).rem_euclid(a);
                    m[i][j] = (u * q - v * p).rem_euclid(a);
                }
            }
            let inv = mod_inverse(m[c][c], a)
                .ok_or_else(|| Error::NotCoprime("matrix determinant".into()))?;
            for x in m[c].iter_mut() {
                *x = (*x * inv).rem_euclid(a);
            }
        }
        for c in (0..n).rev() {
            for i in 0..c {
                let f = m[i][c];
                if f != 0 {
                    for j in 0..2 * n {
                        m[i][j] = (m[i][j] - f * m[c][j]).rem_euclid(a);
                    }
                }
            }
        }
        let data = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| m[i][n + j] as u16)
            .collect();
        Ok(ModMatrix {
            modulus: self.modulus,
            dim: n,
            data,
        })
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = (self.modulus.max(2) - 1).to_string().len();
        for i in 0..self.dim {
            let cells: Vec<String> = (0..self.dim)
                .map(|j| format!("{:>width$}", self.get(i, j)))
                .collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn check_modulus(a: u32) -> Result<()> {
    if a == 0 || a > MAX_MODULUS {
        return Err(Error::UnsupportedParameter(format!(
            "modulus {a} outside 1..={MAX_MODULUS}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn det_and_rank() {
        assert_eq!(m(&[&[2, 1], &[1, 1]]).det().unwrap(), 1);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det().unwrap(), -1);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det().unwrap(), 0);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(IntMatrix::identity(4).rank(), 4);
        let a = m(&[&[0, 2, 3], &[1, 0, 5], &[4, 1, 0]]);
        assert_eq!(a.det().unwrap(), 43);
    }

    #[test]
    fn unimodular_inverse() {
        let a = m(&[&[2, 2, 2, 1], &[0, 2, 1, 0], &[0, -1, 0, 0], &[-1, -2, -2, 0]]);
        let inv = a.inverse_unimodular().unwrap();
        assert!(a.mul(&inv).unwrap().is_identity());
        assert!(m(&[&[2, 0], &[0, 1]]).inverse_unimodular().is_err());
    }

    #[test]
    fn mod_inverse_composite() {
        let a = m(&[&[2, 2, 2, 1], &[0, 2, 1, 0], &[0, -1, 0, 0], &[-1, -2, -2, 0]]);
        for modulus in [2, 6, 8, 12, 35] {
            let x = a.to_mod(modulus).unwrap();
            let y = x.inverse().unwrap();
            assert!(x.mul(&y).unwrap().is_identity());
            assert!(y.mul(&x).unwrap().is_identity());
        }
        let singular = m(&[&[2, 0], &[0, 1]]).to_mod(4).unwrap();
        assert!(singular.inverse().is_err());
    }

    #[test]
    fn orders_and_reduction() {
        let t = m(&[&[1, 1], &[0, 1]]);
        for a in 2..10 {
            assert_eq!(t.to_mod(a).unwrap().order(100), Some(a as u64));
        }
        let x = t.to_mod(8).unwrap();
        assert_eq!(x.reduce(4).unwrap(), t.to_mod(4).unwrap());
        assert!(x.reduce(3).is_err());
        assert!(ModMatrix::identity(0, 2).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let a = m(&[&[1, -2], &[3, 4]]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[1,-2],[3,4]]");
        let b: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        assert!(serde_json::from_str::<IntMatrix>("[[1],[2,3]]").is_err());
    }
}
