//! Smith normal form over the integers and linear congruences `Mz ≡ r (mod a)`
//! for arbitrary composite `a`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{ext_gcd, IntMatrix};

/// `U·M·V = D` with `U`, `V` unimodular and `D` diagonal, each diagonal entry
/// dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// The nonzero diagonal entries, all positive.
    pub diagonal: Vec<i64>,
    pub rows: usize,
    pub cols: usize,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

type Grid = Vec<Vec<i128>>;

fn identity(n: usize) -> Grid {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

fn to_int(g: &Grid) -> Result<IntMatrix> {
    let rows = g
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| {
                    i64::try_from(x)
                        .map_err(|_| Error::UnsupportedParameter("Smith form entry overflow".into()))
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<i64>>>>()?;
    IntMatrix::from_rows(&rows)
}

// row_i <- row_i + k row_j on d and u
fn add_row(d: &mut Grid, u: &mut Grid, i: usize, j: usize, k: i128) {
    for g in [d, u] {
        for c in 0..g[i].len() {
            g[i][c] += k * g[j][c];
        }
    }
}

fn add_col(d: &mut Grid, v: &mut Grid, i: usize, j: usize, k: i128) {
    for g in [d, v] {
        for row in g.iter_mut() {
            row[i] += k * row[j];
        }
    }
}

fn swap_cols(d: &mut Grid, v: &mut Grid, i: usize, j: usize) {
    for g in [d, v] {
        for row in g.iter_mut() {
            row.swap(i, j);
        }
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithForm> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d: Grid = (0..rows)
        .map(|i| m.row(i).iter().map(|&x| i128::from(x)).collect())
        .collect();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the remaining block becomes the pivot
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| d[i][j] != 0)
            .min_by_key(|&(i, j)| d[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, &mut v, t, pj);
        loop {
            let p = d[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = d[i][t].div_euclid(p);
                if q != 0 {
                    add_row(&mut d, &mut u, i, t, -q);
                }
                dirty |= d[i][t] != 0;
            }
            for j in t + 1..cols {
                let q = d[t][j].div_euclid(p);
                if q != 0 {
                    add_col(&mut d, &mut v, j, t, -q);
                }
                dirty |= d[t][j] != 0;
            }
            if !dirty {
                // divisibility of the rest of the block
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| d[i][j] % p != 0);
                match bad {
                    Some((i, _)) => add_row(&mut d, &mut u, t, i, 1),
                    None => break,
                }
            }
            // move the smallest nonzero entry of row t or column t to (t, t)
            let (mut bi, mut bj) = (t, t);
            for i in t..rows {
                if d[i][t] != 0 && d[i][t].abs() < d[bi][bj].abs() {
                    (bi, bj) = (i, t);
                }
            }
            for j in t..cols {
                if d[t][j] != 0 && d[t][j].abs() < d[bi][bj].abs() {
                    (bi, bj) = (t, j);
                }
            }
            if bi != t {
                d.swap(t, bi);
                u.swap(t, bi);
            }
            if bj != t {
                swap_cols(&mut d, &mut v, t, bj);
            }
        }
        if d[t][t] < 0 {
            for g in [&mut d, &mut u] {
                for x in g[t].iter_mut() {
                    *x = -*x;
                }
            }
        }
        t += 1;
    }
    let diagonal = (0..t)
        .map(|i| {
            i64::try_from(d[i][i])
                .map_err(|_| Error::UnsupportedParameter("Smith form entry overflow".into()))
        })
        .collect::<Result<_>>()?;
    Ok(SmithForm {
        u: to_int(&u)?,
        v: to_int(&v)?,
        diagonal,
        rows,
        cols,
    })
}

/// `M z ≡ r (mod a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModLinearSystem {
    pub modulus: u64,
    pub matrix: IntMatrix,
    pub rhs: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModSolution {
    pub solvable: bool,
    /// A solution with entries in `[0, a)`.
    pub particular: Option<Vec<u64>>,
    /// Generators of the solutions of the homogeneous system, entries in `[0, a)`.
    pub kernel: Vec<Vec<u64>>,
    /// The first failing diagonal congruence, for unsolvable systems.
    pub obstruction: Option<String>,
}

impl ModLinearSystem {
    pub fn new(modulus: u64, matrix: IntMatrix, rhs: Vec<i64>) -> Result<Self> {
        if rhs.len() != matrix.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} equations but {} right-hand sides",
                matrix.rows(),
                rhs.len()
            )));
        }
        if modulus < 2 {
            return Err(Error::UnsupportedParameter(format!("modulus {modulus}")));
        }
        Ok(ModLinearSystem {
            modulus,
            matrix,
            rhs,
        })
    }

    /// Whether `z` satisfies every congruence.
    pub fn check(&self, z: &[u64]) -> bool {
        let a = self.modulus as i128;
        z.len() == self.matrix.cols()
            && (0..self.matrix.rows()).all(|i| {
                let lhs: i128 = self
                    .matrix
                    .row(i)
                    .iter()
                    .zip(z)
                    .map(|(&m, &x)| m as i128 * x as i128)
                    .sum();
                (lhs - self.rhs[i] as i128).rem_euclid(a) == 0
            })
    }
}

/// Solves through the Smith form: with `z = V y` the system becomes
/// `d_i y_i ≡ (U r)_i`, solvable iff `gcd(d_i, a)` divides the right side,
/// and `0 ≡ (U r)_i` past the rank.
pub fn solve_mod_linear(sys: &ModLinearSystem) -> Result<ModSolution> {
    let a = i64::try_from(sys.modulus)
        .map_err(|_| Error::UnsupportedParameter(format!("modulus {}", sys.modulus)))?;
    let snf = smith_normal_form(&sys.matrix)?;
    let c = snf.u.mul_vec(&sys.rhs)?;
    let cols = sys.matrix.cols();
    let mut y = vec![0i64; cols];
    let mut kernel_y: Vec<Vec<i64>> = Vec::new();
    let unsolvable = |text: String| ModSolution {
        solvable: false,
        particular: None,
        kernel: Vec::new(),
        obstruction: Some(text),
    };
    for (i, &ci) in c.iter().enumerate() {
        let ci = ci.rem_euclid(a);
        match snf.diagonal.get(i) {
            Some(&di) => {
                let (g, s, _) = ext_gcd(di.rem_euclid(a), a);
                if ci % g != 0 {
                    return Ok(unsolvable(format!(
                        "{di}·y ≡ {ci} (mod {a}) has no solution"
                    )));
                }
                let step = a / g;
                y[i] = ((ci / g) as i128 * s as i128).rem_euclid(step as i128) as i64;
                if step != a {
                    let mut k = vec![0; cols];
                    k[i] = step;
                    kernel_y.push(k);
                }
            }
            None => {
                if ci != 0 {
                    return Ok(unsolvable(format!("0 ≡ {ci} (mod {a}) in row {}", i + 1)));
                }
            }
        }
    }
    for i in snf.rank()..cols {
        let mut k = vec![0; cols];
        k[i] = 1;
        kernel_y.push(k);
    }
    let reduce = |v: Vec<i64>| v.into_iter().map(|x| x.rem_euclid(a) as u64).collect::<Vec<_>>();
    let particular = reduce(snf.v.mul_vec(&y)?);
    let kernel = kernel_y
        .into_iter()
        .map(|k| snf.v.mul_vec(&k).map(reduce))
        .collect::<Result<Vec<_>>>()?;
    debug_assert!(sys.check(&particular));
    Ok(ModSolution {
        solvable: true,
        particular: Some(particular),
        kernel,
        obstruction: None,
    })
}
