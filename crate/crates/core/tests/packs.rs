//! Rebuilds the shipped double n-gon homology packs from cyclotomic integer
//! arithmetic and compares them entry by entry.
//!
//! Edge classes are `1, ω, …, ω^(n-2)` in `Z[ω]`. The rotation acts by
//! multiplication with `−ω^((n+1)/2)` and the horizontal twist by
//! `z ↦ z + (ω+1)/(ω−1)·(z − z̄)`.

use vcl_core::homology::XnHomologyPack;
use vcl_core::IntMatrix;

/// Element of `Z[x]/Φ_n` as coefficients of `1, x, …, x^(n-2)`.
type Cyc = Vec<i64>;

/// Reduces a polynomial of any degree using `x^n = 1` and
/// `1 + x + … + x^(n-1) = 0`, which is `Φ_n` for prime `n`.
fn reduce(n: usize, poly: &[i64]) -> Cyc {
    let mut c = vec![0i64; n];
    for (k, &a) in poly.iter().enumerate() {
        c[k % n] += a;
    }
    // x^(n-1) = -(1 + x + ... + x^(n-2))
    let top = c[n - 1];
    (0..n - 1).map(|k| c[k] - top).collect()
}

fn monomial(n: usize, k: usize) -> Cyc {
    let mut p = vec![0; k + 1];
    p[k] = 1;
    reduce(n, &p)
}

fn mul(n: usize, a: &[i64], b: &[i64]) -> Cyc {
    let mut p = vec![0i64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            p[i + j] += x * y;
        }
    }
    reduce(n, &p)
}

fn conj(n: usize, a: &[i64]) -> Cyc {
    let mut p = vec![0i64; n];
    for (k, &x) in a.iter().enumerate() {
        p[(n - k) % n] += x;
    }
    reduce(n, &p)
}

/// Exact division by `x − 1`: shift by a multiple of `Φ_n` so the value
/// at 1 vanishes, then synthetic division.
fn div_by_x_minus_1(n: usize, a: &[i64]) -> Cyc {
    let at_one: i64 = a.iter().sum();
    assert_eq!(at_one % n as i64, 0, "not divisible by x - 1");
    let q = at_one / n as i64;
    let mut p: Vec<i64> = (0..n).map(|k| a.get(k).copied().unwrap_or(0) - q).collect();
    // p has degree n - 1 and p(1) = 0
    let mut quotient = vec![0i64; n - 1];
    let mut carry = 0;
    for k in (1..n).rev() {
        carry += p[k];
        quotient[k - 1] = carry;
        p[k] = 0;
    }
    assert_eq!(carry + p[0], 0);
    quotient
}

fn derived_pack(n: usize) -> (IntMatrix, IntMatrix) {
    let dim = n - 1;
    let neg = |v: Cyc| v.into_iter().map(|x| -x).collect::<Cyc>();
    let rot = neg(monomial(n, n.div_ceil(2)));
    let plus = {
        let mut v = monomial(n, 1);
        v[0] += 1;
        v
    };
    let mut r_cols = Vec::new();
    let mut t_cols = Vec::new();
    for j in 0..dim {
        let z = monomial(n, j);
        r_cols.push(mul(n, &rot, &z));
        let diff: Cyc = z.iter().zip(conj(n, &z)).map(|(a, b)| a - b).collect();
        let shear = div_by_x_minus_1(n, &mul(n, &plus, &diff));
        t_cols.push(z.iter().zip(shear).map(|(a, b)| a + b).collect());
    }
    (
        IntMatrix::from_columns(&t_cols).unwrap(),
        IntMatrix::from_columns(&r_cols).unwrap(),
    )
}

#[test]
fn shipped_packs_match_cyclotomic_derivation() {
    for n in XnHomologyPack::builtin_sizes() {
        let pack = XnHomologyPack::builtin(n).unwrap();
        let (t, r) = derived_pack(n);
        assert_eq!(pack.tbar, t, "Tbar for n = {n}");
        assert_eq!(pack.rbar, r, "Rbar for n = {n}");
    }
}
