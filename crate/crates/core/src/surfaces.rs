//! Static data of the double n-gon `X_n` and the regular 2n-gon `X_{2n}`
//! for odd `n >= 5`, and statistics of the characteristic covers.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::freewords::{recognize_boundary_conjugate, FreeEndo, FreeWord, Letter};
use crate::presentation::{Family, Gen, VeechWord};

/// Real 2x2 matrix, row-major.
pub type Mat2 = [[f64; 2]; 2];

/// A lift of a Veech group generator to `Aut(F_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    pub symbol: Gen,
    pub endo: FreeEndo,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceModel {
    pub family: Family,
    pub n: usize,
    /// Rank of the free group `π_1` of the punctured surface.
    pub rank: usize,
    pub genus: usize,
    /// Number of singularities.
    pub nu: usize,
    pub boundary_words: Vec<FreeWord>,
    /// Order of the cone point (cone angle `2π(d+1)`) of each singularity.
    pub singularity_orders: Vec<usize>,
    pub lambda: f64,
    pub derivative_t: Mat2,
    /// Derivative of `R` for the double n-gon, of `S = R^2` for the 2n-gon.
    pub derivative_rot: Mat2,
    pub relators: Vec<VeechWord>,
    pub lifts: Vec<Lift>,
}

fn check_n(n: usize) -> Result<()> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::UnsupportedParameter(format!(
            "n = {n}; an odd n >= 5 is required"
        )));
    }
    Ok(())
}

fn rotation(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_inv(a: &Mat2) -> Mat2 {
    let d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

/// Alternating word `x0^s x1^-s x2^s ...` over all `n` generators.
fn alternating(n: usize, first_inverse: bool) -> FreeWord {
    FreeWord::from_letters((0..n as u32).map(|i| Letter::new(i, first_inverse ^ (i % 2 == 1))))
}

/// `X_n`: two regular n-gons. Rank `n-1`, one singularity.
///
/// No free-group lifts are attached; the homology action comes from a data
/// pack. The boundary word is the product of commutators
/// `[x0,x1][x2,x3]...` in a standard surface basis.
pub fn build_double_ngon(n: usize) -> Result<SurfaceModel> {
    check_n(n)?;
    let g = (n - 1) / 2;
    let mut c1 = FreeWord::identity();
    for k in 0..g as u32 {
        let (a, b) = (FreeWord::generator(2 * k), FreeWord::generator(2 * k + 1));
        c1 = c1
            .product(&a)
            .product(&b)
            .product(&a.inverse())
            .product(&b.inverse());
    }
    let lambda = 2.0 / (PI / n as f64).tan();
    Ok(SurfaceModel {
        family: Family::DoubleNGon,
        n,
        rank: n - 1,
        genus: g,
        nu: 1,
        boundary_words: vec![c1],
        singularity_orders: vec![n - 3],
        lambda,
        derivative_t: [[1.0, lambda], [0.0, 1.0]],
        derivative_rot: rotation(PI / n as f64),
        relators: Family::DoubleNGon.relators(n),
        lifts: Vec::new(),
    })
}

/// `X_{2n}`: one regular 2n-gon. Rank `n`, two singularities.
pub fn build_regular_2ngon(n: usize) -> Result<SurfaceModel> {
    check_n(n)?;
    let lambda = 2.0 / (PI / (2 * n) as f64).tan();
    let r = rotation(PI / (2 * n) as f64);
    Ok(SurfaceModel {
        family: Family::Regular2NGon,
        n,
        rank: n,
        genus: (n - 1) / 2,
        nu: 2,
        boundary_words: vec![alternating(n, false), alternating(n, true)],
        singularity_orders: vec![(n - 3) / 2; 2],
        lambda,
        derivative_t: [[1.0, lambda], [0.0, 1.0]],
        derivative_rot: mat_mul(&r, &r),
        relators: Family::Regular2NGon.relators(n),
        lifts: vec![
            Lift {
                symbol: Gen::T,
                endo: lift_t_2ngon(n),
            },
            Lift {
                symbol: Gen::S,
                endo: lift_r2_2ngon(n),
            },
        ],
    })
}

pub fn build(family: Family, n: usize) -> Result<SurfaceModel> {
    match family {
        Family::DoubleNGon => build_double_ngon(n),
        Family::Regular2NGon => build_regular_2ngon(n),
    }
}

/// Rotation by `π/n` of the 2n-gon: `x_i -> x_{i+1}`, `x_{n-1} -> x_0^-1`.
pub fn lift_r2_2ngon(n: usize) -> FreeEndo {
    let mut images: Vec<FreeWord> = (1..n as u32).map(FreeWord::generator).collect();
    images.push(FreeWord::generator(0).inverse());
    FreeEndo::new(images).expect("images use generators below n")
}

/// `γ̃_{R²}`: the rotation lift conjugated by `x0`,
/// `x_i -> x0^-1 x_{i+1} x0`, `x_{n-1} -> x0^-1`.
pub fn lift_r2_twisted_2ngon(n: usize) -> FreeEndo {
    let x0 = FreeWord::generator(0);
    let mut images: Vec<FreeWord> = (1..n as u32)
        .map(|i| x0.inverse().conjugate(&FreeWord::generator(i)))
        .collect();
    images.push(x0.inverse());
    FreeEndo::new(images).expect("images use generators below n")
}

/// Horizontal multi-twist of the 2n-gon.
pub fn lift_t_2ngon(n: usize) -> FreeEndo {
    let x = |i: usize| FreeWord::generator(i as u32);
    let xi = |i: usize| FreeWord::generator(i as u32).inverse();
    // prod_{i=0}^{j} x_i x_{n-1-i}^-1
    let prefix = |j: usize| {
        (0..=j).fold(FreeWord::identity(), |acc, i| acc.product(&x(i)).product(&xi(n - 1 - i)))
    };
    // prod_{i=lo}^{j} x_{n-1-(j-i)}^-1 x_{j-i}
    let suffix = |lo: usize, j: usize| {
        (lo..=j).fold(FreeWord::identity(), |acc, i| {
            acc.product(&xi(n - 1 - (j - i))).product(&x(j - i))
        })
    };
    let h = (n - 1) / 2;
    let mut images = vec![FreeWord::identity(); n];
    for j in 0..h {
        let (p, s) = (prefix(j), suffix(1, j));
        images[j] = p.product(&x(j)).product(&s);
        images[n - 1 - j] = p.product(&x(n - 1 - j)).product(&s);
    }
    images[h] = prefix(h - 1).product(&x(h)).product(&suffix(0, h - 1));
    FreeEndo::new(images).expect("images use generators below n")
}

impl SurfaceModel {
    pub fn lift(&self, symbol: Gen) -> Option<&FreeEndo> {
        self.lifts.iter().find(|l| l.symbol == symbol).map(|l| &l.endo)
    }

    /// Replaces (or adds) the lift of `symbol`.
    pub fn with_lift(mut self, symbol: Gen, endo: FreeEndo) -> Self {
        self.lifts.retain(|l| l.symbol != symbol);
        self.lifts.push(Lift { symbol, endo });
        self
    }

    /// Dimension `2g` of the first homology.
    pub fn homology_dim(&self) -> usize {
        2 * self.genus
    }

    pub fn derivative(&self, g: Gen) -> Result<Mat2> {
        match g {
            Gen::T => Ok(self.derivative_t),
            _ if g == self.family.rotation() => Ok(self.derivative_rot),
            _ => Err(Error::UnknownSymbol(format!("{g:?}"))),
        }
    }

    /// Evaluates a word on the derivative matrices.
    pub fn eval_derivative(&self, w: &VeechWord) -> Result<Mat2> {
        let mut acc = [[1.0, 0.0], [0.0, 1.0]];
        for l in w.letters() {
            let m = self.derivative(l.gen)?;
            acc = mat_mul(&acc, &if l.inverse { mat_inv(&m) } else { m });
        }
        Ok(acc)
    }
}

/// One named pass/fail line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Checks the structural invariants of a model: rank, genus and singularity
/// counts, relators on the derivatives, and for each lift that it is an
/// automorphism permuting the boundary words up to conjugacy.
pub fn validate_surface(s: &SurfaceModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    let (rank, nu) = match s.family {
        Family::DoubleNGon => (s.n - 1, 1),
        Family::Regular2NGon => (s.n, 2),
    };
    report.push(
        "counts",
        s.rank == rank && s.nu == nu && s.genus == (s.n - 1) / 2 && s.rank == 2 * s.genus + s.nu - 1,
        format!("rank {}, genus {}, nu {}", s.rank, s.genus, s.nu),
    );
    report.push(
        "Euler characteristic",
        s.singularity_orders.iter().sum::<usize>() + 2 == 2 * s.genus,
        format!("orders {:?}", s.singularity_orders),
    );
    for r in &s.relators {
        let (ok, detail) = match s.eval_derivative(r) {
            Ok(m) => {
                let err = (m[0][0] - 1.0)
                    .abs()
                    .max(m[1][1] - 1.0)
                    .max(m[0][1].abs())
                    .max(m[1][0].abs())
                    .max((m[1][1] - 1.0).abs());
                (err < 1e-12, format!("max deviation {err:.2e}"))
            }
            Err(e) => (false, e.to_string()),
        };
        report.push(format!("relator {r} on derivatives"), ok, detail);
    }
    report.push(
        "boundary words cyclically reduced",
        s.boundary_words.iter().all(FreeWord::is_cyclically_reduced),
        String::new(),
    );
    for lift in &s.lifts {
        let name = format!("{:?}", lift.symbol);
        let auto = lift.endo.inverse();
        report.push(
            format!("lift {name} is an automorphism"),
            auto.is_ok(),
            auto.err().map(|e| e.to_string()).unwrap_or_default(),
        );
        let mut targets = Vec::new();
        for (i, c) in s.boundary_words.iter().enumerate() {
            let outcome = lift
                .endo
                .apply(c)
                .and_then(|img| recognize_boundary_conjugate(&img, &s.boundary_words));
            let (ok, detail) = match outcome {
                Ok(m) if m.sign > 0 => {
                    targets.push(m.index);
                    (true, format!("c{} -> conjugate of c{}", i + 1, m.index + 1))
                }
                Ok(m) => (false, format!("c{} -> inverted c{}", i + 1, m.index + 1)),
                Err(e) => (false, e.to_string()),
            };
            report.push(format!("lift {name} maps c{} to a boundary conjugate", i + 1), ok, detail);
        }
        targets.sort_unstable();
        targets.dedup();
        if targets.len() == s.boundary_words.len() {
            report.push(format!("lift {name} permutes the singularities"), true, String::new());
        }
    }
    report
}

/// Degree, genus and stratum of the characteristic cover `Ȳ_a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverStats {
    pub a: u64,
    pub degree: u128,
    pub genus: u128,
    /// `(order, multiplicity)`, one entry per distinct order.
    pub singularity_orders: Vec<(usize, u128)>,
}

/// Default bound on the degree accepted by [`characteristic_cover_stats`].
pub const DEFAULT_COVER_CAP: u128 = 1 << 100;

pub fn characteristic_cover_stats(s: &SurfaceModel, a: u64) -> Result<CoverStats> {
    cover_stats_with_cap(s, a, DEFAULT_COVER_CAP)
}

/// The cover is unramified of degree `a^{2g}`, so every singularity of order
/// `d` has `a^{2g}` preimages of order `d`.
pub fn cover_stats_with_cap(s: &SurfaceModel, a: u64, cap: u128) -> Result<CoverStats> {
    if a == 0 {
        return Err(Error::UnsupportedParameter("modulus 0".into()));
    }
    let too_large = || Error::CoverTooLarge {
        degree_hint: format!("{a}^{}", 2 * s.genus),
    };
    let degree = (a as u128)
        .checked_pow(2 * s.genus as u32)
        .filter(|&d| d <= cap)
        .ok_or_else(too_large)?;
    let genus = degree
        .checked_mul(s.genus as u128 - 1)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(too_large)?;
    let mut orders: Vec<(usize, u128)> = Vec::new();
    for &d in &s.singularity_orders {
        match orders.iter_mut().find(|(o, _)| *o == d) {
            Some(entry) => entry.1 += degree,
            None => orders.push((d, degree)),
        }
    }
    Ok(CoverStats {
        a,
        degree,
        genus,
        singularity_orders: orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> FreeWord {
        s.parse().unwrap()
    }

    #[test]
    fn double_ngon_data() {
        let s = build_double_ngon(5).unwrap();
        assert_eq!((s.rank, s.nu, s.genus), (4, 1, 2));
        assert!((s.lambda - 2.7527638409).abs() < 1e-9);
        let s = build_double_ngon(7).unwrap();
        assert_eq!((s.rank, s.genus), (6, 3));
        assert!(validate_surface(&s).passed());
        assert!(matches!(build_double_ngon(4), Err(Error::UnsupportedParameter(_))));
        assert!(build_double_ngon(3).is_err());
    }

    #[test]
    fn regular_2ngon_data() {
        let s = build_regular_2ngon(5).unwrap();
        assert_eq!((s.rank, s.nu, s.genus), (5, 2, 2));
        assert_eq!(s.lift(Gen::S).unwrap().image(4), &w("x0^-1"));
        assert_eq!(s.lift(Gen::T).unwrap().image(0), &w("x0 x4^-1 x0"));
        assert_eq!(s.boundary_words[0], w("x0 x1^-1 x2 x3^-1 x4"));
        assert_eq!(s.boundary_words[1], w("x0^-1 x1 x2^-1 x3 x4^-1"));
        assert!(build_regular_2ngon(4).is_err());
    }

    #[test]
    fn lift_t_matches_hand_expansion() {
        // n = 5, j = 1: (x0 x4^-1)(x1 x3^-1) x1 (x4^-1 x0)
        let t = lift_t_2ngon(5);
        assert_eq!(t.image(1), &w("x0 x4^-1 x1 x3^-1 x1 x4^-1 x0"));
        assert_eq!(t.image(3), &w("x0 x4^-1 x1 x3^-1 x3 x4^-1 x0"));
        // middle generator x2: (x0 x4^-1)(x1 x3^-1) x2 (x3^-1 x1)(x4^-1 x0)
        assert_eq!(t.image(2), &w("x0 x4^-1 x1 x3^-1 x2 x3^-1 x1 x4^-1 x0"));
        assert_eq!(t.image(4), &w("x0 x4^-1 x4"));
    }

    #[test]
    fn shipped_models_validate() {
        for n in [5, 7, 9, 11] {
            let s = build_regular_2ngon(n).unwrap();
            let r = validate_surface(&s);
            assert!(r.passed(), "n = {n}: {:?}", r.failures().collect::<Vec<_>>());
            assert!(validate_surface(&build_double_ngon(n).unwrap()).passed());
        }
    }

    #[test]
    fn boundary_images() {
        let s = build_regular_2ngon(5).unwrap();
        let (c1, c2) = (&s.boundary_words[0], &s.boundary_words[1]);
        let r2 = s.lift(Gen::S).unwrap();
        let t = s.lift(Gen::T).unwrap();
        assert_eq!(r2.apply(c1).unwrap(), w("x0").conjugate(c2));
        assert_eq!(r2.apply(c2).unwrap(), w("x0^-1").conjugate(c1));
        assert_eq!(t.apply(c1).unwrap(), *c1);
        assert_eq!(t.apply(c2).unwrap(), *c2);
        let tw = lift_r2_twisted_2ngon(5);
        assert_eq!(tw.apply(c1).unwrap(), *c2);
        assert_eq!(tw.apply(c2).unwrap(), w("x0^-2").conjugate(c1));
    }

    #[test]
    fn corrupted_lift_fails_validation() {
        let s = build_regular_2ngon(5).unwrap();
        let mut images = s.lift(Gen::S).unwrap().images().to_vec();
        images[4] = w("x0");
        let bad = s.with_lift(Gen::S, FreeEndo::new(images).unwrap());
        let r = validate_surface(&bad);
        assert!(!r.passed());
        assert!(r.failures().any(|c| c.name.contains("boundary conjugate")));
    }

    #[test]
    fn cover_stats() {
        let x5 = build_double_ngon(5).unwrap();
        let c = characteristic_cover_stats(&x5, 2).unwrap();
        assert_eq!((c.degree, c.genus), (16, 17));
        assert_eq!(c.singularity_orders, vec![(2, 16)]);
        let x10 = build_regular_2ngon(5).unwrap();
        let c = characteristic_cover_stats(&x10, 3).unwrap();
        assert_eq!((c.degree, c.genus), (81, 82));
        assert_eq!(c.singularity_orders, vec![(1, 162)]);
        let c = characteristic_cover_stats(&x10, 1).unwrap();
        assert_eq!((c.degree, c.genus), (1, 2));
        assert!(matches!(
            cover_stats_with_cap(&x5, 10, 1000),
            Err(Error::CoverTooLarge { .. })
        ));
    }
}
