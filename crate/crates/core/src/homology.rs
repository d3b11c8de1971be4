//! Abelianization `ab`, induced matrices of free-group endomorphisms, and the
//! homology representation `φ̄_a` of the Veech group generators.
//!
//! For the regular 2n-gon the matrices are induced by the free-group lifts.
//! For the double n-gon they come from a validated data pack.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freewords::{FreeEndo, FreeWord};
use crate::matrix::{IntMatrix, ModMatrix};
use crate::presentation::{Family, Gen, VeechWord};
use crate::surfaces::SurfaceModel;

/// `ab(x_i)` for every generator of the free group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyBasis {
    dim: usize,
    columns: Vec<Vec<i64>>,
    /// Generator indices whose images are the standard unit vectors, in order.
    basis_generators: Vec<usize>,
}

impl HomologyBasis {
    pub fn for_surface(s: &SurfaceModel) -> Self {
        match s.family {
            Family::DoubleNGon => HomologyBasis::double_ngon(s.n),
            Family::Regular2NGon => HomologyBasis::regular_2ngon(s.n),
        }
    }

    /// `ab(x_i) = e_{i+1}` on all `n-1` generators.
    pub fn double_ngon(n: usize) -> Self {
        let dim = n - 1;
        HomologyBasis {
            dim,
            columns: (0..dim).map(|i| unit(dim, i)).collect(),
            basis_generators: (0..dim).collect(),
        }
    }

    /// Basis `ab(x_0), ..., ab(x_{(n-3)/2}), ab(x_{(n+1)/2}), ..., ab(x_{n-1})`;
    /// the middle generator is determined by `ab(c_1) = 0`.
    pub fn regular_2ngon(n: usize) -> Self {
        let h = (n - 1) / 2;
        let dim = n - 1;
        let basis_generators: Vec<usize> = (0..n).filter(|&i| i != h).collect();
        let mut columns = vec![Vec::new(); n];
        for (k, &g) in basis_generators.iter().enumerate() {
            columns[g] = unit(dim, k);
        }
        // entry i (1-based) is (-1)^i on the first half, (-1)^(i+1) on the
        // second, for n = 1 mod 4; both signs flip for n = 3 mod 4
        let flip: i64 = if n % 4 == 1 { 1 } else { -1 };
        columns[h] = (1..=dim)
            .map(|i| {
                let s = if i % 2 == 0 { 1 } else { -1 };
                flip * if i <= h { s } else { -s }
            })
            .collect();
        HomologyBasis {
            dim,
            columns,
            basis_generators,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, generator: usize) -> &[i64] {
        &self.columns[generator]
    }

    pub fn basis_generators(&self) -> &[usize] {
        &self.basis_generators
    }
}

fn unit(dim: usize, k: usize) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[k] = 1;
    v
}

/// Signed sum of the generator columns along `w`.
pub fn ab_of_word(basis: &HomologyBasis, w: &FreeWord) -> Result<Vec<i64>> {
    if w.min_rank() > basis.rank() {
        return Err(Error::RankMismatch {
            expected: basis.rank(),
            found: w.min_rank(),
        });
    }
    let mut v = vec![0i64; basis.dim];
    for l in w.letters() {
        for (acc, x) in v.iter_mut().zip(&basis.columns[l.generator as usize]) {
            *acc += l.sign() * x;
        }
    }
    Ok(v)
}

/// The matrix `M` with `M · ab(x_i) = ab(e(x_i))` for every generator.
///
/// Columns are read off on the basis generators; the remaining generators
/// must then satisfy the same equation, otherwise `e` does not descend to
/// homology and `KernelNotRespected` is returned.
pub fn induced_matrix(basis: &HomologyBasis, e: &FreeEndo) -> Result<IntMatrix> {
    if e.rank() != basis.rank() {
        return Err(Error::RankMismatch {
            expected: basis.rank(),
            found: e.rank(),
        });
    }
    let cols = basis
        .basis_generators
        .iter()
        .map(|&g| ab_of_word(basis, e.image(g)))
        .collect::<Result<Vec<_>>>()?;
    let m = IntMatrix::from_columns(&cols)?;
    for g in 0..basis.rank() {
        let lhs = m.mul_vec(&basis.columns[g])?;
        let rhs = ab_of_word(basis, e.image(g))?;
        if lhs != rhs {
            return Err(Error::KernelNotRespected(format!(
                "x{g}: M·ab(x{g}) = {lhs:?} but ab(e(x{g})) = {rhs:?}"
            )));
        }
    }
    Ok(m)
}

/// Homology matrices of `T` and `R` on the double n-gon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XnHomologyPack {
    pub n: usize,
    #[serde(rename = "Tbar")]
    pub tbar: IntMatrix,
    #[serde(rename = "Rbar")]
    pub rbar: IntMatrix,
    pub provenance: String,
}

const BUILTIN_PACKS: [(usize, &str); 4] = [
    (5, include_str!("../data/xn_pack_5.json")),
    (7, include_str!("../data/xn_pack_7.json")),
    (11, include_str!("../data/xn_pack_11.json")),
    (13, include_str!("../data/xn_pack_13.json")),
];

impl XnHomologyPack {
    /// Parses and validates a pack.
    pub fn from_json(text: &str) -> Result<Self> {
        let pack: XnHomologyPack = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            reason: e.to_string(),
        })?;
        pack.validate()?;
        Ok(pack)
    }

    /// The pack shipped with the library for `n` in 5, 7, 11, 13.
    pub fn builtin(n: usize) -> Result<Self> {
        let (_, text) = BUILTIN_PACKS
            .iter()
            .find(|(k, _)| *k == n)
            .ok_or(Error::MissingPack(n))?;
        XnHomologyPack::from_json(text)
    }

    pub fn builtin_sizes() -> Vec<usize> {
        BUILTIN_PACKS.iter().map(|(k, _)| *k).collect()
    }

    /// Checks the presentation relations and unipotency of `T`.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let dim = n.saturating_sub(1);
        let fail = |relation: &str| Error::InvalidPack {
            relation: relation.to_string(),
        };
        if n < 5 || n.is_multiple_of(2) {
            return Err(fail("n odd and at least 5"));
        }
        for (name, m) in [("Tbar", &self.tbar), ("Rbar", &self.rbar)] {
            if m.rows() != dim || m.cols() != dim {
                return Err(fail(&format!("{name} is {dim}x{dim}")));
            }
        }
        let id = IntMatrix::identity(dim);
        let r = &self.rbar;
        let t = &self.tbar;
        let rn = r.pow(n as u64)?;
        if !r.pow(2 * n as u64)?.is_identity() {
            return Err(fail("R^(2n) = I"));
        }
        if rn != id.neg() {
            return Err(fail("R^n = -I"));
        }
        let t_inv = t
            .inverse_unimodular()
            .map_err(|_| fail("det T = ±1"))?;
        if t_inv.mul(r)?.pow(2)? != rn {
            return Err(fail("(T^-1 R)^2 = R^n"));
        }
        if rn.mul(t)? != t.mul(&rn)? {
            return Err(fail("R^n T = T R^n"));
        }
        let nil = t.sub(&id)?;
        if !nil.mul(&nil)?.is_zero() {
            return Err(fail("(T - I)^2 = 0"));
        }
        if nil.rank() != (n - 1) / 2 {
            return Err(fail("rank(T - I) = (n-1)/2"));
        }
        Ok(())
    }
}

/// Integer matrices of the two Veech group generators and their inverses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyRep {
    pub family: Family,
    pub n: usize,
    t: IntMatrix,
    rot: IntMatrix,
    t_inv: IntMatrix,
    rot_inv: IntMatrix,
}

impl HomologyRep {
    /// For the 2n-gon the matrices are induced by the shipped lifts; for the
    /// double n-gon `pack` is used, falling back to the built-in pack.
    pub fn for_surface(s: &SurfaceModel, pack: Option<&XnHomologyPack>) -> Result<Self> {
        let (t, rot) = match s.family {
            Family::Regular2NGon => {
                let basis = HomologyBasis::for_surface(s);
                let lift = |g: Gen| {
                    s.lift(g)
                        .ok_or_else(|| Error::UnknownSymbol(format!("no lift for {g:?}")))
                };
                (
                    induced_matrix(&basis, lift(Gen::T)?)?,
                    induced_matrix(&basis, lift(Gen::S)?)?,
                )
            }
            Family::DoubleNGon => {
                let owned;
                let pack = match pack {
                    Some(p) => {
                        p.validate()?;
                        p
                    }
                    None => {
                        owned = XnHomologyPack::builtin(s.n)?;
                        &owned
                    }
                };
                if pack.n != s.n {
                    return Err(Error::MissingPack(s.n));
                }
                (pack.tbar.clone(), pack.rbar.clone())
            }
        };
        Ok(HomologyRep {
            family: s.family,
            n: s.n,
            t_inv: t.inverse_unimodular()?,
            rot_inv: rot.inverse_unimodular()?,
            t,
            rot,
        })
    }

    pub fn dim(&self) -> usize {
        self.t.rows()
    }

    pub fn t(&self) -> &IntMatrix {
        &self.t
    }

    /// `R̄` for the double n-gon, `R̄²` for the 2n-gon.
    pub fn rot(&self) -> &IntMatrix {
        &self.rot
    }

    pub fn generator_matrix(&self, g: Gen, inverse: bool) -> Result<&IntMatrix> {
        match (g, inverse) {
            (Gen::T, false) => Ok(&self.t),
            (Gen::T, true) => Ok(&self.t_inv),
            (g, false) if g == self.family.rotation() => Ok(&self.rot),
            (g, true) if g == self.family.rotation() => Ok(&self.rot_inv),
            (g, _) => Err(Error::UnknownSymbol(format!("{g:?}"))),
        }
    }

    /// Integer matrix of a word.
    pub fn int_word(&self, w: &VeechWord) -> Result<IntMatrix> {
        let mut acc = IntMatrix::identity(self.dim());
        for l in w.letters() {
            acc = acc.mul(self.generator_matrix(l.gen, l.inverse)?)?;
        }
        Ok(acc)
    }

    /// `φ̄_a` of the two generators, in the order `T`, rotation.
    pub fn generators_mod(&self, a: u32) -> Result<[ModMatrix; 2]> {
        Ok([self.t.to_mod(a)?, self.rot.to_mod(a)?])
    }

    /// `φ̄_a(w)`, multiplying reduced generator matrices left to right.
    pub fn phibar_word(&self, a: u32, w: &VeechWord) -> Result<ModMatrix> {
        let mut acc = ModMatrix::identity(a, self.dim())?;
        for l in w.letters() {
            acc = acc.mul(&self.generator_matrix(l.gen, l.inverse)?.to_mod(a)?)?;
        }
        Ok(acc)
    }

    /// Whether `φ̄_{ka}(w)` reduces entrywise to `φ̄_a(w)`.
    pub fn reduction_compat(&self, ka: u32, a: u32, w: &VeechWord) -> Result<bool> {
        if a == 0 || !ka.is_multiple_of(a) {
            return Err(Error::UnsupportedParameter(format!("{a} does not divide {ka}")));
        }
        Ok(self.phibar_word(ka, w)?.reduce(a)? == self.phibar_word(a, w)?)
    }
}

/// Convenience wrapper around [`HomologyRep::phibar_word`].
pub fn phibar_word(
    s: &SurfaceModel,
    pack: Option<&XnHomologyPack>,
    a: u32,
    w: &VeechWord,
) -> Result<ModMatrix> {
    HomologyRep::for_surface(s, pack)?.phibar_word(a, w)
}
