//! Property (★) for the regular 2n-gon and the action of affine lifts on
//! singularities of the characteristic cover.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::freewords::{recognize_boundary_conjugate, FreeEndo, FreeWord};
use crate::homology::{ab_of_word, induced_matrix, HomologyBasis, HomologyRep};
use crate::matrix::{gcd, mod_inverse, IntMatrix};
use crate::presentation::Family;
use crate::snf::{solve_mod_linear, ModLinearSystem};
use crate::surfaces::{build_regular_2ngon, SurfaceModel};

/// The double n-gon has a single singularity, so property (★) holds in
/// every level.
pub const DOUBLE_NGON_HAS_STAR: bool = true;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarDecision {
    pub n: usize,
    pub a: u64,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<String>,
}

fn check_n(n: usize) -> Result<()> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::UnsupportedParameter(format!("n = {n} must be odd and at least 5")));
    }
    Ok(())
}

/// `[(I + R̄²); (T̄ − I)] z ≡ [2e₁; 0] (mod a)`.
pub fn star_system(n: usize, a: u64) -> Result<ModLinearSystem> {
    check_n(n)?;
    let rep = HomologyRep::for_surface(&build_regular_2ngon(n)?, None)?;
    let dim = rep.dim();
    let id = IntMatrix::identity(dim);
    let m = id.add(rep.rot())?.vstack(&rep.t().sub(&id)?)?;
    let mut rhs = vec![0; 2 * dim];
    rhs[0] = 2;
    ModLinearSystem::new(a, m, rhs)
}

/// Decides property (★) in level `a` for the regular 2n-gon by solving
/// both affine conditions on the same translation vector.
pub fn star_decide(n: usize, a: u64) -> Result<StarDecision> {
    let sys = star_system(n, a)?;
    let sol = solve_mod_linear(&sys)?;
    if let Some(z) = &sol.particular {
        if !sys.check(z) {
            return Err(Error::DimensionMismatch("witness failed substitution".into()));
        }
    }
    Ok(StarDecision {
        n,
        a,
        holds: sol.solvable,
        witness: sol.particular,
        obstruction: sol.obstruction,
    })
}

/// The explicit solution `2/n · v` with `v = ((n−1)/2, −(n−3)/2, …)` in the
/// pattern matching `n mod 4`.
pub fn closed_form_z(n: usize, a: u64) -> Result<Vec<u64>> {
    check_n(n)?;
    let ai = i64::try_from(a).map_err(|_| Error::UnsupportedParameter(format!("a = {a}")))?;
    if ai < 2 {
        return Err(Error::UnsupportedParameter(format!("a = {a}")));
    }
    let ni = n as i64;
    if gcd(ni, ai) != 1 {
        return Err(Error::NotCoprime(format!("gcd({n}, {a}) > 1")));
    }
    let h = ni / 2;
    // first half alternates from (n-1)/2 down to 1 in absolute value; the
    // second half mirrors it with opposite signs
    let first: Vec<i64> = (0..h).map(|i| if i % 2 == 0 { h - i } else { -(h - i) }).collect();
    let mut v = first.clone();
    v.extend(first.iter().rev().map(|x| -x));
    let k = (2 * mod_inverse(ni, ai).expect("coprime")) % ai;
    Ok(v.into_iter()
        .map(|x| ((x as i128 * k as i128).rem_euclid(ai as i128)) as u64)
        .collect())
}

/// Targets and offsets of `(i, z) ↦ (j_i, φ̄_a(A)z + z_i)`. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityAction {
    pub modulus: u64,
    pub targets: Vec<usize>,
    pub offsets: Vec<Vec<u64>>,
    /// `φ̄_a(A)` as rows.
    pub matrix: Vec<Vec<u64>>,
}

impl SingularityAction {
    fn mat_vec(&self, z: &[u64]) -> Vec<u64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(z).map(|(x, y)| x * y).sum::<u64>() % self.modulus)
            .collect()
    }

    pub fn apply(&self, i: usize, z: &[u64]) -> (usize, Vec<u64>) {
        let az = self.mat_vec(z);
        let w = az
            .iter()
            .zip(&self.offsets[i])
            .map(|(x, y)| (x + y) % self.modulus)
            .collect();
        (self.targets[i], w)
    }

    /// The action of `self ∘ inner`: first `inner`, then `self`.
    pub fn after(&self, inner: &SingularityAction) -> SingularityAction {
        let a = self.modulus;
        let targets = inner.targets.iter().map(|&j| self.targets[j]).collect();
        let offsets = inner
            .offsets
            .iter()
            .zip(&inner.targets)
            .map(|(z, &j)| {
                self.mat_vec(z)
                    .iter()
                    .zip(&self.offsets[j])
                    .map(|(x, y)| (x + y) % a)
                    .collect()
            })
            .collect();
        let dim = self.matrix.len();
        let matrix = (0..dim)
            .map(|r| {
                (0..dim)
                    .map(|c| (0..dim).map(|k| self.matrix[r][k] * inner.matrix[k][c]).sum::<u64>() % a)
                    .collect()
            })
            .collect();
        SingularityAction {
            modulus: a,
            targets,
            offsets,
            matrix,
        }
    }

    /// Whether the map is a bijection of `{singularities} × (Z/aZ)^dim`.
    /// Enumerates every point, so only meant for small covers.
    pub fn is_permutation(&self) -> bool {
        let mut sorted = self.targets.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.targets.len() {
            return false;
        }
        let dim = self.matrix.len();
        let a = self.modulus;
        let count = (a as usize).pow(dim as u32);
        let mut seen = vec![false; count];
        let index = |z: &[u64]| z.iter().rev().fold(0usize, |acc, &x| acc * a as usize + x as usize);
        for p in 0..count {
            let mut z = vec![0u64; dim];
            let mut rest = p;
            for x in z.iter_mut() {
                *x = (rest % a as usize) as u64;
                rest /= a as usize;
            }
            let w = self.mat_vec(&z);
            if std::mem::replace(&mut seen[index(&w)], true) {
                return false;
            }
        }
        true
    }
}

/// For each chosen boundary representative `ĉ_i = v_i c_{k_i} v_i^-1` (given
/// as `(k_i, v_i)`), recognizes `lift(ĉ_i) = v ĉ_j v^-1` and records
/// `(j, m_a(v))`.
pub fn singularity_action(
    surface: &SurfaceModel,
    a: u64,
    lift: &FreeEndo,
    chat: &[(usize, FreeWord)],
) -> Result<SingularityAction> {
    if surface.family != Family::Regular2NGon {
        return Err(Error::UnsupportedParameter(
            "singularity actions are computed for the regular 2n-gon".into(),
        ));
    }
    let ai = i64::try_from(a).map_err(|_| Error::UnsupportedParameter(format!("a = {a}")))?;
    if ai < 1 {
        return Err(Error::UnsupportedParameter(format!("a = {a}")));
    }
    let boundary = &surface.boundary_words;
    let mut used = vec![false; boundary.len()];
    for (k, _) in chat {
        if *k >= boundary.len() || std::mem::replace(&mut used[*k], true) {
            return Err(Error::DimensionMismatch(format!(
                "boundary representatives must use each of the {} boundary words once",
                boundary.len()
            )));
        }
    }
    if chat.len() != boundary.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} boundary representatives for {} singularities",
            chat.len(),
            boundary.len()
        )));
    }
    let basis = HomologyBasis::for_surface(surface);
    let matrix = induced_matrix(&basis, lift)?;
    let chat_words: Vec<FreeWord> = chat.iter().map(|(k, v)| v.conjugate(&boundary[*k])).collect();
    // position in the chat list of each raw boundary word
    let mut slot = vec![0; boundary.len()];
    for (i, (k, _)) in chat.iter().enumerate() {
        slot[*k] = i;
    }
    let mut targets = Vec::with_capacity(chat.len());
    let mut offsets = Vec::with_capacity(chat.len());
    for (i, c) in chat_words.iter().enumerate() {
        let image = lift.apply(c)?;
        let m = recognize_boundary_conjugate(&image, boundary)?;
        if m.sign < 0 {
            return Err(Error::OrientationViolation { index: i });
        }
        let j = slot[m.index];
        // image = u c_k u^-1 = (u v_j^-1) ĉ_j (u v_j^-1)^-1
        let v = m.conjugator.product(&chat[j].1.inverse());
        let ab = ab_of_word(&basis, &v)?;
        targets.push(j);
        offsets.push(ab.iter().map(|x| x.rem_euclid(ai) as u64).collect());
    }
    let matrix = (0..matrix.rows())
        .map(|r| matrix.row(r).iter().map(|x| x.rem_euclid(ai) as u64).collect())
        .collect();
    Ok(SingularityAction {
        modulus: a,
        targets,
        offsets,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Gen;
    use crate::surfaces::{lift_r2_2ngon, lift_t_2ngon};

    fn substitutes(n: usize, a: u64, z: &[u64]) -> bool {
        star_system(n, a).unwrap().check(z)
    }

    #[test]
    fn small_decisions() {
        assert!(star_decide(5, 2).unwrap().holds);
        assert!(substitutes(5, 2, &[0, 0, 0, 0]));
        assert!(!star_decide(5, 5).unwrap().holds);
        assert!(!star_decide(7, 7).unwrap().holds);
        assert!(star_decide(7, 2).unwrap().holds);
        assert!(star_decide(4, 3).is_err());
    }

    #[test]
    fn r2_condition_alone_fails_at_five() {
        let sys = star_system(5, 5).unwrap();
        let rows: Vec<Vec<i64>> = (0..4).map(|i| sys.matrix.row(i).to_vec()).collect();
        let half = ModLinearSystem::new(5, IntMatrix::from_rows(&rows).unwrap(), sys.rhs[..4].to_vec()).unwrap();
        assert!(!solve_mod_linear(&half).unwrap().solvable);
    }

    #[test]
    fn closed_form() {
        assert_eq!(closed_form_z(5, 3).unwrap(), vec![2, 2, 1, 1]);
        assert_eq!(closed_form_z(5, 2).unwrap(), vec![0, 0, 0, 0]);
        assert!(matches!(closed_form_z(5, 5), Err(Error::NotCoprime(_))));
        for n in [5, 7, 9, 11, 13] {
            for a in 2..16u64 {
                if gcd(n as i64, a as i64) == 1 {
                    assert!(substitutes(n, a, &closed_form_z(n, a).unwrap()), "n={n} a={a}");
                }
            }
        }
    }

    fn x10() -> SurfaceModel {
        build_regular_2ngon(5).unwrap()
    }

    fn plain_chat(s: &SurfaceModel) -> Vec<(usize, FreeWord)> {
        (0..s.boundary_words.len()).map(|k| (k, FreeWord::identity())).collect()
    }

    #[test]
    fn identity_lift_fixes_everything() {
        let s = x10();
        let act = singularity_action(&s, 3, &FreeEndo::identity(5), &plain_chat(&s)).unwrap();
        assert_eq!(act.targets, vec![0, 1]);
        assert!(act.offsets.iter().all(|z| z.iter().all(|&x| x == 0)));
        assert!(act.is_permutation());
    }

    #[test]
    fn twist_fixes_first_singularity() {
        let s = x10();
        for a in [2, 3, 5] {
            let act = singularity_action(&s, a, &lift_t_2ngon(5), &plain_chat(&s)).unwrap();
            assert_eq!(act.targets[0], 0);
            assert!(act.offsets[0].iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn rotation_swaps_singularities() {
        let s = x10();
        let chat = vec![(0, FreeWord::identity()), (1, FreeWord::generator(0))];
        let act = singularity_action(&s, 2, &lift_r2_2ngon(5), &chat).unwrap();
        assert_eq!(act.targets, vec![1, 0]);
        assert!(act.is_permutation());
        // direct check against the definition
        let basis = HomologyBasis::for_surface(&s);
        for (i, (k, v)) in chat.iter().enumerate() {
            let c = v.conjugate(&s.boundary_words[*k]);
            let j = act.targets[i];
            let image = lift_r2_2ngon(5).apply(&c).unwrap();
            let m = recognize_boundary_conjugate(&image, &s.boundary_words).unwrap();
            assert_eq!(m.index, chat[j].0);
            let w = m.conjugator.product(&chat[j].1.inverse());
            let ab: Vec<u64> = ab_of_word(&basis, &w).unwrap().iter().map(|x| x.rem_euclid(2) as u64).collect();
            assert_eq!(act.offsets[i], ab);
        }
    }

    #[test]
    fn composition_law() {
        let s = x10();
        let chat = vec![(0, FreeWord::identity()), (1, FreeWord::generator(0))];
        let r = s.lift(Gen::S).unwrap().clone();
        let t = s.lift(Gen::T).unwrap().clone();
        for a in [2, 3, 4] {
            let fr = singularity_action(&s, a, &r, &chat).unwrap();
            let ft = singularity_action(&s, a, &t, &chat).unwrap();
            let composed = singularity_action(&s, a, &r.compose(&t).unwrap(), &chat).unwrap();
            assert_eq!(fr.after(&ft), composed);
            let composed = singularity_action(&s, a, &t.compose(&r).unwrap(), &chat).unwrap();
            assert_eq!(ft.after(&fr), composed);
        }
    }

    #[test]
    fn bad_chat() {
        let s = x10();
        let chat = vec![(0, FreeWord::identity()), (0, FreeWord::identity())];
        assert!(singularity_action(&s, 2, &FreeEndo::identity(5), &chat).is_err());
    }
}
