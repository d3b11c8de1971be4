//! Reduced words and endomorphisms of the free group `F_n`.
//!
//! Words are freely reduced at construction, so every `FreeWord` value is in
//! normal form and equality of values is equality of group elements.
//! Generators are numbered `x0 .. x{n-1}`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: u32,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: u32, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    /// Builds a word from arbitrary letters, reducing freely.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            push_reduced(&mut out, l);
        }
        FreeWord { letters: out }
    }

    /// The single-letter word `x_i`.
    pub fn generator(i: u32) -> Self {
        FreeWord {
            letters: vec![Letter::new(i, false)],
        }
    }

    /// Builds a word from `(generator, exponent)` pairs, e.g. `[(0, 1), (1, -1)]`
    /// for `x0 x1^-1`.
    pub fn from_powers(powers: &[(u32, i64)]) -> Self {
        FreeWord::from_letters(powers.iter().flat_map(|&(g, e)| {
            std::iter::repeat_n(Letter::new(g, e < 0), e.unsigned_abs() as usize)
        }))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used, plus one (0 for the empty word).
    pub fn min_rank(&self) -> usize {
        self.letters
            .iter()
            .map(|l| l.generator as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn product(&self, other: &FreeWord) -> FreeWord {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut out, l);
        }
        FreeWord { letters: out }
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> FreeWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.product(&base);
        }
        out
    }

    /// `self · w · self^-1`.
    pub fn conjugate(&self, w: &FreeWord) -> FreeWord {
        self.product(w).product(&self.inverse())
    }

    /// Splits the word as `u · core · u^-1` with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (FreeWord, FreeWord) {
        let l = &self.letters;
        let mut k = 0;
        while 2 * k + 1 < l.len() && l[k].cancels(l[l.len() - 1 - k]) {
            k += 1;
        }
        let u = FreeWord {
            letters: l[..k].to_vec(),
        };
        let core = FreeWord {
            letters: l[k..l.len() - k].to_vec(),
        };
        (u, core)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(a), Some(b)) => self.letters.len() == 1 || !a.cancels(*b),
            _ => true,
        }
    }

    /// Rotation `w[k..] w[..k]`.
    fn rotated(&self, k: usize) -> Vec<Letter> {
        let mut v = self.letters[k..].to_vec();
        v.extend_from_slice(&self.letters[..k]);
        v
    }

    fn prefix(&self, k: usize) -> FreeWord {
        FreeWord {
            letters: self.letters[..k].to_vec(),
        }
    }

    /// Parses whitespace-separated tokens `xK` or `xK^E`, rejecting indices
    /// `>= rank`. The literal `1` (or an empty string) is the identity.
    pub fn parse_with_rank(s: &str, rank: usize) -> Result<FreeWord> {
        let w: FreeWord = s.parse()?;
        if w.min_rank() > rank {
            return Err(Error::RankMismatch {
                expected: rank,
                found: w.min_rank(),
            });
        }
        Ok(w)
    }
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    match out.last() {
        Some(&last) if last.cancels(l) => {
            out.pop();
        }
        _ => out.push(l),
    }
}

impl FromStr for FreeWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut powers = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let body = tok
                .strip_prefix('x')
                .ok_or_else(|| Error::parse(1, format!("bad word token {tok:?}")))?;
            let (idx, exp) = match body.split_once('^') {
                Some((i, e)) => (i, e),
                None => (body, "1"),
            };
            let idx: u32 = idx
                .parse()
                .map_err(|_| Error::parse(1, format!("bad generator index in {tok:?}")))?;
            let exp: i64 = exp
                .parse()
                .map_err(|_| Error::parse(1, format!("bad exponent in {tok:?}")))?;
            powers.push((idx, exp));
        }
        Ok(FreeWord::from_powers(&powers))
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if l.inverse {
                write!(f, "x{}^-1", l.generator)?;
            } else {
                write!(f, "x{}", l.generator)?;
            }
        }
        Ok(())
    }
}

/// An endomorphism of `F_n`, given by the images of the generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeEndo {
    images: Vec<FreeWord>,
}

impl FreeEndo {
    pub fn new(images: Vec<FreeWord>) -> Result<Self> {
        let rank = images.len();
        for w in &images {
            if w.min_rank() > rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    found: w.min_rank(),
                });
            }
        }
        Ok(FreeEndo { images })
    }

    pub fn identity(rank: usize) -> Self {
        FreeEndo {
            images: (0..rank as u32).map(FreeWord::generator).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &FreeWord {
        &self.images[i]
    }

    /// Substitutes every letter of `w` by its image and reduces.
    pub fn apply(&self, w: &FreeWord) -> Result<FreeWord> {
        if w.min_rank() > self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: w.min_rank(),
            });
        }
        let mut out = Vec::new();
        for l in w.letters() {
            let img = &self.images[l.generator as usize];
            if l.inverse {
                for &m in img.letters().iter().rev() {
                    push_reduced(&mut out, m.inv());
                }
            } else {
                for &m in img.letters() {
                    push_reduced(&mut out, m);
                }
            }
        }
        Ok(FreeWord { letters: out })
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &FreeEndo) -> Result<FreeEndo> {
        if self.rank() != inner.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: inner.rank(),
            });
        }
        let images = inner
            .images
            .iter()
            .map(|w| self.apply(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(FreeEndo { images })
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| *w == FreeWord::generator(i as u32))
    }

    /// Computes the inverse automorphism by Stallings folding of the rose
    /// spelled by the images, then checks both compositions.
    ///
    /// Every edge carries, besides its `x` letter, a word in the images
    /// `y_j = self(x_j)` (encoded as generator `j`), chosen so that the
    /// labels along any path from the base multiply to the same element as
    /// its `x` letters. For an automorphism the folded graph is a single
    /// vertex with one loop per `x_g`, and that loop's label is `self^-1(x_g)`.
    pub fn inverse(&self) -> Result<FreeEndo> {
        let n = self.rank();
        let mut edges: Vec<Edge> = Vec::new();
        let mut vertices = 1usize;
        for (j, w) in self.images.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::NotAutomorphism(format!("x{j} maps to the identity")));
            }
            let mut at = 0;
            for (k, l) in w.letters().iter().enumerate() {
                let to = if k + 1 == w.len() {
                    0
                } else {
                    vertices += 1;
                    vertices - 1
                };
                let label = if k == 0 {
                    FreeWord::generator(j as u32)
                } else {
                    FreeWord::identity()
                };
                // store edges in the positive direction of their letter
                let e = if l.inverse {
                    Edge { from: to, to: at, generator: l.generator, label: label.inverse() }
                } else {
                    Edge { from: at, to, generator: l.generator, label }
                };
                edges.push(e);
                at = to;
            }
        }
        while let Some((e1, e2, at_start)) = find_fold(&edges) {
            // the far endpoints of the two edges as seen from the shared vertex
            let far = |e: &Edge| if at_start { e.to } else { e.from };
            // label read from the shared vertex towards the far endpoint
            let read = |e: &Edge| if at_start { e.label.clone() } else { e.label.inverse() };
            let (mut keep, mut drop) = (e1, e2);
            if far(&edges[drop]) == 0 {
                std::mem::swap(&mut keep, &mut drop);
            }
            let (w1, w2) = (far(&edges[keep]), far(&edges[drop]));
            let (p1, p2) = (read(&edges[keep]), read(&edges[drop]));
            if w1 == w2 {
                if p1 != p2 {
                    return Err(Error::NotAutomorphism(
                        "the images satisfy a nontrivial relation".into(),
                    ));
                }
                edges.swap_remove(drop);
                continue;
            }
            // move w2 onto w1: reaching w2 with label X equals reaching w1
            // with X c
            let c = p2.inverse().product(&p1);
            let c_inv = c.inverse();
            edges.swap_remove(drop);
            for e in edges.iter_mut() {
                if e.from == w2 {
                    e.label = c_inv.product(&e.label);
                    e.from = w1;
                }
                if e.to == w2 {
                    e.label = e.label.product(&c);
                    e.to = w1;
                }
            }
        }
        let mut images: Vec<Option<FreeWord>> = vec![None; n];
        for e in &edges {
            if e.from != 0 || e.to != 0 || images[e.generator as usize].is_some() {
                return Err(Error::NotAutomorphism("images do not generate the free group".into()));
            }
            images[e.generator as usize] = Some(e.label.clone());
        }
        let images = images
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::NotAutomorphism("images do not generate the free group".into()))?;
        let inv = FreeEndo { images };
        if !self.compose(&inv)?.is_identity() || !inv.compose(self)?.is_identity() {
            return Err(Error::NotAutomorphism("inverse check failed".into()));
        }
        Ok(inv)
    }
}

struct Edge {
    from: usize,
    to: usize,
    generator: u32,
    label: FreeWord,
}

/// Two distinct edges with the same letter leaving (or entering) a common
/// vertex. The flag tells which: `true` for a shared start.
fn find_fold(edges: &[Edge]) -> Option<(usize, usize, bool)> {
    let mut seen: std::collections::HashMap<(usize, u32, bool), usize> =
        std::collections::HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        for (v, at_start) in [(e.from, true), (e.to, false)] {
            if let Some(&j) = seen.get(&(v, e.generator, at_start)) {
                return Some((j, i, at_start));
            }
            seen.insert((v, e.generator, at_start), i);
        }
    }
    None
}

impl fmt::Display for FreeEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "x{i} -> {w}")?;
        }
        Ok(())
    }
}

/// An endomorphism together with a verified two-sided inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeAuto {
    forward: FreeEndo,
    inverse: FreeEndo,
}

impl FreeAuto {
    pub fn new(forward: FreeEndo) -> Result<Self> {
        let inverse = forward.inverse()?;
        Ok(FreeAuto { forward, inverse })
    }

    pub fn forward(&self) -> &FreeEndo {
        &self.forward
    }

    pub fn inverse(&self) -> &FreeEndo {
        &self.inverse
    }
}

/// Result of matching a word against a list of boundary words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMatch {
    /// 0-based position in the boundary list.
    pub index: usize,
    pub conjugator: FreeWord,
    /// `+1` or `-1`.
    pub sign: i8,
}

impl BoundaryMatch {
    /// Rebuilds `v · c^s · v^-1`.
    pub fn reconstruct(&self, boundary: &[FreeWord]) -> FreeWord {
        let c = if self.sign < 0 {
            boundary[self.index].inverse()
        } else {
            boundary[self.index].clone()
        };
        self.conjugator.conjugate(&c)
    }
}

/// Writes `w = v · boundary[j]^s · v^-1`.
///
/// The cyclic core of `w` is compared against every rotation of
/// `boundary[j]^s`, scanning `j` in order, `s = +1` before `s = -1`, and
/// offsets in increasing order; the first match wins.
pub fn recognize_boundary_conjugate(w: &FreeWord, boundary: &[FreeWord]) -> Result<BoundaryMatch> {
    if w.is_empty() {
        return Err(Error::NotBoundaryConjugate);
    }
    let (u, core) = w.cyclic_reduce();
    for (j, c) in boundary.iter().enumerate() {
        for sign in [1i8, -1] {
            let b = if sign < 0 { c.inverse() } else { c.clone() };
            if b.len() != core.len() {
                continue;
            }
            for k in 0..b.len() {
                if b.rotated(k) == core.letters {
                    let p = b.prefix(k);
                    return Ok(BoundaryMatch {
                        index: j,
                        conjugator: u.product(&p.inverse()),
                        sign,
                    });
                }
            }
        }
    }
    Err(Error::NotBoundaryConjugate)
}
