//! Coset graphs of finite-index subgroups of the Veech group: validation,
//! Wohlfahrt levels, non-congruence certificates, the search for minimal
//! congruence levels, and coset enumeration.
//!
//! Cosets are left cosets `AΓ` with generators acting by `c ↦ g·c`. The
//! subgroup `Γ` is the stabilizer of the base coset. Internally cosets are
//! numbered from 0; the text format numbers them from 1.

mod todd_coxeter;

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::Serialize;

pub use todd_coxeter::todd_coxeter;

use crate::error::{Error, Result};
use crate::homology::HomologyRep;
use crate::matgroup::is_congruence_of_level;
use crate::presentation::{Family, Gen, VeechWord};
use crate::surfaces::ValidationReport;

/// A 10-coset subgroup of the Veech group of the double pentagon with
/// Wohlfahrt level 12 that is not a congruence group.
pub const TEN_COSET_EXAMPLE: &str = "family: double-ngon
n: 5
cosets: 10
T: 1 6 8 7 2 5 4 9 10 3
R: 2 3 4 5 1 7 8 9 10 6
base: 1
";

/// Generators of the subgroup described by [`TEN_COSET_EXAMPLE`].
pub const TEN_COSET_GENERATORS: &str = "T, R^-1TR^-1, RT^2R, R^2TRTR, R^-2T^-2RTR^2, R^-2T^2RTR^2";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CosetGraph {
    pub family: Family,
    pub n: usize,
    perm_t: Vec<usize>,
    perm_rot: Vec<usize>,
    pub base: usize,
}

impl CosetGraph {
    /// Builds a graph from 0-based image arrays. Only lengths and ranges are
    /// checked here; see [`validate_coset_graph`] for the group relations.
    pub fn new(
        family: Family,
        n: usize,
        perm_t: Vec<usize>,
        perm_rot: Vec<usize>,
        base: usize,
    ) -> Result<Self> {
        let d = perm_t.len();
        if d == 0 || perm_rot.len() != d {
            return Err(Error::InvalidGraph(format!(
                "permutation lengths {} and {}",
                d,
                perm_rot.len()
            )));
        }
        if let Some(&x) = perm_t.iter().chain(&perm_rot).find(|&&x| x >= d) {
            return Err(Error::InvalidGraph(format!("image {} outside 1..={d}", x + 1)));
        }
        if base >= d {
            return Err(Error::InvalidGraph(format!("base {} outside 1..={d}", base + 1)));
        }
        Ok(CosetGraph {
            family,
            n,
            perm_t,
            perm_rot,
            base,
        })
    }

    /// The one-coset graph of the whole Veech group.
    pub fn trivial(family: Family, n: usize) -> Self {
        CosetGraph {
            family,
            n,
            perm_t: vec![0],
            perm_rot: vec![0],
            base: 0,
        }
    }

    /// Number of cosets.
    pub fn degree(&self) -> usize {
        self.perm_t.len()
    }

    pub fn perm_t(&self) -> &[usize] {
        &self.perm_t
    }

    /// Action of `R` (double n-gon) or `S` (2n-gon).
    pub fn perm_rot(&self) -> &[usize] {
        &self.perm_rot
    }

    fn perm(&self, g: Gen) -> Result<&[usize]> {
        match g {
            Gen::T => Ok(&self.perm_t),
            _ if g == self.family.rotation() => Ok(&self.perm_rot),
            _ => Err(Error::UnknownSymbol(format!("{g:?}"))),
        }
    }

    fn is_bijection(p: &[usize]) -> bool {
        let mut seen = vec![false; p.len()];
        p.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
    }

    fn inverse_perm(p: &[usize]) -> Vec<usize> {
        let mut inv = vec![0; p.len()];
        for (i, &x) in p.iter().enumerate() {
            inv[x] = i;
        }
        inv
    }

    /// The permutation of cosets induced by a word, `c ↦ w·c`. Requires
    /// bijective generator permutations.
    pub fn word_perm(&self, w: &VeechWord) -> Result<Vec<usize>> {
        let mut out: Vec<usize> = (0..self.degree()).collect();
        for l in w.letters().iter().rev() {
            let p = self.perm(l.gen)?;
            let p = if l.inverse {
                CosetGraph::inverse_perm(p)
            } else {
                p.to_vec()
            };
            for x in out.iter_mut() {
                *x = p[*x];
            }
        }
        Ok(out)
    }

    /// Cycle lengths of `perm_T`, indexed by coset.
    pub fn t_widths(&self) -> Vec<u64> {
        let d = self.degree();
        let mut width = vec![0u64; d];
        for start in 0..d {
            if width[start] != 0 {
                continue;
            }
            let mut cycle = vec![start];
            let mut c = self.perm_t[start];
            while c != start && cycle.len() <= d {
                cycle.push(c);
                c = self.perm_t[c];
            }
            for &x in &cycle {
                width[x] = cycle.len() as u64;
            }
        }
        width
    }

    /// Parses the text format:
    ///
    /// ```text
    /// family: double-ngon
    /// n: 5
    /// cosets: 10
    /// T: 1 6 8 7 2 5 4 9 10 3
    /// R: 2 3 4 5 1 7 8 9 10 6
    /// base: 1
    /// ```
    ///
    /// The rotation line is `S:` for the regular 2n-gon. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut family = None;
        let mut n = None;
        let mut cosets = None;
        let mut perm_t: Option<(usize, Vec<usize>)> = None;
        let mut perm_rot: Option<(usize, char, Vec<usize>)> = None;
        let mut base = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(line_no, "expected `key: value`"))?;
            let value = value.trim();
            let number = |v: &str| -> Result<usize> {
                v.parse()
                    .map_err(|_| Error::parse(line_no, format!("expected a number, got {v:?}")))
            };
            let numbers = |v: &str| -> Result<Vec<usize>> { v.split_whitespace().map(number).collect() };
            let dup = || Error::parse(line_no, format!("duplicate key {:?}", key.trim()));
            match key.trim() {
                "family" => {
                    let f = value.parse().map_err(|_| {
                        Error::parse(line_no, format!("unknown family {value:?}"))
                    })?;
                    if family.replace(f).is_some() {
                        return Err(dup());
                    }
                }
                "n" => {
                    if n.replace(number(value)?).is_some() {
                        return Err(dup());
                    }
                }
                "cosets" => {
                    if cosets.replace(number(value)?).is_some() {
                        return Err(dup());
                    }
                }
                "T" => {
                    if perm_t.replace((line_no, numbers(value)?)).is_some() {
                        return Err(dup());
                    }
                }
                k @ ("R" | "S") => {
                    let c = k.chars().next().unwrap_or('R');
                    if perm_rot.replace((line_no, c, numbers(value)?)).is_some() {
                        return Err(dup());
                    }
                }
                "base" => {
                    if base.replace(number(value)?).is_some() {
                        return Err(dup());
                    }
                }
                other => return Err(Error::parse(line_no, format!("unknown key {other:?}"))),
            }
        }
        let end = text.lines().count().max(1);
        let missing = |k: &str| Error::parse(end, format!("missing key {k:?}"));
        let family: Family = family.ok_or_else(|| missing("family"))?;
        let n = n.ok_or_else(|| missing("n"))?;
        let d = cosets.ok_or_else(|| missing("cosets"))?;
        let (t_line, t) = perm_t.ok_or_else(|| missing("T"))?;
        let (r_line, r_sym, r) = perm_rot.ok_or_else(|| missing("R or S"))?;
        let want = if family == Family::DoubleNGon { 'R' } else { 'S' };
        if r_sym != want {
            return Err(Error::parse(
                r_line,
                format!("{family} graphs use `{want}:` for the rotation"),
            ));
        }
        let to_zero_based = |line: usize, v: Vec<usize>| -> Result<Vec<usize>> {
            if v.len() != d {
                return Err(Error::parse(
                    line,
                    format!("expected {d} entries, found {}", v.len()),
                ));
            }
            v.into_iter()
                .map(|x| {
                    if (1..=d).contains(&x) {
                        Ok(x - 1)
                    } else {
                        Err(Error::parse(line, format!("entry {x} outside 1..={d}")))
                    }
                })
                .collect()
        };
        let t = to_zero_based(t_line, t)?;
        let r = to_zero_based(r_line, r)?;
        let base = base.unwrap_or(1);
        if !(1..=d).contains(&base) {
            return Err(Error::parse(end, format!("base {base} outside 1..={d}")));
        }
        CosetGraph::new(family, n, t, r, base - 1)
    }

    /// Emits the text format read by [`CosetGraph::parse`].
    pub fn to_text(&self) -> String {
        let join = |p: &[usize]| {
            p.iter()
                .map(|x| (x + 1).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let rot = if self.family == Family::DoubleNGon { 'R' } else { 'S' };
        let mut s = String::new();
        let _ = writeln!(s, "family: {}", self.family);
        let _ = writeln!(s, "n: {}", self.n);
        let _ = writeln!(s, "cosets: {}", self.degree());
        let _ = writeln!(s, "T: {}", join(&self.perm_t));
        let _ = writeln!(s, "{rot}: {}", join(&self.perm_rot));
        let _ = writeln!(s, "base: {}", self.base + 1);
        s
    }
}

/// Checks bijectivity, the defining relators and transitivity.
pub fn validate_coset_graph(g: &CosetGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    let rot = if g.family == Family::DoubleNGon { "R" } else { "S" };
    let t_ok = CosetGraph::is_bijection(&g.perm_t);
    let r_ok = CosetGraph::is_bijection(&g.perm_rot);
    report.push("perm_T is a bijection", t_ok, String::new());
    report.push(format!("perm_{rot} is a bijection"), r_ok, String::new());
    if !(t_ok && r_ok) {
        return report;
    }
    for r in g.family.relators(g.n) {
        let ok = g
            .word_perm(&r)
            .map(|p| p.iter().enumerate().all(|(i, &x)| i == x))
            .unwrap_or(false);
        report.push(format!("relator {r} acts trivially"), ok, String::new());
    }
    let mut seen = vec![false; g.degree()];
    seen[g.base] = true;
    let mut queue = VecDeque::from([g.base]);
    let mut reached = 1;
    while let Some(c) = queue.pop_front() {
        for p in [&g.perm_t, &g.perm_rot] {
            if !std::mem::replace(&mut seen[p[c]], true) {
                reached += 1;
                queue.push_back(p[c]);
            }
        }
    }
    report.push(
        "transitive from base",
        reached == g.degree(),
        format!("{reached} of {} cosets reached", g.degree()),
    );
    report
}

fn ensure_valid(g: &CosetGraph) -> Result<()> {
    let report = validate_coset_graph(g);
    let failure = report.failures().next().map(|c| c.name.clone());
    match failure {
        Some(name) => Err(Error::InvalidGraph(name)),
        None => Ok(()),
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Least common multiple of the `T`-cycle lengths.
pub fn wohlfahrt_level(g: &CosetGraph) -> Result<u64> {
    ensure_valid(g)?;
    Ok(g.t_widths().into_iter().fold(1, lcm))
}

/// Whether `G(m)`, the normal closure of `T^m`, lies in the subgroup.
pub fn contains_gm(g: &CosetGraph, m: u64) -> Result<bool> {
    if m == 0 {
        return Err(Error::UnsupportedParameter("m must be positive".into()));
    }
    Ok(m.is_multiple_of(wohlfahrt_level(g)?))
}

/// A coprime split `level = a·b` together with cosets `AΓ` and `BΓ` whose
/// widths show that the subgroup is not a congruence group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonCongruenceCertificate {
    pub split: (u64, u64),
    /// 1-based coset `AΓ`.
    pub coset_a: usize,
    /// 1-based coset `BΓ`.
    pub coset_b: usize,
    /// Widths at `AΓ` and `RAΓ`.
    pub widths_a: (u64, u64),
    /// Widths at `BΓ` and `RBΓ`.
    pub widths_b: (u64, u64),
}

impl NonCongruenceCertificate {
    /// Re-checks every condition against the raw graph.
    pub fn verify(&self, g: &CosetGraph) -> bool {
        let Ok(level) = wohlfahrt_level(g) else {
            return false;
        };
        let (a, b) = self.split;
        let w = g.t_widths();
        let d = g.degree();
        let widths_at = |c: usize| (w[c - 1], w[g.perm_rot[c - 1]]);
        g.family == Family::DoubleNGon
            && d > 1
            && a * b == level
            && gcd(a, b) == 1
            && (1..=d).contains(&self.coset_a)
            && (1..=d).contains(&self.coset_b)
            && widths_at(self.coset_a) == self.widths_a
            && widths_at(self.coset_b) == self.widths_b
            && a % lcm(self.widths_a.0, self.widths_a.1) == 0
            && b % lcm(self.widths_b.0, self.widths_b.1) == 0
    }
}

/// Searches for a certificate: splits by increasing `a` with `a < b`, and
/// for each the first cosets in index order.
pub fn noncongruence_certificate(g: &CosetGraph) -> Result<Option<NonCongruenceCertificate>> {
    let level = wohlfahrt_level(g)?;
    if g.family != Family::DoubleNGon || g.degree() == 1 {
        return Ok(None);
    }
    let w = g.t_widths();
    let widths = |c: usize| (w[c], w[g.perm_rot[c]]);
    let first = |m: u64| (0..g.degree()).find(|&c| m.is_multiple_of(lcm(widths(c).0, widths(c).1)));
    for a in 2..level {
        let b = level / a;
        if a >= b {
            break;
        }
        if level % a != 0 || gcd(a, b) != 1 {
            continue;
        }
        if let (Some(ca), Some(cb)) = (first(a), first(b)) {
            return Ok(Some(NonCongruenceCertificate {
                split: (a, b),
                coset_a: ca + 1,
                coset_b: cb + 1,
                widths_a: widths(ca),
                widths_b: widths(cb),
            }));
        }
    }
    Ok(None)
}

/// One candidate level in [`minimal_congruence_levels`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelTest {
    pub level: u64,
    pub congruence: bool,
    /// Decided without a search, as a multiple of an earlier success.
    pub implied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalLevelsReport {
    pub wohlfahrt_level: u64,
    pub tested: Vec<LevelTest>,
    pub minimal_levels: Vec<u64>,
    pub certificate: Option<NonCongruenceCertificate>,
}

fn primes_divide(b: u64, level: u64) -> bool {
    let mut rest = b;
    let mut p = 2;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            if !level.is_multiple_of(p) {
                return false;
            }
            while rest.is_multiple_of(p) {
                rest /= p;
            }
        }
        p += 1;
    }
    rest == 1 || level.is_multiple_of(rest)
}

/// Tests candidate levels `b <= bound` that are multiples of the Wohlfahrt
/// level `l` and have no prime divisor outside `l`. A congruence group of
/// level `b` is also one of every multiple of `b`, so such multiples are
/// recorded as implied.
pub fn minimal_congruence_levels(
    rep: &HomologyRep,
    g: &CosetGraph,
    bound: u64,
    cap: usize,
) -> Result<MinimalLevelsReport> {
    let level = wohlfahrt_level(g)?;
    let mut tested = Vec::new();
    let mut minimal: Vec<u64> = Vec::new();
    let mut b = level;
    while b <= bound {
        if primes_divide(b, level) {
            if minimal.iter().any(|m| b % m == 0) {
                tested.push(LevelTest {
                    level: b,
                    congruence: true,
                    implied: true,
                });
            } else {
                let modulus = u32::try_from(b)
                    .map_err(|_| Error::UnsupportedParameter(format!("level {b}")))?;
                let ok = is_congruence_of_level(rep, g, modulus, cap)?.is_congruence;
                tested.push(LevelTest {
                    level: b,
                    congruence: ok,
                    implied: false,
                });
                if ok {
                    minimal.push(b);
                }
            }
        }
        b += level;
    }
    Ok(MinimalLevelsReport {
        wohlfahrt_level: level,
        tested,
        minimal_levels: minimal,
        certificate: noncongruence_certificate(g)?,
    })
}

/// Relabels cosets in breadth-first order from the base, trying `T`, `T^-1`,
/// rotation, rotation inverse at each coset. The base becomes coset 1.
pub fn canonical_form(g: &CosetGraph) -> Result<CosetGraph> {
    ensure_valid(g)?;
    let t_inv = CosetGraph::inverse_perm(&g.perm_t);
    let r_inv = CosetGraph::inverse_perm(&g.perm_rot);
    let d = g.degree();
    let mut label = vec![usize::MAX; d];
    let mut order = vec![g.base];
    label[g.base] = 0;
    let mut head = 0;
    while head < order.len() {
        let c = order[head];
        for p in [&g.perm_t, &t_inv, &g.perm_rot, &r_inv] {
            let x = p[c];
            if label[x] == usize::MAX {
                label[x] = order.len();
                order.push(x);
            }
        }
        head += 1;
    }
    let relabel = |p: &[usize]| order.iter().map(|&c| label[p[c]]).collect::<Vec<_>>();
    CosetGraph::new(g.family, g.n, relabel(&g.perm_t), relabel(&g.perm_rot), 0)
}
