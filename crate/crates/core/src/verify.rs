//! A batch of known results, re-derived from scratch. Used by `vcl verify`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::HomologyRep;
use crate::matgroup::{image_group, normal_closure, reduction_kernel_order};
use crate::matrix::gcd;
use crate::presentation::{parse_word_list, Family, VeechWord};
use crate::star::{closed_form_z, star_decide};
use crate::surfaces::build;
use crate::wohlfahrt::{
    canonical_form, minimal_congruence_levels, noncongruence_certificate, todd_coxeter,
    validate_coset_graph, wohlfahrt_level, CosetGraph, TEN_COSET_EXAMPLE, TEN_COSET_GENERATORS,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    All,
    Star,
    Congruence,
    Wohlfahrt,
}

impl Scope {
    fn includes(self, other: Scope) -> bool {
        self == Scope::All || self == other
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::All => "all",
            Scope::Star => "star",
            Scope::Congruence => "congruence",
            Scope::Wohlfahrt => "wohlfahrt",
        })
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Scope::All),
            "star" => Ok(Scope::Star),
            "congruence" => Ok(Scope::Congruence),
            "wohlfahrt" => Ok(Scope::Wohlfahrt),
            other => Err(Error::parse(1, format!("unknown scope {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub scope: Scope,
    pub passed: bool,
    pub checks: Vec<VerifyCheck>,
}

struct Checks(Vec<VerifyCheck>);

impl Checks {
    fn eq<T: fmt::Debug + PartialEq>(&mut self, name: &str, expected: T, actual: T) {
        self.0.push(VerifyCheck {
            name: name.to_string(),
            passed: expected == actual,
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
        });
    }
}

fn with_name<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::InCheck {
        name: name.to_string(),
        source: Box::new(e),
    })
}

fn star_checks(c: &mut Checks) -> Result<()> {
    let name = "star(5,a) iff gcd(a,5)=1 for a in 2..12";
    let mut decided = Vec::new();
    let mut wanted = Vec::new();
    for a in 2..=12u64 {
        decided.push(with_name(name, star_decide(5, a))?.holds);
        wanted.push(gcd(5, a as i64) == 1);
    }
    c.eq(name, wanted, decided);
    let name = "closed_form_z(5,3) = (2,2,1,1)";
    c.eq(name, vec![2, 2, 1, 1], with_name(name, closed_form_z(5, 3))?);
    Ok(())
}

fn congruence_checks(c: &mut Checks, cap: usize) -> Result<()> {
    let rep = HomologyRep::for_surface(&build(Family::DoubleNGon, 5)?, None)?;
    let name = "Q2(X5)=10";
    c.eq(name, 10, with_name(name, image_group(&rep, 2, cap))?.len());
    let name = "nc(T^4)@8 = 32";
    let q8 = with_name(name, image_group(&rep, 8, cap))?;
    let t4 = rep.phibar_word(8, &VeechWord::power(crate::Gen::T, 4))?;
    c.eq(name, 32, with_name(name, normal_closure(&[t4], &q8, cap))?.len());
    let name = "ker(8→4) = 64";
    c.eq(name, 64, with_name(name, reduction_kernel_order(&rep, 8, 4, cap))?);
    Ok(())
}

fn wohlfahrt_checks(c: &mut Checks, cap: usize) -> Result<()> {
    let g = CosetGraph::parse(TEN_COSET_EXAMPLE)?;
    let name = "example graph level = 12, certificate found";
    let level = with_name(name, wohlfahrt_level(&g))?;
    let cert = with_name(name, noncongruence_certificate(&g))?;
    c.eq(
        name,
        (true, 12, true),
        (validate_coset_graph(&g).passed(), level, cert.map(|x| x.verify(&g)).unwrap_or(false)),
    );
    let name = "coset enumeration reproduces the example graph";
    let words = parse_word_list(TEN_COSET_GENERATORS)?;
    let found = with_name(name, todd_coxeter(Family::DoubleNGon, 5, &words, 1000))?;
    c.eq(name, canonical_form(&g)?, canonical_form(&found)?);
    let name = "no congruence level up to 48";
    let rep = HomologyRep::for_surface(&build(Family::DoubleNGon, 5)?, None)?;
    let report = with_name(name, minimal_congruence_levels(&rep, &g, 48, cap))?;
    c.eq(name, Vec::<u64>::new(), report.minimal_levels);
    Ok(())
}

pub fn run_verification_suite(scope: Scope, cap: usize) -> Result<VerifyReport> {
    let mut c = Checks(Vec::new());
    if scope.includes(Scope::Star) {
        star_checks(&mut c)?;
    }
    if scope.includes(Scope::Congruence) {
        congruence_checks(&mut c, cap)?;
    }
    if scope.includes(Scope::Wohlfahrt) {
        wohlfahrt_checks(&mut c, cap)?;
    }
    Ok(VerifyReport {
        scope,
        passed: c.0.iter().all(|x| x.passed),
        checks: c.0,
    })
}
