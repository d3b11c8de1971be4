//! Words over the Veech group generators `T`, `R` (double n-gon) and
//! `T`, `S = R^2` (regular 2n-gon), and the defining relators.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Surface family. Both families require odd `n >= 5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Two regular n-gons glued along parallel edges (`X_n`).
    #[serde(rename = "double-ngon")]
    DoubleNGon,
    /// One regular 2n-gon with opposite edges glued (`X_{2n}`).
    #[serde(rename = "regular-2ngon")]
    Regular2NGon,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::DoubleNGon => "double-ngon",
            Family::Regular2NGon => "regular-2ngon",
        }
    }

    /// The non-parabolic generator: `R` for the double n-gon, `S` otherwise.
    pub fn rotation(self) -> Gen {
        match self {
            Family::DoubleNGon => Gen::R,
            Family::Regular2NGon => Gen::S,
        }
    }

    pub fn generators(self) -> [Gen; 2] {
        [Gen::T, self.rotation()]
    }

    /// Defining relators of the Veech group, as words equal to the identity.
    pub fn relators(self, n: usize) -> Vec<VeechWord> {
        let n = n as i64;
        let p = |g: Gen, e: i64| VeechWord::power(g, e);
        match self {
            Family::DoubleNGon => vec![
                p(Gen::R, 2 * n),
                // (T^-1 R)^2 R^-n
                p(Gen::T, -1)
                    .concat(&p(Gen::R, 1))
                    .pow(2)
                    .concat(&p(Gen::R, -n)),
                // R^n T R^-n T^-1
                p(Gen::R, n)
                    .concat(&p(Gen::T, 1))
                    .concat(&p(Gen::R, -n))
                    .concat(&p(Gen::T, -1)),
            ],
            Family::Regular2NGon => vec![
                p(Gen::S, 2 * n),
                p(Gen::S, n)
                    .concat(&p(Gen::T, 1))
                    .concat(&p(Gen::S, -n))
                    .concat(&p(Gen::T, -1)),
            ],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double-ngon" => Ok(Family::DoubleNGon),
            "regular-2ngon" => Ok(Family::Regular2NGon),
            other => Err(Error::parse(1, format!("unknown family {other:?}"))),
        }
    }
}

/// A Veech group generator symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    T,
    R,
    /// `R^2`, used for the regular 2n-gon.
    S,
}

impl Gen {
    fn symbol(self) -> char {
        match self {
            Gen::T => 'T',
            Gen::R => 'R',
            Gen::S => 'S',
        }
    }
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenLetter {
    pub gen: Gen,
    pub inverse: bool,
}

impl GenLetter {
    pub fn inv(self) -> Self {
        GenLetter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }
}

/// A freely reduced word in the Veech group generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VeechWord {
    letters: Vec<GenLetter>,
}

impl VeechWord {
    pub fn identity() -> Self {
        VeechWord::default()
    }

    pub fn from_letters<I: IntoIterator<Item = GenLetter>>(letters: I) -> Self {
        let mut out: Vec<GenLetter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        VeechWord { letters: out }
    }

    pub fn power(gen: Gen, e: i64) -> Self {
        let l = GenLetter {
            gen,
            inverse: e < 0,
        };
        VeechWord {
            letters: vec![l; e.unsigned_abs() as usize],
        }
    }

    pub fn letters(&self) -> &[GenLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &VeechWord) -> VeechWord {
        VeechWord::from_letters(self.letters.iter().chain(&other.letters).copied())
    }

    pub fn inverse(&self) -> VeechWord {
        VeechWord {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> VeechWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = VeechWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Checks that only the family's two generators occur.
    pub fn check_family(&self, family: Family) -> Result<()> {
        let allowed = family.generators();
        match self.letters.iter().find(|l| !allowed.contains(&l.gen)) {
            Some(l) => Err(Error::UnknownSymbol(l.gen.symbol().to_string())),
            None => Ok(()),
        }
    }
}

impl FromStr for VeechWord {
    type Err = Error;

    /// Accepts strings such as `R^-2T^-2RTR^2`; whitespace is ignored and
    /// `1` or the empty string denote the identity.
    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars == ['1'] {
            return Ok(VeechWord::identity());
        }
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let gen = match chars[i] {
                'T' => Gen::T,
                'R' => Gen::R,
                'S' => Gen::S,
                c => return Err(Error::UnknownSymbol(c.to_string())),
            };
            i += 1;
            let mut exp = 1i64;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && chars[i] == '-' {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                exp = text
                    .parse()
                    .map_err(|_| Error::parse(1, format!("bad exponent in {s:?}")))?;
            }
            letters.extend(VeechWord::power(gen, exp).letters);
        }
        Ok(VeechWord::from_letters(letters))
    }
}

impl fmt::Display for VeechWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i64;
            let e = if l.inverse { -run } else { run };
            if e == 1 {
                write!(f, "{}", l.gen.symbol())?;
            } else {
                write!(f, "{}^{}", l.gen.symbol(), e)?;
            }
            i = j;
        }
        Ok(())
    }
}

/// Parses a comma-separated list of words, e.g. `T,R^-1TR^-1`.
pub fn parse_word_list(s: &str) -> Result<Vec<VeechWord>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}
