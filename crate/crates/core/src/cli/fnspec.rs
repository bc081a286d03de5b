//! Function specifications: `atom ('*' atom)*` with atoms
//! `one`, `moebius`, `liouville`, `kronecker:<d>`, `char:<q>:<index>`, `twist:<t>`,
//! `pretend:<d>:<p0>:<seed>` and `randompm:<seed>`.

use std::fmt;

use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::arith::{
    characters_mod, check_fundamental_discriminant, euler_phi, kronecker_character, FactorSieve,
    MultFnSpec, StandardKind, DEFAULT_CHARACTER_MODULUS_CAP,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Atom {
    One,
    Moebius,
    Liouville,
    Kronecker(i64),
    Char { q: u64, index: u64 },
    Twist(f64),
    /// (d/p) for p ≥ p0, seeded ±1 below.
    Pretend { d: i64, p0: u64, seed: u64 },
    /// Seeded ±1 on every prime.
    RandomPm(u64),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::One => write!(f, "one"),
            Atom::Moebius => write!(f, "moebius"),
            Atom::Liouville => write!(f, "liouville"),
            Atom::Kronecker(d) => write!(f, "kronecker:{d}"),
            Atom::Char { q, index } => write!(f, "char:{q}:{index}"),
            Atom::Twist(t) => write!(f, "twist:{t:?}"),
            Atom::Pretend { d, p0, seed } => write!(f, "pretend:{d}:{p0}:{seed}"),
            Atom::RandomPm(seed) => write!(f, "randompm:{seed}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FnSpec {
    pub atoms: Vec<Atom>,
}

impl fmt::Display for FnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for FnSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_fn_spec(s)
    }
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse { offset, message: message.into() }
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.s[self.pos..].starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.s.len()
    }

    /// Consumes a run of characters that may form a field value.
    fn field(&mut self) -> (usize, &'a str) {
        let start = self.pos;
        let rest = &self.s[start..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-' || c == '+' || c == '.' || c == '_'))
            .unwrap_or(rest.len());
        self.pos += len;
        (start, &rest[..len])
    }

    fn expect_colon(&mut self, what: &str) -> Result<()> {
        if self.s[self.pos..].starts_with(':') {
            self.pos += 1;
            Ok(())
        } else {
            Err(err(self.pos, format!("expected ':' before {what}")))
        }
    }

    fn int<T: std::str::FromStr>(&mut self, what: &str) -> Result<(usize, T)> {
        let (start, text) = self.field();
        if text.is_empty() {
            return Err(err(start, format!("expected {what}")));
        }
        text.parse::<T>()
            .map(|v| (start, v))
            .map_err(|_| err(start, format!("invalid {what} '{text}'")))
    }
}

fn check_discriminant(offset: usize, d: i64) -> Result<()> {
    check_fundamental_discriminant(d).map_err(|e| match e {
        Error::Domain(m) => err(offset, m),
        other => other,
    })
}

fn parse_atom(c: &mut Cursor<'_>) -> Result<Atom> {
    let start = c.pos;
    let rest = &c.s[start..];
    let name_len = rest.find(|ch: char| !ch.is_ascii_lowercase()).unwrap_or(rest.len());
    let name = &rest[..name_len];
    c.pos += name_len;
    let atom = match name {
        "one" => Atom::One,
        "moebius" => Atom::Moebius,
        "liouville" => Atom::Liouville,
        "kronecker" => {
            c.expect_colon("the discriminant")?;
            let (off, d) = c.int::<i64>("discriminant")?;
            check_discriminant(off, d)?;
            Atom::Kronecker(d)
        }
        "char" => {
            c.expect_colon("the modulus")?;
            let (qoff, q) = c.int::<u64>("modulus")?;
            if q == 0 || q > DEFAULT_CHARACTER_MODULUS_CAP {
                return Err(err(qoff, format!("modulus {q} must lie in [1, {DEFAULT_CHARACTER_MODULUS_CAP}]")));
            }
            c.expect_colon("the character index")?;
            let (ioff, index) = c.int::<u64>("character index")?;
            let count = euler_phi(q);
            if index >= count {
                return Err(err(ioff, format!("index {index} out of range: there are {count} characters mod {q}")));
            }
            Atom::Char { q, index }
        }
        "twist" => {
            c.expect_colon("the twist height")?;
            let (off, text) = c.field();
            let t: f64 = text.parse().map_err(|_| err(off, format!("invalid real '{text}'")))?;
            if !t.is_finite() {
                return Err(err(off, "twist height must be finite"));
            }
            Atom::Twist(t)
        }
        "pretend" => {
            c.expect_colon("the discriminant")?;
            let (off, d) = c.int::<i64>("discriminant")?;
            check_discriminant(off, d)?;
            c.expect_colon("the threshold prime")?;
            let (_, p0) = c.int::<u64>("threshold")?;
            c.expect_colon("the seed")?;
            let (_, seed) = c.int::<u64>("seed")?;
            Atom::Pretend { d, p0, seed }
        }
        "randompm" => {
            c.expect_colon("the seed")?;
            let (_, seed) = c.int::<u64>("seed")?;
            Atom::RandomPm(seed)
        }
        "" => return Err(err(start, "expected a function atom")),
        other => return Err(err(start, format!("unknown atom '{other}'"))),
    };
    Ok(atom)
}

pub fn parse_fn_spec(s: &str) -> Result<FnSpec> {
    let mut c = Cursor { s, pos: 0 };
    let mut atoms = Vec::new();
    loop {
        c.skip_ws();
        atoms.push(parse_atom(&mut c)?);
        c.skip_ws();
        if c.at_end() {
            break;
        }
        if s[c.pos..].starts_with('*') {
            c.pos += 1;
        } else {
            return Err(err(c.pos, "expected '*' or end of input"));
        }
    }
    Ok(FnSpec { atoms })
}

/// ±1 for each prime in ascending order, from a SplitMix64 stream.
fn random_signs(seed: u64) -> impl FnMut() -> Complex64 {
    let mut rng = SplitMix64::seed_from_u64(seed);
    move || {
        if rng.next_u64() >> 63 == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(-1.0, 0.0) }
    }
}

impl Atom {
    pub fn build(&self, sieve: &FactorSieve, limit: u64) -> Result<MultFnSpec> {
        self.build_with_seed(sieve, limit, 0)
    }

    /// As [`Atom::build`], with `seed_xor` mixed into the seed of random atoms.
    pub fn build_with_seed(&self, sieve: &FactorSieve, limit: u64, seed_xor: u64) -> Result<MultFnSpec> {
        match *self {
            Atom::One => MultFnSpec::standard(StandardKind::One, sieve, limit),
            Atom::Moebius => MultFnSpec::standard(StandardKind::Moebius, sieve, limit),
            Atom::Liouville => MultFnSpec::standard(StandardKind::Liouville, sieve, limit),
            Atom::Kronecker(d) => MultFnSpec::from_character(&kronecker_character(d)?, sieve, limit),
            Atom::Char { q, index } => {
                let chi = characters_mod(q)?.swap_remove(index as usize);
                MultFnSpec::from_character(&chi, sieve, limit)
            }
            Atom::Twist(t) => MultFnSpec::archimedean(t, sieve, limit),
            Atom::Pretend { d, p0, seed } => {
                let chi = kronecker_character(d)?;
                let mut sign = random_signs(seed ^ seed_xor);
                MultFnSpec::completely_multiplicative(sieve, limit, |p| if p < p0 { sign() } else { chi.value(p) })
            }
            Atom::RandomPm(seed) => {
                let mut sign = random_signs(seed ^ seed_xor);
                MultFnSpec::completely_multiplicative(sieve, limit, |_| sign())
            }
        }
    }
}

impl FnSpec {
    /// The product of the atoms on [1, limit].
    pub fn build(&self, sieve: &FactorSieve, limit: u64) -> Result<MultFnSpec> {
        self.build_with_seed(sieve, limit, 0)
    }

    pub fn build_with_seed(&self, sieve: &FactorSieve, limit: u64, seed_xor: u64) -> Result<MultFnSpec> {
        let mut acc = self.atoms[0].build_with_seed(sieve, limit, seed_xor)?;
        for a in &self.atoms[1..] {
            acc = acc.product(&a.build_with_seed(sieve, limit, seed_xor)?)?;
        }
        Ok(acc)
    }
}
