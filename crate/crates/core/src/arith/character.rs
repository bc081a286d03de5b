//! Dirichlet characters, Gauss sums and the twisted Ramanujan sums c_χ.
//!
//! Characters mod q are built from the structure of the unit group: by CRT it
//! splits over the prime powers p^k ‖ q; each odd component is cyclic on a
//! primitive root, and (Z/2^k)^× is generated by −1 and 5. A character is an
//! exponent tuple `(j_1, ..., j_r)` over these generators, and its value at a
//! unit x with discrete logs `(e_1, ..., e_r)` is e(Σ j_i e_i / o_i).
//! Values are stored as integer phases mod the group exponent L so that
//! order and conductor come out exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cmath::e_frac;
use super::sieve::{euler_phi, factor_small, gcd, is_squarefree, moebius};
use crate::error::{Error, Result};

/// Default cap on the modulus accepted by [`characters_mod`].
pub const DEFAULT_CHARACTER_MODULUS_CAP: u64 = 10_000;

const NON_UNIT: u32 = u32::MAX;

/// How a character was produced; used for reporting and deterministic tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CharacterLabel {
    /// Entry `index` of [`characters_mod`]`(modulus)`.
    Indexed { modulus: u64, index: u64 },
    /// The Kronecker symbol (d/·) for a fundamental discriminant d.
    Kronecker { d: i64 },
    /// A character built from a value table (e.g. the primitive character inducing another one).
    Table { modulus: u64 },
}

impl std::fmt::Display for CharacterLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CharacterLabel::Indexed { modulus, index } => write!(f, "char:{modulus}:{index}"),
            CharacterLabel::Kronecker { d } => write!(f, "kronecker:{d}"),
            CharacterLabel::Table { modulus } => write!(f, "table:{modulus}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    exponent: u64,
    phases: Vec<u32>,
    values: Vec<Complex64>,
    conductor: u64,
    order: u64,
    label: CharacterLabel,
}

impl DirichletCharacter {
    /// Builds a character from phases mod `exponent`; `None` marks residues sharing a factor with q.
    /// The conductor is found by testing every divisor of the modulus.
    pub fn from_phases(
        modulus: u64,
        exponent: u64,
        phases: Vec<Option<u64>>,
        label: CharacterLabel,
    ) -> Result<Self> {
        if phases.len() as u64 != modulus || modulus == 0 || exponent == 0 {
            return Err(Error::domain("phase table length must equal the modulus"));
        }
        let phases: Vec<u32> = phases
            .into_iter()
            .map(|p| p.map_or(NON_UNIT, |v| (v % exponent) as u32))
            .collect();
        let mut chi = Self::assemble(modulus, exponent, phases, 1, label);
        chi.conductor = chi.conductor_by_search();
        Ok(chi)
    }

    fn assemble(
        modulus: u64,
        exponent: u64,
        phases: Vec<u32>,
        conductor: u64,
        label: CharacterLabel,
    ) -> Self {
        let values = phases
            .iter()
            .map(|&ph| {
                if ph == NON_UNIT {
                    Complex64::new(0.0, 0.0)
                } else {
                    e_frac(ph as i64, exponent)
                }
            })
            .collect();
        let g = phases
            .iter()
            .filter(|&&ph| ph != NON_UNIT)
            .fold(exponent, |acc, &ph| gcd(acc, ph as u64));
        DirichletCharacter {
            modulus,
            exponent,
            order: exponent / g,
            phases,
            values,
            conductor,
            label,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn label(&self) -> CharacterLabel {
        self.label
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    /// Real and non-principal.
    pub fn is_quadratic(&self) -> bool {
        self.order == 2
    }

    /// χ(−1) = +1.
    pub fn is_even(&self) -> bool {
        self.modulus <= 2 || self.value(self.modulus - 1).re > 0.0
    }

    /// χ(n).
    pub fn value(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    /// Table of χ(x) for x = 0..q−1.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Phase of χ(n) as a fraction numerator over [`Self::exponent`], `None` off the unit group.
    pub fn phase(&self, n: u64) -> Option<u64> {
        let ph = self.phases[(n % self.modulus) as usize];
        (ph != NON_UNIT).then_some(ph as u64)
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Σ_{x mod q} χ(x)·conj(χ'(x)) for characters of the same modulus.
    pub fn inner_product(&self, other: &DirichletCharacter) -> Result<Complex64> {
        if self.modulus != other.modulus {
            return Err(Error::domain("inner product needs equal moduli"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    /// Smallest divisor d of q such that χ is trivial on units ≡ 1 mod d.
    fn conductor_by_search(&self) -> u64 {
        let q = self.modulus;
        let mut divisors: Vec<u64> = (1..=q).filter(|d| q.is_multiple_of(*d)).collect();
        divisors.sort_unstable();
        for d in divisors {
            let trivial = (0..q / d).all(|k| {
                let x = 1 + k * d;
                let ph = self.phases[(x % q) as usize];
                ph == NON_UNIT || ph == 0
            });
            if trivial {
                return d;
            }
        }
        q
    }

    /// Brute-force conductor, independent of the exponent-tuple formula.
    pub fn conductor_brute_force(&self) -> u64 {
        self.conductor_by_search()
    }

    /// The primitive character ψ mod q₀ (q₀ the conductor) that induces χ.
    pub fn primitive(&self) -> DirichletCharacter {
        if self.is_primitive() {
            return self.clone();
        }
        let q = self.modulus;
        let q0 = self.conductor;
        let phases = (0..q0)
            .map(|x| {
                if gcd(x, q0) != 1 {
                    return NON_UNIT;
                }
                // lift x to a unit mod q in the same class mod q0
                let y = (0..q / q0)
                    .map(|k| x + k * q0)
                    .find(|&y| gcd(y, q) == 1)
                    .expect("a unit lift always exists");
                self.phases[y as usize]
            })
            .collect();
        let mut psi = Self::assemble(q0, self.exponent, phases, q0, CharacterLabel::Table { modulus: q0 });
        if q0 == 1 {
            psi.phases = vec![0];
            psi.values = vec![Complex64::new(1.0, 0.0)];
        }
        psi
    }

    /// The character mod `modulus` (a multiple of q) induced by χ.
    pub fn induce(&self, modulus: u64) -> Result<DirichletCharacter> {
        if !modulus.is_multiple_of(self.modulus) {
            return Err(Error::domain(format!(
                "{modulus} is not a multiple of the modulus {}",
                self.modulus
            )));
        }
        let phases = (0..modulus)
            .map(|x| if gcd(x, modulus) == 1 { self.phases[(x % self.modulus) as usize] } else { NON_UNIT })
            .collect();
        Ok(Self::assemble(
            modulus,
            self.exponent,
            phases,
            self.conductor,
            CharacterLabel::Table { modulus },
        ))
    }
}

/// One cyclic factor of the unit group mod q.
struct Generator {
    order: u64,
    /// Component prime and exponent: the factor lives in (Z/p^k)^×.
    p: u64,
    k: u32,
    /// Which generator within the 2-component (0 for −1, 1 for 5); 0 for odd primes.
    slot: u8,
    /// Discrete log of each residue mod p^k (NON_UNIT off the unit group).
    dlog: Vec<u32>,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn primitive_root_prime_power(p: u64, k: u32) -> u64 {
    let pm1 = p - 1;
    let qs: Vec<u64> = factor_small(pm1).into_iter().map(|(r, _)| r).collect();
    let g = (2..p.max(3))
        .find(|&g| qs.iter().all(|&r| pow_mod(g, pm1 / r, p) != 1))
        .unwrap_or(1);
    let g = if p == 2 { 1 } else { g };
    if k >= 2 && pow_mod(g, pm1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

fn generators(q: u64) -> Vec<Generator> {
    let mut gens = Vec::new();
    for (p, k) in factor_small(q) {
        let pk = p.pow(k);
        if p == 2 {
            if k == 1 {
                continue;
            }
            let mut minus = vec![NON_UNIT; pk as usize];
            let mut five = vec![NON_UNIT; pk as usize];
            let ord5 = if k >= 3 { 1u64 << (k - 2) } else { 1 };
            let mut y = 1u64;
            for b in 0..ord5 {
                minus[y as usize] = 0;
                five[y as usize] = b as u32;
                minus[(pk - y) as usize] = 1;
                five[(pk - y) as usize] = b as u32;
                y = y * 5 % pk;
            }
            gens.push(Generator { order: 2, p, k, slot: 0, dlog: minus });
            if k >= 3 {
                gens.push(Generator { order: ord5, p, k, slot: 1, dlog: five });
            }
        } else {
            let order = pk / p * (p - 1);
            let g = primitive_root_prime_power(p, k);
            let mut dlog = vec![NON_UNIT; pk as usize];
            let mut y = 1u64;
            for e in 0..order {
                dlog[y as usize] = e as u32;
                y = y * g % pk;
            }
            gens.push(Generator { order, p, k, slot: 0, dlog });
        }
    }
    gens
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Conductor of the component character with exponents `js` on the generators of one prime power.
fn component_conductor(p: u64, k: u32, js: &[(u8, u64, u64)]) -> u64 {
    // js entries: (slot, exponent j, generator order)
    if js.iter().all(|&(_, j, _)| j == 0) {
        return 1;
    }
    if p != 2 {
        let (_, j, _) = js[0];
        // smallest c >= 1 with p^(k-c) | j
        let c = (1..=k).find(|&c| j % p.pow(k - c) == 0).unwrap_or(k);
        return p.pow(c);
    }
    let a = js.iter().find(|e| e.0 == 0).map_or(0, |e| e.1);
    let b = js.iter().find(|e| e.0 == 1).map_or(0, |e| e.1);
    if b == 0 {
        return if a == 0 { 1 } else { 4 };
    }
    let c = (3..=k).find(|&c| b % (1u64 << (k - c)) == 0).unwrap_or(k);
    1u64 << c
}

/// All φ(q) Dirichlet characters mod q; index 0 is the principal character.
pub fn characters_mod(q: u64) -> Result<Vec<DirichletCharacter>> {
    characters_mod_with_cap(q, DEFAULT_CHARACTER_MODULUS_CAP)
}

pub fn characters_mod_with_cap(q: u64, cap: u64) -> Result<Vec<DirichletCharacter>> {
    if q == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    if q > cap {
        return Err(Error::Resource { what: "character modulus", requested: q, limit: cap });
    }
    let gens = generators(q);
    let exponent = gens.iter().fold(1, |acc, g| lcm(acc, g.order));
    // discrete-log vectors of every residue, scaled to phases mod exponent
    let logs: Vec<Option<Vec<u64>>> = (0..q)
        .map(|x| {
            if gcd(x, q) != 1 {
                return None;
            }
            Some(
                gens.iter()
                    .map(|g| g.dlog[(x % g.p.pow(g.k)) as usize] as u64 * (exponent / g.order))
                    .collect(),
            )
        })
        .collect();
    let count: u64 = gens.iter().map(|g| g.order).product();
    let mut out = Vec::with_capacity(count as usize);
    for index in 0..count {
        let mut rem = index;
        let js: Vec<u64> = gens
            .iter()
            .map(|g| {
                let j = rem % g.order;
                rem /= g.order;
                j
            })
            .collect();
        let phases: Vec<u32> = logs
            .iter()
            .map(|l| match l {
                None => NON_UNIT,
                Some(v) => {
                    let s = v.iter().zip(&js).fold(0u128, |acc, (&e, &j)| acc + e as u128 * j as u128);
                    (s % exponent as u128) as u32
                }
            })
            .collect();
        let mut conductor = 1;
        for (p, k) in factor_small(q) {
            let comp: Vec<(u8, u64, u64)> = gens
                .iter()
                .zip(&js)
                .filter(|(g, _)| g.p == p)
                .map(|(g, &j)| (g.slot, j, g.order))
                .collect();
            conductor *= component_conductor(p, k, &comp);
        }
        let label = CharacterLabel::Indexed { modulus: q, index };
        out.push(DirichletCharacter::assemble(q, exponent, phases, conductor, label));
    }
    if q == 1 {
        out[0].phases = vec![0];
        out[0].values = vec![Complex64::new(1.0, 0.0)];
    }
    Ok(out)
}

/// Primitive characters of conductor exactly q.
pub fn primitive_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    Ok(characters_mod(q)?.into_iter().filter(|c| c.is_primitive()).collect())
}

/// Kronecker symbol (d/n) for n ≥ 1.
pub fn kronecker_symbol(d: i64, n: u64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut n = n;
    let mut result = 1i32;
    let mut twos = 0;
    while n.is_multiple_of(2) {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if (r == 3 || r == 5) && twos % 2 == 1 {
            result = -result;
        }
    }
    // Jacobi symbol (d/n) for odd n
    let mut a = d.rem_euclid(n as i64) as u64;
    let mut m = n;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            let r = m % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// Checks that d is a fundamental discriminant, naming the failing condition otherwise.
pub fn check_fundamental_discriminant(d: i64) -> Result<()> {
    if d == 0 {
        return Err(Error::domain("0 is not a fundamental discriminant"));
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        if !is_squarefree(d.unsigned_abs()) {
            return Err(Error::domain(format!(
                "{d} ≡ 1 mod 4 but is not squarefree, so it is not a fundamental discriminant"
            )));
        }
        return Ok(());
    }
    if r == 0 {
        let m = d / 4;
        let mr = m.rem_euclid(4);
        if mr != 2 && mr != 3 {
            return Err(Error::domain(format!(
                "{d} = 4·{m} with {m} ≡ {mr} mod 4 (need 2 or 3), so it is not a fundamental discriminant"
            )));
        }
        if !is_squarefree(m.unsigned_abs()) {
            return Err(Error::domain(format!(
                "{d} = 4·{m} with {m} not squarefree, so it is not a fundamental discriminant"
            )));
        }
        return Ok(());
    }
    let hint = if (-d).rem_euclid(4) == 1 && is_squarefree(d.unsigned_abs()) {
        format!(" ({} is)", -d)
    } else {
        String::new()
    };
    Err(Error::domain(format!(
        "{d} ≡ {r} mod 4 is not a fundamental discriminant{hint}"
    )))
}

/// Every fundamental discriminant d with |d| ≤ bound, ordered by (|d|, d). Includes d = 1.
pub fn fundamental_discriminants(bound: u64) -> Vec<i64> {
    let mut out = Vec::new();
    for a in 1..=bound as i64 {
        for d in [-a, a] {
            if check_fundamental_discriminant(d).is_ok() {
                out.push(d);
            }
        }
    }
    out
}

/// The real primitive character (d/·) of conductor |d|.
pub fn kronecker_character(d: i64) -> Result<DirichletCharacter> {
    check_fundamental_discriminant(d)?;
    let q = d.unsigned_abs();
    let phases = (0..q)
        .map(|x| {
            let n = if x == 0 { q } else { x };
            match kronecker_symbol(d, n) {
                0 => None,
                1 => Some(0),
                _ => Some(1),
            }
        })
        .collect::<Vec<_>>();
    let chi = DirichletCharacter::assemble(
        q,
        2,
        phases.into_iter().map(|p| p.map_or(NON_UNIT, |v| v as u32)).collect(),
        q,
        CharacterLabel::Kronecker { d },
    );
    debug_assert_eq!(chi.conductor_by_search(), q);
    Ok(chi)
}

/// τ(ψ) = Σ_{x mod q} ψ(x) e(x/q) for primitive ψ.
pub fn gauss_sum(psi: &DirichletCharacter) -> Result<Complex64> {
    if !psi.is_primitive() {
        return Err(Error::domain(format!(
            "Gauss sum needs a primitive character; {} has conductor {} < modulus {}",
            psi.label(),
            psi.conductor(),
            psi.modulus()
        )));
    }
    let q = psi.modulus();
    Ok((0..q)
        .filter(|&x| psi.phase(x).is_some())
        .map(|x| psi.value(x) * e_frac(x as i64, q))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CChiMethod {
    Direct,
    Closed,
}

/// c_χ(n) = Σ_{x mod q, (x,q)=1} χ(x) e(nx/q), by direct summation or the closed formula.
pub fn c_chi(chi: &DirichletCharacter, n: u64, method: CChiMethod) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::domain("c_chi needs n >= 1"));
    }
    match method {
        CChiMethod::Direct => Ok(c_chi_direct(chi, n)),
        CChiMethod::Closed => Ok(ClosedCChi::new(chi).eval(n)),
    }
}

fn c_chi_direct(chi: &DirichletCharacter, n: u64) -> Complex64 {
    let q = chi.modulus();
    let nq = n % q;
    (0..q)
        .filter(|&x| chi.phase(x).is_some())
        .map(|x| chi.value(x) * e_frac(((nq * x) % q) as i64, q))
        .sum()
}

/// Closed-form evaluator for c_χ with the inducing primitive character and its Gauss sum resolved once.
///
/// With r the modulus of χ, ψ mod q the primitive character inducing it, and r' = r/(r,n):
/// c_χ(n) = ψ̄(n/(r,n)) · φ(r)/φ(r') · μ(r'/q) · ψ(r'/q) · τ(ψ) when q | r', and 0 otherwise.
#[derive(Debug, Clone)]
pub struct ClosedCChi {
    r: u64,
    phi_r: u64,
    psi: DirichletCharacter,
    tau: Complex64,
}

impl ClosedCChi {
    pub fn new(chi: &DirichletCharacter) -> Self {
        let psi = chi.primitive();
        let tau = gauss_sum(&psi).expect("primitive by construction");
        ClosedCChi { r: chi.modulus(), phi_r: euler_phi(chi.modulus()), psi, tau }
    }

    pub fn eval(&self, n: u64) -> Complex64 {
        let q = self.psi.modulus();
        let g = gcd(self.r, n);
        let r1 = self.r / g;
        if !r1.is_multiple_of(q) {
            return Complex64::new(0.0, 0.0);
        }
        let m = r1 / q;
        let mu = moebius(m);
        if mu == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let ratio = self.phi_r as f64 / euler_phi(r1) as f64;
        self.psi.value(n / g).conj() * self.psi.value(m) * self.tau * (ratio * mu as f64)
    }

    pub fn primitive(&self) -> &DirichletCharacter {
        &self.psi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn mod_4_and_5() {
        let c4 = characters_mod(4).unwrap();
        assert_eq!(c4.len(), 2);
        assert!(c4[0].is_principal());
        assert_eq!(c4[1].value(3), Complex64::new(-1.0, 0.0));
        assert!(c4[1].is_quadratic() && c4[1].is_primitive());

        let c5 = characters_mod(5).unwrap();
        assert_eq!(c5.len(), 4);
        let quad: Vec<_> = c5.iter().filter(|c| c.is_quadratic()).collect();
        assert_eq!(quad.len(), 1);
        assert_eq!(quad[0].value(2), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn trivial_modulus() {
        let c1 = characters_mod(1).unwrap();
        assert_eq!(c1.len(), 1);
        for n in 0..10 {
            assert_eq!(c1[0].value(n), Complex64::new(1.0, 0.0));
        }
        assert!(c1[0].is_primitive());
    }

    #[test]
    fn count_is_phi_and_orthogonality() {
        for q in 1..=100u64 {
            let chars = characters_mod(q).unwrap();
            assert_eq!(chars.len() as u64, euler_phi(q), "q = {q}");
            for i in 0..chars.len() {
                for j in 0..chars.len() {
                    let ip = chars[i].inner_product(&chars[j]).unwrap();
                    if i == j {
                        assert!((ip.re - euler_phi(q) as f64).abs() < 1e-9);
                    } else {
                        assert!(ip.norm() < 1e-9, "q={q} i={i} j={j} -> {ip}");
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicativity_and_zero_pattern() {
        for q in [1u64, 8, 9, 12, 16, 45, 60, 64, 97] {
            for chi in characters_mod(q).unwrap() {
                for m in 0..q {
                    assert_eq!(chi.value(m).norm() == 0.0, gcd(m, q) != 1);
                    for n in 0..q {
                        assert!(approx(chi.value(m * n), chi.value(m) * chi.value(n), 1e-12));
                    }
                }
                if chi.modulus() > 1 {
                    let o = chi.order() as f64;
                    for x in (0..q).filter(|&x| gcd(x, q) == 1) {
                        let v = chi.value(x);
                        let p = v.powf(o);
                        assert!(approx(Complex64::new(p.re, p.im), Complex64::new(1.0, 0.0), 1e-9));
                    }
                }
            }
        }
    }

    #[test]
    fn conductor_formula_matches_search() {
        for q in 1..=120u64 {
            for chi in characters_mod(q).unwrap() {
                assert_eq!(chi.conductor(), chi.conductor_brute_force(), "{}", chi.label());
            }
        }
        // number of primitive characters mod 8 is 2, mod 4 is 1, mod 2 is 0
        assert_eq!(primitive_characters(8).unwrap().len(), 2);
        assert_eq!(primitive_characters(4).unwrap().len(), 1);
        assert_eq!(primitive_characters(2).unwrap().len(), 0);
    }

    #[test]
    fn quadratic_flag() {
        for q in 1..=60u64 {
            for chi in characters_mod(q).unwrap() {
                let real = chi.values().iter().all(|v| v.im.abs() < 1e-12);
                assert_eq!(chi.is_quadratic(), real && !chi.is_principal());
            }
        }
    }

    #[test]
    fn modulus_cap() {
        assert!(matches!(
            characters_mod_with_cap(101, 100),
            Err(Error::Resource { requested: 101, .. })
        ));
    }

    #[test]
    fn kronecker_examples() {
        let m4 = kronecker_character(-4).unwrap();
        assert_eq!((m4.modulus(), m4.value(3).re), (4, -1.0));
        let k5 = kronecker_character(5).unwrap();
        assert_eq!(k5.value(2).re, -1.0);
        assert_eq!(k5.value(4).re, 1.0);
        let k12 = kronecker_character(12).unwrap();
        assert_eq!(k12.value(5).re, -1.0);
        assert_eq!(k12.value(7).re, -1.0);
        assert_eq!(k12.value(11).re, 1.0);
        assert!(k12.is_even());
        assert!(k12.is_primitive());
        assert!(kronecker_character(1).unwrap().is_principal());
    }

    // Independent route for d = 12: the unique primitive real character mod 12 is the
    // product of the non-principal characters mod 3 and mod 4 (conductor 12);
    // its values come from quadratic residues mod 3 and the sign of x mod 4.
    #[test]
    fn kronecker_12_against_residue_computation() {
        let k12 = kronecker_character(12).unwrap();
        for x in 0..12u64 {
            let expected = if gcd(x, 12) != 1 {
                0.0
            } else {
                let mod3 = if (1..3).any(|y| (y * y) % 3 == x % 3) { 1.0 } else { -1.0 };
                let mod4 = if x % 4 == 1 { 1.0 } else { -1.0 };
                mod3 * mod4
            };
            assert_eq!(k12.value(x).re, expected, "x = {x}");
        }
    }

    #[test]
    fn non_fundamental_rejected() {
        let err = kronecker_character(7).unwrap_err().to_string();
        assert!(err.contains("≡ 3 mod 4") && err.contains("-7"), "{err}");
        assert!(kronecker_character(-7).is_ok());
        assert!(kronecker_character(9).is_err()); // 1 mod 4, not squarefree
        assert!(kronecker_character(16).is_err()); // 4·4, 4 ≡ 0 mod 4
        assert!(kronecker_character(0).is_err());
        assert_eq!(
            fundamental_discriminants(12),
            vec![1, -3, -4, 5, -7, -8, 8, -11, 12]
        );
    }

    #[test]
    fn kronecker_agrees_with_some_table_character() {
        for d in fundamental_discriminants(60) {
            let k = kronecker_character(d).unwrap();
            let q = k.modulus();
            let found = characters_mod(q).unwrap().into_iter().any(|c| {
                c.is_primitive() && (0..q).all(|x| approx(c.value(x), k.value(x), 1e-12))
            });
            assert!(found, "d = {d}");
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let t5 = gauss_sum(&kronecker_character(5).unwrap()).unwrap();
        assert!(approx(t5, Complex64::new(5f64.sqrt(), 0.0), 1e-12));
        let t4 = gauss_sum(&kronecker_character(-4).unwrap()).unwrap();
        assert!(approx(t4, Complex64::new(0.0, 2.0), 1e-12));
        let principal3 = &characters_mod(3).unwrap()[0];
        assert!(gauss_sum(principal3).is_err());
    }

    #[test]
    fn c_chi_examples() {
        let c3 = characters_mod(3).unwrap();
        for method in [CChiMethod::Direct, CChiMethod::Closed] {
            assert!(approx(c_chi(&c3[0], 3, method).unwrap(), Complex64::new(2.0, 0.0), 1e-12));
            assert!(approx(c_chi(&c3[0], 1, method).unwrap(), Complex64::new(-1.0, 0.0), 1e-12));
            assert!(approx(
                c_chi(&c3[1], 1, method).unwrap(),
                Complex64::new(0.0, 3f64.sqrt()),
                1e-12
            ));
        }
    }

    #[test]
    fn closed_matches_direct_small() {
        for q in 1..=60u64 {
            for chi in characters_mod(q).unwrap() {
                let closed = ClosedCChi::new(&chi);
                for n in 1..=3 * q {
                    let d = c_chi_direct(&chi, n);
                    let c = closed.eval(n);
                    assert!(approx(d, c, 1e-9 * (1.0 + d.norm())), "q={q} {} n={n}: {d} vs {c}", chi.label());
                }
            }
        }
    }

    #[test]
    fn induce_restrict_roundtrip() {
        for q in 1..=80u64 {
            for chi in characters_mod(q).unwrap() {
                let psi = chi.primitive();
                assert!(psi.is_primitive());
                assert_eq!(psi.modulus(), chi.conductor());
                let back = psi.induce(q).unwrap();
                for x in 0..q {
                    assert!(approx(back.value(x), chi.value(x), 1e-12));
                }
            }
        }
    }
}
