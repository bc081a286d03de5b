//! Sieves, multiplicative functions, Dirichlet characters and Gauss sums.

pub mod character;
pub mod cmath;
pub mod multfn;
pub mod sieve;

pub use character::{
    c_chi, characters_mod, characters_mod_with_cap, check_fundamental_discriminant,
    fundamental_discriminants, gauss_sum, kronecker_character, kronecker_symbol,
    primitive_characters, CChiMethod, CharacterLabel, ClosedCChi, DirichletCharacter,
    DEFAULT_CHARACTER_MODULUS_CAP,
};
pub use cmath::{e, e_frac, n_it};
pub use multfn::{MultFnSpec, StandardKind};
pub use sieve::{euler_phi, gcd, moebius, FactorSieve, DEFAULT_SIEVE_BUDGET};

/// Archimedean character n ↦ n^{it}; has modulus one for every n ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ArchimedeanTwist {
    pub t: f64,
}

impl ArchimedeanTwist {
    pub fn new(t: f64) -> Self {
        ArchimedeanTwist { t }
    }

    pub fn at(&self, n: u64) -> num_complex::Complex64 {
        n_it(n, self.t)
    }
}
