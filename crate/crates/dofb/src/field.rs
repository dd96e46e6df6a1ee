//! Exact arithmetic over a prime field, used as the channel-gain domain.
//!
//! All channel gains and knowledge rows live in GF(p) for a configurable
//! prime `p`. Working over a large prime keeps every rank computation exact
//! while making a random gain draw behave like a generic (continuous) one:
//! by the Schwartz–Zippel bound, a nonzero determinant polynomial of degree
//! `n` vanishes on a random point with probability at most `n / p`.

use std::env;

use rand::Rng;
use thiserror::Error;

/// Default modulus: the Mersenne prime 2^61 − 1.
pub const DEFAULT_PRIME: u64 = (1 << 61) - 1;

/// Smallest accepted modulus, 2^31 − 1. Anything smaller would let the
/// per-trial failure probability of randomized rank checks grow past ~n/2^31.
pub const MIN_PRIME: u64 = (1 << 31) - 1;

/// Environment variable consulted by [`PrimeField::from_env`].
pub const PRIME_ENV_VAR: &str = "DOFB_PRIME";

/// Errors from constructing a [`PrimeField`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    /// The requested modulus is below [`MIN_PRIME`].
    #[error("modulus {0} is smaller than the minimum allowed {MIN_PRIME} (2^31 - 1)")]
    ModulusTooSmall(u64),
    /// The requested modulus is not a prime number.
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    /// The `DOFB_PRIME` environment variable is set but not a valid integer.
    #[error("{PRIME_ENV_VAR} is not a valid unsigned integer: {0:?}")]
    BadEnvValue(String),
}

/// Arithmetic context for GF(p).
///
/// The struct is `Copy`; every operation reduces its result modulo `p`.
/// Inputs are expected to already be reduced (all values produced by this
/// module are), which the arithmetic methods check in debug builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    modulus: u64,
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField {
            modulus: DEFAULT_PRIME,
        }
    }
}

impl PrimeField {
    /// Builds a field with the given modulus, rejecting small or composite
    /// moduli.
    pub fn new(modulus: u64) -> Result<Self, FieldError> {
        if modulus < MIN_PRIME {
            return Err(FieldError::ModulusTooSmall(modulus));
        }
        if !is_prime_u64(modulus) {
            return Err(FieldError::NotPrime(modulus));
        }
        Ok(PrimeField { modulus })
    }

    /// Builds the field from the `DOFB_PRIME` environment variable, falling
    /// back to [`DEFAULT_PRIME`] when the variable is unset.
    pub fn from_env() -> Result<Self, FieldError> {
        match env::var(PRIME_ENV_VAR) {
            Ok(raw) => {
                let parsed: u64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| FieldError::BadEnvValue(raw.clone()))?;
                PrimeField::new(parsed)
            }
            Err(_) => Ok(PrimeField::default()),
        }
    }

    /// The prime modulus `p`.
    pub fn modulus(self) -> u64 {
        self.modulus
    }

    /// `(a + b) mod p`.
    pub fn add(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.modulus && b < self.modulus);
        let (sum, overflow) = a.overflowing_add(b);
        if overflow || sum >= self.modulus {
            sum.wrapping_sub(self.modulus)
        } else {
            sum
        }
    }

    /// `(a - b) mod p`.
    pub fn sub(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.modulus && b < self.modulus);
        if a >= b {
            a - b
        } else {
            a + (self.modulus - b)
        }
    }

    /// `-a mod p`.
    pub fn neg(self, a: u64) -> u64 {
        debug_assert!(a < self.modulus);
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    /// `(a * b) mod p`.
    pub fn mul(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.modulus && b < self.modulus);
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    /// `a^e mod p` by square-and-multiply.
    pub fn pow(self, a: u64, mut e: u64) -> u64 {
        debug_assert!(a < self.modulus);
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    ///
    /// # Panics
    /// Panics if `a == 0`.
    pub fn inv(self, a: u64) -> u64 {
        assert!(a != 0, "zero has no multiplicative inverse");
        self.pow(a, self.modulus - 2)
    }

    /// Uniform draw from `[1, p)` — a "generic" nonzero channel gain.
    pub fn random_nonzero<R: Rng + ?Sized>(self, rng: &mut R) -> u64 {
        rng.random_range(1..self.modulus)
    }
}

/// One step of the splitmix64 output function: a cheap, well-mixed hash.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from a master seed and an index.
///
/// Used for per-trial gain draws so that trials are order-independent: trial
/// `i` sees the same gains whether run alone, sequentially, or concurrently.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin primality test, exact for all `u64` inputs
/// with this fixed witness set.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
