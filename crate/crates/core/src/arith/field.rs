//! Prime fields `F_p`.
//!
//! All algebra in this crate is generic over [`PrimeField`]. The concrete
//! fields are the const-generic [`Fp<P>`]; the primes used at desk scale have
//! aliases at the crate root (`F2`, `F3`, `F5`, `F7`).

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{Inv, One, Pow, Zero};

use crate::error::{Error, Result};

/// Largest prime accepted by [`Prime::new`] unless a bound is given explicitly.
pub const DEFAULT_PRIME_BOUND: u32 = 7;

/// A coefficient field `F_p` with `p` known at compile time.
pub trait PrimeField:
    Copy
    + Eq
    + Ord
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    /// The characteristic `p`.
    const CHARACTERISTIC: u32;

    fn from_u64(v: u64) -> Self;

    fn from_i64(v: i64) -> Self {
        let p = Self::CHARACTERISTIC as i64;
        Self::from_u64(v.rem_euclid(p) as u64)
    }

    /// Canonical representative in `[0, p)`.
    fn residue(self) -> u32;

    /// Multiplicative inverse, `None` for zero.
    fn inverse(self) -> Option<Self>;

    fn pow_u64(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    /// All elements in ascending residue order.
    fn elements() -> Vec<Self> {
        (0..Self::CHARACTERISTIC as u64).map(Self::from_u64).collect()
    }
}

pub(crate) const fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Residue class modulo the prime `P`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fp<const P: u32>(u32);

impl<const P: u32> Fp<P> {
    const CHECK: () = assert!(is_prime(P), "Fp<P> requires a prime modulus");

    pub const fn new(v: u32) -> Self {
        #[allow(clippy::let_unit_value)]
        let _ = Self::CHECK;
        Fp(v % P)
    }

    pub const fn value(self) -> u32 {
        self.0
    }
}

impl<const P: u32> PrimeField for Fp<P> {
    const CHARACTERISTIC: u32 = P;

    fn from_u64(v: u64) -> Self {
        Fp::new((v % P as u64) as u32)
    }

    fn residue(self) -> u32 {
        self.0
    }

    fn inverse(self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            // Fermat: a^(p-2)
            Some(self.pow_u64(P as u64 - 2))
        }
    }
}

impl<const P: u32> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u32> One for Fp<P> {
    fn one() -> Self {
        Fp::new(1)
    }
}

impl<const P: u32> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let s = self.0 + rhs.0;
        Fp(if s >= P { s - P } else { s })
    }
}

impl<const P: u32> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Fp(if self.0 >= rhs.0 { self.0 - rhs.0 } else { self.0 + P - rhs.0 })
    }
}

impl<const P: u32> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(((self.0 as u64 * rhs.0 as u64) % P as u64) as u32)
    }
}

impl<const P: u32> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp(if self.0 == 0 { 0 } else { P - self.0 })
    }
}

impl<const P: u32> Div for Fp<P> {
    type Output = Self;
    /// Panics on division by zero.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inverse().expect("division by zero in F_p")
    }
}

impl<const P: u32> AddAssign for Fp<P> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const P: u32> SubAssign for Fp<P> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<const P: u32> MulAssign for Fp<P> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<const P: u32> Inv for Fp<P> {
    type Output = Self;
    fn inv(self) -> Self {
        self.inverse().expect("zero has no inverse")
    }
}

impl<const P: u32> Pow<u64> for Fp<P> {
    type Output = Self;
    fn pow(self, e: u64) -> Self {
        self.pow_u64(e)
    }
}

/// A runtime prime, validated against an upper bound. Used where `p` comes
/// from user input and has to be dispatched onto one of the compiled fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        Self::with_bound(p, DEFAULT_PRIME_BOUND)
    }

    pub fn with_bound(p: u32, bound: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Validation(format!("p = {p} is not prime")));
        }
        if p > bound {
            return Err(Error::Validation(format!("p = {p} exceeds the supported bound {bound}")));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
