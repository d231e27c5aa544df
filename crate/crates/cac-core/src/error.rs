//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Everything that can go wrong across the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The modulus failed the primality test.
    NotPrime(u64),
    /// The modulus is prime but below the supported minimum of 5.
    PrimeTooSmall(u64),
    /// An operation that needs a unit of `Z_p` was given 0.
    ZeroResidue,
    /// `g` does not generate `Z_p^x`.
    NotPrimitiveRoot { g: u64, p: u64 },
    /// A coset index outside `[0, ell)`.
    CosetIndexOutOfRange { index: usize, ell: u64 },
    /// The generator-index argument must be coprime to `ell`.
    IndexNotCoprime { index: usize, ell: u64 },
    /// The coset index count `ell` is below what the operation requires.
    EllTooSmall { ell: u64, min: u64 },
    /// The operation requires `ell` to be an odd prime.
    EllNotOddPrime { ell: u64 },
    /// The operation requires `o_p(2)` not divisible by 4.
    OrderDivisibleByFour { p: u64, order: u64 },
    /// `2^(p-1) = 1 (mod p^2)`, which the prime-power size formula excludes.
    WieferichPrime(u64),
    /// `p^k` does not fit in 64 bits.
    PowerOverflow { base: u64, exp: u32 },
    /// An input exceeds the scale an operation is built for.
    ScaleExceeded {
        what: &'static str,
        value: u64,
        limit: u64,
    },
    /// There is no nonequi-difference budget for this prime (`O(p) < 3`).
    NoNonequiBudget { p: u64, big_o: u64 },
    /// The forbidden class handed to the packer is not on the cycle.
    ForbiddenClassNotOnCycle { rep: u64, coset: usize },
    /// A codeword that is not three distinct residues mod `p`.
    MalformedCodeword(String),
    /// Codewords built for different moduli were mixed in one code.
    ModulusMismatch { expected: u64, found: u64 },
    /// A channel scenario with duplicate users, bad indices or offset counts.
    InvalidScenario(String),
    /// A mathematical identity that must hold was violated; indicates a bug
    /// in whichever side of the check is younger.
    InvariantViolation(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(n) => write!(f, "{n} is not prime"),
            Error::PrimeTooSmall(p) => write!(f, "prime length must be at least 5, got {p}"),
            Error::ZeroResidue => write!(f, "0 is not a unit of Z_p"),
            Error::NotPrimitiveRoot { g, p } => {
                write!(f, "{g} is not a primitive root of Z_{p}")
            }
            Error::CosetIndexOutOfRange { index, ell } => {
                write!(f, "coset index {index} out of range (ell = {ell})")
            }
            Error::IndexNotCoprime { index, ell } => {
                write!(f, "index {index} is not coprime to ell = {ell}")
            }
            Error::EllTooSmall { ell, min } => {
                write!(f, "operation requires ell >= {min}, got ell = {ell}")
            }
            Error::EllNotOddPrime { ell } => {
                write!(f, "operation requires ell to be an odd prime, got ell = {ell}")
            }
            Error::OrderDivisibleByFour { p, order } => {
                write!(f, "o_{p}(2) = {order} is divisible by 4")
            }
            Error::WieferichPrime(p) => write!(f, "{p} is a Wieferich prime"),
            Error::PowerOverflow { base, exp } => {
                write!(f, "{base}^{exp} does not fit in 64 bits")
            }
            Error::ScaleExceeded { what, value, limit } => {
                write!(f, "{what} = {value} exceeds the supported limit {limit}")
            }
            Error::NoNonequiBudget { p, big_o } => {
                write!(f, "p = {p} has O(p) = {big_o} < 3: no nonequi-difference codewords")
            }
            Error::ForbiddenClassNotOnCycle { rep, coset } => {
                write!(f, "class {{{rep}, p-{rep}}} is not on the cycle of coset {coset}")
            }
            Error::MalformedCodeword(msg) => write!(f, "malformed codeword: {msg}"),
            Error::ModulusMismatch { expected, found } => {
                write!(f, "codeword modulus {found} differs from code length {expected}")
            }
            Error::InvalidScenario(msg) => write!(f, "invalid scenario: {msg}"),
            Error::InvariantViolation(msg) => write!(f, "invariant violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
