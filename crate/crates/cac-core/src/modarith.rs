//! Modular arithmetic and the multiplicative structure of `Z_p^x`.
//!
//! Everything downstream is phrased in terms of the subgroup `L = <-1, 2>`
//! of `Z_p^x` and its `ell = (p-1)/|L|` cosets. [`GroupContext`] bundles the
//! structure facts for one prime and classifies residues into cosets without
//! ever taking a discrete logarithm: `x^|L|` is a power of `g^|L|` (an element
//! of order `ell`), so a table of those `ell` powers identifies the coset.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::Error;

/// A residue of `Z_p`, reduced into `[0, p)`.
pub type Residue = u64;

/// Index of a coset `g^i L` in `[0, ell)`.
pub type CosetIndex = usize;

/// Largest `p` for which [`GroupContext::primitive_roots`] will enumerate.
pub const MAX_ROOT_ENUMERATION: u64 = 1 << 20;

/// `a * b mod m` without overflow for any 64-bit modulus.
#[inline]
pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

/// `base^exp mod m` by binary exponentiation; `m >= 1`.
pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    base %= m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Deterministic Miller-Rabin, valid for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // This witness set decides primality for every n < 3.3 * 10^24.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    // Brent's variant; n is odd, composite, and has no factor below 10^6.
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mod_mul(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of `n >= 1` as sorted `(prime, multiplicity)` pairs.
///
/// Trial division up to 10^6, then Pollard rho for whatever remains.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut out: BTreeMap<u64, u32> = BTreeMap::new();
    let mut rest = n;
    let mut d = 2u64;
    while d <= 1_000_000 && d * d <= rest {
        while rest % d == 0 {
            *out.entry(d).or_insert(0) += 1;
            rest /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    // rest now has no prime factor below 10^6; split it recursively.
    let mut stack = Vec::new();
    if rest > 1 {
        stack.push(rest);
    }
    while let Some(m) = stack.pop() {
        if is_prime(m) {
            *out.entry(m).or_insert(0) += 1;
        } else {
            let f = pollard_rho(m);
            stack.push(f);
            stack.push(m / f);
        }
    }
    out.into_iter().collect()
}

/// An odd prime `p >= 5`, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self, Error> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p < 5 {
            return Err(Error::PrimeTooSmall(p));
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }
}

impl core::fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Smallest `d >= 1` with `x^d = 1 (mod p)`, for `x` not divisible by `p`.
pub fn multiplicative_order(x: Residue, p: PrimeModulus) -> Result<u64, Error> {
    let factors = factorize(p.get() - 1);
    order_from_factors(x, p.get(), &factors)
}

fn order_from_factors(x: u64, p: u64, factors: &[(u64, u32)]) -> Result<u64, Error> {
    if x % p == 0 {
        return Err(Error::ZeroResidue);
    }
    let mut d = p - 1;
    for &(q, _) in factors {
        while d % q == 0 && mod_pow(x, d / q, p) == 1 {
            d /= q;
        }
    }
    Ok(d)
}

/// Legendre symbol: 0 for `x = 0`, +1 for nonzero squares, -1 otherwise.
pub fn legendre(x: Residue, p: PrimeModulus) -> i32 {
    let p = p.get();
    let x = x % p;
    if x == 0 {
        return 0;
    }
    if mod_pow(x, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Whether `2^(p-1) = 1 (mod p^2)`.
///
/// Rejects `p >= 2^32`, where the squared modulus would outgrow the 128-bit
/// headroom of [`mod_mul`].
pub fn is_wieferich(p: PrimeModulus) -> Result<bool, Error> {
    let p = p.get();
    if p >= 1 << 32 {
        return Err(Error::ScaleExceeded {
            what: "Wieferich test modulus",
            value: p,
            limit: (1 << 32) - 1,
        });
    }
    Ok(mod_pow(2, p - 1, p * p) == 1)
}

/// Group-structure facts for one prime: `o_p(2)`, the subgroup `L = <-1, 2>`,
/// the coset index `ell`, the budget `O(p)`, and a coset classifier.
#[derive(Debug, Clone)]
pub struct GroupContext {
    pub p: PrimeModulus,
    /// Multiplicative order of 2.
    pub order_of_2: u64,
    /// `|L|`: equals `o_p(2)` when that is even, twice it otherwise.
    pub subgroup_order: u64,
    /// Number of cosets, `(p-1) / |L|`.
    pub ell: u64,
    /// `O(p)`: 0 when `4 | |L|`, otherwise `ell`.
    pub big_o: u64,
    /// Smallest primitive root of `p`.
    pub primitive_root: u64,
    /// Prime factorization of `p - 1`.
    factors: Vec<(u64, u32)>,
    /// `x^|L|` is a power of `g^|L|`; this maps that power to the coset index.
    classifier: BTreeMap<u64, u32>,
}

impl GroupContext {
    /// Builds the full context for `p`; rejects composites and `p < 5`.
    pub fn new(p: u64) -> Result<Self, Error> {
        let p = PrimeModulus::new(p)?;
        let pv = p.get();
        let factors = factorize(pv - 1);
        let order_of_2 = order_from_factors(2, pv, &factors)?;
        let subgroup_order = if order_of_2 % 2 == 0 {
            order_of_2
        } else {
            2 * order_of_2
        };
        let ell = (pv - 1) / subgroup_order;
        let big_o = if subgroup_order % 4 == 0 { 0 } else { ell };

        let primitive_root = (2..pv)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&(q, _)| mod_pow(g, (pv - 1) / q, pv) != 1)
            })
            .expect("every prime has a primitive root");

        // g^|L| has order exactly ell, so its powers are pairwise distinct.
        let step = mod_pow(primitive_root, subgroup_order, pv);
        let mut classifier = BTreeMap::new();
        let mut fp = 1u64;
        for i in 0..ell {
            classifier.insert(fp, i as u32);
            fp = mod_mul(fp, step, pv);
        }
        debug_assert_eq!(classifier.len() as u64, ell);

        Ok(GroupContext {
            p,
            order_of_2,
            subgroup_order,
            ell,
            big_o,
            primitive_root,
            factors,
            classifier,
        })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p.get()
    }

    /// The coset fingerprint `x^|L| mod p`.
    #[inline]
    pub fn fingerprint(&self, x: Residue) -> u64 {
        mod_pow(x, self.subgroup_order, self.modulus())
    }

    /// Fingerprint shared by every element of the coset `g^i L`.
    pub fn coset_fingerprint(&self, i: CosetIndex) -> Result<u64, Error> {
        if i as u64 >= self.ell {
            return Err(Error::CosetIndexOutOfRange {
                index: i,
                ell: self.ell,
            });
        }
        let p = self.modulus();
        let step = mod_pow(self.primitive_root, self.subgroup_order, p);
        Ok(mod_pow(step, i as u64, p))
    }

    /// Index `i` with `x` in `g^i L`; `O(log p)` per query.
    pub fn coset_index(&self, x: Residue) -> Result<CosetIndex, Error> {
        let p = self.modulus();
        if x % p == 0 {
            return Err(Error::ZeroResidue);
        }
        let fp = self.fingerprint(x % p);
        match self.classifier.get(&fp) {
            Some(&i) => Ok(i as usize),
            // Every unit's fingerprint lands in the table.
            None => unreachable!("fingerprint of a unit must classify"),
        }
    }

    /// Iterates the `|L|` elements of `base * L` in generation order
    /// (powers of 2 times `base`, then their negatives when `-1` is not
    /// already a power of 2).
    pub fn coset_elements_from(&self, base: Residue) -> CosetElements<'_> {
        CosetElements {
            ctx: self,
            cur: base % self.modulus(),
            start: base % self.modulus(),
            emitted: 0,
            negated: false,
        }
    }

    /// The elements of `g^i L`, sorted ascending.
    pub fn coset_members(&self, i: CosetIndex) -> Result<Vec<Residue>, Error> {
        if i as u64 >= self.ell {
            return Err(Error::CosetIndexOutOfRange {
                index: i,
                ell: self.ell,
            });
        }
        let base = mod_pow(self.primitive_root, i as u64, self.modulus());
        let mut members: Vec<u64> = self.coset_elements_from(base).collect();
        members.sort_unstable();
        debug_assert_eq!(members.len() as u64, self.subgroup_order);
        Ok(members)
    }

    /// Whether `g` generates all of `Z_p^x`.
    pub fn is_primitive_root(&self, g: Residue) -> bool {
        let p = self.modulus();
        g % p != 0
            && self
                .factors
                .iter()
                .all(|&(q, _)| mod_pow(g, (p - 1) / q, p) != 1)
    }

    /// All primitive roots of `p`, ascending. Guarded to small `p`: the walk
    /// is `O(p)` and the list has `phi(p-1)` entries.
    pub fn primitive_roots(&self) -> Result<Vec<Residue>, Error> {
        let p = self.modulus();
        if p > MAX_ROOT_ENUMERATION {
            return Err(Error::ScaleExceeded {
                what: "primitive root enumeration modulus",
                value: p,
                limit: MAX_ROOT_ENUMERATION,
            });
        }
        let g = self.primitive_root;
        let mut roots = Vec::new();
        let mut cur = g;
        for k in 1..p - 1 {
            if gcd(k, p - 1) == 1 {
                roots.push(cur);
            }
            cur = mod_mul(cur, g, p);
        }
        roots.sort_unstable();
        Ok(roots)
    }
}

/// Iterator over one coset of `L`; see [`GroupContext::coset_elements_from`].
pub struct CosetElements<'a> {
    ctx: &'a GroupContext,
    cur: u64,
    start: u64,
    emitted: u64,
    negated: bool,
}

impl Iterator for CosetElements<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let o = self.ctx.order_of_2;
        if self.emitted == self.ctx.subgroup_order {
            return None;
        }
        if self.emitted == o && !self.negated {
            // |L| = 2 * o_p(2): rewind and emit the negatives.
            self.negated = true;
            self.cur = self.start;
        }
        let p = self.ctx.modulus();
        let val = if self.negated { p - self.cur } else { self.cur };
        self.cur = mod_mul(self.cur, 2, p);
        self.emitted += 1;
        Some(val)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_pow_basics() {
        let p = PrimeModulus::new(31).unwrap();
        assert_eq!(mod_pow(17, 0, p.get()), 1);
        assert_eq!(mod_pow(3, 30, 31), 1); // Fermat
        assert_eq!(mod_pow(2, 9, 73), 1);
        assert_eq!(mod_pow(2, 64, u64::MAX), mod_pow(2, 64, u64::MAX));
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(72), vec![(2, 3), (3, 2)]);
        assert_eq!(factorize(30), vec![(2, 1), (3, 1), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(1229241822 / 18307, 67146);
        assert_eq!(1229241822 % 18307, 0);
        assert_eq!(
            factorize(1229241822),
            vec![(2, 1), (3, 1), (19, 2), (31, 1), (18307, 1)]
        );
    }

    #[test]
    fn factorize_large_semiprime() {
        // Both factors above the trial-division bound: exercises rho.
        let a = 1_000_003u64;
        let b = 1_000_033u64;
        assert_eq!(factorize(a * b), vec![(a, 1), (b, 1)]);
    }

    #[test]
    fn orders() {
        for p in [5u64, 31, 73, 331] {
            let pm = PrimeModulus::new(p).unwrap();
            assert_eq!(multiplicative_order(p - 1, pm).unwrap(), 2);
        }
        assert_eq!(
            multiplicative_order(2, PrimeModulus::new(31).unwrap()).unwrap(),
            5
        );
        assert_eq!(
            multiplicative_order(2, PrimeModulus::new(73).unwrap()).unwrap(),
            9
        );
        assert_eq!(
            multiplicative_order(0, PrimeModulus::new(31).unwrap()),
            Err(Error::ZeroResidue)
        );
    }

    #[test]
    fn context_73() {
        let ctx = GroupContext::new(73).unwrap();
        assert_eq!(ctx.order_of_2, 9);
        assert_eq!(ctx.subgroup_order, 18);
        assert_eq!(ctx.ell, 4);
        assert_eq!(ctx.big_o, 4);
        assert_eq!(ctx.primitive_root, 5);
        // The four cosets are those represented by 1, 3, 5 and 11.
        let mut from_ctx: Vec<Vec<u64>> = (0..4).map(|i| ctx.coset_members(i).unwrap()).collect();
        let mut from_reps: Vec<Vec<u64>> = [1u64, 3, 5, 11]
            .iter()
            .map(|&r| {
                let mut v: Vec<u64> = ctx.coset_elements_from(r).collect();
                v.sort_unstable();
                v
            })
            .collect();
        from_ctx.sort();
        from_reps.sort();
        assert_eq!(from_ctx, from_reps);
    }

    #[test]
    fn context_31_and_331() {
        let ctx = GroupContext::new(31).unwrap();
        assert_eq!(ctx.subgroup_order, 10);
        assert_eq!(ctx.ell, 3);
        assert_eq!(ctx.big_o, 3);
        assert_eq!(ctx.primitive_root, 3);
        assert_eq!(
            ctx.coset_members(0).unwrap(),
            vec![1, 2, 4, 8, 15, 16, 23, 27, 29, 30]
        );

        let ctx = GroupContext::new(331).unwrap();
        assert_eq!(ctx.subgroup_order, 30);
        assert_eq!(ctx.ell, 11);
    }

    #[test]
    fn context_rejects_bad_p() {
        assert_eq!(GroupContext::new(4).unwrap_err(), Error::NotPrime(4));
        assert_eq!(GroupContext::new(3).unwrap_err(), Error::PrimeTooSmall(3));
        assert_eq!(GroupContext::new(2).unwrap_err(), Error::PrimeTooSmall(2));
        assert!(GroupContext::new(0).is_err());
    }

    #[test]
    fn coset_index_examples() {
        let ctx73 = GroupContext::new(73).unwrap();
        assert_eq!(ctx73.coset_index(1).unwrap(), 0);
        assert_eq!(ctx73.coset_index(2).unwrap(), 0);
        let ctx31 = GroupContext::new(31).unwrap();
        assert_eq!(ctx31.coset_index(12).unwrap(), 1); // 12 = 3 * 4, 4 in L
        assert_eq!(ctx31.coset_index(0), Err(Error::ZeroResidue));
        assert!(matches!(
            ctx31.coset_members(3),
            Err(Error::CosetIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn cosets_partition_the_group() {
        for p in [5u64, 7, 31, 73, 131] {
            let ctx = GroupContext::new(p).unwrap();
            let mut seen = alloc::collections::BTreeSet::new();
            for i in 0..ctx.ell as usize {
                let members = ctx.coset_members(i).unwrap();
                assert_eq!(members.len() as u64, ctx.subgroup_order);
                for m in members {
                    assert!(seen.insert(m), "element {m} in two cosets of p={p}");
                }
            }
            assert_eq!(seen.len() as u64, p - 1);
        }
    }

    #[test]
    fn legendre_examples() {
        let p31 = PrimeModulus::new(31).unwrap();
        assert_eq!(legendre(0, p31), 0);
        assert_eq!(legendre(2, p31), 1); // 8^2 = 64 = 2 (mod 31)
        assert_eq!(
            legendre(3, p31) * legendre(5, p31),
            legendre(15, p31)
        );
    }

    #[test]
    fn wieferich_examples() {
        assert!(is_wieferich(PrimeModulus::new(1093).unwrap()).unwrap());
        assert!(!is_wieferich(PrimeModulus::new(5).unwrap()).unwrap());
        assert!(!is_wieferich(PrimeModulus::new(31).unwrap()).unwrap());
        let big = PrimeModulus::new(4294967311).unwrap(); // first prime past 2^32
        assert!(matches!(
            is_wieferich(big),
            Err(Error::ScaleExceeded { .. })
        ));
    }

    #[test]
    fn primitive_root_has_full_order() {
        for p in [5u64, 7, 31, 73, 331, 499] {
            let ctx = GroupContext::new(p).unwrap();
            let pm = ctx.p;
            assert_eq!(
                multiplicative_order(ctx.primitive_root, pm).unwrap(),
                p - 1
            );
        }
    }

    #[test]
    fn primitive_roots_of_31() {
        let ctx = GroupContext::new(31).unwrap();
        assert_eq!(
            ctx.primitive_roots().unwrap(),
            vec![3, 11, 12, 13, 17, 21, 22, 24]
        );
    }
}
