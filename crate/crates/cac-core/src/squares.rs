//! Squares in the shifted cosets `1 + g^k L` and the sets `R(i, j)`.
//!
//! Counting squares two ways — directly with the Legendre symbol, and
//! through sums of cyclotomic numbers — is what pins `s(ell)` away from
//! zero when `ell` is an odd prime. All fractional identities are checked
//! in doubled (or quadrupled) integer arithmetic; no floating point.

use alloc::vec::Vec;

use crate::cyclotomic::{cyclotomic_number, s_ell};
use crate::error::Error;
use crate::modarith::{is_prime, legendre, mod_pow, CosetIndex, GroupContext, Residue};

/// The squares of `1 + g^k L`, sorted. Contains 0 exactly when `k = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareSet {
    pub p: u64,
    pub k: CosetIndex,
    pub members: Vec<Residue>,
}

/// `R(i, j) = (1 + g^i L) ∩ (-1 + g^j L)`; exactly `A(i, j)` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RSet {
    pub p: u64,
    pub i: CosetIndex,
    pub j: CosetIndex,
    pub members: Vec<Residue>,
}

fn check_coset_index(ctx: &GroupContext, k: CosetIndex) -> Result<(), Error> {
    if (k as u64) < ctx.ell {
        Ok(())
    } else {
        Err(Error::CosetIndexOutOfRange {
            index: k,
            ell: ctx.ell,
        })
    }
}

/// Enumerates `g^k L`, keeping `1 + x` when it is a square (0 included,
/// which happens for `k = 0` only).
pub fn square_set(ctx: &GroupContext, k: CosetIndex) -> Result<SquareSet, Error> {
    check_coset_index(ctx, k)?;
    let p = ctx.modulus();
    let base = mod_pow(ctx.primitive_root, k as u64, p);
    let mut members: Vec<u64> = ctx
        .coset_elements_from(base)
        .map(|x| (x + 1) % p)
        .filter(|&y| legendre(y, ctx.p) >= 0)
        .collect();
    members.sort_unstable();
    Ok(SquareSet { p, k, members })
}

/// Materializes `R(i, j)` by walking `1 + g^i L` and classifying `r + 1`.
pub fn r_set(ctx: &GroupContext, i: CosetIndex, j: CosetIndex) -> Result<RSet, Error> {
    check_coset_index(ctx, i)?;
    check_coset_index(ctx, j)?;
    let p = ctx.modulus();
    let base = mod_pow(ctx.primitive_root, i as u64, p);
    let target = ctx.coset_fingerprint(j)?;
    let mut members: Vec<u64> = Vec::new();
    for x in ctx.coset_elements_from(base) {
        let r = (x + 1) % p;
        let r_plus_1 = (r + 1) % p;
        if r_plus_1 == 0 {
            continue;
        }
        if mod_pow(r_plus_1, ctx.subgroup_order, p) == target {
            members.push(r);
        }
    }
    members.sort_unstable();
    Ok(RSet { p, i, j, members })
}

/// Per-coset square counts, by enumeration and by half-sums of cyclotomic
/// numbers; the two must match for every `k`.
#[derive(Debug, Clone)]
pub struct SquareCountReport {
    pub p: u64,
    pub ell: u64,
    /// `|S_k|` counted with the Legendre symbol.
    pub counted: Vec<u64>,
    /// The same counts predicted from the cyclotomic matrix row sums.
    pub predicted: Vec<u64>,
}

/// Checks `2|S_0| = 1 + sum_i A(i, -i)` and `2|S_k| = sum_i A(i, k-i)` for
/// every `k >= 1`.
pub fn check_square_counts(ctx: &GroupContext) -> Result<SquareCountReport, Error> {
    let g = ctx.primitive_root;
    let ell = ctx.ell as i64;
    let mut counted = Vec::new();
    let mut predicted = Vec::new();
    for k in 0..ell {
        let direct = square_set(ctx, k as usize)?.members.len() as u64;
        let mut sum = 0u64;
        for i in 0..ell {
            sum += cyclotomic_number(ctx, g, i, k - i)?;
        }
        let doubled_prediction = if k == 0 { 1 + sum } else { sum };
        if 2 * direct != doubled_prediction {
            return Err(Error::InvariantViolation(format!(
                "square count of 1 + g^{k} L is {direct}, cyclotomic sum predicts {doubled_prediction}/2 (p = {})",
                ctx.modulus()
            )));
        }
        counted.push(direct);
        predicted.push(doubled_prediction / 2);
    }
    Ok(SquareCountReport {
        p: ctx.modulus(),
        ell: ctx.ell,
        counted,
        predicted,
    })
}

/// Both sides of `2|S_0| = 1 + A(0,0) + s(ell)`, for odd prime `ell`.
#[derive(Debug, Clone, Copy)]
pub struct PrimeIndexSquareReport {
    pub p: u64,
    pub ell: u64,
    pub s0_count: u64,
    pub corner: u64,
    pub s_ell: u64,
}

/// For odd prime `ell`: the square count of `1 + L` determines `s(ell)`.
pub fn check_prime_index_square_identity(
    ctx: &GroupContext,
) -> Result<PrimeIndexSquareReport, Error> {
    if ctx.ell < 3 || ctx.ell % 2 == 0 || !is_prime(ctx.ell) {
        return Err(Error::EllNotOddPrime { ell: ctx.ell });
    }
    let s0_count = square_set(ctx, 0)?.members.len() as u64;
    let corner = cyclotomic_number(ctx, ctx.primitive_root, 0, 0)?;
    let s = s_ell(ctx)?;
    if 2 * s0_count != 1 + corner + s {
        return Err(Error::InvariantViolation(format!(
            "2|S_0| = {} but 1 + A(0,0) + s(ell) = {} (p = {})",
            2 * s0_count,
            1 + corner + s,
            ctx.modulus()
        )));
    }
    Ok(PrimeIndexSquareReport {
        p: ctx.modulus(),
        ell: ctx.ell,
        s0_count,
        corner,
        s_ell: s,
    })
}

/// The corner bound, its `|L|/2 - 1` consequence, and the square lower bound.
#[derive(Debug, Clone, Copy)]
pub struct CornerBoundsReport {
    pub p: u64,
    pub corner: u64,
    /// `ceil((p-1)/(2 ell)) - 1`.
    pub ceil_bound: u64,
    /// `|L|/2 - 1`.
    pub half_bound: u64,
    pub s0_count: u64,
}

/// Checks `A(0,0) <= ceil((p-1)/2ell) - 1 <= |L|/2 - 1` and
/// `|S_0| >= |L|/4 + 1/2` (as `4|S_0| >= |L| + 2`).
pub fn check_corner_bounds(ctx: &GroupContext) -> Result<CornerBoundsReport, Error> {
    if ctx.ell < 3 {
        return Err(Error::EllTooSmall {
            ell: ctx.ell,
            min: 3,
        });
    }
    let p = ctx.modulus();
    let corner = cyclotomic_number(ctx, ctx.primitive_root, 0, 0)?;
    let ceil_bound = (p - 1).div_ceil(2 * ctx.ell) - 1;
    let half_bound = ctx.subgroup_order / 2 - 1;
    let s0_count = square_set(ctx, 0)?.members.len() as u64;
    if corner > ceil_bound {
        return Err(Error::InvariantViolation(format!(
            "A(0,0) = {corner} exceeds ceil((p-1)/2ell) - 1 = {ceil_bound} (p = {p})"
        )));
    }
    if corner > half_bound {
        return Err(Error::InvariantViolation(format!(
            "A(0,0) = {corner} exceeds |L|/2 - 1 = {half_bound} (p = {p})"
        )));
    }
    if 4 * s0_count < ctx.subgroup_order + 2 {
        return Err(Error::InvariantViolation(format!(
            "|S_0| = {s0_count} is not above |L|/4 (p = {p})"
        )));
    }
    Ok(CornerBoundsReport {
        p,
        corner,
        ceil_bound,
        half_bound,
        s0_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::GroupContext;

    #[test]
    fn square_sets_p31() {
        let ctx = GroupContext::new(31).unwrap();
        assert_eq!(square_set(&ctx, 0).unwrap().members, vec![0, 2, 5, 9, 16, 28]);
        assert_eq!(square_set(&ctx, 1).unwrap().members, vec![4, 7, 8, 18, 20, 25]);
        assert_eq!(square_set(&ctx, 2).unwrap().members, vec![10, 14, 19]);
        assert!(square_set(&ctx, 3).is_err());
    }

    #[test]
    fn square_set_p331_contains_known_squares() {
        let ctx = GroupContext::new(331).unwrap();
        let s0 = square_set(&ctx, 0).unwrap();
        // 0, 1+4 = 233^2, 1-4 = 328 = 63^2, 1+8 = 3^2.
        for v in [0u64, 5, 328, 9] {
            assert!(s0.members.contains(&v), "missing {v}");
        }
        assert!(s0.members.len() >= 4);
    }

    #[test]
    fn zero_membership() {
        for p in [31u64, 73, 331] {
            let ctx = GroupContext::new(p).unwrap();
            for k in 0..ctx.ell as usize {
                let s = square_set(&ctx, k).unwrap();
                assert_eq!(s.members.contains(&0), k == 0, "p={p}, k={k}");
            }
        }
    }

    #[test]
    fn r_set_basics() {
        let ctx = GroupContext::new(31).unwrap();
        assert_eq!(r_set(&ctx, 1, 2).unwrap().members.len(), 4); // = A(1,2)
        assert!(r_set(&ctx, 0, 0).unwrap().members.contains(&0));
        // r-sets with different labels are disjoint.
        let mut all = alloc::collections::BTreeSet::new();
        for i in 0..3 {
            for j in 0..3 {
                for r in r_set(&ctx, i, j).unwrap().members {
                    assert!(all.insert(r), "r = {r} in two R-sets");
                }
            }
        }
    }

    #[test]
    fn square_count_identities_p31() {
        let ctx = GroupContext::new(31).unwrap();
        let report = check_square_counts(&ctx).unwrap();
        assert_eq!(report.counted, vec![6, 6, 3]);
        assert_eq!(report.predicted, vec![6, 6, 3]);
    }

    #[test]
    fn prime_index_identity() {
        let ctx = GroupContext::new(31).unwrap();
        let r = check_prime_index_square_identity(&ctx).unwrap();
        assert_eq!((r.s0_count, r.corner, r.s_ell), (6, 3, 8));

        let ctx = GroupContext::new(331).unwrap();
        let r = check_prime_index_square_identity(&ctx).unwrap();
        assert_eq!(r.corner, 5);
        assert!(r.s0_count >= 4);

        // ell = 4 is not an odd prime.
        let ctx = GroupContext::new(73).unwrap();
        assert!(matches!(
            check_prime_index_square_identity(&ctx),
            Err(Error::EllNotOddPrime { ell: 4 })
        ));
    }

    #[test]
    fn corner_bounds_examples() {
        let ctx = GroupContext::new(331).unwrap();
        let r = check_corner_bounds(&ctx).unwrap();
        assert_eq!(r.corner, 5);
        assert_eq!(r.ceil_bound, 14);
        assert!(4 * r.s0_count > 30); // |S_0| > 7.5

        let ctx = GroupContext::new(31).unwrap();
        let r = check_corner_bounds(&ctx).unwrap();
        assert_eq!((r.corner, r.ceil_bound, r.s0_count), (3, 4, 6));

        let ctx = GroupContext::new(73).unwrap();
        check_corner_bounds(&ctx).unwrap();
    }
}
