//! Slow, definition-faithful reference paths.
//!
//! These deliberately share as little machinery as possible with the fast
//! implementations they validate: [`a_by_definition`] counts exponent pairs
//! straight from the defining equation with its own power table,
//! [`exhaustive_max_cac`] finds the true maximum code size by exact set
//! packing, and [`gauss_ell3`] reproduces the order-3 cyclotomic numbers
//! from the Diophantine system `4p = a^2 + 27 b^2`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::codes::{self, Code, CodeMeta, Codeword, Verification};
use crate::error::Error;
use crate::modarith::{GroupContext, PrimeModulus};

/// Largest `p` accepted by [`a_by_definition`].
pub const MAX_DEFINITION_P: u64 = 2048;
/// Largest `p` accepted by [`exhaustive_max_cac`].
pub const MAX_EXHAUSTIVE_P: u64 = 40;

/// The unique solution of `4p = a^2 + 27 b^2` with `a = 1 (mod 3)`;
/// only `|b|` is determined (its sign depends on the root convention).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussPair {
    pub a: i64,
    pub b_abs: u64,
}

/// `A(i, j)` counted literally: pairs `(m, n)` with
/// `1 + g^(i + m ell) = g^(j + n ell)`, `0 <= m, n < (p-1)/ell`.
pub fn a_by_definition(p: u64, g: u64, ell: u64, i: i64, j: i64) -> Result<u64, Error> {
    if p > MAX_DEFINITION_P {
        return Err(Error::ScaleExceeded {
            what: "definition-oracle modulus",
            value: p,
            limit: MAX_DEFINITION_P,
        });
    }
    let pm = PrimeModulus::new(p)?;
    let p = pm.get();
    if ell == 0 {
        return Err(Error::EllTooSmall { ell, min: 1 });
    }
    if (p - 1) % ell != 0 {
        return Err(Error::InvariantViolation(format!(
            "ell = {ell} does not divide p - 1 = {}",
            p - 1
        )));
    }
    // Power table by repeated multiplication; also proves primitivity.
    let mut powers = Vec::with_capacity((p - 1) as usize);
    let mut cur = 1u64;
    for _ in 0..p - 1 {
        powers.push(cur);
        cur = cur * (g % p) % p;
        if cur == 1 && powers.len() < (p - 1) as usize {
            return Err(Error::NotPrimitiveRoot { g, p });
        }
    }
    if cur != 1 {
        return Err(Error::NotPrimitiveRoot { g, p });
    }

    let span = (p - 1) / ell; // = |L|
    let period = (p - 1) as i64;
    let i0 = i.rem_euclid(period) as u64;
    let j0 = j.rem_euclid(period) as u64;
    let mut count = 0u64;
    for m in 0..span {
        let lhs = (1 + powers[((i0 + m * ell) % (p - 1)) as usize]) % p;
        if lhs == 0 {
            continue; // 0 is not a power of g
        }
        for n in 0..span {
            if lhs == powers[((j0 + n * ell) % (p - 1)) as usize] {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[inline]
fn half_class(x: u64, p: u64) -> u64 {
    let x = x % p;
    x.min(p - x)
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut x = n;
    let mut y = (x + 1) / 2;
    while y < x {
        x = y;
        y = (x + n / x) / 2;
    }
    x
}

/// Exact maximum CAC size for `p <= 40`, with a witness code.
///
/// Every codeword is translation-reduced to `{0, a, b}` and identified with
/// its set of +/- difference classes (2 classes for equi-difference words,
/// 3 otherwise); the maximum code is a maximum packing of those class sets,
/// found by memoized recursion on the set of still-free classes. Candidate
/// order is fixed, so the witness is deterministic.
pub fn exhaustive_max_cac(p: u64) -> Result<(u64, Code), Error> {
    if p > MAX_EXHAUSTIVE_P {
        return Err(Error::ScaleExceeded {
            what: "exhaustive-search modulus",
            value: p,
            limit: MAX_EXHAUSTIVE_P,
        });
    }
    let ctx = GroupContext::new(p)?;
    let half = ((p - 1) / 2) as u32;

    // Distinct class sets, keyed by bitmask, each with its first witness.
    let mut block_map: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for a in 1..p {
        for b in a + 1..p {
            let classes = [half_class(a, p), half_class(b, p), half_class(b - a, p)];
            let mut mask = 0u32;
            for c in classes {
                mask |= 1 << (c - 1);
            }
            block_map.entry(mask).or_insert((a, b));
        }
    }
    let blocks: Vec<(u32, (u64, u64))> = block_map.into_iter().collect();

    // best[mask] = maximum number of blocks packable into the free classes.
    let full: u32 = if half == 32 { u32::MAX } else { (1 << half) - 1 };
    let mut memo: BTreeMap<u32, u32> = BTreeMap::new();
    let max = pack(full, &blocks, &mut memo);

    // Reconstruct one maximum packing along the memo table.
    let mut mask = full;
    let mut codewords = Vec::new();
    while pack(mask, &blocks, &mut memo) > 0 {
        let low = mask & mask.wrapping_neg();
        if pack(mask & !low, &blocks, &mut memo) == pack(mask, &blocks, &mut memo) {
            mask &= !low;
            continue;
        }
        let target = pack(mask, &blocks, &mut memo);
        for &(bm, (a, b)) in &blocks {
            if bm & low != 0 && bm & mask == bm && 1 + pack(mask & !bm, &blocks, &mut memo) == target
            {
                codewords.push(Codeword::new(p, [0, a, b])?);
                mask &= !bm;
                break;
            }
        }
    }
    debug_assert_eq!(codewords.len() as u64, max as u64);

    let equi = codewords.iter().filter(|w| w.is_equi()).count();
    let size = codewords.len() as u64;
    let code = Code {
        p,
        codewords,
        meta: CodeMeta {
            equi,
            nonequi: size as usize - equi,
            m_e: codes::m_e(&ctx),
            upper_bound: codes::upper_bound(&ctx),
            optimal: true,
            primitive_root: ctx.primitive_root,
            order_of_2: ctx.order_of_2,
            ell: ctx.ell,
            big_o: ctx.big_o,
            generator_coset: None,
        },
    };
    match codes::verify(&code)? {
        Verification::Ok => Ok((max as u64, code)),
        Verification::Conflict(_) => Err(Error::InvariantViolation(format!(
            "exhaustive witness for p = {p} does not verify"
        ))),
    }
}

fn pack(mask: u32, blocks: &[(u32, (u64, u64))], memo: &mut BTreeMap<u32, u32>) -> u32 {
    if mask == 0 {
        return 0;
    }
    if let Some(&v) = memo.get(&mask) {
        return v;
    }
    let low = mask & mask.wrapping_neg();
    // Either the lowest free class goes unused, or some block covers it.
    let mut best = pack(mask & !low, blocks, memo);
    for &(bm, _) in blocks {
        if bm & low != 0 && bm & mask == bm {
            best = best.max(1 + pack(mask & !bm, blocks, memo));
        }
    }
    memo.insert(mask, best);
    best
}

/// The order-3 cyclotomic numbers recomputed from the Gauss formulas.
#[derive(Debug, Clone, Copy)]
pub struct GaussReport {
    pub p: u64,
    pub pair: GaussPair,
    pub a00: u64,
    pub a12: u64,
    pub a01: u64,
    pub a02: u64,
}

/// For `ell = 3`: finds the unique `(a, |b|)` with `4p = a^2 + 27 b^2`,
/// `a = 1 (mod 3)`, and checks `A(0,0) = (p - 8 + a)/9`,
/// `A(1,2) = (p + 1 + a)/9` and `{A(0,1), A(0,2)} = {(2p - 4 - a +- 9|b|)/18}`
/// (unordered, since the sign of `b` depends on the root).
pub fn gauss_ell3(p: u64) -> Result<GaussReport, Error> {
    let ctx = GroupContext::new(p)?;
    if ctx.ell != 3 {
        return Err(Error::EllTooSmall { ell: ctx.ell, min: 3 });
    }
    let four_p = 4 * p as i64;
    let mut pair = None;
    let mut b = 0i64;
    while 27 * b * b <= four_p {
        let rest = four_p - 27 * b * b;
        let cand = isqrt(rest);
        if cand * cand == rest && cand > 0 {
            let signed = if cand % 3 == 1 { cand } else { -cand };
            debug_assert_eq!(signed.rem_euclid(3), 1);
            pair = Some(GaussPair {
                a: signed,
                b_abs: b as u64,
            });
        }
        b += 1;
    }
    let pair = pair.ok_or_else(|| {
        Error::InvariantViolation(format!("no solution of 4p = a^2 + 27 b^2 for p = {p}"))
    })?;

    let g = ctx.primitive_root;
    let a00 = crate::cyclotomic::cyclotomic_number(&ctx, g, 0, 0)?;
    let a12 = crate::cyclotomic::cyclotomic_number(&ctx, g, 1, 2)?;
    let a01 = crate::cyclotomic::cyclotomic_number(&ctx, g, 0, 1)?;
    let a02 = crate::cyclotomic::cyclotomic_number(&ctx, g, 0, 2)?;

    let a = pair.a;
    let nine_b = 9 * pair.b_abs as i64;
    let check = |name: &str, lhs: u64, num: i64, den: i64| -> Result<(), Error> {
        if num % den != 0 || num / den != lhs as i64 {
            return Err(Error::InvariantViolation(format!(
                "{name} = {lhs} but the formula gives {num}/{den} for p = {p}"
            )));
        }
        Ok(())
    };
    check("A(0,0)", a00, p as i64 - 8 + a, 9)?;
    check("A(1,2)", a12, p as i64 + 1 + a, 9)?;
    let plus = (2 * p as i64 - 4 - a + nine_b) / 18;
    let minus = (2 * p as i64 - 4 - a - nine_b) / 18;
    if (2 * p as i64 - 4 - a + nine_b) % 18 != 0
        || (2 * p as i64 - 4 - a - nine_b) % 18 != 0
        || (a01 as i64, a02 as i64) != (plus, minus) && (a01 as i64, a02 as i64) != (minus, plus)
    {
        return Err(Error::InvariantViolation(format!(
            "{{A(0,1), A(0,2)}} = {{{a01}, {a02}}} but the formulas give {{{plus}, {minus}}} for p = {p}"
        )));
    }
    Ok(GaussReport {
        p,
        pair,
        a00,
        a12,
        a01,
        a02,
    })
}
