//! Cyclotomic numbers of order `ell` and the extended cyclotomic matrix.
//!
//! `A(i, j) = |(1 + g^i L) ∩ g^j L|` for a primitive root `g`. The extended
//! matrix bumps the corner entry by one and in return gains uniform row and
//! column sums `|L|`, a shift structure between rows, and a palindromic
//! diagonal — the properties that force `s(ell) > 0` for small `ell`.
//!
//! Indices are reduced mod `ell` at the API boundary, so callers may pass
//! things like `A(i, 2i)` without reducing first.

use alloc::vec::Vec;

use crate::error::Error;
use crate::modarith::{mod_mul, mod_pow, CosetIndex, GroupContext, Residue};

/// Largest modulus accepted by the full-matrix `O(p)` sweep.
pub const MAX_SWEEP_MODULUS: u64 = 1 << 24;
/// Largest `ell` for which an `ell x ell` table is materialized.
pub const MAX_TABLE_ELL: u64 = 1 << 12;

/// The `ell x ell` table of cyclotomic numbers with respect to one root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicMatrix {
    pub p: u64,
    pub root: u64,
    pub ell: usize,
    pub subgroup_order: u64,
    entries: Vec<u32>,
}

impl CyclotomicMatrix {
    /// `A(i, j)` with `i, j` reduced mod `ell` (negatives allowed).
    #[inline]
    pub fn entry(&self, i: i64, j: i64) -> u64 {
        let ell = self.ell as i64;
        let i = i.rem_euclid(ell) as usize;
        let j = j.rem_euclid(ell) as usize;
        self.entries[i * self.ell + j] as u64
    }

    /// Rows in index order, for export.
    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.ell)
            .map(|i| (0..self.ell).map(|j| self.entry(i as i64, j as i64)).collect())
            .collect()
    }

    /// Checks the defining symmetries and the row-sum/trace facts.
    pub fn check_invariants(&self) -> Result<(), Error> {
        let ell = self.ell as i64;
        for i in 0..ell {
            for j in 0..ell {
                if self.entry(i, j) != self.entry(j, i) {
                    return Err(Error::InvariantViolation(format!(
                        "A({i},{j}) != A({j},{i}) for p = {}",
                        self.p
                    )));
                }
                if self.entry(i, j) != self.entry(-i, j - i) {
                    return Err(Error::InvariantViolation(format!(
                        "A({i},{j}) != A(-{i},{j}-{i}) for p = {}",
                        self.p
                    )));
                }
            }
        }
        let m = self.subgroup_order;
        for i in 0..ell {
            let sum: u64 = (0..ell).map(|j| self.entry(i, j)).sum();
            let want = if i == 0 { m - 1 } else { m };
            if sum != want {
                return Err(Error::InvariantViolation(format!(
                    "row {i} of A sums to {sum}, expected {want} (p = {})",
                    self.p
                )));
            }
        }
        let trace: u64 = (0..ell).map(|i| self.entry(i, i)).sum();
        if trace != m - 1 {
            return Err(Error::InvariantViolation(format!(
                "trace of A is {trace}, expected {} (p = {})",
                m - 1,
                self.p
            )));
        }
        Ok(())
    }
}

/// The extended matrix: corner entry `A(0,0) + 1`, everything else copied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedMatrix {
    pub p: u64,
    pub root: u64,
    pub ell: usize,
    pub subgroup_order: u64,
    entries: Vec<u32>,
}

impl ExtendedMatrix {
    /// `b_{i,j}` with indices reduced mod `ell`.
    #[inline]
    pub fn entry(&self, i: i64, j: i64) -> u64 {
        let ell = self.ell as i64;
        let i = i.rem_euclid(ell) as usize;
        let j = j.rem_euclid(ell) as usize;
        self.entries[i * self.ell + j] as u64
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.ell)
            .map(|i| (0..self.ell).map(|j| self.entry(i as i64, j as i64)).collect())
            .collect()
    }
}

fn primitive_root_check(ctx: &GroupContext, g: Residue) -> Result<(), Error> {
    if ctx.is_primitive_root(g) {
        Ok(())
    } else {
        Err(Error::NotPrimitiveRoot {
            g,
            p: ctx.modulus(),
        })
    }
}

/// `A(i, j)` by walking the `|L|` elements of `g^i L` and fingerprinting
/// `1 + x`; usable at any scale the coset size allows.
pub fn cyclotomic_number(ctx: &GroupContext, g: Residue, i: i64, j: i64) -> Result<u64, Error> {
    primitive_root_check(ctx, g)?;
    let p = ctx.modulus();
    let ell = ctx.ell as i64;
    let i = i.rem_euclid(ell) as u64;
    let j = j.rem_euclid(ell) as u64;
    let base = mod_pow(g, i, p);
    let step = mod_pow(g, ctx.subgroup_order, p);
    let target = mod_pow(step, j, p);
    let mut count = 0u64;
    for x in ctx.coset_elements_from(base) {
        if x == p - 1 {
            continue; // 1 + x = 0 belongs to no coset
        }
        if mod_pow(x + 1, ctx.subgroup_order, p) == target {
            count += 1;
        }
    }
    Ok(count)
}

/// Coset index of every unit, as a dense table; used by the matrix sweep.
fn coset_table(ctx: &GroupContext, g: Residue) -> Vec<u32> {
    let p = ctx.modulus();
    let ell = ctx.ell;
    let mut table = vec![u32::MAX; p as usize];
    let mut base = 1u64;
    for i in 0..ell {
        for x in ctx.coset_elements_from(base) {
            table[x as usize] = i as u32;
        }
        base = mod_mul(base, g, p);
    }
    table
}

/// The whole matrix through one `O(p)` sweep over `Z_p^x`.
pub fn cyclotomic_matrix(ctx: &GroupContext, g: Residue) -> Result<CyclotomicMatrix, Error> {
    primitive_root_check(ctx, g)?;
    let p = ctx.modulus();
    if p > MAX_SWEEP_MODULUS {
        return Err(Error::ScaleExceeded {
            what: "full-matrix sweep modulus",
            value: p,
            limit: MAX_SWEEP_MODULUS,
        });
    }
    if ctx.ell > MAX_TABLE_ELL {
        return Err(Error::ScaleExceeded {
            what: "matrix dimension ell",
            value: ctx.ell,
            limit: MAX_TABLE_ELL,
        });
    }
    let ell = ctx.ell as usize;
    let table = coset_table(ctx, g);
    let mut entries = vec![0u32; ell * ell];
    for u in 1..p - 1 {
        let i = table[u as usize] as usize;
        let j = table[u as usize + 1] as usize;
        entries[i * ell + j] += 1;
    }
    Ok(CyclotomicMatrix {
        p,
        root: g,
        ell,
        subgroup_order: ctx.subgroup_order,
        entries,
    })
}

/// Builds the extended matrix and verifies every one of its stated
/// relations; a violation means the cyclotomic table upstream is wrong.
pub fn extended_matrix(m: &CyclotomicMatrix) -> Result<ExtendedMatrix, Error> {
    let mut entries = m.entries.clone();
    entries[0] += 1;
    let b = ExtendedMatrix {
        p: m.p,
        root: m.root,
        ell: m.ell,
        subgroup_order: m.subgroup_order,
        entries,
    };
    let ell = b.ell as i64;
    let fail = |relation: alloc::string::String| Err(Error::InvariantViolation(relation));

    if b.entry(0, 0) == 0 {
        return fail(format!("b(0,0) = 0 for p = {}", b.p));
    }
    for i in 0..ell {
        for j in 0..ell {
            let v = b.entry(i, j);
            for (name, w) in [
                ("b(-i,j-i)", b.entry(-i, j - i)),
                ("b(j-i,-i)", b.entry(j - i, -i)),
                ("b(i-j,-j)", b.entry(i - j, -j)),
                ("b(-j,i-j)", b.entry(-j, i - j)),
                ("b(j,i)", b.entry(j, i)),
            ] {
                if v != w {
                    return fail(format!(
                        "b({i},{j}) = {v} but {name} = {w} for p = {}",
                        b.p
                    ));
                }
            }
        }
    }
    // Diagonal after the corner = reverse of row 0.
    for k in 1..ell {
        if b.entry(k, k) != b.entry(0, ell - k) {
            return fail(format!(
                "b({k},{k}) != b(0,{}) for p = {}",
                ell - k,
                b.p
            ));
        }
    }
    // Row ell-i is row i shifted i places to the left.
    for i in 1..ell {
        for j in 0..ell {
            if b.entry(ell - i, j) != b.entry(i, j + i) {
                return fail(format!(
                    "row {} is not row {i} shifted left {i} (col {j}) for p = {}",
                    ell - i,
                    b.p
                ));
            }
        }
    }
    let m_order = b.subgroup_order;
    let trace: u64 = (0..ell).map(|i| b.entry(i, i)).sum();
    if trace != m_order {
        return fail(format!("trace(B) = {trace}, expected {m_order} for p = {}", b.p));
    }
    for i in 0..ell {
        let row: u64 = (0..ell).map(|j| b.entry(i, j)).sum();
        let col: u64 = (0..ell).map(|j| b.entry(j, i)).sum();
        if row != m_order || col != m_order {
            return fail(format!(
                "row/column {i} of B sums to {row}/{col}, expected {m_order} for p = {}",
                b.p
            ));
        }
    }
    Ok(b)
}

/// `s(ell)`: the sum of `A(i, 2i)` over `1 <= i <= ell` coprime to `ell`,
/// computed with the context's primitive root.
pub fn s_ell(ctx: &GroupContext) -> Result<u64, Error> {
    s_ell_with_root(ctx, ctx.primitive_root)
}

/// `s(ell)` computed with an arbitrary primitive root `g`.
pub fn s_ell_with_root(ctx: &GroupContext, g: Residue) -> Result<u64, Error> {
    if ctx.ell < 3 {
        return Err(Error::EllTooSmall {
            ell: ctx.ell,
            min: 3,
        });
    }
    let mut sum = 0u64;
    for i in 1..=ctx.ell as i64 {
        if crate::modarith::gcd(i as u64, ctx.ell) == 1 {
            sum += cyclotomic_number(ctx, g, i, 2 * i)?;
        }
    }
    Ok(sum)
}

/// Outcome of recomputing `s(ell)` under every primitive root of `p`.
#[derive(Debug, Clone)]
pub struct RootIndependenceReport {
    pub p: u64,
    pub ell: u64,
    /// The common value.
    pub s_value: u64,
    /// Roots tried, ascending.
    pub roots: Vec<u64>,
    /// `s(ell)` per root, aligned with `roots`.
    pub values: Vec<u64>,
}

/// Recomputes `s(ell)` under every primitive root and requires one value.
pub fn check_root_independence(ctx: &GroupContext) -> Result<RootIndependenceReport, Error> {
    let roots = ctx.primitive_roots()?;
    let mut values = Vec::with_capacity(roots.len());
    for &g in &roots {
        values.push(s_ell_with_root(ctx, g)?);
    }
    let s_value = values[0];
    if values.iter().any(|&v| v != s_value) {
        return Err(Error::InvariantViolation(format!(
            "s(ell) depends on the root for p = {}: {values:?}",
            ctx.modulus()
        )));
    }
    Ok(RootIndependenceReport {
        p: ctx.modulus(),
        ell: ctx.ell,
        s_value,
        roots,
        values,
    })
}

/// Smallest `b` in `g^i L` (by residue value) with `1 + b` in `g^{2i} L`,
/// together with `c = 1 + b`. `None` exactly when `A(i, 2i) = 0`.
pub fn find_witness(
    ctx: &GroupContext,
    i: CosetIndex,
) -> Result<Option<(Residue, Residue)>, Error> {
    if i as u64 >= ctx.ell {
        return Err(Error::CosetIndexOutOfRange {
            index: i,
            ell: ctx.ell,
        });
    }
    if crate::modarith::gcd(i as u64, ctx.ell) != 1 {
        return Err(Error::IndexNotCoprime {
            index: i,
            ell: ctx.ell,
        });
    }
    let p = ctx.modulus();
    let g = ctx.primitive_root;
    let base = mod_pow(g, i as u64, p);
    let step = mod_pow(g, ctx.subgroup_order, p);
    let target = mod_pow(step, (2 * i as u64) % ctx.ell, p);
    let mut best: Option<u64> = None;
    for b in ctx.coset_elements_from(base) {
        if b == p - 1 {
            continue;
        }
        if mod_pow(b + 1, ctx.subgroup_order, p) == target {
            best = Some(match best {
                Some(cur) if cur < b => cur,
                _ => b,
            });
        }
    }
    Ok(best.map(|b| (b, b + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::GroupContext;

    #[test]
    fn paper_matrix_p31() {
        let ctx = GroupContext::new(31).unwrap();
        let m = cyclotomic_matrix(&ctx, 3).unwrap();
        assert_eq!(
            m.rows(),
            vec![vec![3, 4, 2], vec![4, 2, 4], vec![2, 4, 4]]
        );
        m.check_invariants().unwrap();
        assert_eq!(cyclotomic_number(&ctx, 3, 0, 0).unwrap(), 3);
    }

    #[test]
    fn single_entry_p331() {
        let ctx = GroupContext::new(331).unwrap();
        assert_eq!(cyclotomic_number(&ctx, 3, 1, 2).unwrap(), 3);
        assert_eq!(cyclotomic_number(&ctx, 3, 0, 0).unwrap(), 5);
    }

    #[test]
    fn ell_one_matrix() {
        let ctx = GroupContext::new(7).unwrap();
        let m = cyclotomic_matrix(&ctx, ctx.primitive_root).unwrap();
        assert_eq!(m.rows(), vec![vec![5]]);
        let b = extended_matrix(&m).unwrap();
        assert_eq!(b.rows(), vec![vec![6]]);
    }

    #[test]
    fn matrix_agrees_with_single_entries() {
        for p in [31u64, 73, 131, 331] {
            let ctx = GroupContext::new(p).unwrap();
            let g = ctx.primitive_root;
            let m = cyclotomic_matrix(&ctx, g).unwrap();
            for i in 0..ctx.ell as i64 {
                for j in 0..ctx.ell as i64 {
                    assert_eq!(m.entry(i, j), cyclotomic_number(&ctx, g, i, j).unwrap());
                }
            }
        }
    }

    #[test]
    fn rejects_non_primitive_root() {
        let ctx = GroupContext::new(31).unwrap();
        // 2 has order 5, far from primitive.
        assert!(matches!(
            cyclotomic_number(&ctx, 2, 0, 0),
            Err(Error::NotPrimitiveRoot { g: 2, p: 31 })
        ));
        assert!(cyclotomic_matrix(&ctx, 5).is_err());
    }

    #[test]
    fn extended_matrix_p31() {
        let ctx = GroupContext::new(31).unwrap();
        let m = cyclotomic_matrix(&ctx, 3).unwrap();
        let b = extended_matrix(&m).unwrap();
        assert_eq!(b.entry(0, 0), 4);
        for i in 0..3 {
            let row: u64 = (0..3).map(|j| b.entry(i, j)).sum();
            assert_eq!(row, 10);
        }
        let trace: u64 = (0..3).map(|i| b.entry(i, i)).sum();
        assert_eq!(trace, 10);
    }

    #[test]
    fn s_values() {
        let ctx = GroupContext::new(31).unwrap();
        assert_eq!(s_ell(&ctx).unwrap(), 8); // A(1,2) + A(2,1) = 4 + 4

        let ctx = GroupContext::new(73).unwrap();
        assert!(s_ell(&ctx).unwrap() >= 1); // witnessed by 1 + 5 = 6

        // ell < 3 is rejected.
        let ctx = GroupContext::new(7).unwrap();
        assert!(matches!(s_ell(&ctx), Err(Error::EllTooSmall { .. })));
    }

    #[test]
    fn s_via_square_count_identity_p331() {
        // 2|S_0| - 1 - A(0,0) must equal s(11).
        let ctx = GroupContext::new(331).unwrap();
        let s0 = crate::squares::square_set(&ctx, 0).unwrap().members.len() as u64;
        let a00 = cyclotomic_number(&ctx, 3, 0, 0).unwrap();
        assert_eq!(s_ell(&ctx).unwrap(), 2 * s0 - 1 - a00);
    }

    #[test]
    fn root_independence_p31_p73() {
        let ctx = GroupContext::new(31).unwrap();
        let report = check_root_independence(&ctx).unwrap();
        assert_eq!(report.roots.len(), 8);
        assert_eq!(report.s_value, 8);
        assert_eq!(report.s_value, s_ell(&ctx).unwrap());

        let ctx = GroupContext::new(73).unwrap();
        let report = check_root_independence(&ctx).unwrap();
        assert_eq!(report.s_value, s_ell(&ctx).unwrap());
    }

    #[test]
    fn witnesses() {
        let ctx = GroupContext::new(31).unwrap();
        assert_eq!(find_witness(&ctx, 1).unwrap(), Some((12, 13)));
        let (b, c) = find_witness(&ctx, 1).unwrap().unwrap();
        assert_eq!(ctx.coset_index(b).unwrap(), 1);
        assert_eq!(ctx.coset_index(c).unwrap(), 2);

        let ctx = GroupContext::new(331).unwrap();
        assert!(find_witness(&ctx, 1).unwrap().is_some()); // A(1,2) = 3 > 0

        assert!(matches!(
            find_witness(&ctx, 0),
            Err(Error::IndexNotCoprime { .. })
        ));
    }

    #[test]
    fn witness_absent_iff_entry_zero() {
        for p in [31u64, 73, 89, 127, 151, 223, 251, 331] {
            let ctx = GroupContext::new(p).unwrap();
            if ctx.ell < 3 {
                continue;
            }
            for i in 1..ctx.ell as usize {
                if crate::modarith::gcd(i as u64, ctx.ell) != 1 {
                    continue;
                }
                let a = cyclotomic_number(&ctx, ctx.primitive_root, i as i64, 2 * i as i64)
                    .unwrap();
                let w = find_witness(&ctx, i).unwrap();
                assert_eq!(w.is_none(), a == 0, "p={p}, i={i}");
            }
        }
    }
}
