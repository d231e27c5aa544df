//! Codewords, conflict-avoiding codes, and the optimal construction.
//!
//! A weight-3 codeword over `Z_p` is equi-difference when it is a translate
//! of `{0, a, 2a}`; its difference set then has 4 elements instead of 6.
//! The construction packs every coset of `L = <-1, 2>` with equi-difference
//! codewords by matching consecutive classes on its doubling cycle, and —
//! when the budget `O(p)` allows — first places `floor(ell/3)` nonequi
//! codewords built from a generator-coset witness `1 + b = c`, which removes
//! one class from each of three distinct cosets per triple.
//!
//! Every choice is deterministic (smallest generator index, smallest
//! witness, fixed cycle start), so [`construct`] is a pure function of `p`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::cyclotomic::find_witness;
use crate::error::Error;
use crate::modarith::{gcd, is_prime, is_wieferich, mod_mul, mod_pow, CosetIndex, GroupContext,
                      Residue};

/// Node budget for the fallback triple search used by [`construct`].
pub const DEFAULT_SEARCH_LIMIT: u64 = 1 << 22;

/// A weight-3 codeword: three distinct residues mod `p`, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Codeword {
    p: u64,
    elems: [u64; 3],
}

impl Codeword {
    pub fn new(p: u64, elems: [u64; 3]) -> Result<Self, Error> {
        let mut e = elems;
        e.sort_unstable();
        if e[2] >= p {
            return Err(Error::MalformedCodeword(format!(
                "element {} is not reduced mod {p}",
                e[2]
            )));
        }
        if e[0] == e[1] || e[1] == e[2] {
            return Err(Error::MalformedCodeword(format!(
                "elements {e:?} are not distinct"
            )));
        }
        Ok(Codeword { p, elems: e })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn elems(&self) -> [u64; 3] {
        self.elems
    }

    /// The set (not multiset) of the six signed differences; size 4 or 6.
    pub fn difference_set(&self) -> Vec<Residue> {
        let p = self.p;
        let mut d = Vec::with_capacity(6);
        for a in self.elems {
            for b in self.elems {
                if a != b {
                    d.push((p + a - b) % p);
                }
            }
        }
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Whether some translate has the form `{0, a, 2a}`.
    pub fn is_equi(&self) -> bool {
        self.difference_set().len() == 4
    }
}

/// Why the constructed size is known to be the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimalityCase {
    /// `O(p) < 3`: the equi-difference packing already meets the bound.
    EquiOnly,
    /// `ell` in {3, 4, 5} with `O(p) = ell`.
    SmallIndex,
    /// `ell` an odd prime with `O(p) = ell`.
    OddPrimeIndex,
}

impl core::fmt::Display for OptimalityCase {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OptimalityCase::EquiOnly => write!(f, "O(p) < 3: equi-difference packing is optimal"),
            OptimalityCase::SmallIndex => write!(f, "ell in {{3, 4, 5}}: one nonequi codeword exists"),
            OptimalityCase::OddPrimeIndex => {
                write!(f, "ell an odd prime: floor(ell/3) nonequi codewords exist")
            }
        }
    }
}

/// Code metadata carried alongside the codeword list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeMeta {
    pub equi: usize,
    pub nonequi: usize,
    pub m_e: u64,
    pub upper_bound: u64,
    pub optimal: bool,
    pub primitive_root: u64,
    pub order_of_2: u64,
    pub ell: u64,
    pub big_o: u64,
    /// Generator index whose witness seeded the nonequi codewords, if any.
    pub generator_coset: Option<CosetIndex>,
}

/// A conflict-avoiding code of length `p` and weight 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    pub p: u64,
    pub codewords: Vec<Codeword>,
    pub meta: CodeMeta,
}

impl Code {
    pub fn size(&self) -> usize {
        self.codewords.len()
    }
}

/// A conflict between two codewords: the first shared difference found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConflictReport {
    pub first: usize,
    pub second: usize,
    pub difference: Residue,
}

/// Outcome of [`verify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    Ok,
    Conflict(ConflictReport),
}

/// Checks the CAC property: pairwise disjoint difference sets.
///
/// Codewords are scanned in list order and each difference set in ascending
/// order, so the reported conflict is deterministic.
pub fn verify(code: &Code) -> Result<Verification, Error> {
    let mut owner: BTreeMap<u64, usize> = BTreeMap::new();
    for (idx, w) in code.codewords.iter().enumerate() {
        if w.modulus() != code.p {
            return Err(Error::ModulusMismatch {
                expected: code.p,
                found: w.modulus(),
            });
        }
        for d in w.difference_set() {
            if let Some(&prev) = owner.get(&d) {
                return Ok(Verification::Conflict(ConflictReport {
                    first: prev,
                    second: idx,
                    difference: d,
                }));
            }
            owner.insert(d, idx);
        }
    }
    Ok(Verification::Ok)
}

/// `M^e(p) = (p - 1 - 2 O(p)) / 4`: the equi-difference-only maximum.
pub fn m_e(ctx: &GroupContext) -> u64 {
    (ctx.modulus() - 1 - 2 * ctx.big_o) / 4
}

/// `M^e(p) + floor(O(p)/3)`: the upper bound for any CAC.
pub fn upper_bound(ctx: &GroupContext) -> u64 {
    m_e(ctx) + ctx.big_o / 3
}

/// The optimal size, when it is known exactly, with the case that proves it.
pub fn known_optimal_size(ctx: &GroupContext) -> Option<(u64, OptimalityCase)> {
    if ctx.big_o < 3 {
        return Some((m_e(ctx), OptimalityCase::EquiOnly));
    }
    // O(p) >= 3 forces O(p) = ell, i.e. 4 does not divide o_p(2).
    debug_assert_eq!(ctx.big_o, ctx.ell);
    debug_assert!(ctx.order_of_2 % 4 != 0);
    if matches!(ctx.ell, 3 | 4 | 5) {
        return Some((m_e(ctx) + 1, OptimalityCase::SmallIndex));
    }
    if ctx.ell % 2 == 1 && is_prime(ctx.ell) {
        return Some((m_e(ctx) + ctx.ell / 3, OptimalityCase::OddPrimeIndex));
    }
    None
}

/// Optimal size at length `p^k` for a non-Wieferich `p` with `4 ∤ o_p(2)`
/// and odd prime `ell`: `(p^k - 1 - 2 k ell) / 4 + k floor(ell/3)`.
pub fn prime_power_size(p: u64, k: u32) -> Result<u64, Error> {
    let ctx = GroupContext::new(p)?;
    if k == 0 {
        return Err(Error::PowerOverflow { base: p, exp: 0 });
    }
    if is_wieferich(ctx.p)? {
        return Err(Error::WieferichPrime(p));
    }
    if ctx.order_of_2 % 4 == 0 {
        return Err(Error::OrderDivisibleByFour {
            p,
            order: ctx.order_of_2,
        });
    }
    if ctx.ell < 3 || ctx.ell % 2 == 0 || !is_prime(ctx.ell) {
        return Err(Error::EllNotOddPrime { ell: ctx.ell });
    }
    let pk = p
        .checked_pow(k)
        .ok_or(Error::PowerOverflow { base: p, exp: k })?;
    let numerator = pk - 1 - 2 * k as u64 * ctx.ell;
    debug_assert_eq!(numerator % 4, 0);
    Ok(numerator / 4 + k as u64 * (ctx.ell / 3))
}

/// A coset's negation classes `{x, p-x}` arranged in multiply-by-2 order,
/// starting from the class with the smallest canonical representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoublingCycle {
    pub p: u64,
    pub coset: CosetIndex,
    /// Canonical representatives `min(x, p-x)`, in cycle order.
    pub classes: Vec<Residue>,
}

#[inline]
fn class_rep(x: u64, p: u64) -> u64 {
    let x = x % p;
    x.min(p - x)
}

/// Builds the doubling cycle of coset `i`; length `|L| / 2`.
pub fn doubling_cycle(ctx: &GroupContext, i: CosetIndex) -> Result<DoublingCycle, Error> {
    let p = ctx.modulus();
    let members = ctx.coset_members(i)?;
    let start = class_rep(members[0], p); // members sorted, so this is minimal
    let len = (ctx.subgroup_order / 2) as usize;
    let mut classes = Vec::with_capacity(len);
    let mut cur = start;
    for _ in 0..len {
        classes.push(cur);
        cur = class_rep(mod_mul(cur, 2, p), p);
    }
    debug_assert_eq!(cur, start, "doubling cycle must close");
    Ok(DoublingCycle { p, coset: i, classes })
}

/// Matches consecutive classes of the cycle into `{0, a, 2a}` codewords.
///
/// With a forbidden class, matching runs along the remaining path starting
/// at its successor; otherwise it starts at the cycle's first class, and an
/// odd cycle leaves the predecessor of the start unmatched.
pub fn equi_pack(
    cycle: &DoublingCycle,
    forbidden: Option<Residue>,
) -> Result<Vec<Codeword>, Error> {
    let n = cycle.classes.len();
    let path: Vec<u64> = match forbidden {
        Some(rep) => {
            let pos = cycle.classes.iter().position(|&c| c == rep).ok_or(
                Error::ForbiddenClassNotOnCycle {
                    rep,
                    coset: cycle.coset,
                },
            )?;
            (1..n).map(|k| cycle.classes[(pos + k) % n]).collect()
        }
        None => cycle.classes.clone(),
    };
    let mut out = Vec::with_capacity(path.len() / 2);
    for pair in path.chunks_exact(2) {
        let a = pair[0];
        let b = mod_mul(a, 2, cycle.p);
        out.push(Codeword::new(cycle.p, [0, a, b])?);
    }
    Ok(out)
}

/// Elements `a + b = c` spanning three distinct cosets; the seed of one
/// nonequi-difference codeword `{0, a, c}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triple {
    pub a: Residue,
    pub b: Residue,
    pub c: Residue,
    /// Coset indices of `a`, `b`, `c`; pairwise distinct.
    pub cosets: [CosetIndex; 3],
}

impl Triple {
    fn check(&self, p: u64) {
        debug_assert_eq!((self.a + self.b) % p, self.c % p);
        debug_assert!(self.cosets[0] != self.cosets[1]);
        debug_assert!(self.cosets[1] != self.cosets[2]);
        debug_assert!(self.cosets[0] != self.cosets[2]);
    }
}

/// `floor(ell/3)` triples from the first generator coset with a witness.
///
/// Scans generator indices ascending; a witness `1 + b = c` under `t = g^i`
/// yields the triples `(t^{3j}, t^{3j} b, t^{3j} c)`, whose coset-index
/// sets are pairwise disjoint. `None` when every generator index has
/// `A(i, 2i) = 0`.
pub fn find_generator_triples(ctx: &GroupContext) -> Result<Option<Vec<Triple>>, Error> {
    if ctx.big_o < 3 {
        return Err(Error::NoNonequiBudget {
            p: ctx.modulus(),
            big_o: ctx.big_o,
        });
    }
    let p = ctx.modulus();
    let ell = ctx.ell;
    for i in 1..ell as usize {
        if gcd(i as u64, ell) != 1 {
            continue;
        }
        if let Some((b, c)) = find_witness(ctx, i)? {
            let t = mod_pow(ctx.primitive_root, i as u64, p);
            let t3 = mod_pow(t, 3, p);
            let mut triples = Vec::with_capacity((ell / 3) as usize);
            let mut factor = 1u64;
            for j in 0..ell / 3 {
                let triple = Triple {
                    a: factor,
                    b: mod_mul(factor, b, p),
                    c: mod_mul(factor, c, p),
                    cosets: [
                        ((3 * j * i as u64) % ell) as usize,
                        (((3 * j + 1) * i as u64) % ell) as usize,
                        (((3 * j + 2) * i as u64) % ell) as usize,
                    ],
                };
                triple.check(p);
                triples.push(triple);
                factor = mod_mul(factor, t3, p);
            }
            return Ok(Some(triples));
        }
    }
    Ok(None)
}

/// Result of the fallback backtracking search.
#[derive(Debug, Clone)]
pub struct TripleSearch {
    pub triples: Vec<Triple>,
    /// Reached the full `floor(ell/3)` target.
    pub complete: bool,
    /// Ran out of node budget before the search space was exhausted, so a
    /// short result does not prove nonexistence.
    pub exhausted: bool,
    pub nodes: u64,
}

/// Backtracking search for up to `floor(ell/3)` triples in pairwise-disjoint
/// cosets, used only when no generator coset has a witness. Candidate coset
/// 3-sets are enumerated in lexicographic order, so results are
/// deterministic; `limit` bounds node expansions.
pub fn find_triples_general(ctx: &GroupContext, limit: u64) -> Result<TripleSearch, Error> {
    if ctx.big_o < 3 {
        return Err(Error::NoNonequiBudget {
            p: ctx.modulus(),
            big_o: ctx.big_o,
        });
    }
    let p = ctx.modulus();
    let ell = ctx.ell as usize;
    let target = ell / 3;

    // Admissible unordered coset 3-sets, each with its smallest witness.
    // Since -1 is in L, admissibility is permutation-invariant, so testing
    // a + b = c with a in the u-coset and b in the v-coset suffices.
    let mut candidates: Vec<Triple> = Vec::new();
    for u in 0..ell {
        let u_members = ctx.coset_members(u)?;
        for v in u + 1..ell {
            let v_members = ctx.coset_members(v)?;
            for w in v + 1..ell {
                let w_fp = ctx.coset_fingerprint(w)?;
                let mut found: Option<Triple> = None;
                'search: for &a in &u_members {
                    for &b in &v_members {
                        let c = (a + b) % p;
                        if c != 0 && mod_pow(c, ctx.subgroup_order, p) == w_fp {
                            found = Some(Triple {
                                a,
                                b,
                                c,
                                cosets: [u, v, w],
                            });
                            break 'search;
                        }
                    }
                }
                if let Some(t) = found {
                    t.check(p);
                    candidates.push(t);
                }
            }
        }
    }

    let mut best: Vec<Triple> = Vec::new();
    let mut chosen: Vec<Triple> = Vec::new();
    let mut used = vec![false; ell];
    let mut nodes = 0u64;
    let mut exhausted = false;
    search(
        &candidates,
        0,
        target,
        &mut used,
        &mut chosen,
        &mut best,
        &mut nodes,
        limit,
        &mut exhausted,
    );
    let complete = best.len() == target;
    Ok(TripleSearch {
        triples: best,
        complete,
        exhausted,
        nodes,
    })
}

#[allow(clippy::too_many_arguments)]
fn search(
    candidates: &[Triple],
    from: usize,
    target: usize,
    used: &mut Vec<bool>,
    chosen: &mut Vec<Triple>,
    best: &mut Vec<Triple>,
    nodes: &mut u64,
    limit: u64,
    exhausted: &mut bool,
) -> bool {
    if chosen.len() > best.len() {
        *best = chosen.clone();
    }
    if best.len() == target {
        return true;
    }
    if *nodes >= limit {
        *exhausted = true;
        return true;
    }
    for (idx, t) in candidates.iter().enumerate().skip(from) {
        if t.cosets.iter().any(|&c| used[c]) {
            continue;
        }
        *nodes += 1;
        for &c in &t.cosets {
            used[c] = true;
        }
        chosen.push(*t);
        let stop = search(
            candidates, idx + 1, target, used, chosen, best, nodes, limit, exhausted,
        );
        chosen.pop();
        for &c in &t.cosets {
            used[c] = false;
        }
        if stop {
            return true;
        }
    }
    false
}

/// Builds the code for `p` with the default fallback search budget.
pub fn construct(p: u64) -> Result<Code, Error> {
    construct_with_limit(p, DEFAULT_SEARCH_LIMIT)
}

/// Deterministic construction: nonequi codewords from triples (when
/// `O(p) >= 3`), then a maximum equi-difference packing of every coset,
/// avoiding the classes the triples consumed. The result always verifies;
/// it is flagged optimal exactly when it meets the upper bound.
pub fn construct_with_limit(p: u64, limit: u64) -> Result<Code, Error> {
    let ctx = GroupContext::new(p)?;
    let me = m_e(&ctx);
    let ub = upper_bound(&ctx);

    let mut generator_coset = None;
    let triples: Vec<Triple> = if ctx.big_o >= 3 {
        match find_generator_triples(&ctx)? {
            Some(ts) => {
                generator_coset = Some(ts[0].cosets[1]); // index i of the witness coset
                ts
            }
            None => find_triples_general(&ctx, limit)?.triples,
        }
    } else {
        Vec::new()
    };

    let mut forbidden: BTreeMap<CosetIndex, Residue> = BTreeMap::new();
    let mut codewords = Vec::new();
    for t in &triples {
        for (x, coset) in [(t.a, t.cosets[0]), (t.b, t.cosets[1]), (t.c, t.cosets[2])] {
            let prev = forbidden.insert(coset, class_rep(x, p));
            debug_assert!(prev.is_none(), "coset {coset} forbidden twice");
        }
        codewords.push(Codeword::new(p, [0, t.a, t.c])?);
    }
    let nonequi = codewords.len();

    for i in 0..ctx.ell as usize {
        let cycle = doubling_cycle(&ctx, i)?;
        codewords.extend(equi_pack(&cycle, forbidden.get(&i).copied())?);
    }
    let equi = codewords.len() - nonequi;
    debug_assert_eq!(equi as u64, me);

    let size = codewords.len() as u64;
    let code = Code {
        p,
        codewords,
        meta: CodeMeta {
            equi,
            nonequi,
            m_e: me,
            upper_bound: ub,
            optimal: size == ub,
            primitive_root: ctx.primitive_root,
            order_of_2: ctx.order_of_2,
            ell: ctx.ell,
            big_o: ctx.big_o,
            generator_coset,
        },
    };
    match verify(&code)? {
        Verification::Ok => Ok(code),
        Verification::Conflict(c) => Err(Error::InvariantViolation(format!(
            "constructed code for p = {p} conflicts: codewords {} and {} share difference {}",
            c.first, c.second, c.difference
        ))),
    }
}
