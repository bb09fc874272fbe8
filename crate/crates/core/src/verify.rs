//! Cross-oracle verification suite. Each criterion compares an
//! implementation against an independent computation over an exhaustive
//! range and reports the number of comparisons made.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{binomial, choose2, qfact, LaurentQ};
use crate::blockan::{
    cartan_entry, cartan_oracle, end_dim, graded_cartan, h_count, normalize_tdual, recover_invariants, verma_mult,
    FormulaOracle,
};
use crate::center::{e_super, hc_series_coeff, in_i, in_j, is_row_symmetric, random_symmetric};
use crate::characters::{ch_simple_w, ch_verma_w, char_dimension, decompose_char, verma_char_trunc, BoxOrder};
use crate::combinat::{linkage_closure, BlockKey, Composition, MoveSet, Pyramid, Tableau, Window};
use crate::qcanon::{
    all_keys, all_weights, d_basis, dual_canonical, is_antidominant, pairing, pairing_canonical, pairing_formula,
    parse_signs, project_to_s, tmn_signs, weight_basis, BasisKind, TensorVec,
};
use crate::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Quick,
    Full,
}

impl std::str::FromStr for Profile {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            _ => invalid(format!("unknown profile {s:?}")),
        }
    }
}

pub const CRITERIA: [(u32, &str); 12] = [
    (1, "cartan closed form vs BGG sum"),
    (2, "graded cartan at q=1"),
    (3, "canonical pairing vs closed form vs graded cartan"),
    (4, "verma character decomposition"),
    (5, "verma character order independence"),
    (6, "h laws"),
    (7, "top degree and generic diagonal"),
    (8, "linkage classes vs weight fibers"),
    (9, "center images"),
    (10, "invariant recovery round trip"),
    (11, "canonical basis unit checks"),
    (12, "gl(1|1) sanity"),
];

/// Rank used for one closed-form vs canonical-basis comparison, with the
/// smallest rank at which the closed form had stopped changing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableRecord {
    pub block: String,
    pub lambda: String,
    pub kappa: String,
    pub rank: usize,
    pub stable_rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub checks: u64,
    pub millis: u128,
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stable: Vec<StableRecord>,
    /// Cases left out because the value still moved between ranks N and N+1.
    #[serde(skip_serializing_if = "is_zero")]
    pub gated_out: u64,
}

fn is_zero(v: &u64) -> bool {
    *v == 0
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub profile: Profile,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

/// Options for a run. `inject` perturbs the implementation side of one
/// criterion so that harness self-tests can confirm it is detected.
#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub profile: Profile,
    pub inject: Option<u32>,
}

/// Accumulates checks and failure messages for one criterion.
#[derive(Default)]
struct Tally {
    checks: u64,
    failures: Vec<String>,
    stable: Vec<StableRecord>,
    gated: u64,
}

const MAX_FAILURES: usize = 20;

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < MAX_FAILURES {
            self.failures.push(msg());
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        for f in other.failures {
            if self.failures.len() < MAX_FAILURES {
                self.failures.push(f);
            }
        }
        self.stable.extend(other.stable);
        self.gated += other.gated;
    }

    fn merge_all(parts: impl IntoIterator<Item = Tally>) -> Tally {
        let mut out = Tally::default();
        for p in parts {
            out.merge(p);
        }
        out
    }
}

struct Ctx {
    full: bool,
    bump: bool,
}

impl Ctx {
    fn int(&self, v: BigInt) -> BigInt {
        if self.bump {
            v + 1
        } else {
            v
        }
    }

    fn lq(&self, v: LaurentQ) -> LaurentQ {
        if self.bump {
            &v + &LaurentQ::one()
        } else {
            v
        }
    }

    fn flag(&self, v: bool) -> bool {
        v != self.bump
    }
}

pub fn run(opts: Options) -> Report {
    run_selected(opts, &CRITERIA.iter().map(|c| c.0).collect::<Vec<_>>())
}

pub fn run_selected(opts: Options, ids: &[u32]) -> Report {
    let criteria: Vec<CriterionReport> = ids.iter().map(|&id| run_one(opts, id)).collect();
    Report {
        profile: opts.profile,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

pub fn run_one(opts: Options, id: u32) -> CriterionReport {
    let ctx = Ctx {
        full: opts.profile == Profile::Full,
        bump: opts.inject == Some(id),
    };
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1.to_string())
        .unwrap_or_else(|| format!("unknown criterion {id}"));
    let start = Instant::now();
    let res = match id {
        1 => c1(&ctx),
        2 => c2(&ctx),
        3 => c3(&ctx),
        4 => c4(&ctx),
        5 => c5(&ctx),
        6 => c6(&ctx),
        7 => c7(&ctx),
        8 => c8(&ctx),
        9 => c9(&ctx),
        10 => c10(&ctx),
        11 => c11(&ctx),
        12 => c12(&ctx),
        _ => invalid(format!("unknown criterion {id}")),
    };
    let millis = start.elapsed().as_millis();
    let tally = res.unwrap_or_else(|e| Tally {
        checks: 0,
        failures: vec![format!("error: {e}")],
        stable: vec![],
        gated: 0,
    });
    CriterionReport {
        id,
        name,
        passed: tally.failures.is_empty() && tally.checks > 0,
        checks: tally.checks,
        millis,
        failures: tally.failures,
        stable: tally.stable,
        gated_out: tally.gated,
    }
}

/// Blocks for gl(m|n), `m <= n <= max_n`, with `gamma` supported in `lo..=hi`.
fn blocks(max_n: usize, lo: i64, hi: i64, max_t: u64) -> Vec<BlockKey> {
    let mut out = Vec::new();
    for n in 0..=max_n {
        for m in 0..=n {
            out.extend(BlockKey::all_in(m, n, lo, hi).into_iter().filter(|k| k.t <= max_t));
        }
    }
    out
}

fn par_blocks(keys: &[BlockKey], f: impl Fn(&BlockKey) -> Result<Tally> + Sync + Send) -> Result<Tally> {
    let parts: Vec<Tally> = keys.par_iter().map(f).collect::<Result<_>>()?;
    Ok(Tally::merge_all(parts))
}

fn range_1(ctx: &Ctx) -> Vec<BlockKey> {
    blocks(if ctx.full { 3 } else { 2 }, 0, 2, 3)
}

fn c1(ctx: &Ctx) -> Result<Tally> {
    par_blocks(&range_1(ctx), |xi| {
        let mut t = Tally::default();
        let labels = Composition::all_in(xi.t, -1, 2);
        for lam in &labels {
            for kap in &labels {
                let a = ctx.int(cartan_entry(xi, lam, kap)?);
                let b = cartan_oracle(xi, lam, kap)?;
                t.check(a == b, || format!("{xi} lambda={lam} kappa={kap}: {a} vs {b}"));
            }
        }
        Ok(t)
    })
}

fn c2(ctx: &Ctx) -> Result<Tally> {
    par_blocks(&range_1(ctx), |xi| {
        let mut t = Tally::default();
        let labels = Composition::all_in(xi.t, -1, 2);
        for lam in &labels {
            for kap in &labels {
                let a = ctx.int(graded_cartan(xi, lam, kap)?.eval1());
                let b = cartan_entry(xi, lam, kap)?;
                t.check(a == b, || format!("{xi} lambda={lam} kappa={kap}: {a} vs {b}"));
            }
        }
        Ok(t)
    })
}

fn within(c: &Composition, lo: i64, hi: i64) -> bool {
    c.support().is_none_or(|(a, b)| a >= lo && b <= hi)
}

fn c3(ctx: &Ctx) -> Result<Tally> {
    let max_rank = if ctx.full { 4 } else { 3 };
    let mut cases = Vec::new();
    for rank in 1..=max_rank {
        for xi in blocks(2, 1, rank as i64, 2) {
            cases.push((rank, xi));
        }
    }
    let mut out = par_blocks_ranked(&cases, |rank, xi| {
        let mut t = Tally::default();
        let labels = Composition::all_in(xi.t, 1, rank as i64);
        for lam in &labels {
            for kap in &labels {
                let closed = pairing_formula(xi, kap, lam, rank)?;
                let basis = ctx.lq(pairing_canonical(xi, kap, lam, rank, None)?);
                t.check(closed == basis, || format!("N={rank} {xi} kappa={kap} lambda={lam}: {closed} vs {basis}"));
                // the rank-independent value only applies once the data sit
                // strictly inside 1..=N and the closed form has stopped moving
                let inner = |c: &Composition| within(c, 2, rank as i64 - 1);
                if [&xi.mu, &xi.nu, lam, kap].into_iter().all(inner) {
                    let mut stable_rank = None;
                    for r in (1..=rank).rev() {
                        if ![&xi.mu, &xi.nu, lam, kap].into_iter().all(|c| within(c, 1, r as i64)) {
                            break;
                        }
                        if pairing_formula(xi, kap, lam, r)? == closed {
                            stable_rank = Some(r);
                        } else {
                            break;
                        }
                    }
                    if pairing_formula(xi, kap, lam, rank + 1)? != closed {
                        t.gated += 1;
                        continue;
                    }
                    let graded = graded_cartan(xi, lam, kap)?;
                    t.check(graded == basis, || format!("N={rank} {xi} kappa={kap} lambda={lam}: graded {graded} vs {basis}"));
                    t.stable.push(StableRecord {
                        block: xi.short(),
                        lambda: lam.short(),
                        kappa: kap.short(),
                        rank,
                        stable_rank: stable_rank.unwrap_or(rank),
                    });
                }
            }
        }
        Ok(t)
    })?;
    if out.stable.is_empty() {
        out.failures.push("no case passed the stability gate".into());
    }
    out.stable.sort_by(|a, b| (a.rank, &a.block, &a.lambda, &a.kappa).cmp(&(b.rank, &b.block, &b.lambda, &b.kappa)));
    Ok(out)
}

fn par_blocks_ranked(cases: &[(usize, BlockKey)], f: impl Fn(usize, &BlockKey) -> Result<Tally> + Sync + Send) -> Result<Tally> {
    let parts: Vec<Tally> = cases.par_iter().map(|(r, xi)| f(*r, xi)).collect::<Result<_>>()?;
    Ok(Tally::merge_all(parts))
}

fn lq(terms: &[(i64, i64)]) -> LaurentQ {
    LaurentQ::from_terms(terms.iter().map(|&(e, c)| (e, BigInt::from(c))))
}

fn pow2(k: usize) -> BigInt {
    BigInt::one() << k
}

fn c4(ctx: &Ctx) -> Result<Tally> {
    par_blocks(&range_1(ctx), |xi| {
        let mut t = Tally::default();
        for lam in Composition::all_in(xi.t, -1, 2) {
            let verma = ch_verma_w(xi, &lam)?;
            let simple = ch_simple_w(xi, &lam)?;
            let dv = ctx.int(char_dimension(&verma));
            t.check(dv == pow2(xi.m), || format!("{xi} {lam}: dim verma {dv}"));
            let ds = char_dimension(&simple);
            t.check(ds == pow2(xi.m - xi.t as usize), || format!("{xi} {lam}: dim simple {ds}"));
            let dec = decompose_char(&verma, xi)?;
            let total: u64 = dec.values().sum();
            t.check(BigInt::from(total) == pow2(xi.t as usize), || format!("{xi} {lam}: length {total}"));
            for (kap, mult) in &dec {
                let expect = verma_mult(&lam, kap)?;
                t.check(*mult == expect, || format!("{xi} {lam} -> {kap}: {mult} vs {expect}"));
            }
        }
        Ok(t)
    })
}

fn c5(ctx: &Ctx) -> Result<Tally> {
    let p = Pyramid::left(2, 2)?;
    let degree = if ctx.full { 4 } else { 2 };
    let natural = BoxOrder::natural(&p);
    let other = BoxOrder::column_major(&p);
    let tabs = Tableau::enumerate(p, Window::new(1, 3)?);
    let parts: Vec<Tally> = tabs
        .par_iter()
        .map(|a| {
            let mut t = Tally::default();
            let x = verma_char_trunc(&p, &natural, a, degree)?;
            let y = verma_char_trunc(&p, &other, a, degree)?;
            t.check(ctx.flag(x == y), || format!("{a}: orders disagree"));
            Ok(t)
        })
        .collect::<Result<_>>()?;
    Ok(Tally::merge_all(parts))
}

/// Composition with the parts of `c` outside `lo..=hi` set to zero.
fn restrict(c: &Composition, lo: i64, hi: i64) -> Composition {
    Composition::from_values(c.iter().filter(|(i, _)| *i >= lo && *i <= hi))
}

fn c6(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let h1 = ctx.int(h_count(&Composition::eps(0, 1)));
    t.check(h1 == BigInt::from(3), || format!("h(1) = {h1}"));
    for k in 1..=6u64 {
        let h = h_count(&Composition::eps(0, k));
        let c = binomial(k as i64 + 2, 2);
        t.check(h == c, || format!("h({k}) = {h}, expected {c}"));
    }
    let max_t = if ctx.full { 4 } else { 3 };
    for k in 1..=max_t {
        let c = binomial(k as i64 + 2, 2);
        for lam in Composition::all_in(k, 0, 2) {
            if lam.iter().count() > 1 {
                let h = h_count(&lam);
                t.check(h > c, || format!("h({lam}) = {h} not above {c}"));
            }
        }
        for lam in Composition::all_in(k, 0, 3) {
            let (lo, hi) = lam.support().unwrap();
            for j in lo + 1..hi {
                if lam.get(j) == 0 {
                    let lhs = h_count(&lam);
                    let rhs = h_count(&restrict(&lam, i64::MIN, j)) * h_count(&restrict(&lam, j, i64::MAX));
                    t.check(lhs == rhs, || format!("separation at {j} for {lam}: {lhs} vs {rhs}"));
                }
            }
        }
    }
    let rows = par_blocks(&blocks(if ctx.full { 3 } else { 2 }, 0, 1, 3), |xi| {
        let mut t = Tally::default();
        for lam in Composition::all_in(xi.t, 0, 2) {
            let (lo, hi) = lam.support().unwrap_or((0, 0));
            let mut count = 0u64;
            for kap in Composition::all_in(xi.t, lo - 1, hi + 1) {
                if !cartan_entry(xi, &lam, &kap)?.is_zero() {
                    count += 1;
                }
            }
            let h = h_count(&lam);
            t.check(h == BigInt::from(count), || format!("{xi} {lam}: h = {h}, row support {count}"));
        }
        Ok(t)
    })?;
    t.merge(rows);
    Ok(t)
}

fn c7(ctx: &Ctx) -> Result<Tally> {
    par_blocks(&range_1(ctx), |xi| {
        let mut t = Tally::default();
        let gamma = xi.gamma();
        let (m, n) = (xi.m as i64, xi.n as i64);
        let gsq: i64 = gamma.iter().map(|(_, g)| (g * g) as i64).sum();
        let top = m * m + n * n - gsq;
        for lam in Composition::all_in(xi.t, -1, 2) {
            let g = ctx.lq(graded_cartan(xi, &lam, &lam)?);
            let max = g.max_degree();
            t.check(max == Some(top) && g.coeff(top) == BigInt::one(), || format!("{xi} {lam}: top of {g} vs degree {top}"));
            let generic = lam
                .iter()
                .all(|(i, v)| v == 0 || v as i64 + lam.get(i + 1) as i64 + gamma.get(i) as i64 + gamma.get(i + 1) as i64 == 1);
            if generic {
                let mut num = &qfact(xi.m as u64) * &qfact(xi.n as u64);
                let one_q2 = lq(&[(0, 1), (2, 1)]);
                num = &num * &one_q2.pow(xi.t as u32);
                let mut den = LaurentQ::one();
                let mut e = choose2(m) + choose2(n);
                for (_, v) in gamma.iter() {
                    den = &den * &qfact(v);
                    e -= choose2(v as i64);
                }
                let expect = num.div_exact(&den)?.shift(e);
                t.check(g == expect, || format!("{xi} generic {lam}: {g} vs {expect}"));
            }
        }
        Ok(t)
    })
}

/// Partition of `items` into classes, as a set of sorted member lists.
fn partition_by<K: Ord>(items: &[Tableau], key: impl Fn(&Tableau) -> K) -> BTreeSet<Vec<Tableau>> {
    let mut classes: BTreeMap<K, Vec<Tableau>> = BTreeMap::new();
    for a in items {
        classes.entry(key(a)).or_default().push(a.clone());
    }
    classes
        .into_values()
        .map(|mut v| {
            v.sort();
            v
        })
        .collect()
}

fn c8(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let hi = if ctx.full { 4 } else { 3 };
    let w = Window::new(1, hi)?;
    for n in 1..=2 {
        for m in 0..=n {
            for s_minus in 0..=n - m {
                let p = Pyramid::new(m, n, s_minus)?;
                let tabs = Tableau::enumerate(p, w);
                let by_key = partition_by(&tabs, |a| a.block_key());
                let by_weight = partition_by(&tabs, |a| a.weight_of());
                let mut by_closure: BTreeSet<Vec<Tableau>> = BTreeSet::new();
                let mut seen: BTreeSet<Tableau> = BTreeSet::new();
                for a in &tabs {
                    if seen.contains(a) {
                        continue;
                    }
                    let cls = linkage_closure(a, w);
                    seen.extend(cls.iter().cloned());
                    by_closure.insert(cls.into_iter().collect());
                }
                let key_ok = ctx.flag(by_key == by_closure);
                t.check(key_ok, || format!("{m}|{n} s-={s_minus}: block keys differ from linkage closure"));
                t.check(by_weight == by_closure, || format!("{m}|{n} s-={s_minus}: weights differ from linkage closure"));
            }
        }
    }
    Ok(t)
}

fn c9(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let max_r = if ctx.full { 6 } else { 4 };
    for n in 0..=3 {
        for m in 0..=n {
            for r in 1..=max_r {
                let e = e_super(r, m, n)?;
                t.check(ctx.flag(in_i(&e)), || format!("e_{r} for {m}|{n} not in I"));
                let s = hc_series_coeff(r, m, n)?;
                t.check(s == e, || format!("series coefficient {r} for {m}|{n}"));
            }
        }
    }
    let samples = if ctx.full { 200 } else { 50 };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..samples {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(m..=3);
        let f = random_symmetric(&mut rng, m, n);
        let s_minus = rng.gen_range(0..=n - m);
        let a = in_i(&f);
        let b = is_row_symmetric(&f) && in_j(&f, s_minus)?;
        t.check(a == b, || format!("sample {k} ({m}|{n}, s-={s_minus}): I={a}, sym and J={b}"));
    }
    Ok(t)
}

fn c10(ctx: &Ctx) -> Result<Tally> {
    let keys: Vec<BlockKey> = blocks(if ctx.full { 3 } else { 2 }, 0, 1, 3).into_iter().filter(|k| k.t >= 1).collect();
    let mut t = par_blocks(&keys, |xi| {
        let mut t = Tally::default();
        let oracle = FormulaOracle::new(xi.clone(), -2, 3);
        let got = recover_invariants(&oracle)?;
        let (rt, rg) = (if ctx.bump { got.0 + 1 } else { got.0 }, got.1);
        let expect = normalize_tdual(&xi.gamma());
        t.check(rt == xi.t && rg == expect, || format!("{xi}: recovered t={rt} gamma={rg}, expected {expect}"));
        Ok(t)
    })?;
    for xi in &keys {
        let sig = xi.invariant_signature();
        for k in xi.closure(MoveSet::Derived, 4) {
            let s2 = k.invariant_signature();
            t.check(s2 == sig, || format!("{xi} -> {k}: signature changed"));
        }
    }
    Ok(t)
}

fn c11(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let signs = parse_signs("+-")?;
    let b11 = dual_canonical(2, &signs, &[1, 1], None)?;
    t.check(b11 == TensorVec::basis(2, signs.clone(), vec![1, 1])?, || format!("b*(1;1) = {b11}"));
    let b22 = dual_canonical(2, &signs, &[2, 2], None)?;
    let mut expect = TensorVec::basis(2, signs.clone(), vec![2, 2])?;
    expect.add_term(vec![1, 1], &ctx.lq(lq(&[(1, -1)])));
    t.check(b22 == expect, || format!("b*(2;2) = {b22}"));

    let max_rank = if ctx.full { 3 } else { 2 };
    let mut cases = Vec::new();
    for rank in 1..=max_rank {
        for m in 0..=2 {
            for n in 0..=2 {
                if m + n > 0 {
                    cases.push((rank, m, n));
                }
            }
        }
    }
    let parts: Vec<Tally> = cases
        .par_iter()
        .map(|&(rank, m, n)| {
            let mut t = Tally::default();
            let signs = tmn_signs(m, n);
            for key in all_keys(rank, m + n) {
                let b = dual_canonical(rank, &signs, &key, None)?;
                let p = project_to_s(&b)?;
                let (top, bottom) = (&key[..m], &key[m..]);
                if is_antidominant(top, bottom) {
                    let d = d_basis(top, bottom)?;
                    t.check(p == d, || format!("N={rank} {m}|{n} {key:?}: projection is not d"));
                } else {
                    t.check(p.is_zero(), || format!("N={rank} {m}|{n} {key:?}: projection nonzero"));
                }
            }
            for w in all_weights(rank, &signs) {
                let bs = weight_basis(rank, &signs, &w, BasisKind::Canonical, None)?;
                let ds = weight_basis(rank, &signs, &w, BasisKind::DualCanonical, None)?;
                for (ka, va) in bs.iter() {
                    for (kb, vb) in ds.iter() {
                        let want = if ka == kb { LaurentQ::one() } else { LaurentQ::zero() };
                        let got = pairing(va, vb)?;
                        t.check(got == want, || format!("N={rank} {m}|{n} ({ka:?}, {kb:?}) = {got}"));
                    }
                }
            }
            Ok(t)
        })
        .collect::<Result<_>>()?;
    t.merge(Tally::merge_all(parts));
    Ok(t)
}

fn c12(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let zero = Composition::zero();
    for s in ["mu=0:1;nu=1:1;t=0", "mu=2:1;nu=0:1;t=0"] {
        let xi = BlockKey::parse(s, 1, 1)?;
        let c = ctx.int(cartan_entry(&xi, &zero, &zero)?);
        t.check(c == BigInt::one(), || format!("{s}: Cartan entry {c}"));
        let g = graded_cartan(&xi, &zero, &zero)?;
        t.check(g == LaurentQ::one(), || format!("{s}: graded {g}"));
    }
    let xi = BlockKey::parse("mu=0;nu=0;t=1", 1, 1)?;
    for i in -3..=3i64 {
        for j in -3..=3i64 {
            let g = graded_cartan(&xi, &Composition::eps(i, 1), &Composition::eps(j, 1))?;
            let want = match (i - j).abs() {
                0 => lq(&[(0, 1), (2, 1)]),
                1 => LaurentQ::q(),
                _ => LaurentQ::zero(),
            };
            t.check(g == want, || format!("({i},{j}): {g}"));
        }
        let e = end_dim(&xi, i)?;
        t.check(e == BigInt::from(2), || format!("end_dim({i}) = {e}"));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_criteria_pass_on_quick_profile() {
        let r = run_selected(Options { profile: Profile::Quick, inject: None }, &[5, 6, 12]);
        for c in &r.criteria {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn injected_fault_is_isolated() {
        let opts = Options { profile: Profile::Quick, inject: Some(12) };
        let r = run_selected(opts, &[6, 12]);
        assert!(r.criteria[0].passed);
        assert!(!r.criteria[1].passed);
        assert!(!r.passed);
    }

    #[test]
    fn profile_parsing() {
        assert_eq!("quick".parse::<Profile>().unwrap(), Profile::Quick);
        assert!("medium".parse::<Profile>().is_err());
    }
}
