//! Formal characters: truncated Verma characters on the Lie superalgebra side
//! and composition-indexed characters on the W-algebra side.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::binomial;
use crate::combinat::{BlockKey, Composition, Pyramid, Tableau};
use crate::{invalid, Error, Result};

/// Total order on boxes `1..=m+n`, given as the boxes listed in increasing
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxOrder {
    seq: Vec<usize>,
    pos: Vec<usize>,
}

impl BoxOrder {
    pub fn from_seq(seq: Vec<usize>) -> Result<Self> {
        let k = seq.len();
        let mut pos = vec![usize::MAX; k + 1];
        for (r, &b) in seq.iter().enumerate() {
            if b == 0 || b > k || pos[b] != usize::MAX {
                return invalid(format!("{seq:?} is not an ordering of 1..={k}"));
            }
            pos[b] = r;
        }
        Ok(Self { seq, pos })
    }

    /// Row-major order `1 < 2 < ... < m+n`.
    pub fn natural(p: &Pyramid) -> Self {
        Self::from_seq((1..=p.boxes()).collect()).expect("identity is an ordering")
    }

    /// Column-major order: by column, then top row before bottom row.
    pub fn column_major(p: &Pyramid) -> Self {
        let mut seq: Vec<usize> = (1..=p.boxes()).collect();
        seq.sort_by_key(|&b| (p.col(b).unwrap(), p.row(b).unwrap()));
        Self::from_seq(seq).unwrap()
    }

    pub fn less(&self, i: usize, j: usize) -> bool {
        self.pos[i] < self.pos[j]
    }

    pub fn seq(&self) -> &[usize] {
        &self.seq
    }

    /// Normal orders keep each row in its natural order.
    pub fn is_normal(&self, p: &Pyramid) -> bool {
        let row_sorted = |r: std::ops::RangeInclusive<usize>| {
            let v: Vec<usize> = r.collect();
            v.windows(2).all(|w| self.less(w[0], w[1]))
        };
        self.seq.len() == p.boxes() && row_sorted(1..=p.m) && row_sorted(p.m + 1..=p.boxes())
    }
}

fn is_odd(p: &Pyramid, j: usize) -> bool {
    j > p.m
}

/// Weight in `t^*`, stored by its coordinates in the basis `delta_1..delta_{m+n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    /// `(w, delta_j)` under the form with `(delta_j, delta_j) = (-1)^{|j|}`.
    pub fn pairing(&self, p: &Pyramid, j: usize) -> i64 {
        let c = self.0[j - 1];
        if is_odd(p, j) {
            -c
        } else {
            c
        }
    }

    fn from_pairings(p: &Pyramid, pairings: &[i64]) -> Self {
        Weight(
            pairings
                .iter()
                .enumerate()
                .map(|(k, &v)| if is_odd(p, k + 1) { -v } else { v })
                .collect(),
        )
    }

    /// `f(w) = sum_j j * w_j`; increases by `l - k` on `delta_l - delta_k`.
    fn level(&self) -> i64 {
        self.0.iter().enumerate().map(|(k, &c)| (k as i64 + 1) * c).sum()
    }
}

/// The values `(rho, delta_j)` for `j = 1..=m+n`.
pub fn rho_order(p: &Pyramid, order: &BoxOrder) -> Vec<i64> {
    (1..=p.boxes())
        .map(|j| {
            let odd = (1..=p.boxes())
                .filter(|&i| is_odd(p, i) && (i == j || order.less(i, j)))
                .count() as i64;
            let even = (1..=p.boxes())
                .filter(|&i| !is_odd(p, i) && order.less(i, j))
                .count() as i64;
            odd - even
        })
        .collect()
}

/// The highest weight `lambda` with `(lambda + rho, delta_j)` equal to the
/// entry in box `j`.
pub fn tableau_weight(p: &Pyramid, order: &BoxOrder, a: &Tableau) -> Weight {
    let rho = rho_order(p, order);
    let pairings: Vec<i64> = (1..=p.boxes()).map(|j| a.entry(j) - rho[j - 1]).collect();
    Weight::from_pairings(p, &pairings)
}

/// Parity attached to a weight: `(w, delta_{m+1} + ... + delta_{m+n})`
/// shifted by `ceil((n-m)/2) + m s_-`, modulo 2.
pub fn parity_of(p: &Pyramid, w: &Weight) -> u8 {
    let s: i64 = (p.m + 1..=p.boxes()).map(|j| w.pairing(p, j)).sum();
    let shift = ((p.n - p.m).div_ceil(2) + p.m * p.s_minus) as i64;
    (s + shift).rem_euclid(2) as u8
}

/// Truncated formal character: weight -> multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightChar {
    pub degree: u32,
    pub terms: BTreeMap<Weight, BigInt>,
}

/// Character of the Verma module attached to `a` and a normal `order`, cut off
/// at height `degree` above the natural-order highest weight. Height is the
/// natural simple-root height, so truncations for different orders agree.
pub fn verma_char_trunc(p: &Pyramid, order: &BoxOrder, a: &Tableau, degree: u32) -> Result<WeightChar> {
    if !order.is_normal(p) {
        return invalid("verma characters need a normal order");
    }
    let k = p.boxes();
    let base = tableau_weight(p, order, a);
    let reference = tableau_weight(p, &BoxOrder::natural(p), a).level();
    let budget = degree as i64;

    let mut odd_roots = Vec::new();
    let mut even_roots = Vec::new();
    for kk in 1..=k {
        for l in 1..=k {
            if order.less(kk, l) {
                if is_odd(p, kk) != is_odd(p, l) {
                    odd_roots.push((kk, l));
                } else {
                    even_roots.push((kk, l));
                }
            }
        }
    }

    let mut terms: BTreeMap<Weight, BigInt> = BTreeMap::new();
    for mask in 0u64..(1u64 << odd_roots.len()) {
        let mut w = base.0.clone();
        for (r, &(kk, l)) in odd_roots.iter().enumerate() {
            if mask >> r & 1 == 1 {
                w[l - 1] += 1;
                w[kk - 1] -= 1;
            }
        }
        let ht = Weight(w.clone()).level() - reference;
        if ht > budget {
            // even roots only raise the height further
            continue;
        }
        expand_even(&even_roots, 0, &mut w, budget - ht, &mut terms);
    }
    terms.retain(|_, v| !v.is_zero());
    Ok(WeightChar { degree, terms })
}

fn expand_even(
    roots: &[(usize, usize)],
    idx: usize,
    w: &mut Vec<i64>,
    budget: i64,
    out: &mut BTreeMap<Weight, BigInt>,
) {
    if idx == roots.len() {
        *out.entry(Weight(w.clone())).or_insert_with(BigInt::zero) += 1;
        return;
    }
    let (k, l) = roots[idx];
    let step = l as i64 - k as i64;
    debug_assert!(step > 0);
    let mut used = 0;
    loop {
        expand_even(roots, idx + 1, w, budget - used * step, out);
        if (used + 1) * step > budget {
            break;
        }
        used += 1;
        w[l - 1] += 1;
        w[k - 1] -= 1;
    }
    w[l - 1] -= used;
    w[k - 1] += used;
}

/// Character indexed by compositions of `m`.
pub type CompChar = BTreeMap<Composition, BigInt>;

/// `chi^{base} * prod_i (1 + chi^{alpha_i})^{e_i}`.
fn expand_product(base: &Composition, exps: &[(i64, u64)]) -> CompChar {
    let mut cur: CompChar = BTreeMap::from([(base.clone(), BigInt::one())]);
    for &(i, e) in exps {
        if e == 0 {
            continue;
        }
        let mut next = CompChar::new();
        for (eta, c) in &cur {
            for k in 0..=e {
                if let Some(eta2) = eta.plus_alpha(i, k) {
                    *next.entry(eta2).or_insert_with(BigInt::zero) += c * binomial(e as i64, k as i64);
                }
            }
        }
        cur = next;
    }
    cur.retain(|_, v| !v.is_zero());
    cur
}

fn check_lambda(xi: &BlockKey, lambda: &Composition) -> Result<()> {
    if lambda.total() != xi.t {
        return invalid(format!("|lambda|={} but t={}", lambda.total(), xi.t));
    }
    Ok(())
}

fn exponent_list(weights: &Composition) -> Vec<(i64, u64)> {
    weights.iter().map(|(j, v)| (j - 1, v)).collect()
}

/// `chi^{lambda+mu} prod_i (1 + chi^{alpha_i})^{lambda_{i+1} + mu_{i+1}}`.
pub fn ch_verma_w(xi: &BlockKey, lambda: &Composition) -> Result<CompChar> {
    check_lambda(xi, lambda)?;
    let top = lambda.add(&xi.mu);
    Ok(expand_product(&top, &exponent_list(&top)))
}

/// `chi^{lambda+mu} prod_i (1 + chi^{alpha_i})^{mu_{i+1}}`.
pub fn ch_simple_w(xi: &BlockKey, lambda: &Composition) -> Result<CompChar> {
    check_lambda(xi, lambda)?;
    let top = lambda.add(&xi.mu);
    Ok(expand_product(&top, &exponent_list(&xi.mu)))
}

fn level(eta: &Composition) -> i64 {
    eta.iter().map(|(j, v)| j * v as i64).sum()
}

/// Writes `c` as a sum of simple characters of the block, returning the
/// multiplicity of each label.
pub fn decompose_char(c: &CompChar, xi: &BlockKey) -> Result<BTreeMap<Composition, u64>> {
    let mut residual: CompChar = c.iter().filter(|(_, v)| !v.is_zero()).map(|(k, v)| (k.clone(), v.clone())).collect();
    let mut out = BTreeMap::new();
    while !residual.is_empty() {
        // the leading term of a simple character maximizes sum_j j * eta_j
        let eta = residual
            .keys()
            .max_by(|a, b| level(a).cmp(&level(b)).then_with(|| b.cmp(a)))
            .cloned()
            .unwrap();
        let coeff = residual[&eta].clone();
        if coeff.is_negative() {
            return Err(Error::NotInSpan(format!("negative coefficient at {eta}")));
        }
        let kappa = eta
            .checked_sub(&xi.mu)
            .filter(|k| k.total() == xi.t)
            .ok_or_else(|| Error::NotInSpan(format!("{eta} is not a leading term of the block")))?;
        for (k, v) in ch_simple_w(xi, &kappa)? {
            let slot = residual.entry(k.clone()).or_insert_with(BigInt::zero);
            *slot -= &coeff * v;
            if slot.is_zero() {
                residual.remove(&k);
            }
        }
        let mult = coeff
            .to_u64()
            .ok_or_else(|| Error::NotInSpan("multiplicity overflow".into()))?;
        *out.entry(kappa).or_insert(0) += mult;
    }
    Ok(out)
}

pub fn char_dimension(c: &CompChar) -> BigInt {
    c.values().sum()
}

fn elementary(xs: &[i64]) -> Vec<BigInt> {
    let mut e = vec![BigInt::one()];
    for &x in xs {
        let mut next = vec![BigInt::zero(); e.len() + 1];
        for (r, v) in e.iter().enumerate() {
            next[r] += v;
            next[r + 1] += v * x;
        }
        e = next;
    }
    e
}

/// Elementary symmetric values `e_1..e_m` of the top row and `e_1..e_n` of
/// the bottom row.
pub fn hw_scalars(a: &Tableau) -> (Vec<BigInt>, Vec<BigInt>) {
    (elementary(&a.top)[1..].to_vec(), elementary(&a.bottom)[1..].to_vec())
}

/// JSON list of `{composition, coefficient}` pairs in key order.
pub fn comp_char_json(c: &CompChar) -> serde_json::Value {
    serde_json::Value::Array(
        c.iter()
            .map(|(k, v)| {
                serde_json::json!({
                    "composition": k,
                    "coefficient": v.to_string(),
                })
            })
            .collect(),
    )
}
