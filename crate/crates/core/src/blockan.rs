//! Numerical block invariants: Verma multiplicities, Cartan and graded Cartan
//! entries, the counting function `h`, endomorphism dimensions, and recovery
//! of `(t, gamma)` from abstract Cartan data.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{binomial, choose2, factorial, qbinom, LaurentQ};
use crate::combinat::{BlockKey, Composition};
use crate::{internal, invalid, Error, Result};

fn check_sizes(xi: &BlockKey, lambda: &Composition, kappa: &Composition) -> Result<()> {
    if lambda.total() != xi.t || kappa.total() != xi.t {
        return invalid(format!(
            "labels must be compositions of t={}, got {} and {}",
            xi.t,
            lambda.total(),
            kappa.total()
        ));
    }
    Ok(())
}

fn span(cs: &[&Composition]) -> Option<(i64, i64)> {
    cs.iter().filter_map(|c| c.support()).fold(None, |acc, (lo, hi)| match acc {
        None => Some((lo, hi)),
        Some((a, b)) => Some((a.min(lo), b.max(hi))),
    })
}

/// `[M(lambda) : L(kappa)]`: nonzero exactly when
/// `kappa = lambda + sum theta_i alpha_i` with `0 <= theta_i <= lambda_{i+1}`.
pub fn verma_mult(lambda: &Composition, kappa: &Composition) -> Result<u64> {
    if lambda.total() != kappa.total() {
        return invalid("verma_mult needs compositions of equal size");
    }
    let Some((lo, hi)) = span(&[lambda, kappa]) else {
        return Ok(1);
    };
    let mut theta: i64 = 0;
    let mut out: u64 = 1;
    for i in lo..=hi {
        theta += kappa.get(i) as i64 - lambda.get(i) as i64;
        let room = lambda.get(i + 1) as i64;
        if theta < 0 || theta > room {
            return Ok(0);
        }
        out *= binomial(room, theta).to_u64().expect("small binomial");
    }
    Ok(out)
}

/// Solves `kappa = lambda + sum (lambda_{i+1} - rho_{i+1}) alpha_i` for `rho`
/// and checks `0 <= rho_{i+1} <= lambda_{i+1} + min(lambda_i, rho_i)`.
/// Returns `rho` on `lo..=hi` when it exists.
fn solve_rho(lambda: &Composition, kappa: &Composition, lo: i64, hi: i64) -> Option<BTreeMap<i64, i64>> {
    let mut rho = BTreeMap::new();
    let mut c: i64 = 0;
    let mut prev_rho = 0i64;
    for j in lo - 1..hi {
        c += kappa.get(j) as i64 - lambda.get(j) as i64;
        let l_next = lambda.get(j + 1) as i64;
        let r = l_next - c;
        let bound = l_next + (lambda.get(j) as i64).min(prev_rho);
        if r < 0 || r > bound {
            return None;
        }
        rho.insert(j + 1, r);
        prev_rho = r;
    }
    Some(rho)
}

/// Iterates over all `tau` with
/// `max(lambda_{i+1}, rho_{i+1}) <= tau_{i+1} <= lambda_{i+1} + min(lambda_i, rho_i)`.
fn for_each_tau(lambda: &Composition, rho: &BTreeMap<i64, i64>, lo: i64, hi: i64, mut f: impl FnMut(&BTreeMap<i64, i64>)) {
    let r = |i: i64| *rho.get(&i).unwrap_or(&0);
    let l = |i: i64| lambda.get(i) as i64;
    let ranges: Vec<(i64, i64, i64)> = (lo..=hi)
        .map(|i| (i, l(i).max(r(i)), l(i) + l(i - 1).min(r(i - 1))))
        .collect();
    if ranges.iter().any(|&(_, a, b)| a > b) {
        return;
    }
    let mut tau: BTreeMap<i64, i64> = ranges.iter().map(|&(i, a, _)| (i, a)).collect();
    loop {
        f(&tau);
        let mut k = 0;
        loop {
            if k == ranges.len() {
                return;
            }
            let (i, a, b) = ranges[k];
            let v = tau.get_mut(&i).unwrap();
            if *v < b {
                *v += 1;
                break;
            }
            *v = a;
            k += 1;
        }
    }
}

struct TauSetup {
    rho: BTreeMap<i64, i64>,
    lo: i64,
    hi: i64,
    gamma: Composition,
}

fn tau_setup(xi: &BlockKey, lambda: &Composition, kappa: &Composition) -> Result<Option<TauSetup>> {
    check_sizes(xi, lambda, kappa)?;
    let gamma = xi.gamma();
    let (lo, hi) = match span(&[lambda, kappa, &gamma]) {
        Some((a, b)) => (a - 1, b + 1),
        None => (0, 0),
    };
    Ok(solve_rho(lambda, kappa, lo, hi).map(|rho| TauSetup { rho, lo, hi, gamma }))
}

/// Closed-form Cartan entry `[P(lambda) : L(kappa)]` in the block `xi`.
pub fn cartan_entry(xi: &BlockKey, lambda: &Composition, kappa: &Composition) -> Result<BigInt> {
    let Some(TauSetup { rho, lo, hi, gamma }) = tau_setup(xi, lambda, kappa)? else {
        return Ok(BigInt::zero());
    };
    let l = |i: i64| lambda.get(i) as i64;
    let r = |i: i64| *rho.get(&i).unwrap_or(&0);
    let mut sum = BigRational::zero();
    for_each_tau(lambda, &rho, lo, hi, |tau| {
        let tv = |i: i64| *tau.get(&i).unwrap_or(&0);
        let mut term = BigRational::one();
        for i in lo..=hi {
            let beta = l(i + 1) + tv(i) - tv(i + 1);
            let g = gamma.get(i) as i64;
            let num = binomial(beta, tv(i) - l(i)) * binomial(beta, tv(i) - r(i));
            if num.is_zero() {
                term = BigRational::zero();
                break;
            }
            let den = factorial(beta as u64) * factorial((beta + g) as u64);
            term *= BigRational::new(num, den);
        }
        sum += term;
    });
    let total = sum * BigRational::from_integer(factorial(xi.m as u64) * factorial(xi.n as u64));
    if !total.is_integer() {
        return internal(format!("non-integral Cartan entry {total}"));
    }
    Ok(total.to_integer())
}

/// Cartan entry via BGG reciprocity: a sum over Verma labels `beta` of
/// `[M(beta):L(lambda)] [M(beta):L(kappa)]` weighted by the number of
/// tableaux in the row class of `beta`.
pub fn cartan_oracle(xi: &BlockKey, lambda: &Composition, kappa: &Composition) -> Result<BigInt> {
    check_sizes(xi, lambda, kappa)?;
    let gamma = xi.gamma();
    let Some((lo, hi)) = span(&[lambda, kappa]) else {
        return Ok(factorial(xi.m as u64) * factorial(xi.n as u64) / gamma.iter().fold(BigInt::one(), |a, (_, g)| a * factorial(g)));
    };
    let mut sum = BigRational::zero();
    for beta in Composition::all_in(xi.t, lo, hi + 1) {
        let a = verma_mult(&beta, lambda)?;
        let b = verma_mult(&beta, kappa)?;
        if a == 0 || b == 0 {
            continue;
        }
        let mut den = BigInt::one();
        for (i, g) in gamma.iter() {
            den *= factorial(beta.get(i) + g);
        }
        for (i, v) in beta.iter() {
            if gamma.get(i) == 0 {
                den *= factorial(v);
            }
            den *= factorial(v);
        }
        sum += BigRational::new(BigInt::from(a) * b, den);
    }
    let total = sum * BigRational::from_integer(factorial(xi.m as u64) * factorial(xi.n as u64));
    if !total.is_integer() {
        return internal(format!("non-integral BGG sum {total}"));
    }
    Ok(total.to_integer())
}

/// q-multinomial `[sum]! / prod [parts]!` as a product of q-binomials.
fn qmultinomial(parts: impl IntoIterator<Item = i64>) -> LaurentQ {
    let mut acc = 0;
    let mut out = LaurentQ::one();
    for p in parts {
        acc += p;
        out = &out * &qbinom(acc, p);
    }
    out
}

/// Graded Cartan entry `dim_q 1_kappa B 1_lambda`.
pub fn graded_cartan(xi: &BlockKey, lambda: &Composition, kappa: &Composition) -> Result<LaurentQ> {
    let Some(TauSetup { rho, lo, hi, gamma }) = tau_setup(xi, lambda, kappa)? else {
        return Ok(LaurentQ::zero());
    };
    let l = |i: i64| lambda.get(i) as i64;
    let r = |i: i64| *rho.get(&i).unwrap_or(&0);
    let (m, n) = (xi.m as i64, xi.n as i64);
    let mut sum = LaurentQ::zero();
    for_each_tau(lambda, &rho, lo, hi, |tau| {
        let tv = |i: i64| *tau.get(&i).unwrap_or(&0);
        let beta = |i: i64| l(i + 1) + tv(i) - tv(i + 1);
        let mut s = choose2(m) + choose2(n);
        let mut term = LaurentQ::one();
        for i in lo..=hi {
            let (b, g) = (beta(i), gamma.get(i) as i64);
            s += (2 * tv(i) - l(i) - r(i)) * (b + g) - choose2(b) - choose2(b + g);
            term = &term * &(&qbinom(b, tv(i) - l(i)) * &qbinom(b, tv(i) - r(i)));
            if term.is_zero() {
                return;
            }
        }
        // [m]![n]! / prod [beta_i]! [beta_i + gamma_i]! splits into two
        // q-multinomials because mu and nu have disjoint supports.
        let tops = (lo..=hi).map(|i| beta(i) + xi.mu.get(i) as i64);
        let bots = (lo..=hi).map(|i| beta(i) + xi.nu.get(i) as i64);
        term = &term * &(&qmultinomial(tops) * &qmultinomial(bots));
        sum += &term.shift(s);
    });
    if !sum.has_nonnegative_coeffs() || sum.min_degree().is_some_and(|d| d < 0) {
        return internal(format!("graded Cartan entry {sum} is not in N[q]"));
    }
    Ok(sum)
}

/// Number of `rho` with `0 <= rho_{i+1} <= lambda_{i+1} + min(lambda_i, rho_i)`.
pub fn h_count(lambda: &Composition) -> BigInt {
    let Some((lo, hi)) = lambda.support() else {
        return BigInt::one();
    };
    // state: value of rho_{i} -> number of prefixes
    let mut states: BTreeMap<i64, BigInt> = BTreeMap::from([(0, BigInt::one())]);
    for i in lo - 1..=hi {
        let (li, lnext) = (lambda.get(i) as i64, lambda.get(i + 1) as i64);
        let mut next: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (r, c) in &states {
            for v in 0..=lnext + li.min(*r) {
                *next.entry(v).or_insert_with(BigInt::zero) += c;
            }
        }
        states = next;
    }
    states.values().sum()
}

/// Labels `lambda` of size `t` in `lo..=hi` for which `h(lambda) > 3^t`.
/// The bound is expected but unproven, so violations are reported, not raised.
pub fn h_upper_bound_probe(t: u64, lo: i64, hi: i64) -> Vec<Composition> {
    let bound = BigInt::from(3u64).pow(t as u32);
    Composition::all_in(t, lo, hi)
        .into_iter()
        .filter(|l| h_count(l) > bound)
        .collect()
}

fn d_sum(t: u64, gi: u64, gj: u64) -> BigRational {
    let mut sum = BigRational::zero();
    for r in 0..=t {
        sum += BigRational::new(
            binomial(t as i64, r as i64) * factorial(gi) * factorial(gj),
            factorial(gi + t - r) * factorial(gj + r),
        );
    }
    sum
}

fn gamma_factorials(gamma: &Composition) -> BigInt {
    gamma.iter().fold(BigInt::one(), |a, (_, g)| a * factorial(g))
}

/// `dim End(P(t eps_i))`.
pub fn end_dim(xi: &BlockKey, i: i64) -> Result<BigInt> {
    if xi.t == 0 {
        return invalid("end_dim needs t >= 1");
    }
    let gamma = xi.gamma();
    let pre = BigRational::new(
        factorial(xi.m as u64) * factorial(xi.n as u64),
        factorial(xi.t) * gamma_factorials(&gamma),
    );
    let v = pre * d_sum(xi.t, gamma.get(i), gamma.get(i + 1));
    if !v.is_integer() {
        return internal(format!("non-integral endomorphism dimension {v}"));
    }
    Ok(v.to_integer())
}

/// Rescaled endomorphism dimension `C(2t,t) End(i) / N`, with `N` the
/// generic value of `end_dim`.
pub fn d_invariant(xi: &BlockKey, i: i64) -> Result<BigRational> {
    if xi.t == 0 {
        return invalid("d_invariant needs t >= 1");
    }
    let gamma = xi.gamma();
    Ok(d_sum(xi.t, gamma.get(i), gamma.get(i + 1)) * BigRational::from_integer(factorial(xi.t)))
}

/// Whether `[P(t eps_i) : L(t eps_j)]` is nonzero.
pub fn neighbor_test(xi: &BlockKey, i: i64, j: i64) -> Result<bool> {
    if xi.t == 0 {
        return invalid("neighbor_test needs t >= 1");
    }
    let t = xi.t;
    Ok(!cartan_entry(xi, &Composition::eps(i, t), &Composition::eps(j, t))?.is_zero())
}

/// Rectangular block of Cartan entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanWindow<E> {
    pub rows: Vec<Composition>,
    pub cols: Vec<Composition>,
    pub entries: Vec<Vec<E>>,
}

impl<E: Send> CartanWindow<E> {
    /// Evaluates `f` on every cell in parallel; the layout is independent of
    /// scheduling.
    pub fn build(
        rows: Vec<Composition>,
        cols: Vec<Composition>,
        f: impl Fn(&Composition, &Composition) -> Result<E> + Sync,
    ) -> Result<Self> {
        let entries = rows
            .par_iter()
            .map(|r| cols.iter().map(|c| f(r, c)).collect::<Result<Vec<E>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows, cols, entries })
    }
}

/// Abstract access to a block with labels `0..count()`: enough structure to
/// run the invariant recovery.
pub trait BlockOracle {
    fn count(&self) -> usize;
    /// Number of simples occurring in the projective cover of `x`.
    fn h(&self, x: usize) -> Result<BigInt>;
    /// Whether `[P(x) : L(y)]` is nonzero.
    fn linked(&self, x: usize, y: usize) -> Result<bool>;
    fn end_dim(&self, x: usize) -> Result<BigInt>;
}

/// Oracle generated from a block key on a finite window of labels.
pub struct FormulaOracle {
    pub xi: BlockKey,
    pub labels: Vec<Composition>,
}

impl FormulaOracle {
    pub fn new(xi: BlockKey, lo: i64, hi: i64) -> Self {
        let labels = Composition::all_in(xi.t, lo, hi);
        Self { xi, labels }
    }

    /// Same oracle with labels listed in a different order.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            xi: self.xi.clone(),
            labels: perm.iter().map(|&k| self.labels[k].clone()).collect(),
        }
    }
}

impl BlockOracle for FormulaOracle {
    fn count(&self) -> usize {
        self.labels.len()
    }
    fn h(&self, x: usize) -> Result<BigInt> {
        Ok(h_count(&self.labels[x]))
    }
    fn linked(&self, x: usize, y: usize) -> Result<bool> {
        Ok(!cartan_entry(&self.xi, &self.labels[x], &self.labels[y])?.is_zero())
    }
    fn end_dim(&self, x: usize) -> Result<BigInt> {
        cartan_entry(&self.xi, &self.labels[x], &self.labels[x])
    }
}

/// Oracle over an explicit Cartan matrix whose columns include every label
/// that can occur in a row.
pub struct MatrixOracle {
    rows: Vec<String>,
    col_index: BTreeMap<String, usize>,
    entries: Vec<Vec<BigInt>>,
}

#[derive(Deserialize)]
struct MatrixRepr {
    rows: Vec<serde_json::Value>,
    cols: Vec<serde_json::Value>,
    entries: Vec<Vec<serde_json::Value>>,
}

fn big_of(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::String(s) => s.parse().map_err(|_| Error::Invalid(format!("bad entry {s:?}"))),
        serde_json::Value::Number(n) => n.to_string().parse().map_err(|_| Error::Invalid(format!("bad entry {n}"))),
        other => invalid(format!("bad entry {other}")),
    }
}

impl MatrixOracle {
    pub fn from_json(text: &str) -> Result<Self> {
        let repr: MatrixRepr = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("Cartan JSON: {e}")))?;
        if repr.entries.len() != repr.rows.len() || repr.entries.iter().any(|r| r.len() != repr.cols.len()) {
            return invalid("Cartan JSON: entries do not match rows x cols");
        }
        let rows: Vec<String> = repr.rows.iter().map(|v| v.to_string()).collect();
        let col_index: BTreeMap<String, usize> = repr.cols.iter().enumerate().map(|(k, v)| (v.to_string(), k)).collect();
        for r in &rows {
            if !col_index.contains_key(r) {
                return invalid(format!("row label {r} missing from columns"));
            }
        }
        let entries = repr
            .entries
            .iter()
            .map(|row| row.iter().map(big_of).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows, col_index, entries })
    }
}

impl BlockOracle for MatrixOracle {
    fn count(&self) -> usize {
        self.rows.len()
    }
    fn h(&self, x: usize) -> Result<BigInt> {
        Ok(BigInt::from(self.entries[x].iter().filter(|v| !v.is_zero()).count()))
    }
    fn linked(&self, x: usize, y: usize) -> Result<bool> {
        let c = self.col_index[&self.rows[y]];
        Ok(!self.entries[x][c].is_zero())
    }
    fn end_dim(&self, x: usize) -> Result<BigInt> {
        let c = self.col_index[&self.rows[x]];
        Ok(self.entries[x][c].clone())
    }
}

/// Representative of `gamma` modulo translation and duality.
pub fn normalize_tdual(gamma: &Composition) -> Composition {
    let parts = gamma.parts().to_vec();
    let mut rev = parts.clone();
    rev.reverse();
    Composition::new(0, parts.min(rev))
}

/// Recovers the atypicality `t` and `gamma = mu + nu` (up to translation and
/// duality) from label-free block data.
pub fn recover_invariants(data: &dyn BlockOracle) -> Result<(u64, Composition)> {
    let count = data.count();
    if count == 0 {
        return Err(Error::Inconsistent("empty block data".into()));
    }
    let hs: Vec<BigInt> = (0..count).map(|x| data.h(x)).collect::<Result<_>>()?;
    let hmin = hs.iter().min().unwrap().clone();
    let t = (1u64..64)
        .find(|&t| binomial(t as i64 + 2, 2) == hmin)
        .ok_or_else(|| Error::Inconsistent(format!("minimal h = {hmin} is not C(t+2,2) for t >= 1")))?;
    let xmin: Vec<usize> = (0..count).filter(|&x| hs[x] == hmin).collect();

    // order X_min as a path using nonzero Cartan entries
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &x in &xmin {
        let mut nb = Vec::new();
        for &y in &xmin {
            if x != y && data.linked(x, y)? {
                nb.push(y);
            }
        }
        if nb.len() > 2 {
            return Err(Error::Inconsistent("minimal labels do not form a chain".into()));
        }
        adj.insert(x, nb);
    }
    let path = if xmin.len() == 1 {
        xmin.clone()
    } else {
        let start = *adj
            .iter()
            .find(|(_, nb)| nb.len() == 1)
            .ok_or_else(|| Error::Inconsistent("minimal labels have no chain endpoint".into()))?
            .0;
        let mut path = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            let next = adj[&cur].iter().copied().find(|&y| y != prev);
            match next {
                Some(y) if !path.contains(&y) => {
                    path.push(y);
                    prev = cur;
                    cur = y;
                }
                _ => break,
            }
        }
        if path.len() != xmin.len() {
            return Err(Error::Inconsistent("minimal labels are not a single chain".into()));
        }
        path
    };

    let ends: Vec<BigInt> = path.iter().map(|&x| data.end_dim(x)).collect::<Result<_>>()?;
    let big_n = ends.iter().max().unwrap().clone();
    if ends[0] != big_n || ends[ends.len() - 1] != big_n || path.len() < 2 {
        return Err(Error::WindowTooNarrow(
            "endomorphism dimensions have not stabilized at both ends of the window".into(),
        ));
    }
    let c2t = BigRational::from_integer(binomial(2 * t as i64, t as i64));
    let tfact = BigRational::from_integer(factorial(t));
    let len = path.len();
    let mut gamma = vec![0u64; len + 1];
    for k in (0..len).rev() {
        let target = &c2t * BigRational::new(ends[k].clone(), big_n.clone());
        let mut g = 0u64;
        loop {
            let v = d_sum(t, g, gamma[k + 1]) * &tfact;
            if v == target {
                break;
            }
            if v < target || g > 256 {
                return Err(Error::Inconsistent(format!(
                    "endomorphism dimension at position {k} fits no gamma"
                )));
            }
            g += 1;
        }
        gamma[k] = g;
    }
    Ok((t, normalize_tdual(&Composition::new(0, gamma))))
}
