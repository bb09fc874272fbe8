//! Tensor space of the natural and dual natural modules of quantum sl_N:
//! generator actions, R-matrices, bar involutions, canonical and dual
//! canonical bases, the quantum symmetric algebra `S` and the closed form
//! for pairings of canonical basis vectors.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde_json::{json, Value};

use crate::algebra::{choose2, qbinom, qfact, LaurentQ};
use crate::cache::Cache;
use crate::combinat::{BlockKey, Composition};
use crate::{internal, invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

pub fn parse_signs(s: &str) -> Result<Vec<Sign>> {
    s.chars()
        .map(|c| match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            other => Err(Error::Invalid(format!("sign must be + or -, got {other:?}"))),
        })
        .collect()
}

pub fn signs_string(signs: &[Sign]) -> String {
    signs.iter().map(|s| if *s == Sign::Plus { '+' } else { '-' }).collect()
}

/// Signs of `T^{m|n}`: `m` pluses then `n` minuses.
pub fn tmn_signs(m: usize, n: usize) -> Vec<Sign> {
    let mut s = vec![Sign::Plus; m];
    s.extend(std::iter::repeat_n(Sign::Minus, n));
    s
}

fn neg_q_pow(r: i64) -> LaurentQ {
    LaurentQ::monomial(r, if r % 2 == 0 { 1 } else { -1 })
}

/// Element of `V^{sigma_1} ⊗ ... ⊗ V^{sigma_k}` in the monomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorVec {
    rank: usize,
    signs: Vec<Sign>,
    terms: BTreeMap<Vec<usize>, LaurentQ>,
}

impl TensorVec {
    pub fn zero(rank: usize, signs: Vec<Sign>) -> Self {
        Self { rank, signs, terms: BTreeMap::new() }
    }

    /// The monomial `v_{i_1} ⊗ ... ⊗ v_{i_k}`.
    pub fn basis(rank: usize, signs: Vec<Sign>, key: Vec<usize>) -> Result<Self> {
        if key.len() != signs.len() {
            return invalid(format!("key of length {} for {} tensor factors", key.len(), signs.len()));
        }
        if key.iter().any(|&i| i < 1 || i > rank) {
            return invalid(format!("indices must lie in 1..={rank}"));
        }
        let mut v = Self::zero(rank, signs);
        v.terms.insert(key, LaurentQ::one());
        Ok(v)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &LaurentQ)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &[usize]) -> LaurentQ {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: Vec<usize>, c: &LaurentQ) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn same_shape(&self, other: &TensorVec) -> Result<()> {
        if self.rank != other.rank || self.signs != other.signs {
            return invalid("tensor vectors live in different spaces");
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, other: &TensorVec, c: &LaurentQ) -> Result<()> {
        self.same_shape(other)?;
        for (k, v) in &other.terms {
            self.add_term(k.clone(), &(v * c));
        }
        Ok(())
    }

    /// Applies the bar involution to every coefficient.
    pub fn bar_coeffs(&self) -> Self {
        Self {
            rank: self.rank,
            signs: self.signs.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.bar())).collect(),
        }
    }

    /// Weight of a key: `sum sigma_r eps_{i_r}` as a vector over `1..=rank`.
    pub fn weight_of(&self, key: &[usize]) -> Vec<i64> {
        key_weight(self.rank, &self.signs, key)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "N": self.rank,
            "signs": signs_string(&self.signs),
            "terms": self.terms_json(),
        })
    }

    /// Terms with the largest key first.
    pub fn terms_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .rev()
                .map(|(k, c)| json!({"key": k, "coeff": c.to_json_value()}))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Invalid(format!("tensor JSON: {what}"));
        let rank = v.get("N").and_then(Value::as_u64).ok_or_else(|| bad("missing N"))? as usize;
        let signs = parse_signs(v.get("signs").and_then(Value::as_str).ok_or_else(|| bad("missing signs"))?)?;
        let mut out = Self::zero(rank, signs);
        for t in v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))? {
            let key: Vec<usize> = serde_json::from_value(t.get("key").cloned().ok_or_else(|| bad("missing key"))?)
                .map_err(|e| bad(&e.to_string()))?;
            let map: BTreeMap<String, String> = serde_json::from_value(t.get("coeff").cloned().ok_or_else(|| bad("missing coeff"))?)
                .map_err(|e| bad(&e.to_string()))?;
            let c = LaurentQ::from_string_map(&map).map_err(|e| bad(&e))?;
            if key.len() != out.signs.len() || key.iter().any(|&i| i < 1 || i > rank) {
                return Err(bad("key out of range"));
            }
            out.add_term(key, &c);
        }
        Ok(out)
    }
}

impl fmt::Display for TensorVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(k, c)| format!("({c}) v{k:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn key_weight(rank: usize, signs: &[Sign], key: &[usize]) -> Vec<i64> {
    let mut w = vec![0i64; rank];
    for (s, &i) in signs.iter().zip(key) {
        w[i - 1] += s.value();
    }
    w
}

/// Chevalley generators of `U_q sl_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    E(usize),
    F(usize),
    K(usize),
    KInv(usize),
}

impl Gen {
    fn index(self) -> usize {
        match self {
            Gen::E(i) | Gen::F(i) | Gen::K(i) | Gen::KInv(i) => i,
        }
    }
}

/// Exponent of `K_i` on `v_j^sigma`: `sigma (alpha_i, eps_j)`.
fn k_exp(i: usize, s: Sign, j: usize) -> i64 {
    s.value() * ((j == i) as i64 - (j == i + 1) as i64)
}

/// `F_i` or `E_i` on a single factor.
fn raise_lower(g: Gen, s: Sign, j: usize) -> Option<usize> {
    match (g, s) {
        (Gen::F(i), Sign::Plus) if j == i => Some(i + 1),
        (Gen::E(i), Sign::Plus) if j == i + 1 => Some(i),
        (Gen::F(i), Sign::Minus) if j == i + 1 => Some(i),
        (Gen::E(i), Sign::Minus) if j == i => Some(i + 1),
        _ => None,
    }
}

/// Action of a generator through the iterated coproduct
/// `F -> 1⊗F + F⊗K`, `E -> K^{-1}⊗E + E⊗1`, `K -> K⊗K`.
pub fn act_gen(g: Gen, v: &TensorVec) -> Result<TensorVec> {
    let i = g.index();
    if i < 1 || i >= v.rank {
        return invalid(format!("generator index {i} outside 1..{}", v.rank));
    }
    let mut out = TensorVec::zero(v.rank, v.signs.clone());
    for (key, c) in &v.terms {
        let exps: Vec<i64> = v.signs.iter().zip(key).map(|(s, &j)| k_exp(i, *s, j)).collect();
        match g {
            Gen::K(_) => out.add_term(key.clone(), &c.shift(exps.iter().sum())),
            Gen::KInv(_) => out.add_term(key.clone(), &c.shift(-exps.iter().sum::<i64>())),
            Gen::F(_) => {
                for s in 0..key.len() {
                    if let Some(j) = raise_lower(g, v.signs[s], key[s]) {
                        let mut k2 = key.clone();
                        k2[s] = j;
                        out.add_term(k2, &c.shift(exps[s + 1..].iter().sum()));
                    }
                }
            }
            Gen::E(_) => {
                for s in 0..key.len() {
                    if let Some(j) = raise_lower(g, v.signs[s], key[s]) {
                        let mut k2 = key.clone();
                        k2[s] = j;
                        out.add_term(k2, &c.shift(-exps[..s].iter().sum::<i64>()));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `R` or `R^{-1}` on `v_i^a ⊗ v_j^b`, as a list of output pairs in
/// `V^b ⊗ V^a`.
fn r_pair(rank: usize, a: Sign, i: usize, b: Sign, j: usize, inverse: bool) -> Vec<(usize, usize, LaurentQ)> {
    use std::cmp::Ordering::*;
    use Sign::*;
    let qq = LaurentQ::q_minus_qinv();
    let swap = |c: LaurentQ| (j, i, c);
    match (a, b, i.cmp(&j), inverse) {
        (Plus, Plus, Less, false) | (Minus, Minus, Greater, false) => vec![swap(LaurentQ::one())],
        (Plus, Plus, Greater, true) | (Minus, Minus, Less, true) => vec![swap(LaurentQ::one())],
        (Plus, Plus, Equal, false) | (Minus, Minus, Equal, false) => vec![swap(LaurentQ::q())],
        (Plus, Plus, Equal, true) | (Minus, Minus, Equal, true) => vec![swap(LaurentQ::qpow(-1))],
        (Plus, Plus, Greater, false) | (Minus, Minus, Less, false) => vec![swap(LaurentQ::one()), (i, j, qq)],
        (Plus, Plus, Less, true) | (Minus, Minus, Greater, true) => vec![swap(LaurentQ::one()), (i, j, -qq)],
        (_, _, Less | Greater, _) => vec![swap(LaurentQ::one())],
        (Plus, Minus, Equal, false) => {
            let mut out = vec![swap(LaurentQ::qpow(-1))];
            for r in 1..i {
                out.push((j - r, i - r, -(&qq * &neg_q_pow(-(r as i64)))));
            }
            out
        }
        (Minus, Plus, Equal, false) => {
            let mut out = vec![swap(LaurentQ::qpow(-1))];
            for r in 1..=rank - i {
                out.push((j + r, i + r, -(&qq * &neg_q_pow(-(r as i64)))));
            }
            out
        }
        (Plus, Minus, Equal, true) => {
            let mut out = vec![swap(LaurentQ::q())];
            for r in 1..=rank - i {
                out.push((j + r, i + r, &qq * &neg_q_pow(r as i64)));
            }
            out
        }
        (Minus, Plus, Equal, true) => {
            let mut out = vec![swap(LaurentQ::q())];
            for r in 1..i {
                out.push((j - r, i - r, &qq * &neg_q_pow(r as i64)));
            }
            out
        }
    }
}

/// Applies `R` (or `R^{-1}`) to tensor slots `slot, slot+1` (1-based).
pub fn r_apply(slot: usize, v: &TensorVec, inverse: bool) -> Result<TensorVec> {
    let k = v.signs.len();
    if slot < 1 || slot >= k {
        return invalid(format!("R-matrix slot {slot} outside 1..{k}"));
    }
    let p = slot - 1;
    let mut signs = v.signs.clone();
    signs.swap(p, p + 1);
    let mut out = TensorVec::zero(v.rank, signs);
    for (key, c) in &v.terms {
        for (a, b, coef) in r_pair(v.rank, v.signs[p], key[p], v.signs[p + 1], key[p + 1], inverse) {
            let mut k2 = key.clone();
            k2[p] = a;
            k2[p + 1] = b;
            out.add_term(k2, &(c * &coef));
        }
    }
    Ok(out)
}

/// The reduced word `s_1 (s_2 s_1) (s_3 s_2 s_1) ...` for the longest element of `S_k`.
pub fn longest_word(k: usize) -> Vec<usize> {
    let mut w = Vec::new();
    for j in 1..k {
        w.extend((1..=j).rev());
    }
    w
}

/// `R_{i_1} ∘ ... ∘ R_{i_K}` for the given word.
fn r_word(v: TensorVec, word: &[usize], inverse: bool) -> Result<TensorVec> {
    word.iter().rev().try_fold(v, |acc, &s| r_apply(s, &acc, inverse))
}

fn pair_exponent(signs: &[Sign], key: &[usize]) -> i64 {
    let mut e = 0;
    for r in 0..key.len() {
        for s in r + 1..key.len() {
            if key[r] == key[s] {
                e += signs[r].value() * signs[s].value();
            }
        }
    }
    e
}

fn bar_involution(v: &TensorVec, word: &[usize], dual: bool) -> Result<TensorVec> {
    let mut rev_signs = v.signs.clone();
    rev_signs.reverse();
    let mut reversed = TensorVec::zero(v.rank, rev_signs);
    for (key, c) in &v.terms {
        let e = pair_exponent(&v.signs, key);
        let mut k2 = key.clone();
        k2.reverse();
        reversed.add_term(k2, &c.bar().shift(if dual { e } else { -e }));
    }
    let out = r_word(reversed, word, dual)?;
    debug_assert_eq!(out.signs, v.signs);
    Ok(out)
}

/// Lusztig's bar involution `psi` on tensor space.
pub fn psi(v: &TensorVec) -> Result<TensorVec> {
    bar_involution(v, &longest_word(v.signs.len()), false)
}

/// The adjoint involution `psi*`.
pub fn psi_star(v: &TensorVec) -> Result<TensorVec> {
    bar_involution(v, &longest_word(v.signs.len()), true)
}

/// `psi*` computed from an arbitrary reduced word for the longest element.
pub fn psi_star_with_word(v: &TensorVec, word: &[usize]) -> Result<TensorVec> {
    bar_involution(v, word, true)
}

/// Bilinear form with the monomial basis orthonormal.
pub fn pairing(v: &TensorVec, w: &TensorVec) -> Result<LaurentQ> {
    v.same_shape(w)?;
    let mut out = LaurentQ::zero();
    for (k, a) in &v.terms {
        if let Some(b) = w.terms.get(k) {
            out += &(a * b);
        }
    }
    Ok(out)
}

/// All keys in `[1, rank]^k` of the given weight, in lexicographic order.
pub fn weight_space(rank: usize, signs: &[Sign], weight: &[i64]) -> Vec<Vec<usize>> {
    fn go(rank: usize, signs: &[Sign], rem: &mut Vec<i64>, key: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let p = key.len();
        if p == signs.len() {
            if rem.iter().all(|&x| x == 0) {
                out.push(key.clone());
            }
            return;
        }
        let left = (signs.len() - p - 1) as i64;
        for i in 1..=rank {
            rem[i - 1] -= signs[p].value();
            if rem.iter().map(|x| x.abs()).sum::<i64>() <= left {
                key.push(i);
                go(rank, signs, rem, key, out);
                key.pop();
            }
            rem[i - 1] += signs[p].value();
        }
    }
    let mut out = Vec::new();
    if weight.len() == rank {
        go(rank, signs, &mut weight.to_vec(), &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisKind {
    Canonical,
    DualCanonical,
}

/// Canonical or dual canonical basis of a whole weight space, keyed by label.
pub type WeightBasis = BTreeMap<Vec<usize>, TensorVec>;

/// Lusztig's lemma. `images[A]` is the bar image of `v_A`; it must be
/// `v_A` plus terms ordered by an acyclic relation.
fn lusztig(rank: usize, signs: &[Sign], images: &BTreeMap<Vec<usize>, TensorVec>) -> Result<WeightBasis> {
    // topological order: every key after the keys occurring in its image
    let mut order: Vec<Vec<usize>> = Vec::new();
    let mut state: HashMap<Vec<usize>, u8> = HashMap::new();
    fn visit(
        a: &Vec<usize>,
        images: &BTreeMap<Vec<usize>, TensorVec>,
        state: &mut HashMap<Vec<usize>, u8>,
        order: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        match state.get(a) {
            Some(2) => return Ok(()),
            Some(1) => return internal("bar involution is not triangular: cycle among keys"),
            _ => {}
        }
        state.insert(a.clone(), 1);
        let img = images
            .get(a)
            .ok_or_else(|| Error::Internal(format!("key {a:?} leaves the weight space")))?;
        for (b, _) in img.terms() {
            if b != a {
                visit(b, images, state, order)?;
            }
        }
        state.insert(a.clone(), 2);
        order.push(a.clone());
        Ok(())
    }
    for a in images.keys() {
        visit(a, images, &mut state, &mut order)?;
    }
    let pos: HashMap<&Vec<usize>, usize> = order.iter().enumerate().map(|(k, a)| (a, k)).collect();

    let mut basis: WeightBasis = BTreeMap::new();
    for a in &order {
        let img = &images[a];
        if img.coeff(a) != LaurentQ::one() {
            return internal(format!("bar image of v{a:?} is not unitriangular"));
        }
        let mut w = img.clone();
        w.add_term(a.clone(), &-LaurentQ::one());
        let mut b = TensorVec::basis(rank, signs.to_vec(), a.clone())?;
        while let Some(top) = w.terms.keys().max_by_key(|k| pos[k]).cloned() {
            let s = w.coeff(&top);
            if s.bar() != -s.clone() {
                return internal(format!("coefficient {s} at v{top:?} is not bar-antisymmetric"));
            }
            let below = &basis[&top];
            w.add_scaled(below, &-s.clone())?;
            b.add_scaled(below, &s.positive_part())?;
        }
        for (k, c) in b.terms() {
            let ok = if k == a {
                *c == LaurentQ::one()
            } else {
                c.min_degree().is_some_and(|d| d >= 1)
            };
            if !ok {
                return internal(format!("basis vector for {a:?} has coefficient {c} at {k:?}"));
            }
        }
        basis.insert(a.clone(), b);
    }
    Ok(basis)
}

type MemoKey = (usize, Vec<Sign>, Vec<i64>, BasisKind);

fn memo() -> &'static Mutex<HashMap<MemoKey, Arc<WeightBasis>>> {
    static MEMO: OnceLock<Mutex<HashMap<MemoKey, Arc<WeightBasis>>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn basis_to_json(b: &WeightBasis) -> Value {
    Value::Array(b.values().map(TensorVec::to_json).collect())
}

fn basis_from_json(v: &Value) -> Option<WeightBasis> {
    let mut out = BTreeMap::new();
    for t in v.as_array()? {
        let tv = TensorVec::from_json(t).ok()?;
        let lead = tv.terms.keys().next_back()?.clone();
        out.insert(lead, tv);
    }
    Some(out)
}

/// Computes (or recalls) a basis of one weight space. Distinct weight spaces
/// are independent; recomputation of the same space is idempotent.
pub fn weight_basis(
    rank: usize,
    signs: &[Sign],
    weight: &[i64],
    kind: BasisKind,
    cache: Option<&Cache>,
) -> Result<Arc<WeightBasis>> {
    let mk: MemoKey = (rank, signs.to_vec(), weight.to_vec(), kind);
    if let Some(b) = memo().lock().unwrap().get(&mk) {
        return Ok(b.clone());
    }
    let request = json!({
        "op": "weight_basis",
        "N": rank,
        "signs": signs_string(signs),
        "weight": weight,
        "kind": format!("{kind:?}"),
    });
    if let Some(b) = cache.and_then(|c| c.get(&request)).and_then(|v| basis_from_json(&v)) {
        let b = Arc::new(b);
        memo().lock().unwrap().insert(mk, b.clone());
        return Ok(b);
    }
    let keys = weight_space(rank, signs, weight);
    let mut images = BTreeMap::new();
    for k in keys {
        let v = TensorVec::basis(rank, signs.to_vec(), k.clone())?;
        let img = match kind {
            BasisKind::DualCanonical => psi_star(&v)?,
            BasisKind::Canonical => psi(&v)?,
        };
        images.insert(k, img);
    }
    let b = Arc::new(lusztig(rank, signs, &images)?);
    if let Some(c) = cache {
        // a failed write only costs a recomputation later
        let _ = c.put(&request, &basis_to_json(&b));
    }
    memo().lock().unwrap().insert(mk, b.clone());
    Ok(b)
}

fn basis_vector(rank: usize, signs: &[Sign], key: &[usize], kind: BasisKind, cache: Option<&Cache>) -> Result<TensorVec> {
    TensorVec::basis(rank, signs.to_vec(), key.to_vec())?;
    let w = key_weight(rank, signs, key);
    Ok(weight_basis(rank, signs, &w, kind, cache)?[key].clone())
}

/// Dual canonical basis vector `b*_A`.
pub fn dual_canonical(rank: usize, signs: &[Sign], key: &[usize], cache: Option<&Cache>) -> Result<TensorVec> {
    basis_vector(rank, signs, key, BasisKind::DualCanonical, cache)
}

/// Canonical basis vector `b_A`.
pub fn canonical(rank: usize, signs: &[Sign], key: &[usize], cache: Option<&Cache>) -> Result<TensorVec> {
    basis_vector(rank, signs, key, BasisKind::Canonical, cache)
}

// ---------------------------------------------------------------------------
// The quantum symmetric algebra S

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SGen {
    X(usize),
    Y(usize),
}

/// Element of `S` in the anti-dominant monomial basis `u_A`, keyed by
/// `(top ascending, bottom descending)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SVec {
    terms: BTreeMap<(Vec<usize>, Vec<usize>), LaurentQ>,
}

impl SVec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(top: Vec<usize>, bottom: Vec<usize>) -> Result<Self> {
        if !is_antidominant(&top, &bottom) {
            return invalid("u-monomial keys must be anti-dominant");
        }
        let mut out = Self::zero();
        out.terms.insert((top, bottom), LaurentQ::one());
        Ok(out)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Vec<usize>, Vec<usize>), &LaurentQ)> {
        self.terms.iter()
    }

    pub fn coeff(&self, top: &[usize], bottom: &[usize]) -> LaurentQ {
        self.terms.get(&(top.to_vec(), bottom.to_vec())).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, key: (Vec<usize>, Vec<usize>), c: &LaurentQ) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &SVec, c: &LaurentQ) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), &(v * c));
        }
    }

    fn add_word(&mut self, word: &[SGen], c: &LaurentQ) {
        for (nf, a) in normal_form(word).iter() {
            self.add_term(split_word(nf), &(a * c));
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .rev()
                .map(|((t, b), c)| json!({"top": t, "bottom": b, "coeff": c.to_json_value()}))
                .collect(),
        )
    }
}

pub fn is_antidominant(top: &[usize], bottom: &[usize]) -> bool {
    top.windows(2).all(|w| w[0] <= w[1]) && bottom.windows(2).all(|w| w[0] >= w[1])
}

fn split_word(w: &[SGen]) -> (Vec<usize>, Vec<usize>) {
    let mut top = Vec::new();
    let mut bottom = Vec::new();
    for g in w {
        match g {
            SGen::X(i) => top.push(*i),
            SGen::Y(i) => bottom.push(*i),
        }
    }
    (top, bottom)
}

fn word_of(top: &[usize], bottom: &[usize]) -> Vec<SGen> {
    top.iter().map(|&i| SGen::X(i)).chain(bottom.iter().map(|&i| SGen::Y(i))).collect()
}

/// One rewriting step for an out-of-order adjacent pair, or `None` if the
/// pair is already in normal order.
fn rewrite_pair(a: SGen, b: SGen) -> Option<Vec<(Vec<SGen>, LaurentQ)>> {
    use SGen::*;
    match (a, b) {
        (X(i), X(j)) if i > j => Some(vec![(vec![X(j), X(i)], LaurentQ::q())]),
        (Y(i), Y(j)) if i < j => Some(vec![(vec![Y(j), Y(i)], LaurentQ::q())]),
        (Y(i), X(j)) if i != j => Some(vec![(vec![X(j), Y(i)], LaurentQ::one())]),
        (Y(i), X(_)) => {
            let mut out = vec![(vec![X(i), Y(i)], LaurentQ::q())];
            for r in 1..i {
                out.push((vec![X(i - r), Y(i - r)], &LaurentQ::q_minus_qinv() * &neg_q_pow(r as i64)));
            }
            Some(out)
        }
        _ => None,
    }
}

type NormalForm = Arc<BTreeMap<Vec<SGen>, LaurentQ>>;

/// Normal form of a word in `S`: x's ascending, then y's descending.
pub fn normal_form(word: &[SGen]) -> NormalForm {
    thread_local! {
        static NF: std::cell::RefCell<HashMap<Vec<SGen>, NormalForm>> = std::cell::RefCell::new(HashMap::new());
    }
    if let Some(hit) = NF.with(|m| m.borrow().get(word).cloned()) {
        return hit;
    }
    let mut out: BTreeMap<Vec<SGen>, LaurentQ> = BTreeMap::new();
    let step = (0..word.len().saturating_sub(1)).find_map(|p| rewrite_pair(word[p], word[p + 1]).map(|r| (p, r)));
    match step {
        None => {
            out.insert(word.to_vec(), LaurentQ::one());
        }
        Some((p, reps)) => {
            for (rep, c) in reps {
                let mut w2 = word[..p].to_vec();
                w2.extend(rep);
                w2.extend_from_slice(&word[p + 2..]);
                for (nf, a) in normal_form(&w2).iter() {
                    let slot = out.entry(nf.clone()).or_default();
                    *slot += &(a * &c);
                }
            }
            out.retain(|_, v| !v.is_zero());
        }
    }
    let out = Arc::new(out);
    NF.with(|m| m.borrow_mut().insert(word.to_vec(), out.clone()));
    out
}

/// Row-sorting a monomial: `u_A = q^l u_{A°}`.
pub fn straighten(top: &[usize], bottom: &[usize]) -> (u64, Vec<usize>, Vec<usize>) {
    let mut l = 0u64;
    for i in 0..top.len() {
        for j in i + 1..top.len() {
            if top[i] > top[j] {
                l += 1;
            }
        }
    }
    for i in 0..bottom.len() {
        for j in i + 1..bottom.len() {
            if bottom[i] < bottom[j] {
                l += 1;
            }
        }
    }
    let mut t = top.to_vec();
    t.sort_unstable();
    let mut b = bottom.to_vec();
    b.sort_unstable_by(|x, y| y.cmp(x));
    (l, t, b)
}

/// The projection `pi: T^{m|n} -> S`, `v_A -> u_A`.
pub fn project_to_s(v: &TensorVec) -> Result<SVec> {
    let m = v.signs.iter().take_while(|s| **s == Sign::Plus).count();
    if v.signs[m..].contains(&Sign::Plus) {
        return invalid("projection needs signs of the form +...+-...-");
    }
    let mut out = SVec::zero();
    for (key, c) in &v.terms {
        let (l, t, b) = straighten(&key[..m], &key[m..]);
        out.add_term((t, b), &c.shift(l as i64));
    }
    Ok(out)
}

fn s_pair_exponent(a: SGen, b: SGen) -> i64 {
    match (a, b) {
        (SGen::X(i), SGen::X(j)) | (SGen::Y(i), SGen::Y(j)) => (i == j) as i64 - 1,
        (SGen::X(i), SGen::Y(j)) | (SGen::Y(i), SGen::X(j)) => -((i == j) as i64),
    }
}

/// Anti-linear involution on `S` fixing the generators with
/// `psi*(u u') = q^{(wt u, wt u') - m m' - n n'} psi*(u') psi*(u)`.
pub fn psi_star_s(v: &SVec) -> SVec {
    let mut out = SVec::zero();
    for ((t, b), c) in &v.terms {
        let w = word_of(t, b);
        let mut e = 0;
        for r in 0..w.len() {
            for s in r + 1..w.len() {
                e += s_pair_exponent(w[r], w[s]);
            }
        }
        let mut rev = w.clone();
        rev.reverse();
        out.add_word(&rev, &c.bar().shift(e));
    }
    out
}

/// Product of a word-level expression with `z_c = sum_r (-q)^r x_{c-r} y_{c-r}` factors.
fn expand_with_z(prefix: &[SGen], zs: &[usize], suffix: &[SGen], coeff: &LaurentQ, out: &mut SVec) {
    match zs.split_first() {
        None => {
            let mut w = prefix.to_vec();
            w.extend_from_slice(suffix);
            out.add_word(&w, coeff);
        }
        Some((&c, rest)) => {
            for r in 0..c {
                let mut p = prefix.to_vec();
                p.push(SGen::X(c - r));
                p.push(SGen::Y(c - r));
                expand_with_z(&p, rest, suffix, &(coeff * &neg_q_pow(r as i64)), out);
            }
        }
    }
}

/// `z_c` as an element of `S`.
pub fn z_elem(c: usize) -> SVec {
    let mut out = SVec::zero();
    expand_with_z(&[], &[c], &[], &LaurentQ::one(), &mut out);
    out
}

/// Product in `S` of two elements.
pub fn s_mul(a: &SVec, b: &SVec) -> SVec {
    let mut out = SVec::zero();
    for ((t1, b1), c1) in &a.terms {
        for ((t2, b2), c2) in &b.terms {
            let mut w = word_of(t1, b1);
            w.extend(word_of(t2, b2));
            out.add_word(&w, &(c1 * c2));
        }
    }
    out
}

/// Generator of `S` as an element.
pub fn s_gen(g: SGen) -> SVec {
    let mut out = SVec::zero();
    out.add_word(&[g], &LaurentQ::one());
    out
}

/// Dual canonical basis element `d_A` of `S` for an anti-dominant `A`.
pub fn d_basis(top: &[usize], bottom: &[usize]) -> Result<SVec> {
    if !is_antidominant(top, bottom) {
        return invalid("d-basis labels must be anti-dominant");
    }
    let mut rest_bottom = bottom.to_vec();
    let mut a = Vec::new();
    let mut c = Vec::new();
    for &x in top {
        if let Some(p) = rest_bottom.iter().position(|&y| y == x) {
            rest_bottom.remove(p);
            c.push(x);
        } else {
            a.push(x);
        }
    }
    let b = rest_bottom;
    let t = c.len() as i64;
    let cross = |v: &[usize]| -> i64 { v.iter().map(|&x| c.iter().filter(|&&cj| x > cj).count() as i64).sum() };
    let e = -(t * (t - 1) / 2) - cross(&a) - cross(&b);
    let prefix: Vec<SGen> = a.iter().map(|&i| SGen::X(i)).collect();
    let suffix: Vec<SGen> = b.iter().map(|&i| SGen::Y(i)).collect();
    let mut out = SVec::zero();
    expand_with_z(&prefix, &c, &suffix, &LaurentQ::qpow(e), &mut out);
    Ok(out)
}

fn check_core(xi: &BlockKey, rank: usize, labels: &[&Composition]) -> Result<()> {
    for c in [&xi.mu, &xi.nu].into_iter().chain(labels.iter().copied()) {
        if let Some((lo, hi)) = c.support() {
            if lo < 1 || hi > rank as i64 {
                return invalid(format!("support of {c} leaves 1..={rank}"));
            }
        }
    }
    for l in labels {
        if l.total() != xi.t {
            return invalid(format!("{l} is not a composition of t={}", xi.t));
        }
    }
    Ok(())
}

/// Anti-dominant tableau with `lambda_i + mu_i` entries `i` on top and
/// `lambda_i + nu_i` on the bottom, as `(top, bottom)`.
pub fn tableau_for(xi: &BlockKey, lambda: &Composition, rank: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    check_core(xi, rank, &[lambda])?;
    let mut top = Vec::new();
    let mut bottom = Vec::new();
    for i in 1..=rank {
        let k = (lambda.get(i as i64) + xi.mu.get(i as i64)) as usize;
        top.extend(std::iter::repeat_n(i, k));
    }
    for i in (1..=rank).rev() {
        let k = (lambda.get(i as i64) + xi.nu.get(i as i64)) as usize;
        bottom.extend(std::iter::repeat_n(i, k));
    }
    Ok((top, bottom))
}

/// Coefficients of `u_lambda` in the `d`-basis, indexed by `kappa`.
pub fn expand_u_in_d(xi: &BlockKey, lambda: &Composition, rank: usize) -> Result<BTreeMap<Composition, LaurentQ>> {
    check_core(xi, rank, &[lambda])?;
    let gamma = xi.gamma();
    let l = |i: usize| lambda.get(i as i64) as i64;
    let mut out = BTreeMap::new();
    let mut theta = vec![0i64; rank];
    loop {
        let mut kappa = lambda.clone();
        let mut coeff = LaurentQ::one();
        for i in 1..rank {
            let th = theta[i];
            kappa = kappa
                .plus_alpha(i as i64, th as u64)
                .ok_or_else(|| Error::Internal("theta exceeds available mass".into()))?;
            coeff = &coeff * &qbinom(l(i + 1), th).shift(th * (l(i + 1) + gamma.get(i as i64 + 1) as i64));
        }
        out.insert(kappa, coeff);
        let mut i = 1;
        loop {
            if i >= rank {
                return Ok(out);
            }
            if theta[i] < l(i + 1) {
                theta[i] += 1;
                break;
            }
            theta[i] = 0;
            i += 1;
        }
    }
}

/// Closed form for `(b_kappa, b_lambda)` on rank-`N` tensor space, with the
/// boundary conventions `tau_1 = lambda_1`, `tau_{N+1} = 0`, `rho_1 = lambda_1`.
pub fn pairing_formula(xi: &BlockKey, kappa: &Composition, lambda: &Composition, rank: usize) -> Result<LaurentQ> {
    check_core(xi, rank, &[kappa, lambda])?;
    let nn = rank;
    let gamma = xi.gamma();
    // 1-based arrays with one spare slot for index N+1
    let lam: Vec<i64> = (0..=nn + 1).map(|i| if (1..=nn).contains(&i) { lambda.get(i as i64) as i64 } else { 0 }).collect();
    let kap: Vec<i64> = (0..=nn + 1).map(|i| if (1..=nn).contains(&i) { kappa.get(i as i64) as i64 } else { 0 }).collect();
    let gam: Vec<i64> = (0..=nn + 1).map(|i| gamma.get(i as i64) as i64).collect();
    let mut rho = vec![0i64; nn + 2];
    rho[1] = lam[1];
    let mut c = 0;
    for j in 1..nn {
        c += kap[j] - lam[j];
        rho[j + 1] = lam[j + 1] - c;
        if rho[j + 1] < 0 || rho[j + 1] > lam[j + 1] + lam[j].min(rho[j]) {
            return Ok(LaurentQ::zero());
        }
    }
    let ranges: Vec<(i64, i64)> = (1..nn).map(|i| (lam[i + 1].max(rho[i + 1]), lam[i + 1] + lam[i].min(rho[i]))).collect();
    let (m, n) = (xi.m as i64, xi.n as i64);
    let mn_fact = &qfact(xi.m as u64) * &qfact(xi.n as u64);
    let mut total = LaurentQ::zero();
    let mut tau = vec![0i64; nn + 2];
    tau[1] = lam[1];
    for (k, r) in ranges.iter().enumerate() {
        tau[k + 2] = r.0;
    }
    if ranges.iter().any(|r| r.0 > r.1) {
        return Ok(LaurentQ::zero());
    }
    loop {
        let beta: Vec<i64> = (0..=nn).map(|i| if i == 0 { 0 } else { lam[i + 1] + tau[i] - tau[i + 1] }).collect();
        if (1..=nn).all(|i| beta[i] >= 0) {
            let mut num = mn_fact.clone();
            let mut s = choose2(m) + choose2(n);
            for i in 2..=nn {
                num = &num * &(&qbinom(beta[i], tau[i] - lam[i]) * &qbinom(beta[i], tau[i] - rho[i]));
                s += (2 * tau[i] - lam[i] - rho[i]) * (beta[i] + gam[i]);
            }
            let mut den = LaurentQ::one();
            for i in 1..=nn {
                den = &den * &(&qfact(beta[i] as u64) * &qfact((beta[i] + gam[i]) as u64));
                s -= choose2(beta[i]) + choose2(beta[i] + gam[i]);
            }
            total += &num.div_exact(&den)?.shift(s);
        }
        let mut k = 0;
        loop {
            if k == ranges.len() {
                return Ok(total);
            }
            if tau[k + 2] < ranges[k].1 {
                tau[k + 2] += 1;
                break;
            }
            tau[k + 2] = ranges[k].0;
            k += 1;
        }
    }
}

/// `(b_kappa, b_lambda)` from the computed canonical basis.
pub fn pairing_canonical(xi: &BlockKey, kappa: &Composition, lambda: &Composition, rank: usize, cache: Option<&Cache>) -> Result<LaurentQ> {
    let signs = tmn_signs(xi.m, xi.n);
    let (tk, bk) = tableau_for(xi, kappa, rank)?;
    let (tl, bl) = tableau_for(xi, lambda, rank)?;
    let key = |t: Vec<usize>, b: Vec<usize>| t.into_iter().chain(b).collect::<Vec<_>>();
    let a = canonical(rank, &signs, &key(tk, bk), cache)?;
    let b = canonical(rank, &signs, &key(tl, bl), cache)?;
    pairing(&a, &b)
}

/// Smallest rank `N >= min_rank` (up to `max_rank`) at which the closed form
/// stops changing from `N` to `N + 1`, with its value.
pub fn stable_pairing(xi: &BlockKey, kappa: &Composition, lambda: &Composition, min_rank: usize, max_rank: usize) -> Result<Option<(usize, LaurentQ)>> {
    let mut prev: Option<LaurentQ> = None;
    for nn in min_rank..=max_rank + 1 {
        let v = pairing_formula(xi, kappa, lambda, nn)?;
        if prev.as_ref() == Some(&v) {
            return Ok(Some((nn - 1, v)));
        }
        prev = Some(v);
    }
    Ok(None)
}

/// Parses an index tableau written `top;bottom` with comma-separated rows,
/// e.g. `"1,2;3"`, into the flat key `[1, 2, 3]`.
pub fn parse_key(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Invalid(format!("bad key {s:?}: expected top;bottom"));
    let (top, bottom) = s.split_once(';').ok_or_else(bad)?;
    let row = |r: &str| -> Result<Vec<usize>> {
        r.split(',').map(str::trim).filter(|x| !x.is_empty()).map(|x| x.parse().map_err(|_| bad())).collect()
    };
    let mut key = row(top)?;
    key.extend(row(bottom)?);
    Ok(key)
}

/// Every index tableau `(top; bottom)` with entries in `1..=rank`.
pub fn all_keys(rank: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (1..=rank).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

/// Distinct weights occurring in `T^{signs}` for the given rank.
pub fn all_weights(rank: usize, signs: &[Sign]) -> BTreeSet<Vec<i64>> {
    all_keys(rank, signs.len()).iter().map(|k| key_weight(rank, signs, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use crate::blockan::graded_cartan;
    use crate::combinat::{Pyramid, Tableau, Window};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(rank: usize, signs: &str, key: &[usize]) -> TensorVec {
        TensorVec::basis(rank, parse_signs(signs).unwrap(), key.to_vec()).unwrap()
    }

    fn lq(terms: &[(i64, i64)]) -> LaurentQ {
        LaurentQ::from_terms(terms.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    fn random_vec(rng: &mut ChaCha8Rng, rank: usize, signs: &str) -> TensorVec {
        let s = parse_signs(signs).unwrap();
        let mut out = TensorVec::zero(rank, s.clone());
        for _ in 0..rng.gen_range(1..=4) {
            let key: Vec<usize> = (0..s.len()).map(|_| rng.gen_range(1..=rank)).collect();
            let c = lq(&[(rng.gen_range(-2..=2), rng.gen_range(-3..=3)), (rng.gen_range(-2..=2), 1)]);
            out.add_term(key, &c);
        }
        out
    }

    fn random_signs(rng: &mut ChaCha8Rng, k: usize) -> String {
        (0..k).map(|_| if rng.gen_bool(0.5) { '+' } else { '-' }).collect()
    }

    #[test]
    fn generator_actions() {
        let r = act_gen(Gen::F(1), &v(3, "+", &[1])).unwrap();
        assert_eq!(r, v(3, "+", &[2]));
        let r = act_gen(Gen::F(1), &v(3, "++", &[1, 1])).unwrap();
        let mut expect = v(3, "++", &[1, 2]);
        expect.add_term(vec![2, 1], &LaurentQ::q());
        assert_eq!(r, expect);
        let r = act_gen(Gen::K(1), &v(3, "+-+", &[1, 2, 1])).unwrap();
        assert_eq!(r.coeff(&[1, 2, 1]), LaurentQ::qpow(3));
        assert!(act_gen(Gen::E(3), &v(3, "+", &[1])).is_err());
    }

    #[test]
    fn generator_relations_on_tensors() {
        // [E_i, F_i] = (K_i - K_i^{-1}) / (q - q^{-1}) checked after clearing the denominator
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let k = rng.gen_range(1..=3);
            let s = random_signs(&mut rng, k);
            let w = random_vec(&mut rng, 3, &s);
            for i in 1..3 {
                let ef = act_gen(Gen::E(i), &act_gen(Gen::F(i), &w).unwrap()).unwrap();
                let fe = act_gen(Gen::F(i), &act_gen(Gen::E(i), &w).unwrap()).unwrap();
                let mut lhs = ef;
                lhs.add_scaled(&fe, &-LaurentQ::one()).unwrap();
                let mut lhs2 = TensorVec::zero(3, w.signs.clone());
                lhs2.add_scaled(&lhs, &LaurentQ::q_minus_qinv()).unwrap();
                let mut rhs = act_gen(Gen::K(i), &w).unwrap();
                rhs.add_scaled(&act_gen(Gen::KInv(i), &w).unwrap(), &-LaurentQ::one()).unwrap();
                assert_eq!(lhs2, rhs);
            }
        }
    }

    #[test]
    fn r_matrix_examples() {
        assert_eq!(r_apply(1, &v(3, "++", &[1, 2]), false).unwrap(), v(3, "++", &[2, 1]));
        let r = r_apply(1, &v(3, "++", &[2, 2]), false).unwrap();
        assert_eq!(r.coeff(&[2, 2]), LaurentQ::q());
        assert!(r_apply(2, &v(3, "++", &[2, 2]), false).is_err());
    }

    #[test]
    fn r_matrix_is_a_module_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for signs in ["++", "+-", "-+", "--"] {
            for _ in 0..10 {
                let w = random_vec(&mut rng, 3, signs);
                for inverse in [false, true] {
                    for g in [Gen::E(1), Gen::E(2), Gen::F(1), Gen::F(2), Gen::K(1), Gen::K(2)] {
                        let a = r_apply(1, &act_gen(g, &w).unwrap(), inverse).unwrap();
                        let b = act_gen(g, &r_apply(1, &w, inverse).unwrap()).unwrap();
                        assert_eq!(a, b, "{signs} {g:?} inverse={inverse}");
                    }
                }
            }
        }
    }

    #[test]
    fn r_inverse_undoes_r() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for signs in ["++", "+-", "-+", "--"] {
            for _ in 0..20 {
                let w = random_vec(&mut rng, 4, signs);
                let back = r_apply(1, &r_apply(1, &w, false).unwrap(), true).unwrap();
                assert_eq!(back, w);
            }
        }
    }

    #[test]
    fn psi_star_examples() {
        assert_eq!(psi_star(&v(3, "+-", &[1, 1])).unwrap(), v(3, "+-", &[1, 1]));
        let mut expect = v(3, "+-", &[2, 2]);
        expect.add_term(vec![1, 1], &lq(&[(-1, 1), (1, -1)]));
        assert_eq!(psi_star(&v(3, "+-", &[2, 2])).unwrap(), expect);
    }

    #[test]
    fn bar_involutions_are_involutions_and_compatible() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let k = rng.gen_range(1..=4);
            let s = random_signs(&mut rng, k);
            let rank = rng.gen_range(2..=3);
            let w = random_vec(&mut rng, rank, &s);
            assert_eq!(psi(&psi(&w).unwrap()).unwrap(), w);
            assert_eq!(psi_star(&psi_star(&w).unwrap()).unwrap(), w);
            // psi(F v) = F psi(v), psi(K v) = K^{-1} psi(v)
            let f = act_gen(Gen::F(1), &w).unwrap();
            assert_eq!(psi(&f).unwrap(), act_gen(Gen::F(1), &psi(&w).unwrap()).unwrap());
            let kk = act_gen(Gen::K(1), &w).unwrap();
            assert_eq!(psi(&kk).unwrap(), act_gen(Gen::KInv(1), &psi(&w).unwrap()).unwrap());
            // adjointness: bar((psi v, w)) = (v, psi* w)
            let u = random_vec(&mut rng, rank, &s);
            assert_eq!(
                pairing(&psi(&u).unwrap(), &w).unwrap().bar(),
                pairing(&u, &psi_star(&w).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn reduced_word_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for k in 2..=4 {
            let mut alt = longest_word(k);
            alt.reverse();
            for _ in 0..10 {
                let s = random_signs(&mut rng, k);
                let w = random_vec(&mut rng, 3, &s);
                assert_eq!(psi_star(&w).unwrap(), psi_star_with_word(&w, &alt).unwrap());
            }
        }
    }

    #[test]
    fn dual_canonical_small() {
        let signs = parse_signs("+-").unwrap();
        assert_eq!(dual_canonical(2, &signs, &[1, 1], None).unwrap(), v(2, "+-", &[1, 1]));
        let mut expect = v(2, "+-", &[2, 2]);
        expect.add_term(vec![1, 1], &lq(&[(1, -1)]));
        assert_eq!(dual_canonical(2, &signs, &[2, 2], None).unwrap(), expect);
    }

    #[test]
    fn psi_star_lowers_in_bruhat_order() {
        for (m, n) in [(1, 1), (1, 2), (2, 2)] {
            let signs = tmn_signs(m, n);
            let p = Pyramid::left(m, n).unwrap();
            let win = Window::new(1, 3).unwrap();
            for key in all_keys(3, m + n) {
                let tab = |k: &[usize]| {
                    Tableau::new(p, k[..m].iter().map(|&x| x as i64).collect(), k[m..].iter().map(|&x| x as i64).collect()).unwrap()
                };
                let a = tab(&key);
                let img = psi_star(&TensorVec::basis(3, signs.clone(), key.clone()).unwrap()).unwrap();
                for (b, _) in img.terms() {
                    assert!(tab(b).bruhat_leq(&a, win).unwrap(), "{b:?} !<= {key:?}");
                }
            }
        }
    }

    #[test]
    fn canonical_and_dual_bases_are_dual() {
        for (m, n) in [(1, 1), (2, 1), (1, 2)] {
            let signs = tmn_signs(m, n);
            for w in all_weights(3, &signs) {
                let b = weight_basis(3, &signs, &w, BasisKind::Canonical, None).unwrap();
                let d = weight_basis(3, &signs, &w, BasisKind::DualCanonical, None).unwrap();
                for (ka, va) in b.iter() {
                    for (kb, vb) in d.iter() {
                        let expect = if ka == kb { LaurentQ::one() } else { LaurentQ::zero() };
                        assert_eq!(pairing(va, vb).unwrap(), expect);
                    }
                    assert_eq!(psi(va).unwrap(), *va);
                }
            }
        }
    }

    #[test]
    fn normal_form_relations() {
        use SGen::*;
        let nf = normal_form(&[X(2), X(1)]);
        assert_eq!(nf.get(&vec![X(1), X(2)]), Some(&LaurentQ::q()));
        let nf = normal_form(&[Y(2), X(2)]);
        assert_eq!(nf.get(&vec![X(2), Y(2)]), Some(&LaurentQ::q()));
        assert_eq!(nf.get(&vec![X(1), Y(1)]), Some(&(&LaurentQ::q_minus_qinv() * &neg_q_pow(1))));
        assert_eq!(straighten(&[2, 1], &[]), (1, vec![1, 2], vec![]));
        assert_eq!(straighten(&[], &[1, 2]), (1, vec![], vec![2, 1]));
        assert_eq!(straighten(&[1, 3], &[2, 1]).0, 0);
    }

    #[test]
    fn z_commutation_ladder() {
        for i in 1..=3 {
            let z = z_elem(i);
            for j in 1..=3 {
                let xz = s_mul(&s_gen(SGen::X(j)), &z);
                let zx = s_mul(&z, &s_gen(SGen::X(j)));
                let e = if j > i { 1 } else { -1 };
                let mut scaled = SVec::zero();
                scaled.add_scaled(&zx, &LaurentQ::qpow(e));
                assert_eq!(xz, scaled, "x_{j} z_{i}");
                let yz = s_mul(&s_gen(SGen::Y(j)), &z);
                let zy = s_mul(&z, &s_gen(SGen::Y(j)));
                let mut scaled = SVec::zero();
                scaled.add_scaled(&zy, &LaurentQ::qpow(-e));
                assert_eq!(yz, scaled, "y_{j} z_{i}");
                let zz = s_mul(&z, &z_elem(j));
                assert_eq!(zz, s_mul(&z_elem(j), &z));
            }
        }
    }

    #[test]
    fn projection_intertwines_bar_involutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for (m, n) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            let s = signs_string(&tmn_signs(m, n));
            for _ in 0..10 {
                let w = random_vec(&mut rng, 3, &s);
                let lhs = project_to_s(&psi_star(&w).unwrap()).unwrap();
                let rhs = psi_star_s(&project_to_s(&w).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn d_basis_examples() {
        let d = d_basis(&[2], &[2]).unwrap();
        assert_eq!(d.coeff(&[2], &[2]), LaurentQ::one());
        assert_eq!(d.coeff(&[1], &[1]), lq(&[(1, -1)]));
        let d = d_basis(&[1], &[3]).unwrap();
        assert_eq!(d, SVec::monomial(vec![1], vec![3]).unwrap());
        assert!(d_basis(&[2, 1], &[]).is_err());
    }

    #[test]
    fn projection_of_dual_canonical_basis() {
        for (m, n) in [(1, 1), (2, 1), (1, 2)] {
            let signs = tmn_signs(m, n);
            for key in all_keys(3, m + n) {
                let b = dual_canonical(3, &signs, &key, None).unwrap();
                let p = project_to_s(&b).unwrap();
                let (top, bottom) = (&key[..m], &key[m..]);
                if is_antidominant(top, bottom) {
                    assert_eq!(p, d_basis(top, bottom).unwrap(), "{key:?}");
                } else {
                    assert!(p.is_zero(), "{key:?}");
                }
            }
        }
    }

    #[test]
    fn u_in_d_expansion() {
        let xi = BlockKey::parse("mu=0;nu=0;t=1", 1, 1).unwrap();
        let e = expand_u_in_d(&xi, &Composition::eps(2, 1), 3).unwrap();
        assert_eq!(e[&Composition::eps(2, 1)], LaurentQ::one());
        assert_eq!(e[&Composition::eps(1, 1)], LaurentQ::q());
        for (m, n, ks) in [(1, 1, "mu=0;nu=0;t=1"), (2, 2, "mu=0;nu=0;t=2"), (2, 3, "mu=0;nu=3:1;t=2"), (2, 2, "mu=1:1;nu=2:1;t=1")] {
            let xi = BlockKey::parse(ks, m, n).unwrap();
            for lam in Composition::all_in(xi.t, 1, 3) {
                let exp = expand_u_in_d(&xi, &lam, 3).unwrap();
                assert_eq!(exp[&lam], LaurentQ::one());
                let (t, b) = tableau_for(&xi, &lam, 3).unwrap();
                let mut sum = SVec::zero();
                for (kappa, c) in &exp {
                    let (tk, bk) = tableau_for(&xi, kappa, 3).unwrap();
                    sum.add_scaled(&d_basis(&tk, &bk).unwrap(), c);
                }
                assert_eq!(sum, SVec::monomial(t, b).unwrap(), "{ks} {lam}");
            }
        }
    }

    #[test]
    fn pairing_formula_matches_canonical_basis() {
        let xi = BlockKey::parse("mu=0;nu=0;t=1", 1, 1).unwrap();
        let e2 = Composition::eps(2, 1);
        assert_eq!(pairing_formula(&xi, &e2, &e2, 3).unwrap(), lq(&[(0, 1), (2, 1)]));
        assert_eq!(pairing_canonical(&xi, &e2, &e2, 3, None).unwrap(), lq(&[(0, 1), (2, 1)]));
        for (m, n, ks) in [(1, 1, "mu=0;nu=0;t=1"), (1, 2, "mu=0;nu=3:1;t=1"), (2, 2, "mu=0;nu=0;t=2")] {
            let xi = BlockKey::parse(ks, m, n).unwrap();
            let labels = Composition::all_in(xi.t, 1, 3);
            for a in &labels {
                for b in &labels {
                    assert_eq!(
                        pairing_formula(&xi, a, b, 3).unwrap(),
                        pairing_canonical(&xi, a, b, 3, None).unwrap(),
                        "{ks} {a} {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn stable_pairing_matches_graded_cartan() {
        let xi = BlockKey::parse("mu=0;nu=0;t=1", 1, 1).unwrap();
        for (a, b) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let (ka, kb) = (Composition::eps(a, 1), Composition::eps(b, 1));
            let (nn, val) = stable_pairing(&xi, &ka, &kb, 4, 8).unwrap().unwrap();
            assert!(nn >= 4);
            assert_eq!(val, graded_cartan(&xi, &kb, &ka).unwrap());
        }
    }

    #[test]
    fn key_parsing() {
        assert_eq!(parse_key("2;2").unwrap(), vec![2, 2]);
        assert_eq!(parse_key("1,2;").unwrap(), vec![1, 2]);
        assert!(parse_key("12").is_err());
    }

    #[test]
    fn tensor_json_round_trip() {
        let b = dual_canonical(2, &parse_signs("+-").unwrap(), &[2, 2], None).unwrap();
        let j = b.to_json();
        assert_eq!(TensorVec::from_json(&j).unwrap(), b);
        assert_eq!(
            serde_json::to_string(&b.terms_json()).unwrap(),
            r#"[{"key":[2,2],"coeff":{"0":"1"}},{"key":[1,1],"coeff":{"1":"-1"}}]"#
        );
    }

    #[test]
    fn disk_cache_gives_identical_bases() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let signs = tmn_signs(1, 1);
        let w = vec![0, 0, 0];
        let fresh = lusztig_uncached(3, &signs, &w);
        let stored = weight_basis(3, &signs, &w, BasisKind::DualCanonical, Some(&cache)).unwrap();
        assert_eq!(*stored, fresh);
        let text = basis_to_json(&fresh);
        assert_eq!(basis_from_json(&text).unwrap(), fresh);
    }

    fn lusztig_uncached(rank: usize, signs: &[Sign], w: &[i64]) -> WeightBasis {
        let mut images = BTreeMap::new();
        for k in weight_space(rank, signs, w) {
            images.insert(k.clone(), psi_star(&TensorVec::basis(rank, signs.to_vec(), k).unwrap()).unwrap());
        }
        lusztig(rank, signs, &images).unwrap()
    }
}
