//! Pyramids, tableaux, compositions, block keys and the moves between blocks.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{invalid, Error, Result};

/// Two-row shape with `m` boxes on top, `n` below, `s_minus` single-height
/// columns on the left and `s_plus` on the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pyramid {
    pub m: usize,
    pub n: usize,
    pub s_minus: usize,
    pub s_plus: usize,
}

impl Pyramid {
    pub fn new(m: usize, n: usize, s_minus: usize) -> Result<Self> {
        if m > n {
            return invalid(format!("pyramid needs m <= n, got m={m}, n={n}"));
        }
        if s_minus > n - m {
            return invalid(format!("s_minus={s_minus} exceeds n-m={}", n - m));
        }
        Ok(Self {
            m,
            n,
            s_minus,
            s_plus: n - m - s_minus,
        })
    }

    /// Left-justified pyramid (`s_minus = 0`).
    pub fn left(m: usize, n: usize) -> Result<Self> {
        Self::new(m, n, 0)
    }

    pub fn boxes(&self) -> usize {
        self.m + self.n
    }

    fn check_box(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.boxes() {
            return invalid(format!("box index {i} outside 1..={}", self.boxes()));
        }
        Ok(())
    }

    pub fn col(&self, i: usize) -> Result<usize> {
        self.check_box(i)?;
        Ok(if i <= self.m { self.s_minus + i } else { i - self.m })
    }

    pub fn row(&self, i: usize) -> Result<usize> {
        self.check_box(i)?;
        Ok(if i <= self.m { 1 } else { 2 })
    }

    /// Degree `col(j) - col(i)` of the matrix unit `e_{i,j}`.
    pub fn deg_entry(&self, i: usize, j: usize) -> Result<i64> {
        Ok(self.col(j)? as i64 - self.col(i)? as i64)
    }
}

/// Integer filling of a pyramid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "TableauRepr", into = "TableauRepr")]
pub struct Tableau {
    pub pyramid: Pyramid,
    pub top: Vec<i64>,
    pub bottom: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct TableauRepr {
    m: usize,
    n: usize,
    s_minus: usize,
    top: Vec<i64>,
    bottom: Vec<i64>,
}

impl TryFrom<TableauRepr> for Tableau {
    type Error = Error;
    fn try_from(r: TableauRepr) -> Result<Self> {
        Tableau::new(Pyramid::new(r.m, r.n, r.s_minus)?, r.top, r.bottom)
    }
}

impl From<Tableau> for TableauRepr {
    fn from(t: Tableau) -> Self {
        TableauRepr {
            m: t.pyramid.m,
            n: t.pyramid.n,
            s_minus: t.pyramid.s_minus,
            top: t.top,
            bottom: t.bottom,
        }
    }
}

/// Inclusive bounds on tableau entries used for finite enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return invalid(format!("empty window {lo}..{hi}"));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn width(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }
}

impl FromStr for Window {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| Error::Invalid(format!("window {s:?} must look like lo..hi")))?;
        let lo = a.trim().parse().map_err(|_| Error::Invalid(format!("bad window bound {a:?}")))?;
        let hi = b.trim().parse().map_err(|_| Error::Invalid(format!("bad window bound {b:?}")))?;
        Window::new(lo, hi)
    }
}

fn multiset(xs: &[i64]) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for &x in xs {
        *out.entry(x).or_insert(0) += 1;
    }
    out
}

impl Tableau {
    pub fn new(pyramid: Pyramid, top: Vec<i64>, bottom: Vec<i64>) -> Result<Self> {
        if top.len() != pyramid.m || bottom.len() != pyramid.n {
            return invalid(format!(
                "row lengths {}|{} do not match pyramid {}|{}",
                top.len(),
                bottom.len(),
                pyramid.m,
                pyramid.n
            ));
        }
        Ok(Self { pyramid, top, bottom })
    }

    /// Entry of box `j` (1-based, top row first).
    pub fn entry(&self, j: usize) -> i64 {
        if j <= self.pyramid.m {
            self.top[j - 1]
        } else {
            self.bottom[j - self.pyramid.m - 1]
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = i64> + '_ {
        self.top.iter().chain(self.bottom.iter()).copied()
    }

    fn with_rows(&self, top: Vec<i64>, bottom: Vec<i64>) -> Self {
        Self {
            pyramid: self.pyramid,
            top,
            bottom,
        }
    }

    /// Indices `(i, s_minus + i)` (0-based into top/bottom) of column-aligned
    /// pairs with equal entries.
    fn matched_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.pyramid.m)
            .map(|i| (i, self.pyramid.s_minus + i))
            .filter(|&(i, j)| self.top[i] == self.bottom[j])
            .collect()
    }

    pub fn defect(&self) -> usize {
        self.matched_pairs().len()
    }

    /// Maximal defect over row rearrangements, via multiset intersection.
    pub fn atyp(&self) -> usize {
        let (a, b) = (multiset(&self.top), multiset(&self.bottom));
        a.iter().map(|(v, k)| (*k).min(*b.get(v).unwrap_or(&0))).sum()
    }

    pub fn is_dominant(&self) -> bool {
        self.top.windows(2).all(|w| w[0] > w[1]) && self.bottom.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_antidominant(&self) -> bool {
        self.top.windows(2).all(|w| w[0] <= w[1]) && self.bottom.windows(2).all(|w| w[0] >= w[1])
    }

    /// Row-sorted representative: top ascending, bottom descending.
    pub fn antidominant_form(&self) -> Self {
        let mut top = self.top.clone();
        let mut bottom = self.bottom.clone();
        top.sort_unstable();
        bottom.sort_unstable_by(|a, b| b.cmp(a));
        self.with_rows(top, bottom)
    }

    /// All tableaux obtained by lowering a subset of the matched pairs by one.
    pub fn down_up(&self) -> BTreeSet<Tableau> {
        let pairs = self.matched_pairs();
        let mut out = BTreeSet::new();
        for mask in 0u64..(1u64 << pairs.len()) {
            let mut t = self.clone();
            for (k, &(i, j)) in pairs.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    t.top[i] -= 1;
                    t.bottom[j] -= 1;
                }
            }
            out.insert(t);
        }
        out
    }

    /// Tableaux covered by `self` in the Bruhat order.
    pub fn bruhat_lower_covers(&self) -> Vec<Tableau> {
        let (m, n) = (self.top.len(), self.bottom.len());
        let mut out = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                if self.top[i] > self.top[j] {
                    let mut t = self.clone();
                    t.top.swap(i, j);
                    out.push(t);
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.bottom[i] < self.bottom[j] {
                    let mut t = self.clone();
                    t.bottom.swap(i, j);
                    out.push(t);
                }
            }
        }
        for i in 0..m {
            for j in 0..n {
                if self.top[i] == self.bottom[j] {
                    let mut t = self.clone();
                    t.top[i] -= 1;
                    t.bottom[j] -= 1;
                    out.push(t);
                }
            }
        }
        out
    }

    /// Whether `self` precedes or equals `other` in the Bruhat order.
    ///
    /// The search walks down from `other`. Row minima never increase along
    /// cover moves, so states leaving the window cannot reach `self`; the only
    /// undecidable case is an input outside the window.
    pub fn bruhat_leq(&self, other: &Tableau, w: Window) -> Result<bool> {
        if self.pyramid != other.pyramid {
            return invalid("Bruhat comparison across different pyramids");
        }
        for t in [self, other] {
            if !t.entries().all(|v| w.contains(v)) {
                return Err(Error::Undecidable(format!(
                    "entries of {t} leave window {}..{}",
                    w.lo, w.hi
                )));
            }
        }
        let target_sum: i64 = self.entries().sum();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([other.clone()]);
        seen.insert(other.clone());
        while let Some(cur) = queue.pop_front() {
            if cur == *self {
                return Ok(true);
            }
            for next in cur.bruhat_lower_covers() {
                if next.entries().sum::<i64>() < target_sum || !next.entries().all(|v| v >= w.lo) {
                    continue;
                }
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        Ok(false)
    }

    pub fn block_key(&self) -> BlockKey {
        let (a, b) = (multiset(&self.top), multiset(&self.bottom));
        let mut t = 0;
        let mut mu = BTreeMap::new();
        let mut nu = BTreeMap::new();
        for v in a.keys().chain(b.keys()).collect::<BTreeSet<_>>() {
            let (x, y) = (*a.get(v).unwrap_or(&0), *b.get(v).unwrap_or(&0));
            let k = x.min(y);
            t += k;
            mu.insert(*v, (x - k) as u64);
            nu.insert(*v, (y - k) as u64);
        }
        BlockKey {
            mu: Composition::from_map(&mu),
            nu: Composition::from_map(&nu),
            t: t as u64,
            m: self.pyramid.m,
            n: self.pyramid.n,
        }
    }

    /// The weight `sum_i eps_{a_i} - sum_j eps_{b_j}` as a sparse map.
    pub fn weight_of(&self) -> BTreeMap<i64, i64> {
        let mut out = BTreeMap::new();
        for &a in &self.top {
            *out.entry(a).or_insert(0) += 1;
        }
        for &b in &self.bottom {
            *out.entry(b).or_insert(0) -= 1;
        }
        out.retain(|_, v| *v != 0);
        out
    }

    /// All tableaux of the given shape with entries in the window.
    pub fn enumerate(p: Pyramid, w: Window) -> Vec<Tableau> {
        let k = p.boxes();
        let vals: Vec<i64> = (w.lo..=w.hi).collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; k];
        loop {
            let e: Vec<i64> = idx.iter().map(|&i| vals[i]).collect();
            out.push(Tableau {
                pyramid: p,
                top: e[..p.m].to_vec(),
                bottom: e[p.m..].to_vec(),
            });
            let mut pos = 0;
            loop {
                if pos == k {
                    return out;
                }
                idx[pos] += 1;
                if idx[pos] < vals.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[i64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{};{}", join(&self.top), join(&self.bottom))
    }
}

/// Parse `"a1,a2;b1,b2"` into rows.
pub fn parse_rows(s: &str) -> Result<(Vec<i64>, Vec<i64>)> {
    let (a, b) = s
        .split_once(';')
        .ok_or_else(|| Error::Invalid(format!("tableau {s:?} must look like top;bottom")))?;
    let row = |r: &str| -> Result<Vec<i64>> {
        r.split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse().map_err(|_| Error::Invalid(format!("bad entry {x:?}"))))
            .collect()
    };
    Ok((row(a)?, row(b)?))
}

/// Finitely supported map `Z -> N`, stored as `parts[k]` at position
/// `offset + k` with no zero parts at either end.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "CompositionRepr")]
pub struct Composition {
    offset: i64,
    parts: Vec<u64>,
}

#[derive(Deserialize)]
struct CompositionRepr {
    offset: i64,
    parts: Vec<u64>,
}

impl TryFrom<CompositionRepr> for Composition {
    type Error = Error;
    fn try_from(r: CompositionRepr) -> Result<Self> {
        Ok(Composition::new(r.offset, r.parts))
    }
}

impl Composition {
    pub fn new(offset: i64, parts: Vec<u64>) -> Self {
        let mut c = Self { offset, parts };
        c.normalize();
        c
    }

    fn normalize(&mut self) {
        while self.parts.last() == Some(&0) {
            self.parts.pop();
        }
        let lead = self.parts.iter().take_while(|&&p| p == 0).count();
        self.parts.drain(..lead);
        self.offset += lead as i64;
        if self.parts.is_empty() {
            self.offset = 0;
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `k` copies of `eps_i`.
    pub fn eps(i: i64, k: u64) -> Self {
        Self::new(i, vec![k])
    }

    pub fn from_map(map: &BTreeMap<i64, u64>) -> Self {
        let mut c = Self::zero();
        for (&i, &v) in map {
            c.set(i, v);
        }
        c
    }

    pub fn from_values(pairs: impl IntoIterator<Item = (i64, u64)>) -> Self {
        let mut c = Self::zero();
        for (i, v) in pairs {
            c.set(i, c.get(i) + v);
        }
        c
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn get(&self, i: i64) -> u64 {
        let k = i - self.offset;
        if k < 0 || k as usize >= self.parts.len() {
            0
        } else {
            self.parts[k as usize]
        }
    }

    pub fn set(&mut self, i: i64, v: u64) {
        if self.parts.is_empty() {
            if v == 0 {
                return;
            }
            self.offset = i;
            self.parts = vec![v];
            return;
        }
        if i < self.offset {
            let pad = (self.offset - i) as usize;
            let mut p = vec![0; pad];
            p.append(&mut self.parts);
            self.parts = p;
            self.offset = i;
        }
        let k = (i - self.offset) as usize;
        if k >= self.parts.len() {
            self.parts.resize(k + 1, 0);
        }
        self.parts[k] = v;
        self.normalize();
    }

    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// Compact text form `offset:p0,p1,..`, or `0` for the zero composition.
    pub fn short(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let p: Vec<String> = self.parts.iter().map(|v| v.to_string()).collect();
        format!("{}:{}", self.offset, p.join(","))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Inclusive support bounds, or `None` for the zero composition.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.parts.is_empty() {
            None
        } else {
            Some((self.offset, self.offset + self.parts.len() as i64 - 1))
        }
    }

    pub fn width(&self) -> usize {
        self.parts.len()
    }

    /// Nonzero parts with their positions.
    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0)
            .map(move |(k, &p)| (self.offset + k as i64, p))
    }

    pub fn add(&self, other: &Composition) -> Composition {
        Composition::from_values(self.iter().chain(other.iter()))
    }

    /// `self - other`, or `None` if some part would go negative.
    pub fn checked_sub(&self, other: &Composition) -> Option<Composition> {
        let mut out = self.clone();
        for (i, v) in other.iter() {
            let cur = out.get(i);
            if cur < v {
                return None;
            }
            out.set(i, cur - v);
        }
        Some(out)
    }

    /// `self + k alpha_i`: moves `k` units from part `i+1` to part `i`.
    pub fn plus_alpha(&self, i: i64, k: u64) -> Option<Composition> {
        let from = self.get(i + 1);
        if from < k {
            return None;
        }
        let mut out = self.clone();
        out.set(i + 1, from - k);
        out.set(i, out.get(i) + k);
        Some(out)
    }

    /// Translate: part `i` moves to position `i + s`.
    pub fn shift(&self, s: i64) -> Composition {
        if self.is_zero() {
            return Self::zero();
        }
        Self::new(self.offset + s, self.parts.clone())
    }

    /// Duality `i -> -i`.
    pub fn dual(&self) -> Composition {
        match self.support() {
            None => Self::zero(),
            Some((_, hi)) => {
                let mut p = self.parts.clone();
                p.reverse();
                Self::new(-hi, p)
            }
        }
    }

    /// Exchange parts `i` and `i + 1`.
    pub fn swap_adjacent(&self, i: i64) -> Composition {
        let mut out = self.clone();
        let (a, b) = (self.get(i), self.get(i + 1));
        out.set(i, b);
        out.set(i + 1, a);
        out
    }

    /// Transpose partition, stored with offset 1: part `i` counts the nonzero
    /// parts of `self` that are at least `i`.
    pub fn transpose(&self) -> Composition {
        let max = self.parts.iter().copied().max().unwrap_or(0);
        let parts = (1..=max)
            .map(|i| self.parts.iter().filter(|&&p| p >= i).count() as u64)
            .collect();
        Composition::new(1, parts)
    }

    /// Nonzero parts in order.
    pub fn strictify(&self) -> Vec<u64> {
        self.parts.iter().copied().filter(|&p| p > 0).collect()
    }

    /// Equal up to translation and duality.
    pub fn equal_tdual(&self, other: &Composition) -> bool {
        let mut rev = other.parts.clone();
        rev.reverse();
        self.parts == other.parts || self.parts == rev
    }

    /// All compositions of `t` supported in `lo..=hi`, in lexicographic order
    /// of the part vector.
    pub fn all_in(t: u64, lo: i64, hi: i64) -> Vec<Composition> {
        let mut out = Vec::new();
        if hi < lo {
            if t == 0 {
                out.push(Self::zero());
            }
            return out;
        }
        let len = (hi - lo + 1) as usize;
        let mut cur = vec![0u64; len];
        fn rec(pos: usize, left: u64, cur: &mut Vec<u64>, lo: i64, out: &mut Vec<Composition>) {
            if pos + 1 == cur.len() {
                cur[pos] = left;
                out.push(Composition::new(lo, cur.clone()));
                cur[pos] = 0;
                return;
            }
            for v in (0..=left).rev() {
                cur[pos] = v;
                rec(pos + 1, left - v, cur, lo, out);
            }
            cur[pos] = 0;
        }
        rec(0, t, &mut cur, lo, &mut out);
        out
    }
}

impl fmt::Debug for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "offset={};parts={}", self.offset, parts.join(","))
    }
}

impl FromStr for Composition {
    type Err = Error;
    /// Accepts `offset=o;parts=p0,p1,..`, the short form `o:p0,p1,..`, or `0`
    /// for the zero composition.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(Self::zero());
        }
        let bad = || Error::Invalid(format!("bad composition {s:?}"));
        let parse_parts = |p: &str| -> Result<Vec<u64>> {
            p.split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| x.parse().map_err(|_| bad()))
                .collect()
        };
        if let Some((o, p)) = s.split_once(':') {
            let offset = o.trim().parse().map_err(|_| bad())?;
            return Ok(Self::new(offset, parse_parts(p)?));
        }
        let mut offset = None;
        let mut parts = None;
        for field in s.split(';') {
            let (k, v) = field.split_once('=').ok_or_else(bad)?;
            match k.trim() {
                "offset" => offset = Some(v.trim().parse().map_err(|_| bad())?),
                "parts" => parts = Some(parse_parts(v)?),
                _ => return Err(bad()),
            }
        }
        Ok(Self::new(offset.unwrap_or(0), parts.ok_or_else(bad)?))
    }
}

/// Linkage class label `(mu, nu; t)` inside gl(m|n).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockKey {
    pub mu: Composition,
    pub nu: Composition,
    pub t: u64,
    pub m: usize,
    pub n: usize,
}

/// Which block-to-block moves a closure search may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveSet {
    Morita,
    Derived,
    Both,
}

impl BlockKey {
    pub fn new(mu: Composition, nu: Composition, t: u64, m: usize, n: usize) -> Result<Self> {
        let k = Self { mu, nu, t, m, n };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m > self.n {
            return invalid(format!("block sizes need m <= n, got {}|{}", self.m, self.n));
        }
        if self.t as usize > self.m {
            return invalid(format!("atypicality {} exceeds m={}", self.t, self.m));
        }
        if self.mu.total() + self.t != self.m as u64 || self.nu.total() + self.t != self.n as u64 {
            return invalid(format!(
                "|mu|={}, |nu|={}, t={} incompatible with m={}, n={}",
                self.mu.total(),
                self.nu.total(),
                self.t,
                self.m,
                self.n
            ));
        }
        if self.mu.iter().any(|(i, _)| self.nu.get(i) > 0) {
            return invalid("mu and nu must have disjoint supports");
        }
        Ok(())
    }

    pub fn gamma(&self) -> Composition {
        self.mu.add(&self.nu)
    }

    /// Parse `mu=..;nu=..;t=..` with compositions in short form.
    pub fn parse(s: &str, m: usize, n: usize) -> Result<Self> {
        let mut mu = Composition::zero();
        let mut nu = Composition::zero();
        let mut t = None;
        for field in s.split(';') {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("bad block field {field:?}")))?;
            match k.trim() {
                "mu" => mu = v.parse()?,
                "nu" => nu = v.parse()?,
                "t" => t = Some(v.trim().parse().map_err(|_| Error::Invalid(format!("bad t {v:?}")))?),
                other => return invalid(format!("unknown block field {other:?}")),
            }
        }
        let t = t.ok_or_else(|| Error::Invalid("block key needs t=".into()))?;
        Self::new(mu, nu, t, m, n)
    }

    /// Compact text form `mu=o:p..;nu=o:p..;t=k`.
    pub fn short(&self) -> String {
        format!("mu={};nu={};t={}", self.mu.short(), self.nu.short(), self.t)
    }

    /// Anti-dominant tableau with `lambda_i + mu_i` entries `i` on top and
    /// `lambda_i + nu_i` below.
    pub fn tableau_of(&self, lambda: &Composition, p: Pyramid) -> Result<Tableau> {
        if lambda.total() != self.t {
            return invalid(format!("|lambda|={} but t={}", lambda.total(), self.t));
        }
        if p.m != self.m || p.n != self.n {
            return invalid("pyramid does not match block sizes");
        }
        let top_c = lambda.add(&self.mu);
        let bot_c = lambda.add(&self.nu);
        let mut top = Vec::new();
        for (i, v) in top_c.iter() {
            top.extend(std::iter::repeat_n(i, v as usize));
        }
        let mut bottom = Vec::new();
        for (i, v) in bot_c.iter() {
            bottom.extend(std::iter::repeat_n(i, v as usize));
        }
        bottom.reverse();
        Tableau::new(p, top, bottom)
    }

    /// The composition `lambda` with `tableau_of(lambda)` row-equivalent to `a`.
    pub fn lambda_of(a: &Tableau) -> Composition {
        let (x, y) = (multiset(&a.top), multiset(&a.bottom));
        Composition::from_values(
            x.iter()
                .map(|(v, k)| (*v, (*k).min(*y.get(v).unwrap_or(&0)) as u64)),
        )
    }

    fn with(&self, mu: Composition, nu: Composition) -> Self {
        Self {
            mu,
            nu,
            t: self.t,
            m: self.m,
            n: self.n,
        }
    }

    pub fn shift(&self, s: i64) -> Self {
        self.with(self.mu.shift(s), self.nu.shift(s))
    }

    pub fn dual(&self) -> Self {
        self.with(self.mu.dual(), self.nu.dual())
    }

    /// Swap parts `i`, `i+1` of both `mu` and `nu`.
    pub fn derived_move(&self, i: i64) -> Self {
        self.with(self.mu.swap_adjacent(i), self.nu.swap_adjacent(i))
    }

    fn move_range(&self) -> Option<(i64, i64)> {
        self.gamma().support().map(|(lo, hi)| (lo - 1, hi))
    }

    /// Keys reachable by one evident Morita equivalence.
    pub fn morita_moves(&self) -> BTreeSet<BlockKey> {
        let mut out = BTreeSet::new();
        out.insert(self.shift(1));
        out.insert(self.shift(-1));
        out.insert(self.dual());
        if self.m == self.n {
            out.insert(self.with(self.nu.clone(), self.mu.clone()));
        }
        if self.t == 0 {
            if let Some((lo, hi)) = self.move_range() {
                for i in lo..=hi {
                    let mu_ok = self.mu.get(i) * self.mu.get(i + 1) == 0;
                    let nu_ok = self.nu.get(i) * self.nu.get(i + 1) == 0;
                    if mu_ok && nu_ok {
                        out.insert(self.derived_move(i));
                    }
                }
            }
        }
        out.remove(self);
        out
    }

    /// `(t, m, n, (mu + nu)^T)`.
    pub fn invariant_signature(&self) -> (u64, usize, usize, Composition) {
        (self.t, self.m, self.n, self.gamma().transpose())
    }

    /// Representative modulo translation and duality: the support of `gamma`
    /// starts at 0 and `gamma` is lexicographically no larger than its mirror.
    pub fn normalized(&self) -> Self {
        let base = match self.gamma().support() {
            None => return self.clone(),
            Some((lo, _)) => self.shift(-lo),
        };
        let flipped = {
            let d = base.dual();
            let lo = d.gamma().support().map(|s| s.0).unwrap_or(0);
            d.shift(-lo)
        };
        let key = |k: &BlockKey| (k.gamma().parts().to_vec(), k.mu.clone(), k.nu.clone());
        if key(&flipped) < key(&base) {
            flipped
        } else {
            base
        }
    }

    /// Closure of the normalized key under the chosen moves, restricted to
    /// keys whose `gamma` has support width at most `max_width`.
    pub fn closure(&self, moves: MoveSet, max_width: usize) -> BTreeSet<BlockKey> {
        let start = self.normalized();
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(cur) = queue.pop_front() {
            let mut next: Vec<BlockKey> = Vec::new();
            if matches!(moves, MoveSet::Morita | MoveSet::Both) {
                next.extend(cur.morita_moves());
            }
            if matches!(moves, MoveSet::Derived | MoveSet::Both) {
                if let Some((lo, hi)) = cur.move_range() {
                    next.extend((lo..=hi).map(|i| cur.derived_move(i)));
                }
            }
            for k in next {
                let k = k.normalized();
                if k.gamma().width() > max_width {
                    continue;
                }
                if seen.insert(k.clone()) {
                    queue.push_back(k);
                }
            }
        }
        seen
    }

    /// All block keys for gl(m|n) whose `gamma` lies in `lo..=hi`.
    pub fn all_in(m: usize, n: usize, lo: i64, hi: i64) -> Vec<BlockKey> {
        let mut out = Vec::new();
        for t in 0..=m as u64 {
            for mu in Composition::all_in(m as u64 - t, lo, hi) {
                for nu in Composition::all_in(n as u64 - t, lo, hi) {
                    if mu.iter().any(|(i, _)| nu.get(i) > 0) {
                        continue;
                    }
                    out.push(BlockKey {
                        mu: mu.clone(),
                        nu,
                        t,
                        m,
                        n,
                    });
                }
            }
        }
        out
    }
}

impl fmt::Display for BlockKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.short())
    }
}

fn perms(v: &[i64]) -> Vec<Vec<i64>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let x = rest.remove(i);
        for mut p in perms(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Closure of a tableau under row permutations and the down-up relation,
/// restricted to the window.
pub fn linkage_closure(a: &Tableau, w: Window) -> BTreeSet<Tableau> {
    let mut seen = BTreeSet::from([a.clone()]);
    let mut queue = VecDeque::from([a.clone()]);
    while let Some(cur) = queue.pop_front() {
        let mut next = Vec::new();
        for t in perms(&cur.top) {
            for b in perms(&cur.bottom) {
                next.push(Tableau::new(cur.pyramid, t.clone(), b).unwrap());
            }
        }
        next.extend(cur.down_up());
        // inverse of down_up: raise aligned equal pairs
        for i in 0..cur.top.len() {
            let j = cur.pyramid.s_minus + i;
            if cur.top[i] == cur.bottom[j] {
                let mut t = cur.clone();
                t.top[i] += 1;
                t.bottom[j] += 1;
                next.push(t);
            }
        }
        for t in next {
            if t.entries().all(|v| w.contains(v)) && seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tab(m: usize, n: usize, s: usize, top: &[i64], bottom: &[i64]) -> Tableau {
        Tableau::new(Pyramid::new(m, n, s).unwrap(), top.to_vec(), bottom.to_vec()).unwrap()
    }

    #[test]
    fn pyramid_degrees() {
        let p = Pyramid::new(2, 5, 2).unwrap();
        assert_eq!(p.deg_entry(1, 2).unwrap(), 1);
        assert_eq!(p.deg_entry(4, 4).unwrap(), 0);
        assert_eq!(p.deg_entry(1, 3).unwrap(), -2);
        assert!(p.deg_entry(0, 1).is_err());
        assert!(p.deg_entry(1, 8).is_err());
        assert_eq!(p.s_plus, 1);
        assert!(Pyramid::new(3, 2, 0).is_err());
        assert!(Pyramid::new(1, 2, 2).is_err());
        let p0 = Pyramid::new(0, 3, 2).unwrap();
        assert_eq!(p0.s_plus, 1);
    }

    #[test]
    fn defect_and_atypicality() {
        let a = tab(1, 1, 0, &[5], &[5]);
        assert_eq!((a.defect(), a.atyp()), (1, 1));
        let b = tab(2, 2, 0, &[3, 1], &[1, 3]);
        assert_eq!((b.defect(), b.atyp()), (0, 2));
        let c = tab(2, 3, 1, &[4, 2], &[1, 3, 5]);
        assert_eq!(c.atyp(), 0);
    }

    #[test]
    fn dominance() {
        assert!(tab(3, 3, 0, &[1, 1, 2], &[3, 2, 2]).is_antidominant());
        assert!(tab(2, 2, 0, &[2, 1], &[1, 2]).is_dominant());
        let c = tab(2, 2, 0, &[1, 2], &[1, 2]);
        assert!(!c.is_dominant() && !c.is_antidominant());
    }

    #[test]
    fn down_up_sets() {
        let a = tab(1, 1, 0, &[5], &[3]);
        assert_eq!(a.down_up().len(), 1);
        let b = tab(1, 1, 0, &[5], &[5]);
        let expect: BTreeSet<_> = [b.clone(), tab(1, 1, 0, &[4], &[4])].into_iter().collect();
        assert_eq!(b.down_up(), expect);
        assert_eq!(tab(2, 2, 0, &[3, 3], &[3, 3]).down_up().len(), 4);
    }

    #[test]
    fn bruhat_examples() {
        let w = Window::new(0, 6).unwrap();
        let a = tab(2, 2, 0, &[1, 2], &[4, 4]);
        let b = tab(2, 2, 0, &[2, 1], &[4, 4]);
        assert!(a.bruhat_leq(&b, w).unwrap());
        assert!(!b.bruhat_leq(&a, w).unwrap());
        assert!(a.bruhat_leq(&a, w).unwrap());
        let c = tab(1, 1, 0, &[4], &[4]);
        let d = tab(1, 1, 0, &[5], &[5]);
        assert!(c.bruhat_leq(&d, w).unwrap());
        assert!(!d.bruhat_leq(&c, w).unwrap());
        let narrow = Window::new(5, 5).unwrap();
        assert!(matches!(c.bruhat_leq(&d, narrow), Err(Error::Undecidable(_))));
    }

    #[test]
    fn block_keys() {
        let a = tab(1, 1, 0, &[5], &[5]);
        let k = a.block_key();
        assert_eq!(k, BlockKey::new(Composition::zero(), Composition::zero(), 1, 1, 1).unwrap());
        assert_eq!(k.tableau_of(&Composition::eps(5, 1), a.pyramid).unwrap(), a);
        let b = tab(1, 1, 0, &[5], &[3]);
        assert_eq!(
            b.block_key(),
            BlockKey::new(Composition::eps(5, 1), Composition::eps(3, 1), 0, 1, 1).unwrap()
        );
        assert!(k.tableau_of(&Composition::eps(5, 2), a.pyramid).is_err());
    }

    #[test]
    fn weights() {
        assert!(tab(1, 1, 0, &[5], &[5]).weight_of().is_empty());
        let w = tab(1, 1, 0, &[5], &[3]).weight_of();
        assert_eq!(w, BTreeMap::from([(3, -1), (5, 1)]));
    }

    #[test]
    fn composition_ops() {
        let lam = Composition::new(-3, vec![0, 2, 4, 0, 0, 1, 0]);
        assert_eq!(lam.offset(), -2);
        assert_eq!(lam.strictify(), vec![2, 4, 1]);
        assert_eq!(lam.transpose(), Composition::new(1, vec![3, 2, 1, 1]));
        assert!(lam.equal_tdual(&lam.dual()));
        let a = Composition::new(0, vec![2, 4, 1]);
        let b = Composition::new(7, vec![1, 4, 2]);
        assert!(a.equal_tdual(&b));
        assert!(!a.equal_tdual(&Composition::new(0, vec![4, 2, 1])));
        assert_eq!("offset=0;parts=1".parse::<Composition>().unwrap(), Composition::eps(0, 1));
        assert_eq!("2:1,0,3".parse::<Composition>().unwrap().get(4), 3);
        assert_eq!(lam.to_string().parse::<Composition>().unwrap(), lam);
        let j = serde_json::to_string(&lam).unwrap();
        assert_eq!(j, r#"{"offset":-2,"parts":[2,4,0,0,1]}"#);
        assert_eq!(serde_json::from_str::<Composition>(&j).unwrap(), lam);
        assert_eq!(Composition::all_in(2, 0, 2).len(), 6);
    }

    #[test]
    fn moves_and_signatures() {
        let k = BlockKey::parse("mu=0:1;nu=2:1,1;t=1", 2, 3).unwrap();
        let d = k.derived_move(0);
        assert_eq!(d.mu, Composition::eps(1, 1));
        assert_eq!(d.invariant_signature(), k.invariant_signature());
        // typical key with matching strictifications is Morita-reachable
        let x = BlockKey::parse("mu=0:1,0,1;nu=1:1,0,1;t=0", 2, 2).unwrap();
        let y = BlockKey::parse("mu=0:1,1;nu=2:1,1;t=0", 2, 2).unwrap();
        assert!(x.closure(MoveSet::Morita, 4).contains(&y.normalized()));
        assert_eq!(x.normalized(), x.shift(5).dual().normalized());
    }

    #[test]
    fn json_tableau() {
        let a = tab(1, 2, 1, &[5], &[3, 5]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"m":1,"n":2,"s_minus":1,"top":[5],"bottom":[3,5]}"#);
        assert_eq!(serde_json::from_str::<Tableau>(&s).unwrap(), a);
    }

    #[test]
    fn atyp_matches_brute_force() {
        for (m, n) in [(1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (3, 3)] {
            let p = Pyramid::left(m, n).unwrap();
            for a in Tableau::enumerate(p, Window::new(1, 3).unwrap()) {
                let best = perms(&a.top)
                    .iter()
                    .flat_map(|t| perms(&a.bottom).into_iter().map(move |b| (t.clone(), b)))
                    .map(|(t, b)| Tableau::new(p, t, b).unwrap().defect())
                    .max()
                    .unwrap();
                assert_eq!(a.atyp(), best, "{a}");
            }
        }
    }

    #[test]
    fn block_key_oracle_small() {
        let w = Window::new(1, 6).unwrap();
        let p = Pyramid::left(1, 1).unwrap();
        let cls = linkage_closure(&Tableau::new(p, vec![5], vec![5]).unwrap(), w);
        assert!(cls.iter().all(|t| t.block_key() == BlockKey::new(Composition::zero(), Composition::zero(), 1, 1, 1).unwrap()));
        assert_eq!(cls.len(), 6);
        let cls = linkage_closure(&Tableau::new(p, vec![5], vec![3]).unwrap(), w);
        assert_eq!(cls.len(), 1);
    }

    proptest! {
        #[test]
        fn down_up_count(top in prop::collection::vec(1i64..4, 2), bottom in prop::collection::vec(1i64..4, 3)) {
            let a = Tableau::new(Pyramid::new(2, 3, 1).unwrap(), top, bottom).unwrap();
            prop_assert_eq!(a.down_up().len(), 1usize << a.defect());
        }

        #[test]
        fn round_trip_key(top in prop::collection::vec(-2i64..3, 2), bottom in prop::collection::vec(-2i64..3, 3)) {
            let p = Pyramid::new(2, 3, 0).unwrap();
            let a = Tableau::new(p, top, bottom).unwrap().antidominant_form();
            let k = a.block_key();
            k.validate().unwrap();
            prop_assert_eq!(k.tableau_of(&BlockKey::lambda_of(&a), p).unwrap().antidominant_form(), a);
        }

        #[test]
        fn bruhat_implies_linked(top in prop::collection::vec(1i64..4, 2), bottom in prop::collection::vec(1i64..4, 2),
                                 top2 in prop::collection::vec(1i64..4, 2), bottom2 in prop::collection::vec(1i64..4, 2)) {
            let p = Pyramid::left(2, 2).unwrap();
            let a = Tableau::new(p, top, bottom).unwrap();
            let b = Tableau::new(p, top2, bottom2).unwrap();
            if a.bruhat_leq(&b, Window::new(1, 3).unwrap()).unwrap() {
                prop_assert_eq!(a.weight_of(), b.weight_of());
                prop_assert_eq!(a.block_key(), b.block_key());
            }
        }

        #[test]
        fn transpose_involution_on_partitions(mut parts in prop::collection::vec(1u64..6, 0..6)) {
            parts.sort_unstable_by(|a, b| b.cmp(a));
            let lam = Composition::new(1, parts);
            prop_assert_eq!(lam.transpose().transpose(), lam);
        }

        #[test]
        fn tdual_is_equivalence(a in prop::collection::vec(0u64..3, 1..4), s in -3i64..4, r in -3i64..4) {
            let x = Composition::new(0, a);
            let y = x.dual().shift(s);
            let z = y.shift(r).dual();
            prop_assert!(x.equal_tdual(&x));
            prop_assert!(x.equal_tdual(&y) && y.equal_tdual(&x));
            prop_assert!(y.equal_tdual(&z) && x.equal_tdual(&z));
        }
    }
}
