//! Harish-Chandra images of the center: supersymmetric polynomials and the
//! subalgebras `I` and `J` of `S(t) = Q[x_1..x_m, y_1..y_n]`.

use num_rational::BigRational;
use num_traits::One;
use rand::Rng;

use crate::algebra::{MultiPoly, Var};
use crate::{invalid, Result};

/// Polynomials in `w` with `MultiPoly` coefficients, truncated at `w^deg`.
struct Series {
    deg: usize,
    coeffs: Vec<MultiPoly>,
}

impl Series {
    fn one(m: usize, n: usize, deg: usize) -> Self {
        let mut coeffs = vec![MultiPoly::zero(m, n); deg + 1];
        coeffs[0] = MultiPoly::one(m, n);
        Self { deg, coeffs }
    }

    fn mul(&self, other: &Series) -> Series {
        let (m, n) = self.coeffs[0].nvars();
        let mut coeffs = vec![MultiPoly::zero(m, n); self.deg + 1];
        for (a, pa) in self.coeffs.iter().enumerate() {
            if pa.is_zero() {
                continue;
            }
            for (b, pb) in other.coeffs.iter().enumerate().take(self.deg + 1 - a) {
                coeffs[a + b] = &coeffs[a + b] + &(pa * pb);
            }
        }
        Series { deg: self.deg, coeffs }
    }
}

fn elementary(vars: &[Var], m: usize, n: usize, s: usize) -> MultiPoly {
    let mut out = MultiPoly::zero(m, n);
    let k = vars.len();
    if s > k {
        return out;
    }
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize != s {
            continue;
        }
        let mut mono = MultiPoly::one(m, n);
        for (b, v) in vars.iter().enumerate() {
            if mask & (1 << b) != 0 {
                mono = &mono * &MultiPoly::var(m, n, *v);
            }
        }
        out = &out + &mono;
    }
    out
}

fn complete(vars: &[Var], m: usize, n: usize, t: usize) -> MultiPoly {
    fn go(vars: &[Var], m: usize, n: usize, t: usize, acc: MultiPoly, out: &mut MultiPoly) {
        if t == 0 {
            *out = &*out + &acc;
            return;
        }
        let Some((first, rest)) = vars.split_first() else {
            return;
        };
        let v = MultiPoly::var(m, n, *first);
        for k in 0..=t {
            go(rest, m, n, t - k, &acc * &v.pow(k as u32), out);
        }
    }
    let mut out = MultiPoly::zero(m, n);
    go(vars, m, n, t, MultiPoly::one(m, n), &mut out);
    out
}

fn xs(m: usize) -> Vec<Var> {
    (1..=m).map(Var::X).collect()
}

fn ys(n: usize) -> Vec<Var> {
    (1..=n).map(Var::Y).collect()
}

/// Elementary supersymmetric polynomial `sum_{s+t=r} (-1)^t e_s(x) h_t(y)`.
pub fn e_super(r: usize, m: usize, n: usize) -> Result<MultiPoly> {
    if r == 0 {
        return invalid("e_super needs r >= 1");
    }
    let mut out = MultiPoly::zero(m, n);
    for s in 0..=r {
        let t = r - s;
        let term = &elementary(&xs(m), m, n, s) * &complete(&ys(n), m, n, t);
        out = if t.is_multiple_of(2) { &out + &term } else { &out - &term };
    }
    Ok(out)
}

/// Invariance under adjacent transpositions of the x's and of the y's.
pub fn is_row_symmetric(f: &MultiPoly) -> bool {
    let (m, n) = f.nvars();
    (1..m).all(|i| f.swap_vars(Var::X(i), Var::X(i + 1)) == *f)
        && (1..n).all(|j| f.swap_vars(Var::Y(j), Var::Y(j + 1)) == *f)
}

/// `(d/dx_i + d/dy_j) f` vanishes modulo `x_i - y_j`.
fn pair_condition(f: &MultiPoly, i: usize, j: usize) -> bool {
    let (m, n) = f.nvars();
    let d = &f.partial(Var::X(i)) + &f.partial(Var::Y(j));
    d.subst(Var::X(i), &MultiPoly::var(m, n, Var::Y(j))).is_zero()
}

/// Membership in `I`: symmetric, and the derivative condition holds for
/// every pair `(i, j)`.
pub fn in_i(f: &MultiPoly) -> bool {
    let (m, n) = f.nvars();
    is_row_symmetric(f) && (1..=m).all(|i| (1..=n).all(|j| pair_condition(f, i, j)))
}

/// Membership in `J`: the derivative condition for the pairs `(i, i + s_minus)`.
pub fn in_j(f: &MultiPoly, s_minus: usize) -> Result<bool> {
    let (m, n) = f.nvars();
    if m + s_minus > n {
        return invalid(format!("s_minus={s_minus} too large for {m}|{n}"));
    }
    Ok((1..=m).all(|i| pair_condition(f, i, i + s_minus)))
}

/// `u^{-r}`-coefficient of `prod (1 + u^{-1} x_k) / prod (1 + u^{-1} y_k)`.
pub fn hc_series_coeff(r: usize, m: usize, n: usize) -> Result<MultiPoly> {
    if r == 0 {
        return invalid("hc_series_coeff needs r >= 1");
    }
    let mut acc = Series::one(m, n, r);
    for k in 1..=m {
        let mut f = Series::one(m, n, r);
        f.coeffs[1] = MultiPoly::var(m, n, Var::X(k));
        acc = acc.mul(&f);
    }
    for k in 1..=n {
        let mut g = Series::one(m, n, r);
        let y = MultiPoly::var(m, n, Var::Y(k));
        let minus_y = y.scale(&-BigRational::one());
        for t in 1..=r {
            g.coeffs[t] = minus_y.pow(t as u32);
        }
        acc = acc.mul(&g);
    }
    Ok(acc.coeffs.swap_remove(r))
}

/// Sum of `f` over all of `S_m x S_n`.
pub fn symmetrize(f: &MultiPoly) -> MultiPoly {
    let (m, n) = f.nvars();
    let mut out = MultiPoly::zero(m, n);
    for px in permutations(m) {
        for py in permutations(n) {
            let mut g = MultiPoly::zero(m, n);
            for (e, c) in f.terms() {
                let mut e2 = vec![0; m + n];
                for i in 0..m {
                    e2[px[i]] = e[i];
                }
                for j in 0..n {
                    e2[m + py[j]] = e[m + j];
                }
                g.add_term(e2, c.clone());
            }
            out = &out + &g;
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Random `S_m x S_n`-symmetric polynomial of degree at most 5. About half
/// the samples are combinations of supersymmetric products, so both
/// membership outcomes occur.
pub fn random_symmetric(rng: &mut impl Rng, m: usize, n: usize) -> MultiPoly {
    if rng.gen_bool(0.5) {
        let mut f = MultiPoly::constant(m, n, int_rat(rng.gen_range(-3..=3)));
        for _ in 0..rng.gen_range(1..=3) {
            let a = rng.gen_range(1..=3);
            let b = rng.gen_range(0..=2);
            let mut term = e_super(a, m, n).unwrap();
            if b > 0 {
                term = &term * &e_super(b, m, n).unwrap();
            }
            if term.total_degree().unwrap_or(0) <= 5 {
                f = &f + &term.scale(&int_rat(rng.gen_range(-4..=4)));
            }
        }
        f
    } else {
        let mut mono = MultiPoly::zero(m, n);
        let mut e = vec![0u32; m + n];
        let deg = rng.gen_range(1..=5u32);
        for _ in 0..deg {
            let k = rng.gen_range(0..m + n);
            e[k] += 1;
        }
        mono.add_term(e, int_rat(rng.gen_range(1..=5)));
        symmetrize(&mono)
    }
}

fn int_rat(a: i64) -> BigRational {
    BigRational::from_integer(a.into())
}
