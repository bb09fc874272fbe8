use std::collections::BTreeMap;

use num_bigint::BigInt;
use proptest::prelude::*;

use glblocks::algebra::{binomial, qbinom, LaurentQ};
use glblocks::blockan::{cartan_entry, graded_cartan, h_count};
use glblocks::center::{e_super, is_row_symmetric};
use glblocks::characters::{ch_simple_w, ch_verma_w, CompChar};
use glblocks::combinat::{BlockKey, Composition, Pyramid, Tableau, Window};
use glblocks::qcanon::{psi, psi_star, tmn_signs, TensorVec};

fn tableau(m: usize, n: usize, s: usize, top: Vec<i64>, bottom: Vec<i64>) -> Tableau {
    Tableau::new(Pyramid::new(m, n, s).unwrap(), top, bottom).unwrap()
}

/// Shape (m, n, s_minus) with m <= n <= 3 and rows drawn from `lo..=hi`.
fn arb_tableau(lo: i64, hi: i64) -> impl Strategy<Value = Tableau> {
    (1usize..=3)
        .prop_flat_map(|n| (0..=n, Just(n)))
        .prop_flat_map(move |(m, n)| {
            (
                Just(m),
                Just(n),
                0..=n - m,
                prop::collection::vec(lo..=hi, m),
                prop::collection::vec(lo..=hi, n),
            )
        })
        .prop_map(|(m, n, s, top, bottom)| tableau(m, n, s, top, bottom))
}

fn permutations(v: &[i64]) -> Vec<Vec<i64>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Block key with m <= n <= 3 and a label of the right size, both supported near 0.
fn arb_block_label() -> impl Strategy<Value = (BlockKey, Composition, Composition)> {
    (1usize..=3)
        .prop_flat_map(|n| (0..=n, Just(n)))
        .prop_flat_map(|(m, n)| {
            let keys = BlockKey::all_in(m, n, 0, 2);
            (0..keys.len()).prop_map(move |k| keys[k].clone())
        })
        .prop_flat_map(|xi| {
            let labels = Composition::all_in(xi.t, -1, 2);
            let len = labels.len();
            (Just(xi), Just(labels), 0..len, 0..len)
        })
        .prop_map(|(xi, labels, a, b)| (xi, labels[a].clone(), labels[b].clone()))
}

fn add_scaled(acc: &mut CompChar, c: &CompChar, k: &BigInt) {
    for (eta, v) in c {
        *acc.entry(eta.clone()).or_default() += v * k;
    }
    acc.retain(|_, v| *v != BigInt::from(0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bruhat_comparable_tableaux_are_linked(a in arb_tableau(1, 3), b_top in prop::collection::vec(1i64..=3, 3), b_bot in prop::collection::vec(1i64..=3, 3)) {
        let (m, n) = (a.top.len(), a.bottom.len());
        let b = Tableau::new(a.pyramid, b_top[..m].to_vec(), b_bot[..n].to_vec()).unwrap();
        let w = Window::new(1, 3).unwrap();
        if b.bruhat_leq(&a, w).unwrap() {
            prop_assert_eq!(b.weight_of(), a.weight_of());
            prop_assert_eq!(b.block_key(), a.block_key());
        }
        for c in a.bruhat_lower_covers() {
            prop_assert_eq!(c.block_key(), a.block_key());
        }
    }

    #[test]
    fn atypicality_is_maximal_defect(a in arb_tableau(0, 3)) {
        let mut best = 0;
        for top in permutations(&a.top) {
            for bottom in permutations(&a.bottom) {
                best = best.max(Tableau::new(a.pyramid, top.clone(), bottom).unwrap().defect());
            }
        }
        prop_assert_eq!(a.atyp(), best);
        prop_assert_eq!(a.down_up().len(), 1usize << a.defect());
    }

    #[test]
    fn transpose_is_an_involution_on_partitions(mut parts in prop::collection::vec(1u64..6, 0..6)) {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let p = Composition::new(1, parts);
        prop_assert_eq!(p.transpose().transpose(), p);
    }

    #[test]
    fn tdual_equality_is_an_equivalence(
        a in prop::collection::vec(0u64..3, 1..4),
        shifts in (-3i64..3, -3i64..3),
        flips in (any::<bool>(), any::<bool>()),
        c in prop::collection::vec(0u64..3, 1..4),
    ) {
        let x = Composition::new(0, a);
        let mk = |s: i64, f: bool| if f { x.dual().shift(s) } else { x.shift(s) };
        let (y, z) = (mk(shifts.0, flips.0), mk(shifts.1, flips.1));
        let w = Composition::new(0, c);
        prop_assert!(x.equal_tdual(&x));
        prop_assert!(x.equal_tdual(&y) && y.equal_tdual(&x));
        prop_assert!(y.equal_tdual(&z));
        prop_assert_eq!(x.equal_tdual(&w), w.equal_tdual(&x));
        if x.equal_tdual(&w) {
            prop_assert!(y.equal_tdual(&w));
        }
    }

    #[test]
    fn cartan_is_symmetric((xi, lam, kap) in arb_block_label()) {
        prop_assert_eq!(cartan_entry(&xi, &lam, &kap).unwrap(), cartan_entry(&xi, &kap, &lam).unwrap());
        prop_assert_eq!(graded_cartan(&xi, &lam, &kap).unwrap(), graded_cartan(&xi, &kap, &lam).unwrap());
    }

    #[test]
    fn h_counts_row_support((xi, lam, _k) in arb_block_label()) {
        let (lo, hi) = lam.support().unwrap_or((0, 0));
        let count = Composition::all_in(xi.t, lo - 1, hi + 1)
            .iter()
            .filter(|k| cartan_entry(&xi, &lam, k).unwrap() != BigInt::from(0))
            .count();
        prop_assert_eq!(h_count(&lam), BigInt::from(count));
    }

    #[test]
    fn verma_is_a_binomial_sum_of_simples((xi, lam, _k) in arb_block_label()) {
        let Some((lo, hi)) = lam.support() else { return Ok(()) };
        let mut sum = CompChar::new();
        let slots: Vec<i64> = (lo - 1..hi).collect();
        let mut theta = vec![0u64; slots.len()];
        loop {
            let mut kappa = lam.clone();
            let mut coeff = BigInt::from(1);
            for (k, &i) in slots.iter().enumerate() {
                coeff *= binomial(lam.get(i + 1) as i64, theta[k] as i64);
                kappa.set(i, kappa.get(i) + theta[k]);
                kappa.set(i + 1, kappa.get(i + 1) - theta[k]);
            }
            add_scaled(&mut sum, &ch_simple_w(&xi, &kappa).unwrap(), &coeff);
            let mut k = 0;
            while k < slots.len() && theta[k] == lam.get(slots[k] + 1) {
                theta[k] = 0;
                k += 1;
            }
            if k == slots.len() {
                break;
            }
            theta[k] += 1;
        }
        prop_assert_eq!(sum, ch_verma_w(&xi, &lam).unwrap());
    }

    #[test]
    fn simple_character_leads_with_its_label((xi, lam, _k) in arb_block_label()) {
        let ch = ch_simple_w(&xi, &lam).unwrap();
        let top = lam.add(&xi.mu);
        prop_assert_eq!(ch.get(&top), Some(&BigInt::from(1)));
        // every other term is the label plus positive roots, so it strictly
        // dominates it in the partial-sum order
        for eta in ch.keys().filter(|e| **e != top) {
            let mut partial = (0i64, 0i64);
            let mut strictly = false;
            for i in -4..=6 {
                partial.0 += eta.get(i) as i64;
                partial.1 += top.get(i) as i64;
                prop_assert!(partial.0 >= partial.1, "{} below {}", eta, top);
                strictly |= partial.0 > partial.1;
            }
            prop_assert!(strictly);
        }
    }

    #[test]
    fn bar_involutions_on_random_vectors(
        (m, n) in (0usize..=2, 0usize..=2).prop_filter("nonempty", |(m, n)| m + n > 0),
        raw in prop::collection::vec((prop::collection::vec(1usize..=3, 4), -2i64..=2, -3i64..=3), 1..4),
    ) {
        let signs = tmn_signs(m, n);
        let mut v = TensorVec::zero(3, signs.clone());
        for (key, e, c) in raw {
            v.add_term(key[..m + n].to_vec(), &LaurentQ::monomial(e, c));
        }
        prop_assert_eq!(psi(&psi(&v).unwrap()).unwrap(), v.clone());
        prop_assert_eq!(psi_star(&psi_star(&v).unwrap()).unwrap(), v);
    }
}

#[test]
fn qbinom_identities() {
    for n in 0..=12i64 {
        for r in 0..=n {
            let b = qbinom(n, r);
            assert_eq!(b, qbinom(n, n - r));
            assert_eq!(b.bar(), b);
            assert_eq!(b.eval1(), binomial(n, r));
            if r >= 1 {
                let pascal = &LaurentQ::qpow(r) * &b + &LaurentQ::qpow(r - n - 1) * &qbinom(n, r - 1);
                assert_eq!(qbinom(n + 1, r), pascal, "n={n} r={r}");
            }
        }
    }
}

#[test]
fn e_super_is_symmetric() {
    for n in 0..=3 {
        for m in 0..=n {
            for r in 1..=5 {
                assert!(is_row_symmetric(&e_super(r, m, n).unwrap()));
            }
        }
    }
}

#[test]
fn block_enumeration_has_no_duplicates() {
    let keys = BlockKey::all_in(2, 3, -1, 2);
    let distinct: BTreeMap<String, ()> = keys.iter().map(|k| (k.short(), ())).collect();
    assert_eq!(distinct.len(), keys.len());
}
