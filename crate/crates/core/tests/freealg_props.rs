use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use proptest::prelude::*;
use qsym::freealg::{AlgebraElement, Direction, FreeAlgebra, Side, Word};
use qsym::rootdata::{unit_root, RootDatum};
use qsym::Scalar;

fn algebra(name: &str) -> &'static FreeAlgebra {
    static A2: OnceLock<FreeAlgebra> = OnceLock::new();
    static B2: OnceLock<FreeAlgebra> = OnceLock::new();
    static A3: OnceLock<FreeAlgebra> = OnceLock::new();
    let (cell, ty, n) = match name {
        "A2" => (&A2, "A", 2),
        "B2" => (&B2, "B", 2),
        _ => (&A3, "A", 3),
    };
    cell.get_or_init(|| FreeAlgebra::new(Arc::new(RootDatum::of_type(ty, n).unwrap())))
}

fn weights_up_to(n: usize, h: i64) -> Vec<Vec<i64>> {
    fn go(n: usize, h: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let used: i64 = cur.iter().sum();
        for k in 0..=(h - used) {
            cur.push(k);
            go(n, h, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, h, &mut Vec::new(), &mut out);
    out
}

#[test]
fn dimensions_match_partition_counts() {
    for (name, h) in [("A2", 6), ("B2", 6), ("A3", 5)] {
        let a = algebra(name);
        for mu in weights_up_to(a.rank(), h) {
            let expect = a.datum.kostant_count(&mu).unwrap() as usize;
            assert_eq!(a.dim(&mu).unwrap(), expect, "{name} {mu:?}");
        }
    }
}

#[test]
fn derivations_have_no_common_kernel() {
    // The stacked left derivations are injective on every basis, and the
    // full Gram matrix has rank equal to the dimension.
    let a = algebra("A3");
    for mu in [vec![1, 1, 1], vec![1, 2, 1], vec![2, 1, 1]] {
        let (_, g) = a.full_gram(&mu);
        assert_eq!(g.rank(), a.dim(&mu).unwrap(), "{mu:?}");
    }
}

#[test]
fn serre_relations_reduce_to_zero() {
    for name in ["A2", "B2", "A3"] {
        let a = algebra(name);
        let n = a.rank();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let m = 1 - a.datum.cartan[i][j];
                for side in [Side::Plus, Side::Minus] {
                    let mut acc = AlgebraElement::zero(side);
                    for s in 0..=m {
                        let sign = if s % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                        let l = a.divided_power(side, i, (m - s) as u32).unwrap();
                        let r = a.divided_power(side, i, s as u32).unwrap();
                        let t = a.mul(&a.mul(&l, &a.generator(side, j)).unwrap(), &r).unwrap();
                        acc = a.add(&acc, &t.scaled(&sign)).unwrap();
                    }
                    assert!(acc.is_zero(), "{name} S_{i}{j}");
                }
            }
        }
    }
}

fn random_element(a: &FreeAlgebra, side: Side, letters: &[u8], coeffs: &[(i64, i64)]) -> AlgebraElement {
    // Rotations of one letter multiset give several words of the same weight.
    let mut terms: Vec<(Word, Scalar)> = Vec::new();
    for (k, &(c, e)) in coeffs.iter().enumerate() {
        let mut w = letters.to_vec();
        w.rotate_left(k % letters.len().max(1));
        if k % 2 == 1 {
            w.reverse();
        }
        terms.push((w, &Scalar::from_int(c) * &a.datum.q(e)));
    }
    a.from_words(side, &terms).unwrap()
}

fn letters_strategy(n: u8) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..n, 1..=4)
}

fn coeff_strategy() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-3i64..=3, -2i64..=2), 1..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn left_and_right_derivations_commute(letters in letters_strategy(3), coeffs in coeff_strategy(), i in 0usize..3, j in 0usize..3) {
        let a = algebra("A3");
        let x = random_element(a, Side::Plus, &letters, &coeffs);
        let lhs = a.skew_r(i, &a.skew_ir(j, &x).unwrap()).unwrap();
        let rhs = a.skew_ir(j, &a.skew_r(i, &x).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sigma_swaps_derivations(letters in letters_strategy(2), coeffs in coeff_strategy(), i in 0usize..2) {
        let a = algebra("B2");
        let x = random_element(a, Side::Plus, &letters, &coeffs);
        let lhs = a.sigma(&a.skew_r(i, &x).unwrap()).unwrap();
        let rhs = a.skew_ir(i, &a.sigma(&x).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bar_twists_derivations(letters in letters_strategy(2), coeffs in coeff_strategy(), i in 0usize..2) {
        let a = algebra("B2");
        let x = random_element(a, Side::Plus, &letters, &coeffs);
        let mu = x.homogeneous_weight().cloned();
        prop_assume!(mu.is_some());
        let mu = mu.unwrap();
        let lower: Vec<i64> = mu.iter().zip(unit_root(2, i)).map(|(m, u)| m - u).collect();
        let lhs = a.skew_ir(i, &a.bar(&x)).unwrap();
        let f = a.datum.q(a.datum.pair_simple(i, &lower));
        let rhs = a.bar(&a.skew_r(i, &x).unwrap()).scaled(&f);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pairing_is_sigma_invariant(l1 in letters_strategy(2), c1 in coeff_strategy(), c2 in coeff_strategy()) {
        let a = algebra("A2");
        let x = random_element(a, Side::Plus, &l1, &c1);
        let y = random_element(a, Side::Minus, &l1, &c2);
        let lhs = a.pairing(&y, &x).unwrap();
        let rhs = a.pairing(&a.sigma(&y).unwrap(), &a.sigma(&x).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pairing_with_k_tags(l1 in letters_strategy(2), c1 in coeff_strategy(), c2 in coeff_strategy(), g in prop::collection::vec(-2i64..=2, 2), h in prop::collection::vec(-2i64..=2, 2)) {
        let a = algebra("A2");
        let x = random_element(a, Side::Plus, &l1, &c1);
        let y = random_element(a, Side::Minus, &l1, &c2);
        let plain = a.pairing(&y, &x).unwrap();
        let tagged = a.pairing(&y.clone().with_k_tag(Some(g.clone())), &x.clone().with_k_tag(Some(h.clone()))).unwrap();
        prop_assert_eq!(tagged, &plain * &a.datum.q(-a.datum.pair_roots(&g, &h)));
    }

    #[test]
    fn braid_and_bar(letters in prop::collection::vec(1u8..3, 1..=3), coeffs in coeff_strategy()) {
        // T_1(u) = (-1)^{mu(h_1)} q^{(mu, alpha_1)} bar(T_1^{-1}(bar u)) on letters avoiding 1.
        let a = algebra("A3");
        let x = random_element(a, Side::Plus, &letters, &coeffs);
        let mu = x.homogeneous_weight().cloned();
        prop_assume!(mu.is_some());
        let mu = mu.unwrap();
        let lhs = a.braid_t(0, &x, Direction::Fwd).unwrap();
        let inner = a.braid_t(0, &a.bar(&x), Direction::Inv).unwrap();
        let h = a.datum.coroot_eval_root(0, &mu);
        let sign = if h % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        let f = &sign * &a.datum.q(a.datum.pair_simple(0, &mu));
        prop_assert_eq!(lhs, a.bar(&inner).scaled(&f));
    }
}

#[test]
fn braid_inverse_round_trip() {
    let a = algebra("B2");
    for side in [Side::Plus, Side::Minus] {
        for j in 0..2 {
            let i = 1 - j;
            let x = a.generator(side, j);
            let t = a.braid_t_word(&[i], &x, Direction::Fwd).unwrap();
            let back = a.braid_t_word(&[i], &t, Direction::Inv).unwrap();
            assert_eq!(back, x);
        }
    }
}

#[test]
fn root_vectors_along_longest_word_have_root_weights() {
    let a = algebra("B2");
    let (w0, _) = a.datum.longest_words(&[]).unwrap();
    let roots = a.datum.positive_roots().unwrap().to_vec();
    for j in 0..w0.len() {
        let x = a.braid_t_word(&w0[..j], &a.generator(Side::Plus, w0[j]), Direction::Fwd).unwrap();
        let y = a.braid_t_word(&w0[..j], &a.generator(Side::Minus, w0[j]), Direction::Fwd).unwrap();
        let mu = x.homogeneous_weight().unwrap().clone();
        assert!(roots.contains(&mu));
        assert_eq!(y.homogeneous_weight().unwrap(), &mu);
        assert!(!a.pairing(&y, &x).unwrap().is_zero());
    }
}

#[test]
fn reversed_basis_order_gives_same_elements() {
    let lex = algebra("A2");
    let rev = FreeAlgebra::with_order(lex.datum.clone(), qsym::freealg::BasisOrder::RevLex);
    let x = lex.from_words(Side::Plus, &[(vec![0, 0, 1], Scalar::one()), (vec![1, 0, 0], lex.datum.q(2))]).unwrap();
    let y = rev.from_words(Side::Plus, &lex.to_words(&x).unwrap()).unwrap();
    let back = lex.from_words(Side::Plus, &rev.to_words(&y).unwrap()).unwrap();
    assert_eq!(back, x);
    assert_ne!(rev.basis(&[2, 1]).unwrap().words, lex.basis(&[2, 1]).unwrap().words);
    assert!(!lex.skew_r(0, &x).unwrap().is_zero() || x.is_zero());
    assert!(Scalar::zero().is_zero());
}
