use std::sync::Arc;

use qsym::freealg::{Direction, FreeAlgebra, Side};
use qsym::linalg::Matrix;
use qsym::repcat::{act, build_irrep, flip, kron, lusztig_t, lusztig_t_word, parse_module, tensor, Braiding, Module, Twist};
use qsym::rootdata::{unit_root, RootDatum};
use qsym::Scalar;

fn datum(ty: &str, n: usize) -> Arc<RootDatum> {
    Arc::new(RootDatum::of_type(ty, n).unwrap())
}

fn module(d: &Arc<RootDatum>, s: &str) -> Module {
    build_irrep(d.clone(), &parse_module(d, s).unwrap()).unwrap()
}

fn intertwines(op: &Matrix<Scalar>, src: &Module, dst: &Module) -> bool {
    let n = src.rank();
    (0..n).all(|i| {
        op.mul(&src.e[i]) == dst.e[i].mul(op)
            && op.mul(&src.f[i]) == dst.f[i].mul(op)
            && op.mul(&src.k_root(&unit_root(n, i))) == dst.k_root(&unit_root(n, i)).mul(op)
    })
}

#[test]
fn weyl_dimensions_and_relations() {
    for (ty, n, desc) in [
        ("A", 1, "V(3w)"),
        ("A", 2, "V(w1)"),
        ("A", 2, "V(w1+w2)"),
        ("A", 3, "V(w2)"),
        ("A", 3, "V(w1+w3)"),
        ("B", 2, "V(w1)"),
        ("B", 2, "V(w2)"),
        ("C", 3, "V(w1)"),
        ("G", 2, "V(w1)"),
    ] {
        let d = datum(ty, n);
        let lam = parse_module(&d, desc).unwrap();
        let m = build_irrep(d.clone(), &lam).unwrap();
        assert_eq!(m.dim() as u64, d.weyl_dimension(&lam).unwrap(), "{ty}{n} {desc}");
        m.check_relations().unwrap();
    }
}

#[test]
fn tensor_and_twisted_modules_satisfy_relations() {
    let d = datum("A", 2);
    let m = module(&d, "V(w1)");
    let n = module(&d, "V(w2)");
    tensor(&m, &n).check_relations().unwrap();
    m.twisted(&Twist::Diagram(vec![1, 0])).check_relations().unwrap();
    m.twisted(&Twist::TwDiagram(vec![1, 0])).check_relations().unwrap();
    m.twisted(&Twist::TwDiagram(vec![0, 1])).check_relations().unwrap();
    // V(w1) twisted by the diagram flip is V(w2)
    let t = m.twisted(&Twist::Diagram(vec![1, 0]));
    let mut a: Vec<_> = t.weights.clone();
    let mut b: Vec<_> = n.weights.clone();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn lusztig_operators_implement_braid_automorphisms() {
    let d = datum("A", 2);
    let alg = FreeAlgebra::new(d.clone());
    let m = module(&d, "V(w1+w2)");
    for i in 0..2 {
        let t = lusztig_t(&m, i, Direction::Fwd).unwrap();
        let tinv = lusztig_t(&m, i, Direction::Inv).unwrap();
        assert_eq!(t.mul(&tinv), m.identity());
        let j = 1 - i;
        for side in [Side::Plus, Side::Minus] {
            let x = alg.generator(side, j);
            let tx = alg.braid_t(i, &x, Direction::Fwd).unwrap();
            assert_eq!(t.mul(&act(&alg, &x, &m).unwrap()).mul(&tinv), act(&alg, &tx, &m).unwrap());
        }
    }
    let t12 = lusztig_t_word(&m, &[0, 1, 0], Direction::Fwd).unwrap();
    let t21 = lusztig_t_word(&m, &[1, 0, 1], Direction::Fwd).unwrap();
    assert_eq!(t12, t21);
}

#[test]
fn b2_braid_relation() {
    let d = datum("B", 2);
    let m = module(&d, "V(w1)");
    assert_eq!(lusztig_t_word(&m, &[0, 1, 0, 1], Direction::Fwd).unwrap(), lusztig_t_word(&m, &[1, 0, 1, 0], Direction::Fwd).unwrap());
}

#[test]
fn rhat_is_a_module_map_with_hecke_relation() {
    let d = datum("A", 1);
    let br = Braiding::new(Arc::new(FreeAlgebra::new(d.clone())));
    let v = module(&d, "V(w)");
    let vv = tensor(&v, &v);
    let r = br.rhat(&v, &v).unwrap();
    assert!(intertwines(&r, &vv, &vv));
    // (R - q^{-1/2}) (R + q^{3/2}) = 0 on V(w) (x) V(w)
    let id = vv.identity();
    let a = r.sub(&id.scale(&d.q_pow_r(num_rational::Rational64::new(-1, 2)).unwrap()));
    let b = r.add(&id.scale(&d.q_pow_r(num_rational::Rational64::new(3, 2)).unwrap()));
    assert!(a.mul(&b).is_zero());
    assert!(!a.is_zero() && !b.is_zero());
}

#[test]
fn rhat_hexagon_and_intertwining_a2() {
    let d = datum("A", 2);
    let br = Braiding::new(Arc::new(FreeAlgebra::new(d.clone())));
    let m = module(&d, "V(w1)");
    let n = module(&d, "V(w2)");
    let l = module(&d, "V(w1)");
    let r_mn = br.rhat(&m, &n).unwrap();
    assert!(intertwines(&r_mn, &tensor(&m, &n), &tensor(&n, &m)));
    let mn = tensor(&m, &n);
    let lhs = br.rhat(&mn, &l).unwrap();
    let rhs = kron(&br.rhat(&m, &l).unwrap(), &n.identity()).mul(&kron(&m.identity(), &br.rhat(&n, &l).unwrap()));
    assert_eq!(lhs, rhs);
}

#[test]
fn twisted_rhat_matches_twisted_module() {
    let d = datum("A", 2);
    let br = Braiding::new(Arc::new(FreeAlgebra::new(d.clone())));
    let sigma = vec![1, 0];
    let m = module(&d, "V(w1)");
    let n = module(&d, "V(w1+w2)");
    let nt = n.twisted(&Twist::Diagram(sigma.clone()));
    let direct = br.rhat_twisted(&m, &n, &sigma).unwrap();
    let via = br.rhat(&m, &nt).unwrap();
    assert_eq!(direct, via);
}

#[test]
fn coproduct_of_lusztig_operators() {
    let d = datum("A", 2);
    let br = Braiding::new(Arc::new(FreeAlgebra::new(d.clone())));
    let m = module(&d, "V(w1)");
    let n = module(&d, "V(w2)");
    let mn = tensor(&m, &n);
    for i in 0..2 {
        let lhs = lusztig_t(&mn, i, Direction::Fwd).unwrap();
        let ri = br.rank_one_factor(&m, &n, i).unwrap();
        let rhs = kron(&lusztig_t(&m, i, Direction::Fwd).unwrap(), &lusztig_t(&n, i, Direction::Fwd).unwrap()).mul(&ri.inverse().unwrap());
        assert_eq!(lhs, rhs, "node {}", i + 1);
    }
    let w0 = [0, 1, 0];
    let lhs = lusztig_t_word(&mn, &w0, Direction::Fwd).unwrap();
    let r = br.quasi_r(&m, &n, None).unwrap();
    let rhs = kron(&lusztig_t_word(&m, &w0, Direction::Fwd).unwrap(), &lusztig_t_word(&n, &w0, Direction::Fwd).unwrap()).mul(&r.inverse().unwrap());
    assert_eq!(lhs, rhs);
}

#[test]
fn trivial_factor_gives_flip() {
    let d = datum("A", 2);
    let br = Braiding::new(Arc::new(FreeAlgebra::new(d.clone())));
    let m = module(&d, "V(w1)");
    let z = module(&d, "V(0)");
    assert_eq!(br.rhat(&m, &z).unwrap(), flip(&m, &z));
    assert_eq!(br.rhat(&z, &m).unwrap(), flip(&z, &m));
    let e = act(&FreeAlgebra::new(d.clone()), &FreeAlgebra::new(d.clone()).generator(Side::Plus, 0), &z).unwrap();
    assert!(e.is_zero());
}

#[test]
fn derivations_give_commutator_with_f() {
    let d = datum("A", 2);
    let alg = FreeAlgebra::new(d.clone());
    let m = module(&d, "V(w1+w2)");
    let n = d.rank();
    for mu in [vec![1, 1], vec![2, 1], vec![1, 2], vec![2, 2]] {
        for w in alg.basis(&mu).unwrap().words.iter() {
            let x = alg.word(Side::Plus, w).unwrap();
            let ax = act(&alg, &x, &m).unwrap();
            for i in 0..n {
                let lhs = ax.mul(&m.f[i]).sub(&m.f[i].mul(&ax));
                let ki = m.k_root(&unit_root(n, i));
                let kinv = ki.inverse().unwrap();
                let r = act(&alg, &alg.skew_r(i, &x).unwrap(), &m).unwrap();
                let ir = act(&alg, &alg.skew_ir(i, &x).unwrap(), &m).unwrap();
                let rhs = r.mul(&ki).sub(&kinv.mul(&ir)).scale(&d.qi_diff(i).try_inv().unwrap());
                assert_eq!(lhs, rhs, "{w:?} node {}", i + 1);
            }
        }
    }
}

#[test]
fn quasi_r_intertwines_coproduct_and_its_bar() {
    let d = datum("B", 2);
    let br = Braiding::new(Arc::new(FreeAlgebra::new(d.clone())));
    let m = module(&d, "V(w1)");
    let n = module(&d, "V(w2)");
    let mn = tensor(&m, &n);
    let r = br.quasi_r(&m, &n, None).unwrap();
    for i in 0..2 {
        let k = |x: &Module, s: i64| x.k_root(&unit_root(2, i).iter().map(|a| a * s).collect::<Vec<_>>());
        let e_bar = kron(&m.e[i], &n.identity()).add(&kron(&k(&m, -1), &n.e[i]));
        let f_bar = kron(&m.f[i], &k(&n, 1)).add(&kron(&m.identity(), &n.f[i]));
        assert_eq!(mn.e[i].mul(&r), r.mul(&e_bar));
        assert_eq!(mn.f[i].mul(&r), r.mul(&f_bar));
    }
}
