use std::sync::Arc;
use std::time::Instant;

use qsym::freealg::FreeAlgebra;
use qsym::kmatrix::{skewed_xi, CheckSet, KContext};
use qsym::qsp::{default_params, params_from_config, QSPParams};
use qsym::repcat::{build_irrep, parse_module, Module};
use qsym::rootdata::catalog_entry;

fn params(name: &str) -> Arc<QSPParams> {
    let sd = Arc::new(catalog_entry(name).unwrap().build().unwrap());
    let alg = Arc::new(FreeAlgebra::new(sd.datum.clone()));
    Arc::new(params_from_config(sd, alg, &default_params(name).unwrap()).unwrap())
}

fn module(c: &KContext, s: &str) -> Module {
    let d = c.params.satake.datum.clone();
    build_irrep(d.clone(), &parse_module(&d, s).unwrap()).unwrap()
}

#[test]
fn module_checks_on_catalog() {
    for (name, mods) in [
        ("A1-split", vec!["V(w)", "V(2w)"]),
        ("A1-split-s", vec!["V(w)", "V(2w)"]),
        ("A2-quasisplit", vec!["V(w1)", "V(w2)"]),
        ("A3-X2", vec!["V(w1)", "V(w3)"]),
        ("B2-split", vec!["V(w1)"]),
    ] {
        let c = KContext::new(params(name));
        for s in mods {
            let t = Instant::now();
            let m = module(&c, s);
            let res = c.check_module(&m, &CheckSet::all()).unwrap();
            let bad: Vec<_> = res.iter().filter(|o| !o.ok).collect();
            eprintln!("{name} {s}: {} checks in {:?}", res.len(), t.elapsed());
            assert!(bad.is_empty(), "{name} {s}: {bad:#?}");
        }
    }
}

#[test]
fn pair_checks_on_catalog() {
    for (name, a, b) in [
        ("A1-split", "V(w)", "V(w)"),
        ("A1-split-s", "V(w)", "V(w)"),
        ("A2-quasisplit", "V(w1)", "V(w1)"),
        ("A2-quasisplit", "V(w1)", "V(w2)"),
        ("A3-X2", "V(w1)", "V(w3)"),
    ] {
        let c = KContext::new(params(name));
        let t = Instant::now();
        let (m, n) = (module(&c, a), module(&c, b));
        let res = c.check_pair(&m, &n, &CheckSet::all()).unwrap();
        let bad: Vec<_> = res.iter().filter(|o| !o.ok).collect();
        eprintln!("{name} {a}*{b}: {} checks in {:?}", res.len(), t.elapsed());
        assert!(bad.is_empty(), "{name} {a}*{b}: {bad:#?}");
    }
}

#[test]
fn corrupted_xi_breaks_intertwining() {
    for (name, s) in [("A1-split", "V(w)"), ("A3-X2", "V(w1)")] {
        let c = KContext::with_xi(params(name), skewed_xi());
        let m = module(&c, s);
        let mut only = CheckSet::none();
        only.twisted = true;
        let res = c.check_module(&m, &only).unwrap();
        assert!(res.iter().any(|o| !o.ok), "{name} {s}");
    }
}

#[test]
fn factors_are_nontrivial() {
    for (name, a, b) in [("A1-split", "V(2w)", "V(w)"), ("A1-split-s", "V(w)", "V(w)"), ("A2-quasisplit", "V(w1)", "V(w2)"), ("A3-X2", "V(w1)", "V(w3)")] {
        let c = KContext::new(params(name));
        let (m, n) = (module(&c, a), module(&c, b));
        let pm = c.build_kparts(&m).unwrap();
        let (rtx, _) = c.build_rtaux(&m, &n, &pm).unwrap();
        let id = |d: usize| qsym::linalg::Matrix::<qsym::Scalar>::identity(d);
        let nx = c.x_on(&qsym::repcat::tensor(&m, &n)).unwrap();
        assert_ne!(nx, id(m.dim() * n.dim()), "{name}");
        assert_ne!(rtx, id(m.dim() * n.dim()), "{name}");
        assert!(pm.k.nonzeros().count() >= m.dim(), "{name}");
        if name != "A2-quasisplit" {
            assert_ne!(pm.x, id(m.dim()), "{name}");
        }
    }
}

#[test]
fn corrupted_quasi_k_breaks_coproduct() {
    let c = KContext::new(params("A3-X2"));
    let (m, n) = (module(&c, "V(w1)"), module(&c, "V(w3)"));
    let mut k = (*c.quasik(6).unwrap()).clone();
    let top = k.support().into_iter().max_by_key(|mu| qsym::rootdata::height(mu)).unwrap();
    let two = c.params.satake.datum.scalar(2);
    let x = k.comps.get_mut(&top).unwrap();
    *x = x.scaled(&two);
    let bad = KContext::new(c.params.clone()).with_quasik(k);
    let mut only = CheckSet::none();
    only.delta_x = true;
    let res = bad.check_pair(&m, &n, &only).unwrap();
    assert!(res.iter().any(|o| o.check == "delta_x" && !o.ok));
}
