//! Seeded random sampling of structural identities: derivations, bar, sigma,
//! braid operators, `xi`, `gamma` and the support of the quasi-K matrix.

use num_rational::Rational64;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::freealg::{AlgebraElement, Direction, FreeAlgebra, Side, Word};
use crate::kmatrix::{KContext, KError};
use crate::rootdata::{add_weights, neg_root, root_to_weight, unit_root, RootDatum};
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize)]
pub struct SampleOutcome {
    pub identity: String,
    pub sample: String,
    pub ok: bool,
}

/// Random homogeneous element: rotations and reversals of one letter multiset.
pub fn random_element(alg: &FreeAlgebra, rng: &mut StdRng, side: Side, max_len: usize, avoid: Option<u8>) -> AlgebraElement {
    let n = alg.rank() as u8;
    let letters: Vec<u8> = loop {
        let len = rng.gen_range(1..=max_len);
        let w: Vec<u8> = (0..len).map(|_| rng.gen_range(0..n)).collect();
        if avoid.is_none_or(|a| !w.contains(&a)) {
            break w;
        }
    };
    let terms: Vec<(Word, Scalar)> = (0..rng.gen_range(1..=3))
        .map(|k| {
            let mut w = letters.clone();
            w.rotate_left(k % letters.len());
            if k % 2 == 1 {
                w.reverse();
            }
            let c = Scalar::from_int(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
            (w, &c * &alg.datum.q(rng.gen_range(-2..=2)))
        })
        .collect();
    alg.from_words(side, &terms).expect("random words are well formed")
}

fn random_weight(datum: &RootDatum, rng: &mut StdRng) -> Vec<Rational64> {
    let coords: Vec<i64> = (0..datum.rank()).map(|_| rng.gen_range(-3..=3)).collect();
    datum.weight_from_fundamental(&coords).expect("finite type")
}

fn sign(h: i64) -> Scalar {
    if h % 2 == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// Draws `count` samples, cycling through the identity families.
pub fn sample(ctx: &KContext, seed: u64, count: usize) -> Result<Vec<SampleOutcome>, KError> {
    let p = &ctx.params;
    let alg = &p.alg;
    let sd = &p.satake;
    let d = &sd.datum;
    let n = d.rank();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let qk = ctx.quasik(4)?;
    for mu in qk.support() {
        out.push(SampleOutcome { identity: "support".into(), sample: format!("{mu:?}"), ok: sd.theta_root(&mu) == neg_root(&mu) });
    }
    let families = 8;
    for k in 0..count {
        let i = rng.gen_range(0..n);
        let o = match k % families {
            0 => {
                let x = random_element(alg, &mut rng, Side::Plus, 4, None);
                let mu = x.homogeneous_weight().cloned().unwrap_or_else(|| vec![0; n]);
                let lower: Vec<i64> = mu.iter().zip(unit_root(n, i)).map(|(m, u)| m - u).collect();
                let lhs = alg.skew_ir(i, &alg.bar(&x))?;
                let rhs = alg.bar(&alg.skew_r(i, &x)?).scaled(&d.q(d.pair_simple(i, &lower)));
                ("ribar", format!("node {} weight {mu:?}", i + 1), lhs == rhs || x.is_zero())
            }
            1 => {
                let x = random_element(alg, &mut rng, Side::Plus, 4, None);
                let lhs = alg.sigma(&alg.skew_r(i, &x)?)?;
                let rhs = alg.skew_ir(i, &alg.sigma(&x)?)?;
                ("sigmari", format!("node {}", i + 1), lhs == rhs)
            }
            2 => {
                let j = rng.gen_range(0..n);
                let x = random_element(alg, &mut rng, Side::Plus, 4, None);
                let lhs = alg.skew_r(i, &alg.skew_ir(j, &x)?)?;
                let rhs = alg.skew_ir(j, &alg.skew_r(i, &x)?)?;
                ("rijr", format!("nodes {} {}", i + 1, j + 1), lhs == rhs)
            }
            3 if n > 1 => {
                let x = random_element(alg, &mut rng, Side::Plus, 3, Some(i as u8));
                let mu = x.homogeneous_weight().cloned().unwrap_or_else(|| vec![0; n]);
                let lhs = alg.braid_t(i, &x, Direction::Fwd)?;
                let inner = alg.braid_t(i, &alg.bar(&x), Direction::Inv)?;
                let f = &sign(d.coroot_eval_root(i, &mu)) * &d.q(d.pair_simple(i, &mu));
                ("Tibarinverse", format!("node {} weight {mu:?}", i + 1), lhs == alg.bar(&inner).scaled(&f))
            }
            4 => {
                let mu = random_weight(d, &mut rng);
                let nu = random_weight(d, &mut rng);
                let lhs = ctx.xi_value(&add_weights(&mu, &nu))?;
                let e = d.pair(&add_weights(&mu, &sd.theta(&mu)), &nu);
                let rhs = &(&ctx.xi_value(&mu)? * &ctx.xi_value(&nu)?) * &d.q_pow_r(-e)?;
                ("xi_product", format!("{mu:?} + {nu:?}"), lhs == rhs)
            }
            5 => {
                let mu = random_weight(d, &mut rng);
                let ai = root_to_weight(&unit_root(n, i));
                let th = sd.theta(&ai);
                let e = -d.pair(&ai, &th) - d.pair(&mu, &add_weights(&ai, &th));
                let lhs = ctx.xi_value(&add_weights(&mu, &ai))?;
                let rhs = &(&p.gamma_simple(i) * &d.q_pow_r(e)?) * &ctx.xi_value(&mu)?;
                ("xi_recursion", format!("{mu:?} node {}", i + 1), lhs == rhs)
            }
            6 => {
                let mu = random_weight(d, &mut rng);
                let mut lam = vec![0i64; n];
                for &j in &sd.x {
                    lam[j] = rng.gen_range(0..=2);
                }
                let lw = root_to_weight(&lam);
                let e = -d.pair(&lw, &lw) - d.pair(&mu, &lw) * Rational64::from_integer(2);
                let lhs = ctx.xi_value(&add_weights(&mu, &lw))?;
                let rhs = &d.q_pow_r(e)? * &ctx.xi_value(&mu)?;
                ("xi_qx_recursion", format!("{mu:?} + {lam:?}"), lhs == rhs)
            }
            _ => {
                let mu = random_weight(d, &mut rng);
                let smu = RootDatum::permute_weight(&sd.tautau0, &mu);
                ("gamma_tautau0", format!("{mu:?}"), p.gamma_eval(&mu)? == p.gamma_eval(&smu)?)
            }
        };
        out.push(SampleOutcome { identity: o.0.into(), sample: o.1, ok: o.2 });
    }
    Ok(out)
}
