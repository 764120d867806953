//! The quasi K-matrix `X = sum_mu X_mu`, built by induction on the height of
//! `mu` from the prescribed skew derivatives, with the solvability
//! conditions checked exactly at every step.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::freealg::{AlgebraElement, BasisOrder, FreeAlgError, FreeAlgebra, Side, Word};
use crate::linalg::{LinalgError, Matrix};
use crate::qsp::{QSPParams, QspError};
use crate::quasir::weights_up_to;
use crate::rootdata::{add_roots, height, is_nonneg, neg_root, sub_roots, unit_root, RootVec};
use crate::scalar::{Scalar, ScalarError};

/// Environment variable naming the directory for cached quasi K-matrices.
pub const CACHE_DIR_ENV: &str = "QSYM_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuasiKError {
    #[error("condition (2a) fails at mu = {mu:?} for (i, j) = ({i}, {j})")]
    Cond2a { mu: RootVec, i: usize, j: usize },
    #[error("condition (2b) fails at mu = {mu:?} for (i, j) = ({i}, {j})")]
    Cond2b { mu: RootVec, i: usize, j: usize },
    #[error("no solution at mu = {0:?}")]
    Inconsistent(RootVec),
    #[error("left derivative {i} of the solution at mu = {mu:?} disagrees")]
    LeftDerivative { mu: RootVec, i: usize },
    #[error("nonzero component at mu = {0:?} with Theta(mu) != -mu")]
    Support(RootVec),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Qsp(#[from] QspError),
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Record of one induction step.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StepRecord {
    pub weight: RootVec,
    pub conditions_2a: usize,
    pub conditions_2b: usize,
    pub zero: bool,
}

#[derive(Clone, Debug)]
pub struct QuasiK {
    pub comps: BTreeMap<RootVec, AlgebraElement>,
    pub cutoff: i64,
    pub log: Vec<StepRecord>,
}

impl QuasiK {
    pub fn component(&self, mu: &[i64]) -> Option<&AlgebraElement> {
        self.comps.get(mu)
    }

    /// Weights with a nonzero component.
    pub fn support(&self) -> Vec<RootVec> {
        self.comps.iter().filter(|(_, x)| !x.is_zero()).map(|(k, _)| k.clone()).collect()
    }

    /// Sum of all components as one element of `U^+`.
    pub fn total(&self, alg: &FreeAlgebra) -> Result<AlgebraElement, QuasiKError> {
        let mut acc = AlgebraElement::zero(Side::Plus);
        for x in self.comps.values() {
            acc = alg.add(&acc, x)?;
        }
        Ok(acc)
    }
}

/// Default height cutoff for a given rank.
pub fn default_cutoff(rank: usize) -> i64 {
    if rank <= 2 {
        8
    } else {
        6
    }
}

fn lookup<'a>(comps: &'a BTreeMap<RootVec, AlgebraElement>, nu: &[i64]) -> Option<&'a AlgebraElement> {
    if is_nonneg(nu) {
        comps.get(nu).filter(|x| !x.is_zero())
    } else {
        None
    }
}

/// `(A_i, _iA)`: the prescribed values of `r_i(X_mu)` and `_i r(X_mu)`.
pub fn rhs_pair(
    p: &QSPParams,
    comps: &BTreeMap<RootVec, AlgebraElement>,
    mu: &[i64],
    i: usize,
) -> Result<(AlgebraElement, AlgebraElement), QuasiKError> {
    let alg = &p.alg;
    let sd = &p.satake;
    let datum = &sd.datum;
    let n = sd.rank();
    let ai = unit_root(n, i);
    let mut a = AlgebraElement::zero(Side::Plus);
    let mut ia = AlgebraElement::zero(Side::Plus);
    if sd.in_x[i] || mu[i] == 0 {
        return Ok((a, ia));
    }
    let theta_ai = sd.theta_simple(i);
    let shifted = sub_roots(&add_roots(mu, &theta_ai), &ai);
    if let Some(xs) = lookup(comps, &shifted) {
        let cxb = p.cx_bar[i].as_ref().expect("defined off X");
        a = alg.add(&a, &alg.mul(xs, cxb)?)?;
        let cx = p.x_elems[i].as_ref().expect("defined off X").scaled(&(&p.c[i] * &datum.q(-datum.pair_roots(&theta_ai, &ai))));
        ia = alg.add(&ia, &alg.mul(&cx, xs)?)?;
    }
    if !p.s[i].is_zero() {
        if let Some(xl) = lookup(comps, &sub_roots(mu, &ai)) {
            a = alg.add(&a, &xl.scaled(&p.s[i].bar()))?;
            ia = alg.add(&ia, &xl.scaled(&p.s[i]))?;
        }
    }
    let f = -datum.qi_diff(i);
    Ok((a.scaled(&f), ia.scaled(&f)))
}

/// Counts of conditions verified at one step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Solvability {
    pub checked_2a: usize,
    pub checked_2b: usize,
}

/// Verifies `r_i(_jA) = _jr(A_i)` for all `i, j` and the Serre-type
/// conditions for `i != j`.
pub fn check_solvable(p: &QSPParams, mu: &[i64], a: &[AlgebraElement], ia: &[AlgebraElement]) -> Result<Solvability, QuasiKError> {
    let alg = &p.alg;
    let datum = &p.satake.datum;
    let n = p.rank();
    let mut out = Solvability::default();
    for i in 0..n {
        for j in 0..n {
            let lhs = alg.skew_r(i, &ia[j])?;
            let rhs = alg.skew_ir(j, &a[i])?;
            if lhs != rhs {
                return Err(QuasiKError::Cond2a { mu: mu.to_vec(), i: i + 1, j: j + 1 });
            }
            out.checked_2a += 1;
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let m = 1 - datum.cartan[i][j];
            let mut target = unit_root(n, j);
            target[i] += m;
            if target != mu {
                continue;
            }
            let mut sum = Scalar::zero();
            for s in 1..=m {
                let mut w: Word = vec![i as u8; (m - s) as usize];
                w.push(j as u8);
                w.extend(std::iter::repeat_n(i as u8, (s - 1) as usize));
                let pr = alg.pairing(&alg.word(Side::Minus, &w)?, &a[i])?;
                let sgn = if s % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                sum += &(&(&datum.qbinom(m, s, i)? * &sgn) * &pr);
            }
            let t1 = &sum * &alg.pairing_constant(i);
            let wi: Word = vec![i as u8; m as usize];
            let t2 = &alg.pairing(&alg.word(Side::Minus, &wi)?, &a[j])? * &alg.pairing_constant(j);
            if !(&t1 + &t2).is_zero() {
                return Err(QuasiKError::Cond2b { mu: mu.to_vec(), i: i + 1, j: j + 1 });
            }
            out.checked_2b += 1;
        }
    }
    Ok(out)
}

/// The unique `x` in `U^+_mu` with `r_i(x) = A_i` for all `i`, by one linear
/// solve over the weight basis; `_i r(x) = _iA` is asserted afterwards.
pub fn solve_step(p: &QSPParams, mu: &[i64], a: &[AlgebraElement], ia: &[AlgebraElement]) -> Result<AlgebraElement, QuasiKError> {
    let alg = &p.alg;
    let n = p.rank();
    let b = alg.basis(mu)?;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut rhs: Vec<Vec<Scalar>> = Vec::new();
    for i in 0..n {
        let lower = sub_roots(mu, &unit_root(n, i));
        let ai = a[i].component(&lower);
        if mu[i] == 0 {
            if a[i].weights().next().is_some() {
                return Err(QuasiKError::Inconsistent(mu.to_vec()));
            }
            continue;
        }
        let m = b.r_matrix(i).expect("letter present");
        let target = ai.cloned().unwrap_or_else(|| vec![Scalar::zero(); m.rows()]);
        for r in 0..m.rows() {
            rows.push(m.row(r).to_vec());
            rhs.push(vec![target[r].clone()]);
        }
    }
    let sys = Matrix::from_rows(rows);
    let sol = sys.solve(&Matrix::from_rows(rhs)).map_err(|e| match e {
        LinalgError::Inconsistent => QuasiKError::Inconsistent(mu.to_vec()),
        other => QuasiKError::Linalg(other),
    })?;
    let coords = sol.column(0);
    let mut x = AlgebraElement::zero(Side::Plus);
    if coords.iter().any(|c| !c.is_zero()) {
        x.comps.insert(mu.to_vec(), coords);
    }
    for i in 0..n {
        if alg.skew_ir(i, &x)? != ia[i] {
            return Err(QuasiKError::LeftDerivative { mu: mu.to_vec(), i: i + 1 });
        }
    }
    Ok(x)
}

/// All components up to height `cutoff`.
pub fn compute(p: &QSPParams, cutoff: i64) -> Result<QuasiK, QuasiKError> {
    let n = p.rank();
    let sd = &p.satake;
    let mut comps = BTreeMap::new();
    comps.insert(vec![0; n], p.alg.one(Side::Plus));
    let mut log = Vec::new();
    for mu in weights_up_to(n, cutoff) {
        if height(&mu) == 0 {
            continue;
        }
        let mut a = Vec::with_capacity(n);
        let mut ia = Vec::with_capacity(n);
        for i in 0..n {
            let (x, y) = rhs_pair(p, &comps, &mu, i)?;
            a.push(x);
            ia.push(y);
        }
        let mut rec = StepRecord { weight: mu.clone(), conditions_2a: 0, conditions_2b: 0, zero: true };
        if height(&mu) >= 2 {
            let s = check_solvable(p, &mu, &a, &ia)?;
            rec.conditions_2a = s.checked_2a;
            rec.conditions_2b = s.checked_2b;
        }
        let x = if a.iter().all(|e| e.is_zero()) && ia.iter().all(|e| e.is_zero()) {
            AlgebraElement::zero(Side::Plus)
        } else {
            solve_step(p, &mu, &a, &ia)?
        };
        if !x.is_zero() {
            if sd.theta_root(&mu) != neg_root(&mu) {
                return Err(QuasiKError::Support(mu));
            }
            rec.zero = false;
            comps.insert(mu.clone(), x);
        }
        log.push(rec);
    }
    Ok(QuasiK { comps, cutoff, log })
}

// ---- serialization and caching ----

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuasiKJson {
    pub fingerprint: String,
    pub cutoff: i64,
    /// Weight -> list of (word with 1-based letters, coefficient).
    pub components: Vec<(RootVec, Vec<(Vec<u8>, String)>)>,
}

/// Hash of datum, Satake data, parameters, reduced words and basis order.
pub fn fingerprint(p: &QSPParams) -> String {
    let sd = &p.satake;
    let mut h = Sha256::new();
    let order = match p.alg.order {
        BasisOrder::Lex => "lex",
        BasisOrder::RevLex => "revlex",
    };
    let text = format!(
        "{:?}|{:?}|{:?}|{:?}|{:?}|{}|{}",
        sd.datum.cartan,
        sd.x,
        sd.tau,
        sd.w0_word,
        sd.wx_word,
        p.c.iter().chain(&p.s).map(|x| x.to_string()).collect::<Vec<_>>().join(","),
        order
    );
    h.update(text.as_bytes());
    hex::encode(h.finalize())
}

pub fn to_json(p: &QSPParams, k: &QuasiK) -> Result<QuasiKJson, QuasiKError> {
    let mut components = Vec::new();
    for (mu, x) in &k.comps {
        let words = p
            .alg
            .to_words(x)?
            .into_iter()
            .map(|(w, c)| (w.iter().map(|l| l + 1).collect(), c.to_string()))
            .collect();
        components.push((mu.clone(), words));
    }
    Ok(QuasiKJson { fingerprint: fingerprint(p), cutoff: k.cutoff, components })
}

pub fn from_json(p: &QSPParams, j: &QuasiKJson) -> Result<QuasiK, QuasiKError> {
    if j.fingerprint != fingerprint(p) {
        return Err(QuasiKError::Cache("fingerprint mismatch".into()));
    }
    let d = p.satake.datum.d;
    let mut comps = BTreeMap::new();
    for (mu, terms) in &j.components {
        let mut parsed = Vec::with_capacity(terms.len());
        for (w, c) in terms {
            if w.contains(&0) {
                return Err(QuasiKError::Cache("letters are 1-based".into()));
            }
            parsed.push((w.iter().map(|l| l - 1).collect(), Scalar::parse(c, d)?));
        }
        let x = p.alg.from_words(Side::Plus, &parsed)?;
        comps.insert(mu.clone(), if mu.iter().all(|&m| m == 0) && parsed.is_empty() { p.alg.one(Side::Plus) } else { x });
    }
    Ok(QuasiK { comps, cutoff: j.cutoff, log: Vec::new() })
}

fn cache_path(p: &QSPParams) -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV).map(|d| PathBuf::from(d).join(format!("quasik-{}.json", &fingerprint(p)[..16])))
}

/// `compute` backed by the JSON cache in `$QSYM_CACHE_DIR`, if set. A cached
/// run with a larger cutoff is truncated; a smaller one is recomputed.
pub fn compute_cached(p: &QSPParams, cutoff: i64) -> Result<QuasiK, QuasiKError> {
    let Some(path) = cache_path(p) else { return compute(p, cutoff) };
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(j) = serde_json::from_str::<QuasiKJson>(&text) {
            if j.cutoff >= cutoff {
                let mut k = from_json(p, &j)?;
                k.comps.retain(|mu, _| height(mu) <= cutoff);
                k.cutoff = cutoff;
                return Ok(k);
            }
        }
    }
    let k = compute(p, cutoff)?;
    let text = serde_json::to_string(&to_json(p, &k)?).map_err(|e| QuasiKError::Cache(e.to_string()))?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| QuasiKError::Cache(e.to_string()))?;
    }
    std::fs::write(&path, text).map_err(|e| QuasiKError::Cache(e.to_string()))?;
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsp::{default_params, params_from_config};
    use crate::rootdata::catalog_entry;
    use std::sync::Arc;

    fn params(name: &str) -> QSPParams {
        let sd = Arc::new(catalog_entry(name).unwrap().build().unwrap());
        let alg = Arc::new(FreeAlgebra::new(sd.datum.clone()));
        params_from_config(sd, alg, &default_params(name).unwrap()).unwrap()
    }

    #[test]
    fn cutoff_zero_and_one() {
        let p = params("A1-split");
        let k = compute(&p, 0).unwrap();
        assert_eq!(k.support(), vec![vec![0]]);
        let k = compute(&p, 1).unwrap();
        assert_eq!(k.support(), vec![vec![0]]);
        let p = params("A1-split-s");
        let k = compute(&p, 1).unwrap();
        let expect = p.alg.generator(Side::Plus, 0).scaled(&-(&p.satake.datum.qi_diff(0) * &p.s[0]));
        assert_eq!(k.component(&[1]), Some(&expect));
    }

    #[test]
    fn a1_split_two_alpha() {
        // X_{2 alpha} = x E^2 with r(x E^2) = x (1 + q^2) E fixed by A = (q - q^{-1}) bar(c) E.
        let p = params("A1-split");
        let k = compute(&p, 2).unwrap();
        let datum = &p.satake.datum;
        let a = &datum.qi_diff(0) * &p.c[0].bar();
        let x = &a / &(&Scalar::one() + &datum.q(2));
        let e2 = p.alg.word(Side::Plus, &[0, 0]).unwrap();
        assert_eq!(k.component(&[2]), Some(&e2.scaled(&x)));
    }

    #[test]
    fn json_round_trip() {
        let p = params("A2-quasisplit");
        let k = compute(&p, 4).unwrap();
        let j = to_json(&p, &k).unwrap();
        let text = serde_json::to_string(&j).unwrap();
        let back = from_json(&p, &serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.comps, k.comps);
    }
}
