//! Root vectors along a reduced word and the quasi R-matrix, built both from
//! dual bases of the pairing and as an ordered product of rank-one factors.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::freealg::{AlgebraElement, Direction, FreeAlgError, FreeAlgebra, Side};
use crate::linalg::{LinalgError, Matrix};
use crate::rootdata::{add_roots, height, is_nonneg, unit_root, RootVec};
use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuasiRError {
    #[error("word {0:?} is not reduced")]
    NotReduced(Vec<usize>),
    #[error("prefix length {0} exceeds the word length {1}")]
    BadPrefix(usize, usize),
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Debug)]
pub struct RootVectorTable {
    pub word: Vec<usize>,
    pub gammas: Vec<RootVec>,
    pub e: Vec<AlgebraElement>,
    pub f: Vec<AlgebraElement>,
}

/// Element of the completed `U^- (x) U^+` with equal weights on both legs:
/// `comps[mu][a][c]` is the coefficient of `F_{B_a} (x) E_{B_c}` for the
/// basis words `B` of weight `mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiR {
    pub comps: BTreeMap<RootVec, Matrix<Scalar>>,
    pub cutoff: i64,
}

impl QuasiR {
    pub fn one(n: usize, cutoff: i64) -> Self {
        QuasiR { comps: BTreeMap::from([(vec![0; n], Matrix::identity(1))]), cutoff }
    }

    pub fn component(&self, mu: &[i64]) -> Option<&Matrix<Scalar>> {
        self.comps.get(mu)
    }

    pub fn bar(&self) -> Self {
        QuasiR { comps: self.comps.iter().map(|(k, m)| (k.clone(), m.map(|x| x.bar()))).collect(), cutoff: self.cutoff }
    }

    /// Components of height at most `h`.
    pub fn truncated(&self, h: i64) -> Self {
        QuasiR {
            comps: self.comps.iter().filter(|(k, _)| height(k) <= h).map(|(k, m)| (k.clone(), m.clone())).collect(),
            cutoff: h.min(self.cutoff),
        }
    }
}

/// `E_{gamma_j} = T_{i_1} ... T_{i_{j-1}}(E_{i_j})` and the `F` analogues.
pub fn root_vectors(alg: &FreeAlgebra, word: &[usize]) -> Result<RootVectorTable, QuasiRError> {
    let datum = &alg.datum;
    let n = alg.rank();
    let mut gammas = Vec::with_capacity(word.len());
    for j in 0..word.len() {
        let mut g = unit_root(n, word[j]);
        for &i in word[..j].iter().rev() {
            g = datum.reflect_root(i, &g);
        }
        if !is_nonneg(&g) || gammas.contains(&g) {
            return Err(QuasiRError::NotReduced(word.to_vec()));
        }
        gammas.push(g);
    }
    let mut e = Vec::with_capacity(word.len());
    let mut f = Vec::with_capacity(word.len());
    for j in 0..word.len() {
        e.push(alg.braid_t_word(&word[..j], &alg.generator(Side::Plus, word[j]), Direction::Fwd)?);
        f.push(alg.braid_t_word(&word[..j], &alg.generator(Side::Minus, word[j]), Direction::Fwd)?);
    }
    Ok(RootVectorTable { word: word.to_vec(), gammas, e, f })
}

/// `R_mu = sum (G^{-1})_{c,a} F_{B_a} (x) E_{B_c}` with `G` the Gram matrix at `mu`.
pub fn quasi_r_dual(alg: &FreeAlgebra, mu: &[i64]) -> Result<Matrix<Scalar>, QuasiRError> {
    let g = alg.gram(mu)?;
    Ok(g.inverse()?.transpose())
}

/// All components of height at most `cutoff` from dual bases.
pub fn quasi_r_dual_all(alg: &FreeAlgebra, cutoff: i64) -> Result<QuasiR, QuasiRError> {
    let n = alg.rank();
    let mut comps = BTreeMap::new();
    for mu in weights_up_to(n, cutoff) {
        comps.insert(mu.clone(), quasi_r_dual(alg, &mu)?);
    }
    Ok(QuasiR { comps, cutoff })
}

pub fn weights_up_to(n: usize, h: i64) -> Vec<RootVec> {
    fn go(n: usize, h: i64, cur: &mut Vec<i64>, out: &mut Vec<RootVec>) {
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
    out.sort_by_key(|m| (height(m), m.clone()));
    out
}

fn outer(x: &[Scalar], y: &[Scalar]) -> Matrix<Scalar> {
    Matrix::from_fn(x.len(), y.len(), |a, c| if x[a].is_zero() || y[c].is_zero() { Scalar::zero() } else { &x[a] * &y[c] })
}

/// Matrix whose column `a * db + b` holds the coordinates of `B^mu_a B^nu_b`.
fn concat_matrix(alg: &FreeAlgebra, mu: &[i64], nu: &[i64]) -> Result<Matrix<Scalar>, QuasiRError> {
    let bm = alg.basis(mu)?;
    let bn = alg.basis(nu)?;
    let target = add_roots(mu, nu);
    let dt = alg.dim(&target)?;
    let mut cols = Vec::with_capacity(bm.dim() * bn.dim());
    for wa in &bm.words {
        for wb in &bn.words {
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            cols.push(alg.word_coords(&w)?);
        }
    }
    Ok(Matrix::from_cols(dt, &cols))
}

/// Product of two tensor elements, dropping weights above `cutoff`.
pub fn tensor_mul(alg: &FreeAlgebra, a: &QuasiR, b: &QuasiR, cutoff: i64) -> Result<QuasiR, QuasiRError> {
    let mut comps: BTreeMap<RootVec, Matrix<Scalar>> = BTreeMap::new();
    for (mu, m1) in &a.comps {
        for (nu, m2) in &b.comps {
            let target = add_roots(mu, nu);
            if height(&target) > cutoff {
                continue;
            }
            let l = concat_matrix(alg, mu, nu)?;
            let prod = l.mul(&m1.kron(m2)).mul(&l.transpose());
            match comps.get_mut(&target) {
                Some(acc) => acc.add_assign(&prod),
                None => {
                    comps.insert(target, prod);
                }
            }
        }
    }
    comps.retain(|_, m| !m.is_zero());
    Ok(QuasiR { comps, cutoff })
}

/// Rank-one factor `R^{[j]} = sum_r (-1)^r q_i^{-r(r-1)/2} (q_i - q_i^{-1})^r / [r]_i! F_gamma^r (x) E_gamma^r`.
pub fn pbw_factor(alg: &FreeAlgebra, table: &RootVectorTable, j: usize, cutoff: i64) -> Result<QuasiR, QuasiRError> {
    let datum = &alg.datum;
    let i = table.word[j];
    let gamma = &table.gammas[j];
    let n = alg.rank();
    let mut comps = BTreeMap::from([(vec![0; n], Matrix::identity(1))]);
    let mut ep = alg.one(Side::Plus);
    let mut fp = alg.one(Side::Minus);
    let mut r = 1i64;
    while height(gamma) * r <= cutoff {
        ep = alg.mul(&ep, &table.e[j])?;
        fp = alg.mul(&fp, &table.f[j])?;
        let sign = if r % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        let c = &(&sign * &datum.qi(i, -r * (r - 1) / 2)) * &datum.qi_diff(i).pow(r as i32)?;
        let c = c.try_div(&datum.qfactorial(r, i)?)?;
        let mu: RootVec = gamma.iter().map(|g| g * r).collect();
        let dim = alg.dim(&mu)?;
        let zero = vec![Scalar::zero(); dim];
        let ev = ep.component(&mu).unwrap_or(&zero);
        let fv = fp.component(&mu).unwrap_or(&zero);
        let m = outer(fv, ev).scale(&c);
        if !m.is_zero() {
            comps.insert(mu, m);
        }
        r += 1;
    }
    Ok(QuasiR { comps, cutoff })
}

/// Ordered product `R^{[hi-1]} ... R^{[lo]}` (0-based, right to left).
fn pbw_range(alg: &FreeAlgebra, table: &RootVectorTable, lo: usize, hi: usize, cutoff: i64) -> Result<QuasiR, QuasiRError> {
    let mut acc = QuasiR::one(alg.rank(), cutoff);
    for j in (lo..hi).rev() {
        let f = pbw_factor(alg, table, j, cutoff)?;
        acc = tensor_mul(alg, &acc, &f, cutoff)?;
    }
    Ok(acc)
}

/// `R = R^{[t]} ... R^{[1]}` along a reduced word of `w_0`.
pub fn quasi_r_pbw(alg: &FreeAlgebra, table: &RootVectorTable, cutoff: i64) -> Result<QuasiR, QuasiRError> {
    pbw_range(alg, table, 0, table.word.len(), cutoff)
}

/// `R_X = R^{[s]} ... R^{[1]}` where the first `s` letters form a reduced word of `w_X`.
pub fn quasi_r_x(alg: &FreeAlgebra, table: &RootVectorTable, s: usize, cutoff: i64) -> Result<QuasiR, QuasiRError> {
    if s > table.word.len() {
        return Err(QuasiRError::BadPrefix(s, table.word.len()));
    }
    pbw_range(alg, table, 0, s, cutoff)
}

/// `R bar(R_X) = R^{[t]} ... R^{[s+1]}`.
pub fn r_times_rx_bar(alg: &FreeAlgebra, table: &RootVectorTable, s: usize, cutoff: i64) -> Result<QuasiR, QuasiRError> {
    if s > table.word.len() {
        return Err(QuasiRError::BadPrefix(s, table.word.len()));
    }
    pbw_range(alg, table, s, table.word.len(), cutoff)
}

/// Expands one component into `(F-element, E-element)` pairs, one per
/// nonzero row of the coefficient matrix.
pub fn component_terms(alg: &FreeAlgebra, mu: &[i64], m: &Matrix<Scalar>) -> Result<Vec<(AlgebraElement, AlgebraElement)>, QuasiRError> {
    let b = alg.basis(mu)?;
    let mut out = Vec::new();
    for (a, w) in b.words.iter().enumerate() {
        let row = m.row(a);
        if row.iter().all(|x| x.is_zero()) {
            continue;
        }
        let y = alg.word(Side::Minus, w)?;
        let mut x = AlgebraElement::zero(Side::Plus);
        x.comps.insert(mu.to_vec(), row.to_vec());
        out.push((y, x));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::RootDatum;
    use std::sync::Arc;

    #[test]
    fn simple_root_component() {
        let alg = FreeAlgebra::new(Arc::new(RootDatum::of_type("A", 2).unwrap()));
        let r = quasi_r_dual(&alg, &[1, 0]).unwrap();
        assert_eq!(r.get(0, 0), &-alg.datum.qi_diff(0));
        assert_eq!(quasi_r_dual(&alg, &[0, 0]).unwrap(), Matrix::identity(1));
    }

    #[test]
    fn root_vectors_enumerate_positive_roots() {
        let alg = FreeAlgebra::new(Arc::new(RootDatum::of_type("A", 2).unwrap()));
        let t = root_vectors(&alg, &[0, 1, 0]).unwrap();
        assert_eq!(t.gammas, vec![vec![1, 0], vec![1, 1], vec![0, 1]]);
        let t12 = alg.braid_t(0, &alg.generator(Side::Plus, 1), Direction::Fwd).unwrap();
        assert_eq!(t.e[1], t12);
        assert!(matches!(root_vectors(&alg, &[0, 0]), Err(QuasiRError::NotReduced(_))));
    }

    #[test]
    fn a1_pbw_matches_dual() {
        let alg = FreeAlgebra::new(Arc::new(RootDatum::of_type("A", 1).unwrap()));
        let t = root_vectors(&alg, &[0]).unwrap();
        let pbw = quasi_r_pbw(&alg, &t, 4).unwrap();
        let dual = quasi_r_dual_all(&alg, 4).unwrap();
        assert_eq!(pbw, dual);
        assert_eq!(quasi_r_pbw(&alg, &t, 0).unwrap(), QuasiR::one(1, 0));
    }
}
