//! `U^+` and `U^-` as per-weight spaces of free words modulo the radical of
//! the pairing. A word is zero in `U^+_mu` iff all its images under the left
//! skew derivations vanish, so each weight space is represented by the
//! lexicographically first words whose stacked images `(_i r(w))_i` are
//! independent. Both halves share the same bases through `E_i <-> F_i`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{LinalgError, Matrix};
use crate::rootdata::{add_roots, height, is_nonneg, sub_roots, unit_root, RootDatum, RootVec};
use crate::scalar::{Scalar, ScalarError};

/// Letters are node indices (0-based).
pub type Word = Vec<u8>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisOrder {
    Lex,
    RevLex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Fwd,
    Inv,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FreeAlgError {
    #[error("elements live on different sides")]
    SideMismatch,
    #[error("weight {0:?} is not in Q+")]
    NotInQPlus(RootVec),
    #[error("T_{} applied to an element containing the letter {}; use the reduced-word braid operator", .0 + 1, .0 + 1)]
    UnsafeBraid(usize),
    #[error("T_{} image left the one-sided algebra (residual term F^{}K_{:?})", .0 + 1, .1, .2)]
    MixedResidual(usize, u32, RootVec),
    #[error("K-tags differ: {0:?} vs {1:?}")]
    KTagMismatch(Option<RootVec>, Option<RootVec>),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Coordinates per positive weight. On the minus side the key `mu` stands
/// for the weight `-mu`.
pub type Comps = BTreeMap<RootVec, Vec<Scalar>>;

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    pub side: Side,
    pub comps: Comps,
    /// Exponent `beta` for elements of the form `u K_beta`.
    pub k_tag: Option<RootVec>,
}

impl AlgebraElement {
    pub fn zero(side: Side) -> Self {
        AlgebraElement { side, comps: Comps::new(), k_tag: None }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn component(&self, mu: &[i64]) -> Option<&Vec<Scalar>> {
        self.comps.get(mu)
    }

    pub fn weights(&self) -> impl Iterator<Item = &RootVec> {
        self.comps.keys()
    }

    /// The unique weight of a nonzero homogeneous element.
    pub fn homogeneous_weight(&self) -> Option<&RootVec> {
        if self.comps.len() == 1 {
            self.comps.keys().next()
        } else {
            None
        }
    }

    pub fn with_k_tag(mut self, beta: Option<RootVec>) -> Self {
        self.k_tag = beta;
        self
    }
}

fn drop_zero(comps: &mut Comps) {
    comps.retain(|_, v| v.iter().any(|x| !x.is_zero()));
}

/// Per-weight quotient `U^+_mu` of the free words of weight `mu`.
#[derive(Debug)]
pub struct WeightBasis {
    pub weight: RootVec,
    pub words: Vec<Word>,
    /// `(node, offset, len)` of the blocks `_i r(w)` in the stacked image.
    blocks: Vec<(usize, usize, usize)>,
    pivot_rows: Vec<usize>,
    /// Inverse of the stacked images of the basis words restricted to the pivot rows.
    inv: Matrix<Scalar>,
    /// `_i r` on coordinates, `dim(mu - alpha_i) x dim(mu)`.
    ir_mats: Vec<Option<Matrix<Scalar>>>,
    /// `r_i` on coordinates.
    r_mats: Vec<Option<Matrix<Scalar>>>,
    memo: RwLock<HashMap<Word, Arc<Vec<Scalar>>>>,
}

impl WeightBasis {
    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn ir_matrix(&self, i: usize) -> Option<&Matrix<Scalar>> {
        self.ir_mats[i].as_ref()
    }

    pub fn r_matrix(&self, i: usize) -> Option<&Matrix<Scalar>> {
        self.r_mats[i].as_ref()
    }
}

/// Term `F_i^a K_beta u` (plus side) or `u K_beta E_i^a` (minus side) of the
/// mixed calculus used inside braid operators.
type MixedTerms = BTreeMap<(u32, RootVec), Comps>;

/// The algebras `U^+` and `U^-` over a fixed root datum with a shared,
/// append-only cache of weight bases.
#[derive(Debug)]
pub struct FreeAlgebra {
    pub datum: Arc<RootDatum>,
    pub order: BasisOrder,
    cache: RwLock<HashMap<RootVec, Arc<WeightBasis>>>,
}

fn words_of_weight(mu: &[i64]) -> Vec<Word> {
    fn go(rest: &mut Vec<i64>, prefix: &mut Word, out: &mut Vec<Word>) {
        if rest.iter().all(|&x| x == 0) {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            if rest[i] > 0 {
                rest[i] -= 1;
                prefix.push(i as u8);
                go(rest, prefix, out);
                prefix.pop();
                rest[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut mu.to_vec(), &mut Vec::new(), &mut out);
    out
}

pub fn word_weight(w: &[u8], n: usize) -> RootVec {
    let mut v = vec![0; n];
    for &l in w {
        v[l as usize] += 1;
    }
    v
}

fn remove_at(w: &[u8], p: usize) -> Word {
    let mut out = Vec::with_capacity(w.len() - 1);
    out.extend_from_slice(&w[..p]);
    out.extend_from_slice(&w[p + 1..]);
    out
}

fn axpy(acc: &mut [Scalar], c: &Scalar, x: &[Scalar]) {
    if c.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(x) {
        if !b.is_zero() {
            *a += &(c * b);
        }
    }
}

impl FreeAlgebra {
    pub fn new(datum: Arc<RootDatum>) -> Self {
        Self::with_order(datum, BasisOrder::Lex)
    }

    pub fn with_order(datum: Arc<RootDatum>, order: BasisOrder) -> Self {
        FreeAlgebra { datum, order, cache: RwLock::new(HashMap::new()) }
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    /// `<F_i, E_i> = -1 / (q_i - q_i^{-1})`
    pub fn pairing_constant(&self, i: usize) -> Scalar {
        -(self.datum.qi_diff(i).try_inv().expect("q_i - q_i^{-1} is nonzero"))
    }

    /// Cached weight basis of `U^+_mu`.
    pub fn basis(&self, mu: &[i64]) -> Result<Arc<WeightBasis>, FreeAlgError> {
        if !is_nonneg(mu) || mu.len() != self.rank() {
            return Err(FreeAlgError::NotInQPlus(mu.to_vec()));
        }
        if let Some(b) = self.cache.read().expect("cache lock").get(mu) {
            return Ok(b.clone());
        }
        let built = Arc::new(self.build_basis(mu)?);
        let mut w = self.cache.write().expect("cache lock");
        Ok(w.entry(mu.to_vec()).or_insert(built).clone())
    }

    pub fn dim(&self, mu: &[i64]) -> Result<usize, FreeAlgError> {
        Ok(self.basis(mu)?.dim())
    }

    fn build_basis(&self, mu: &[i64]) -> Result<WeightBasis, FreeAlgError> {
        let n = self.rank();
        if mu.iter().all(|&x| x == 0) {
            return Ok(WeightBasis {
                weight: mu.to_vec(),
                words: vec![Vec::new()],
                blocks: Vec::new(),
                pivot_rows: Vec::new(),
                inv: Matrix::identity(1),
                ir_mats: vec![None; n],
                r_mats: vec![None; n],
                memo: RwLock::new(HashMap::new()),
            });
        }
        let mut blocks = Vec::new();
        let mut offset = 0;
        for i in 0..n {
            if mu[i] > 0 {
                let lower = sub_roots(mu, &unit_root(n, i));
                let dim = self.dim(&lower)?;
                blocks.push((i, offset, dim));
                offset += dim;
            }
        }
        let mut candidates = words_of_weight(mu);
        if self.order == BasisOrder::RevLex {
            candidates.reverse();
        }
        let images: Vec<Vec<Scalar>> = candidates
            .iter()
            .map(|w| self.stacked_image(w, &blocks, offset))
            .collect::<Result<_, _>>()?;
        let m = Matrix::from_cols(offset, &images);
        let (cols, rows) = m.column_rank_profile();
        let words: Vec<Word> = cols.iter().map(|&c| candidates[c].clone()).collect();
        let inv = if cols.is_empty() { Matrix::zeros(0, 0) } else { m.submatrix(&rows, &cols).inverse()? };
        let mut ir_mats = vec![None; n];
        let mut r_mats = vec![None; n];
        for &(i, off, len) in &blocks {
            ir_mats[i] = Some(Matrix::from_fn(len, cols.len(), |r, c| images[cols[c]][off + r].clone()));
            let r_cols: Vec<Vec<Scalar>> = words.iter().map(|w| self.word_r(i, w)).collect::<Result<_, _>>()?;
            r_mats[i] = Some(Matrix::from_cols(len, &r_cols));
        }
        Ok(WeightBasis {
            weight: mu.to_vec(),
            words,
            blocks,
            pivot_rows: rows,
            inv,
            ir_mats,
            r_mats,
            memo: RwLock::new(HashMap::new()),
        })
    }

    fn stacked_image(&self, w: &[u8], blocks: &[(usize, usize, usize)], total: usize) -> Result<Vec<Scalar>, FreeAlgError> {
        let mut out = vec![Scalar::zero(); total];
        for &(i, off, len) in blocks {
            let img = self.word_ir(i, w)?;
            debug_assert_eq!(img.len(), len);
            out[off..off + len].clone_from_slice(&img);
        }
        Ok(out)
    }

    /// `_i r(w)` for a free word, in coordinates at `wt(w) - alpha_i`.
    fn word_ir(&self, i: usize, w: &[u8]) -> Result<Vec<Scalar>, FreeAlgError> {
        let n = self.rank();
        let mu = word_weight(w, n);
        let lower = sub_roots(&mu, &unit_root(n, i));
        let lb = self.basis(&lower)?;
        let mut acc = vec![Scalar::zero(); lb.dim()];
        let mut pre = 0i64;
        for (p, &l) in w.iter().enumerate() {
            if l as usize == i {
                let c = self.datum.q(pre);
                axpy(&mut acc, &c, &self.coords_in(&lb, &remove_at(w, p))?);
            }
            pre += self.datum.form[i][l as usize];
        }
        Ok(acc)
    }

    /// `r_i(w)` for a free word.
    fn word_r(&self, i: usize, w: &[u8]) -> Result<Vec<Scalar>, FreeAlgError> {
        let n = self.rank();
        let mu = word_weight(w, n);
        let lower = sub_roots(&mu, &unit_root(n, i));
        let lb = self.basis(&lower)?;
        let mut acc = vec![Scalar::zero(); lb.dim()];
        let mut suf = 0i64;
        for p in (0..w.len()).rev() {
            let l = w[p] as usize;
            if l == i {
                let c = self.datum.q(suf);
                axpy(&mut acc, &c, &self.coords_in(&lb, &remove_at(w, p))?);
            }
            suf += self.datum.form[i][l];
        }
        Ok(acc)
    }

    fn coords_in(&self, b: &WeightBasis, w: &[u8]) -> Result<Vec<Scalar>, FreeAlgError> {
        if w.is_empty() {
            return Ok(vec![Scalar::one()]);
        }
        if let Some(v) = b.memo.read().expect("memo lock").get(w) {
            return Ok(v.as_ref().clone());
        }
        let total = b.blocks.last().map_or(0, |&(_, o, l)| o + l);
        let img = self.stacked_image(w, &b.blocks, total)?;
        let sel: Vec<Scalar> = b.pivot_rows.iter().map(|&r| img[r].clone()).collect();
        let coords = b.inv.mul_vec(&sel);
        b.memo.write().expect("memo lock").insert(w.to_vec(), Arc::new(coords.clone()));
        Ok(coords)
    }

    /// Coordinates of a free word in the basis of its weight.
    pub fn word_coords(&self, w: &[u8]) -> Result<Vec<Scalar>, FreeAlgError> {
        let b = self.basis(&word_weight(w, self.rank()))?;
        self.coords_in(&b, w)
    }

    // ---- element constructors ----

    pub fn one(&self, side: Side) -> AlgebraElement {
        let mut comps = Comps::new();
        comps.insert(vec![0; self.rank()], vec![Scalar::one()]);
        AlgebraElement { side, comps, k_tag: None }
    }

    pub fn scalar_elem(&self, side: Side, c: Scalar) -> AlgebraElement {
        self.one(side).scaled(&c)
    }

    /// `E_i` or `F_i`.
    pub fn generator(&self, side: Side, i: usize) -> AlgebraElement {
        self.word(side, &[i as u8]).expect("generator")
    }

    pub fn word(&self, side: Side, w: &[u8]) -> Result<AlgebraElement, FreeAlgError> {
        let mut comps = Comps::new();
        comps.insert(word_weight(w, self.rank()), self.word_coords(w)?);
        let mut e = AlgebraElement { side, comps, k_tag: None };
        drop_zero(&mut e.comps);
        Ok(e)
    }

    pub fn from_words(&self, side: Side, terms: &[(Word, Scalar)]) -> Result<AlgebraElement, FreeAlgError> {
        let mut acc = AlgebraElement::zero(side);
        for (w, c) in terms {
            acc = self.add(&acc, &self.word(side, w)?.scaled(c))?;
        }
        Ok(acc)
    }

    /// Divided power `E_i^{(k)} = E_i^k / [k]_i!`.
    pub fn divided_power(&self, side: Side, i: usize, k: u32) -> Result<AlgebraElement, FreeAlgError> {
        let w = vec![i as u8; k as usize];
        let f = self.datum.qfactorial(k as i64, i)?.try_inv()?;
        Ok(self.word(side, &w)?.scaled(&f))
    }

    /// Expansion over basis words.
    pub fn to_words(&self, x: &AlgebraElement) -> Result<Vec<(Word, Scalar)>, FreeAlgError> {
        let mut out = Vec::new();
        for (mu, v) in &x.comps {
            let b = self.basis(mu)?;
            for (w, c) in b.words.iter().zip(v) {
                if !c.is_zero() {
                    out.push((w.clone(), c.clone()));
                }
            }
        }
        Ok(out)
    }

    /// Debug dump: per weight, `(word, scalar)` pairs with 1-based letters.
    pub fn dump(&self, x: &AlgebraElement) -> Result<serde_json::Value, FreeAlgError> {
        let letter = if x.side == Side::Plus { "E" } else { "F" };
        let mut per_weight = serde_json::Map::new();
        for (mu, v) in &x.comps {
            let b = self.basis(mu)?;
            let terms: Vec<serde_json::Value> = b
                .words
                .iter()
                .zip(v)
                .filter(|(_, c)| !c.is_zero())
                .map(|(w, c)| {
                    let word: String = w.iter().map(|l| format!("{letter}{}", l + 1)).collect();
                    serde_json::json!([if word.is_empty() { "1".to_string() } else { word }, c.to_string()])
                })
                .collect();
            let key = mu.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",");
            per_weight.insert(key, serde_json::Value::Array(terms));
        }
        let mut out = serde_json::Map::new();
        out.insert("side".into(), serde_json::json!(x.side));
        out.insert("components".into(), serde_json::Value::Object(per_weight));
        if let Some(k) = &x.k_tag {
            out.insert("k_tag".into(), serde_json::json!(k));
        }
        Ok(serde_json::Value::Object(out))
    }

    // ---- linear structure ----

    pub fn add(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, FreeAlgError> {
        if a.side != b.side {
            return Err(FreeAlgError::SideMismatch);
        }
        let k_tag = if a.is_zero() {
            b.k_tag.clone()
        } else if b.is_zero() || a.k_tag == b.k_tag {
            a.k_tag.clone()
        } else {
            return Err(FreeAlgError::KTagMismatch(a.k_tag.clone(), b.k_tag.clone()));
        };
        let mut comps = a.comps.clone();
        add_comps(&mut comps, &b.comps, &Scalar::one());
        Ok(AlgebraElement { side: a.side, comps, k_tag })
    }

    pub fn sub(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, FreeAlgError> {
        self.add(a, &b.scaled(&-Scalar::one()))
    }

    /// Product in `U^+` (or `U^-`); K-tags are not allowed here.
    pub fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, FreeAlgError> {
        if a.side != b.side {
            return Err(FreeAlgError::SideMismatch);
        }
        if a.k_tag.is_some() || b.k_tag.is_some() {
            return Err(FreeAlgError::KTagMismatch(a.k_tag.clone(), b.k_tag.clone()));
        }
        Ok(AlgebraElement { side: a.side, comps: self.mul_comps(&a.comps, &b.comps)?, k_tag: None })
    }

    fn mul_comps(&self, a: &Comps, b: &Comps) -> Result<Comps, FreeAlgError> {
        let mut out = Comps::new();
        for (mu, x) in a {
            let ba = self.basis(mu)?;
            for (nu, y) in b {
                let bb = self.basis(nu)?;
                let target = add_roots(mu, nu);
                let bt = self.basis(&target)?;
                let mut acc = vec![Scalar::zero(); bt.dim()];
                for (s, xs) in x.iter().enumerate() {
                    if xs.is_zero() {
                        continue;
                    }
                    for (t, yt) in y.iter().enumerate() {
                        if yt.is_zero() {
                            continue;
                        }
                        let mut w = ba.words[s].clone();
                        w.extend_from_slice(&bb.words[t]);
                        axpy(&mut acc, &(xs * yt), &self.coords_in(&bt, &w)?);
                    }
                }
                add_comps(&mut out, &BTreeMap::from([(target, acc)]), &Scalar::one());
            }
        }
        drop_zero(&mut out);
        Ok(out)
    }

    pub fn pow(&self, a: &AlgebraElement, k: u32) -> Result<AlgebraElement, FreeAlgError> {
        let mut acc = self.one(a.side);
        for _ in 0..k {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }

    // ---- skew derivations ----

    fn apply_mats(&self, x: &AlgebraElement, i: usize, left: bool) -> Result<AlgebraElement, FreeAlgError> {
        let n = self.rank();
        let mut comps = Comps::new();
        for (mu, v) in &x.comps {
            if mu[i] == 0 {
                continue;
            }
            let b = self.basis(mu)?;
            let m = if left { b.ir_matrix(i) } else { b.r_matrix(i) }.expect("letter present");
            comps.insert(sub_roots(mu, &unit_root(n, i)), m.mul_vec(v));
        }
        drop_zero(&mut comps);
        Ok(AlgebraElement { side: x.side, comps, k_tag: None })
    }

    /// `r_i(x)`
    pub fn skew_r(&self, i: usize, x: &AlgebraElement) -> Result<AlgebraElement, FreeAlgError> {
        self.apply_mats(x, i, false)
    }

    /// `_i r(x)`
    pub fn skew_ir(&self, i: usize, x: &AlgebraElement) -> Result<AlgebraElement, FreeAlgError> {
        self.apply_mats(x, i, true)
    }

    // ---- pairing ----

    /// `<F_w, x>` for a word `w` and a homogeneous coordinate vector `x` at `mu`.
    fn pair_word(&self, w: &[u8], mu: &[i64], x: &[Scalar]) -> Result<Scalar, FreeAlgError> {
        let n = self.rank();
        let mut cur = mu.to_vec();
        let mut v = x.to_vec();
        let mut factor = Scalar::one();
        for &l in w {
            let i = l as usize;
            if cur[i] == 0 {
                return Ok(Scalar::zero());
            }
            let b = self.basis(&cur)?;
            v = b.ir_matrix(i).expect("letter present").mul_vec(&v);
            cur = sub_roots(&cur, &unit_root(n, i));
            factor *= &self.pairing_constant(i);
        }
        debug_assert!(cur.iter().all(|&c| c == 0));
        Ok(&factor * &v[0])
    }

    /// Gram matrix `G[a][c] = <F_{B_a}, E_{B_c}>` of the basis at `mu`.
    pub fn gram(&self, mu: &[i64]) -> Result<Matrix<Scalar>, FreeAlgError> {
        let b = self.basis(mu)?;
        let n = b.dim();
        let mut rows = Vec::with_capacity(n);
        for w in &b.words {
            let mut row = Vec::with_capacity(n);
            for c in 0..n {
                let mut e = vec![Scalar::zero(); n];
                e[c] = Scalar::one();
                row.push(self.pair_word(w, mu, &e)?);
            }
            rows.push(row);
        }
        Ok(Matrix::from_rows(rows))
    }

    /// `<y, x>` with `y` on the minus and `x` on the plus side, including K-tags.
    pub fn pairing(&self, y: &AlgebraElement, x: &AlgebraElement) -> Result<Scalar, FreeAlgError> {
        if y.side != Side::Minus || x.side != Side::Plus {
            return Err(FreeAlgError::SideMismatch);
        }
        let mut acc = Scalar::zero();
        for (mu, yv) in &y.comps {
            let Some(xv) = x.comps.get(mu) else { continue };
            let b = self.basis(mu)?;
            for (w, ya) in b.words.iter().zip(yv) {
                if ya.is_zero() {
                    continue;
                }
                acc += &(ya * &self.pair_word(w, mu, xv)?);
            }
        }
        if let (Some(g), Some(h)) = (&y.k_tag, &x.k_tag) {
            acc *= &self.datum.q(-self.datum.pair_roots(g, h));
        }
        Ok(acc)
    }

    /// Pairing matrix on the full free word set of weight `mu`, computed from
    /// free-word recursion without any reduction. Used as an independent check.
    pub fn full_gram(&self, mu: &[i64]) -> (Vec<Word>, Matrix<Scalar>) {
        let mut words = words_of_weight(mu);
        if self.order == BasisOrder::RevLex {
            words.reverse();
        }
        let mut memo = HashMap::new();
        let n = words.len();
        let m = Matrix::from_fn(n, n, |a, c| self.free_pair(&words[a], &words[c], &mut memo));
        (words, m)
    }

    fn free_pair(&self, y: &[u8], x: &[u8], memo: &mut HashMap<(Word, Word), Scalar>) -> Scalar {
        if y.is_empty() {
            return if x.is_empty() { Scalar::one() } else { Scalar::zero() };
        }
        let key = (y.to_vec(), x.to_vec());
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let i = y[0] as usize;
        let mut acc = Scalar::zero();
        let mut pre = 0i64;
        for (p, &l) in x.iter().enumerate() {
            if l as usize == i {
                let sub = self.free_pair(&y[1..], &remove_at(x, p), memo);
                if !sub.is_zero() {
                    acc += &(&self.datum.q(pre) * &sub);
                }
            }
            pre += self.datum.form[i][l as usize];
        }
        let v = &acc * &self.pairing_constant(i);
        memo.insert(key, v.clone());
        v
    }

    // ---- involutions ----

    /// Bar involution: basis words are bar-invariant, so it acts on coefficients.
    pub fn bar(&self, x: &AlgebraElement) -> AlgebraElement {
        let comps = x.comps.iter().map(|(k, v)| (k.clone(), v.iter().map(|c| c.bar()).collect())).collect();
        AlgebraElement { side: x.side, comps, k_tag: x.k_tag.as_ref().map(|b| b.iter().map(|v| -v).collect()) }
    }

    /// Antiautomorphism `sigma`: word reversal.
    pub fn sigma(&self, x: &AlgebraElement) -> Result<AlgebraElement, FreeAlgError> {
        self.map_words(x, |w| w.iter().rev().copied().collect())
    }

    /// Relabels letters by a diagram automorphism.
    pub fn relabel(&self, perm: &[usize], x: &AlgebraElement) -> Result<AlgebraElement, FreeAlgError> {
        self.map_words(x, |w| w.iter().map(|&l| perm[l as usize] as u8).collect())
    }

    fn map_words(&self, x: &AlgebraElement, f: impl Fn(&[u8]) -> Word) -> Result<AlgebraElement, FreeAlgError> {
        let mut out = Comps::new();
        for (mu, v) in &x.comps {
            let b = self.basis(mu)?;
            let mut acc: Option<(RootVec, Vec<Scalar>)> = None;
            for (w, c) in b.words.iter().zip(v) {
                if c.is_zero() {
                    continue;
                }
                let img = f(w);
                let coords = self.word_coords(&img)?;
                let entry = acc.get_or_insert_with(|| (word_weight(&img, self.rank()), vec![Scalar::zero(); coords.len()]));
                axpy(&mut entry.1, c, &coords);
            }
            if let Some((k, v)) = acc {
                add_comps(&mut out, &BTreeMap::from([(k, v)]), &Scalar::one());
            }
        }
        drop_zero(&mut out);
        Ok(AlgebraElement { side: x.side, comps: out, k_tag: None })
    }

    // ---- braid operators ----

    /// `T_i(E_j)` or `T_i^{-1}(E_j)` (and the `F` analogues) for `j != i`.
    fn braid_generator(&self, side: Side, i: usize, j: usize, dir: Direction) -> Result<AlgebraElement, FreeAlgError> {
        let a = -self.datum.cartan[i][j];
        let mut acc = AlgebraElement::zero(side);
        for k in 0..=a {
            let sign = if k % 2 == 0 { Scalar::one() } else { -Scalar::one() };
            // plus side: q_i^{-k}, minus side: q_i^{k}
            let qk = self.datum.qi(i, if side == Side::Plus { -k } else { k });
            let (left, right) = match (side, dir) {
                (Side::Plus, Direction::Fwd) | (Side::Minus, Direction::Inv) => (a - k, k),
                (Side::Plus, Direction::Inv) | (Side::Minus, Direction::Fwd) => (k, a - k),
            };
            let l = self.divided_power(side, i, left as u32)?;
            let r = self.divided_power(side, i, right as u32)?;
            let term = self.mul(&self.mul(&l, &self.generator(side, j))?, &r)?;
            acc = self.add(&acc, &term.scaled(&(&sign * &qk)))?;
        }
        Ok(acc)
    }

    /// `T_i^{±1}(x)` for `x` avoiding the letter `i`.
    pub fn braid_t(&self, i: usize, x: &AlgebraElement, dir: Direction) -> Result<AlgebraElement, FreeAlgError> {
        if x.comps.keys().any(|mu| mu[i] > 0) {
            return Err(FreeAlgError::UnsafeBraid(i));
        }
        self.braid_t_mixed(i, x, dir)
    }

    /// `T_{i_1} ... T_{i_k}(x)` (or `T_{i_1}^{-1} ... T_{i_k}^{-1}(x)`) along a
    /// reduced word, for inputs whose partial images stay one-sided. Every
    /// intermediate result is checked to be free of mixed terms.
    pub fn braid_t_word(&self, word: &[usize], x: &AlgebraElement, dir: Direction) -> Result<AlgebraElement, FreeAlgError> {
        let mut y = x.clone();
        for &i in word.iter().rev() {
            y = self.braid_t_mixed(i, &y, dir)?;
        }
        Ok(y)
    }

    fn braid_t_mixed(&self, i: usize, x: &AlgebraElement, dir: Direction) -> Result<AlgebraElement, FreeAlgError> {
        let side = x.side;
        let n = self.rank();
        let mut images: Vec<Option<AlgebraElement>> = vec![None; n];
        let mut total = MixedTerms::new();
        for (mu, v) in &x.comps {
            let b = self.basis(mu)?;
            for (w, c) in b.words.iter().zip(v) {
                if c.is_zero() {
                    continue;
                }
                for (key, u) in self.braid_word_mixed(i, w, dir, side, &mut images)? {
                    add_terms(&mut total, key, &u, c);
                }
            }
        }
        let zero = vec![0; n];
        let mut out = AlgebraElement::zero(side);
        for ((a, beta), mut comps) in total {
            drop_zero(&mut comps);
            if comps.is_empty() {
                continue;
            }
            if a != 0 || beta != zero {
                return Err(FreeAlgError::MixedResidual(i, a, beta));
            }
            out.comps = comps;
        }
        out.k_tag = x.k_tag.clone();
        Ok(out)
    }

    fn braid_word_mixed(
        &self,
        i: usize,
        w: &[u8],
        dir: Direction,
        side: Side,
        images: &mut [Option<AlgebraElement>],
    ) -> Result<MixedTerms, FreeAlgError> {
        let n = self.rank();
        let mut terms: MixedTerms = BTreeMap::from([((0u32, vec![0; n]), self.one(side).comps)]);
        let ai = unit_root(n, i);
        let neg_ai: RootVec = ai.iter().map(|x| -x).collect();
        let letters: Vec<u8> = match side {
            Side::Plus => w.to_vec(),
            Side::Minus => w.iter().rev().copied().collect(),
        };
        for l in letters {
            let j = l as usize;
            if j != i {
                if images[j].is_none() {
                    images[j] = Some(self.braid_generator(side, i, j, dir)?);
                }
                let g = &images[j].as_ref().unwrap().comps;
                terms = self.mixed_mul_elem(terms, g, side)?;
                continue;
            }
            terms = match (side, dir) {
                // T_i(E_i) = -F_i K_i
                (Side::Plus, Direction::Fwd) => self.mixed_k(self.mixed_cross(i, terms, side)?, &ai),
                // T_i^{-1}(E_i) = -K_i^{-1} F_i
                (Side::Plus, Direction::Inv) => self.mixed_cross(i, self.mixed_k(terms, &neg_ai), side)?,
                // T_i(F_i) = -K_i^{-1} E_i, applied from the left
                (Side::Minus, Direction::Fwd) => self.mixed_k(self.mixed_cross(i, terms, side)?, &neg_ai),
                // T_i^{-1}(F_i) = -E_i K_i
                (Side::Minus, Direction::Inv) => self.mixed_cross(i, self.mixed_k(terms, &ai), side)?,
            };
            for v in terms.values_mut() {
                for c in v.values_mut() {
                    for x in c.iter_mut() {
                        *x = -x.clone();
                    }
                }
            }
        }
        Ok(terms)
    }

    /// Multiplies every term by a one-sided element (right for plus, left for minus).
    fn mixed_mul_elem(&self, terms: MixedTerms, g: &Comps, side: Side) -> Result<MixedTerms, FreeAlgError> {
        let mut out = MixedTerms::new();
        for (key, u) in terms {
            let prod = match side {
                Side::Plus => self.mul_comps(&u, g)?,
                Side::Minus => self.mul_comps(g, &u)?,
            };
            add_terms(&mut out, key, &prod, &Scalar::one());
        }
        Ok(out)
    }

    /// Moves `K_gamma` through `u`: `F^a K_b u K_g = q^{-(g, wt u)} F^a K_{b+g} u`
    /// and `K_g u K_b E^a = q^{-(g, nu)} u K_{b+g} E^a` for `u` of weight `-nu`.
    fn mixed_k(&self, terms: MixedTerms, gamma: &[i64]) -> MixedTerms {
        let mut out = MixedTerms::new();
        for ((a, beta), u) in terms {
            let mut scaled = Comps::new();
            for (nu, v) in u {
                let f = self.datum.q(-self.datum.pair_roots(gamma, &nu));
                scaled.insert(nu, v.iter().map(|x| x * &f).collect());
            }
            let key = (a, add_roots(&beta, gamma));
            add_terms(&mut out, key, &scaled, &Scalar::one());
        }
        out
    }

    /// Plus side: right multiplication by `F_i` on `F^a K_b u`.
    /// Minus side: left multiplication by `E_i` on `u K_b E^a`.
    fn mixed_cross(&self, i: usize, terms: MixedTerms, side: Side) -> Result<MixedTerms, FreeAlgError> {
        let n = self.rank();
        let ai = unit_root(n, i);
        let inv_diff = self.datum.qi_diff(i).try_inv()?;
        let mut out = MixedTerms::new();
        for ((a, beta), u) in terms {
            let f = self.datum.q(-self.datum.pair_roots(&beta, &ai));
            add_terms(&mut out, (a + 1, beta.clone()), &u, &f);
            for (nu, v) in &u {
                if nu[i] == 0 {
                    continue;
                }
                let b = self.basis(nu)?;
                let lower = sub_roots(nu, &ai);
                let r = b.r_matrix(i).unwrap().mul_vec(v);
                let ir = b.ir_matrix(i).unwrap().mul_vec(v);
                // The K_i-carrying part: r_i(u) on the plus side, _i r(u) on the minus side.
                let (with_k, with_kinv) = match side {
                    Side::Plus => (r, ir),
                    Side::Minus => (ir, r),
                };
                let fk = &self.datum.q(-self.datum.pair_roots(&ai, &lower)) * &inv_diff;
                add_terms(&mut out, (a, add_roots(&beta, &ai)), &BTreeMap::from([(lower.clone(), with_k)]), &fk);
                add_terms(&mut out, (a, sub_roots(&beta, &ai)), &BTreeMap::from([(lower, with_kinv)]), &-inv_diff.clone());
            }
        }
        Ok(out)
    }
}

fn add_comps(acc: &mut Comps, other: &Comps, f: &Scalar) {
    for (k, v) in other {
        match acc.get_mut(k) {
            Some(a) => axpy(a, f, v),
            None => {
                acc.insert(k.clone(), v.iter().map(|x| x * f).collect());
            }
        }
    }
    drop_zero(acc);
}

fn add_terms(acc: &mut MixedTerms, key: (u32, RootVec), u: &Comps, f: &Scalar) {
    if f.is_zero() {
        return;
    }
    let e = acc.entry(key).or_default();
    add_comps(e, u, f);
}

impl AlgebraElement {
    pub fn scaled(&self, c: &Scalar) -> AlgebraElement {
        let mut comps: Comps =
            self.comps.iter().map(|(k, v)| (k.clone(), v.iter().map(|x| x * c).collect())).collect();
        drop_zero(&mut comps);
        AlgebraElement { side: self.side, comps, k_tag: self.k_tag.clone() }
    }

    pub fn max_height(&self) -> i64 {
        self.comps.keys().map(|k| height(k)).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(ty: &str, n: usize) -> FreeAlgebra {
        FreeAlgebra::new(Arc::new(RootDatum::of_type(ty, n).unwrap()))
    }

    #[test]
    fn generator_pairing() {
        let a = alg("A", 2);
        let e1 = a.generator(Side::Plus, 0);
        let f1 = a.generator(Side::Minus, 0);
        let f2 = a.generator(Side::Minus, 1);
        let expect = -(a.datum.qi_diff(0).try_inv().unwrap());
        assert_eq!(a.pairing(&f1, &e1).unwrap(), expect);
        assert!(a.pairing(&f2, &e1).unwrap().is_zero());
    }

    #[test]
    fn serre_relation_vanishes() {
        let a = alg("A", 2);
        // E1^2 E2 - [2] E1 E2 E1 + E2 E1^2
        let two = a.datum.qint(2, 0).unwrap();
        let x = a
            .from_words(Side::Plus, &[(vec![0, 0, 1], Scalar::one()), (vec![0, 1, 0], -two), (vec![1, 0, 0], Scalar::one())])
            .unwrap();
        assert!(x.is_zero());
    }

    #[test]
    fn r1_of_e1e2() {
        let a = alg("A", 2);
        let x = a.word(Side::Plus, &[0, 1]).unwrap();
        let r = a.skew_r(0, &x).unwrap();
        assert_eq!(r, a.generator(Side::Plus, 1).scaled(&a.datum.q(-1)));
        assert!(a.skew_r(0, &a.one(Side::Plus)).unwrap().is_zero());
    }

    #[test]
    fn a2_weight_spaces() {
        let a = alg("A", 2);
        let b = a.basis(&[1, 1]).unwrap();
        assert_eq!(b.words, vec![vec![0, 1], vec![1, 0]]);
        assert!(!a.gram(&[1, 1]).unwrap().det().is_zero());
        assert_eq!(a.dim(&[2, 1]).unwrap(), 2);
        assert_eq!(a.dim(&[2, 0]).unwrap(), 1);
    }

    #[test]
    fn full_gram_agrees_with_basis() {
        let a = alg("B", 2);
        for mu in [[2, 1], [1, 2], [2, 2], [1, 3]] {
            let (words, g) = a.full_gram(&mu);
            let (cols, _) = g.column_rank_profile();
            let chosen: Vec<Word> = cols.iter().map(|&c| words[c].clone()).collect();
            assert_eq!(chosen, a.basis(&mu).unwrap().words, "{mu:?}");
        }
    }

    #[test]
    fn braid_on_a2() {
        let a = alg("A", 2);
        let e2 = a.generator(Side::Plus, 1);
        let t = a.braid_t(0, &e2, Direction::Fwd).unwrap();
        // E1 E2 - q^{-1} E2 E1
        let expect = a
            .from_words(Side::Plus, &[(vec![0, 1], Scalar::one()), (vec![1, 0], -a.datum.q(-1))])
            .unwrap();
        assert_eq!(t, expect);
        assert!(matches!(a.braid_t(0, &a.generator(Side::Plus, 0), Direction::Fwd), Err(FreeAlgError::UnsafeBraid(0))));
    }

    #[test]
    fn braid_along_reduced_word_stays_positive() {
        let a = alg("A", 2);
        // T_1 T_2 (E_1) = E_2
        let x = a.braid_t_word(&[0, 1], &a.generator(Side::Plus, 0), Direction::Fwd).unwrap();
        assert_eq!(x, a.generator(Side::Plus, 1));
        let y = a.braid_t_word(&[0, 1], &a.generator(Side::Minus, 0), Direction::Fwd).unwrap();
        assert_eq!(y, a.generator(Side::Minus, 1));
        // T_1(E_1) leaves U^+.
        assert!(matches!(
            a.braid_t_word(&[0], &a.generator(Side::Plus, 0), Direction::Fwd),
            Err(FreeAlgError::MixedResidual(0, 1, _))
        ));
    }
}
