//! Finite-dimensional modules: irreducible highest weight modules, tensor
//! products, twists by automorphisms, Lusztig operators, `kappa`, `flip`
//! and the commutativity operator `R-hat`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::freealg::{AlgebraElement, Direction, FreeAlgError, FreeAlgebra, Side};
use crate::linalg::{LinalgError, Matrix};
use crate::quasir::{quasi_r_dual, QuasiRError};
use crate::rootdata::{height, root_to_weight, sub_weights, unit_root, RootDataError, RootDatum, RootVec, Weight};
use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("weight {0:?} is not dominant integral")]
    NotDominant(Vec<Rational64>),
    #[error("bad module descriptor {0:?}")]
    Descriptor(String),
    #[error("module too large (height {0} reached)")]
    TooLarge(i64),
    #[error("relation {0} fails")]
    Relation(String),
    #[error(transparent)]
    RootData(#[from] RootDataError),
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
    #[error(transparent)]
    QuasiR(#[from] QuasiRError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Automorphism by which a module is twisted: `u . m = phi(u) m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Twist {
    Id,
    /// Diagram automorphism given by a node permutation.
    Diagram(Vec<usize>),
    /// `tw` composed with a diagram automorphism `sigma`; `tw(E_i) = -K_i^{-1} F_i`,
    /// `tw(F_i) = -E_i K_i`, `tw(K_h) = K_{-h}`.
    TwDiagram(Vec<usize>),
}

/// A module given by its weights and the matrices of `E_i`, `F_i`.
#[derive(Clone, Debug)]
pub struct Module {
    pub datum: Arc<RootDatum>,
    pub label: String,
    pub weights: Vec<Weight>,
    pub e: Vec<Matrix<Scalar>>,
    pub f: Vec<Matrix<Scalar>>,
    pub highest: Option<Weight>,
}

fn one_d(d: u32) -> Scalar {
    Scalar::one().with_d(d)
}

/// Sum of `a (x) b` as a Kronecker product with row-major pair ordering.
pub fn kron(a: &Matrix<Scalar>, b: &Matrix<Scalar>) -> Matrix<Scalar> {
    a.kron(b)
}

impl Module {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn identity(&self) -> Matrix<Scalar> {
        Matrix::identity(self.dim())
    }

    /// `K_h` for `h` in `P` (root coordinates): `q^{(h, wt)}` on each weight vector.
    pub fn k_weight(&self, h: &[Rational64]) -> Result<Matrix<Scalar>, RepError> {
        let entries = self.weights.iter().map(|w| self.datum.q_pow_r(self.datum.pair(h, w))).collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::diagonal(entries))
    }

    /// `K_beta` for `beta` in `Q`.
    pub fn k_root(&self, beta: &[i64]) -> Matrix<Scalar> {
        self.k_weight(&root_to_weight(beta)).expect("root pairings are integral")
    }

    pub fn e_word(&self, w: &[u8]) -> Matrix<Scalar> {
        w.iter().fold(self.identity(), |acc, &l| acc.mul(&self.e[l as usize]))
    }

    pub fn f_word(&self, w: &[u8]) -> Matrix<Scalar> {
        w.iter().fold(self.identity(), |acc, &l| acc.mul(&self.f[l as usize]))
    }

    /// `E_i^{(k)}`
    pub fn e_div(&self, i: usize, k: u32) -> Result<Matrix<Scalar>, RepError> {
        let p = (0..k).fold(self.identity(), |acc, _| acc.mul(&self.e[i]));
        Ok(p.scale(&self.datum.qfactorial(k as i64, i)?.try_inv()?))
    }

    /// `F_i^{(k)}`
    pub fn f_div(&self, i: usize, k: u32) -> Result<Matrix<Scalar>, RepError> {
        let p = (0..k).fold(self.identity(), |acc, _| acc.mul(&self.f[i]));
        Ok(p.scale(&self.datum.qfactorial(k as i64, i)?.try_inv()?))
    }

    /// Coordinatewise bound `B` with `wt(a) - wt(b) <= B` for all weight pairs.
    pub fn weight_gap(&self) -> RootVec {
        let n = self.rank();
        (0..n)
            .map(|k| {
                let max = self.weights.iter().map(|w| w[k]).max().unwrap_or_else(Rational64::zero);
                let min = self.weights.iter().map(|w| w[k]).min().unwrap_or_else(Rational64::zero);
                (max - min).to_integer()
            })
            .collect()
    }

    /// The twisted module `M^phi`.
    pub fn twisted(&self, phi: &Twist) -> Module {
        let n = self.rank();
        match phi {
            Twist::Id => self.clone(),
            Twist::Diagram(sigma) => {
                let inv = invert(sigma);
                Module {
                    datum: self.datum.clone(),
                    label: format!("{}^{:?}", self.label, sigma),
                    weights: self.weights.iter().map(|w| RootDatum::permute_weight(&inv, w)).collect(),
                    e: (0..n).map(|i| self.e[sigma[i]].clone()).collect(),
                    f: (0..n).map(|i| self.f[sigma[i]].clone()).collect(),
                    highest: None,
                }
            }
            Twist::TwDiagram(sigma) => {
                let inv = invert(sigma);
                let e = (0..n)
                    .map(|i| {
                        let s = unit_root(n, sigma[i]);
                        self.k_root(&s.iter().map(|x| -x).collect::<Vec<_>>()).mul(&self.f[sigma[i]]).neg()
                    })
                    .collect();
                let f = (0..n).map(|i| self.e[sigma[i]].mul(&self.k_root(&unit_root(n, sigma[i]))).neg()).collect();
                Module {
                    datum: self.datum.clone(),
                    label: format!("{}^tw{:?}", self.label, sigma),
                    weights: self.weights.iter().map(|w| RootDatum::permute_weight(&inv, w).iter().map(|x| -x).collect()).collect(),
                    e,
                    f,
                    highest: None,
                }
            }
        }
    }

    /// Checks the defining relations as matrix identities: weight grading of
    /// `E_i`, `F_i`, the commutator `[E_i, F_j]` and both q-Serre relations.
    pub fn check_relations(&self) -> Result<(), RepError> {
        let n = self.rank();
        let datum = &self.datum;
        for i in 0..n {
            let ai = root_to_weight(&unit_root(n, i));
            for (r, c, _) in self.e[i].nonzeros() {
                if sub_weights(&self.weights[r], &self.weights[c]) != ai {
                    return Err(RepError::Relation(format!("E_{} grading", i + 1)));
                }
            }
            for (r, c, _) in self.f[i].nonzeros() {
                if sub_weights(&self.weights[c], &self.weights[r]) != ai {
                    return Err(RepError::Relation(format!("F_{} grading", i + 1)));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let comm = self.e[i].mul(&self.f[j]).sub(&self.f[j].mul(&self.e[i]));
                let expect = if i == j {
                    let ki = self.k_root(&unit_root(n, i));
                    let kinv = self.k_root(&unit_root(n, i).iter().map(|x| -x).collect::<Vec<_>>());
                    ki.sub(&kinv).scale(&datum.qi_diff(i).try_inv()?)
                } else {
                    Matrix::zeros(self.dim(), self.dim())
                };
                if comm != expect {
                    return Err(RepError::Relation(format!("[E_{}, F_{}]", i + 1, j + 1)));
                }
                if i == j {
                    continue;
                }
                let m = 1 - datum.cartan[i][j];
                let mut se = Matrix::zeros(self.dim(), self.dim());
                let mut sf = Matrix::zeros(self.dim(), self.dim());
                for s in 0..=m {
                    let sgn = if s % 2 == 0 { one_d(datum.d) } else { -one_d(datum.d) };
                    let te = self.e_div(i, (m - s) as u32)?.mul(&self.e[j]).mul(&self.e_div(i, s as u32)?);
                    let tf = self.f_div(i, (m - s) as u32)?.mul(&self.f[j]).mul(&self.f_div(i, s as u32)?);
                    se.add_scaled(&sgn, &te);
                    sf.add_scaled(&sgn, &tf);
                }
                if !se.is_zero() || !sf.is_zero() {
                    return Err(RepError::Relation(format!("q-Serre ({}, {})", i + 1, j + 1)));
                }
            }
        }
        Ok(())
    }
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut out = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        out[j] = i;
    }
    out
}

// ---- irreducible modules ----

struct Layer {
    start: usize,
    dim: usize,
}

/// Irreducible module of highest weight `lambda` (root coordinates). Each
/// weight space is spanned by `F_j` applied to the layer above; a vector is
/// recorded by its images under all `E_i`, which is injective on the simple
/// quotient below the highest weight, so a rank profile of these images
/// picks a basis and expresses every other spanning vector.
pub fn build_irrep(datum: Arc<RootDatum>, lambda: &[Rational64]) -> Result<Module, RepError> {
    if !datum.is_dominant_integral(lambda) {
        return Err(RepError::NotDominant(lambda.to_vec()));
    }
    let n = datum.rank();
    let mut layers: BTreeMap<RootVec, Layer> = BTreeMap::new();
    // E blocks: (depth, i) -> dim(depth - a_i) x dim(depth); F blocks: (depth, j) -> dim(depth) x dim(depth - a_j)
    let mut e_blk: HashMap<(RootVec, usize), Matrix<Scalar>> = HashMap::new();
    let mut f_blk: HashMap<(RootVec, usize), Matrix<Scalar>> = HashMap::new();
    let zero: RootVec = vec![0; n];
    layers.insert(zero.clone(), Layer { start: 0, dim: 1 });
    let mut total = 1usize;
    let mut frontier = vec![zero];
    let mut h = 0i64;
    while !frontier.is_empty() {
        h += 1;
        if h > 200 {
            return Err(RepError::TooLarge(h));
        }
        let mut next: Vec<RootVec> = Vec::new();
        for prev in &frontier {
            for j in 0..n {
                let mut nu = prev.clone();
                nu[j] += 1;
                if !next.contains(&nu) {
                    next.push(nu);
                }
            }
        }
        next.sort();
        let mut produced = Vec::new();
        for nu in next {
            // candidates F_j b for b in layer nu - a_j
            let mut cands: Vec<(usize, usize)> = Vec::new();
            for j in 0..n {
                if nu[j] == 0 {
                    continue;
                }
                let mut up = nu.clone();
                up[j] -= 1;
                if let Some(l) = layers.get(&up) {
                    for b in 0..l.dim {
                        cands.push((j, b));
                    }
                }
            }
            if cands.is_empty() {
                continue;
            }
            // blocks of the stacked E-image: for each i with a layer at nu - a_i
            let mut blocks: Vec<(usize, RootVec, usize, usize)> = Vec::new();
            let mut off = 0;
            for i in 0..n {
                if nu[i] == 0 {
                    continue;
                }
                let mut up = nu.clone();
                up[i] -= 1;
                if let Some(l) = layers.get(&up) {
                    blocks.push((i, up, off, l.dim));
                    off += l.dim;
                }
            }
            let mut images: Vec<Vec<Scalar>> = Vec::with_capacity(cands.len());
            for &(j, b) in &cands {
                let mut src = nu.clone();
                src[j] -= 1;
                let wt_b = sub_weights(lambda, &root_to_weight(&src));
                let mut img = vec![Scalar::zero(); off];
                for (i, up, o, _) in &blocks {
                    let (i, o) = (*i, *o);
                    // F_j E_i b; absent blocks mean E_i b = 0
                    if let (Some(eb), Some(fb)) = (e_blk.get(&(src.clone(), i)), f_blk.get(&(up.clone(), j))) {
                        for (k, x) in fb.mul_vec(&eb.column(b)).into_iter().enumerate() {
                            img[o + k] += &x;
                        }
                    }
                    if i == j {
                        let m = datum.coroot_eval(i, &wt_b);
                        let m = m.to_integer();
                        let qn = if m < 0 { -datum.qint(-m, i)? } else { datum.qint(m, i)? };
                        img[o + b] += &qn;
                    }
                }
                images.push(img);
            }
            let m = Matrix::from_cols(off, &images);
            let (cols, rows) = m.column_rank_profile();
            if cols.is_empty() {
                continue;
            }
            let dim = cols.len();
            let inv = m.submatrix(&rows, &cols).inverse()?;
            layers.insert(nu.clone(), Layer { start: total, dim });
            total += dim;
            for (i, _, o, len) in &blocks {
                let blk = Matrix::from_fn(*len, dim, |r, c| images[cols[c]][o + r].clone());
                e_blk.insert((nu.clone(), *i), blk);
            }
            for j in 0..n {
                if nu[j] == 0 {
                    continue;
                }
                let mut up = nu.clone();
                up[j] -= 1;
                let Some(l) = layers.get(&up) else { continue };
                let mut fcols = Vec::with_capacity(l.dim);
                for b in 0..l.dim {
                    let k = cands.iter().position(|&c| c == (j, b)).expect("candidate present");
                    let sel: Vec<Scalar> = rows.iter().map(|&r| images[k][r].clone()).collect();
                    fcols.push(inv.mul_vec(&sel));
                }
                f_blk.insert((nu.clone(), j), Matrix::from_cols(dim, &fcols));
            }
            produced.push(nu);
        }
        frontier = produced;
    }
    // assemble
    let mut weights = vec![Vec::new(); total];
    for (depth, l) in &layers {
        let w = sub_weights(lambda, &root_to_weight(depth));
        for k in 0..l.dim {
            weights[l.start + k] = w.clone();
        }
    }
    let mut e = vec![Matrix::zeros(total, total); n];
    let mut f = vec![Matrix::zeros(total, total); n];
    for ((depth, i), blk) in &e_blk {
        let mut up = depth.clone();
        up[*i] -= 1;
        let (lu, ld) = (&layers[&up], &layers[depth]);
        for (r, c, x) in blk.nonzeros() {
            e[*i].set(lu.start + r, ld.start + c, x.clone());
        }
    }
    for ((depth, j), blk) in &f_blk {
        let mut up = depth.clone();
        up[*j] -= 1;
        let (lu, ld) = (&layers[&up], &layers[depth]);
        for (r, c, x) in blk.nonzeros() {
            f[*j].set(ld.start + r, lu.start + c, x.clone());
        }
    }
    let coords = datum.fundamental_coords(lambda);
    Ok(Module { label: module_label(&coords), datum, weights, e, f, highest: Some(lambda.to_vec()) })
}

fn module_label(coords: &[Rational64]) -> String {
    let parts: Vec<String> = coords
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            let w = if coords.len() == 1 { "w".to_string() } else { format!("w{}", i + 1) };
            if c.is_one() {
                w
            } else {
                format!("{c}{w}")
            }
        })
        .collect();
    if parts.is_empty() {
        "V(0)".into()
    } else {
        format!("V({})", parts.join("+"))
    }
}

/// Parses `V(0)`, `V(w1)`, `V(w1+2w3)`, `V(2w)` (rank one) into a weight.
pub fn parse_module(datum: &RootDatum, s: &str) -> Result<Weight, RepError> {
    let bad = || RepError::Descriptor(s.to_string());
    let inner = s.trim().strip_prefix("V(").and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
    let n = datum.rank();
    let mut coords = vec![0i64; n];
    if inner.trim() != "0" {
        for part in inner.split('+') {
            let part = part.trim();
            let pos = part.find('w').ok_or_else(bad)?;
            let mult: i64 = if pos == 0 { 1 } else { part[..pos].parse().map_err(|_| bad())? };
            let idx = &part[pos + 1..];
            let i: usize = if idx.is_empty() && n == 1 { 1 } else { idx.parse().map_err(|_| bad())? };
            if i == 0 || i > n {
                return Err(bad());
            }
            coords[i - 1] += mult;
        }
    }
    Ok(datum.weight_from_fundamental(&coords)?)
}

// ---- tensor products, kappa, flip ----

/// `M (x) N` with `Delta(E_i) = E_i (x) 1 + K_i (x) E_i`, `Delta(F_i) = F_i (x) K_i^{-1} + 1 (x) F_i`.
pub fn tensor(m: &Module, n: &Module) -> Module {
    let r = m.rank();
    let mut weights = Vec::with_capacity(m.dim() * n.dim());
    for a in &m.weights {
        for b in &n.weights {
            weights.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
        }
    }
    let (im, in_) = (m.identity(), n.identity());
    let e = (0..r).map(|i| kron(&m.e[i], &in_).add(&kron(&m.k_root(&unit_root(r, i)), &n.e[i]))).collect();
    let f = (0..r)
        .map(|i| {
            let kinv = n.k_root(&unit_root(r, i).iter().map(|x| -x).collect::<Vec<_>>());
            kron(&m.f[i], &kinv).add(&kron(&im, &n.f[i]))
        })
        .collect();
    Module { datum: m.datum.clone(), label: format!("{}*{}", m.label, n.label), weights, e, f, highest: None }
}

/// `kappa^f` on `M (x) N`: `q^{sign (f(mu), nu)}`; `f = None` is the identity.
pub fn kappa(m: &Module, n: &Module, f: Option<&[usize]>, sign: i64) -> Result<Matrix<Scalar>, RepError> {
    let datum = &m.datum;
    let mut entries = Vec::with_capacity(m.dim() * n.dim());
    for a in &m.weights {
        let fa = match f {
            Some(p) => RootDatum::permute_weight(p, a),
            None => a.clone(),
        };
        for b in &n.weights {
            entries.push(datum.q_pow_r(datum.pair(&fa, b) * sign)?);
        }
    }
    Ok(Matrix::diagonal(entries))
}

/// `flip: M (x) N -> N (x) M`.
pub fn flip(m: &Module, n: &Module) -> Matrix<Scalar> {
    let (dm, dn) = (m.dim(), n.dim());
    let mut p = Matrix::zeros(dm * dn, dm * dn);
    for a in 0..dm {
        for b in 0..dn {
            p.set(b * dm + a, a * dn + b, Scalar::one());
        }
    }
    p
}

// ---- action of algebra elements ----

/// Operator of a one-sided element (with its K-tag on the right) on `M`.
pub fn act(alg: &FreeAlgebra, x: &AlgebraElement, m: &Module) -> Result<Matrix<Scalar>, RepError> {
    let mut acc = Matrix::zeros(m.dim(), m.dim());
    for (w, c) in alg.to_words(x)? {
        if c.is_zero() {
            continue;
        }
        let op = match x.side {
            Side::Plus => m.e_word(&w),
            Side::Minus => m.f_word(&w),
        };
        acc.add_scaled(&c, &op);
    }
    if let Some(beta) = &x.k_tag {
        acc = acc.mul(&m.k_root(beta));
    }
    Ok(acc)
}

/// `T_{i,M}` or its inverse. The inverse is the printed sum
/// `sum_{a-b+c = lambda(h_i)} (-1)^b q_i^{ac-b} F^{(a)} E^{(b)} F^{(c)}`
/// and `T_{i,M}` is its matrix inverse.
pub fn lusztig_t(m: &Module, i: usize, dir: Direction) -> Result<Matrix<Scalar>, RepError> {
    let datum = &m.datum;
    let hs: Vec<i64> = m.weights.iter().map(|w| datum.coroot_eval(i, w).to_integer()).collect();
    let bound = hs.iter().map(|h| h.abs()).max().unwrap_or(0) as u32;
    let fd: Vec<Matrix<Scalar>> = (0..=bound).map(|k| m.f_div(i, k)).collect::<Result<_, _>>()?;
    let ed: Vec<Matrix<Scalar>> = (0..=bound).map(|k| m.e_div(i, k)).collect::<Result<_, _>>()?;
    let mut tinv = Matrix::zeros(m.dim(), m.dim());
    let mut by_h: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (k, &h) in hs.iter().enumerate() {
        by_h.entry(h).or_default().push(k);
    }
    for (&h, cols) in &by_h {
        let mut proj = Matrix::zeros(m.dim(), m.dim());
        for &c in cols {
            proj.set(c, c, Scalar::one());
        }
        let mut sum = Matrix::zeros(m.dim(), m.dim());
        for a in 0..=bound as i64 {
            for c in 0..=bound as i64 {
                let b = a + c - h;
                if b < 0 || b > bound as i64 {
                    continue;
                }
                let sgn = if b % 2 == 0 { one_d(datum.d) } else { -one_d(datum.d) };
                let coeff = &sgn * &datum.qi(i, a * c - b);
                let term = fd[a as usize].mul(&ed[b as usize]).mul(&fd[c as usize]);
                sum.add_scaled(&coeff, &term);
            }
        }
        tinv.add_assign(&sum.mul(&proj));
    }
    match dir {
        Direction::Inv => Ok(tinv),
        Direction::Fwd => Ok(tinv.inverse()?),
    }
}

/// `T_{i_1} ... T_{i_k}` (or the product of inverses in the same order).
pub fn lusztig_t_word(m: &Module, word: &[usize], dir: Direction) -> Result<Matrix<Scalar>, RepError> {
    let mut acc = m.identity();
    for &i in word {
        acc = acc.mul(&lusztig_t(m, i, dir)?);
    }
    Ok(acc)
}

// ---- quasi R-matrix on modules ----

/// Quasi R-matrix components on demand, shared by all module pairs.
pub struct Braiding {
    pub alg: Arc<FreeAlgebra>,
    comps: RwLock<HashMap<RootVec, Arc<Matrix<Scalar>>>>,
}

impl Braiding {
    pub fn new(alg: Arc<FreeAlgebra>) -> Self {
        Braiding { alg, comps: RwLock::new(HashMap::new()) }
    }

    fn component(&self, mu: &[i64]) -> Result<Arc<Matrix<Scalar>>, RepError> {
        if let Some(m) = self.comps.read().unwrap().get(mu) {
            return Ok(m.clone());
        }
        let m = Arc::new(quasi_r_dual(&self.alg, mu)?);
        self.comps.write().unwrap().insert(mu.to_vec(), m.clone());
        Ok(m)
    }

    /// `R` on `A (x) B` (first leg `F`-words on `A`, second `E`-words on `B`),
    /// with the first leg relabeled by `sigma` if given.
    pub fn quasi_r(&self, a: &Module, b: &Module, sigma: Option<&[usize]>) -> Result<Matrix<Scalar>, RepError> {
        let n = a.rank();
        let ga = a.weight_gap();
        let gb = b.weight_gap();
        let bound: Vec<i64> = (0..n).map(|k| ga[k].max(gb[k])).collect();
        let mut acc = Matrix::zeros(a.dim() * b.dim(), a.dim() * b.dim());
        for mu in boxed_weights(&bound) {
            let first_mu = match sigma {
                Some(p) => RootDatum::permute_root(p, &mu),
                None => mu.clone(),
            };
            if (0..n).any(|k| first_mu[k] > ga[k] || mu[k] > gb[k]) {
                continue;
            }
            let basis = self.alg.basis(&mu)?;
            let fs: Vec<Matrix<Scalar>> = basis
                .words
                .iter()
                .map(|w| {
                    let w2: Vec<u8> = match sigma {
                        Some(p) => w.iter().map(|&l| p[l as usize] as u8).collect(),
                        None => w.clone(),
                    };
                    a.f_word(&w2)
                })
                .collect();
            let es: Vec<Matrix<Scalar>> = basis.words.iter().map(|w| b.e_word(w)).collect();
            if fs.iter().all(|x| x.is_zero()) || es.iter().all(|x| x.is_zero()) {
                continue;
            }
            let r = self.component(&mu)?;
            for (ia, fa) in fs.iter().enumerate() {
                if fa.is_zero() {
                    continue;
                }
                for (ic, ec) in es.iter().enumerate() {
                    let c = r.get(ia, ic);
                    if c.is_zero() || ec.is_zero() {
                        continue;
                    }
                    acc.add_scaled(c, &kron(fa, ec));
                }
            }
        }
        Ok(acc)
    }

    /// `R-hat_{M,N} = R kappa^{-1} flip : M (x) N -> N (x) M`.
    pub fn rhat(&self, m: &Module, n: &Module) -> Result<Matrix<Scalar>, RepError> {
        let r = self.quasi_r(n, m, None)?;
        Ok(r.mul(&kappa(n, m, None, -1)?).mul(&flip(m, n)))
    }

    /// `R-hat^{sigma}_{M,N} = R^{sigma} kappa^{-sigma} flip` for a diagram
    /// involution `sigma` acting on the first leg.
    pub fn rhat_twisted(&self, m: &Module, n: &Module, sigma: &[usize]) -> Result<Matrix<Scalar>, RepError> {
        let r = self.quasi_r(n, m, Some(sigma))?;
        Ok(r.mul(&kappa(n, m, Some(sigma), -1)?).mul(&flip(m, n)))
    }

    /// `R_i` of the rank-one factor on `A (x) B`.
    pub fn rank_one_factor(&self, a: &Module, b: &Module, i: usize) -> Result<Matrix<Scalar>, RepError> {
        let datum = &a.datum;
        let bound = a.weight_gap()[i].max(b.weight_gap()[i]);
        let mut acc = Matrix::identity(a.dim() * b.dim());
        let mut fr = a.identity();
        let mut er = b.identity();
        for r in 1..=bound {
            fr = fr.mul(&a.f[i]);
            er = er.mul(&b.e[i]);
            let sgn = if r % 2 == 0 { one_d(datum.d) } else { -one_d(datum.d) };
            let c = &(&(&sgn * &datum.qi(i, -r * (r - 1) / 2)) * &datum.qi_diff(i).pow(r as i32)?) / &datum.qfactorial(r, i)?;
            acc.add_scaled(&c, &kron(&fr, &er));
        }
        Ok(acc)
    }
}

/// All `mu` in `Q^+` with `0 <= mu <= bound` coordinatewise, by height.
pub fn boxed_weights(bound: &[i64]) -> Vec<RootVec> {
    let mut out: Vec<RootVec> = vec![Vec::new()];
    for &b in bound {
        out = out.into_iter().flat_map(|v| (0..=b.max(0)).map(move |k| {
            let mut w = v.clone();
            w.push(k);
            w
        })).collect();
    }
    out.sort_by_key(|m| (height(m), m.clone()));
    out
}

/// Sparse `(row, col, value)` dump of an operator.
pub fn sparse_dump(m: &Matrix<Scalar>) -> serde_json::Value {
    serde_json::Value::Array(m.nonzeros().map(|(r, c, x)| serde_json::json!([r, c, x.to_string()])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> Arc<RootDatum> {
        Arc::new(RootDatum::of_type("A", 1).unwrap())
    }

    #[test]
    fn a1_fundamental_module() {
        let d = a1();
        let lam = parse_module(&d, "V(w)").unwrap();
        let m = build_irrep(d.clone(), &lam).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.f[0], Matrix::from_rows(vec![vec![Scalar::zero(), Scalar::zero()], vec![Scalar::one(), Scalar::zero()]]));
        assert_eq!(m.e[0], Matrix::from_rows(vec![vec![Scalar::zero(), Scalar::one()], vec![Scalar::zero(), Scalar::zero()]]));
        assert_eq!(m.k_root(&[1]), Matrix::diagonal(vec![d.q(1), d.q(-1)]));
        m.check_relations().unwrap();
    }

    #[test]
    fn a1_lusztig_operator() {
        let d = a1();
        let m = build_irrep(d.clone(), &parse_module(&d, "V(w)").unwrap()).unwrap();
        let tinv = lusztig_t(&m, 0, Direction::Inv).unwrap();
        // T^{-1} v0 = v1, T^{-1} v1 = -q^{-1} v0
        assert_eq!(tinv.column(0), vec![Scalar::zero(), Scalar::one()]);
        assert_eq!(tinv.column(1), vec![-d.q(-1), Scalar::zero()]);
        let t = lusztig_t(&m, 0, Direction::Fwd).unwrap();
        assert_eq!(t.column(1), vec![Scalar::one(), Scalar::zero()]);
        assert_eq!(t.column(0), vec![Scalar::zero(), -d.q(1)]);
    }

    #[test]
    fn trivial_module() {
        let d = Arc::new(RootDatum::of_type("A", 2).unwrap());
        let m = build_irrep(d.clone(), &parse_module(&d, "V(0)").unwrap()).unwrap();
        assert_eq!(m.dim(), 1);
        assert!(m.e.iter().chain(&m.f).all(|x| x.is_zero()));
        assert_eq!(lusztig_t(&m, 1, Direction::Fwd).unwrap(), Matrix::identity(1));
    }

    #[test]
    fn rejects_non_dominant() {
        let d = a1();
        assert!(matches!(build_irrep(d, &[Rational64::new(-1, 2)]), Err(RepError::NotDominant(_))));
    }
}
