//! Cartan data, root and weight lattices, Weyl group words, admissible pairs
//! `(X, tau)`, the involution `Theta = -w_X tau`, `tau_0` and the s-function.
//!
//! Nodes are 0-based internally. Descriptors and reports use 1-based labels.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalar::{self, Scalar, ScalarError};

/// Element of the root lattice `Q` in simple-root coordinates.
pub type RootVec = Vec<i64>;
/// Element of the weight lattice `P` in (rational) simple-root coordinates.
pub type Weight = Vec<Rational64>;

/// Rank above which module-level features are refused unless the caller
/// raises the guard explicitly.
pub const DEFAULT_RANK_GUARD: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootDataError {
    #[error("not a generalized Cartan matrix: {0}")]
    NotCartan(String),
    #[error("Cartan matrix is not symmetrizable")]
    NotSymmetrizable,
    #[error("operation requires finite type")]
    NotFinite,
    #[error("rank {rank} exceeds the guard {guard}")]
    RankGuard { rank: usize, guard: usize },
    #[error("unknown Cartan type {0}")]
    UnknownType(String),
    #[error("invalid node label {0}")]
    BadNode(i64),
    #[error("pair (X, tau) is not admissible: {}", .0.join("; "))]
    NotAdmissible(Vec<String>),
    #[error("exponent {0} is not in (1/d)Z")]
    Exponent(Rational64),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

pub fn r64(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

pub fn root_to_weight(mu: &[i64]) -> Weight {
    mu.iter().map(|&x| r64(x)).collect()
}

/// `Some(root vector)` if the weight has integral root coordinates.
pub fn weight_to_root(w: &[Rational64]) -> Option<RootVec> {
    w.iter().map(|x| if x.is_integer() { Some(x.to_integer()) } else { None }).collect()
}

pub fn height(mu: &[i64]) -> i64 {
    mu.iter().sum()
}

pub fn is_nonneg(mu: &[i64]) -> bool {
    mu.iter().all(|&x| x >= 0)
}

pub fn add_roots(a: &[i64], b: &[i64]) -> RootVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_roots(a: &[i64], b: &[i64]) -> RootVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg_root(a: &[i64]) -> RootVec {
    a.iter().map(|x| -x).collect()
}

pub fn add_weights(a: &[Rational64], b: &[Rational64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_weights(a: &[Rational64], b: &[Rational64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn unit_root(n: usize, i: usize) -> RootVec {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Integer matrix acting on simple-root coordinates (column `j` is the image of `alpha_j`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylMat(pub Vec<Vec<i64>>);

impl WeylMat {
    pub fn identity(n: usize) -> Self {
        WeylMat((0..n).map(|i| unit_root(n, i)).collect::<Vec<_>>())
    }

    pub fn apply(&self, v: &[i64]) -> RootVec {
        self.0.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn apply_w(&self, v: &[Rational64]) -> Weight {
        self.0
            .iter()
            .map(|row| row.iter().zip(v).fold(Rational64::zero(), |acc, (a, b)| acc + b * *a))
            .collect()
    }

    pub fn compose(&self, other: &Self) -> Self {
        let n = self.0.len();
        WeylMat(
            (0..n)
                .map(|r| (0..n).map(|c| (0..n).map(|k| self.0[r][k] * other.0[k][c]).sum()).collect())
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        WeylMat(self.0.iter().map(|r| r.iter().map(|x| -x).collect()).collect())
    }
}

/// Root datum of a symmetrizable generalized Cartan matrix with
/// `a_ij = alpha_j(h_i)` and `(alpha_i, alpha_j) = eps_i a_ij`.
#[derive(Clone, Debug)]
pub struct RootDatum {
    pub name: String,
    pub cartan: Vec<Vec<i64>>,
    pub eps: Vec<i64>,
    /// `(alpha_i, alpha_j)`
    pub form: Vec<Vec<i64>>,
    /// `det(A_ext)` as a reduced fraction.
    pub det_ext: Rational64,
    pub d: u32,
    pub finite: bool,
    cartan_inv: Option<Vec<Vec<Rational64>>>,
    positive_roots: Option<Vec<RootVec>>,
}

fn to_r64(x: &BigRational) -> Rational64 {
    Rational64::new(x.numer().to_i64().expect("small"), x.denom().to_i64().expect("small"))
}

impl RootDatum {
    /// Builds the datum for a symmetrizable generalized Cartan matrix.
    pub fn build(cartan: Vec<Vec<i64>>) -> Result<Self, RootDataError> {
        Self::build_named(cartan, "custom")
    }

    pub fn build_named(cartan: Vec<Vec<i64>>, name: &str) -> Result<Self, RootDataError> {
        let n = cartan.len();
        if n == 0 || cartan.iter().any(|r| r.len() != n) {
            return Err(RootDataError::NotCartan("matrix must be square and nonempty".into()));
        }
        for i in 0..n {
            if cartan[i][i] != 2 {
                return Err(RootDataError::NotCartan(format!("a_{0}{0} != 2", i + 1)));
            }
            for j in 0..n {
                if i != j && (cartan[i][j] > 0 || (cartan[i][j] == 0) != (cartan[j][i] == 0)) {
                    return Err(RootDataError::NotCartan(format!("bad off-diagonal entry at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let eps = symmetrizers(&cartan)?;
        let form: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| eps[i] * cartan[i][j]).collect()).collect();
        let a = Matrix::from_fn(n, n, |i, j| scalar::rat(cartan[i][j]));
        let det_a = a.det();
        let finite = (1..=n).all(|k| {
            let m = Matrix::from_fn(k, k, |i, j| scalar::rat(form[i][j]));
            m.det() > BigRational::zero()
        });
        let det_ext = if !det_a.is_zero() { det_a.clone() } else { extended_det(&cartan, &eps) };
        let d = det_ext.numer().abs().to_u32().expect("small determinant");
        let cartan_inv = if det_a.is_zero() {
            None
        } else {
            let inv = a.inverse().expect("invertible");
            Some((0..n).map(|i| (0..n).map(|j| to_r64(inv.get(i, j))).collect()).collect())
        };
        let mut datum = RootDatum {
            name: name.to_string(),
            cartan,
            eps,
            form,
            det_ext: to_r64(&det_ext),
            d,
            finite,
            cartan_inv,
            positive_roots: None,
        };
        if finite {
            datum.positive_roots = Some(datum.root_closure(&(0..n).collect::<Vec<_>>()));
        }
        Ok(datum)
    }

    /// Catalog Cartan matrices by type letter and rank.
    pub fn of_type(ty: &str, rank: usize) -> Result<Self, RootDataError> {
        let cartan = cartan_of_type(ty, rank)?;
        Self::build_named(cartan, &format!("{}{}", ty.to_uppercase(), rank))
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn check_rank_guard(&self, guard: usize) -> Result<(), RootDataError> {
        if self.rank() > guard {
            return Err(RootDataError::RankGuard { rank: self.rank(), guard });
        }
        Ok(())
    }

    /// `(alpha_i, mu)` for `mu` in `Q`.
    pub fn pair_simple(&self, i: usize, mu: &[i64]) -> i64 {
        self.form[i].iter().zip(mu).map(|(a, b)| a * b).sum()
    }

    /// `(mu, nu)` on `Q`.
    pub fn pair_roots(&self, mu: &[i64], nu: &[i64]) -> i64 {
        let n = self.rank();
        let mut acc = 0;
        for i in 0..n {
            if mu[i] == 0 {
                continue;
            }
            acc += mu[i] * self.pair_simple(i, nu);
        }
        acc
    }

    /// `(lambda, mu)` on `P`.
    pub fn pair(&self, a: &[Rational64], b: &[Rational64]) -> Rational64 {
        let n = self.rank();
        let mut acc = Rational64::zero();
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                acc += a[i] * b[j] * self.form[i][j];
            }
        }
        acc
    }

    /// `lambda(h_i) = (alpha_i, lambda) / eps_i`.
    pub fn coroot_eval(&self, i: usize, lambda: &[Rational64]) -> Rational64 {
        
        (0..self.rank()).fold(Rational64::zero(), |acc, j| acc + lambda[j] * self.cartan[i][j])
    }

    pub fn coroot_eval_root(&self, i: usize, mu: &[i64]) -> i64 {
        (0..self.rank()).map(|j| self.cartan[i][j] * mu[j]).sum()
    }

    /// `sigma_i(lambda) = lambda - lambda(h_i) alpha_i`.
    pub fn reflect(&self, i: usize, lambda: &[Rational64]) -> Weight {
        let c = self.coroot_eval(i, lambda);
        let mut out = lambda.to_vec();
        out[i] -= c;
        out
    }

    pub fn reflect_root(&self, i: usize, mu: &[i64]) -> RootVec {
        let c = self.coroot_eval_root(i, mu);
        let mut out = mu.to_vec();
        out[i] -= c;
        out
    }

    pub fn simple_reflection(&self, i: usize) -> WeylMat {
        let n = self.rank();
        WeylMat((0..n).map(|r| (0..n).map(|c| if r == i { (if r == c { 1 } else { 0 }) - self.cartan[i][c] } else if r == c { 1 } else { 0 }).collect()).collect())
    }

    pub fn word_matrix(&self, word: &[usize]) -> WeylMat {
        word.iter().fold(WeylMat::identity(self.rank()), |acc, &i| acc.compose(&self.simple_reflection(i)))
    }

    /// v-exponent of `q^r`, i.e. `d * r`, which must be an integer.
    pub fn vexp(&self, r: Rational64) -> Result<i64, RootDataError> {
        let x = r * self.d as i64;
        if x.is_integer() {
            Ok(x.to_integer())
        } else {
            Err(RootDataError::Exponent(r))
        }
    }

    /// `q^r` as a scalar.
    pub fn q_pow_r(&self, r: Rational64) -> Result<Scalar, RootDataError> {
        Ok(Scalar::v_pow(self.vexp(r)?, self.d))
    }

    /// `q^n` for an integer exponent.
    pub fn q(&self, n: i64) -> Scalar {
        Scalar::q_pow(n, self.d)
    }

    /// `q_i^n = q^{eps_i n}`.
    pub fn qi(&self, i: usize, n: i64) -> Scalar {
        Scalar::q_pow(self.eps[i] * n, self.d)
    }

    /// `q_i - q_i^{-1}`
    pub fn qi_diff(&self, i: usize) -> Scalar {
        &self.qi(i, 1) - &self.qi(i, -1)
    }

    pub fn qint(&self, n: i64, i: usize) -> Result<Scalar, ScalarError> {
        scalar::qint_v(n, self.eps[i] * self.d as i64, self.d)
    }

    pub fn qfactorial(&self, n: i64, i: usize) -> Result<Scalar, ScalarError> {
        scalar::qfactorial_v(n, self.eps[i] * self.d as i64, self.d)
    }

    pub fn qbinom(&self, m: i64, n: i64, i: usize) -> Result<Scalar, ScalarError> {
        scalar::qbinom_v(m, n, self.eps[i] * self.d as i64, self.d)
    }

    pub fn scalar(&self, n: i64) -> Scalar {
        Scalar::from_int(n).with_d(self.d)
    }

    pub fn parse_scalar(&self, s: &str) -> Result<Scalar, ScalarError> {
        Scalar::parse(s, self.d)
    }

    fn require_finite(&self) -> Result<(), RootDataError> {
        if self.finite {
            Ok(())
        } else {
            Err(RootDataError::NotFinite)
        }
    }

    pub fn positive_roots(&self) -> Result<&[RootVec], RootDataError> {
        self.positive_roots.as_deref().ok_or(RootDataError::NotFinite)
    }

    /// Positive roots of the subsystem spanned by `nodes` (which must be of finite type).
    pub fn subsystem_positive_roots(&self, nodes: &[usize]) -> Vec<RootVec> {
        self.root_closure(nodes)
    }

    fn root_closure(&self, nodes: &[usize]) -> Vec<RootVec> {
        let n = self.rank();
        let mut seen: HashSet<RootVec> = HashSet::new();
        let mut stack: Vec<RootVec> = nodes.iter().map(|&i| unit_root(n, i)).collect();
        while let Some(r) = stack.pop() {
            if !seen.insert(r.clone()) {
                continue;
            }
            for &i in nodes {
                let s = self.reflect_root(i, &r);
                if is_nonneg(&s) && s.iter().any(|&x| x != 0) && !seen.contains(&s) {
                    stack.push(s);
                }
            }
        }
        let mut out: Vec<RootVec> = seen.into_iter().collect();
        out.sort_by_key(|r| (height(r), r.clone()));
        out
    }

    /// Number of multisets of positive roots with sum `mu` (Kostant's partition function).
    pub fn kostant_count(&self, mu: &[i64]) -> Result<u64, RootDataError> {
        let roots = self.positive_roots()?.to_vec();
        fn go(roots: &[RootVec], idx: usize, rest: &mut Vec<i64>, memo: &mut BTreeMap<(usize, Vec<i64>), u64>) -> u64 {
            if rest.iter().all(|&x| x == 0) {
                return 1;
            }
            if idx == roots.len() {
                return 0;
            }
            if let Some(&v) = memo.get(&(idx, rest.clone())) {
                return v;
            }
            let key = (idx, rest.clone());
            let mut total = go(roots, idx + 1, rest, memo);
            let mut used = 0;
            loop {
                for (x, r) in rest.iter_mut().zip(&roots[idx]) {
                    *x -= r;
                }
                used += 1;
                if !is_nonneg(rest) {
                    break;
                }
                total += go(roots, idx + 1, rest, memo);
            }
            for (x, r) in rest.iter_mut().zip(&roots[idx]) {
                *x += r * used;
            }
            memo.insert(key, total);
            total
        }
        let mut rest = mu.to_vec();
        Ok(go(&roots, 0, &mut rest, &mut BTreeMap::new()))
    }

    /// Fundamental weight `varpi_i` in root coordinates.
    pub fn fundamental_weight(&self, i: usize) -> Result<Weight, RootDataError> {
        let inv = self.cartan_inv.as_ref().ok_or(RootDataError::NotFinite)?;
        Ok((0..self.rank()).map(|k| inv[k][i]).collect())
    }

    /// Weight with the given coordinates in the fundamental weight basis.
    pub fn weight_from_fundamental(&self, coords: &[i64]) -> Result<Weight, RootDataError> {
        let mut w = vec![Rational64::zero(); self.rank()];
        for (i, &c) in coords.iter().enumerate() {
            if c != 0 {
                let f = self.fundamental_weight(i)?;
                for k in 0..self.rank() {
                    w[k] += f[k] * c;
                }
            }
        }
        Ok(w)
    }

    /// Coordinates `lambda(h_i)` in the fundamental weight basis.
    pub fn fundamental_coords(&self, lambda: &[Rational64]) -> Vec<Rational64> {
        (0..self.rank()).map(|i| self.coroot_eval(i, lambda)).collect()
    }

    pub fn is_dominant_integral(&self, lambda: &[Rational64]) -> bool {
        self.fundamental_coords(lambda).iter().all(|c| c.is_integer() && *c >= Rational64::zero())
    }

    /// Weyl dimension formula for the irreducible module of highest weight `lambda`.
    pub fn weyl_dimension(&self, lambda: &[Rational64]) -> Result<u64, RootDataError> {
        self.require_finite()?;
        let rho = self.weight_from_fundamental(&vec![1; self.rank()])?;
        let lr = add_weights(lambda, &rho);
        let mut num = Rational64::one();
        for beta in self.positive_roots()? {
            let b = root_to_weight(beta);
            num *= self.pair(&lr, &b) / self.pair(&rho, &b);
        }
        assert!(num.is_integer());
        Ok(num.to_integer() as u64)
    }

    /// Longest element of the parabolic subgroup generated by `nodes`.
    pub fn longest_element(&self, nodes: &[usize]) -> WeylMat {
        let mut w = WeylMat::identity(self.rank());
        loop {
            let next = nodes.iter().copied().find(|&j| is_nonneg(&w.apply(&unit_root(self.rank(), j))));
            match next {
                Some(j) => w = w.compose(&self.simple_reflection(j)),
                None => return w,
            }
        }
    }

    fn invert(&self, w: &WeylMat) -> WeylMat {
        let n = self.rank();
        let m = Matrix::from_fn(n, n, |i, j| scalar::rat(w.0[i][j]));
        let inv = m.inverse().expect("Weyl group elements are invertible");
        WeylMat(
            (0..n)
                .map(|i| (0..n).map(|j| inv.get(i, j).to_integer().to_i64().expect("integral")).collect())
                .collect(),
        )
    }

    /// Lexicographically smallest reduced word of `w`.
    pub fn lex_reduced_word(&self, w: &WeylMat) -> Vec<usize> {
        let n = self.rank();
        let mut w = w.clone();
        let mut word = Vec::new();
        let id = WeylMat::identity(n);
        while w != id {
            let winv = self.invert(&w);
            let i = (0..n)
                .find(|&i| !is_nonneg(&winv.apply(&unit_root(n, i))))
                .expect("non-identity element has a left descent");
            word.push(i);
            w = self.simple_reflection(i).compose(&w);
        }
        word
    }

    /// `(w0_word, wX_word)`: the lexicographically smallest reduced word of
    /// `w_X`, and the lexicographically smallest reduced word of `w_0` having
    /// it as a prefix.
    pub fn longest_words(&self, x: &[usize]) -> Result<(Vec<usize>, Vec<usize>), RootDataError> {
        self.require_finite()?;
        let wx = self.longest_element(x);
        let wx_word = self.lex_reduced_word(&wx);
        let w0 = self.longest_element(&(0..self.rank()).collect::<Vec<_>>());
        let rest = self.invert(&wx).compose(&w0);
        let mut w0_word = wx_word.clone();
        w0_word.extend(self.lex_reduced_word(&rest));
        debug_assert_eq!(w0_word.len(), self.positive_roots()?.len());
        Ok((w0_word, wx_word))
    }

    /// Diagram automorphism `tau_0` with `w_0(alpha_i) = -alpha_{tau_0(i)}`.
    pub fn tau0(&self) -> Result<Vec<usize>, RootDataError> {
        self.require_finite()?;
        let n = self.rank();
        let w0 = self.longest_element(&(0..n).collect::<Vec<_>>());
        Ok((0..n)
            .map(|i| {
                let img = neg_root(&w0.apply(&unit_root(n, i)));
                img.iter().position(|&x| x == 1).expect("w0 permutes simple roots up to sign")
            })
            .collect())
    }

    /// Is `tau` a diagram automorphism (`a_{tau i, tau j} = a_ij`)?
    pub fn is_diagram_automorphism(&self, tau: &[usize]) -> bool {
        let n = self.rank();
        let mut seen = vec![false; n];
        for &t in tau {
            if t >= n || seen[t] {
                return false;
            }
            seen[t] = true;
        }
        (0..n).all(|i| (0..n).all(|j| self.cartan[tau[i]][tau[j]] == self.cartan[i][j]))
    }

    /// Permutation action of a diagram automorphism on root coordinates.
    pub fn permute_root(tau: &[usize], mu: &[i64]) -> RootVec {
        let mut out = vec![0; mu.len()];
        for (i, &x) in mu.iter().enumerate() {
            out[tau[i]] += x;
        }
        out
    }

    pub fn permute_weight(tau: &[usize], mu: &[Rational64]) -> Weight {
        let mut out = vec![Rational64::zero(); mu.len()];
        for (i, &x) in mu.iter().enumerate() {
            out[tau[i]] += x;
        }
        out
    }
}

fn symmetrizers(cartan: &[Vec<i64>]) -> Result<Vec<i64>, RootDataError> {
    let n = cartan.len();
    let mut eps: Vec<Option<Rational64>> = vec![None; n];
    for start in 0..n {
        if eps[start].is_some() {
            continue;
        }
        eps[start] = Some(r64(1));
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if i == j || cartan[i][j] == 0 {
                    continue;
                }
                // eps_i a_ij = eps_j a_ji
                let ej = eps[i].unwrap() * cartan[i][j] / cartan[j][i];
                match eps[j] {
                    None => {
                        eps[j] = Some(ej);
                        stack.push(j);
                    }
                    Some(e) if e != ej => return Err(RootDataError::NotSymmetrizable),
                    Some(_) => {}
                }
            }
        }
    }
    // Scale each connected component to coprime positive integers; across
    // components the overall scale is also made coprime.
    let eps: Vec<Rational64> = eps.into_iter().map(|e| e.unwrap()).collect();
    let lcm = eps.iter().fold(1i64, |acc, e| num_integer::lcm(acc, *e.denom()));
    let ints: Vec<i64> = eps.iter().map(|e| (e * lcm).to_integer()).collect();
    let g = ints.iter().fold(0i64, |acc, &x| num_integer::gcd(acc, x));
    Ok(ints.into_iter().map(|x| x / g).collect())
}

/// `det(A_ext)` for a singular Cartan matrix, completing `A` by unit rows
/// `B` chosen so that the extended matrix is invertible.
fn extended_det(cartan: &[Vec<i64>], eps: &[i64]) -> BigRational {
    let n = cartan.len();
    let a = Matrix::from_fn(n, n, |i, j| scalar::rat(cartan[i][j]));
    let corank = n - a.rank();
    let subsets = combinations(n, corank);
    for rows in subsets {
        let m = n + corank;
        let ext = Matrix::from_fn(m, m, |r, c| {
            if r < n && c < n {
                scalar::rat(cartan[r][c])
            } else if r < n {
                // D^{-1} B^t
                let k = c - n;
                if rows[k] == r {
                    BigRational::new(BigInt::one(), BigInt::from(eps[r]))
                } else {
                    BigRational::zero()
                }
            } else if c < n {
                let k = r - n;
                if rows[k] == c { BigRational::one() } else { BigRational::zero() }
            } else {
                BigRational::zero()
            }
        });
        let det = ext.det();
        if !det.is_zero() {
            return det;
        }
    }
    BigRational::one()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for mut rest in combinations(n, k - 1) {
            if rest.first().is_none_or(|&r| r > first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
    }
    out
}

pub fn cartan_of_type(ty: &str, n: usize) -> Result<Vec<Vec<i64>>, RootDataError> {
    let mut a = vec![vec![0i64; n]; n];
    for i in 0..n {
        a[i][i] = 2;
        if i + 1 < n {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    }
    match ty.to_uppercase().as_str() {
        "A" if n >= 1 => {}
        // alpha_1 long, alpha_2 short for B2; the short root is last in B_n.
        "B" if n >= 2 => a[n - 1][n - 2] = -2,
        "C" if n >= 2 => a[n - 2][n - 1] = -2,
        "D" if n >= 4 => {
            a[n - 2][n - 1] = 0;
            a[n - 1][n - 2] = 0;
            a[n - 3][n - 1] = -1;
            a[n - 1][n - 3] = -1;
        }
        "G" if n == 2 => a[1][0] = -3,
        _ => return Err(RootDataError::UnknownType(format!("{ty}{n}"))),
    }
    Ok(a)
}

/// Per-condition admissibility results.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub x_finite_type: bool,
    pub tau_diagram_automorphism: bool,
    pub tau_involution: bool,
    pub tau_preserves_x: bool,
    pub tau_is_minus_wx_on_x: bool,
    pub rho_x_coweight_integral: bool,
    pub cartan_condition_i: bool,
    pub cartan_condition_ii: bool,
    pub tau0_commutes_with_tau: bool,
    pub tau0_preserves_x: bool,
    pub admissible: bool,
    pub failures: Vec<String>,
}

/// Admissible pair `(X, tau)` with everything derived from it.
#[derive(Clone, Debug)]
pub struct SatakeDatum {
    pub datum: Arc<RootDatum>,
    pub x: Vec<usize>,
    pub in_x: Vec<bool>,
    pub tau: Vec<usize>,
    pub tau0: Vec<usize>,
    /// `tau tau_0`
    pub tautau0: Vec<usize>,
    pub sfun: Vec<i64>,
    pub w0_word: Vec<usize>,
    pub wx_word: Vec<usize>,
    pub wx: WeylMat,
    pub theta: WeylMat,
    /// `2 rho_X` in root coordinates.
    pub two_rho_x: RootVec,
    /// `alpha_i(2 rho_X^vee)`
    pub alpha_two_rho_x_vee: Vec<i64>,
    pub ins: Vec<usize>,
    pub report: AdmissibilityReport,
}

/// Checks every admissibility condition and returns the report regardless
/// of the outcome.
pub fn admissibility_report(datum: &RootDatum, x: &[usize], tau: &[usize]) -> AdmissibilityReport {
    let n = datum.rank();
    let mut failures = Vec::new();
    let in_x: Vec<bool> = (0..n).map(|i| x.contains(&i)).collect();
    let x_finite = {
        let k = x.len();
        (1..=k).all(|m| {
            let mm = Matrix::from_fn(m, m, |i, j| scalar::rat(datum.form[x[i]][x[j]]));
            mm.det() > BigRational::zero()
        })
    };
    if !x_finite {
        failures.push("X is not of finite type".to_string());
    }
    let diag = tau.len() == n && datum.is_diagram_automorphism(tau);
    if !diag {
        failures.push("tau is not a diagram automorphism".to_string());
    }
    let invol = diag && (0..n).all(|i| tau[tau[i]] == i);
    if diag && !invol {
        failures.push("tau is not an involution".to_string());
    }
    let pres = diag && x.iter().all(|&i| in_x[tau[i]]);
    if diag && !pres {
        failures.push("tau does not preserve X".to_string());
    }
    let mut minus_wx = false;
    let mut rho_ok = false;
    if x_finite && diag {
        let wx = datum.longest_element(x);
        minus_wx = x.iter().all(|&i| neg_root(&wx.apply(&unit_root(n, i))) == unit_root(n, tau[i]));
        if !minus_wx {
            failures.push("tau does not act as -w_X on X".to_string());
        }
        let twice = alpha_two_rho_vee(datum, x);
        rho_ok = (0..n).all(|j| in_x[j] || tau[j] != j || twice[j] % 2 == 0);
        if !rho_ok {
            let bad: Vec<String> = (0..n)
                .filter(|&j| !in_x[j] && tau[j] == j && twice[j] % 2 != 0)
                .map(|j| (j + 1).to_string())
                .collect();
            failures.push(format!("alpha_j(rho_X^vee) not integral for tau-fixed j = {}", bad.join(",")));
        }
    }
    // Conditions under which the intrinsic bar involution is available.
    let mut cond_i = true;
    let mut cond_ii = true;
    if diag {
        for i in 0..n {
            if in_x[i] || tau[i] != i {
                continue;
            }
            for j in 0..n {
                if j == i {
                    continue;
                }
                let a = datum.cartan[i][j];
                if in_x[j] && !(-2..=0).contains(&a) {
                    cond_i = false;
                }
                if !in_x[j] && !(-3..=0).contains(&a) {
                    cond_ii = false;
                }
            }
        }
    }
    if !cond_i {
        failures.push("Cartan condition (i) fails".to_string());
    }
    if !cond_ii {
        failures.push("Cartan condition (ii) fails".to_string());
    }
    let (mut t0_comm, mut t0_x) = (true, true);
    if datum.finite && diag {
        let t0 = datum.tau0().expect("finite");
        t0_comm = (0..n).all(|i| tau[t0[i]] == t0[tau[i]]);
        t0_x = x.iter().all(|&i| in_x[t0[i]]);
        if !t0_comm {
            failures.push("tau_0 does not commute with tau".to_string());
        }
        if !t0_x {
            failures.push("tau_0 does not preserve X".to_string());
        }
    }
    AdmissibilityReport {
        x_finite_type: x_finite,
        tau_diagram_automorphism: diag,
        tau_involution: invol,
        tau_preserves_x: pres,
        tau_is_minus_wx_on_x: minus_wx,
        rho_x_coweight_integral: rho_ok,
        cartan_condition_i: cond_i,
        cartan_condition_ii: cond_ii,
        tau0_commutes_with_tau: t0_comm,
        tau0_preserves_x: t0_x,
        admissible: failures.is_empty(),
        failures,
    }
}

/// `alpha_j(2 rho_X^vee)` for every node `j`.
fn alpha_two_rho_vee(datum: &RootDatum, x: &[usize]) -> Vec<i64> {
    let n = datum.rank();
    let roots = datum.subsystem_positive_roots(x);
    (0..n)
        .map(|j| {
            roots
                .iter()
                .map(|beta| {
                    let num = 2 * datum.pair_simple(j, beta);
                    let den = datum.pair_roots(beta, beta);
                    assert_eq!(num % den, 0, "coroot pairing is integral");
                    num / den
                })
                .sum()
        })
        .collect()
}

impl SatakeDatum {
    /// Validates `(X, tau)` and derives `Theta`, `tau_0`, the s-function and
    /// the reduced words.
    pub fn new(datum: Arc<RootDatum>, x: &[usize], tau: &[usize]) -> Result<Self, RootDataError> {
        let n = datum.rank();
        for &i in x.iter().chain(tau.iter()) {
            if i >= n {
                return Err(RootDataError::BadNode(i as i64 + 1));
            }
        }
        let mut x: Vec<usize> = x.to_vec();
        x.sort_unstable();
        x.dedup();
        let report = admissibility_report(&datum, &x, tau);
        if !report.admissible {
            return Err(RootDataError::NotAdmissible(report.failures.clone()));
        }
        datum.require_finite()?;
        let in_x: Vec<bool> = (0..n).map(|i| x.contains(&i)).collect();
        let tau0 = datum.tau0()?;
        let tautau0: Vec<usize> = (0..n).map(|i| tau[tau0[i]]).collect();
        let (w0_word, wx_word) = datum.longest_words(&x)?;
        let wx = datum.longest_element(&x);
        let perm = WeylMat((0..n).map(|r| (0..n).map(|c| if tau[c] == r { 1 } else { 0 }).collect()).collect());
        let theta = wx.compose(&perm).neg();
        let two_rho_x = datum
            .subsystem_positive_roots(&x)
            .iter()
            .fold(vec![0; n], |acc, r| add_roots(&acc, r));
        let twice = alpha_two_rho_vee(&datum, &x);
        let mut sfun = vec![1i64; n];
        for i in 0..n {
            if in_x[i] || tau[i] == i || tau[i] < i {
                continue;
            }
            sfun[tau[i]] = if twice[i] % 2 == 0 { 1 } else { -1 };
        }
        let ins = (0..n)
            .filter(|&i| !in_x[i] && tau[i] == i && x.iter().all(|&j| datum.cartan[i][j] == 0))
            .collect();
        let sd = SatakeDatum {
            datum,
            x,
            in_x,
            tau: tau.to_vec(),
            tau0,
            tautau0,
            sfun,
            w0_word,
            wx_word,
            wx,
            theta,
            two_rho_x,
            alpha_two_rho_x_vee: twice,
            ins,
            report,
        };
        Ok(sd)
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn theta_root(&self, mu: &[i64]) -> RootVec {
        self.theta.apply(mu)
    }

    pub fn theta(&self, lambda: &[Rational64]) -> Weight {
        self.theta.apply_w(lambda)
    }

    pub fn theta_simple(&self, i: usize) -> RootVec {
        self.theta_root(&unit_root(self.rank(), i))
    }

    /// Nodes outside `X`.
    pub fn non_x(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| !self.in_x[i]).collect()
    }

    /// Z-basis of `Q^Theta = { lambda in Q : Theta(lambda) = lambda }`.
    pub fn q_theta_basis(&self) -> Vec<RootVec> {
        let n = self.rank();
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|r| (0..n).map(|c| self.theta.0[r][c] - if r == c { 1 } else { 0 }).collect())
            .collect();
        integer_kernel(&rows)
    }

    pub fn s_relation_holds(&self) -> bool {
        (0..self.rank()).all(|i| {
            if self.in_x[i] || self.tau[i] == i {
                self.sfun[i] == 1
            } else {
                let sign = if self.alpha_two_rho_x_vee[i] % 2 == 0 { 1 } else { -1 };
                self.sfun[i] * self.sfun[self.tau[i]] == sign
            }
        })
    }
}

/// Z-basis of the integer kernel of an integer matrix, by column-style
/// Hermite reduction of `[M; I]`.
pub fn integer_kernel(m: &[Vec<i64>]) -> Vec<RootVec> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    // Columns of the augmented matrix: (M e_j, e_j).
    let mut aug: Vec<Vec<i64>> = (0..cols)
        .map(|j| {
            let mut c: Vec<i64> = (0..rows).map(|r| m[r][j]).collect();
            c.extend(unit_root(cols, j));
            c
        })
        .collect();
    let mut pivot_col = 0;
    for r in 0..rows {
        // Euclid on the entries of row r among columns pivot_col..
        loop {
            let nz: Vec<usize> = (pivot_col..cols).filter(|&c| aug[c][r] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&c) = nz.first() {
                    aug.swap(pivot_col, c);
                    pivot_col += 1;
                }
                break;
            }
            let &best = nz.iter().min_by_key(|&&c| aug[c][r].abs()).unwrap();
            for &c in &nz {
                if c == best {
                    continue;
                }
                let f = aug[c][r] / aug[best][r];
                let src = aug[best].clone();
                for (x, y) in aug[c].iter_mut().zip(&src) {
                    *x -= f * y;
                }
            }
        }
    }
    aug[pivot_col..].iter().map(|c| c[rows..].to_vec()).collect()
}

/// JSON descriptor of a Satake datum; node labels are 1-based.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SatakeDescriptor {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub ty: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cartan: Option<Vec<Vec<i64>>>,
    #[serde(rename = "X", default)]
    pub x: Vec<i64>,
    #[serde(default)]
    pub tau: BTreeMap<String, i64>,
}

impl SatakeDescriptor {
    pub fn datum(&self) -> Result<RootDatum, RootDataError> {
        match (&self.cartan, &self.ty, self.rank) {
            (Some(c), _, _) => RootDatum::build(c.clone()),
            (None, Some(t), Some(r)) => RootDatum::of_type(t, r),
            _ => Err(RootDataError::UnknownType("descriptor needs either type+rank or cartan".into())),
        }
    }

    /// 0-based `(X, tau)`; missing `tau` entries default to fixed points.
    pub fn x_tau(&self, n: usize) -> Result<(Vec<usize>, Vec<usize>), RootDataError> {
        let node = |k: i64| -> Result<usize, RootDataError> {
            if k >= 1 && (k as usize) <= n {
                Ok(k as usize - 1)
            } else {
                Err(RootDataError::BadNode(k))
            }
        };
        let x = self.x.iter().map(|&k| node(k)).collect::<Result<Vec<_>, _>>()?;
        let mut tau: Vec<usize> = (0..n).collect();
        for (k, v) in &self.tau {
            let kk: i64 = k.trim().parse().map_err(|_| RootDataError::BadNode(-1))?;
            tau[node(kk)?] = node(*v)?;
        }
        Ok((x, tau))
    }

    pub fn build(&self) -> Result<SatakeDatum, RootDataError> {
        let datum = Arc::new(self.datum()?);
        let (x, tau) = self.x_tau(datum.rank())?;
        SatakeDatum::new(datum, &x, &tau)
    }
}

/// Named entries of the built-in Satake catalog.
pub fn catalog() -> Vec<(&'static str, SatakeDescriptor)> {
    let d = |ty: &str, rank: usize, x: &[i64], tau: &[(i64, i64)]| SatakeDescriptor {
        ty: Some(ty.to_string()),
        rank: Some(rank),
        cartan: None,
        x: x.to_vec(),
        tau: tau.iter().map(|(a, b)| (a.to_string(), *b)).collect(),
    };
    vec![
        ("A1-split", d("A", 1, &[], &[])),
        ("A1-split-s", d("A", 1, &[], &[])),
        ("A2-split", d("A", 2, &[], &[])),
        ("A2-quasisplit", d("A", 2, &[], &[(1, 2), (2, 1)])),
        ("A3-X2", d("A", 3, &[2], &[(1, 3), (3, 1)])),
        ("B2-split", d("B", 2, &[], &[])),
    ]
}

pub fn catalog_entry(name: &str) -> Option<SatakeDescriptor> {
    catalog().into_iter().find(|(n, _)| *n == name).map(|(_, d)| d)
}

/// Node sets as a set for quick membership in callers.
pub fn node_set(x: &[usize]) -> BTreeSet<usize> {
    x.iter().copied().collect()
}
