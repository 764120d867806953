//! The K-matrix `K = X xi T_{w_X}^{-1} T_{w_0}^{-1}` on modules and the
//! operator identities it satisfies: intertwining, the coproduct formulas
//! for `X` and `K`, the reflection equation and fusion.

use std::sync::{Arc, RwLock};
use std::time::Instant;

use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::freealg::{Direction, FreeAlgError};
use crate::linalg::{LinalgError, Matrix};
use crate::qsp::{QSPParams, QspError};
use crate::quasik::{compute_cached, QuasiK, QuasiKError};
use crate::quasir::{r_times_rx_bar, root_vectors, QuasiRError};
use crate::repcat::{act, boxed_weights, kron, lusztig_t_word, tensor, Braiding, Module, RepError, Twist};
use crate::rootdata::{add_roots, height, is_nonneg, neg_root, root_to_weight, sub_weights, unit_root, RootDataError, RootVec};
use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KError {
    #[error(transparent)]
    Qsp(#[from] QspError),
    #[error(transparent)]
    QuasiK(#[from] QuasiKError),
    #[error(transparent)]
    QuasiR(#[from] QuasiRError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
    #[error(transparent)]
    RootData(#[from] RootDataError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Replacement for `xi`, used by negative controls.
pub type XiFn = Arc<dyn Fn(&QSPParams, &[Rational64]) -> Result<Scalar, KError> + Send + Sync>;

/// Shared state for all checks of one parameter set.
pub struct KContext {
    pub params: Arc<QSPParams>,
    pub braiding: Braiding,
    quasik: RwLock<Option<Arc<QuasiK>>>,
    xi_override: Option<XiFn>,
}

#[derive(Clone, Debug)]
pub struct KParts {
    pub x: Matrix<Scalar>,
    pub xi: Matrix<Scalar>,
    pub twx: Matrix<Scalar>,
    pub tw0: Matrix<Scalar>,
    pub kprime: Matrix<Scalar>,
    pub k: Matrix<Scalar>,
}

/// Result of one identity check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub target: String,
    pub ok: bool,
    pub dim: usize,
    pub millis: u128,
    /// First mismatching entries as `(row, col, lhs, rhs)`.
    pub mismatches: Vec<(usize, usize, String, String)>,
    pub detail: Option<String>,
}

const MAX_MISMATCHES: usize = 8;

fn outcome(check: &str, target: &str, lhs: &Matrix<Scalar>, rhs: &Matrix<Scalar>, start: Instant) -> CheckOutcome {
    let mut mismatches = Vec::new();
    let mut ok = lhs.rows() == rhs.rows() && lhs.cols() == rhs.cols();
    if ok {
        'outer: for r in 0..lhs.rows() {
            for c in 0..lhs.cols() {
                if lhs.get(r, c) != rhs.get(r, c) {
                    ok = false;
                    mismatches.push((r, c, lhs.get(r, c).to_string(), rhs.get(r, c).to_string()));
                    if mismatches.len() >= MAX_MISMATCHES {
                        break 'outer;
                    }
                }
            }
        }
    }
    CheckOutcome { check: check.into(), target: target.into(), ok, dim: lhs.rows(), millis: start.elapsed().as_millis(), mismatches, detail: None }
}

fn flag(check: &str, target: &str, ok: bool, detail: Option<String>, start: Instant) -> CheckOutcome {
    CheckOutcome { check: check.into(), target: target.into(), ok, dim: 0, millis: start.elapsed().as_millis(), mismatches: Vec::new(), detail }
}

/// Generators of the coideal subalgebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    K(RootVec),
    E(usize),
    F(usize),
    B(usize),
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Generator::K(l) => write!(f, "K{l:?}"),
            Generator::E(i) => write!(f, "E_{}", i + 1),
            Generator::F(i) => write!(f, "F_{}", i + 1),
            Generator::B(i) => write!(f, "B_{}", i + 1),
        }
    }
}

impl KContext {
    pub fn new(params: Arc<QSPParams>) -> Self {
        let braiding = Braiding::new(params.alg.clone());
        KContext { params, braiding, quasik: RwLock::new(None), xi_override: None }
    }

    /// A context whose `xi` is replaced by `f`.
    pub fn with_xi(params: Arc<QSPParams>, f: XiFn) -> Self {
        let mut k = KContext::new(params);
        k.xi_override = Some(f);
        k
    }

    /// Starts from an already computed quasi-K matrix.
    pub fn with_quasik(self, k: QuasiK) -> Self {
        *self.quasik.write().unwrap() = Some(Arc::new(k));
        self
    }

    fn sigma(&self) -> &[usize] {
        &self.params.satake.tautau0
    }

    /// Quasi-K matrix up to at least height `h`.
    pub fn quasik(&self, h: i64) -> Result<Arc<QuasiK>, KError> {
        if let Some(k) = self.quasik.read().unwrap().as_ref() {
            if k.cutoff >= h {
                return Ok(k.clone());
            }
        }
        let k = Arc::new(compute_cached(&self.params, h)?);
        *self.quasik.write().unwrap() = Some(k.clone());
        Ok(k)
    }

    pub fn xi_value(&self, lambda: &[Rational64]) -> Result<Scalar, KError> {
        match &self.xi_override {
            Some(f) => f(&self.params, lambda),
            None => Ok(self.params.xi_eval(lambda)?),
        }
    }

    /// `xi_M`, diagonal in the weight basis.
    pub fn xi_on(&self, m: &Module) -> Result<Matrix<Scalar>, KError> {
        Ok(Matrix::diagonal(m.weights.iter().map(|w| self.xi_value(w)).collect::<Result<Vec<_>, _>>()?))
    }

    /// `X_M = sum_mu (X_mu)_M`, summed over the weights that can act.
    pub fn x_on(&self, m: &Module) -> Result<Matrix<Scalar>, KError> {
        self.x_components(m).map(|v| {
            v.into_iter().fold(Matrix::zeros(m.dim(), m.dim()), |acc, (_, x)| acc.add(&x))
        })
    }

    fn x_components(&self, m: &Module) -> Result<Vec<(RootVec, Matrix<Scalar>)>, KError> {
        let gap = m.weight_gap();
        let qk = self.quasik(height(&gap))?;
        let mut out = Vec::new();
        for (mu, x) in &qk.comps {
            if mu.iter().zip(&gap).any(|(a, b)| a > b) {
                continue;
            }
            out.push((mu.clone(), act(&self.params.alg, x, m)?));
        }
        Ok(out)
    }

    pub fn build_kparts(&self, m: &Module) -> Result<KParts, KError> {
        let sd = &self.params.satake;
        let x = self.x_on(m)?;
        let xi = self.xi_on(m)?;
        let twx = lusztig_t_word(m, &sd.wx_word, Direction::Fwd)?;
        let tw0 = lusztig_t_word(m, &sd.w0_word, Direction::Fwd)?;
        let kprime = x.mul(&xi).mul(&twx.inverse()?);
        let k = kprime.mul(&tw0.inverse()?);
        Ok(KParts { x, xi, twx, tw0, kprime, k })
    }

    pub fn generators(&self) -> Vec<Generator> {
        let sd = &self.params.satake;
        let mut g: Vec<Generator> = sd.q_theta_basis().into_iter().map(Generator::K).collect();
        for &i in &sd.x {
            g.push(Generator::E(i));
            g.push(Generator::F(i));
        }
        g.extend(sd.non_x().into_iter().map(Generator::B));
        g
    }

    /// Action of a generator on `m`.
    pub fn generator_on(&self, g: &Generator, m: &Module) -> Result<Matrix<Scalar>, KError> {
        let n = m.rank();
        let p = &self.params;
        Ok(match g {
            Generator::K(l) => m.k_root(l),
            Generator::E(i) => m.e[*i].clone(),
            Generator::F(i) => m.f[*i].clone(),
            Generator::B(i) => {
                let kinv = m.k_root(&neg_root(&unit_root(n, *i)));
                let mut b = m.f[*i].clone();
                if let Some(x) = &p.x_elems[*i] {
                    b = b.add(&act(&p.alg, x, m)?.mul(&kinv).scale(&p.c[*i]));
                }
                b.add(&kinv.scale(&p.s[*i]))
            }
        })
    }

    /// `(F_i + c_i X_i K_i^{-1} + s_i K_i^{-1}) X = X (F_i + bar(c_i X_i) K_i + bar(s_i) K_i)`
    /// for every node, and `X` commuting with `E_i` (`i` in `X`) and `K_lambda` (`lambda` in `Q^Theta`).
    pub fn check_intertwining(&self, m: &Module) -> Result<Vec<CheckOutcome>, KError> {
        let p = &self.params;
        let n = m.rank();
        let x = self.x_on(m)?;
        let mut out = Vec::new();
        for g in self.generators() {
            let start = Instant::now();
            let (lhs, rhs) = match &g {
                Generator::B(i) | Generator::F(i) => {
                    let i = *i;
                    let k = m.k_root(&unit_root(n, i));
                    let mut right = m.f[i].clone();
                    if let Some(cx) = &p.cx_bar[i] {
                        right = right.add(&act(&p.alg, cx, m)?.mul(&k));
                    }
                    right = right.add(&k.scale(&p.s[i].bar()));
                    (self.generator_on(&Generator::B(i), m)?.mul(&x), x.mul(&right))
                }
                other => {
                    let b = self.generator_on(other, m)?;
                    (b.mul(&x), x.mul(&b))
                }
            };
            out.push(outcome("intertwining", &format!("{} {}", m.label, g), &lhs, &rhs, start));
        }
        Ok(out)
    }

    /// `K b = tau tau_0(b) K` and `K' tw(tau_0(b)) = tau_0 tau(b) K'` for all generators.
    pub fn check_twisted_intertwining(&self, m: &Module, parts: &KParts) -> Result<Vec<CheckOutcome>, KError> {
        let sd = &self.params.satake;
        let m_s = m.twisted(&Twist::Diagram(sd.tautau0.clone()));
        let m_tw = m.twisted(&Twist::TwDiagram(sd.tau0.clone()));
        let mut out = Vec::new();
        for g in self.generators() {
            let start = Instant::now();
            let lhs = parts.k.mul(&self.generator_on(&g, m)?);
            let rhs = self.generator_on(&g, &m_s)?.mul(&parts.k);
            out.push(outcome("k_twisted", &format!("{} {}", m.label, g), &lhs, &rhs, start));
            let start = Instant::now();
            let lhs = parts.kprime.mul(&self.generator_on(&g, &m_tw)?);
            let rhs = self.generator_on(&g, &m_s)?.mul(&parts.kprime);
            out.push(outcome("kprime_twisted", &format!("{} {}", m.label, g), &lhs, &rhs, start));
        }
        Ok(out)
    }

    /// `Ad(xi)(E_nu) = xi(nu) E_nu K_{nu + Theta nu}^{-1}` on every basis word acting
    /// nontrivially, and `Ad(xi) = T_{w_0} T_{w_X} tau tau_0` on `E_i`, `F_i` (`i` in `X`)
    /// and `K_lambda` (`lambda` in `Q^Theta`).
    pub fn check_adxi(&self, m: &Module, parts: &KParts) -> Result<Vec<CheckOutcome>, KError> {
        let sd = &self.params.satake;
        let alg = &self.params.alg;
        let xi_inv = parts.xi.inverse()?;
        let mut out = Vec::new();
        let gap = m.weight_gap();
        for nu in boxed_weights(&gap) {
            if height(&nu) == 0 {
                continue;
            }
            let basis = alg.basis(&nu)?;
            let xi_nu = self.xi_value(&root_to_weight(&nu))?;
            let shift = neg_root(&add_roots(&nu, &sd.theta_root(&nu)));
            for w in &basis.words {
                let e = m.e_word(w);
                if e.is_zero() {
                    continue;
                }
                let start = Instant::now();
                let lhs = parts.xi.mul(&e).mul(&xi_inv);
                let rhs = e.mul(&m.k_root(&shift)).scale(&xi_nu);
                out.push(outcome("adxi", &format!("{} E{:?}", m.label, w.iter().map(|l| l + 1).collect::<Vec<_>>()), &lhs, &rhs, start));
            }
        }
        let t = parts.tw0.mul(&parts.twx);
        let t_inv = t.inverse()?;
        let sigma = &sd.tautau0;
        let mut local: Vec<(String, Matrix<Scalar>, Matrix<Scalar>)> = Vec::new();
        for &i in &sd.x {
            local.push((format!("E_{}", i + 1), m.e[i].clone(), m.e[sigma[i]].clone()));
            local.push((format!("F_{}", i + 1), m.f[i].clone(), m.f[sigma[i]].clone()));
        }
        for l in sd.q_theta_basis() {
            let sl = crate::rootdata::RootDatum::permute_root(sigma, &l);
            local.push((format!("K{l:?}"), m.k_root(&l), m.k_root(&sl)));
        }
        for (name, u, su) in local {
            let start = Instant::now();
            let lhs = parts.xi.mul(&u).mul(&xi_inv);
            let rhs = t.mul(&su).mul(&t_inv);
            out.push(outcome("adxi_restriction", &format!("{} {}", m.label, name), &lhs, &rhs, start));
        }
        Ok(out)
    }

    /// `R^{(tau,X)}` on `M (x) N`, evaluated by conjugating the relabeled first legs
    /// of `R bar(R_X)`. Also returns the block-structure check.
    pub fn build_rtaux(&self, m: &Module, n: &Module, pm: &KParts) -> Result<(Matrix<Scalar>, CheckOutcome), KError> {
        let start = Instant::now();
        let sd = &self.params.satake;
        let alg = &self.params.alg;
        let sigma = &sd.tautau0;
        let gap_m = m.weight_gap();
        let gap_n = n.weight_gap();
        let cutoff = height(&gap_m).max(height(&gap_n));
        let table = root_vectors(alg, &sd.w0_word)?;
        let rr = r_times_rx_bar(alg, &table, sd.wx_word.len(), cutoff)?;
        let c = pm.xi.mul(&pm.tw0.inverse()?).mul(&pm.twx.inverse()?);
        let c_inv = c.inverse()?;
        let mut acc = Matrix::zeros(m.dim() * n.dim(), m.dim() * n.dim());
        let mut problems = Vec::new();
        for (mu, coeffs) in &rr.comps {
            if coeffs.is_zero() {
                continue;
            }
            let in_wxq = is_nonneg(&sd.wx.apply(mu)) && is_nonneg(mu);
            if !in_wxq {
                problems.push(format!("component at {mu:?} outside w_X Q^+"));
            }
            if mu.iter().zip(&gap_n).any(|(a, b)| a > b) {
                continue;
            }
            let basis = alg.basis(mu)?;
            let shift = neg_root(&sd.theta_root(mu));
            let shift_w = root_to_weight(&shift);
            let firsts: Vec<Matrix<Scalar>> = basis
                .words
                .iter()
                .map(|w| {
                    let relabeled: Vec<u8> = w.iter().map(|&l| sigma[l as usize] as u8).collect();
                    c.mul(&m.f_word(&relabeled)).mul(&c_inv)
                })
                .collect();
            let seconds: Vec<Matrix<Scalar>> = basis.words.iter().map(|w| n.e_word(w)).collect();
            for (a, fa) in firsts.iter().enumerate() {
                for (r, cc, _) in fa.nonzeros() {
                    if sub_weights(&m.weights[r], &m.weights[cc]) != shift_w {
                        problems.push(format!("first leg at {mu:?} not of weight {shift:?}"));
                        break;
                    }
                }
                for (b, eb) in seconds.iter().enumerate() {
                    let coeff = coeffs.get(a, b);
                    if coeff.is_zero() || fa.is_zero() || eb.is_zero() {
                        continue;
                    }
                    acc.add_scaled(coeff, &kron(fa, eb));
                }
            }
        }
        problems.dedup();
        let detail = if problems.is_empty() { None } else { Some(problems.join("; ")) };
        let check = flag("rtaux_blocks", &format!("{}*{}", m.label, n.label), detail.is_none(), detail, start);
        Ok((acc, check))
    }

    /// `X_{K2} = sum_mu K_mu (x) X_mu` on `M (x) N`.
    pub fn build_xk2(&self, m: &Module, n: &Module) -> Result<Matrix<Scalar>, KError> {
        let mut acc = Matrix::zeros(m.dim() * n.dim(), m.dim() * n.dim());
        for (mu, x) in self.x_components(n)? {
            acc.add_assign(&kron(&m.k_root(&mu), &x));
        }
        Ok(acc)
    }

    /// Diagonal `q^{sign (f(mu), nu)}` on `M (x) N` for a linear map `f` on weights.
    fn kappa_with(&self, m: &Module, n: &Module, f: impl Fn(&[Rational64]) -> Vec<Rational64>, sign: i64) -> Result<Matrix<Scalar>, KError> {
        let d = &m.datum;
        let mut entries = Vec::with_capacity(m.dim() * n.dim());
        for a in &m.weights {
            let fa = f(a);
            for b in &n.weights {
                entries.push(d.q_pow_r(d.pair(&fa, b) * Rational64::from_integer(sign))?);
            }
        }
        Ok(Matrix::diagonal(entries))
    }

    /// All coproduct checks on one ordered pair of modules.
    pub fn check_pair(&self, m: &Module, n: &Module, checks: &CheckSet) -> Result<Vec<CheckOutcome>, KError> {
        let sd = &self.params.satake;
        let sigma = self.sigma().to_vec();
        let target = format!("{}*{}", m.label, n.label);
        let mn = tensor(m, n);
        let pm = self.build_kparts(m)?;
        let pn = self.build_kparts(n)?;
        let mut out = Vec::new();
        let idm = m.identity();
        let idn = n.identity();

        if checks.delta_xi {
            let start = Instant::now();
            let lhs = self.xi_on(&mn)?;
            let km = self.kappa_with(m, n, |w| w.to_vec(), -1)?;
            let kt = self.kappa_with(m, n, |w| sd.theta(w), -1)?;
            let rhs = kron(&pm.xi, &pn.xi).mul(&km).mul(&kt);
            out.push(outcome("delta_xi", &target, &lhs, &rhs, start));
        }
        if checks.delta_x || checks.kx1x {
            let xk2 = self.build_xk2(m, n)?;
            if checks.delta_x {
                let (rtx, blocks) = self.build_rtaux(m, n, &pm)?;
                out.push(blocks);
                let start = Instant::now();
                let lhs = self.x_on(&mn)?;
                let rhs = kron(&pm.x, &idn).mul(&rtx).mul(&xk2);
                out.push(outcome("delta_x", &target, &lhs, &rhs, start));
            }
            if checks.kx1x {
                let start = Instant::now();
                let t = kron(&pm.twx.mul(&pm.tw0), &idn);
                let lhs = t.mul(&xk2).mul(&t.inverse()?);
                let kp = self.kappa_with(m, n, |w| crate::rootdata::RootDatum::permute_weight(&sigma, w), 1)?;
                let km = self.kappa_with(m, n, |w| crate::rootdata::RootDatum::permute_weight(&sigma, w), -1)?;
                let rhs = km.mul(&kron(&idm, &pn.x)).mul(&kp);
                out.push(outcome("kx1x", &target, &lhs, &rhs, start));
            }
        }
        if checks.delta_k || checks.reflection || checks.fusion {
            let r_mn = self.braiding.rhat(m, n)?;
            let rt_nm = self.braiding.rhat_twisted(n, m, &sigma)?;
            let km1 = kron(&pm.k, &idn);
            let kn1 = kron(&pn.k, &idm);
            let factored = km1.mul(&rt_nm).mul(&kn1).mul(&r_mn);
            if checks.delta_k {
                let start = Instant::now();
                let lhs = self.build_kparts(&mn)?.k;
                out.push(outcome("delta_k", &target, &lhs, &factored, start));
            }
            if checks.reflection {
                let start = Instant::now();
                let r_nm = self.braiding.rhat(n, m)?;
                let rt_mn = self.braiding.rhat_twisted(m, n, &sigma)?;
                let rhs = r_nm.mul(&kn1).mul(&rt_mn).mul(&km1);
                out.push(outcome("reflection", &target, &factored, &rhs, start));
            }
            if checks.fusion {
                let start = Instant::now();
                let n_s = n.twisted(&Twist::Diagram(sigma.clone()));
                let rhs = km1.mul(&self.braiding.rhat(&n_s, m)?).mul(&kn1).mul(&r_mn);
                let lhs = self.build_kparts(&mn)?.k;
                let mut o = outcome("fusion", &target, &lhs, &rhs, start);
                if o.ok && rhs != factored {
                    o.ok = false;
                    o.detail = Some("fusion and coproduct factorizations disagree".into());
                }
                out.push(o);
            }
        }
        Ok(out)
    }

    /// All single-module checks.
    pub fn check_module(&self, m: &Module, checks: &CheckSet) -> Result<Vec<CheckOutcome>, KError> {
        let mut out = Vec::new();
        if checks.intertwining {
            out.extend(self.check_intertwining(m)?);
        }
        if checks.twisted || checks.adxi {
            let parts = self.build_kparts(m)?;
            if checks.twisted {
                out.extend(self.check_twisted_intertwining(m, &parts)?);
            }
            if checks.adxi {
                out.extend(self.check_adxi(m, &parts)?);
            }
        }
        Ok(out)
    }
}

/// Which identities to run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckSet {
    pub intertwining: bool,
    pub twisted: bool,
    pub adxi: bool,
    pub delta_xi: bool,
    pub delta_x: bool,
    pub kx1x: bool,
    pub delta_k: bool,
    pub reflection: bool,
    pub fusion: bool,
    /// Seeded sampling of structural identities.
    pub structural: bool,
}

pub const CHECK_NAMES: [&str; 10] = ["intertwining", "twisted", "adxi", "delta_xi", "delta_x", "kx1x", "delta_k", "reflection", "fusion", "structural"];

impl CheckSet {
    pub fn all() -> Self {
        CheckSet { intertwining: true, twisted: true, adxi: true, delta_xi: true, delta_x: true, kx1x: true, delta_k: true, reflection: true, fusion: true, structural: true }
    }

    pub fn none() -> Self {
        CheckSet { intertwining: false, twisted: false, adxi: false, delta_xi: false, delta_x: false, kx1x: false, delta_k: false, reflection: false, fusion: false, structural: false }
    }

    /// Parses a comma separated list of check names; `all` selects everything.
    pub fn parse(list: &str) -> Result<Self, String> {
        let mut s = CheckSet::none();
        for name in list.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match name {
                "all" => s = CheckSet::all(),
                "intertwining" => s.intertwining = true,
                "twisted" => s.twisted = true,
                "adxi" => s.adxi = true,
                "delta_xi" => s.delta_xi = true,
                "delta_x" => s.delta_x = true,
                "kx1x" => s.kx1x = true,
                "delta_k" => s.delta_k = true,
                "reflection" => s.reflection = true,
                "fusion" => s.fusion = true,
                "structural" => s.structural = true,
                other => return Err(format!("unknown check {other:?}; known: all, {}", CHECK_NAMES.join(", "))),
            }
        }
        Ok(s)
    }

    pub fn any_module(&self) -> bool {
        self.intertwining || self.twisted || self.adxi
    }

    pub fn any_pair(&self) -> bool {
        self.delta_xi || self.delta_x || self.kx1x || self.delta_k || self.reflection || self.fusion
    }
}

/// Helper for the negative control: `xi` times `q^{(lambda, alpha_1)}`.
pub fn skewed_xi() -> XiFn {
    Arc::new(|p: &QSPParams, lambda: &[Rational64]| {
        let d = &p.satake.datum;
        let a1 = root_to_weight(&unit_root(d.rank(), 0));
        let base = p.xi_eval(lambda)?;
        Ok(&base * &d.q_pow_r(d.pair(lambda, &a1))?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::FreeAlgebra;
    use crate::qsp::{default_params, params_from_config};
    use crate::repcat::{build_irrep, parse_module};
    use crate::rootdata::catalog_entry;

    fn ctx(name: &str) -> KContext {
        let sd = Arc::new(catalog_entry(name).unwrap().build().unwrap());
        let alg = Arc::new(FreeAlgebra::new(sd.datum.clone()));
        KContext::new(Arc::new(params_from_config(sd, alg, &default_params(name).unwrap()).unwrap()))
    }

    fn module(c: &KContext, s: &str) -> Module {
        let d = c.params.satake.datum.clone();
        build_irrep(d.clone(), &parse_module(&d, s).unwrap()).unwrap()
    }

    #[test]
    fn trivial_module_has_trivial_k() {
        let c = ctx("A2-quasisplit");
        let m = module(&c, "V(0)");
        assert_eq!(c.build_kparts(&m).unwrap().k, Matrix::identity(1));
        assert!(c.check_module(&m, &CheckSet::all()).unwrap().iter().all(|o| o.ok));
        assert!(c.check_pair(&m, &m, &CheckSet::all()).unwrap().iter().all(|o| o.ok));
    }

    #[test]
    fn a1_split_fundamental_k() {
        let c = ctx("A1-split");
        let m = module(&c, "V(w)");
        let parts = c.build_kparts(&m).unwrap();
        let d = &c.params.satake.datum;
        // X_alpha = 0 without s and X_{2 alpha} kills V(w)
        assert_eq!(parts.x, Matrix::identity(2));
        let xi0 = c.xi_value(&m.weights[0]).unwrap();
        let xi1 = c.xi_value(&m.weights[1]).unwrap();
        // T_{w_0}^{-1} = T^{-1}: v0 -> v1, v1 -> -q^{-1} v0
        let expect = Matrix::from_rows(vec![vec![Scalar::zero(), &xi0 * &-d.q(-1)], vec![xi1, Scalar::zero()]]);
        assert_eq!(parts.k, expect);
        assert!(c.check_module(&m, &CheckSet::all()).unwrap().iter().all(|o| o.ok));
    }

    #[test]
    fn check_names_parse() {
        assert_eq!(CheckSet::parse("all").unwrap(), CheckSet::all());
        let s = CheckSet::parse("reflection").unwrap();
        assert!(s.reflection && !s.fusion && !s.any_module());
        assert!(CheckSet::parse("nonsense").is_err());
    }
}
