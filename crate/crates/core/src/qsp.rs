//! Parameters `c`, `s` of the coideal subalgebra `B_{c,s}`, the elements
//! `X_i`, `Z_i`, the character `gamma` on `P` and the weight function `xi`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freealg::{AlgebraElement, Direction, FreeAlgError, FreeAlgebra, Side};
use crate::rootdata::{neg_root, sub_roots, unit_root, RootDataError, SatakeDatum, Weight};
use crate::scalar::{Poly, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QspError {
    #[error("node {0} lies in X")]
    NodeInX(usize),
    #[error("parameter constraints violated: {}", .0.join("; "))]
    Constraints(Vec<String>),
    #[error("gamma does not extend from Q to P over Q(q^(1/d)): {0}; choose c with monomial or (1-q^b)q^a factors so that the fundamental weights get integral exponents")]
    GammaExtension(String),
    #[error("bad parameter config: {0}")]
    Config(String),
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
    #[error(transparent)]
    RootData(#[from] RootDataError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Parameter config as read from JSON; node labels are 1-based, values use
/// the scalar grammar.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct ParamConfig {
    #[serde(default)]
    pub c: BTreeMap<String, String>,
    #[serde(default)]
    pub s: BTreeMap<String, String>,
}

impl ParamConfig {
    pub fn from_json(text: &str) -> Result<Self, QspError> {
        serde_json::from_str(text).map_err(|e| QspError::Config(e.to_string()))
    }

    /// Dense 0-based `(c, s)`; absent entries are zero.
    pub fn resolve(&self, sd: &SatakeDatum) -> Result<(Vec<Scalar>, Vec<Scalar>), QspError> {
        let n = sd.rank();
        let d = sd.datum.d;
        let read = |m: &BTreeMap<String, String>| -> Result<Vec<Scalar>, QspError> {
            let mut out = vec![Scalar::zero().with_d(d); n];
            for (k, v) in m {
                let i: usize = k.trim().parse().map_err(|_| QspError::Config(format!("node label {k:?}")))?;
                if i == 0 || i > n {
                    return Err(QspError::Config(format!("node label {k:?} out of range")));
                }
                out[i - 1] = sd.datum.parse_scalar(v)?;
            }
            Ok(out)
        };
        Ok((read(&self.c)?, read(&self.s)?))
    }
}

/// Shipped parameters for the catalog entries. Split cases use
/// `c_i = q_i^{-1}`, the A3 entry uses the choice with `gamma` defined over
/// the base field.
pub fn default_params(name: &str) -> Option<ParamConfig> {
    let cfg = |c: &[(&str, &str)], s: &[(&str, &str)]| ParamConfig {
        c: c.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        s: s.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    };
    Some(match name {
        "A1-split" => cfg(&[("1", "q^-1")], &[]),
        "A1-split-s" => cfg(&[("1", "q^-1")], &[("1", "1")]),
        "A2-split" => cfg(&[("1", "q^-1"), ("2", "q^-1")], &[]),
        "A2-quasisplit" => cfg(&[("1", "1"), ("2", "q")], &[]),
        "A3-X2" => cfg(&[("1", "1-q^2"), ("3", "q^2-1")], &[]),
        "B2-split" => cfg(&[("1", "q^-2"), ("2", "q^-1")], &[]),
        _ => return None,
    })
}

/// One named constraint and whether it held.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConstraintCheck {
    pub name: String,
    pub node: Option<usize>,
    pub ok: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<ConstraintCheck>,
}

impl ValidationReport {
    fn record(&mut self, name: &str, node: Option<usize>, ok: bool) {
        self.checks.push(ConstraintCheck { name: name.to_string(), node: node.map(|i| i + 1), ok });
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.ok)
            .map(|c| match c.node {
                Some(i) => format!("{} (node {i})", c.name),
                None => c.name.clone(),
            })
            .collect()
    }

    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

pub struct QSPParams {
    pub satake: Arc<SatakeDatum>,
    pub alg: Arc<FreeAlgebra>,
    /// `c_i`, zero on `X`.
    pub c: Vec<Scalar>,
    /// `s_i`, zero on `X`.
    pub s: Vec<Scalar>,
    /// `X_i` for `i` outside `X`.
    pub x_elems: Vec<Option<AlgebraElement>>,
    /// `Z_i` (with its K-tag) for `i` outside `X`.
    pub z_elems: Vec<Option<AlgebraElement>>,
    /// `bar(c_i X_i)`, computed coefficient-wise; validation compares it with
    /// `-rho_i T_{w_X}^{-1}(E_{tau(i)})`.
    pub cx_bar: Vec<Option<AlgebraElement>>,
    pub report: ValidationReport,
    gamma_fund: Result<Vec<Scalar>, QspError>,
    xi_memo: RwLock<HashMap<Weight, Scalar>>,
}

impl std::fmt::Debug for QSPParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QSPParams").field("c", &self.c).field("s", &self.s).finish_non_exhaustive()
    }
}

fn sign(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// `X_i = -s(tau(i)) T_{w_X}(E_{tau(i)})`.
pub fn make_xi(sd: &SatakeDatum, alg: &FreeAlgebra, i: usize) -> Result<AlgebraElement, QspError> {
    if sd.in_x[i] {
        return Err(QspError::NodeInX(i + 1));
    }
    let t = sd.tau[i];
    let e = alg.generator(Side::Plus, t);
    let img = alg.braid_t_word(&sd.wx_word, &e, Direction::Fwd)?;
    let x = img.scaled(&-sign(if sd.sfun[t] == 1 { 0 } else { 1 }));
    assert_eq!(x.homogeneous_weight(), Some(&neg_root(&sd.theta_simple(i))), "X_i has weight -Theta(alpha_i)");
    Ok(x)
}

/// `T_{w_X}^{-1}(E_j)`.
fn twx_inv(sd: &SatakeDatum, alg: &FreeAlgebra, j: usize) -> Result<AlgebraElement, QspError> {
    let rev: Vec<usize> = sd.wx_word.iter().rev().copied().collect();
    Ok(alg.braid_t_word(&rev, &alg.generator(Side::Plus, j), Direction::Inv)?)
}

/// `Z_i = r_{tau(i)}(X_i) K_i^{-1} K_{tau(i)}`, the K-part kept as a tag.
pub fn make_zi(sd: &SatakeDatum, alg: &FreeAlgebra, i: usize, xi: &AlgebraElement) -> Result<AlgebraElement, QspError> {
    let n = sd.rank();
    let t = sd.tau[i];
    let r = alg.skew_r(t, xi)?;
    Ok(r.with_k_tag(Some(sub_roots(&unit_root(n, t), &unit_root(n, i)))))
}

impl QSPParams {
    /// Builds all derived data and runs every constraint, without failing on
    /// violations. Used directly only by negative controls.
    pub fn build_unchecked(sd: Arc<SatakeDatum>, alg: Arc<FreeAlgebra>, c: Vec<Scalar>, s: Vec<Scalar>) -> Result<Self, QspError> {
        let n = sd.rank();
        let datum = sd.datum.clone();
        let mut report = ValidationReport::default();
        let mut x_elems = vec![None; n];
        let mut z_elems = vec![None; n];
        let mut cx_bar = vec![None; n];
        for i in sd.non_x() {
            let x = make_xi(&sd, &alg, i)?;
            z_elems[i] = Some(make_zi(&sd, &alg, i, &x)?);
            x_elems[i] = Some(x);
        }
        let pair = |a: &[i64], b: &[i64]| datum.pair_roots(a, b);
        let two_rho = &sd.two_rho_x;

        for i in 0..n {
            let ai = unit_root(n, i);
            let ti = sd.tau[i];
            if sd.in_x[i] {
                report.record("c_i = s_i = 0 on X", Some(i), c[i].is_zero() && s[i].is_zero());
                continue;
            }
            let theta_ai = sd.theta_simple(i);
            report.record("c_i nonzero", Some(i), !c[i].is_zero());
            if ti != i && pair(&ai, &theta_ai) == 0 {
                report.record("c in C: c_i = c_tau(i)", Some(i), c[i] == c[ti]);
            }
            // S: s_j != 0 only for j in I_ns with a_ij in -2N_0 for the rest of I_ns.
            if !s[i].is_zero() {
                let in_ns = sd.ins.contains(&i);
                let even = sd.ins.iter().all(|&k| k == i || (datum.cartan[k][i] <= 0 && datum.cartan[k][i] % 2 == 0));
                report.record("s in S", Some(i), in_ns && even);
            }
            report.record("bar(s_i) = s_i", Some(i), s[i].bar() == s[i]);
            // c_{tau(i)} = q^{(alpha_i, Theta(alpha_i) - 2 rho_X)} bar(c_i)
            let e = pair(&ai, &sub_roots(&theta_ai, two_rho));
            report.record("c_tau(i) = q^(alpha_i, Theta(alpha_i) - 2rho_X) bar(c_i)", Some(i), c[ti] == &datum.q(e) * &c[i].bar());
            // tau_0 assumption
            let tt0 = sd.tau0[sd.tau[i]];
            report.record("c_(tau0 tau(i)) = c_i", Some(i), c[tt0] == c[i]);
            report.record("s_(tau0(i)) = s_i", Some(i), s[sd.tau0[i]] == s[i]);
            report.record("s(tau(i)) = s(tau0(i))", Some(i), sd.sfun[ti] == sd.sfun[sd.tau0[i]]);

            let xi = x_elems[i].as_ref().unwrap();
            let mut rj_ok = true;
            for j in (0..n).filter(|&j| j != ti) {
                rj_ok &= alg.skew_r(j, xi)?.is_zero();
            }
            report.record("r_j(X_i) = 0 for j != tau(i)", Some(i), rj_ok);
            let zi = z_elems[i].as_ref().unwrap();
            let zt = z_elems[ti].as_ref().unwrap();
            // bar(X_i) = -s(i) q^{-(2 rho_X, alpha_i)} T_{w_X}^{-1}(E_{tau(i)})
            let tinv = twx_inv(&sd, &alg, ti)?;
            let xbar = tinv.scaled(&(&-sign(if sd.sfun[i] == 1 { 0 } else { 1 }) * &datum.q(-pair(two_rho, &ai))));
            report.record("bar(X_i) formula", Some(i), alg.bar(xi) == xbar);
            // bar(c_i X_i) via rho_i = c_tau(i) s(i) q^{-(alpha_i, Theta(alpha_i))}
            let rho_i = &(&c[ti] * &Scalar::from_int(sd.sfun[i])) * &datum.q(-pair(&ai, &theta_ai));
            let via_rho = tinv.scaled(&-rho_i);
            let direct = alg.bar(&xi.scaled(&c[i]));
            report.record("bar(c_i X_i) = -rho_i T_wX^-1(E_tau(i))", Some(i), direct == via_rho);
            cx_bar[i] = Some(direct);
            // bar(c_i Z_i) = q^{(alpha_i, alpha_tau(i))} c_tau(i) Z_tau(i)
            let lhs = alg.bar(&zi.scaled(&c[i]));
            let rhs = zt.scaled(&(&datum.q(pair(&ai, &unit_root(n, ti))) * &c[ti]));
            report.record("bar(c_i Z_i) = q^(alpha_i, alpha_tau(i)) c_tau(i) Z_tau(i)", Some(i), lhs == rhs);
            // bar(Z_i) = nu_i q^{(alpha_i, alpha_i - w_X(alpha_i) - 2 rho_X)} Z_tau(i) with nu_i = 1
            let wxai = sd.wx.apply(&ai);
            let e = pair(&ai, &sub_roots(&sub_roots(&ai, &wxai), two_rho));
            report.record("nu_i = 1", Some(i), alg.bar(zi) == zt.scaled(&datum.q(e)));
        }
        let gamma_fund = gamma_on_fundamentals(&sd, &c);
        Ok(QSPParams { satake: sd, alg, c, s, x_elems, z_elems, cx_bar, report, gamma_fund, xi_memo: RwLock::new(HashMap::new()) })
    }

    pub fn rank(&self) -> usize {
        self.satake.rank()
    }

    /// `gamma(i) = c_i s(tau(i))`, and `1` on `X`.
    pub fn gamma_simple(&self, i: usize) -> Scalar {
        gamma_node(&self.satake, &self.c, i)
    }

    /// Values of the extension of `gamma` on the fundamental weights.
    pub fn gamma_fundamental(&self) -> Result<&[Scalar], QspError> {
        self.gamma_fund.as_deref().map_err(Clone::clone)
    }

    /// `gamma(lambda)` for `lambda` in `P` (root coordinates).
    pub fn gamma_eval(&self, lambda: &[Rational64]) -> Result<Scalar, QspError> {
        let fund = self.gamma_fundamental()?;
        let coords = self.satake.datum.fundamental_coords(lambda);
        let mut acc = Scalar::one().with_d(self.satake.datum.d);
        for (g, k) in fund.iter().zip(coords) {
            if !k.is_integer() {
                return Err(QspError::Config(format!("weight {lambda:?} is not in P")));
            }
            acc = &acc * &g.pow(k.to_integer() as i32)?;
        }
        Ok(acc)
    }

    /// `xi(lambda) = gamma(lambda) q^{-(l+, l+) + sum_k (a~_k, a~_k) lambda(varpi_k^vee)}`.
    pub fn xi_eval(&self, lambda: &[Rational64]) -> Result<Scalar, QspError> {
        if let Some(v) = self.xi_memo.read().unwrap().get(lambda) {
            return Ok(v.clone());
        }
        let sd = &self.satake;
        let datum = &sd.datum;
        let n = sd.rank();
        let half = Rational64::new(1, 2);
        let th = sd.theta(lambda);
        let plus: Weight = lambda.iter().zip(&th).map(|(a, b)| (a + b) * half).collect();
        let mut e = -datum.pair(&plus, &plus);
        for k in 0..n {
            let ak: Weight = unit_root(n, k).iter().map(|&x| Rational64::from_integer(x)).collect();
            let tk = sd.theta(&ak);
            let tilde: Weight = ak.iter().zip(&tk).map(|(a, b)| (a - b) * half).collect();
            e += datum.pair(&tilde, &tilde) * lambda[k];
        }
        let v = &self.gamma_eval(lambda)? * &datum.q_pow_r(e)?;
        self.xi_memo.write().unwrap().insert(lambda.to_vec(), v.clone());
        Ok(v)
    }
}

/// Checks every constraint on `(c, s)` and fails with the list of violated ones.
pub fn validate_params(sd: Arc<SatakeDatum>, alg: Arc<FreeAlgebra>, c: Vec<Scalar>, s: Vec<Scalar>) -> Result<QSPParams, QspError> {
    let p = QSPParams::build_unchecked(sd, alg, c, s)?;
    if p.report.ok() {
        Ok(p)
    } else {
        Err(QspError::Constraints(p.report.failures()))
    }
}

/// Parses a config and validates it.
pub fn params_from_config(sd: Arc<SatakeDatum>, alg: Arc<FreeAlgebra>, cfg: &ParamConfig) -> Result<QSPParams, QspError> {
    let (c, s) = cfg.resolve(&sd)?;
    validate_params(sd, alg, c, s)
}

fn gamma_node(sd: &SatakeDatum, c: &[Scalar], i: usize) -> Scalar {
    if sd.in_x[i] {
        Scalar::one().with_d(sd.datum.d)
    } else {
        &c[i] * &Scalar::from_int(sd.sfun[sd.tau[i]])
    }
}

// ---- multiplicative decomposition for extending gamma ----

/// Exponent vector of a nonzero scalar over generators
/// `(-1, v, primes..., coprime squarefree polynomials...)`.
struct Factorization {
    primes: Vec<BigInt>,
    polys: Vec<Poly<BigRational>>,
}

fn derivative(p: &Poly<BigRational>) -> Poly<BigRational> {
    let c = p.coeffs();
    Poly::from_coeffs((1..c.len()).map(|k| &c[k] * BigRational::from_integer(BigInt::from(k))).collect())
}

/// Squarefree parts `s_k` of a monic polynomial `p = prod s_k^k`.
fn squarefree_parts(p: &Poly<BigRational>) -> Vec<Poly<BigRational>> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let mut a = Poly::gcd(p, &derivative(p));
    let mut b = p.div_exact(&a).expect("gcd divides");
    while b.degree().unwrap_or(0) > 0 {
        let g = Poly::gcd(&a, &b);
        let s = b.div_exact(&g).expect("gcd divides");
        if s.degree().unwrap_or(0) > 0 {
            out.push(s);
        }
        a = a.div_exact(&g).expect("gcd divides");
        b = g;
    }
    out
}

fn small_primes(n: &BigInt, out: &mut Vec<BigInt>) -> Result<(), QspError> {
    let mut n = n.abs();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while &p * &p <= n {
        if p > limit {
            return Err(QspError::GammaExtension(format!("constant {n} too large to factor")));
        }
        while (&n % &p).is_zero() {
            if !out.contains(&p) {
                out.push(p.clone());
            }
            n /= &p;
        }
        p += 1;
    }
    if n > BigInt::one() && !out.contains(&n) {
        out.push(n);
    }
    Ok(())
}

fn monic_core(p: &Poly<BigRational>) -> Poly<BigRational> {
    p.shift_down(p.valuation()).monic_parts().1
}

impl Factorization {
    fn new(values: &[Scalar]) -> Result<Self, QspError> {
        let mut primes = Vec::new();
        let mut parts: Vec<Poly<BigRational>> = Vec::new();
        for x in values {
            for p in [x.numer(), x.denom()] {
                let lead = p.lead().cloned().unwrap_or_else(BigRational::one);
                small_primes(lead.numer(), &mut primes)?;
                small_primes(lead.denom(), &mut primes)?;
                parts.extend(squarefree_parts(&monic_core(p)));
            }
        }
        // refine to a pairwise coprime family
        let mut basis: Vec<Poly<BigRational>> = Vec::new();
        for mut p in parts {
            let mut k = 0;
            while k < basis.len() && p.degree().unwrap_or(0) > 0 {
                let g = Poly::gcd(&basis[k], &p);
                if g.degree().unwrap_or(0) == 0 {
                    k += 1;
                    continue;
                }
                let b = basis.remove(k);
                let rest = b.div_exact(&g).unwrap();
                p = p.div_exact(&g).unwrap();
                for q in [g, rest] {
                    if q.degree().unwrap_or(0) > 0 {
                        basis.push(q);
                    }
                }
                k = 0;
            }
            if p.degree().unwrap_or(0) > 0 {
                basis.push(p);
            }
        }
        Ok(Factorization { primes, polys: basis })
    }

    fn len(&self) -> usize {
        2 + self.primes.len() + self.polys.len()
    }

    fn exponents(&self, x: &Scalar) -> Vec<i64> {
        let mut e = vec![0i64; self.len()];
        for (p, sgn) in [(x.numer(), 1i64), (x.denom(), -1i64)] {
            let lead = p.lead().cloned().unwrap_or_else(BigRational::one);
            if lead.is_negative() {
                e[0] += 1;
            }
            e[1] += sgn * p.valuation() as i64;
            for (k, pr) in self.primes.iter().enumerate() {
                for (part, s2) in [(lead.numer().abs(), sgn), (lead.denom().clone(), -sgn)] {
                    let mut m = part;
                    while (&m % pr).is_zero() {
                        m /= pr;
                        e[2 + k] += s2;
                    }
                }
            }
            let mut core = monic_core(p);
            for (k, b) in self.polys.iter().enumerate() {
                while let Some(qt) = core.div_exact(b) {
                    core = qt;
                    e[2 + self.primes.len() + k] += sgn;
                }
            }
        }
        e
    }

    fn value(&self, e: &[i64], d: u32) -> Result<Scalar, QspError> {
        let mut acc = Scalar::v_pow(e[1], d);
        if e[0].is_odd() {
            acc = -acc;
        }
        for (k, p) in self.primes.iter().enumerate() {
            let pk = Scalar::from_rational(BigRational::from_integer(p.clone())).with_d(d);
            acc = &acc * &pk.pow(e[2 + k] as i32)?;
        }
        for (k, p) in self.polys.iter().enumerate() {
            let pk = Scalar::from_poly(p.clone(), d);
            acc = &acc * &pk.pow(e[2 + self.primes.len() + k] as i32)?;
        }
        Ok(acc)
    }
}

/// Extends `gamma` from `Q` to `P` by writing each fundamental weight in
/// simple roots; succeeds when all resulting exponents are integral.
fn gamma_on_fundamentals(sd: &SatakeDatum, c: &[Scalar]) -> Result<Vec<Scalar>, QspError> {
    let n = sd.rank();
    let d = sd.datum.d;
    let vals: Vec<Scalar> = (0..n).map(|i| gamma_node(sd, c, i)).collect();
    if vals.iter().any(|v| v.is_zero()) {
        return Err(QspError::GammaExtension("gamma vanishes on a simple root".into()));
    }
    let fac = Factorization::new(&vals)?;
    let exps: Vec<Vec<i64>> = vals.iter().map(|v| fac.exponents(v)).collect();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let w = sd.datum.fundamental_weight(k)?;
        let mut e = vec![Rational64::zero(); fac.len()];
        for (j, ej) in exps.iter().enumerate() {
            for (t, &x) in ej.iter().enumerate() {
                e[t] += w[j] * x;
            }
        }
        let ints: Option<Vec<i64>> = e.iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect();
        match ints {
            Some(ints) => out.push(fac.value(&ints, d)?),
            None => {
                return Err(QspError::GammaExtension(format!(
                    "gamma(varpi_{}) needs a root of unity or of a field element",
                    k + 1
                )))
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{catalog_entry, r64};

    fn setup(name: &str) -> (Arc<SatakeDatum>, Arc<FreeAlgebra>) {
        let sd = Arc::new(catalog_entry(name).unwrap().build().unwrap());
        let alg = Arc::new(FreeAlgebra::new(sd.datum.clone()));
        (sd, alg)
    }

    #[test]
    fn shipped_defaults_validate() {
        for name in ["A1-split", "A1-split-s", "A2-split", "A2-quasisplit", "A3-X2", "B2-split"] {
            let (sd, alg) = setup(name);
            let p = params_from_config(sd, alg, &default_params(name).unwrap());
            assert!(p.is_ok(), "{name}: {p:?}");
        }
    }

    #[test]
    fn x_i_without_x_is_minus_e() {
        let (sd, alg) = setup("A2-split");
        for i in 0..2 {
            let x = make_xi(&sd, &alg, i).unwrap();
            assert_eq!(x, alg.generator(Side::Plus, i).scaled(&-Scalar::one()));
        }
        let (sd, alg) = setup("A2-quasisplit");
        assert_eq!(make_xi(&sd, &alg, 0).unwrap(), alg.generator(Side::Plus, 1).scaled(&-Scalar::one()));
    }

    #[test]
    fn a3_x1_weight_and_node_in_x() {
        let (sd, alg) = setup("A3-X2");
        let x = make_xi(&sd, &alg, 0).unwrap();
        assert_eq!(x.homogeneous_weight(), Some(&vec![0, 1, 1]));
        assert_eq!(make_xi(&sd, &alg, 1), Err(QspError::NodeInX(2)));
    }

    #[test]
    fn a3_choice_two_gamma_on_fundamentals() {
        let (sd, alg) = setup("A3-X2");
        let p = params_from_config(sd.clone(), alg, &default_params("A3-X2").unwrap()).unwrap();
        let expect = sd.datum.parse_scalar("q^2-1").unwrap();
        assert_eq!(p.gamma_fundamental().unwrap(), &[expect.clone(), expect.clone(), expect]);
    }

    #[test]
    fn a3_choice_one_needs_roots_of_unity() {
        let (sd, alg) = setup("A3-X2");
        let cfg = ParamConfig { c: [("1".into(), "q".into()), ("3".into(), "q".into())].into(), s: BTreeMap::new() };
        let p = params_from_config(sd, alg, &cfg).unwrap();
        assert!(matches!(p.gamma_fundamental(), Err(QspError::GammaExtension(_))));
    }

    #[test]
    fn a1_octau_rejects_q_minus_two() {
        let (sd, alg) = setup("A1-split");
        let cfg = ParamConfig { c: [("1".into(), "q^-2".into())].into(), s: BTreeMap::new() };
        match params_from_config(sd, alg, &cfg) {
            Err(QspError::Constraints(f)) => assert!(f.iter().any(|m| m.starts_with("c_tau(i)"))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn s_outside_ins_rejected() {
        let (sd, alg) = setup("A2-split");
        let cfg = ParamConfig {
            c: [("1".into(), "q^-1".into()), ("2".into(), "q^-1".into())].into(),
            s: [("1".into(), "1".into())].into(),
        };
        match params_from_config(sd, alg, &cfg) {
            Err(QspError::Constraints(f)) => assert!(f.contains(&"s in S (node 1)".to_string()), "{f:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn xi_at_zero_and_simple_root() {
        let (sd, alg) = setup("A1-split");
        let p = params_from_config(sd.clone(), alg, &default_params("A1-split").unwrap()).unwrap();
        assert_eq!(p.xi_eval(&[r64(0)]).unwrap(), Scalar::one());
        // Theta = -id: alpha^+ = 0 and (a~, a~) = (alpha, alpha) = 2.
        let expect = &p.gamma_simple(0) * &sd.datum.q(2);
        assert_eq!(p.xi_eval(&[r64(1)]).unwrap(), expect);
    }

    #[test]
    fn factorization_handles_powers_and_constants() {
        let x = Scalar::parse("4*(q^2-1)^2*q^-3", 2).unwrap();
        let f = Factorization::new(std::slice::from_ref(&x)).unwrap();
        let e = f.exponents(&x);
        assert_eq!(f.value(&e, 2).unwrap(), x);
        let half: Vec<i64> = e.iter().map(|k| k / 2).collect();
        assert_eq!(e[0], 0);
        assert_eq!(e[2], 2);
        assert_eq!(f.value(&half, 2).unwrap().pow(2).unwrap(), x);
    }
}
