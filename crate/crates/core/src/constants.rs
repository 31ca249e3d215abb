//! The constants ledger: base inputs, every derived constant, and the
//! "linear in M₀" audit.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn max(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Renders `p` or `p/q`.
pub fn q_to_string(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Accepts `p`, `p/q` and finite decimals such as `1.25`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        let v = Q::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    Ok(Q::from_integer(BigInt::from_str(s).map_err(|_| bad())?))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter storing rationals as strings and reading strings or numbers.
pub mod qserde {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&q_to_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let text = match v {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(serde::de::Error::custom(format!("expected rational, got {other}"))),
        };
        parse_q(&text).map_err(serde::de::Error::custom)
    }
}

fn zero() -> Q {
    Q::zero()
}

/// Base inputs of the ledger.  Missing fields in JSON default to 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseConstants {
    #[serde(with = "qserde", default = "zero")]
    pub delta: Q,
    #[serde(with = "qserde", default = "zero")]
    pub k: Q,
    #[serde(with = "qserde", default = "zero")]
    pub m0: Q,
    #[serde(with = "qserde", default = "zero")]
    pub r: Q,
    #[serde(with = "qserde", default = "zero")]
    pub e: Q,
    #[serde(with = "qserde", default = "zero")]
    pub d: Q,
    #[serde(with = "qserde", default = "zero")]
    pub phi: Q,
    #[serde(with = "qserde", default = "zero")]
    pub psi: Q,
    #[serde(with = "qserde", default = "zero")]
    pub aleph: Q,
    #[serde(with = "qserde", default = "zero")]
    pub omega: Q,
    #[serde(with = "qserde", default = "zero")]
    pub l1: Q,
    #[serde(with = "qserde", default = "zero")]
    pub sha: Q,
}

impl Default for BaseConstants {
    fn default() -> Self {
        let z = Q::zero;
        BaseConstants {
            delta: z(),
            k: z(),
            m0: z(),
            r: z(),
            e: z(),
            d: z(),
            phi: z(),
            psi: z(),
            aleph: z(),
            omega: z(),
            l1: z(),
            sha: z(),
        }
    }
}

impl BaseConstants {
    pub fn fields(&self) -> [(&'static str, &Q); 12] {
        [
            ("delta", &self.delta),
            ("K", &self.k),
            ("M0", &self.m0),
            ("R", &self.r),
            ("E", &self.e),
            ("D", &self.d),
            ("Phi", &self.phi),
            ("Psi", &self.psi),
            ("aleph", &self.aleph),
            ("Omega", &self.omega),
            ("L1", &self.l1),
            ("Sha", &self.sha),
        ]
    }
}

/// Every derived constant for one base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedConstants {
    pub base: BaseConstants,
    pub j: Q,
    pub b: Q,
    pub script_r: Q,
    pub c0: Q,
    pub c: Q,
    pub theta1: Q,
    pub d0: Q,
    pub theta: Q,
    pub big_theta: Q,
    pub theta_tilde: Q,
    pub zhe: Q,
    pub c_e: Q,
    pub c_p: Q,
    pub c_g: Q,
    pub m: Q,
    pub l0: Q,
    pub l_short: Q,
    pub l_lift: Q,
    pub l_hyp: Q,
    pub l_min: Q,
    pub a: Q,
    pub l_tilde: Q,
    pub beth: Q,
    pub c1: Q,
    pub c2: Q,
}

/// Separation growth `M(t) = M₀ + 2K + 2t + 4δ + 2`.
pub fn m_of(base: &BaseConstants, t: &Q) -> Q {
    &base.m0 + q(2) * &base.k + q(2) * t + q(4) * &base.delta + q(2)
}

/// Computes the whole ledger.
pub fn derive(base: &BaseConstants) -> Result<DerivedConstants> {
    for (name, v) in base.fields() {
        if v.is_negative() {
            return Err(Error::NegativeInput(name.to_string()));
        }
    }
    let BaseConstants { delta, k, r, e, d, psi, l1, sha, aleph, .. } = base;
    let two = q(2);
    let j = &two * k + q(10) * delta + &two;
    let b = m_of(base, &(&two * k + q(7) * delta + q(1)));
    let script_r = &two * delta + &two * k + d + &two;
    let c0 = &two * &j + (&two * &script_r + q(4)) * max(&b, &j);
    let c = &c0 + &two * &b;
    let theta1 = &two * &b + &j * (&two * delta + k + q(1));
    let d0 = &two * k + q(4) * delta + m_of(base, &(&two * k + q(4) * delta)) + q(1);
    let theta = q(3) * &j * &d0 + &two * &b + &two * &j * (q(3) * delta + q(1));
    let jr_b = &j * r + &b;
    let big_theta = &theta + &two * &jr_b + &j;
    let theta_tilde = max(&big_theta, &(&two * (&jr_b + &big_theta) / q(33)));
    let zhe = q(33) * &theta_tilde;
    let c_e = &zhe + &two * &big_theta;
    let c_p = q(11) * &theta_tilde + &two * &big_theta;
    let c_g = q(22) * &theta_tilde + q(6) * &zhe + &two * &big_theta;
    let m = q(11) * &c_e + q(6) * &c_g + q(5) * &c_p;
    let l0 = q(4) * (&m + &big_theta) + q(1);
    let l_short = max(&max(&l0, &(q(5) * &m)), &(q(14) * &big_theta));
    let l_lift = max(&l_short, &(q(40) * &c_g));
    let l_hyp = l_lift.clone();
    let l_min = max(
        &max(&l_hyp, &(q(30) * &c)),
        &(q(10) * (&two * &jr_b + &two * &j + q(1))),
    );
    let a = max(k, &(q(3) * e)) + q(4) * e + d;
    let l_tilde = max(&max(l1, &(q(100) * &c + sha)), &(q(20) * (&c + e * &j) + sha));
    let beth = &two * aleph + q(27) * e;
    let c1 = &two * &a + q(3) * e + &two * &c + &j * (k + d + &two * e) + psi;
    let c2 = &two * &c1 + &two * d + &two * k;
    Ok(DerivedConstants {
        base: base.clone(),
        j,
        b,
        script_r,
        c0,
        c,
        theta1,
        d0,
        theta,
        big_theta,
        theta_tilde,
        zhe,
        c_e,
        c_p,
        c_g,
        m,
        l0,
        l_short,
        l_lift,
        l_hyp,
        l_min,
        a,
        l_tilde,
        beth,
        c1,
        c2,
    })
}

/// Scalar constants addressable by name.
pub const SCALAR_NAMES: [&str; 25] = [
    "J", "B", "script_R", "C0", "C", "theta1", "D0", "theta", "Theta", "Theta_tilde", "Zhe", "C_e",
    "C_p", "C_g", "m", "L0", "L_short", "L_lift", "L_hyp", "L_min", "A", "L_tilde", "Beth", "c1",
    "c2",
];

impl DerivedConstants {
    pub fn m_at(&self, t: &Q) -> Q {
        m_of(&self.base, t)
    }

    /// `τ(L) = (L/10 − 2(B + J·R)) / J`.
    pub fn tau(&self, l: &Q) -> Q {
        (l / q(10) - q(2) * (&self.b + &self.j * &self.base.r)) / &self.j
    }

    /// Passing-up `c₀(t) = t + 4ℵ + 20E + 2ℶ`.
    pub fn passing_c0(&self, t: &Q) -> Q {
        t + q(4) * &self.base.aleph + q(20) * &self.base.e + q(2) * &self.beth
    }

    /// Passing-up `c₃(t) = c₀(t) + c₂ + 12E + 2`.
    pub fn passing_c3(&self, t: &Q) -> Q {
        self.passing_c0(t) + &self.c2 + q(12) * &self.base.e + q(2)
    }

    /// The spinning threshold widened for the surrogate distances.
    pub fn l_min_widened(&self) -> Q {
        &self.l_min + q(66) * &self.theta
    }

    pub fn get(&self, name: &str) -> Option<&Q> {
        Some(match name {
            "J" => &self.j,
            "B" => &self.b,
            "script_R" => &self.script_r,
            "C0" => &self.c0,
            "C" => &self.c,
            "theta1" => &self.theta1,
            "D0" => &self.d0,
            "theta" => &self.theta,
            "Theta" => &self.big_theta,
            "Theta_tilde" => &self.theta_tilde,
            "Zhe" => &self.zhe,
            "C_e" => &self.c_e,
            "C_p" => &self.c_p,
            "C_g" => &self.c_g,
            "m" => &self.m,
            "L0" => &self.l0,
            "L_short" => &self.l_short,
            "L_lift" => &self.l_lift,
            "L_hyp" => &self.l_hyp,
            "L_min" => &self.l_min,
            "A" => &self.a,
            "L_tilde" => &self.l_tilde,
            "Beth" => &self.beth,
            "c1" => &self.c1,
            "c2" => &self.c2,
            _ => return None,
        })
    }

    /// Rows `(name, value)` in ledger order.
    pub fn rows(&self) -> Vec<(&'static str, Q)> {
        SCALAR_NAMES.iter().map(|&n| (n, self.get(n).expect("known name").clone())).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let base: serde_json::Map<String, serde_json::Value> = self
            .base
            .fields()
            .iter()
            .map(|(n, v)| (n.to_string(), serde_json::Value::String(q_to_string(v))))
            .collect();
        let derived: serde_json::Map<String, serde_json::Value> = self
            .rows()
            .into_iter()
            .map(|(n, v)| (n.to_string(), serde_json::Value::String(q_to_string(&v))))
            .collect();
        serde_json::json!({
            "base": base,
            "derived": derived,
            "L_min_widened": q_to_string(&self.l_min_widened()),
            "tau(L_min)": q_to_string(&self.tau(&self.l_min)),
        })
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("| constant | value | approx |\n|---|---|---|\n");
        for (n, v) in self.base.fields() {
            let _ = writeln!(s, "| {n} | {} | {:.4} |", q_to_string(v), q_to_f64(v));
        }
        for (n, v) in self.rows() {
            let _ = writeln!(s, "| {n} | {} | {:.4} |", q_to_string(&v), q_to_f64(&v));
        }
        s
    }
}

/// One maximal run of collinear samples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    #[serde(with = "qserde")]
    pub from_m0: Q,
    #[serde(with = "qserde")]
    pub to_m0: Q,
    #[serde(with = "qserde")]
    pub slope: Q,
    #[serde(with = "qserde")]
    pub intercept: Q,
}

/// Exact least-squares line through `(M₀, value)` samples plus the
/// collinear segments they split into.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearFit {
    #[serde(with = "qserde")]
    pub slope: Q,
    #[serde(with = "qserde")]
    pub intercept: Q,
    #[serde(with = "qserde")]
    pub max_residual: Q,
    pub segments: Vec<Segment>,
}

fn line_through(x0: &Q, y0: &Q, x1: &Q, y1: &Q) -> (Q, Q) {
    let slope = (y1 - y0) / (x1 - x0);
    let intercept = y0 - &slope * x0;
    (slope, intercept)
}

pub fn check_linear_in_m0(base: &BaseConstants, which: &str, samples: &[Q]) -> Result<LinearFit> {
    if samples.len() < 3 {
        return Err(Error::InsufficientSamples { need: 3, got: samples.len() });
    }
    let mut xs: Vec<Q> = samples.to_vec();
    xs.sort();
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::InsufficientSamples { need: 3, got: xs.len() });
    }
    let ys = xs
        .iter()
        .map(|m0| {
            let b = BaseConstants { m0: m0.clone(), ..base.clone() };
            let d = derive(&b)?;
            d.get(which)
                .cloned()
                .ok_or_else(|| Error::Invalid(format!("unknown constant {which:?}")))
        })
        .collect::<Result<Vec<Q>>>()?;
    let n = q(xs.len() as i64);
    let mx: Q = xs.iter().fold(Q::zero(), |a, x| a + x) / &n;
    let my: Q = ys.iter().fold(Q::zero(), |a, y| a + y) / &n;
    let sxx = xs.iter().fold(Q::zero(), |a, x| a + (x - &mx) * (x - &mx));
    let sxy = xs.iter().zip(&ys).fold(Q::zero(), |a, (x, y)| a + (x - &mx) * (y - &my));
    let slope = sxy / sxx;
    let intercept = &my - &slope * &mx;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (&slope * x + &intercept)).abs())
        .fold(Q::zero(), |a, r| max(&a, &r));
    let mut segments = Vec::new();
    let mut start = 0;
    while start + 1 < xs.len() {
        let (s, c) = line_through(&xs[start], &ys[start], &xs[start + 1], &ys[start + 1]);
        let mut end = start + 1;
        while end + 1 < xs.len() && &s * &xs[end + 1] + &c == ys[end + 1] {
            end += 1;
        }
        segments.push(Segment {
            from_m0: xs[start].clone(),
            to_m0: xs[end].clone(),
            slope: s,
            intercept: c,
        });
        start = end;
    }
    Ok(LinearFit { slope, intercept, max_residual, segments })
}

impl LinearFit {
    pub fn is_affine(&self) -> bool {
        self.max_residual.is_zero()
    }
}
