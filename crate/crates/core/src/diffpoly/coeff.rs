//! Scalars of the graded engine.
//!
//! Coefficients live in `Q[params]`: exact rationals, optionally polynomial in
//! named parameters such as `beta` or `s`, so that identities can be checked
//! for a whole family at once. Exponents of zeroth-order generators are affine
//! in the same parameters (`T^(beta - 1)`).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub(crate) fn q_to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Product of parameters with positive integer powers, sorted by name.
pub type ParamMonomial = Vec<(String, u32)>;

fn mul_param_monomials(a: &ParamMonomial, b: &ParamMonomial) -> ParamMonomial {
    let mut out: BTreeMap<String, u32> = a.iter().cloned().collect();
    for (p, e) in b {
        *out.entry(p.clone()).or_insert(0) += e;
    }
    out.into_iter().collect()
}

/// Polynomial in named parameters with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coeff {
    terms: BTreeMap<ParamMonomial, Q>,
}

impl Coeff {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(v: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !v.is_zero() {
            terms.insert(Vec::new(), v);
        }
        Coeff { terms }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(q(n))
    }

    pub fn param(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(name.to_string(), 1)], Q::one());
        Coeff { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The value, if no parameter occurs.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().flat_map(|m| m.iter().map(|(p, _)| p.as_str()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamMonomial, &Q)> {
        self.terms.iter()
    }

    pub fn add_assign(&mut self, other: &Coeff) {
        for (m, v) in &other.terms {
            let entry = self.terms.entry(m.clone()).or_insert_with(Q::zero);
            *entry += v;
            if entry.is_zero() {
                self.terms.remove(m);
            }
        }
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn neg(&self) -> Coeff {
        Coeff { terms: self.terms.iter().map(|(m, v)| (m.clone(), -v)).collect() }
    }

    pub fn sub(&self, other: &Coeff) -> Coeff {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        let mut out = Coeff::zero();
        for (ma, va) in &self.terms {
            for (mb, vb) in &other.terms {
                let m = mul_param_monomials(ma, mb);
                let entry = out.terms.entry(m.clone()).or_insert_with(Q::zero);
                *entry += va * vb;
                if entry.is_zero() {
                    out.terms.remove(&m);
                }
            }
        }
        out
    }

    pub fn scale(&self, v: &Q) -> Coeff {
        if v.is_zero() {
            return Coeff::zero();
        }
        Coeff { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * v)).collect() }
    }

    /// Substitutes values for some parameters.
    pub fn specialize(&self, values: &BTreeMap<String, Q>) -> Coeff {
        let mut out = Coeff::zero();
        for (m, v) in &self.terms {
            let mut val = v.clone();
            let mut rest = Vec::new();
            for (p, e) in m {
                match values.get(p) {
                    Some(x) => val *= num_traits::pow(x.clone(), *e as usize),
                    None => rest.push((p.clone(), *e)),
                }
            }
            let mut single = BTreeMap::new();
            if !val.is_zero() {
                single.insert(rest, val);
            }
            out.add_assign(&Coeff { terms: single });
        }
        out
    }

    /// Leading sign used when printing sums: negative iff the first term is.
    pub(crate) fn is_negative_display(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_negative())
    }

    /// Affine view, if the polynomial has degree at most one.
    pub fn to_exponent(&self) -> Option<Exponent> {
        let mut e = Exponent::zero();
        for (m, v) in &self.terms {
            match m.as_slice() {
                [] => e.constant = v.clone(),
                [(p, 1)] => {
                    e.linear.insert(p.clone(), v.clone());
                }
                _ => return None,
            }
        }
        Some(e)
    }
}

fn fmt_param_monomial(m: &ParamMonomial) -> String {
    m.iter().map(|(p, e)| if *e == 1 { p.clone() } else { format!("{p}^{e}") }).collect::<Vec<_>>().join("*")
}

fn fmt_signed_terms<'a>(terms: impl Iterator<Item = (String, &'a Q)>) -> String {
    let mut s = String::new();
    for (i, (body, v)) in terms.enumerate() {
        let neg = v.is_negative();
        let abs = v.abs();
        let mag = if body.is_empty() {
            fmt_q(&abs)
        } else if abs.is_one() {
            body
        } else {
            format!("{}*{}", fmt_q(&abs), body)
        };
        match (i, neg) {
            (0, false) => s.push_str(&mag),
            (0, true) => {
                s.push('-');
                s.push_str(&mag)
            }
            (_, false) => {
                s.push_str(" + ");
                s.push_str(&mag)
            }
            (_, true) => {
                s.push_str(" - ");
                s.push_str(&mag)
            }
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Parameter terms first, the constant last: "2*beta + 1".
        let mut items: Vec<(String, &Q)> =
            self.terms.iter().filter(|(m, _)| !m.is_empty()).map(|(m, v)| (fmt_param_monomial(m), v)).collect();
        if let Some(c) = self.terms.get(&Vec::new()) {
            items.push((String::new(), c));
        }
        f.write_str(&fmt_signed_terms(items.into_iter()))
    }
}

/// Affine exponent `constant + sum(linear[p] * p)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent {
    pub(crate) constant: Q,
    pub(crate) linear: BTreeMap<String, Q>,
}

impl Exponent {
    pub fn zero() -> Self {
        Exponent { constant: Q::zero(), linear: BTreeMap::new() }
    }

    pub fn rational(v: Q) -> Self {
        Exponent { constant: v, linear: BTreeMap::new() }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(q(n))
    }

    pub fn param(name: &str) -> Self {
        let mut linear = BTreeMap::new();
        linear.insert(name.to_string(), Q::one());
        Exponent { constant: Q::zero(), linear }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.linear.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.linear.is_empty() && self.constant.is_one()
    }

    pub fn as_constant(&self) -> Option<&Q> {
        self.linear.is_empty().then_some(&self.constant)
    }

    pub fn as_integer(&self) -> Option<i64> {
        self.as_constant().filter(|c| c.is_integer()).and_then(|c| c.to_integer().to_i64())
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (p, v) in &other.linear {
            let entry = out.linear.entry(p.clone()).or_insert_with(Q::zero);
            *entry += v;
            if entry.is_zero() {
                out.linear.remove(p);
            }
        }
        out
    }

    pub fn minus_one(&self) -> Exponent {
        self.add(&Exponent::int(-1))
    }

    pub fn scale_int(&self, n: i64) -> Exponent {
        if n == 0 {
            return Exponent::zero();
        }
        let f = q(n);
        Exponent {
            constant: &self.constant * &f,
            linear: self.linear.iter().map(|(p, v)| (p.clone(), v * &f)).collect(),
        }
    }

    pub fn to_coeff(&self) -> Coeff {
        let mut c = Coeff::constant(self.constant.clone());
        for (p, v) in &self.linear {
            c.add_assign(&Coeff::param(p).scale(v));
        }
        c
    }

    pub fn specialize(&self, values: &BTreeMap<String, Q>) -> Exponent {
        let mut out = Exponent::rational(self.constant.clone());
        for (p, v) in &self.linear {
            match values.get(p) {
                Some(x) => out.constant += v * x,
                None => {
                    out.linear.insert(p.clone(), v.clone());
                }
            }
        }
        out
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.linear.keys().map(|s| s.as_str())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<(String, &Q)> = self.linear.iter().map(|(p, v)| (p.clone(), v)).collect();
        if !self.constant.is_zero() {
            items.push((String::new(), &self.constant));
        }
        f.write_str(&fmt_signed_terms(items.into_iter()))
    }
}
