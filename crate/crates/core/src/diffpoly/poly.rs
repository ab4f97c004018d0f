use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::coeff::{fmt_q, Coeff, Exponent, Q};
use crate::error::{Error, Result};

/// A jet variable: `d_t^t d_x^x field`.
///
/// Ordering is by field symbol, then t-order, then x-order; the parity flag
/// only breaks ties between identically named symbols of different parity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub field: Arc<str>,
    pub t_order: u32,
    pub x_order: u32,
    pub odd: bool,
}

impl Generator {
    pub fn even(field: &str, x_order: u32) -> Self {
        Generator { field: field.into(), t_order: 0, x_order, odd: false }
    }

    pub fn odd(field: &str, x_order: u32) -> Self {
        Generator { field: field.into(), t_order: 0, x_order, odd: true }
    }

    pub fn with_t(mut self, t_order: u32) -> Self {
        self.t_order = t_order;
        self
    }

    pub fn is_zeroth(&self) -> bool {
        self.t_order == 0 && self.x_order == 0
    }

    pub fn raised_x(&self) -> Self {
        Generator { x_order: self.x_order + 1, ..self.clone() }
    }

    pub fn raised_t(&self) -> Self {
        Generator { t_order: self.t_order + 1, ..self.clone() }
    }

    /// Same field at zero derivative order.
    pub fn base(&self) -> Self {
        Generator { t_order: 0, x_order: 0, ..self.clone() }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field)?;
        if self.t_order == 0 && self.x_order == 0 {
            return Ok(());
        }
        f.write_str("_")?;
        for _ in 0..self.t_order {
            f.write_str("t")?;
        }
        match self.x_order {
            0 => Ok(()),
            n @ 1..=4 => f.write_str(&"x".repeat(n as usize)),
            n => write!(f, "{n}x"),
        }
    }
}

/// Canonical monomial without its coefficient: an even part with exponents
/// and a strictly increasing list of distinct odd generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub(crate) even: BTreeMap<Generator, Exponent>,
    pub(crate) odd: Vec<Generator>,
}

impl Monomial {
    pub fn even_part(&self) -> &BTreeMap<Generator, Exponent> {
        &self.even
    }

    pub fn odd_part(&self) -> &[Generator] {
        &self.odd
    }

    pub fn is_odd(&self) -> bool {
        self.odd.len() % 2 == 1
    }

    pub fn generators(&self) -> impl Iterator<Item = &Generator> {
        self.even.keys().chain(self.odd.iter())
    }

    /// Builds a monomial from an arbitrary ordering of odd generators,
    /// returning the sign of the sorting permutation, or `None` if an odd
    /// generator repeats.
    pub fn from_parts(even: BTreeMap<Generator, Exponent>, mut odd: Vec<Generator>) -> Option<(i8, Monomial)> {
        let sign = sort_with_sign(&mut odd)?;
        Some((sign, Monomial { even, odd }))
    }

    fn mul(&self, other: &Monomial) -> Option<(i8, Monomial)> {
        let mut even = self.even.clone();
        for (g, e) in &other.even {
            let sum = match even.get(g) {
                Some(prev) => prev.add(e),
                None => e.clone(),
            };
            if sum.is_zero() {
                even.remove(g);
            } else {
                even.insert(g.clone(), sum);
            }
        }
        let mut odd = Vec::with_capacity(self.odd.len() + other.odd.len());
        odd.extend(self.odd.iter().cloned());
        odd.extend(other.odd.iter().cloned());
        let sign = sort_with_sign(&mut odd)?;
        Some((sign, Monomial { even, odd }))
    }
}

/// Insertion sort counting transpositions; `None` on a repeated element.
fn sort_with_sign(v: &mut [Generator]) -> Option<i8> {
    let mut sign = 1i8;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

fn check_exponent(g: &Generator, e: &Exponent) -> Result<()> {
    if g.is_zeroth() && !g.odd {
        return Ok(());
    }
    match e.as_integer() {
        Some(n) if n > 0 => Ok(()),
        _ => Err(Error::arg(format!("generator `{g}` may only carry a positive integer power, got {e}"))),
    }
}

/// Exact differential polynomial over `Q[params]` with even and odd
/// generators, kept in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GradedPoly {
    pub(crate) terms: BTreeMap<Monomial, Coeff>,
}

impl GradedPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::default(), c);
        p
    }

    pub fn rational(v: Q) -> Self {
        Self::constant(Coeff::constant(v))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Coeff::int(n))
    }

    pub fn param(name: &str) -> Self {
        Self::constant(Coeff::param(name))
    }

    pub fn generator(g: Generator) -> Self {
        if g.odd {
            Self::monomial(Monomial { even: BTreeMap::new(), odd: vec![g] }, Coeff::one())
        } else {
            let mut even = BTreeMap::new();
            even.insert(g, Exponent::int(1));
            Self::monomial(Monomial { even, odd: Vec::new() }, Coeff::one())
        }
    }

    /// `g^e`; odd generators accept only `e = 1` (and vanish for `e >= 2`).
    pub fn power_of(g: Generator, e: Exponent) -> Result<Self> {
        if e.is_zero() {
            return Ok(Self::one());
        }
        if g.odd {
            return match e.as_integer() {
                Some(1) => Ok(Self::generator(g)),
                Some(n) if n >= 2 => Ok(Self::zero()),
                _ => Err(Error::arg(format!("odd generator `{g}` raised to {e}"))),
            };
        }
        check_exponent(&g, &e)?;
        let mut even = BTreeMap::new();
        even.insert(g, e);
        Ok(Self::monomial(Monomial { even, odd: Vec::new() }, Coeff::one()))
    }

    pub fn monomial(m: Monomial, c: Coeff) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                existing.add_assign(&c);
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    /// `Some(true)` if every monomial is odd, `Some(false)` if every one is
    /// even, `None` if mixed. The zero polynomial reports even.
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(Monomial::is_odd);
        let first = it.next().unwrap_or(false);
        it.all(|p| p == first).then_some(first)
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        self.terms.keys().flat_map(|m| m.generators().cloned()).collect()
    }

    pub fn fields(&self) -> BTreeSet<String> {
        self.generators().into_iter().map(|g| g.field.to_string()).collect()
    }

    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (m, c) in &self.terms {
            out.extend(c.params().map(str::to_string));
            for e in m.even.values() {
                out.extend(e.params().map(str::to_string));
            }
        }
        out
    }

    /// Highest x-order at which `field` occurs (with `t_order == 0`).
    pub fn max_x_order(&self, field: &str) -> Option<u32> {
        self.generators().into_iter().filter(|g| &*g.field == field && g.t_order == 0).map(|g| g.x_order).max()
    }

    pub fn has_time_markers(&self) -> bool {
        self.generators().iter().any(|g| g.t_order > 0)
    }

    /// The constant term, if the polynomial is a pure scalar.
    pub fn as_scalar(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => self.terms.get(&Monomial::default()).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, other: &GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GradedPoly) -> GradedPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedPoly {
        GradedPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn scale(&self, c: &Coeff) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.mul(c));
        }
        out
    }

    pub fn scale_q(&self, v: &Q) -> GradedPoly {
        self.scale(&Coeff::constant(v.clone()))
    }

    pub fn mul(&self, other: &GradedPoly) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((sign, m)) = ma.mul(mb) {
                    let c = ca.mul(cb);
                    out.add_term(m, if sign < 0 { c.neg() } else { c });
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> GradedPoly {
        let mut out = GradedPoly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Extends a map on generators to a graded derivation of the given
    /// parity (`odd = true` for a BRST-type operator).
    ///
    /// Leibniz with sign: `D(ab) = D(a) b + (-1)^{|D||a|} a D(b)`.
    pub fn derive<F>(&self, odd: bool, mut image: F) -> Result<GradedPoly>
    where
        F: FnMut(&Generator) -> Result<GradedPoly>,
    {
        let mut cache: BTreeMap<Generator, GradedPoly> = BTreeMap::new();
        let mut lookup = |g: &Generator| -> Result<GradedPoly> {
            if let Some(p) = cache.get(g) {
                return Ok(p.clone());
            }
            let p = image(g)?;
            cache.insert(g.clone(), p.clone());
            Ok(p)
        };

        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            let odd_tail = GradedPoly::monomial(Monomial { even: BTreeMap::new(), odd: m.odd.clone() }, Coeff::one());
            for (g, e) in &m.even {
                let dg = lookup(g)?;
                if dg.is_zero() {
                    continue;
                }
                let mut rest = m.even.clone();
                let lowered = e.minus_one();
                if lowered.is_zero() {
                    rest.remove(g);
                } else {
                    rest.insert(g.clone(), lowered);
                }
                let factor = c.mul(&e.to_coeff());
                let lead = GradedPoly::monomial(Monomial { even: rest, odd: Vec::new() }, factor);
                out = out.add(&lead.mul(&dg).mul(&odd_tail));
            }
            for j in 0..m.odd.len() {
                let dg = lookup(&m.odd[j])?;
                if dg.is_zero() {
                    continue;
                }
                let negate = odd && j % 2 == 1;
                let coeff = if negate { c.neg() } else { c.clone() };
                let head = GradedPoly::monomial(Monomial { even: m.even.clone(), odd: m.odd[..j].to_vec() }, coeff);
                let tail = GradedPoly::monomial(
                    Monomial { even: BTreeMap::new(), odd: m.odd[j + 1..].to_vec() },
                    Coeff::one(),
                );
                out = out.add(&head.mul(&dg).mul(&tail));
            }
        }
        Ok(out)
    }

    /// Total x-derivative with structural prolongation only.
    pub fn dx(&self) -> GradedPoly {
        self.dx_with(&BTreeMap::new())
    }

    /// Total x-derivative; fields in `constrained` use the given image for
    /// the x-derivative of their zeroth-order generator.
    pub fn dx_with(&self, constrained: &BTreeMap<String, GradedPoly>) -> GradedPoly {
        self.derive(false, |g| {
            if g.is_zeroth() {
                if let Some(rule) = constrained.get(&*g.field) {
                    return Ok(rule.clone());
                }
            }
            Ok(GradedPoly::generator(g.raised_x()))
        })
        .expect("structural derivative is total")
    }

    pub fn dx_n(&self, n: u32) -> GradedPoly {
        (0..n).fold(self.clone(), |p, _| p.dx())
    }

    /// Formal t-derivative: every generator gains one t-order marker.
    pub fn dt_formal(&self) -> GradedPoly {
        self.derive(false, |g| Ok(GradedPoly::generator(g.raised_t()))).expect("structural derivative is total")
    }

    /// Left partial derivative with respect to one generator, treating jet
    /// variables as independent. Odd generators pick up the sign of moving
    /// them to the front.
    pub fn partial(&self, g: &Generator) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            if g.odd {
                if let Some(pos) = m.odd.iter().position(|o| o == g) {
                    let mut odd = m.odd.clone();
                    odd.remove(pos);
                    let coeff = if pos % 2 == 1 { c.neg() } else { c.clone() };
                    out.add_term(Monomial { even: m.even.clone(), odd }, coeff);
                }
            } else if let Some(e) = m.even.get(g) {
                let mut even = m.even.clone();
                let lowered = e.minus_one();
                if lowered.is_zero() {
                    even.remove(g);
                } else {
                    even.insert(g.clone(), lowered);
                }
                out.add_term(Monomial { even, odd: m.odd.clone() }, c.mul(&e.to_coeff()));
            }
        }
        out
    }

    /// Replaces generators by polynomials. Generators for which `f` returns
    /// `None` are kept. A replaced even generator must carry a non-negative
    /// integer power.
    pub fn substitute<F>(&self, mut f: F) -> Result<GradedPoly>
    where
        F: FnMut(&Generator) -> Result<Option<GradedPoly>>,
    {
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = GradedPoly::constant(c.clone());
            let mut kept = BTreeMap::new();
            for (g, e) in &m.even {
                match f(g)? {
                    Some(rep) => {
                        let n = e
                            .as_integer()
                            .filter(|n| *n >= 0)
                            .ok_or_else(|| Error::arg(format!("cannot substitute into `{g}^{e}`")))?;
                        acc = acc.mul(&rep.pow(n as u32));
                    }
                    None => {
                        kept.insert(g.clone(), e.clone());
                    }
                }
            }
            acc = acc.mul(&GradedPoly::monomial(Monomial { even: kept, odd: Vec::new() }, Coeff::one()));
            for g in &m.odd {
                let factor = f(g)?.unwrap_or_else(|| GradedPoly::generator(g.clone()));
                acc = acc.mul(&factor);
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Substitutes values for parameters in coefficients and exponents.
    pub fn specialize(&self, values: &BTreeMap<String, Q>) -> Result<GradedPoly> {
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            let mut even = BTreeMap::new();
            for (g, e) in &m.even {
                let e = e.specialize(values);
                if !e.is_zero() {
                    check_exponent(g, &e)?;
                    even.insert(g.clone(), e);
                }
            }
            out.add_term(Monomial { even, odd: m.odd.clone() }, c.specialize(values));
        }
        Ok(out)
    }

    /// Canonical text with a declaration header, re-parseable by
    /// [`super::parse`].
    pub fn to_document(&self) -> String {
        let odd: BTreeSet<String> =
            self.generators().into_iter().filter(|g| g.odd).map(|g| g.field.to_string()).collect();
        let params = self.params();
        let mut s = String::new();
        if !odd.is_empty() {
            s.push_str(&format!("odd: {};\n", odd.into_iter().collect::<Vec<_>>().join(", ")));
        }
        if !params.is_empty() {
            s.push_str(&format!("param: {};\n", params.into_iter().collect::<Vec<_>>().join(", ")));
        }
        s.push_str(&self.to_string());
        s
    }
}

fn fmt_power(g: &Generator, e: &Exponent) -> String {
    if e.is_one() {
        return g.to_string();
    }
    if let Some(c) = e.as_constant() {
        if c.is_integer() {
            return format!("{g}^{}", fmt_q(c));
        }
        return format!("{g}^({})", fmt_q(c));
    }
    if e.constant.is_zero() && e.linear.len() == 1 && e.linear.values().next().is_some_and(|v| v.is_one()) {
        return format!("{g}^{e}");
    }
    format!("{g}^({e})")
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let body: Vec<String> =
                m.even.iter().map(|(g, e)| fmt_power(g, e)).chain(m.odd.iter().map(|g| g.to_string())).collect();
            let body = body.join("*");
            let (neg, mag) = match c.as_constant() {
                Some(v) => {
                    let abs = v.abs();
                    let mag = if body.is_empty() {
                        fmt_q(&abs)
                    } else if abs.is_one() {
                        body
                    } else {
                        format!("{}*{}", fmt_q(&abs), body)
                    };
                    (v.is_negative(), mag)
                }
                None => {
                    let mag = if body.is_empty() { format!("({c})") } else { format!("({c})*{body}") };
                    (c.is_negative_display(), mag)
                }
            };
            match (i, neg) {
                (0, false) => write!(f, "{mag}")?,
                (0, true) => write!(f, "-{mag}")?,
                (_, false) => write!(f, " + {mag}")?,
                (_, true) => write!(f, " - {mag}")?,
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &GradedPoly {
    type Output = GradedPoly;
    fn add(self, rhs: &GradedPoly) -> GradedPoly {
        GradedPoly::add(self, rhs)
    }
}

impl std::ops::Sub for &GradedPoly {
    type Output = GradedPoly;
    fn sub(self, rhs: &GradedPoly) -> GradedPoly {
        GradedPoly::sub(self, rhs)
    }
}

impl std::ops::Mul for &GradedPoly {
    type Output = GradedPoly;
    fn mul(self, rhs: &GradedPoly) -> GradedPoly {
        GradedPoly::mul(self, rhs)
    }
}

impl std::ops::Neg for &GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        GradedPoly::neg(self)
    }
}
