//! Truncated multivariate power series with exact rational coefficients.
//!
//! A [`Jet`] of order `N` is an element of `Q[x]/m^(N+1)`. The order is a
//! ledger: every operation reports the highest order at which its result is
//! still exact, given the orders of its inputs.

use crate::basis::{basis, count_upto};
use crate::error::{Error, Result};
use crate::ideal::IdealSpec;
use crate::space::VariableSpace;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Jet {
    space: VariableSpace,
    order: usize,
    coeffs: Vec<Scalar>,
}

impl Jet {
    pub fn zero(space: VariableSpace, order: usize) -> Jet {
        Jet {
            space,
            order,
            coeffs: vec![Scalar::zero(); count_upto(space.dim(), order)],
        }
    }

    pub fn constant(space: VariableSpace, order: usize, c: Scalar) -> Jet {
        let mut j = Jet::zero(space, order);
        j.coeffs[0] = c;
        j
    }

    pub fn one(space: VariableSpace, order: usize) -> Jet {
        Jet::constant(space, order, Scalar::one())
    }

    /// Coordinate function `x_v`.
    pub fn var(space: VariableSpace, order: usize, v: usize) -> Jet {
        let mut e = vec![0u8; space.dim()];
        e[v] = 1;
        Jet::monomial(space, order, &e, Scalar::one())
    }

    pub fn monomial(space: VariableSpace, order: usize, exps: &[u8], c: Scalar) -> Jet {
        let mut j = Jet::zero(space, order);
        j.set_coeff(exps, c);
        j
    }

    pub fn from_terms<'a, I>(space: VariableSpace, order: usize, terms: I) -> Jet
    where
        I: IntoIterator<Item = (&'a [u8], Scalar)>,
    {
        let mut j = Jet::zero(space, order);
        for (e, c) in terms {
            let d: usize = e.iter().map(|&x| x as usize).sum();
            if d <= order {
                let idx = j.index(e);
                j.coeffs[idx] += c;
            }
        }
        j
    }

    pub(crate) fn from_coeffs(space: VariableSpace, order: usize, coeffs: Vec<Scalar>) -> Jet {
        debug_assert_eq!(coeffs.len(), count_upto(space.dim(), order));
        Jet {
            space,
            order,
            coeffs,
        }
    }

    fn index(&self, exps: &[u8]) -> usize {
        assert_eq!(exps.len(), self.space.dim(), "exponent vector length");
        basis(self.space.dim(), self.order)
            .index_of(exps)
            .expect("monomial within order")
    }

    pub fn space(&self) -> VariableSpace {
        self.space
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.space.dim()
    }

    pub(crate) fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, exps: &[u8]) -> Scalar {
        let d: usize = exps.iter().map(|&x| x as usize).sum();
        if d > self.order {
            return Scalar::zero();
        }
        self.coeffs[self.index(exps)].clone()
    }

    /// Terms above the order are dropped.
    pub fn set_coeff(&mut self, exps: &[u8], c: Scalar) {
        if exps.iter().map(|&x| x as usize).sum::<usize>() > self.order {
            return;
        }
        let idx = self.index(exps);
        self.coeffs[idx] = c;
    }

    /// Nonzero terms in graded-lex order.
    pub fn terms(&self) -> Vec<(Vec<u8>, Scalar)> {
        let b = basis(self.nvars(), self.order);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (b.exps[i].clone(), c.clone()))
            .collect()
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeffs[0].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest degree carrying a nonzero coefficient, `order + 1` for zero.
    pub fn valuation(&self) -> usize {
        let b = basis(self.nvars(), self.order);
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| b.degs[i])
            .unwrap_or(self.order + 1)
    }

    /// Largest absolute coefficient (zero for the zero jet).
    pub fn max_abs(&self) -> Scalar {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Scalar::zero)
    }

    /// Drops every term above `order` (no-op if already lower).
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        let len = count_upto(self.nvars(), order);
        Jet::from_coeffs(self.space, order, self.coeffs[..len].to_vec())
    }

    /// Reads this jet as an exact polynomial and records it at a higher order.
    ///
    /// Only valid when the caller knows the higher terms are zero.
    pub fn lift(&self, order: usize) -> Jet {
        if order <= self.order {
            return self.truncate(order);
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(count_upto(self.nvars(), order), Scalar::zero());
        Jet::from_coeffs(self.space, order, coeffs)
    }

    /// Same coefficients over another space of equal dimension.
    pub fn with_space(&self, space: VariableSpace) -> Jet {
        assert_eq!(space.dim(), self.space.dim(), "relabel needs equal dimension");
        Jet {
            space,
            order: self.order,
            coeffs: self.coeffs.clone(),
        }
    }

    fn check_same_space(&self, other: &Jet) {
        assert_eq!(
            self.space, other.space,
            "jets over different spaces combined"
        );
    }

    pub fn scale(&self, c: &Scalar) -> Jet {
        Jet {
            space: self.space,
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add_jet(&self, other: &Jet) -> Jet {
        self.check_same_space(other);
        let order = self.order.min(other.order);
        let len = count_upto(self.nvars(), order);
        let coeffs = (0..len)
            .map(|i| &self.coeffs[i] + &other.coeffs[i])
            .collect();
        Jet::from_coeffs(self.space, order, coeffs)
    }

    pub fn sub_jet(&self, other: &Jet) -> Jet {
        self.check_same_space(other);
        let order = self.order.min(other.order);
        let len = count_upto(self.nvars(), order);
        let coeffs = (0..len)
            .map(|i| &self.coeffs[i] - &other.coeffs[i])
            .collect();
        Jet::from_coeffs(self.space, order, coeffs)
    }

    /// Product with the order ledger
    /// `min(max(oa, ob), oa + val(b), ob + val(a))`.
    pub fn mul_jet(&self, other: &Jet) -> Jet {
        self.check_same_space(other);
        let va = self.valuation();
        let vb = other.valuation();
        let order = self
            .order
            .max(other.order)
            .min(self.order + vb)
            .min(other.order + va);
        self.mul_truncated(other, order)
    }

    /// Product computed up to `order`, without consulting the ledger.
    pub(crate) fn mul_truncated(&self, other: &Jet, order: usize) -> Jet {
        let a = IntJet::from_jet(self);
        let b = IntJet::from_jet(other);
        a.mul_truncated(&b, self.nvars(), order).to_jet(self.space, order)
    }

    /// Strict product: both operands must share space and order; the result
    /// is truncated at that order.
    pub fn try_mul(&self, other: &Jet) -> Result<Jet> {
        if self.space != other.space || self.order != other.order {
            return Err(Error::SpaceMismatch(format!(
                "{} order {} vs {} order {}",
                self.space, self.order, other.space, other.order
            )));
        }
        Ok(self.mul_truncated(other, self.order))
    }

    pub fn pow(&self, k: usize) -> Jet {
        let mut acc = Jet::one(self.space, self.order);
        for _ in 0..k {
            acc = acc.mul_jet(self);
        }
        acc
    }

    /// Multiplies by `x_v^k`, raising the exact order by `k` up to `cap`.
    pub fn mul_var_pow(&self, v: usize, k: usize, cap: usize) -> Jet {
        let order = (self.order + k).min(cap.max(self.order));
        let n = self.nvars();
        let b = basis(n, order);
        let mut out = vec![Scalar::zero(); b.len_upto(order)];
        let src = basis(n, self.order);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() || src.degs[i] + k > order {
                continue;
            }
            let mut e = src.exps[i].clone();
            e[v] += k as u8;
            out[b.index_of(&e).unwrap()] = c.clone();
        }
        Jet::from_coeffs(self.space, order, out)
    }

    /// Partial derivative; the result is exact to `order - 1`.
    pub fn derivative(&self, v: usize) -> Jet {
        let n = self.nvars();
        let order = self.order.saturating_sub(1);
        let b = basis(n, self.order);
        let mut out = vec![Scalar::zero(); b.len_upto(order)];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = b.exps[i][v];
            if e == 0 {
                continue;
            }
            let k = b.dec_index(i, v) as usize;
            if k < out.len() {
                out[k] = c * int(e as i64);
            }
        }
        Jet::from_coeffs(self.space, order, out)
    }

    pub fn gradient(&self) -> Vec<Jet> {
        (0..self.nvars()).map(|v| self.derivative(v)).collect()
    }

    /// Value of `∂_v` at the origin.
    pub fn linear_coeff(&self, v: usize) -> Scalar {
        if self.order == 0 {
            return Scalar::zero();
        }
        self.coeffs[1 + v].clone()
    }

    /// True when no stored monomial involves `x_v`.
    pub fn is_independent_of(&self, v: usize) -> bool {
        let b = basis(self.nvars(), self.order);
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| c.is_zero() || b.exps[i][v] == 0)
    }

    /// Restricts or relabels variables: source variable `v` becomes target
    /// variable `mapping[v]`; variables mapped to `None` are set to zero.
    pub fn select_vars(&self, target: VariableSpace, mapping: &[Option<usize>]) -> Jet {
        assert_eq!(mapping.len(), self.nvars());
        let src = basis(self.nvars(), self.order);
        let dst = basis(target.dim(), self.order);
        let mut out = vec![Scalar::zero(); dst.len_upto(self.order)];
        let mut e = vec![0u8; target.dim()];
        'terms: for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            e.iter_mut().for_each(|x| *x = 0);
            for (v, &p) in src.exps[i].iter().enumerate() {
                if p == 0 {
                    continue;
                }
                match mapping[v] {
                    Some(t) => e[t] += p,
                    None => continue 'terms,
                }
            }
            out[dst.index_of(&e).unwrap()] += c;
        }
        Jet::from_coeffs(target, self.order, out)
    }

    /// Sets `x_v = 0`.
    pub fn set_zero(&self, v: usize) -> Jet {
        let mapping: Vec<Option<usize>> = (0..self.nvars())
            .map(|w| if w == v { None } else { Some(w) })
            .collect();
        self.select_vars(self.space, &mapping)
    }

    /// Inverse of a unit (nonzero constant term), exact to the same order.
    pub fn reciprocal(&self) -> Result<Jet> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::DegenerateDirection("non-unit jet".into()));
        }
        let inv0 = c0.recip();
        // 1/(c0 + r) = inv0 * Σ (-r inv0)^k
        let mut r = self.clone();
        r.coeffs[0] = Scalar::zero();
        let t = r.scale(&-&inv0);
        let mut acc = Jet::one(self.space, self.order);
        let mut term = Jet::one(self.space, self.order);
        for _ in 0..self.order {
            term = term.mul_truncated(&t, self.order);
            if term.is_zero() {
                break;
            }
            acc = acc.add_jet(&term);
        }
        Ok(acc.scale(&inv0))
    }

    pub fn div_unit(&self, unit: &Jet) -> Result<Jet> {
        Ok(self.mul_jet(&unit.reciprocal()?))
    }

    /// Membership in an ideal generated by coordinate functions.
    pub fn in_ideal(&self, ideal: &IdealSpec) -> bool {
        let b = basis(self.nvars(), self.order);
        self.coeffs.iter().enumerate().all(|(i, c)| {
            c.is_zero() || ideal.generators().iter().any(|&g| b.exps[i][g] > 0)
        })
    }

    /// Coefficients `c_0, c_1, ...` of `f = Σ c_k x_v^k`; `c_k` is exact to
    /// `order - k` and does not involve `x_v`.
    pub fn coefficient_expansion(&self, v: usize) -> Vec<Jet> {
        let b = basis(self.nvars(), self.order);
        (0..=self.order)
            .map(|k| {
                let order = self.order - k;
                let len = b.len_upto(order);
                let mut out = vec![Scalar::zero(); len];
                for (i, c) in self.coeffs.iter().enumerate() {
                    if c.is_zero() || b.exps[i][v] as usize != k {
                        continue;
                    }
                    let mut e = b.exps[i].clone();
                    e[v] = 0;
                    let idx = b.index_of(&e).unwrap();
                    if idx < len {
                        out[idx] = c.clone();
                    }
                }
                Jet::from_coeffs(self.space, order, out)
            })
            .collect()
    }

    /// Homogeneous part of degree `d`.
    pub fn homogeneous(&self, d: usize) -> Jet {
        let b = basis(self.nvars(), self.order);
        let mut out = vec![Scalar::zero(); self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            if b.degs[i] == d {
                out[i] = c.clone();
            }
        }
        Jet::from_coeffs(self.space, self.order, out)
    }

    /// Parses expressions such as `x^2 + 2*x*y - 3/2 p1 q1 + (1+y)^3`.
    /// A trailing `+ O(k)`, as printed by `Display`, is accepted when it
    /// does not claim less precision than `order`.
    pub fn parse(space: VariableSpace, order: usize, text: &str) -> Result<Jet> {
        let text = strip_big_o(text, order)?;
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
            space,
            order,
        };
        let j = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Parse(format!(
                "unexpected input at column {}: {:?}",
                p.pos + 1,
                &text[p.pos..]
            )));
        }
        Ok(j)
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.space.var_names();
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let is_const = e.iter().all(|&x| x == 0);
            if is_const || !a.is_one() {
                write!(f, "{a}")?;
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let mut first = true;
            for (v, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                if p == 1 {
                    write!(f, "{}", names[v])?;
                } else {
                    write!(f, "{}^{p}", names[v])?;
                }
            }
        }
        write!(f, " + O({})", self.order + 1)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.add_jet(rhs)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.sub_jet(rhs)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(&-Scalar::one())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    space: VariableSpace,
    order: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!("{msg} at column {}", self.pos + 1)))
    }

    fn expr(&mut self) -> Result<Jet> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Jet> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul_truncated(&self.power()?, self.order);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.number()?;
                    if d.is_zero() {
                        return self.err("division by zero");
                    }
                    acc = acc.scale(&d.recip());
                }
                Some(c) if c.is_ascii_alphanumeric() || c == b'(' => {
                    acc = acc.mul_truncated(&self.power()?, self.order);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Jet> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.number()?;
            if !e.is_integer() || e.is_negative() {
                return self.err("exponent must be a nonnegative integer");
            }
            let k: usize = e
                .to_integer()
                .try_into()
                .map_err(|_| Error::Parse("exponent too large".into()))?;
            let mut acc = Jet::one(self.space, self.order);
            for _ in 0..k {
                acc = acc.mul_truncated(&base, self.order);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Jet> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.number()?;
                Ok(Jet::constant(self.space, self.order, v))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.space.index_of(name) {
                    Some(v) => Ok(Jet::var(self.space, self.order, v)),
                    None => Err(Error::Parse(format!(
                        "unknown variable '{name}' for {} at column {}",
                        self.space,
                        start + 1
                    ))),
                }
            }
            _ => self.err("expected a number, variable or '('"),
        }
    }

    fn number(&mut self) -> Result<Scalar> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: BigInt = s.parse().map_err(|_| Error::Parse("bad integer".into()))?;
        Ok(BigRational::from_integer(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp1() -> VariableSpace {
        VariableSpace::symplectic(1)
    }

    fn q1() -> VariableSpace {
        VariableSpace::quasi(1)
    }

    #[test]
    fn monomial_product() {
        let a = Jet::parse(sp1(), 3, "q1").unwrap();
        let b = Jet::parse(sp1(), 3, "p1").unwrap();
        assert_eq!(a.try_mul(&b).unwrap(), Jet::parse(sp1(), 3, "p1*q1").unwrap());
    }

    #[test]
    fn difference_of_squares() {
        let a = Jet::parse(q1(), 2, "1 + y").unwrap();
        let b = Jet::parse(q1(), 2, "1 - y").unwrap();
        assert_eq!(a.try_mul(&b).unwrap(), Jet::parse(q1(), 2, "1 - y^2").unwrap());
    }

    #[test]
    fn cube_truncated() {
        let a = Jet::parse(q1(), 2, "1 + y").unwrap();
        let c = a.try_mul(&a).unwrap().try_mul(&a).unwrap();
        assert_eq!(c, Jet::parse(q1(), 2, "1 + 3y + 3y^2").unwrap());
    }

    #[test]
    fn strict_product_rejects_mismatch() {
        let a = Jet::parse(q1(), 2, "y").unwrap();
        let b = Jet::parse(q1(), 3, "y").unwrap();
        assert!(matches!(a.try_mul(&b), Err(Error::SpaceMismatch(_))));
        let c = Jet::parse(sp1(), 2, "p1").unwrap();
        assert!(matches!(a.try_mul(&c), Err(Error::SpaceMismatch(_))));
    }

    #[test]
    fn ledger_raises_order_for_high_valuation() {
        let a = Jet::parse(q1(), 4, "y^2").unwrap().truncate(2);
        let b = Jet::parse(q1(), 4, "p1 + y").unwrap();
        // a known to 2 with val 2, b known to 4 with val 1: product known to 3
        assert_eq!(a.mul_jet(&b).order(), 3);
    }

    #[test]
    fn derivative_loses_one_order() {
        let f = Jet::parse(sp1(), 4, "p1^3 q1 + q1^2").unwrap();
        let d = f.derivative(0);
        assert_eq!(d.order(), 3);
        assert_eq!(d, Jet::parse(sp1(), 3, "3 p1^2 q1").unwrap());
    }

    #[test]
    fn reciprocal_of_unit() {
        let u = Jet::parse(q1(), 4, "2 + y + p1 q1").unwrap();
        let r = u.reciprocal().unwrap();
        assert_eq!(u.mul_jet(&r), Jet::one(q1(), 4));
        assert!(Jet::parse(q1(), 4, "y").unwrap().reciprocal().is_err());
    }

    #[test]
    fn ideal_membership_examples() {
        let s = VariableSpace::symplectic(2);
        let i1 = IdealSpec::new(s, 1).unwrap();
        let i2 = IdealSpec::new(s, 2).unwrap();
        assert!(Jet::parse(s, 3, "q1*p2^2").unwrap().in_ideal(&i1));
        assert!(!Jet::parse(s, 3, "p2").unwrap().in_ideal(&i2));
        assert!(Jet::parse(s, 3, "q1 + p1*q2").unwrap().in_ideal(&i2));
    }

    #[test]
    fn coefficient_expansion_examples() {
        let f = Jet::parse(q1(), 3, "p1 + q1*y").unwrap();
        let c = f.coefficient_expansion(0);
        assert_eq!(c.len(), 4);
        assert_eq!(c[0], Jet::parse(q1(), 3, "p1").unwrap());
        assert_eq!(c[1], Jet::parse(q1(), 2, "q1").unwrap());
        assert!(c[2].is_zero());
        assert_eq!(c[2].order(), 1);

        let g = Jet::parse(q1(), 2, "y^2").unwrap().coefficient_expansion(0);
        assert!(g[0].is_zero() && g[1].is_zero());
        assert_eq!(g[2].constant_term(), int(1));

        let h = Jet::parse(q1(), 3, "(1+y)*p1").unwrap().coefficient_expansion(0);
        assert_eq!(h[0], Jet::parse(q1(), 3, "p1").unwrap());
        assert_eq!(h[1], Jet::parse(q1(), 2, "p1").unwrap());
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = Jet::parse(sp1(), 3, "p1 + z").unwrap_err();
        assert!(matches!(e, Error::Parse(ref m) if m.contains("column 6")));
        assert!(Jet::parse(sp1(), 3, "p1 +").is_err());
        assert!(Jet::parse(sp1(), 3, "(p1").is_err());
    }

    #[test]
    fn display_roundtrips_through_parser() {
        let f = Jet::parse(sp1(), 3, "3/2 - p1 + 2 p1 q1^2").unwrap();
        let s = f.to_string();
        assert_eq!(Jet::parse(sp1(), 3, &s).unwrap(), f);
        assert_eq!(Jet::parse(sp1(), 2, &s).unwrap(), f.truncate(2));
        assert!(Jet::parse(sp1(), 4, &s).is_err());
        assert!(Jet::parse(sp1(), 3, "p1 + O(x)").is_err());
    }
}

/// Removes a trailing `+ O(k)` remainder term, checking `k > order`.
fn strip_big_o(text: &str, order: usize) -> Result<&str> {
    let trimmed = text.trim_end();
    let Some(inner) = trimmed.strip_suffix(')') else {
        return Ok(text);
    };
    let Some(at) = inner.rfind("O(") else {
        return Ok(text);
    };
    let Some(body) = inner[..at].trim_end().strip_suffix('+') else {
        return Ok(text);
    };
    let k: usize = inner[at + 2..]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad remainder term {:?}", &trimmed[at..])))?;
    if k <= order {
        return Err(Error::Parse(format!(
            "remainder O({k}) leaves the jet undetermined at order {order}"
        )));
    }
    Ok(body)
}

/// A jet scaled to integer numerators over one shared denominator, so that
/// products and sums avoid per-coefficient gcds.
#[derive(Clone, Debug)]
pub(crate) struct IntJet {
    pub den: BigInt,
    pub nums: Vec<BigInt>,
}

impl IntJet {
    pub fn from_jet(j: &Jet) -> IntJet {
        let mut den = BigInt::one();
        for c in j.coeffs.iter().filter(|c| !c.is_zero()) {
            let d = c.denom();
            if !d.is_one() && !(&den % d).is_zero() {
                den = den.lcm(d);
            }
        }
        let nums = j
            .coeffs
            .iter()
            .map(|c| {
                if c.is_zero() {
                    BigInt::zero()
                } else if c.denom() == &den {
                    c.numer().clone()
                } else {
                    c.numer() * (&den / c.denom())
                }
            })
            .collect();
        IntJet { den, nums }
    }

    pub fn one() -> IntJet {
        IntJet {
            den: BigInt::one(),
            nums: vec![BigInt::one()],
        }
    }

    pub fn mul_truncated(&self, other: &IntJet, nvars: usize, order: usize) -> IntJet {
        let b = basis(nvars, order);
        let len = b.len_upto(order);
        let nz_b: Vec<(usize, &BigInt)> = other
            .nums
            .iter()
            .take(len)
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let mut acc = vec![BigInt::zero(); len];
        for (i, ai) in self.nums.iter().take(len).enumerate() {
            if ai.is_zero() {
                continue;
            }
            let limit = b.len_upto(order - b.degs[i]);
            for &(j, bj) in &nz_b {
                if j >= limit {
                    break;
                }
                acc[b.mul_index(i, j)] += ai * bj;
            }
        }
        IntJet {
            den: &self.den * &other.den,
            nums: acc,
        }
    }

    pub fn to_jet(&self, space: VariableSpace, order: usize) -> Jet {
        let len = count_upto(space.dim(), order);
        let mut coeffs: Vec<Scalar> = self
            .nums
            .iter()
            .take(len)
            .map(|c| {
                if c.is_zero() {
                    Scalar::zero()
                } else {
                    Scalar::new(c.clone(), self.den.clone())
                }
            })
            .collect();
        coeffs.resize(len, Scalar::zero());
        Jet::from_coeffs(space, order, coeffs)
    }
}
