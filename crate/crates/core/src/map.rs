//! Origin-preserving maps between coordinate spaces, at jet level.

use crate::basis::basis;
use crate::error::{Error, Result};
use crate::jet::{IntJet, Jet, Scalar};
use crate::linalg::{self, Matrix};
use crate::space::VariableSpace;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;

/// A map germ `source -> target` written as one jet (over `source`) per
/// target coordinate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MapJet {
    source: VariableSpace,
    target: VariableSpace,
    components: Vec<Jet>,
}

impl MapJet {
    pub fn new(source: VariableSpace, target: VariableSpace, components: Vec<Jet>) -> Result<MapJet> {
        if components.len() != target.dim() {
            return Err(Error::SpaceMismatch(format!(
                "{} components for target {target}",
                components.len()
            )));
        }
        if let Some(c) = components.iter().find(|c| c.space() != source) {
            return Err(Error::SpaceMismatch(format!(
                "component over {} in map from {source}",
                c.space()
            )));
        }
        if components.iter().any(|c| !c.constant_term().is_zero()) {
            return Err(Error::NonOriginPreserving);
        }
        Ok(MapJet {
            source,
            target,
            components,
        })
    }

    /// Self-map of `space`.
    pub fn endo(space: VariableSpace, components: Vec<Jet>) -> Result<MapJet> {
        MapJet::new(space, space, components)
    }

    pub fn identity(space: VariableSpace, order: usize) -> MapJet {
        MapJet {
            source: space,
            target: space,
            components: (0..space.dim()).map(|v| Jet::var(space, order, v)).collect(),
        }
    }

    /// Parses one expression per target coordinate.
    pub fn parse(space: VariableSpace, order: usize, comps: &[&str]) -> Result<MapJet> {
        let components = comps
            .iter()
            .map(|s| Jet::parse(space, order, s))
            .collect::<Result<Vec<_>>>()?;
        MapJet::endo(space, components)
    }

    /// Linear map `x -> M x`.
    pub fn linear(source: VariableSpace, target: VariableSpace, order: usize, m: &Matrix) -> MapJet {
        let components = m
            .iter()
            .map(|row| {
                let mut j = Jet::zero(source, order);
                for (v, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        j = &j + &Jet::var(source, order, v).scale(c);
                    }
                }
                j
            })
            .collect();
        MapJet {
            source,
            target,
            components,
        }
    }

    pub fn source(&self) -> VariableSpace {
        self.source
    }

    pub fn target(&self) -> VariableSpace {
        self.target
    }

    pub fn components(&self) -> &[Jet] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Jet {
        &self.components[i]
    }

    /// Lowest component order.
    pub fn order(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.order())
            .min()
            .unwrap_or(usize::MAX)
    }

    pub fn truncate(&self, order: usize) -> MapJet {
        MapJet {
            source: self.source,
            target: self.target,
            components: self.components.iter().map(|c| c.truncate(order)).collect(),
        }
    }

    pub fn lift(&self, order: usize) -> MapJet {
        MapJet {
            source: self.source,
            target: self.target,
            components: self.components.iter().map(|c| c.lift(order)).collect(),
        }
    }

    /// Jacobian at the origin, rows = target coordinates.
    pub fn linear_part(&self) -> Matrix {
        self.components
            .iter()
            .map(|c| (0..self.source.dim()).map(|v| c.linear_coeff(v)).collect())
            .collect()
    }

    pub fn jacobian(&self) -> Vec<Vec<Jet>> {
        self.components.iter().map(|c| c.gradient()).collect()
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &MapJet) -> Result<MapJet> {
        if inner.target != self.source {
            return Err(Error::SpaceMismatch(format!(
                "compose: inner target {} vs outer source {}",
                inner.target, self.source
            )));
        }
        let components = compose_all(&self.components, inner)?;
        Ok(MapJet {
            source: inner.source,
            target: self.target,
            components,
        })
    }

    /// Inverse by fixed-point iteration `g <- L^-1 (x - h(g))`, where `L` is
    /// the linear part and `h` the nonlinear remainder.
    pub fn invert(&self) -> Result<MapJet> {
        if self.source.dim() != self.target.dim() {
            return Err(Error::SingularLinearPart);
        }
        let order = self.order();
        let l = self.linear_part();
        let linv = linalg::inverse(&l)?;
        let t = self.target;
        let lin_inv = MapJet::linear(t, self.source, order, &linv);
        let nonlinear: Vec<Jet> = self
            .components
            .iter()
            .map(|c| {
                let mut c = c.clone();
                for v in 0..self.source.dim() {
                    let mut e = vec![0u8; self.source.dim()];
                    e[v] = 1;
                    if c.order() >= 1 {
                        c.set_coeff(&e, Scalar::zero());
                    }
                }
                c
            })
            .collect();
        let h = MapJet {
            source: self.source,
            target: self.target,
            components: nonlinear,
        };
        let mut g = lin_inv.clone();
        for _ in 0..order {
            let hg = h.compose(&g)?;
            let diff: Vec<Jet> = (0..t.dim())
                .map(|i| &Jet::var(t, order, i) - hg.component(i))
                .collect();
            let next = lin_inv.compose(&MapJet {
                source: t,
                target: t,
                components: diff,
            })?;
            if next == g {
                break;
            }
            g = next;
        }
        Ok(g)
    }

    /// Components relabelled onto other spaces of equal dimensions.
    pub fn with_spaces(&self, source: VariableSpace, target: VariableSpace) -> MapJet {
        assert_eq!(source.dim(), self.source.dim());
        assert_eq!(target.dim(), self.target.dim());
        MapJet {
            source,
            target,
            components: self.components.iter().map(|c| c.with_space(source)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self
                .components
                .iter()
                .enumerate()
                .all(|(v, c)| *c == Jet::var(self.source, c.order(), v))
    }

    pub(crate) fn from_parts(source: VariableSpace, target: VariableSpace, components: Vec<Jet>) -> MapJet {
        MapJet {
            source,
            target,
            components,
        }
    }
}

impl fmt::Display for MapJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.target.var_names();
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{} -> {c}", names[i])?;
        }
        Ok(())
    }
}

/// `f ∘ m`, exact to `min(order f, order m)`.
pub fn compose(f: &Jet, m: &MapJet) -> Result<Jet> {
    if f.space() != m.target {
        return Err(Error::SpaceMismatch(format!(
            "compose: jet over {} with map into {}",
            f.space(),
            m.target
        )));
    }
    Ok(compose_all(std::slice::from_ref(f), m)?.pop().unwrap())
}

/// Composes several jets with the same map, sharing the power table.
pub(crate) fn compose_all(fs: &[Jet], m: &MapJet) -> Result<Vec<Jet>> {
    if m.components.iter().any(|c| !c.constant_term().is_zero()) {
        return Err(Error::NonOriginPreserving);
    }
    let src = m.source;
    let nt = m.target.dim();
    let morder = m.order();
    let max_f = fs.iter().map(|f| f.order()).max().unwrap_or(0);
    let order = max_f.min(morder);
    let tb = basis(nt, order);
    let len = tb.len_upto(order);
    // powers[i] = m^alpha_i truncated at `order`, built as m^(alpha - e_v) * m_v
    let needed: Vec<bool> = (0..len)
        .map(|i| fs.iter().any(|f| i < f.coeffs().len() && !f.coeffs()[i].is_zero()))
        .collect();
    let mut want = needed.clone();
    for i in (1..len).rev() {
        if want[i] {
            let v = first_var(&tb.exps[i]);
            want[tb.dec_index(i, v) as usize] = true;
        }
    }
    let comps: Vec<IntJet> = m
        .components
        .iter()
        .map(|c| IntJet::from_jet(&c.truncate(order)))
        .collect();
    let ns = src.dim();
    let mut powers: Vec<Option<IntJet>> = vec![None; len];
    powers[0] = Some(IntJet::one());
    for i in 1..len {
        if !want[i] {
            continue;
        }
        let v = first_var(&tb.exps[i]);
        let prev = tb.dec_index(i, v) as usize;
        let p = powers[prev].as_ref().unwrap().mul_truncated(&comps[v], ns, order);
        powers[i] = Some(p);
    }
    // Every power's denominator divides `common`.
    let mut common = BigInt::one();
    for c in &comps {
        if !c.den.is_one() {
            common *= num_traits::pow(c.den.clone(), order);
        }
    }
    Ok(fs
        .iter()
        .map(|f| {
            let o = f.order().min(morder);
            let fi = IntJet::from_jet(f);
            let mut acc = vec![BigInt::zero(); basis(ns, o).len_upto(o)];
            for (i, c) in fi.nums.iter().enumerate().take(len) {
                if c.is_zero() || tb.degs[i] > o {
                    continue;
                }
                let p = powers[i].as_ref().unwrap();
                let scale = if p.den == common {
                    c.clone()
                } else {
                    c * (&common / &p.den)
                };
                for (k, pk) in p.nums.iter().enumerate().take(acc.len()) {
                    if !pk.is_zero() {
                        acc[k] += &scale * pk;
                    }
                }
            }
            IntJet {
                den: &fi.den * &common,
                nums: acc,
            }
            .to_jet(src, o)
        })
        .collect())
}

fn first_var(e: &[u8]) -> usize {
    e.iter().position(|&x| x > 0).unwrap()
}

/// Solves `f(x̂, Y) = rhs` for `Y`, where `Y` replaces variable `var`.
/// The returned jet has zero constant term.
pub fn implicit_solve(f: &Jet, rhs: &Jet, var: usize) -> Result<Jet> {
    if f.space() != rhs.space() {
        return Err(Error::SpaceMismatch("implicit_solve operands".into()));
    }
    let space = f.space();
    let c = f.linear_coeff(var);
    if c.is_zero() {
        return Err(Error::DegenerateDirection(space.var_name(var)));
    }
    if f.constant_term() != rhs.constant_term() {
        return Err(Error::NonOriginPreserving);
    }
    let order = f.order().min(rhs.order());
    let cinv = c.recip();
    let mut y = Jet::zero(space, order);
    for _ in 0..=order {
        let sub = substitution(space, order, var, &y);
        let r = &compose(f, &sub)? - rhs;
        let next = &y - &r.scale(&cinv);
        let next = next.truncate(order);
        if next == y {
            break;
        }
        y = next;
    }
    Ok(y)
}

/// Map replacing `x_var` by `value`, identity elsewhere.
pub fn substitution(space: VariableSpace, order: usize, var: usize, value: &Jet) -> MapJet {
    let components = (0..space.dim())
        .map(|v| {
            if v == var {
                value.truncate(order)
            } else {
                Jet::var(space, order, v)
            }
        })
        .collect();
    MapJet::from_parts(space, space, components)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1() -> VariableSpace {
        VariableSpace::symplectic(1)
    }

    #[test]
    fn compose_examples() {
        let id = MapJet::identity(s1(), 3);
        let f = Jet::parse(s1(), 3, "p1").unwrap();
        assert_eq!(compose(&f, &id).unwrap(), f);

        let m = MapJet::parse(s1(), 3, &["2 p1", "q1/2"]).unwrap();
        let g = Jet::parse(s1(), 3, "p1 q1").unwrap();
        assert_eq!(compose(&g, &m).unwrap(), g);

        let m = MapJet::parse(s1(), 2, &["p1", "q1 + p1"]).unwrap();
        let h = Jet::parse(s1(), 2, "q1^2").unwrap();
        assert_eq!(
            compose(&h, &m).unwrap(),
            Jet::parse(s1(), 2, "q1^2 + 2 p1 q1 + p1^2").unwrap()
        );
    }

    #[test]
    fn compose_rejects_constant_terms() {
        let c = vec![
            Jet::parse(s1(), 2, "1 + p1").unwrap(),
            Jet::parse(s1(), 2, "q1").unwrap(),
        ];
        assert_eq!(MapJet::endo(s1(), c).unwrap_err(), Error::NonOriginPreserving);
    }

    #[test]
    fn invert_examples() {
        let id = MapJet::identity(s1(), 3);
        assert_eq!(id.invert().unwrap(), id);
        let m = MapJet::parse(s1(), 3, &["2 p1", "q1/2"]).unwrap();
        assert_eq!(
            m.invert().unwrap(),
            MapJet::parse(s1(), 3, &["p1/2", "2 q1"]).unwrap()
        );
        let m = MapJet::parse(s1(), 3, &["p1", "q1 + q1^2"]).unwrap();
        assert_eq!(
            m.invert().unwrap(),
            MapJet::parse(s1(), 3, &["p1", "q1 - q1^2 + 2 q1^3"]).unwrap()
        );
        let sing = MapJet::parse(s1(), 3, &["p1", "p1^2"]).unwrap();
        assert_eq!(sing.invert().unwrap_err(), Error::SingularLinearPart);
    }

    #[test]
    fn implicit_solve_examples() {
        let q = VariableSpace::quasi(0);
        let y = Jet::parse(q, 3, "y").unwrap();
        assert_eq!(implicit_solve(&y, &y, 0).unwrap(), y);
        let f = Jet::parse(q, 3, "2y").unwrap();
        assert_eq!(implicit_solve(&f, &y, 0).unwrap(), Jet::parse(q, 3, "y/2").unwrap());
        let f = Jet::parse(q, 3, "y + y^2").unwrap();
        assert_eq!(
            implicit_solve(&f, &y, 0).unwrap(),
            Jet::parse(q, 3, "y - y^2 + 2 y^3").unwrap()
        );
        let f = Jet::parse(q, 3, "y^2").unwrap();
        assert!(matches!(
            implicit_solve(&f, &y, 0),
            Err(Error::DegenerateDirection(_))
        ));
    }
}
