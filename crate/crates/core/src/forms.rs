//! Differential forms and vector fields with jet coefficients.
//!
//! Forms are stored on strictly increasing index tuples. Contraction puts
//! the vector in the first slot, so `∂p1 ⌟ dp1∧dq1 = dq1`.

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::linalg::{self, Matrix};
use crate::map::{self, MapJet};
use crate::space::VariableSpace;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A differential `k`-form `Σ a_I dx_I`; zero coefficients are not stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormJet {
    space: VariableSpace,
    degree: usize,
    order: usize,
    terms: BTreeMap<Vec<u8>, Jet>,
}

impl FormJet {
    pub fn zero(space: VariableSpace, degree: usize, order: usize) -> FormJet {
        FormJet {
            space,
            degree,
            order,
            terms: BTreeMap::new(),
        }
    }

    /// The 0-form `f`.
    pub fn function(f: &Jet) -> FormJet {
        let mut out = FormJet::zero(f.space(), 0, f.order());
        out.insert(Vec::new(), f.clone());
        out
    }

    /// `dx_v` with constant coefficient, recorded at `order`.
    pub fn dx(space: VariableSpace, order: usize, v: usize) -> FormJet {
        let mut out = FormJet::zero(space, 1, order);
        out.insert(vec![v as u8], Jet::one(space, order));
        out
    }

    /// `df`.
    pub fn differential(f: &Jet) -> FormJet {
        exterior_derivative(&FormJet::function(f))
    }

    /// Builds a form from `(indices, coefficient)` pairs in any index order;
    /// repeated indices give zero and permutations carry their sign.
    pub fn from_terms<I>(space: VariableSpace, degree: usize, order: usize, terms: I) -> Result<FormJet>
    where
        I: IntoIterator<Item = (Vec<usize>, Jet)>,
    {
        let mut out = FormJet::zero(space, degree, order);
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::SpaceMismatch(format!(
                    "index tuple {idx:?} in a {degree}-form"
                )));
            }
            if c.space() != space || idx.iter().any(|&v| v >= space.dim()) {
                return Err(Error::SpaceMismatch(format!("term {idx:?} outside {space}")));
            }
            if let Some((sorted, sign)) = normalize(&idx) {
                let c = if sign { -&c } else { c };
                out.add_term(sorted, &c);
            }
        }
        out.order = out.terms.values().map(Jet::order).fold(order, usize::min);
        out.clamp();
        Ok(out)
    }

    pub fn space(&self) -> VariableSpace {
        self.space
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Order to which every coefficient is exact.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &Jet)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Coefficient of `dx_I` for a strictly increasing `I`.
    pub fn coefficient(&self, idx: &[usize]) -> Jet {
        let key: Vec<u8> = idx.iter().map(|&v| v as u8).collect();
        self.terms
            .get(&key)
            .cloned()
            .unwrap_or_else(|| Jet::zero(self.space, self.order))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn truncate(&self, order: usize) -> FormJet {
        let mut out = self.clone();
        out.order = out.order.min(order);
        out.clamp();
        out
    }

    pub fn lift(&self, order: usize) -> FormJet {
        FormJet {
            space: self.space,
            degree: self.degree,
            order,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.lift(order)))
                .collect(),
        }
    }

    /// Same coefficients over an equal-dimensional space.
    pub fn with_space(&self, space: VariableSpace) -> FormJet {
        FormJet {
            space,
            degree: self.degree,
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.with_space(space)))
                .collect(),
        }
    }

    /// Multiplies every coefficient by the function `f`.
    pub fn scale_by(&self, f: &Jet) -> FormJet {
        let order = product_order(self.order, self.valuation(), f.order(), f.valuation());
        let mut out = FormJet::zero(self.space, self.degree, order);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), &c.mul_truncated(f, order));
        }
        out.clamp();
        out
    }

    /// Lowest valuation among the coefficients, `order + 1` for zero.
    pub fn valuation(&self) -> usize {
        self.terms
            .values()
            .map(Jet::valuation)
            .min()
            .unwrap_or(self.order + 1)
    }

    pub fn scale(&self, c: &Scalar) -> FormJet {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.scale(c);
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    pub fn add(&self, other: &FormJet) -> FormJet {
        assert_eq!(self.space, other.space, "forms over different spaces");
        assert_eq!(self.degree, other.degree, "forms of different degree");
        let mut out = self.clone();
        out.order = self.order.min(other.order);
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v);
        }
        out.clamp();
        out
    }

    pub fn sub(&self, other: &FormJet) -> FormJet {
        self.add(&other.scale(&-Scalar::one()))
    }

    /// Value at the origin on the given tangent vectors.
    pub fn evaluate_at_origin(&self, vectors: &[Vec<Scalar>]) -> Scalar {
        assert_eq!(vectors.len(), self.degree);
        let mut acc = Scalar::zero();
        for (idx, c) in &self.terms {
            let m: Matrix = vectors
                .iter()
                .map(|v| idx.iter().map(|&i| v[i as usize].clone()).collect())
                .collect();
            acc += c.constant_term() * linalg::determinant(&m);
        }
        acc
    }

    /// Matrix `ω_ij = ω(e_i, e_j)` at the origin of a 2-form.
    pub fn matrix_at_origin(&self) -> Matrix {
        assert_eq!(self.degree, 2);
        let n = self.space.dim();
        let mut m = vec![vec![Scalar::zero(); n]; n];
        for (idx, c) in &self.terms {
            let (i, j) = (idx[0] as usize, idx[1] as usize);
            let v = c.constant_term();
            m[j][i] = -&v;
            m[i][j] = v;
        }
        m
    }

    /// Full coefficient matrix `ω_ij` of a 2-form as jets.
    pub fn matrix(&self) -> Vec<Vec<Jet>> {
        assert_eq!(self.degree, 2);
        let n = self.space.dim();
        let mut m = vec![vec![Jet::zero(self.space, self.order); n]; n];
        for (idx, c) in &self.terms {
            let (i, j) = (idx[0] as usize, idx[1] as usize);
            m[j][i] = -c;
            m[i][j] = c.clone();
        }
        m
    }

    /// True when no coefficient involves `x_v` and no term contains `dx_v`.
    pub fn is_free_of(&self, v: usize) -> bool {
        self.terms
            .iter()
            .all(|(k, c)| !k.contains(&(v as u8)) && c.is_independent_of(v))
    }

    /// Restricts or relabels variables as in [`Jet::select_vars`]; terms
    /// containing a dropped differential vanish.
    pub fn select_vars(&self, target: VariableSpace, mapping: &[Option<usize>]) -> FormJet {
        let mut out = FormJet::zero(target, self.degree, self.order);
        for (k, c) in &self.terms {
            let idx: Option<Vec<usize>> = k.iter().map(|&v| mapping[v as usize]).collect();
            let Some(idx) = idx else { continue };
            let c = c.select_vars(target, mapping);
            if let Some((sorted, sign)) = normalize(&idx) {
                let c = if sign { -&c } else { c };
                out.add_term(sorted, &c);
            }
        }
        out.clamp();
        out
    }

    fn insert(&mut self, key: Vec<u8>, c: Jet) {
        if !c.is_zero() {
            self.terms.insert(key, c);
        }
    }

    fn add_term(&mut self, key: Vec<u8>, c: &Jet) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&key) {
            Some(old) => {
                let s = old.add_jet(c);
                if !s.is_zero() {
                    self.terms.insert(key, s);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    /// Truncates all coefficients to the form order and drops zeros.
    fn clamp(&mut self) {
        let order = self.order;
        for v in self.terms.values_mut() {
            if v.order() != order {
                *v = if v.order() > order { v.truncate(order) } else { v.clone() };
            }
        }
        self.terms.retain(|_, v| !v.is_zero());
        if let Some(low) = self.terms.values().map(Jet::order).min() {
            if low < order {
                self.order = low;
                self.clamp();
            }
        }
    }
}

/// Sorts an index tuple; `None` if an index repeats, otherwise the sorted
/// tuple and whether the permutation was odd.
fn normalize(idx: &[usize]) -> Option<(Vec<u8>, bool)> {
    let mut v: Vec<usize> = idx.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v.into_iter().map(|x| x as u8).collect(), odd))
}

/// Sign and merged tuple of `dx_I ∧ dx_J`.
fn merge(a: &[u8], b: &[u8]) -> Option<(Vec<u8>, bool)> {
    let mut odd = false;
    for &x in a {
        for &y in b {
            if x == y {
                return None;
            }
            if x > y {
                odd = !odd;
            }
        }
    }
    let mut m: Vec<u8> = a.iter().chain(b).copied().collect();
    m.sort_unstable();
    Some((m, odd))
}

pub fn exterior_derivative(alpha: &FormJet) -> FormJet {
    let order = alpha.order.saturating_sub(1);
    let mut out = FormJet::zero(alpha.space, alpha.degree + 1, order);
    for (idx, c) in &alpha.terms {
        for v in 0..alpha.space.dim() {
            let Some((key, odd)) = merge(&[v as u8], idx) else { continue };
            let d = c.derivative(v);
            if d.is_zero() {
                continue;
            }
            let d = if odd { -&d } else { d };
            out.add_term(key, &d);
        }
    }
    out.clamp();
    out
}

pub fn wedge(alpha: &FormJet, beta: &FormJet) -> FormJet {
    assert_eq!(alpha.space, beta.space, "wedge of forms over different spaces");
    let order = product_order(alpha.order, alpha.valuation(), beta.order, beta.valuation());
    let mut out = FormJet::zero(alpha.space, alpha.degree + beta.degree, order);
    for (i, a) in &alpha.terms {
        for (j, b) in &beta.terms {
            let Some((key, odd)) = merge(i, j) else { continue };
            let p = a.mul_truncated(b, order);
            out.add_term(key, &if odd { -&p } else { p });
        }
    }
    out.clamp();
    out
}

/// Order ledger of a product, as for jets.
fn product_order(oa: usize, va: usize, ob: usize, vb: usize) -> usize {
    oa.max(ob).min(oa.saturating_add(vb)).min(ob.saturating_add(va))
}

/// Interior product `V ⌟ α`.
pub fn contract(v: &VectorFieldJet, alpha: &FormJet) -> FormJet {
    assert_eq!(v.space, alpha.space, "contraction over different spaces");
    assert!(alpha.degree >= 1, "contraction into a function");
    let vv = v.components.iter().map(Jet::valuation).min().unwrap_or(usize::MAX / 2);
    let order = product_order(alpha.order, alpha.valuation(), v.order(), vv);
    let mut out = FormJet::zero(alpha.space, alpha.degree - 1, order);
    for (idx, c) in &alpha.terms {
        for (r, &i) in idx.iter().enumerate() {
            let comp = &v.components[i as usize];
            if comp.is_zero() {
                continue;
            }
            let p = c.mul_truncated(comp, order);
            let mut rest = idx.clone();
            rest.remove(r);
            out.add_term(rest, &if r % 2 == 1 { -&p } else { p });
        }
    }
    out.clamp();
    out
}

/// `m* α`; coefficients lose one order through the differentials of `m`.
pub fn pullback(m: &MapJet, alpha: &FormJet) -> Result<FormJet> {
    if m.target() != alpha.space {
        return Err(Error::SpaceMismatch(format!(
            "pullback of a form on {} by a map into {}",
            alpha.space,
            m.target()
        )));
    }
    let src = m.source();
    let coeffs: Vec<Jet> = alpha.terms.values().cloned().collect();
    let composed = map::compose_all(&coeffs, m)?;
    let dm: Vec<FormJet> = m.components().iter().map(FormJet::differential).collect();
    let mut acc: Option<FormJet> = None;
    for ((idx, _), c) in alpha.terms.iter().zip(composed) {
        let mut term = FormJet::function(&c);
        for &i in idx {
            term = wedge(&term, &dm[i as usize]);
        }
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    let order = m.order().saturating_sub(1).min(alpha.order);
    Ok(match acc {
        Some(a) => a.truncate(order),
        None => FormJet::zero(src, alpha.degree, order),
    })
}

/// A vector field `Σ V_i ∂_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorFieldJet {
    space: VariableSpace,
    components: Vec<Jet>,
}

impl VectorFieldJet {
    pub fn new(space: VariableSpace, components: Vec<Jet>) -> Result<VectorFieldJet> {
        if components.len() != space.dim() || components.iter().any(|c| c.space() != space) {
            return Err(Error::SpaceMismatch(format!(
                "vector field with {} components on {space}",
                components.len()
            )));
        }
        Ok(VectorFieldJet { space, components })
    }

    /// The coordinate field `∂_v`.
    pub fn coordinate(space: VariableSpace, order: usize, v: usize) -> VectorFieldJet {
        let components = (0..space.dim())
            .map(|w| {
                if w == v {
                    Jet::one(space, order)
                } else {
                    Jet::zero(space, order)
                }
            })
            .collect();
        VectorFieldJet { space, components }
    }

    pub fn space(&self) -> VariableSpace {
        self.space
    }

    pub fn components(&self) -> &[Jet] {
        &self.components
    }

    pub fn order(&self) -> usize {
        self.components.iter().map(Jet::order).min().unwrap_or(usize::MAX)
    }

    pub fn at_origin(&self) -> Vec<Scalar> {
        self.components.iter().map(Jet::constant_term).collect()
    }

    /// Derivative `V(f) = Σ V_i ∂_i f`.
    pub fn apply(&self, f: &Jet) -> Jet {
        let mut acc: Option<Jet> = None;
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = c.mul_jet(&f.derivative(i));
            acc = Some(match acc {
                None => t,
                Some(a) => a.add_jet(&t),
            });
        }
        let order = self.order().min(f.order().saturating_sub(1));
        acc.unwrap_or_else(|| Jet::zero(self.space, order))
    }
}

/// Coordinates in which `V` becomes a coordinate field.
///
/// Returns `Φ` (old coordinates to new) with `V(Φ_i) = δ_{ia}`, where `a`
/// is the first index with `V_a(0) ≠ 0`. The inverse is the Lie-series flow
/// of `V` started on the hyperplane `x_a = 0`.
pub fn rectify(v: &VectorFieldJet) -> Result<(MapJet, usize)> {
    let axis = v
        .components
        .iter()
        .position(|c| !c.constant_term().is_zero())
        .ok_or(Error::SingularAtOrigin)?;
    let space = v.space;
    let order = v.order() + 1;
    let section = map::substitution(space, order, axis, &Jet::zero(space, order));
    let flow = lie_flow(v, &section, axis, &Scalar::one())?;
    Ok((flow.invert()?, axis))
}

/// `V(Φ_i) - δ_{ia}` for each `i`; zero when `Φ` rectifies `V` onto `∂_a`.
pub fn rectify_residual(v: &VectorFieldJet, phi: &MapJet, axis: usize) -> Vec<Jet> {
    phi.components()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let r = v.apply(c);
            if i == axis {
                &r - &Jet::one(r.space(), r.order())
            } else {
                r
            }
        })
        .collect()
}

/// Truncated time-`s·u_t` flow of `V` from a section:
/// `u ↦ Σ_k (s u_t)^k / k! (V^k x) ∘ σ(u)`.
///
/// `section` maps the parameter space into `V`'s space and must not depend
/// on `u_t`.
pub fn lie_flow(v: &VectorFieldJet, section: &MapJet, time: usize, s: &Scalar) -> Result<MapJet> {
    let space = v.space;
    let param = section.source();
    let cap = v.order().saturating_add(1).min(section.order());
    let mut components = Vec::with_capacity(space.dim());
    for i in 0..space.dim() {
        let mut g = Jet::var(space, cap, i);
        let mut acc = map::compose(&g, section)?;
        let mut coef = Scalar::one();
        for k in 1..=cap {
            g = v.apply(&g);
            if g.is_zero() {
                acc = acc.truncate(g.order() + k);
                break;
            }
            coef = coef * s / Scalar::from_integer(k.into());
            let t = map::compose(&g, section)?.scale(&coef).mul_var_pow(time, k, cap);
            acc = acc.add_jet(&t);
        }
        components.push(acc.truncate(cap));
    }
    MapJet::new(param, space, components)
}

/// Pushforward of `V` along `Φ`, written in the target coordinates:
/// `(Φ_* V)_i = V(Φ_i) ∘ Φ^{-1}`.
pub fn pushforward(v: &VectorFieldJet, phi: &MapJet) -> Result<VectorFieldJet> {
    let inv = phi.invert()?;
    let comps = phi
        .components()
        .iter()
        .map(|c| map::compose(&v.apply(c), &inv))
        .collect::<Result<Vec<_>>>()?;
    VectorFieldJet::new(phi.target(), comps)
}

impl fmt::Display for FormJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.space.var_names();
        for (n, (idx, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let diffs: Vec<String> = idx.iter().map(|&i| format!("d{}", names[i as usize])).collect();
            write!(f, "({c}) {}", diffs.join("∧"))?;
        }
        Ok(())
    }
}

impl fmt::Display for VectorFieldJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.space.var_names();
        let parts: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({c}) ∂{}", names[i]))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::int;

    fn s1() -> VariableSpace {
        VariableSpace::symplectic(1)
    }

    fn j(space: VariableSpace, order: usize, t: &str) -> Jet {
        Jet::parse(space, order, t).unwrap()
    }

    fn std_form(space: VariableSpace, order: usize) -> FormJet {
        let terms = space
            .standard_pairs()
            .into_iter()
            .map(|(a, b)| (vec![a, b], Jet::one(space, order)));
        FormJet::from_terms(space, 2, order, terms).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let s = s1();
        let a = FormJet::from_terms(s, 1, 4, [(vec![1], j(s, 4, "p1"))]).unwrap();
        let da = exterior_derivative(&a);
        assert_eq!(da.coefficient(&[0, 1]), j(s, 3, "1"));
        let b = FormJet::from_terms(s, 1, 4, [(vec![0], j(s, 4, "q1 p1"))]).unwrap();
        let db = exterior_derivative(&b);
        assert_eq!(db.coefficient(&[0, 1]), j(s, 3, "-p1"));
        let f = j(s, 5, "p1^3 q1 + 2 q1^2 - p1 q1^4");
        assert!(exterior_derivative(&FormJet::differential(&f)).is_zero());
    }

    #[test]
    fn wedge_examples() {
        let s = s1();
        let dp = FormJet::dx(s, 3, 0);
        let dq = FormJet::dx(s, 3, 1);
        let w = wedge(&dp, &dq);
        let e = |v: usize| {
            let mut x = vec![int(0); 2];
            x[v] = int(1);
            x
        };
        assert_eq!(w.evaluate_at_origin(&[e(0), e(1)]), int(1));
        assert_eq!(wedge(&dq, &dp), w.scale(&int(-1)));
        let s2 = VariableSpace::symplectic(2);
        let om = std_form(s2, 3);
        let sq = wedge(&om, &om);
        assert_eq!(sq.coefficient(&[0, 1, 2, 3]), Jet::constant(s2, 3, int(2)));
    }

    #[test]
    fn contraction_examples() {
        let s = s1();
        let om = std_form(s, 3);
        let c = contract(&VectorFieldJet::coordinate(s, 3, 0), &om);
        assert_eq!(c, FormJet::dx(s, 3, 1));
        let c = contract(&VectorFieldJet::coordinate(s, 3, 1), &om);
        assert_eq!(c, FormJet::dx(s, 3, 0).scale(&int(-1)));
        let k = VariableSpace::constrained(1);
        let om = std_form(k, 3);
        let c = contract(&VectorFieldJet::coordinate(k, 3, 0), &om);
        assert_eq!(c, FormJet::dx(k, 3, 1));
    }

    #[test]
    fn pullback_examples() {
        let s = s1();
        let om = std_form(s, 4);
        let id = MapJet::identity(s, 4);
        assert_eq!(pullback(&id, &om).unwrap(), om.truncate(3));
        let m = MapJet::parse(s, 4, &["2 p1", "q1/2"]).unwrap();
        assert_eq!(pullback(&m, &om).unwrap(), om.truncate(3));
        let m = MapJet::parse(s, 4, &["p1", "2 q1"]).unwrap();
        assert_eq!(pullback(&m, &om).unwrap(), om.scale(&int(2)).truncate(3));
        let wrong = MapJet::identity(VariableSpace::symplectic(2), 4);
        assert!(pullback(&wrong, &om).is_err());
    }

    #[test]
    fn rectify_examples() {
        let k = VariableSpace::constrained(0);
        let v = VectorFieldJet::coordinate(k, 4, 0);
        let (phi, axis) = rectify(&v).unwrap();
        assert_eq!(axis, 0);
        assert!(phi.is_identity());
        let v = VectorFieldJet::new(k, vec![j(k, 4, "2"), j(k, 4, "0")]).unwrap();
        let (phi, _) = rectify(&v).unwrap();
        assert_eq!(phi.truncate(4), MapJet::parse(k, 4, &["x/2", "y"]).unwrap());
        let v = VectorFieldJet::new(k, vec![j(k, 3, "1"), j(k, 3, "x")]).unwrap();
        let (phi, axis) = rectify(&v).unwrap();
        assert!(rectify_residual(&v, &phi, axis).iter().all(Jet::is_zero));
        let zero = VectorFieldJet::new(k, vec![j(k, 3, "y"), j(k, 3, "x")]).unwrap();
        assert!(matches!(rectify(&zero), Err(Error::SingularAtOrigin)));
    }

    #[test]
    fn cartan_rule_on_sample() {
        let s = VariableSpace::symplectic(2);
        let a = FormJet::differential(&j(s, 5, "p1 q2 + q1^2"));
        let b = std_form(s, 5).scale_by(&j(s, 5, "1 + p2"));
        let v = VectorFieldJet::new(
            s,
            vec![j(s, 5, "1 + q1"), j(s, 5, "p2^2"), j(s, 5, "0"), j(s, 5, "p1")],
        )
        .unwrap();
        let lhs = contract(&v, &wedge(&a, &b));
        let rhs = wedge(&contract(&v, &a), &b).sub(&wedge(&a, &contract(&v, &b)));
        assert!(lhs.sub(&rhs).is_zero());
    }
}
