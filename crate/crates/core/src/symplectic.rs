//! Symplectic and quasi-symplectic structures, Hamiltonian fields and
//! constructive Darboux reductions.
//!
//! Conventions: `Z_f ⌟ ω = df` and `{f, g} = dg(Z_f)`, so on `dp ∧ dq` the
//! field of `p1` is `-∂q1`.

use crate::error::{Error, Result};
use crate::forms::{self, exterior_derivative, pullback, FormJet, VectorFieldJet};
use crate::jet::{Jet, Scalar};
use crate::linalg;
use crate::map::{self, MapJet};
use crate::random;
use crate::space::{SpaceKind, VariableSpace};
use num_traits::{One, Zero};
use rand::Rng;

/// `Σ dx_a ∧ dx_b` over the canonical pairs of `space`: `dp∧dq` on
/// symplectic and quasi spaces, `dx∧dy + dp∧dq` on constrained ones.
pub fn standard_form(space: VariableSpace, order: usize) -> FormJet {
    let terms = space
        .standard_pairs()
        .into_iter()
        .map(|(a, b)| (vec![a, b], Jet::one(space, order)));
    FormJet::from_terms(space, 2, order, terms).expect("standard pairs are valid")
}

/// `dp ∧ dq` on `R^{2n}`.
pub fn omega_std(n: usize, order: usize) -> FormJet {
    standard_form(VariableSpace::symplectic(n), order)
}

/// `dx ∧ dy + dp ∧ dq` on `R^{2n+2}`.
pub fn omega_std_plus(n: usize, order: usize) -> FormJet {
    standard_form(VariableSpace::constrained(n), order)
}

/// `dp ∧ dq` on the quasi space `(y, p, q)`.
pub fn omega_hat_std(n: usize, order: usize) -> FormJet {
    standard_form(VariableSpace::quasi(n), order)
}

/// A closed 2-form on an even-dimensional space, non-degenerate at 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticFormJet(FormJet);

impl SymplecticFormJet {
    pub fn new(form: FormJet) -> Result<Self> {
        if !form.space().is_even() || form.degree() != 2 {
            return Err(Error::SpaceMismatch(format!(
                "symplectic form needs a 2-form on an even space, got degree {} on {}",
                form.degree(),
                form.space()
            )));
        }
        check_closed(&form)?;
        let det = linalg::determinant(&form.matrix_at_origin());
        if det.is_zero() {
            return Err(Error::DegenerateForm("determinant vanishes at 0".into()));
        }
        Ok(SymplecticFormJet(form))
    }

    pub fn standard(space: VariableSpace, order: usize) -> Self {
        SymplecticFormJet(standard_form(space, order))
    }

    pub fn form(&self) -> &FormJet {
        &self.0
    }

    pub fn into_form(self) -> FormJet {
        self.0
    }

    pub fn space(&self) -> VariableSpace {
        self.0.space()
    }

    pub fn order(&self) -> usize {
        self.0.order()
    }
}

/// A closed 2-form of rank `2n` at 0 on the quasi space of dimension `2n+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiSymplecticFormJet(FormJet);

impl QuasiSymplecticFormJet {
    pub fn new(form: FormJet) -> Result<Self> {
        let space = form.space();
        if space.is_even() || form.degree() != 2 {
            return Err(Error::SpaceMismatch(format!(
                "quasi-symplectic form needs a 2-form on an odd space, got degree {} on {space}",
                form.degree()
            )));
        }
        check_closed(&form)?;
        let r = linalg::rank(&form.matrix_at_origin());
        if r + 1 != space.dim() {
            return Err(Error::DegenerateForm(format!(
                "rank {r} at 0, expected {}",
                space.dim() - 1
            )));
        }
        Ok(QuasiSymplecticFormJet(form))
    }

    pub fn standard(n: usize, order: usize) -> Self {
        QuasiSymplecticFormJet(omega_hat_std(n, order))
    }

    pub fn form(&self) -> &FormJet {
        &self.0
    }

    pub fn space(&self) -> VariableSpace {
        self.0.space()
    }
}

fn check_closed(form: &FormJet) -> Result<()> {
    if exterior_derivative(form).is_zero() {
        Ok(())
    } else {
        Err(Error::NotClosed)
    }
}

/// The field `Z_f` with `Z_f ⌟ ω = df`, solved over the jet ring.
pub fn hamiltonian_vf(f: &Jet, omega: &FormJet) -> Result<VectorFieldJet> {
    if f.space() != omega.space() {
        return Err(Error::SpaceMismatch("hamiltonian_vf operands".into()));
    }
    let m = omega.matrix();
    let n = m.len();
    // (Z ⌟ ω)_j = Σ_i ω_ij Z_i
    let a: Vec<Vec<Jet>> = (0..n).map(|j| (0..n).map(|i| m[i][j].clone()).collect()).collect();
    let z = linalg::solve_jets(&a, &f.gradient())
        .map_err(|_| Error::DegenerateForm("singular at the origin".into()))?;
    VectorFieldJet::new(f.space(), z)
}

/// `{f, g} = dg(Z_f)`.
pub fn poisson_bracket(f: &Jet, g: &Jet, omega: &FormJet) -> Result<Jet> {
    if g.space() != omega.space() {
        return Err(Error::SpaceMismatch("poisson_bracket operands".into()));
    }
    Ok(hamiltonian_vf(f, omega)?.apply(g))
}

/// Outcome of checking `m* target = source`.
#[derive(Clone, Debug)]
pub struct SymplecticityReport {
    /// `m* target - source`.
    pub residual: FormJet,
    /// Order to which the residual is meaningful.
    pub certified_order: usize,
    pub ok: bool,
}

/// Compares `m* target` against `source`.
pub fn symplecticity(m: &MapJet, target: &FormJet, source: &FormJet) -> Result<SymplecticityReport> {
    let pulled = pullback(m, target)?;
    let residual = pulled.sub(&source.truncate(pulled.order()));
    Ok(SymplecticityReport {
        certified_order: residual.order(),
        ok: residual.is_zero(),
        residual,
    })
}

/// `m* ω = ω` check for a self-map.
pub fn is_symplectomorphism(m: &MapJet, omega: &FormJet) -> Result<SymplecticityReport> {
    symplecticity(m, omega, omega)
}

/// Darboux chart: `Ψ` from standard coordinates with `Ψ* ω = ω_std`.
pub fn darboux_reduce(omega: &FormJet) -> Result<MapJet> {
    let space = omega.space();
    let form = SymplecticFormJet::new(omega.clone())?;
    if space.dim() == 0 {
        return Ok(MapJet::identity(space, omega.order() + 1));
    }
    let order = form.order() + 1;
    let poisson = linalg::inverse(&transpose(&form.form().matrix_at_origin()))?;
    // {x_a, x_b}(0) = (Ω^{-T})_{ba}
    let (a, b) = (0..space.dim())
        .flat_map(|a| (0..space.dim()).map(move |b| (a, b)))
        .find(|&(a, b)| !poisson[b][a].is_zero())
        .expect("non-degenerate form has a nonzero bracket");
    darboux_pair(omega, &Jet::var(space, order, a), &Jet::var(space, order, b))
}

fn transpose(m: &linalg::Matrix) -> linalg::Matrix {
    (0..m.len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Given `{P, Q}(0) ≠ 0`, returns `Ψ` with `Ψ* ω = ω_std`, `P ∘ Ψ = u0`
/// and `Q ∘ Ψ` in the ideal of `u1`.
pub fn darboux_pair(omega: &FormJet, p: &Jet, q: &Jet) -> Result<MapJet> {
    let space = omega.space();
    if p.space() != space || q.space() != space || !space.is_even() || space.dim() == 0 {
        return Err(Error::SpaceMismatch(format!("pair reduction on {space}")));
    }
    let v = hamiltonian_vf(p, omega)?;
    if v.apply(q).constant_term().is_zero() {
        return Err(Error::TransversalityFailure("{P, Q}(0) = 0".into()));
    }
    let order = p.order().min(q.order());
    let chart = chart_with(space, &[p.clone(), q.clone()], order)?;
    let theta = chart.invert()?;
    let slice = map::substitution(space, order, 1, &Jet::zero(space, order));
    let section = theta.compose(&slice)?;
    let phi = forms::lie_flow(&v, &section, 1, &-Scalar::one())?;

    let pulled = pullback(&phi, omega)?;
    let o = pulled.order();
    let split = FormJet::from_terms(space, 2, o, [(vec![0, 1], Jet::one(space, o))])?;
    let rest = pulled.sub(&split);
    if !rest.is_free_of(1) {
        return Err(Error::CertificationFailure(
            "pair reduction left a u1 dependence".into(),
        ));
    }
    let dim = space.dim();
    let quasi = VariableSpace::odd_of_dim(dim - 1);
    let to_quasi: Vec<Option<usize>> = (0..dim)
        .map(|i| match i {
            0 => Some(0),
            1 => None,
            _ => Some(i - 1),
        })
        .collect();
    let omega_hat = rest.select_vars(quasi, &to_quasi);
    let y = Jet::var(quasi, o + 1, 0);
    let a = quasi_darboux(&omega_hat, &y)?;

    let from_quasi: Vec<Option<usize>> = (0..quasi.dim())
        .map(|j| Some(if j == 0 { 0 } else { j + 1 }))
        .collect();
    let ao = a.order();
    let mut comps = Vec::with_capacity(dim);
    for i in 0..dim {
        comps.push(match i {
            0 => a.component(0).select_vars(space, &from_quasi),
            1 => Jet::var(space, ao, 1),
            _ => a.component(i - 1).select_vars(space, &from_quasi),
        });
    }
    let extended = MapJet::endo(space, comps)?;
    phi.compose(&extended)
}

/// Coordinate system `(f_0, ..., f_k, x_c...)` completing the given jets
/// with coordinate functions chosen greedily.
fn chart_with(space: VariableSpace, lead: &[Jet], order: usize) -> Result<MapJet> {
    let dim = space.dim();
    let mut rows: linalg::Matrix = lead
        .iter()
        .map(|f| (0..dim).map(|v| f.linear_coeff(v)).collect())
        .collect();
    for v in 0..dim {
        rows.push((0..dim).map(|w| Scalar::from_integer(((v == w) as i64).into())).collect());
    }
    let chosen = linalg::independent_rows(&rows);
    if chosen.len() < dim || chosen.iter().take(lead.len()).enumerate().any(|(i, &c)| i != c) {
        return Err(Error::TransversalityFailure(
            "differentials are dependent at 0".into(),
        ));
    }
    let comps = chosen
        .into_iter()
        .map(|r| {
            if r < lead.len() {
                lead[r].truncate(order)
            } else {
                Jet::var(space, order, r - lead.len())
            }
        })
        .collect();
    MapJet::endo(space, comps)
}

/// Quasi-Darboux chart: `Ψ` from standard quasi coordinates with
/// `Ψ* ω̂ = dp ∧ dq` and `P ∘ Ψ = y`.
///
/// Requires `dP` to be nonzero on the kernel of `ω̂` at 0.
pub fn quasi_darboux(omega_hat: &FormJet, p: &Jet) -> Result<MapJet> {
    let form = QuasiSymplecticFormJet::new(omega_hat.clone())?;
    let space = form.space();
    if p.space() != space {
        return Err(Error::SpaceMismatch("quasi_darboux operands".into()));
    }
    let dim = space.dim();
    let m = omega_hat.matrix();
    let rows: Vec<Vec<Jet>> = (0..dim).map(|j| (0..dim).map(|i| m[i][j].clone()).collect()).collect();
    let keep = linalg::independent_rows(&linalg::constant_part(&rows));
    let mut a: Vec<Vec<Jet>> = keep.iter().map(|&r| rows[r].clone()).collect();
    a.push(p.gradient());
    let o = omega_hat.order();
    let mut rhs = vec![Jet::zero(space, o); dim - 1];
    rhs.push(Jet::one(space, o));
    let k = linalg::solve_jets(&a, &rhs)
        .map_err(|_| Error::TransversalityFailure("dP vanishes on the kernel at 0".into()))?;
    let kernel = VectorFieldJet::new(space, k)?;

    let order = p.order().min(o + 1);
    let chart = chart_with(space, std::slice::from_ref(p), order)?;
    let theta = chart.invert()?;
    let slice = map::substitution(space, order, 0, &Jet::zero(space, order));
    let section = theta.compose(&slice)?;
    let phi = forms::lie_flow(&kernel, &section, 0, &Scalar::one())?;

    let pulled = pullback(&phi, omega_hat)?;
    if !pulled.is_free_of(0) {
        return Err(Error::CertificationFailure(
            "kernel rectification left a y dependence".into(),
        ));
    }
    let base = VariableSpace::even_of_dim(dim - 1);
    let to_base: Vec<Option<usize>> = (0..dim).map(|i| i.checked_sub(1)).collect();
    let b = darboux_reduce(&pulled.select_vars(base, &to_base))?;
    let from_base: Vec<Option<usize>> = (0..base.dim()).map(|j| Some(j + 1)).collect();
    let mut comps = vec![Jet::var(space, b.order().min(phi.order()), 0)];
    comps.extend(b.components().iter().map(|c| c.select_vars(space, &from_base)));
    phi.compose(&MapJet::endo(space, comps)?)
}

/// Time-one map `x ↦ Σ_k V^k x / k!` of a field vanishing to second order.
pub fn exp_flow(v: &VectorFieldJet, order: usize) -> Result<MapJet> {
    let space = v.space();
    let mut comps = Vec::with_capacity(space.dim());
    for i in 0..space.dim() {
        let mut g = Jet::var(space, order, i);
        let mut acc = g.clone();
        let mut coef = Scalar::one();
        for k in 1..=order {
            g = v.apply(&g);
            if g.is_zero() {
                break;
            }
            coef /= Scalar::from_integer(k.into());
            acc = acc.add_jet(&g.scale(&coef));
        }
        comps.push(acc.truncate(order));
    }
    MapJet::endo(space, comps)
}

/// Random linear symplectic map of the standard form: products of pair
/// scalings and shears generated by nilpotent quadratic Hamiltonians.
pub fn random_linear_symplectic<R: Rng>(rng: &mut R, space: VariableSpace, order: usize) -> Result<MapJet> {
    let omega = standard_form(space, order + 1);
    let pairs = space.standard_pairs();
    let mut m = MapJet::identity(space, order);
    if pairs.is_empty() {
        return Ok(m);
    }
    for _ in 0..2 * pairs.len() {
        let (a, b) = pairs[rng.gen_range(0..pairs.len())];
        let step = if rng.gen_bool(0.3) {
            let c = random::small_scalar(rng);
            let comps = (0..space.dim())
                .map(|v| {
                    let x = Jet::var(space, order, v);
                    if v == a {
                        x.scale(&c)
                    } else if v == b {
                        x.scale(&c.recip())
                    } else {
                        x
                    }
                })
                .collect();
            MapJet::endo(space, comps)?
        } else {
            // H = c x_i x_j with ω-isotropic span, so the flow is unipotent.
            let (i, j) = match rng.gen_range(0..3) {
                0 => (a, a),
                1 => (b, b),
                _ => {
                    let (c, d) = pairs[rng.gen_range(0..pairs.len())];
                    if c == a {
                        (a, a)
                    } else {
                        (a, if rng.gen_bool(0.5) { c } else { d })
                    }
                }
            };
            let c = Scalar::from_integer(rng.gen_range(-2i64..=2).into());
            let h = Jet::var(space, order + 1, i)
                .mul_jet(&Jet::var(space, order + 1, j))
                .scale(&c);
            let v = hamiltonian_vf(&h, &omega)?;
            exp_flow(&v, order)?
        };
        m = m.compose(&step)?;
    }
    Ok(m)
}

/// Random symplectomorphism of the standard form on `space`: time-one maps
/// of Hamiltonians with terms of degree `3..=max_degree`, composed with a
/// random linear symplectic map.
pub fn random_symplectomorphism_in<R: Rng>(
    rng: &mut R,
    space: VariableSpace,
    order: usize,
    max_degree: usize,
) -> Result<MapJet> {
    let omega = standard_form(space, order + 1);
    let mut m = random_linear_symplectic(rng, space, order)?;
    for _ in 0..2 {
        let h = random::random_jet(rng, space, order + 1, 3, max_degree, 0.3);
        if h.is_zero() {
            continue;
        }
        let v = hamiltonian_vf(&h, &omega)?;
        m = m.compose(&exp_flow(&v, order)?)?;
    }
    Ok(m)
}

/// Seeded random symplectomorphism of `ω_std`, exact to `ω`'s order.
pub fn random_symplectomorphism(seed: u64, max_degree: usize, omega: &FormJet) -> Result<MapJet> {
    let space = omega.space();
    if space.kind == SpaceKind::Quasi || *omega != standard_form(space, omega.order()) {
        return Err(Error::SpaceMismatch(
            "random symplectomorphisms are generated for the standard form".into(),
        ));
    }
    let mut rng = random::rng(seed);
    random_symplectomorphism_in(&mut rng, space, omega.order(), max_degree)
}

/// Random closed form `L* ω_std + dα`, with `L` linear symplectic-free and
/// `α` a 1-form with coefficients of degree `2..=order+1`.
pub fn random_closed_form<R: Rng>(rng: &mut R, space: VariableSpace, order: usize) -> Result<FormJet> {
    let dim = space.dim();
    let base = if rng.gen_bool(0.5) {
        standard_form(space, order)
    } else {
        let l = random::random_invertible(rng, dim);
        let lm = MapJet::linear(space, space, order + 1, &l);
        pullback(&lm, &standard_form(space, order + 1))?.truncate(order)
    };
    let alpha = FormJet::from_terms(
        space,
        1,
        order + 1,
        (0..dim).map(|v| (vec![v], random::random_jet(rng, space, order + 1, 2, order + 1, 0.25))),
    )?;
    Ok(base.add(&exterior_derivative(&alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::int;

    fn j(space: VariableSpace, order: usize, t: &str) -> Jet {
        Jet::parse(space, order, t).unwrap()
    }

    #[test]
    fn hamiltonian_field_examples() {
        let s = VariableSpace::symplectic(1);
        let om = omega_std(1, 5);
        let z = hamiltonian_vf(&j(s, 5, "p1"), &om).unwrap();
        assert_eq!(z.components()[0], j(s, 4, "0"));
        assert_eq!(z.components()[1], j(s, 4, "-1"));
        let z = hamiltonian_vf(&j(s, 5, "p1^2/2"), &om).unwrap();
        assert_eq!(z.components()[1], j(s, 4, "-p1"));
        let k = VariableSpace::constrained(1);
        let z = hamiltonian_vf(&j(k, 5, "y"), &omega_std_plus(1, 5)).unwrap();
        assert_eq!(z.at_origin(), vec![int(1), int(0), int(0), int(0)]);
        assert!(z.components()[1..].iter().all(Jet::is_zero));
    }

    #[test]
    fn bracket_examples() {
        let k = VariableSpace::constrained(1);
        let om = omega_std_plus(1, 6);
        let f = j(k, 6, "y");
        let h = j(k, 6, "x^2 + y + p1");
        let fh = poisson_bracket(&f, &h, &om).unwrap();
        assert_eq!(fh, j(k, 5, "2 x"));
        assert_eq!(poisson_bracket(&f, &fh, &om).unwrap(), j(k, 4, "2"));
        let g = j(k, 6, "x p1 + q1^3");
        assert!(poisson_bracket(&g, &g, &om).unwrap().is_zero());
    }

    #[test]
    fn symplectomorphism_examples() {
        let s = VariableSpace::symplectic(1);
        let om = omega_std(1, 5);
        assert!(is_symplectomorphism(&MapJet::identity(s, 5), &om).unwrap().ok);
        let m = MapJet::parse(s, 5, &["2 p1", "q1/2"]).unwrap();
        assert!(is_symplectomorphism(&m, &om).unwrap().ok);
        let m = MapJet::parse(s, 5, &["2 p1", "q1"]).unwrap();
        let rep = is_symplectomorphism(&m, &om).unwrap();
        assert!(!rep.ok);
        assert_eq!(rep.residual, om.truncate(4));
    }

    #[test]
    fn darboux_examples() {
        let s = VariableSpace::symplectic(1);
        let om = omega_std(1, 4);
        assert!(darboux_reduce(&om).unwrap().is_identity());
        let two = om.scale(&int(2));
        let m = darboux_reduce(&two).unwrap();
        assert!(symplecticity(&m, &two, &om).unwrap().ok);
        let a = FormJet::differential(&j(s, 5, "p1 q1"));
        let pert = om.add(&forms::wedge(&a, &FormJet::dx(s, 4, 1)));
        let m = darboux_reduce(&pert).unwrap();
        let rep = symplecticity(&m, &pert, &om).unwrap();
        assert!(rep.ok, "{}", rep.residual);
        let deg = FormJet::from_terms(s, 2, 3, [(vec![0, 1], j(s, 3, "p1"))]).unwrap();
        assert!(matches!(darboux_reduce(&deg), Err(Error::DegenerateForm(_))));
        let open = FormJet::from_terms(s, 2, 3, [(vec![0, 1], j(s, 3, "1"))])
            .unwrap()
            .add(&FormJet::from_terms(s, 2, 3, [(vec![0, 1], j(s, 3, "q1^2"))]).unwrap());
        assert!(darboux_reduce(&open).is_ok());
        let s2 = VariableSpace::symplectic(2);
        let not_closed = FormJet::from_terms(
            s2,
            2,
            4,
            [(vec![0, 1], j(s2, 4, "1 + p2")), (vec![2, 3], j(s2, 4, "1"))],
        )
        .unwrap();
        assert!(matches!(darboux_reduce(&not_closed), Err(Error::NotClosed)));
    }

    #[test]
    fn quasi_darboux_examples() {
        let q = VariableSpace::quasi(1);
        let om = omega_hat_std(1, 4);
        let y = j(q, 5, "y");
        assert!(quasi_darboux(&om, &y).unwrap().is_identity());
        let m = quasi_darboux(&om, &j(q, 5, "2 y")).unwrap();
        assert_eq!(map::compose(&j(q, 5, "2 y"), &m).unwrap(), j(q, 5, "y"));
        let p = j(q, 4, "y + q1^2");
        let m = quasi_darboux(&om, &p).unwrap();
        assert_eq!(map::compose(&p, &m).unwrap(), j(q, 4, "y"));
        assert!(symplecticity(&m, &om, &om).unwrap().ok);
        assert!(matches!(
            quasi_darboux(&om, &j(q, 4, "p1")),
            Err(Error::TransversalityFailure(_))
        ));
    }

    #[test]
    fn random_maps_certify() {
        let s = VariableSpace::symplectic(1);
        let h = j(s, 6, "p1^2");
        let z = hamiltonian_vf(&h, &omega_std(1, 6)).unwrap();
        assert_eq!(exp_flow(&z, 5).unwrap(), MapJet::parse(s, 5, &["p1", "q1 - 2 p1"]).unwrap());
        let om = omega_std(2, 5);
        for seed in 0..4 {
            let m = random_symplectomorphism(seed, 4, &om).unwrap();
            assert!(is_symplectomorphism(&m, &om).unwrap().ok);
        }
    }
}
