use crate::error::{Error, Result};
use crate::ideal::IdealSpec;
use crate::jet::Jet;
use crate::map::{self, MapJet};
use crate::space::{SpaceKind, VariableSpace};
use crate::symplectic::{darboux_pair, is_symplectomorphism, standard_form};

/// Output of [`lemma1_normalize`]: `P ∘ Ψ = p1` and `Q ∘ Ψ ∈ <q1>`.
#[derive(Clone, Debug)]
pub struct Lemma1Result {
    pub normalizer: MapJet,
    pub p: Jet,
    pub q: Jet,
}

/// Brings a pair `(P, Q)` with `{P, Q}(0) ≠ 0` to `P = p1`, `Q ∈ <q1>` by a
/// symplectomorphism of `dp ∧ dq`.
pub fn lemma1_normalize(p: &Jet, q: &Jet) -> Result<Lemma1Result> {
    let space = p.space();
    if space.kind != SpaceKind::Symplectic || space.n == 0 || q.space() != space {
        return Err(Error::SpaceMismatch(format!("pair normalization on {space}")));
    }
    let order = p.order().min(q.order());
    let omega = standard_form(space, order + 1);
    let normalizer = darboux_pair(&omega, p, q)?;
    let p2 = map::compose(p, &normalizer)?;
    let q2 = map::compose(q, &normalizer)?;
    let o = p2.order();
    let q1 = IdealSpec::new(space, 1)?;
    if p2 != Jet::var(space, o, space.p(1))
        || !q2.in_ideal(&q1)
        || q2.linear_coeff(space.q(1)) == num_traits::Zero::zero()
    {
        return Err(Error::CertificationFailure("pair normal form not reached".into()));
    }
    Ok(Lemma1Result {
        normalizer,
        p: p2,
        q: q2,
    })
}

/// Whether `Ψ` fixes `p1, q1` and acts on the remaining pairs by a
/// symplectomorphism independent of `p1, q1`.
pub fn isotropy_shape_check(psi: &MapJet) -> bool {
    isotropy_shape_check_level(psi, 1)
}

/// Same check with the first `fixed` pairs held fixed.
pub fn isotropy_shape_check_level(psi: &MapJet, fixed: usize) -> bool {
    let space = psi.source();
    if psi.target() != space || space.kind != SpaceKind::Symplectic || fixed > space.n {
        return false;
    }
    let k = 2 * fixed;
    let order = psi.order();
    for v in 0..k {
        if *psi.component(v) != Jet::var(space, order, v).truncate(psi.component(v).order()) {
            return false;
        }
    }
    let rest = &psi.components()[k..];
    if rest.iter().any(|c| (0..k).any(|v| !c.is_independent_of(v))) {
        return false;
    }
    let sub = VariableSpace::symplectic(space.n - fixed);
    let mapping: Vec<Option<usize>> = (0..space.dim()).map(|v| v.checked_sub(k)).collect();
    let comps: Vec<Jet> = rest.iter().map(|c| c.select_vars(sub, &mapping)).collect();
    let Ok(reduced) = MapJet::endo(sub, comps) else {
        return false;
    };
    if sub.dim() == 0 {
        return true;
    }
    is_symplectomorphism(&reduced, &standard_form(sub, order + 1))
        .map(|r| r.ok)
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(space: VariableSpace, order: usize, t: &str) -> Jet {
        Jet::parse(space, order, t).unwrap()
    }

    #[test]
    fn lemma1_examples() {
        let s = VariableSpace::symplectic(1);
        let r = lemma1_normalize(&j(s, 4, "p1"), &j(s, 4, "q1")).unwrap();
        assert!(r.normalizer.is_identity());
        assert_eq!(r.q, j(s, 4, "q1"));
        let r = lemma1_normalize(&j(s, 4, "2 p1"), &j(s, 4, "q1")).unwrap();
        assert_eq!(r.q, j(s, 4, "2 q1"));
        assert_eq!(r.normalizer, MapJet::parse(s, 4, &["p1/2", "2 q1"]).unwrap());
        let p = j(s, 4, "p1 + p1^2");
        let q = j(s, 4, "q1 + q1 p1");
        let r = lemma1_normalize(&p, &q).unwrap();
        let om = standard_form(s, 5);
        assert!(is_symplectomorphism(&r.normalizer, &om).unwrap().ok);
        assert_eq!(r.p, j(s, r.p.order(), "p1"));
        assert!(r.q.in_ideal(&IdealSpec::new(s, 1).unwrap()));
        assert!(matches!(
            lemma1_normalize(&j(s, 4, "p1"), &j(s, 4, "p1 + q1^2")),
            Err(Error::TransversalityFailure(_))
        ));
    }

    #[test]
    fn isotropy_examples() {
        let s = VariableSpace::symplectic(2);
        assert!(isotropy_shape_check(&MapJet::identity(s, 4)));
        let m = MapJet::parse(s, 4, &["p1", "q1", "2 p2", "q2/2"]).unwrap();
        assert!(isotropy_shape_check(&m));
        let m = MapJet::parse(s, 4, &["p1", "q1 + p1", "p2", "q2"]).unwrap();
        assert!(!isotropy_shape_check(&m));
        let m = MapJet::parse(s, 4, &["p1", "q1", "p2 + p1^2", "q2"]).unwrap();
        assert!(!isotropy_shape_check(&m));
    }
}
