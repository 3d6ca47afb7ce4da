use super::lemma::{isotropy_shape_check_level, lemma1_normalize};
use super::Certificate;
use crate::error::{Error, Result};
use crate::forms::{wedge, FormJet};
use crate::ideal::IdealSpec;
use crate::jet::Jet;
use crate::linalg;
use crate::map::MapJet;
use crate::space::{SpaceKind, VariableSpace};
use crate::symplectic::{darboux_reduce, is_symplectomorphism, standard_form};
use num_traits::Zero;

/// A linear symplectic relabeling of the source: new pair `i` is carried
/// to old pair `perm[i]`, either directly or by `(p, q) ↦ (-q, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Renumeration {
    pub perm: Vec<usize>,
    pub twisted: Vec<bool>,
}

impl Renumeration {
    pub fn identity(n: usize) -> Self {
        Renumeration {
            perm: (0..n).collect(),
            twisted: vec![false; n],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &k)| i == k) && self.twisted.iter().all(|t| !t)
    }

    /// The relabeling as a map from new coordinates to old ones.
    pub fn map(&self, order: usize) -> MapJet {
        let n = self.perm.len();
        let space = VariableSpace::symplectic(n);
        let mut comps = vec![Jet::zero(space, order); 2 * n];
        for (i, (&k, &tw)) in self.perm.iter().zip(&self.twisted).enumerate() {
            let up = Jet::var(space, order, 2 * i);
            let uq = Jet::var(space, order, 2 * i + 1);
            if tw {
                comps[2 * k] = -&uq;
                comps[2 * k + 1] = up;
            } else {
                comps[2 * k] = up;
                comps[2 * k + 1] = uq;
            }
        }
        MapJet::endo(space, comps).expect("relabeling is origin preserving")
    }
}

/// All relabelings after which `∂P_i/∂p_i(0) ≠ 0` and `∂Q_i/∂q_i(0) ≠ 0`,
/// in depth-first order (identity first, untwisted before twisted).
pub fn renumerations(phi: &MapJet) -> Vec<Renumeration> {
    let n = phi.source().n;
    let a = phi.linear_part();
    let mut out = Vec::new();
    let mut cur = Renumeration {
        perm: Vec::new(),
        twisted: Vec::new(),
    };
    let mut used = vec![false; n];
    dfs(&a, n, &mut cur, &mut used, &mut out);
    out
}

fn dfs(a: &linalg::Matrix, n: usize, cur: &mut Renumeration, used: &mut [bool], out: &mut Vec<Renumeration>) {
    let i = cur.perm.len();
    if i == n {
        out.push(cur.clone());
        return;
    }
    for k in 0..n {
        if used[k] {
            continue;
        }
        for tw in [false, true] {
            let (pp, qq) = if tw {
                (&a[2 * i][2 * k + 1], &a[2 * i + 1][2 * k])
            } else {
                (&a[2 * i][2 * k], &a[2 * i + 1][2 * k + 1])
            };
            if pp.is_zero() || qq.is_zero() {
                continue;
            }
            used[k] = true;
            cur.perm.push(k);
            cur.twisted.push(tw);
            dfs(a, n, cur, used, out);
            cur.perm.pop();
            cur.twisted.pop();
            used[k] = false;
        }
    }
}

/// First admissible relabeling, applied: returns `Φ ∘ L` and `L`'s record.
pub fn renumerate(phi: &MapJet) -> Result<(MapJet, Renumeration)> {
    let r = renumerations(phi)
        .into_iter()
        .next()
        .ok_or_else(|| Error::PivotFailure("no pair relabeling gives nonzero diagonal pivots".into()))?;
    Ok((phi.compose(&r.map(phi.order()))?, r))
}

/// Normal form of a diffeomorphism under symplectomorphisms of `dp ∧ dq`.
#[derive(Clone, Debug)]
pub struct NormalFormT1 {
    pub n: usize,
    /// `Ψ` with `Φ ∘ Ψ = normalized`; includes the relabeling.
    pub normalizer: MapJet,
    pub normalized: MapJet,
    /// `Q̃_1, ..., Q̃_n`.
    pub q_tilde: Vec<Jet>,
    /// `P̃_2, ..., P̃_n`.
    pub p_tilde: Vec<Jet>,
    /// Coefficients of `Q̃_i` over the generators of its ideal.
    pub q_split: Vec<Vec<Jet>>,
    /// Coefficients of `P̃_i` over the generators of its ideal.
    pub p_split: Vec<Vec<Jet>>,
    pub renumeration: Renumeration,
    pub certificate: Certificate,
}

impl NormalFormT1 {
    /// `Q̃_1, P̃_2, Q̃_2, ..., P̃_n, Q̃_n`.
    pub fn invariants(&self) -> Vec<Jet> {
        let mut out: Vec<Jet> = self.q_tilde.iter().take(1).cloned().collect();
        for (p, q) in self.p_tilde.iter().zip(self.q_tilde.iter().skip(1)) {
            out.push(p.clone());
            out.push(q.clone());
        }
        out
    }

    pub fn order(&self) -> usize {
        self.normalized.order()
    }

    /// The empty normal form for `n = 0`, certified to `order`.
    pub(crate) fn trivial(order: usize) -> Self {
        let space = VariableSpace::symplectic(0);
        let id = MapJet::identity(space, order);
        NormalFormT1 {
            n: 0,
            normalizer: id.clone(),
            normalized: id,
            q_tilde: Vec::new(),
            p_tilde: Vec::new(),
            q_split: Vec::new(),
            p_split: Vec::new(),
            renumeration: Renumeration::identity(0),
            certificate: Certificate::new(order),
        }
    }
}

/// Reduces `Φ` to `(p1, Q̃1, p2 + P̃2, Q̃2, ...)` with `Q̃_i ∈ I_{2i-1}` and
/// `P̃_i ∈ I_{2i-2}` by a symplectomorphism of the source.
pub fn theorem1_normalize(phi: &MapJet) -> Result<NormalFormT1> {
    let space = phi.source();
    if space.kind != SpaceKind::Symplectic || phi.target() != space {
        return Err(Error::SpaceMismatch(format!(
            "diffeomorphism {} -> {}",
            phi.source(),
            phi.target()
        )));
    }
    if linalg::determinant(&phi.linear_part()).is_zero() {
        return Err(Error::SingularLinearPart);
    }
    // the identity goes first whenever the pairwise transversality holds,
    // so invariants refer to the given coordinates; pivoting relabelings
    // are fallbacks
    let mut candidates = vec![Renumeration::identity(space.n)];
    candidates.extend(renumerations(phi).into_iter().filter(|r| !r.is_identity()));
    let mut last = None;
    for ren in candidates {
        match normalize_with(phi, ren) {
            Ok(nf) => return Ok(nf),
            Err(e @ Error::TransversalityFailure(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one candidate was tried"))
}

fn normalize_with(phi: &MapJet, ren: Renumeration) -> Result<NormalFormT1> {
    let space = phi.source();
    let n = space.n;
    let order = phi.order();
    let mut psi = ren.map(order);
    let mut cur = phi.compose(&psi)?;
    let mut cert = Certificate::new(order);
    for i in 0..n {
        let k = 2 * i;
        let sub = VariableSpace::symplectic(n - i);
        let to_sub: Vec<Option<usize>> = (0..space.dim()).map(|v| v.checked_sub(k)).collect();
        let p = cur.component(k).select_vars(sub, &to_sub);
        let q = cur.component(k + 1).select_vars(sub, &to_sub);
        let b = lemma1_normalize(&p, &q)?.normalizer;
        let from_sub: Vec<Option<usize>> = (0..sub.dim()).map(|j| Some(j + k)).collect();
        let bo = b.order();
        let comps: Vec<Jet> = (0..space.dim())
            .map(|v| {
                if v < k {
                    Jet::var(space, bo, v)
                } else {
                    b.component(v - k).select_vars(space, &from_sub)
                }
            })
            .collect();
        let step = MapJet::endo(space, comps)?;
        if i > 0 {
            cert.push(format!("isotropy shape at pair {}", i + 1), isotropy_shape_check_level(&step, i));
        }
        psi = psi.compose(&step)?;
        cur = cur.compose(&step)?;
    }
    let normalized = cur;
    let o = normalized.order();
    cert.lower_order(o);

    let mut q_tilde = Vec::with_capacity(n);
    let mut p_tilde = Vec::new();
    let mut q_split = Vec::new();
    let mut p_split = Vec::new();
    for i in 0..n {
        let q = normalized.component(2 * i + 1).clone();
        let qi = IdealSpec::new(space, 2 * i + 1)?;
        cert.push(format!("Q{} in {qi}", i + 1), q.in_ideal(&qi));
        cert.push(format!("dQ{}/dq{} nonzero at 0", i + 1, i + 1), !q.linear_coeff(2 * i + 1).is_zero());
        q_split.push(qi.split(&q).unwrap_or_default());
        q_tilde.push(q);
        let p = normalized.component(2 * i);
        let x = Jet::var(space, p.order(), 2 * i);
        if i == 0 {
            cert.push("first component is p1", *p == x);
        } else {
            let pt = p - &x;
            let pi = IdealSpec::new(space, 2 * i)?;
            cert.push(format!("P{} in {pi}", i + 1), pt.in_ideal(&pi));
            p_split.push(pi.split(&pt).unwrap_or_default());
            p_tilde.push(pt);
        }
    }
    let rep = is_symplectomorphism(&psi, &standard_form(space, order + 1))?;
    cert.push("normalizer is symplectic", rep.ok);
    if !cert.all_passed() {
        return Err(Error::CertificationFailure(cert.failures().join("; ")));
    }
    Ok(NormalFormT1 {
        n,
        normalizer: psi,
        normalized,
        q_tilde,
        p_tilde,
        q_split,
        p_split,
        renumeration: ren,
        certificate: cert,
    })
}

/// `ω = dp1 ∧ dQ̄1 + Σ_{i≥2} d(p_i + P̄_i) ∧ dQ̄_i`.
#[derive(Clone, Debug)]
pub struct SymplecticParam {
    pub n: usize,
    /// `Q̄_1, ..., Q̄_n`.
    pub q_bar: Vec<Jet>,
    /// `P̄_2, ..., P̄_n`.
    pub p_bar: Vec<Jet>,
    /// The normal-shaped map `(p1, Q̄1, p2 + P̄2, ...)` pulling `dp ∧ dq`
    /// back to `ω`.
    pub chart: MapJet,
    /// Reconstruction minus the input form.
    pub residual: FormJet,
    pub certificate: Certificate,
}

impl SymplecticParam {
    pub fn reconstruct(&self) -> FormJet {
        reconstruct(&self.chart)
    }
}

fn reconstruct(chart: &MapJet) -> FormJet {
    let space = chart.source();
    let mut acc = FormJet::zero(space, 2, chart.order().saturating_sub(1));
    for i in 0..space.n {
        let a = FormJet::differential(chart.component(2 * i));
        let b = FormJet::differential(chart.component(2 * i + 1));
        acc = acc.add(&wedge(&a, &b));
    }
    acc
}

/// Writes a symplectic form through the normal form of its Darboux chart.
pub fn corollary1_parametrize(omega: &FormJet) -> Result<SymplecticParam> {
    let space = omega.space();
    if space.kind != SpaceKind::Symplectic {
        return Err(Error::SpaceMismatch(format!("symplectic form on {space}")));
    }
    let n = space.n;
    let darboux = darboux_reduce(omega)?;
    let nf = theorem1_normalize(&darboux)?;
    let chart = nf.normalized.invert()?;
    let o = chart.order();
    let mut cert = Certificate::new(o);
    let mut q_bar = Vec::with_capacity(n);
    let mut p_bar = Vec::new();
    for i in 0..n {
        let q = chart.component(2 * i + 1).clone();
        let qi = IdealSpec::new(space, 2 * i + 1)?;
        cert.push(format!("Q{} in {qi}", i + 1), q.in_ideal(&qi));
        cert.push(format!("dQ{}/dq{} nonzero at 0", i + 1, i + 1), !q.linear_coeff(2 * i + 1).is_zero());
        q_bar.push(q);
        let p = chart.component(2 * i);
        let x = Jet::var(space, p.order(), 2 * i);
        if i == 0 {
            cert.push("first component is p1", *p == x);
        } else {
            let pt = p - &x;
            let pi = IdealSpec::new(space, 2 * i)?;
            cert.push(format!("P{} in {pi}", i + 1), pt.in_ideal(&pi));
            p_bar.push(pt);
        }
    }
    let rec = reconstruct(&chart);
    let ro = rec.order().min(omega.order());
    let residual = rec.truncate(ro).sub(&omega.truncate(ro));
    cert.lower_order(ro);
    cert.push("reconstruction equals the form", residual.is_zero());
    if !cert.all_passed() {
        return Err(Error::CertificationFailure(cert.failures().join("; ")));
    }
    Ok(SymplecticParam {
        n,
        q_bar,
        p_bar,
        chart,
        residual,
        certificate: cert,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::int;

    fn j(space: VariableSpace, order: usize, t: &str) -> Jet {
        Jet::parse(space, order, t).unwrap()
    }

    #[test]
    fn renumerate_examples() {
        let s = VariableSpace::symplectic(1);
        let id = MapJet::identity(s, 3);
        let (m, r) = renumerate(&id).unwrap();
        assert!(r.is_identity());
        assert_eq!(m, id);
        let rot = MapJet::parse(s, 3, &["q1", "-p1"]).unwrap();
        let (m, r) = renumerate(&rot).unwrap();
        assert_eq!(r.twisted, vec![true]);
        assert!(m.is_identity());
        let s2 = VariableSpace::symplectic(2);
        let swap = MapJet::parse(s2, 3, &["p2", "q2", "p1", "q1"]).unwrap();
        let (m, r) = renumerate(&swap).unwrap();
        assert_eq!(r.perm, vec![1, 0]);
        assert!(m.is_identity());
        let bad = MapJet::parse(s, 3, &["p1 + q1", "p1 + q1 + q1^2"]).unwrap();
        assert!(renumerations(&bad).len() <= 2);
    }

    #[test]
    fn theorem1_examples() {
        let s = VariableSpace::symplectic(1);
        let nf = theorem1_normalize(&MapJet::identity(s, 4)).unwrap();
        assert!(nf.normalizer.is_identity());
        assert_eq!(nf.q_tilde[0], j(s, 4, "q1"));
        let nf = theorem1_normalize(&MapJet::parse(s, 4, &["2 p1", "q1/2"]).unwrap()).unwrap();
        assert_eq!(nf.q_tilde[0], j(s, 4, "q1"));
        assert_eq!(nf.normalizer, MapJet::parse(s, 4, &["p1/2", "2 q1"]).unwrap());
        let nf = theorem1_normalize(&MapJet::parse(s, 4, &["p1", "2 q1"]).unwrap()).unwrap();
        assert_eq!(nf.q_tilde[0], j(s, 4, "2 q1"));
    }

    #[test]
    fn theorem1_nonlinear_two_pairs() {
        let s = VariableSpace::symplectic(2);
        let phi = MapJet::parse(
            s,
            4,
            &["p1 + q2^2", "q1 + p1 p2", "p2 + q1 q2", "q2 - p1^2 + p2 q1"],
        )
        .unwrap();
        let nf = theorem1_normalize(&phi).unwrap();
        assert!(nf.certificate.all_passed());
        assert_eq!(phi.compose(&nf.normalizer).unwrap(), nf.normalized);
    }

    #[test]
    fn corollary1_examples() {
        let s = VariableSpace::symplectic(1);
        let om = standard_form(s, 4);
        let par = corollary1_parametrize(&om).unwrap();
        assert_eq!(par.q_bar[0].truncate(3), j(s, 3, "q1"));
        let par = corollary1_parametrize(&om.scale(&int(2))).unwrap();
        assert_eq!(par.q_bar[0].truncate(3), j(s, 3, "2 q1"));
        assert!(par.residual.is_zero());
        let s2 = VariableSpace::symplectic(2);
        let om2 = standard_form(s2, 4);
        let par = corollary1_parametrize(&om2).unwrap();
        assert!(par.p_bar[0].is_zero());
    }
}
