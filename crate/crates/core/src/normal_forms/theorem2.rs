use super::theorem1::{theorem1_normalize, NormalFormT1};
use super::Certificate;
use crate::error::{Error, Result};
use crate::forms::{pullback, wedge, FormJet};
use crate::jet::{frac, Jet, Scalar};
use crate::linalg;
use crate::map::{self, implicit_solve, MapJet};
use crate::space::{SpaceKind, VariableSpace};
use crate::symplectic::{
    darboux_pair, hamiltonian_vf, poisson_bracket, quasi_darboux, standard_form, symplecticity,
};
use num_traits::Zero;

/// Values deciding whether `(f, H = {h = 0})` is a glancing pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlancingReport {
    /// `{f, h}(0)`.
    pub f_h: Scalar,
    /// `{f, {f, h}}(0)`.
    pub f_fh: Scalar,
    /// `{h, {f, h}}(0)`.
    pub h_fh: Scalar,
    /// Nonzero constant coefficients of `df ∧ dh`.
    pub df_dh: Vec<(Vec<usize>, Scalar)>,
    pub in_s1: bool,
    /// Conditions that failed.
    pub failed: Vec<String>,
}

/// Tests the glancing conditions for `f` and `h` under `dx∧dy + dp∧dq`.
pub fn check_glancing(f: &Jet, h: &Jet) -> Result<GlancingReport> {
    let space = f.space();
    if space.kind != SpaceKind::Constrained || h.space() != space {
        return Err(Error::SpaceMismatch(format!("glancing check on {space}")));
    }
    let order = f.order().max(h.order());
    let omega = standard_form(space, order + 1);
    let fh = poisson_bracket(f, h, &omega)?;
    let f_fh = poisson_bracket(f, &fh, &omega)?.constant_term();
    let h_fh = poisson_bracket(h, &fh, &omega)?.constant_term();
    let w = wedge(&FormJet::differential(f), &FormJet::differential(h));
    let df_dh: Vec<(Vec<usize>, Scalar)> = w
        .terms()
        .filter(|(_, c)| !c.constant_term().is_zero())
        .map(|(k, c)| (k.iter().map(|&v| v as usize).collect(), c.constant_term()))
        .collect();
    let f_h = fh.constant_term();
    let mut failed = Vec::new();
    // in the plane df∧dh(0) is a multiple of {f,h}(0), so the test is dropped
    if df_dh.is_empty() && space.n > 0 {
        failed.push("df ∧ dh vanishes at 0".to_string());
    }
    if !f_h.is_zero() {
        failed.push("{f,h}(0) ≠ 0".to_string());
    }
    if f_fh.is_zero() {
        failed.push("{f,{f,h}}(0) = 0".to_string());
    }
    if h_fh.is_zero() {
        failed.push("{h,{f,h}}(0) = 0".to_string());
    }
    Ok(GlancingReport {
        f_h,
        f_fh,
        h_fh,
        df_dh,
        in_s1: failed.is_empty(),
        failed,
    })
}

/// `h = unit · (x² + a x + b)` with `a`, `b` free of `x`.
#[derive(Clone, Debug)]
pub struct Weierstrass {
    pub unit: Jet,
    pub a: Jet,
    pub b: Jet,
}

/// `g = x² hi + lo` with `lo` of degree below two in `x_v`.
fn split_quadratic(g: &Jet, v: usize) -> (Jet, Jet) {
    let o = g.order();
    let cs = g.coefficient_expansion(v);
    let mut lo = cs[0].clone();
    if cs.len() > 1 {
        lo = lo.add_jet(&cs[1].mul_var_pow(v, 1, o));
    }
    let ho = o.saturating_sub(2);
    let mut hi = Jet::zero(g.space(), ho);
    for (k, c) in cs.iter().enumerate().skip(2) {
        hi = hi.add_jet(&c.mul_var_pow(v, k - 2, ho));
    }
    (hi, lo)
}

/// Quadratic Weierstrass division of `h` in `x_v`; needs `h(0) = 0`,
/// `∂_v h(0) = 0` and `∂²_v h(0) ≠ 0`.
pub fn weierstrass_quadratic(h: &Jet, v: usize) -> Result<Weierstrass> {
    let space = h.space();
    let o = h.order();
    if o < 2 {
        return Err(Error::SpaceMismatch("division in x needs order ≥ 2".into()));
    }
    let (e, l) = split_quadratic(h, v);
    if !h.constant_term().is_zero() || !h.linear_coeff(v).is_zero() {
        return Err(Error::NotGlancing(format!(
            "h or ∂h/∂{} nonzero at 0",
            space.var_name(v)
        )));
    }
    let einv = e.reciprocal().map_err(|_| {
        Error::NotGlancing(format!("∂²h/∂{}² vanishes at 0", space.var_name(v)))
    })?;
    // the k-th correction lies in the ideal of the non-x variables to the
    // power k, so once its order drops below k nothing further is exact
    let mut quot = Jet::zero(space, o);
    let mut rem = Jet::zero(space, o);
    let mut g = Jet::var(space, o, v).pow(2);
    let mut k = 0;
    while g.order() >= k && !g.is_zero() {
        let (gh, gl) = split_quadratic(&g, v);
        let t = gh.mul_jet(&einv);
        g = -&t.mul_jet(&l);
        quot = quot.add_jet(&t);
        rem = rem.add_jet(&gl);
        k += 1;
    }
    let exact = (k.saturating_sub(1)).max(g.order());
    let quot = quot.truncate(quot.order().min(exact));
    let rem = rem.truncate(rem.order().min(exact));
    // x² = quot · h + c1 x + c0
    let cs = rem.coefficient_expansion(v);
    let c0 = cs[0].clone();
    let c1 = cs.get(1).cloned().unwrap_or_else(|| Jet::zero(space, 0));
    Ok(Weierstrass {
        unit: quot.reciprocal()?,
        a: -&c1,
        b: -&c0,
    })
}

/// `a²` kept to `order(a) + val(a)`, which is as far as it is determined.
fn exact_square(a: &Jet, cap: usize) -> Jet {
    let o = (a.order() + a.valuation()).min(cap);
    let l = a.lift(o);
    l.mul_jet(&l).truncate(o)
}

/// Normal form of a glancing pair (or, at quasi level, of a function pair).
#[derive(Clone, Debug)]
pub struct NormalFormT2 {
    pub n: usize,
    /// Symplectomorphism of `dx∧dy + dp∧dq` (or quasi-symplectomorphism of
    /// `dp∧dq` on `(y, p, q)`) reaching the normal form.
    pub normalizer: MapJet,
    /// `r(y)`, a jet in the single variable `y`.
    pub r: Jet,
    /// `φ(y, p, q)` with `φ(y, 0, 0) = 0`.
    pub phi: Jet,
    /// Normal form of `(P_1, Q_1, ..., P_n, Q_n)`, holding `P̃_i`, `Q̃_i`.
    pub t1: NormalFormT1,
    /// `g(y, p, q)` in normal form.
    pub g: Jet,
    /// Defining jet `x² + g` of the normalized hypersurface.
    pub h_normal: Option<Jet>,
    /// `{f, x² + g}` in the normalized coordinates.
    pub critical: Option<Jet>,
    pub certificate: Certificate,
    pub notes: Vec<String>,
}

impl NormalFormT2 {
    pub fn q_tilde(&self) -> &[Jet] {
        &self.t1.q_tilde
    }

    pub fn p_tilde(&self) -> &[Jet] {
        &self.t1.p_tilde
    }

    /// `r, φ, Q̃_1, P̃_2, Q̃_2, ...`.
    pub fn invariants(&self) -> Vec<Jet> {
        let mut out = vec![self.r.clone(), self.phi.clone()];
        out.extend(self.t1.invariants());
        out
    }
}

struct Lemma3Core {
    normalizer: MapJet,
    r: Jet,
    phi: Jet,
    t1: NormalFormT1,
    g: Jet,
    /// Input `g` composed with the normalizer, for the shape check.
    pulled: Jet,
}

/// Shape of `g` once `f = y`: `r(y) + Σ_k c_k(p, q) y^k`; the first `2n`
/// coefficients are brought to the diffeomorphism normal form.
fn lemma3_core(g: &Jet) -> Result<Lemma3Core> {
    let quasi = g.space();
    let n = quasi.n;
    let order = g.order();
    if order < 2 * n {
        return Err(Error::SpaceMismatch(format!(
            "order {order} too low for n = {n}"
        )));
    }
    let only_y: Vec<Option<usize>> = (0..quasi.dim()).map(|v| (v == 0).then_some(0)).collect();
    let r_full = g.select_vars(quasi, &only_y);
    if r_full.linear_coeff(0).is_zero() {
        return Err(Error::TransversalityFailure("∂g/∂y vanishes at 0".into()));
    }
    let line = VariableSpace::quasi(0);
    let r = r_full.select_vars(line, &only_y);
    let cs = g.sub_jet(&r_full).coefficient_expansion(0);
    let sym = VariableSpace::symplectic(n);
    let to_sym: Vec<Option<usize>> = (0..quasi.dim()).map(|v| v.checked_sub(1)).collect();
    let from_sym: Vec<Option<usize>> = (0..sym.dim()).map(|v| Some(v + 1)).collect();
    let comps: Vec<Jet> = cs[..2 * n].iter().map(|c| c.select_vars(sym, &to_sym)).collect();
    let phi_map = MapJet::endo(sym, comps)?;
    if linalg::determinant(&phi_map.linear_part()).is_zero() {
        return Err(Error::GenericityViolation(
            "dP1∧dQ1∧…∧dPn∧dQn vanishes at 0".into(),
        ));
    }
    let t1 = if n == 0 {
        NormalFormT1::trivial(order)
    } else {
        theorem1_normalize(&phi_map)?
    };
    let normalizer = extend_by_y(quasi, &t1.normalizer, order);
    // coefficient by coefficient, so that c_k keeps its own order o - k
    let po = order - 2 * n;
    let mut phi = Jet::zero(quasi, po);
    for (k, c) in cs.iter().enumerate().skip(2 * n) {
        let ck = map::compose(&c.select_vars(sym, &to_sym), &t1.normalizer)?;
        phi = phi.add_jet(&ck.select_vars(quasi, &from_sym).mul_var_pow(0, k - 2 * n, po));
    }
    let g_nf = assemble_g(quasi, &r, &t1, &phi, order);
    let pulled = map::compose(g, &normalizer)?;
    Ok(Lemma3Core {
        normalizer,
        r,
        phi,
        t1,
        g: g_nf,
        pulled,
    })
}

/// `(y, p, q) ↦ (y, B(p, q))`.
fn extend_by_y(quasi: VariableSpace, b: &MapJet, order: usize) -> MapJet {
    let from_sym: Vec<Option<usize>> = (0..quasi.dim() - 1).map(|v| Some(v + 1)).collect();
    let o = order.min(b.order());
    let mut comps = vec![Jet::var(quasi, o, 0)];
    comps.extend(b.components().iter().map(|c| c.select_vars(quasi, &from_sym)));
    MapJet::endo(quasi, comps).expect("extension fixes the origin")
}

/// `(x, y, p, q) ↦ (x, A(y, p, q))`.
fn extend_by_x(space: VariableSpace, a: &MapJet) -> MapJet {
    let from_quasi: Vec<Option<usize>> = (0..space.dim() - 1).map(|v| Some(v + 1)).collect();
    let mut comps = vec![Jet::var(space, a.order(), 0)];
    comps.extend(a.components().iter().map(|c| c.select_vars(space, &from_quasi)));
    MapJet::endo(space, comps).expect("extension fixes the origin")
}

/// Assembles `r(y) + p1 + Σ (p_i + P̃_i) y^{2i-2} + Σ Q̃_i y^{2i-1} + φ y^{2n}`.
fn assemble_g(quasi: VariableSpace, r: &Jet, t1: &NormalFormT1, phi: &Jet, order: usize) -> Jet {
    let n = quasi.n;
    let to_quasi_line: Vec<Option<usize>> = vec![Some(0)];
    let from_sym: Vec<Option<usize>> = (0..2 * n).map(|v| Some(v + 1)).collect();
    let mut acc = r.select_vars(quasi, &to_quasi_line).truncate(order);
    for k in 0..2 * n {
        let c = t1.normalized.component(k).select_vars(quasi, &from_sym);
        acc = acc.add_jet(&c.mul_var_pow(0, k, order));
    }
    acc.add_jet(&phi.mul_var_pow(0, 2 * n, order))
}

fn check_lemma3_shape(cert: &mut Certificate, core: &Lemma3Core) {
    let quasi = core.g.space();
    cert.push("r'(0) nonzero", !core.r.linear_coeff(0).is_zero());
    let only_y: Vec<Option<usize>> = (0..quasi.dim()).map(|v| (v == 0).then_some(0)).collect();
    cert.push("phi(y,0,0) = 0", core.phi.select_vars(quasi, &only_y).is_zero());
    for c in &core.t1.certificate.checks {
        cert.push(c.name.clone(), c.passed);
    }
    let o = core.pulled.order().min(core.g.order());
    cert.push(
        "g has the normal-form shape",
        core.pulled.truncate(o) == core.g.truncate(o),
    );
}

const INNER_SUM_NOTE: &str = "odd powers y^(2i-1) carry Q̃_i for i = 1..n";

/// Pair `(f, g)` on the quasi space `(y, p, q)` with `dp∧dq`: normalizes
/// `f` to `y` and `g` to the shape with invariants `r, P̃_i, Q̃_i, φ`.
pub fn lemma3_normalize(f: &Jet, g: &Jet) -> Result<NormalFormT2> {
    let quasi = f.space();
    if quasi.kind != SpaceKind::Quasi || g.space() != quasi {
        return Err(Error::SpaceMismatch(format!("function pair on {quasi}")));
    }
    if !f.constant_term().is_zero() || !g.constant_term().is_zero() {
        return Err(Error::NonOriginPreserving);
    }
    if f.linear_coeff(0).is_zero() {
        return Err(Error::TransversalityFailure("∂f/∂y vanishes at 0".into()));
    }
    if g.linear_coeff(0).is_zero() {
        return Err(Error::TransversalityFailure("∂g/∂y vanishes at 0".into()));
    }
    let df_dg = wedge(&FormJet::differential(f), &FormJet::differential(g));
    if df_dg.terms().all(|(_, c)| c.constant_term().is_zero()) {
        return Err(Error::TransversalityFailure("df ∧ dg vanishes at 0".into()));
    }
    let order = f.order().min(g.order());
    let y = Jet::var(quasi, order, 0);
    let big_y = implicit_solve(&f.truncate(order), &y, 0)?;
    let m = map::substitution(quasi, order, 0, &big_y);
    let g1 = map::compose(g, &m)?;
    let core = lemma3_core(&g1)?;
    let normalizer = m.compose(&core.normalizer)?;

    let mut cert = Certificate::new(core.phi.order());
    let fy = map::compose(f, &normalizer)?;
    cert.push("f pulls back to y", fy == Jet::var(quasi, fy.order(), 0));
    let gn = map::compose(g, &normalizer)?;
    let o = gn.order().min(core.g.order());
    cert.push("g pulls back to its normal form", gn.truncate(o) == core.g.truncate(o));
    let om = standard_form(quasi, order + 1);
    cert.push("normalizer preserves dp∧dq", symplecticity(&normalizer, &om, &om)?.ok);
    check_lemma3_shape(&mut cert, &core);
    if !cert.all_passed() {
        return Err(Error::CertificationFailure(cert.failures().join("; ")));
    }
    Ok(NormalFormT2 {
        n: quasi.n,
        normalizer,
        r: core.r,
        phi: core.phi,
        t1: core.t1,
        g: core.g,
        h_normal: None,
        critical: None,
        certificate: cert,
        notes: vec![INNER_SUM_NOTE.to_string()],
    })
}

/// Normal form `f = y`, `H = {x² + g(y, p, q) = 0}` of a glancing pair by a
/// symplectomorphism of `dx∧dy + dp∧dq`.
pub fn theorem2_normalize(f: &Jet, h: &Jet) -> Result<NormalFormT2> {
    let space = f.space();
    if space.kind != SpaceKind::Constrained || h.space() != space {
        return Err(Error::SpaceMismatch(format!("constrained pair on {space}")));
    }
    let n = space.n;
    if !f.constant_term().is_zero() || !h.constant_term().is_zero() {
        return Err(Error::NonOriginPreserving);
    }
    let order = f.order().min(h.order());
    if order < 2 * n + 2 {
        return Err(Error::SpaceMismatch(format!(
            "order {order} below 2n + 2 = {}",
            2 * n + 2
        )));
    }
    let glance = check_glancing(f, h)?;
    if !glance.in_s1 {
        return Err(Error::NotGlancing(glance.failed.join("; ")));
    }
    let omega = standard_form(space, order + 1);

    // f becomes the first coordinate, then (x, y) ↦ (y, -x) makes it y
    let zf = hamiltonian_vf(f, &omega)?;
    let jx = (0..space.dim())
        .find(|&v| !zf.components()[v].constant_term().is_zero())
        .ok_or(Error::SingularAtOrigin)?;
    let m1 = darboux_pair(&omega, f, &Jet::var(space, order, jx))?;
    let swap_comps: Vec<Jet> = (0..space.dim())
        .map(|v| match v {
            0 => Jet::var(space, order, 1),
            1 => -&Jet::var(space, order, 0),
            _ => Jet::var(space, order, v),
        })
        .collect();
    let m1 = m1.compose(&MapJet::endo(space, swap_comps)?)?;
    let h1 = map::compose(h, &m1)?;

    let w = weierstrass_quadratic(&h1, 0)?;
    let half = frac(1, 2);
    let quarter = frac(1, 4);
    let shift_x = Jet::var(space, order, 0).sub_jet(&w.a.scale(&half));
    let shift = map::substitution(space, shift_x.order(), 0, &shift_x);
    let g = w.b.sub_jet(&exact_square(&w.a, w.b.order()).scale(&quarter));

    let pulled = pullback(&shift, &omega)?;
    let po = pulled.order();
    let dxdy = FormJet::from_terms(space, 2, po, [(vec![0, 1], Jet::one(space, po))])?;
    let rest = pulled.sub(&dxdy);
    if !rest.is_free_of(0) {
        return Err(Error::CertificationFailure("shift left an x dependence".into()));
    }
    let quasi = VariableSpace::quasi(n);
    let to_quasi: Vec<Option<usize>> = (0..space.dim()).map(|v| v.checked_sub(1)).collect();
    let omega_hat = rest.select_vars(quasi, &to_quasi);
    let a_map = quasi_darboux(&omega_hat, &Jet::var(quasi, po + 1, 0))?;
    let g_q = g.select_vars(quasi, &to_quasi);
    let g2 = map::compose(&g_q, &a_map)?;
    let core = lemma3_core(&g2)?;
    let qmap = a_map.compose(&core.normalizer)?;
    let normalizer = m1.compose(&shift)?.compose(&extend_by_x(space, &qmap))?;

    let mut cert = Certificate::new(core.phi.order());
    let rep = symplecticity(&normalizer, &omega, &omega)?;
    cert.push("normalizer is symplectic", rep.ok);
    let fy = map::compose(f, &normalizer)?;
    cert.push("f pulls back to y", fy == Jet::var(space, fy.order(), 1));
    let hn = map::compose(h, &normalizer)?;
    let from_quasi: Vec<Option<usize>> = (0..quasi.dim()).map(|v| Some(v + 1)).collect();
    let g_ext = core.g.select_vars(space, &from_quasi);
    if hn.order() >= 2 {
        let wn = weierstrass_quadratic(&hn, 0)?;
        cert.push("x-linear coefficient vanishes", wn.a.is_zero());
        let o = wn.b.order().min(g_ext.order());
        cert.push("constant coefficient equals g", wn.b.truncate(o) == g_ext.truncate(o));
    } else {
        // only the tangent hyperplane is determined
        let c = hn.linear_coeff(1) / g_ext.linear_coeff(1);
        let lin = g_ext.truncate(1).scale(&c);
        cert.push("tangent hyperplane matches", hn.truncate(1) == lin);
    }
    let h_normal = Jet::var(space, g_ext.order(), 0).pow(2).add_jet(&g_ext);
    let critical = poisson_bracket(&Jet::var(space, order, 1), &h_normal, &omega)?;
    let two_x = Jet::var(space, critical.order(), 0).scale(&Scalar::from_integer(2.into()));
    cert.push("critical hypersurface is x = 0", critical == two_x);
    check_lemma3_shape(&mut cert, &core);
    if !cert.all_passed() {
        return Err(Error::CertificationFailure(cert.failures().join("; ")));
    }
    Ok(NormalFormT2 {
        n,
        normalizer,
        r: core.r,
        phi: core.phi,
        t1: core.t1,
        g: core.g,
        h_normal: Some(h_normal),
        critical: Some(critical),
        certificate: cert,
        notes: vec![INNER_SUM_NOTE.to_string()],
    })
}

/// `f̂ = r̂(y) + Σ (p_i y^{2i-2} + q_i y^{2i-1}) + ψ y^{2n}` with
/// `ω = dx ∧ df̂ + ω̃` and `H = {x² + y = 0}`.
#[derive(Clone, Debug)]
pub struct KMForm {
    pub n: usize,
    pub f_hat: Jet,
    /// `r̂`, a jet in `y` alone.
    pub r_hat: Jet,
    pub psi: Jet,
    /// Symplectic form on `(p, q)`.
    pub omega_tilde: FormJet,
    /// `(x, y, p, q) ↦ ` normal-form coordinates of the input.
    pub chart: MapJet,
    pub certificate: Certificate,
}

/// Trades the `(P̃, Q̃)` invariants of a normal form for a symplectic form
/// `ω̃` and moves `H` to `{x² + y = 0}`.
pub fn derive_km_form(nf: &NormalFormT2) -> Result<KMForm> {
    let g = &nf.g;
    let quasi = g.space();
    let n = quasi.n;
    let order = g.order();
    let y = Jet::var(quasi, order, 0);
    let big_y = implicit_solve(g, &y, 0)?;
    let only_y: Vec<Option<usize>> = (0..quasi.dim()).map(|v| (v == 0).then_some(0)).collect();
    let r_full = big_y.select_vars(quasi, &only_y);
    let r_hat = r_full.select_vars(VariableSpace::quasi(0), &only_y);
    let ds = big_y.sub_jet(&r_full).coefficient_expansion(0);
    let sym = VariableSpace::symplectic(n);
    let to_sym: Vec<Option<usize>> = (0..quasi.dim()).map(|v| v.checked_sub(1)).collect();
    let dmap = MapJet::endo(sym, ds[..2 * n].iter().map(|c| c.select_vars(sym, &to_sym)).collect())?;
    if linalg::determinant(&dmap.linear_part()).is_zero() {
        return Err(Error::GenericityViolation("expansion coefficients are dependent".into()));
    }
    let dinv = if n == 0 { dmap.clone() } else { dmap.invert()? };
    let e = extend_by_y(quasi, &dinv, order);
    let f_hat = map::compose(&big_y, &e)?;
    let po = order.saturating_sub(2 * n);
    let mut psi = Jet::zero(quasi, po);
    for (k, c) in ds.iter().enumerate().skip(2 * n) {
        psi = psi.add_jet(&map::compose(c, &e)?.mul_var_pow(0, k - 2 * n, po));
    }
    let omega_tilde = if n == 0 {
        FormJet::zero(sym, 2, order)
    } else {
        pullback(&dinv, &standard_form(sym, order + 1))?
    };

    let mut cert = Certificate::new(psi.order().min(omega_tilde.order()));
    cert.push("r̂'(0) nonzero", !r_hat.linear_coeff(0).is_zero());
    cert.push("psi(y,0,0) = 0", psi.select_vars(quasi, &only_y).is_zero());
    let mut shape = r_hat.select_vars(quasi, &[Some(0)]).truncate(f_hat.order());
    for k in 0..2 * n {
        shape = shape.add_jet(&Jet::var(quasi, f_hat.order(), k + 1).mul_var_pow(0, k, f_hat.order()));
    }
    shape = shape.add_jet(&psi.mul_var_pow(0, 2 * n, f_hat.order()));
    let so = shape.order().min(f_hat.order());
    cert.push("f̂ has the expected shape", shape.truncate(so) == f_hat.truncate(so));

    let space = VariableSpace::constrained(n);
    let from_quasi: Vec<Option<usize>> = (0..quasi.dim()).map(|v| Some(v + 1)).collect();
    let from_sym: Vec<Option<usize>> = (0..sym.dim()).map(|v| Some(v + 2)).collect();
    let f_hat_c = f_hat.select_vars(space, &from_quasi);
    let mut comps = vec![Jet::var(space, f_hat_c.order(), 0), f_hat_c.clone()];
    comps.extend(dinv.components().iter().map(|c| c.select_vars(space, &from_sym)));
    let chart = MapJet::endo(space, comps)?;
    let g_c = g.select_vars(space, &from_quasi);
    let h_c = Jet::var(space, order, 0).pow(2).add_jet(&g_c);
    let hk = map::compose(&h_c, &chart)?;
    let target = Jet::var(space, order, 0).pow(2).add_jet(&Jet::var(space, order, 1));
    let ho = hk.order();
    cert.push("H becomes x² + y = 0", hk == target.truncate(ho));
    let pulled = pullback(&chart, &standard_form(space, order + 1))?;
    let mut expected = wedge(&FormJet::dx(space, order, 0), &FormJet::differential(&f_hat_c));
    if n > 0 {
        expected = expected.add(&omega_tilde.select_vars(space, &from_sym));
    }
    let eo = pulled.order().min(expected.order());
    cert.push(
        "ω becomes dx∧df̂ + ω̃",
        pulled.truncate(eo).sub(&expected.truncate(eo)).is_zero(),
    );
    if !cert.all_passed() {
        return Err(Error::CertificationFailure(cert.failures().join("; ")));
    }
    Ok(KMForm {
        n,
        f_hat,
        r_hat,
        psi,
        omega_tilde,
        chart,
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
    fn glancing_examples() {
        let k = VariableSpace::constrained(1);
        let rep = check_glancing(&j(k, 4, "y"), &j(k, 4, "x^2 + y + p1")).unwrap();
        assert!(rep.in_s1);
        assert_eq!(rep.f_fh, int(2));
        let rep = check_glancing(&j(k, 4, "y"), &j(k, 4, "y + p1")).unwrap();
        assert!(!rep.in_s1);
        assert!(rep.f_fh.is_zero());
        let rep = check_glancing(&j(k, 4, "y"), &j(k, 4, "x + y")).unwrap();
        assert!(!rep.in_s1);
        assert_eq!(rep.f_h, int(1));
    }

    #[test]
    fn weierstrass_recombines() {
        let k = VariableSpace::constrained(1);
        let h = j(k, 8, "(1 + y + x p1) (x^2 + 2 x y + y + q1^2) ");
        let w = weierstrass_quadratic(&h, 0).unwrap();
        let o = w.a.order().min(w.b.order());
        assert_eq!(w.a.truncate(o.min(3)), j(k, o.min(3), "2 y"));
        assert_eq!(w.b.truncate(o.min(3)), j(k, o.min(3), "y + q1^2"));
    }

    #[test]
    fn lemma3_examples() {
        let q = VariableSpace::quasi(1);
        let nf = lemma3_normalize(&j(q, 5, "y"), &j(q, 5, "y + p1 + q1 y")).unwrap();
        assert_eq!(nf.r, j(VariableSpace::quasi(0), nf.r.order(), "y"));
        assert_eq!(nf.q_tilde()[0], j(VariableSpace::symplectic(1), nf.q_tilde()[0].order(), "q1"));
        assert!(nf.phi.is_zero());
        assert!(matches!(
            lemma3_normalize(&j(q, 5, "y"), &j(q, 5, "y + p1")),
            Err(Error::GenericityViolation(_))
        ));
        let nf = lemma3_normalize(&j(q, 5, "2 y + y^2"), &j(q, 5, "y + p1 + q1 y")).unwrap();
        assert!(!nf.r.linear_coeff(0).is_zero());
        assert!(nf.certificate.all_passed());
    }

    #[test]
    fn theorem2_worked_example() {
        let k = VariableSpace::constrained(1);
        let nf = theorem2_normalize(&j(k, 6, "y"), &j(k, 6, "x^2 + y + p1 + q1 y")).unwrap();
        assert_eq!(nf.r, j(VariableSpace::quasi(0), nf.r.order(), "y"));
        assert_eq!(nf.q_tilde()[0], j(VariableSpace::symplectic(1), nf.q_tilde()[0].order(), "q1"));
        assert!(nf.phi.is_zero());
        let err = theorem2_normalize(&j(k, 6, "y"), &j(k, 6, "x^2 + y + p1")).unwrap_err();
        assert!(matches!(err, Error::GenericityViolation(_)));
    }

    #[test]
    fn planar_case() {
        let k = VariableSpace::constrained(0);
        let nf = theorem2_normalize(&j(k, 6, "y"), &j(k, 6, "x^2 + 2 x y + y")).unwrap();
        let line = VariableSpace::quasi(0);
        assert_eq!(nf.r, j(line, nf.r.order(), "y - y^2"));
        let km = derive_km_form(&nf).unwrap();
        assert_eq!(km.r_hat.linear_coeff(0), int(1));
    }

    #[test]
    fn km_examples() {
        let k = VariableSpace::constrained(1);
        let nf = theorem2_normalize(&j(k, 6, "y"), &j(k, 6, "x^2 + y + p1 + q1 y")).unwrap();
        let km = derive_km_form(&nf).unwrap();
        assert_eq!(km.r_hat, j(VariableSpace::quasi(0), km.r_hat.order(), "y"));
        let k0 = VariableSpace::constrained(0);
        let nf = theorem2_normalize(&j(k0, 6, "y"), &j(k0, 6, "x^2 + 2 y")).unwrap();
        let km = derive_km_form(&nf).unwrap();
        assert_eq!(km.r_hat, j(VariableSpace::quasi(0), km.r_hat.order(), "y/2"));
    }
}
