//! The acceptance suite: nine end-to-end criteria, each reported as one
//! pass/fail line. Shared by the `acceptance` test target and the CLI.

use crate::error::Error;
use crate::forms::{contract, exterior_derivative, pullback, wedge};
use crate::ideal::IdealSpec;
use crate::jet::Jet;
use crate::map::{self, MapJet};
use crate::moduli::{
    group_jet_dimension, normal_form_coefficient_count, orbit_dimension_rank, poincare_series,
};
use crate::normal_forms::{
    check_glancing, corollary1_parametrize, theorem1_normalize, theorem2_normalize, NormalFormT2,
};
use crate::random::{
    random_diffeo, random_form, random_in_ideal, random_jet, random_vector_field, rng,
    small_scalar, FixtureRng,
};
use crate::space::VariableSpace;
use crate::symplectic::{
    darboux_reduce, poisson_bracket, random_closed_form, random_symplectomorphism_in,
    standard_form, symplecticity,
};
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;
use std::fmt;
use std::time::Instant;

/// Outcome of one criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}. {}: {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

pub const TITLES: [&str; 9] = [
    "Darboux certification",
    "diffeomorphism normal form round trip",
    "diffeomorphism normal form separation",
    "glancing pair worked example",
    "glancing pair invariance",
    "planar glancing pair",
    "moduli dimensions",
    "symplectic form parametrization",
    "calculus laws",
];

/// Working orders for the glancing-pair invariance runs. The quadratic
/// division leaves about half of the input order determined, so the
/// invariants are compared at their certified orders.
pub const GLANCING_ORDER: usize = 8;
pub const PLANAR_ORDER: usize = 12;

pub fn run_criterion(id: usize) -> Option<CriterionResult> {
    let start = Instant::now();
    let (passed, detail) = match id {
        1 => darboux(100, 4),
        2 => theorem1_round_trip(100, 5),
        3 => theorem1_separation(50, 5),
        4 => worked_example(),
        5 => glancing_invariance(50),
        6 => planar_case(25),
        7 => moduli(),
        8 => corollary1(50, 4),
        9 => calculus_laws(200),
        _ => return None,
    };
    Some(CriterionResult {
        id,
        title: TITLES[id - 1],
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=TITLES.len()).filter_map(run_criterion).collect()
}

fn tally(ok: usize, total: usize, first_failure: Option<String>) -> (bool, String) {
    match first_failure {
        None => (ok == total, format!("{ok}/{total}")),
        Some(f) => (false, format!("{ok}/{total}, first failure: {f}")),
    }
}

fn darboux(cases: usize, order: usize) -> (bool, String) {
    let mut r = rng(101);
    let mut ok = 0;
    let mut fail = None;
    for i in 0..cases {
        let space = VariableSpace::symplectic(1 + i % 2);
        let res = random_closed_form(&mut r, space, order).and_then(|om| {
            let d = darboux_reduce(&om)?;
            symplecticity(&d, &om, &standard_form(space, order))
        });
        match res {
            Ok(rep) if rep.ok && rep.certified_order + 1 >= order => ok += 1,
            Ok(rep) => {
                fail.get_or_insert(format!("case {i}: residual {}", rep.residual));
            }
            Err(e) => {
                fail.get_or_insert(format!("case {i}: {e}"));
            }
        }
    }
    tally(ok, cases, fail)
}

/// Random `(p1, Q̃1, p2 + P̃2, Q̃2, ...)` with invertible linear part.
pub fn random_normal_shaped(r: &mut FixtureRng, n: usize, order: usize) -> MapJet {
    let space = VariableSpace::symplectic(n);
    loop {
        let mut comps = Vec::with_capacity(2 * n);
        for i in 1..=n {
            let p = Jet::var(space, order, space.p(i));
            if i == 1 {
                comps.push(p);
            } else {
                let ideal = IdealSpec::new(space, 2 * i - 2).expect("level within range");
                comps.push(p.add_jet(&random_in_ideal(r, &ideal, order, order, 0.3)));
            }
            let ideal = IdealSpec::new(space, 2 * i - 1).expect("level within range");
            let q = Jet::var(space, order, space.q(i)).scale(&small_scalar(r));
            comps.push(q.add_jet(&random_in_ideal(r, &ideal, order, order, 0.3)));
        }
        let m = MapJet::endo(space, comps).expect("fixes the origin");
        if (1..=n).all(|i| !m.component(2 * i - 1).linear_coeff(space.q(i)).is_zero()) {
            return m;
        }
    }
}

/// `Q̃1, P̃2, Q̃2, ...` read off a normal-shaped map.
fn shaped_invariants(m: &MapJet) -> Vec<Jet> {
    let space = m.source();
    let mut out = Vec::new();
    for i in 0..space.n {
        if i > 0 {
            let p = m.component(2 * i);
            out.push(p.sub_jet(&Jet::var(space, p.order(), 2 * i)));
        }
        out.push(m.component(2 * i + 1).clone());
    }
    out
}

fn agree_to(a: &[Jet], b: &[Jet], order: usize) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.order() >= order && y.order() >= order && x.truncate(order) == y.truncate(order)
        })
}

fn theorem1_round_trip(cases: usize, order: usize) -> (bool, String) {
    let mut r = rng(202);
    let mut ok = 0;
    let mut fail = None;
    for i in 0..cases {
        let n = 1 + i % 2;
        let space = VariableSpace::symplectic(n);
        let nf = random_normal_shaped(&mut r, n, order);
        let res = random_symplectomorphism_in(&mut r, space, order, 4)
            .and_then(|psi| nf.compose(&psi))
            .and_then(|phi| theorem1_normalize(&phi));
        match res {
            Ok(out) => {
                let same = agree_to(&out.invariants(), &shaped_invariants(&nf), order - 1);
                if same && out.certificate.all_passed() {
                    ok += 1;
                } else {
                    fail.get_or_insert(format!("case {i}: invariants differ"));
                }
            }
            Err(e) => {
                fail.get_or_insert(format!("case {i}: {e}"));
            }
        }
    }
    tally(ok, cases, fail)
}

/// A normal-shaped map with one invariant coefficient of degree `≤ order-1`
/// changed.
fn perturb_one_coefficient(r: &mut FixtureRng, nf: &MapJet, order: usize) -> MapJet {
    let space = nf.source();
    let n = space.n;
    loop {
        // component index among Q̃1, P̃2, Q̃2, ...
        let k = r.gen_range(1..2 * n);
        let level = k;
        let ideal = IdealSpec::new(space, level).expect("level within range");
        let g = ideal.generators()[r.gen_range(0..level)];
        let mut exps = vec![0u8; space.dim()];
        for _ in 0..r.gen_range(0..order - 1) {
            exps[r.gen_range(0..space.dim())] += 1;
        }
        exps[g] += 1;
        let bump = Jet::monomial(space, order, &exps, small_scalar(r));
        let mut comps = nf.components().to_vec();
        comps[k] = comps[k].add_jet(&bump);
        let m = MapJet::endo(space, comps).expect("fixes the origin");
        if !crate::linalg::determinant(&m.linear_part()).is_zero() {
            return m;
        }
    }
}

fn theorem1_separation(pairs: usize, order: usize) -> (bool, String) {
    let mut r = rng(303);
    let mut ok = 0;
    let mut fail = None;
    for i in 0..pairs {
        let n = 1 + i % 2;
        let space = VariableSpace::symplectic(n);
        let a = random_normal_shaped(&mut r, n, order);
        let b = perturb_one_coefficient(&mut r, &a, order);
        let run = |r: &mut FixtureRng, m: &MapJet| {
            random_symplectomorphism_in(r, space, order, 4)
                .and_then(|psi| m.compose(&psi))
                .and_then(|phi| theorem1_normalize(&phi))
        };
        match (run(&mut r, &a), run(&mut r, &b)) {
            (Ok(x), Ok(y)) => {
                if !agree_to(&x.invariants(), &y.invariants(), order - 1) {
                    ok += 1;
                } else {
                    fail.get_or_insert(format!("pair {i}: outputs coincide"));
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                fail.get_or_insert(format!("pair {i}: {e}"));
            }
        }
    }
    tally(ok, pairs, fail)
}

fn parse(space: VariableSpace, order: usize, text: &str) -> Jet {
    Jet::parse(space, order, text).expect("fixture polynomial parses")
}

fn worked_example() -> (bool, String) {
    let k = VariableSpace::constrained(1);
    let order = 6;
    let f = parse(k, order, "y");
    let line = VariableSpace::quasi(0);
    let sym = VariableSpace::symplectic(1);
    let mut notes = Vec::new();
    let mut passed = match theorem2_normalize(&f, &parse(k, order, "x^2 + y + p1 + q1 y")) {
        Ok(nf) => {
            let r_ok = nf.r == parse(line, nf.r.order(), "y");
            let q = &nf.q_tilde()[0];
            let q_ok = *q == parse(sym, q.order(), "q1");
            notes.push(format!(
                "r = {} (order {}), Q1 = {} (order {}), phi = {} (order {})",
                nf.r,
                nf.r.order(),
                q,
                q.order(),
                nf.phi,
                nf.phi.order()
            ));
            r_ok && q_ok && nf.phi.is_zero() && nf.certificate.all_passed()
        }
        Err(e) => {
            notes.push(format!("normalization failed: {e}"));
            false
        }
    };
    let melrose = parse(k, order, "x^2 + y + p1");
    match theorem2_normalize(&f, &melrose) {
        Err(Error::GenericityViolation(_)) => notes.push("Melrose pair rejected".into()),
        other => {
            passed = false;
            notes.push(format!("Melrose pair gave {:?}", other.map(|_| ())));
        }
    }
    match check_glancing(&f, &melrose) {
        Ok(rep) if rep.in_s1 => notes.push("Melrose pair is glancing".into()),
        _ => {
            passed = false;
            notes.push("Melrose pair not reported glancing".into());
        }
    }
    (passed, notes.join("; "))
}

/// Normalizes `(f∘Ψ, U·h∘Ψ)` for random `Ψ` and units `U` and compares the
/// invariants with those of `(f, h)` at their certified orders.
fn invariance_run(f: &Jet, h: &Jet, cases: usize, seed: u64) -> (usize, Option<String>, NormalFormT2) {
    let space = f.space();
    let order = f.order();
    let base = theorem2_normalize(f, h).expect("fixture pair is generic");
    let mut r = rng(seed);
    let mut ok = 0;
    let mut fail = None;
    for i in 0..cases {
        let res = random_symplectomorphism_in(&mut r, space, order, 4).and_then(|psi| {
            let unit = Jet::one(space, order).add_jet(&random_jet(&mut r, space, order, 1, 3, 0.3));
            let f2 = map::compose(f, &psi)?;
            let h2 = unit.mul_jet(&map::compose(h, &psi)?);
            theorem2_normalize(&f2, &h2)
        });
        match res {
            Ok(nf) => {
                let a = base.invariants();
                let b = nf.invariants();
                let same = a.len() == b.len()
                    && a.iter().zip(&b).all(|(x, y)| {
                        let o = x.order().min(y.order());
                        x.truncate(o) == y.truncate(o)
                    });
                if same {
                    ok += 1;
                } else {
                    fail.get_or_insert(format!("case {i}: invariants differ"));
                }
            }
            Err(e) => {
                fail.get_or_insert(format!("case {i}: {e}"));
            }
        }
    }
    (ok, fail, base)
}

fn glancing_invariance(cases: usize) -> (bool, String) {
    let k = VariableSpace::constrained(1);
    let order = GLANCING_ORDER;
    let f = parse(k, order, "y + p1 q1 + x^2 q1");
    let h = parse(k, order, "x^2 + y + p1 + q1 y + 2 y^2 + x y q1 + p1 y^2 + q1^2 y^3 + x^3");
    let (ok, fail, base) = invariance_run(&f, &h, cases, 505);
    let (passed, detail) = tally(ok, cases, fail);
    let orders: Vec<usize> = base.invariants().iter().map(Jet::order).collect();
    (
        passed && !base.phi.is_zero(),
        format!("{detail} at N = {order}, invariant orders (r, phi, Q1) = {orders:?}"),
    )
}

fn planar_case(cases: usize) -> (bool, String) {
    let k = VariableSpace::constrained(0);
    let order = PLANAR_ORDER;
    let f = parse(k, order, "y");
    let h = parse(k, order, "x^2 + 2 x y + y");
    let (ok, fail, base) = invariance_run(&f, &h, cases, 606);
    let r_ok = base.r == parse(VariableSpace::quasi(0), base.r.order(), "y - y^2");
    let (passed, detail) = tally(ok, cases, fail);
    (
        passed && r_ok,
        format!("r = {} to order {}; invariant under {detail}", base.r, base.r.order()),
    )
}

fn moduli() -> (bool, String) {
    let mut notes = Vec::new();
    let mut passed = true;
    for n in 1..=4 {
        let expected = (n * (2 * n - 1)) as u128;
        let count = normal_form_coefficient_count(n, 1);
        let rank = orbit_dimension_rank(n, 1, 7);
        if count != expected || rank != expected {
            passed = false;
            notes.push(format!("dim M_1 for n = {n}: count {count}, rank {rank}"));
        }
    }
    for n in 1..=2 {
        for k in 1..=3 {
            let count = normal_form_coefficient_count(n, k);
            let rank = orbit_dimension_rank(n, k, 7);
            let free = crate::moduli::action_rank(n, k, 7) as u128 == group_jet_dimension(n, k);
            if count != rank || !free {
                passed = false;
                notes.push(format!("(n, k) = ({n}, {k}): count {count}, rank {rank}"));
            }
        }
    }
    let s1 = poincare_series(1, 6, 7);
    if !s1.agree.iter().all(|&a| a) {
        passed = false;
        notes.push(format!("n = 1 series {:?} vs {:?}", s1.dims, s1.predicted_dims));
    }
    let s2 = poincare_series(2, 2, 7);
    let flagged = s2.dims[2] == 26 && s2.predicted_dims[2] == 30 && !s2.agree[2] && s2.rank_dims[2] == 26;
    if !flagged {
        passed = false;
    }
    notes.push(format!(
        "n = 1 dims {:?}; n = 2, k = 2: computed {}, predicted {} (flagged)",
        s1.dims, s2.dims[2], s2.predicted_dims[2]
    ));
    (passed, notes.join("; "))
}

fn corollary1(cases: usize, order: usize) -> (bool, String) {
    let mut r = rng(808);
    let space = VariableSpace::symplectic(2);
    let mut ok = 0;
    let mut fail = None;
    for i in 0..cases {
        match random_closed_form(&mut r, space, order).and_then(|om| corollary1_parametrize(&om)) {
            Ok(p) if p.residual.is_zero() && p.certificate.all_passed() => ok += 1,
            Ok(p) => {
                fail.get_or_insert(format!("case {i}: {}", p.certificate.failures().join(", ")));
            }
            Err(e) => {
                fail.get_or_insert(format!("case {i}: {e}"));
            }
        }
    }
    tally(ok, cases, fail)
}

fn law_spaces(i: usize) -> VariableSpace {
    match i % 4 {
        0 => VariableSpace::symplectic(1),
        1 => VariableSpace::quasi(1),
        2 => VariableSpace::symplectic(2),
        _ => VariableSpace::constrained(1),
    }
}

fn calculus_laws(cases: usize) -> (bool, String) {
    let mut r = rng(909);
    let order = 4;
    let mut counts = [0usize; 4];
    for i in 0..cases {
        let space = law_spaces(i);
        let deg = i % 3;
        let a = random_form(&mut r, space, deg, order, order, 0.3);
        if exterior_derivative(&exterior_derivative(&a)).is_zero() {
            counts[0] += 1;
        }

        let small = if space.dim() > 4 { VariableSpace::quasi(1) } else { space };
        let m1 = random_diffeo(&mut r, small, order, 3, 0.3);
        let m2 = random_diffeo(&mut r, small, order, 3, 0.3);
        let alpha = random_form(&mut r, small, 1 + i % 2, order, 3, 0.3);
        let functorial = (|| {
            let lhs = pullback(&m1.compose(&m2)?, &alpha)?;
            let rhs = pullback(&m2, &pullback(&m1, &alpha)?)?;
            let o = lhs.order().min(rhs.order());
            Ok::<bool, Error>(lhs.truncate(o).sub(&rhs.truncate(o)).is_zero())
        })();
        if functorial == Ok(true) {
            counts[1] += 1;
        }

        let v = random_vector_field(&mut r, space, order, 3, 0.3);
        let da = 1 + i % 2;
        let a = random_form(&mut r, space, da, order, 3, 0.3);
        let b = random_form(&mut r, space, 1, order, 3, 0.3);
        let lhs = contract(&v, &wedge(&a, &b));
        let first = wedge(&contract(&v, &a), &b);
        let second = wedge(&a, &contract(&v, &b));
        let rhs = if da % 2 == 0 { first.add(&second) } else { first.sub(&second) };
        let o = lhs.order().min(rhs.order());
        if lhs.truncate(o).sub(&rhs.truncate(o)).is_zero() {
            counts[2] += 1;
        }

        let n = 1 + i % 2;
        let sym = VariableSpace::symplectic(n);
        let om = standard_form(sym, order + 1);
        let [f, g, h] = [(); 3].map(|_| random_jet(&mut r, sym, order, 1, order, 0.3));
        let jacobi = (|| {
            let t1 = poisson_bracket(&f, &poisson_bracket(&g, &h, &om)?, &om)?;
            let t2 = poisson_bracket(&g, &poisson_bracket(&h, &f, &om)?, &om)?;
            let t3 = poisson_bracket(&h, &poisson_bracket(&f, &g, &om)?, &om)?;
            Ok::<bool, Error>(t1.add_jet(&t2).add_jet(&t3).is_zero())
        })();
        if jacobi == Ok(true) {
            counts[3] += 1;
        }
    }
    let passed = counts.iter().all(|&c| c == cases);
    (
        passed,
        format!(
            "d∘d {}/{cases}, pullback functoriality {}/{cases}, contraction rule {}/{cases}, Jacobi {}/{cases}",
            counts[0], counts[1], counts[2], counts[3]
        ),
    )
}
