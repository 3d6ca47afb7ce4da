//! Seeded generators for test fixtures: random jets, maps and forms.

use crate::basis::basis;
use crate::forms::{FormJet, VectorFieldJet};
use crate::ideal::IdealSpec;
use crate::jet::{Jet, Scalar};
use crate::map::MapJet;
use crate::space::VariableSpace;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small nonzero rational: an integer in `[-3, 3]` or a half-integer.
pub fn small_scalar<R: Rng>(rng: &mut R) -> Scalar {
    let num: i64 = loop {
        let v = rng.gen_range(-3..=3);
        if v != 0 {
            break v;
        }
    };
    let den = if rng.gen_bool(0.2) { 2 } else { 1 };
    Scalar::new(num.into(), den.into())
}

/// Random jet whose terms have degrees in `min_deg..=max_deg`; each
/// monomial is present with probability `density`.
pub fn random_jet<R: Rng>(
    rng: &mut R,
    space: VariableSpace,
    order: usize,
    min_deg: usize,
    max_deg: usize,
    density: f64,
) -> Jet {
    let top = max_deg.min(order);
    let b = basis(space.dim(), order);
    let mut j = Jet::zero(space, order);
    if min_deg > top {
        return j;
    }
    let lo = if min_deg == 0 { 0 } else { b.len_upto(min_deg - 1) };
    for i in lo..b.len_upto(top) {
        if rng.gen_bool(density) {
            j.set_coeff(&b.exps[i], small_scalar(rng));
        }
    }
    j
}

/// Like [`random_jet`] but never zero: a single term is forced if needed.
pub fn random_nonzero_jet<R: Rng>(
    rng: &mut R,
    space: VariableSpace,
    order: usize,
    min_deg: usize,
    max_deg: usize,
    density: f64,
) -> Jet {
    let j = random_jet(rng, space, order, min_deg, max_deg, density);
    if !j.is_zero() || min_deg > max_deg.min(order) || space.dim() == 0 && min_deg > 0 {
        return j;
    }
    let b = basis(space.dim(), order);
    let lo = if min_deg == 0 { 0 } else { b.len_upto(min_deg - 1) };
    let i = rng.gen_range(lo..b.len_upto(max_deg.min(order)));
    let mut j = j;
    j.set_coeff(&b.exps[i], small_scalar(rng));
    j
}

/// Random invertible rational matrix built from elementary factors.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<Scalar>> {
    let mut m: Vec<Vec<Scalar>> = (0..n)
        .map(|i| (0..n).map(|j| Scalar::from_integer(((i == j) as i64).into())).collect())
        .collect();
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            let c = small_scalar(rng);
            for v in m[i].iter_mut() {
                *v *= &c;
            }
        } else {
            let c = Scalar::from_integer(rng.gen_range(-2i64..=2).into());
            if c.is_zero() {
                continue;
            }
            let row = m[j].clone();
            for (a, b) in m[i].iter_mut().zip(row) {
                *a += b * &c;
            }
        }
    }
    m
}

/// Random `degree`-form whose coefficients have degrees `0..=max_deg`.
pub fn random_form<R: Rng>(
    rng: &mut R,
    space: VariableSpace,
    degree: usize,
    order: usize,
    max_deg: usize,
    density: f64,
) -> FormJet {
    let terms: Vec<(Vec<usize>, Jet)> = index_tuples(space.dim(), degree)
        .into_iter()
        .map(|t| (t, random_jet(rng, space, order, 0, max_deg, density)))
        .collect();
    FormJet::from_terms(space, degree, order, terms).expect("sorted index tuples")
}

fn index_tuples(dim: usize, degree: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..dim {
            cur.push(v);
            go(v + 1, dim, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, dim, degree, &mut Vec::new(), &mut out);
    out
}

/// Random vector field with components of degree `0..=max_deg`.
pub fn random_vector_field<R: Rng>(
    rng: &mut R,
    space: VariableSpace,
    order: usize,
    max_deg: usize,
    density: f64,
) -> VectorFieldJet {
    let comps = (0..space.dim())
        .map(|_| random_jet(rng, space, order, 0, max_deg, density))
        .collect();
    VectorFieldJet::new(space, comps).expect("one component per variable")
}

/// Random diffeomorphism jet: invertible linear part plus terms of degree
/// `2..=max_deg`.
pub fn random_diffeo<R: Rng>(
    rng: &mut R,
    space: VariableSpace,
    order: usize,
    max_deg: usize,
    density: f64,
) -> MapJet {
    let lin = MapJet::linear(space, space, order, &random_invertible(rng, space.dim()));
    let comps = lin
        .components()
        .iter()
        .map(|c| c.add_jet(&random_jet(rng, space, order, 2, max_deg, density)))
        .collect();
    MapJet::endo(space, comps).expect("fixes the origin")
}

/// Random member `Σ g·c_g` of `ideal`, with cofactors of degree
/// `0..=max_deg - 1`.
pub fn random_in_ideal<R: Rng>(
    rng: &mut R,
    ideal: &IdealSpec,
    order: usize,
    max_deg: usize,
    density: f64,
) -> Jet {
    let space = ideal.space();
    let mut acc = Jet::zero(space, order);
    for &g in ideal.generators() {
        let c = random_jet(rng, space, order, 0, max_deg.saturating_sub(1), density);
        acc = acc.add_jet(&c.mul_var_pow(g, 1, order));
    }
    acc
}
