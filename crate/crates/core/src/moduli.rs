//! Dimensions of the spaces of diffeomorphism k-jets modulo symplectomorphisms.

use crate::jet::{Jet, Scalar};
use crate::linalg::{self, Matrix};
use crate::random::{random_diffeo, rng};
use crate::space::VariableSpace;
use crate::symplectic::{hamiltonian_vf, standard_form};
use num_traits::One;
use serde::Serialize;

/// Number of monomials of degree `d` in `m` variables.
pub fn monomial_count(d: usize, m: usize) -> u128 {
    if m == 0 {
        return u128::from(d == 0);
    }
    binomial((d + m - 1) as u128, (m - 1) as u128)
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Exponent vectors of degree `d` in `m` variables.
fn monomials(m: usize, d: usize) -> Vec<Vec<u8>> {
    if m == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials(m - 1, d - first) {
            rest.insert(0, first as u8);
            out.push(rest);
        }
    }
    out
}

/// `dim J^k Diff(2n)`: all maps fixing the origin, degrees `1..=k`.
pub fn jet_space_dimension(n: usize, k: usize) -> u128 {
    let m = 2 * n;
    m as u128 * (1..=k).map(|d| monomial_count(d, m)).sum::<u128>()
}

/// `dim J^k Symp(2n)`: Hamiltonians of degree `2..=k+1`.
pub fn group_jet_dimension(n: usize, k: usize) -> u128 {
    (2..=k + 1).map(|d| monomial_count(d, 2 * n)).sum()
}

/// Rank of the infinitesimal action `H ↦ j^k(DΦ · Z_H)` at a random base
/// jet `Φ` drawn from `seed`.
pub fn action_rank(n: usize, k: usize, seed: u64) -> usize {
    let space = VariableSpace::symplectic(n);
    let m = space.dim();
    let base = random_diffeo(&mut rng(seed), space, k, k, 0.5);
    let jac = base.jacobian();
    let omega = standard_form(space, k + 1);
    let slots: Vec<Vec<u8>> = (1..=k).flat_map(|d| monomials(m, d)).collect();
    let mut rows: Matrix = Vec::new();
    for d in 2..=k + 1 {
        for e in monomials(m, d) {
            let h = Jet::monomial(space, k + 1, &e, Scalar::one());
            let z = hamiltonian_vf(&h, &omega).expect("standard form is nondegenerate");
            let mut row = Vec::with_capacity(m * slots.len());
            for jrow in &jac {
                let mut v = Jet::zero(space, k);
                for (dphi, zj) in jrow.iter().zip(z.components()) {
                    v = v.add_jet(&dphi.mul_jet(zj));
                }
                row.extend(slots.iter().map(|s| v.coeff(s)));
            }
            rows.push(row);
        }
    }
    linalg::rank(&rows)
}

/// `dim M_k` as jet-space dimension minus the generic orbit dimension. Up to
/// three seeds are tried; the largest rank is the generic one.
pub fn orbit_dimension_rank(n: usize, k: usize, seed: u64) -> u128 {
    let full = group_jet_dimension(n, k);
    let mut best = 0;
    for s in 0..3 {
        best = best.max(action_rank(n, k, seed.wrapping_add(s)) as u128);
        if best == full {
            break;
        }
    }
    jet_space_dimension(n, k) - best
}

/// Free coefficients of degree `≤ k` in the diffeomorphism normal form: the
/// `j`-th component ranges over the ideal of the first `j` generators.
pub fn normal_form_coefficient_count(n: usize, k: usize) -> u128 {
    let m = 2 * n;
    (1..m)
        .map(|j| {
            (1..=k)
                .map(|d| monomial_count(d, m) - monomial_count(d, m - j))
                .sum::<u128>()
        })
        .sum()
}

/// Computed dimensions next to the rational-function prediction
/// `t·n(2n−1)/(1−t)^{2n}` for the increments.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SeriesCoeffs {
    pub n: usize,
    pub max_order: usize,
    /// `dim M_0, ..., dim M_K`.
    pub dims: Vec<u128>,
    pub increments: Vec<u128>,
    /// Coefficients of the rational function, i.e. predicted increments.
    pub predicted_increments: Vec<u128>,
    /// Cumulative predicted dimensions.
    pub predicted_dims: Vec<u128>,
    pub agree: Vec<bool>,
    /// Rank-method dimensions for `k ≤ min(K, 3)`.
    pub rank_dims: Vec<u128>,
    pub rank_agree: bool,
    /// `dims_S(k)` read off as `increment(k+1)`, against `n(2n−1)·T(k, 2n)`.
    pub s_coeffs: Vec<u128>,
    pub s_predicted: Vec<u128>,
    pub s_agree: Vec<bool>,
}

pub fn poincare_series(n: usize, max_order: usize, seed: u64) -> SeriesCoeffs {
    let c = (n * (2 * n).saturating_sub(1)) as u128;
    let dims: Vec<u128> = (0..=max_order)
        .map(|k| if k == 0 { 0 } else { normal_form_coefficient_count(n, k) })
        .collect();
    let increments: Vec<u128> = (0..=max_order)
        .map(|k| if k == 0 { 0 } else { dims[k] - dims[k - 1] })
        .collect();
    let predicted_increments: Vec<u128> = (0..=max_order)
        .map(|k| if k == 0 { 0 } else { c * monomial_count(k - 1, 2 * n) })
        .collect();
    let predicted_dims: Vec<u128> = predicted_increments
        .iter()
        .scan(0u128, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let agree = dims.iter().zip(&predicted_dims).map(|(a, b)| a == b).collect();
    let rank_dims: Vec<u128> = (0..=max_order.min(3))
        .map(|k| if k == 0 { 0 } else { orbit_dimension_rank(n, k, seed) })
        .collect();
    let rank_agree = rank_dims.iter().zip(&dims).all(|(a, b)| a == b);
    let s_coeffs: Vec<u128> = increments.iter().skip(1).copied().collect();
    let s_predicted: Vec<u128> = (0..max_order).map(|k| c * monomial_count(k, 2 * n)).collect();
    let s_agree = s_coeffs.iter().zip(&s_predicted).map(|(a, b)| a == b).collect();
    SeriesCoeffs {
        n,
        max_order,
        dims,
        increments,
        predicted_increments,
        predicted_dims,
        agree,
        rank_dims,
        rank_agree,
        s_coeffs,
        s_predicted,
        s_agree,
    }
}

impl std::fmt::Display for SeriesCoeffs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "{:>3} {:>10} {:>10} {:>6}", "k", "dim", "predicted", "agree")?;
        for k in 0..=self.max_order {
            writeln!(
                f,
                "{:>3} {:>10} {:>10} {:>6}",
                k, self.dims[k], self.predicted_dims[k], self.agree[k]
            )?;
        }
        write!(f, "rank method agrees for k <= {}: {}", self.rank_dims.len() - 1, self.rank_agree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(normal_form_coefficient_count(1, 2), 3);
        assert_eq!(normal_form_coefficient_count(2, 1), 6);
        assert_eq!(normal_form_coefficient_count(2, 2), 26);
        for n in 1..=4 {
            assert_eq!(normal_form_coefficient_count(n, 1), (n * (2 * n - 1)) as u128);
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(orbit_dimension_rank(1, 1, 0), 1);
        assert_eq!(orbit_dimension_rank(2, 1, 0), 6);
        assert_eq!(orbit_dimension_rank(2, 2, 0), 26);
    }

    #[test]
    fn series_examples() {
        let s = poincare_series(1, 4, 0);
        assert_eq!(s.dims, vec![0, 1, 3, 6, 10]);
        assert!(s.agree.iter().all(|&a| a));
        let s = poincare_series(2, 2, 0);
        assert_eq!(s.dims, vec![0, 6, 26]);
        assert_eq!(s.predicted_dims, vec![0, 6, 30]);
        assert_eq!(s.agree, vec![true, true, false]);
        assert!(s.rank_agree);
    }
}
