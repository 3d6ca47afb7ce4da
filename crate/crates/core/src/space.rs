use serde::{Deserialize, Serialize};
use std::fmt;

/// Which coordinate model a space carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    /// `p1, q1, ..., pn, qn` with `dp ∧ dq`.
    Symplectic,
    /// `y, p1, q1, ..., pn, qn` with `dp ∧ dq` (kernel along `y`).
    Quasi,
    /// `x, y, p1, q1, ..., pn, qn` with `dx ∧ dy + dp ∧ dq`.
    Constrained,
}

/// An ordered coordinate system of one of the three kinds.
///
/// All symplectic pairing is positional: on even-dimensional spaces the pairs
/// are `(0,1), (2,3), ...`, on the quasi space `(1,2), (3,4), ...` with
/// coordinate 0 spanning the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VariableSpace {
    pub kind: SpaceKind,
    pub n: usize,
}

impl VariableSpace {
    pub const fn symplectic(n: usize) -> Self {
        VariableSpace { kind: SpaceKind::Symplectic, n }
    }

    pub const fn quasi(n: usize) -> Self {
        VariableSpace { kind: SpaceKind::Quasi, n }
    }

    pub const fn constrained(n: usize) -> Self {
        VariableSpace { kind: SpaceKind::Constrained, n }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            SpaceKind::Symplectic => 2 * self.n,
            SpaceKind::Quasi => 2 * self.n + 1,
            SpaceKind::Constrained => 2 * self.n + 2,
        }
    }

    pub fn is_even(&self) -> bool {
        self.dim().is_multiple_of(2)
    }

    /// Number of canonical pairs in the standard form.
    pub fn pairs(&self) -> usize {
        self.dim() / 2
    }

    /// Canonical pairs `(a, b)` of the standard form `Σ dx_a ∧ dx_b`.
    pub fn standard_pairs(&self) -> Vec<(usize, usize)> {
        let offset = if self.kind == SpaceKind::Quasi { 1 } else { 0 };
        (0..self.pairs())
            .map(|k| (offset + 2 * k, offset + 2 * k + 1))
            .collect()
    }

    pub fn var_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.dim());
        match self.kind {
            SpaceKind::Symplectic => {}
            SpaceKind::Quasi => names.push("y".to_string()),
            SpaceKind::Constrained => {
                names.push("x".to_string());
                names.push("y".to_string());
            }
        }
        for i in 1..=self.n {
            names.push(format!("p{i}"));
            names.push(format!("q{i}"));
        }
        names
    }

    pub fn var_name(&self, index: usize) -> String {
        self.var_names()[index].clone()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.var_names().iter().position(|v| v == name)
    }

    /// Index of `p_i` (1-based `i`).
    pub fn p(&self, i: usize) -> usize {
        self.momentum_offset() + 2 * (i - 1)
    }

    /// Index of `q_i` (1-based `i`).
    pub fn q(&self, i: usize) -> usize {
        self.momentum_offset() + 2 * (i - 1) + 1
    }

    fn momentum_offset(&self) -> usize {
        match self.kind {
            SpaceKind::Symplectic => 0,
            SpaceKind::Quasi => 1,
            SpaceKind::Constrained => 2,
        }
    }

    /// Even space of the same dimension with positional pairing.
    pub fn even_of_dim(dim: usize) -> Self {
        assert!(dim.is_multiple_of(2), "even dimension expected");
        VariableSpace::symplectic(dim / 2)
    }

    /// Quasi space of the given odd dimension.
    pub fn odd_of_dim(dim: usize) -> Self {
        assert!(dim % 2 == 1, "odd dimension expected");
        VariableSpace::quasi(dim / 2)
    }
}

impl fmt::Display for VariableSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            SpaceKind::Symplectic => "symplectic",
            SpaceKind::Quasi => "quasi",
            SpaceKind::Constrained => "constrained",
        };
        write!(f, "{kind}(n={})", self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_counts_follow_kind() {
        assert_eq!(VariableSpace::symplectic(3).dim(), 6);
        assert_eq!(VariableSpace::quasi(2).dim(), 5);
        assert_eq!(VariableSpace::constrained(1).dim(), 4);
        assert_eq!(VariableSpace::constrained(0).dim(), 2);
    }

    #[test]
    fn canonical_names() {
        assert_eq!(VariableSpace::quasi(1).var_names(), vec!["y", "p1", "q1"]);
        assert_eq!(
            VariableSpace::constrained(1).var_names(),
            vec!["x", "y", "p1", "q1"]
        );
        let s = VariableSpace::symplectic(2);
        assert_eq!(s.p(2), 2);
        assert_eq!(s.q(1), 1);
        assert_eq!(VariableSpace::quasi(2).standard_pairs(), vec![(1, 2), (3, 4)]);
    }
}
