use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::space::VariableSpace;

/// The nested coordinate ideal `I_i = <q1, p1, q2, p2, ...>` (first `i`
/// generators, q before p in each pair).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealSpec {
    space: VariableSpace,
    level: usize,
    generators: Vec<usize>,
}

impl IdealSpec {
    /// `I_level` over the Darboux pairs of `space`. Level 0 is the zero ideal.
    pub fn new(space: VariableSpace, level: usize) -> Result<IdealSpec> {
        if level > 2 * space.n {
            return Err(Error::SpaceMismatch(format!(
                "ideal level {level} exceeds 2n = {}",
                2 * space.n
            )));
        }
        let generators = (0..level)
            .map(|k| {
                let i = k / 2 + 1;
                if k % 2 == 0 {
                    space.q(i)
                } else {
                    space.p(i)
                }
            })
            .collect();
        Ok(IdealSpec {
            space,
            level,
            generators,
        })
    }

    /// Ideal generated by an explicit list of variable indices.
    pub fn from_generators(space: VariableSpace, generators: Vec<usize>) -> IdealSpec {
        IdealSpec {
            space,
            level: generators.len(),
            generators,
        }
    }

    pub fn space(&self) -> VariableSpace {
        self.space
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Writes `f = Σ g_j * c_j` over the generators, giving each monomial to
    /// the first generator that divides it. Returns `None` if `f` is not in
    /// the ideal.
    pub fn split(&self, f: &Jet) -> Option<Vec<Jet>> {
        if !f.in_ideal(self) {
            return None;
        }
        let space = f.space();
        let order = f.order();
        let mut parts = vec![Vec::new(); self.generators.len()];
        for (e, c) in f.terms() {
            let k = self
                .generators
                .iter()
                .position(|&g| e[g] > 0)
                .expect("member monomial");
            let mut rest = e.clone();
            rest[self.generators[k]] -= 1;
            parts[k].push((rest, c));
        }
        Some(
            parts
                .into_iter()
                .map(|ts| {
                    let order = order.saturating_sub(1);
                    Jet::from_terms(space, order, ts.iter().map(|(e, c)| (e.as_slice(), c.clone())))
                })
                .collect(),
        )
    }
}

impl std::fmt::Display for IdealSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names = self.space.var_names();
        let gens: Vec<&str> = self.generators.iter().map(|&g| names[g].as_str()).collect();
        write!(f, "<{}>", gens.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::int;

    #[test]
    fn nested_generators_follow_reverse_order() {
        let s = VariableSpace::symplectic(2);
        let i3 = IdealSpec::new(s, 3).unwrap();
        assert_eq!(i3.generators(), &[s.q(1), s.p(1), s.q(2)]);
        assert_eq!(i3.to_string(), "<q1, p1, q2>");
        assert!(IdealSpec::new(s, 5).is_err());
    }

    #[test]
    fn split_reconstructs() {
        let s = VariableSpace::symplectic(2);
        let ideal = IdealSpec::new(s, 2).unwrap();
        let f = Jet::parse(s, 4, "3 q1 + p1 q1 + p1^2 p2 + 2 p1 q2^2").unwrap();
        let parts = ideal.split(&f).unwrap();
        let mut acc = Jet::zero(s, 4);
        for (g, c) in ideal.generators().iter().zip(&parts) {
            acc = &acc + &(&Jet::var(s, 4, *g) * c);
        }
        assert_eq!(acc, f);
        assert_eq!(parts[0].constant_term(), int(3));
        assert!(ideal.split(&Jet::parse(s, 4, "p2").unwrap()).is_none());
    }
}
