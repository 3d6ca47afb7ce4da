//! Normal-form pipelines for diffeomorphisms under symplectomorphisms and
//! for constrained Hamiltonian systems with a glancing constraint.

mod lemma;
mod theorem1;
mod theorem2;

pub use lemma::{isotropy_shape_check, isotropy_shape_check_level, lemma1_normalize, Lemma1Result};
pub use theorem1::{
    corollary1_parametrize, renumerate, renumerations, theorem1_normalize, NormalFormT1,
    Renumeration, SymplecticParam,
};
pub use theorem2::{
    check_glancing, derive_km_form, lemma3_normalize, theorem2_normalize, weierstrass_quadratic,
    GlancingReport, KMForm, NormalFormT2, Weierstrass,
};

use serde::Serialize;

/// One named verification step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

/// Named checks plus the jet order at which they were evaluated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub checks: Vec<Check>,
    pub certified_order: usize,
}

impl Certificate {
    pub fn new(order: usize) -> Self {
        Certificate {
            checks: Vec::new(),
            certified_order: order,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool) {
        self.checks.push(Check {
            name: name.into(),
            passed,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn lower_order(&mut self, order: usize) {
        self.certified_order = self.certified_order.min(order);
    }
}
