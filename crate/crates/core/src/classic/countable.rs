use std::fmt;
use std::sync::Arc;

use super::component_pressure;
use crate::measures::LocallyConstantPotential;
use crate::symbolic::Sft;
use crate::Result;

type Rule = Arc<dyn Fn(usize, usize) -> bool + Send + Sync>;
type StateValue = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Markov shift on the states `1, 2, 3, ..` given by rules, together with
/// a potential depending on the current state.
#[derive(Clone)]
pub struct CountableSystem {
    pub name: String,
    transition: Rule,
    phi: StateValue,
}

impl fmt::Debug for CountableSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CountableSystem").field("name", &self.name).finish()
    }
}

impl CountableSystem {
    pub fn new(
        name: &str,
        transition: impl Fn(usize, usize) -> bool + Send + Sync + 'static,
        phi: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        CountableSystem {
            name: name.to_string(),
            transition: Arc::new(transition),
            phi: Arc::new(phi),
        }
    }

    /// Every transition allowed, zero potential.
    pub fn full() -> Self {
        Self::new("full", |_, _| true, |_| 0.0)
    }

    /// `n -> n - 1` for `n > 1`, and `1 -> anything`.
    pub fn renewal() -> Self {
        Self::new("renewal", |i, j| i == 1 || j + 1 == i, |_| 0.0)
    }

    /// One state with a loop; all other states are transient.
    pub fn single(c: f64) -> Self {
        Self::new("single", |i, j| i == 1 && j == 1, move |_| c)
    }

    pub fn allows(&self, i: usize, j: usize) -> bool {
        (self.transition)(i, j)
    }

    pub fn value(&self, state: usize) -> f64 {
        (self.phi)(state)
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct TruncationStep {
    pub size: usize,
    /// `None` when the truncation carries no infinite path.
    pub value: Option<f64>,
    pub notice: Option<String>,
}

/// Classical pressure of each finite truncation to states `1..=m`: the
/// maximum over its irreducible components.
pub fn truncation_pressure(system: &CountableSystem, sizes: &[usize]) -> Result<Vec<TruncationStep>> {
    sizes
        .iter()
        .map(|&m| {
            let matrix: Vec<Vec<u8>> = (1..=m)
                .map(|i| (1..=m).map(|j| system.allows(i, j) as u8).collect())
                .collect();
            let sft = match Sft::from_matrix(matrix) {
                Ok(s) => s,
                Err(e) => {
                    return Ok(TruncationStep {
                        size: m,
                        value: None,
                        notice: Some(format!("truncation skipped: {e}")),
                    })
                }
            };
            let values: Vec<f64> = (1..=m).map(|s| system.value(s)).collect();
            let phi = LocallyConstantPotential::symbol_values(&sft, &values)?;
            let best = component_pressure(&sft, &phi)?
                .into_iter()
                .map(|(_, p)| p.value)
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(TruncationStep {
                size: m,
                value: Some(best),
                notice: None,
            })
        })
        .collect()
}
