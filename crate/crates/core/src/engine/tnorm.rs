use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A t-norm family. `Max` names the Gödel family by its disjunction: its
/// conjunction is `min` and its disjunction `max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TNorm {
    Product,
    Max,
    Lukasiewicz,
}

impl fmt::Display for TNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TNorm::Product => "product",
            TNorm::Max => "max",
            TNorm::Lukasiewicz => "lukasiewicz",
        })
    }
}

impl FromStr for TNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "product" => Ok(TNorm::Product),
            "max" => Ok(TNorm::Max),
            "lukasiewicz" => Ok(TNorm::Lukasiewicz),
            other => Err(format!("unknown t-norm `{other}` (expected product, max or lukasiewicz)")),
        }
    }
}

/// Operators used at the four sites of one forward-chaining step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TNormConfig {
    /// Conjunction of the two body literals of a clause.
    pub and_literal: TNorm,
    /// Disjunction over bindings of the existential variables.
    pub or_exists: TNorm,
    /// Disjunction of a template's two clauses.
    pub or_clausal: TNorm,
    /// Disjunction of the previous valuation with the newly derived one.
    pub or_step: TNorm,
}

impl Default for TNormConfig {
    fn default() -> Self {
        TNormConfig {
            and_literal: TNorm::Product,
            or_exists: TNorm::Max,
            or_clausal: TNorm::Max,
            or_step: TNorm::Max,
        }
    }
}

impl TNormConfig {
    /// The operator choice of the original per-template system: `product` between steps.
    pub fn original() -> Self {
        TNormConfig { or_step: TNorm::Product, ..Self::default() }
    }
}

/// Slack for rounding in convex combinations, which can land an ulp or two above 1.
pub const RANGE_SLACK: f64 = 1e-12;

#[inline]
fn check_unit(a: f64, b: f64) {
    let unit = -RANGE_SLACK..=1.0 + RANGE_SLACK;
    debug_assert!(unit.contains(&a) && unit.contains(&b), "t-norm inputs outside [0,1]: {a}, {b}");
}

/// Fuzzy conjunction.
#[inline]
pub fn tnorm_and(a: f64, b: f64, kind: TNorm) -> f64 {
    check_unit(a, b);
    match kind {
        TNorm::Product => a * b,
        TNorm::Max => a.min(b),
        TNorm::Lukasiewicz => (a + b - 1.0).max(0.0),
    }
}

/// Fuzzy disjunction, the t-conorm dual of [`tnorm_and`].
#[inline]
pub fn tnorm_or(a: f64, b: f64, kind: TNorm) -> f64 {
    check_unit(a, b);
    match kind {
        TNorm::Product => a + b - a * b,
        TNorm::Max => a.max(b),
        TNorm::Lukasiewicz => (a + b).min(1.0),
    }
}

/// `(∂/∂a, ∂/∂b)` of [`tnorm_and`]; `min` routes to the first operand on ties.
#[inline]
pub(crate) fn and_partials(a: f64, b: f64, kind: TNorm) -> (f64, f64) {
    match kind {
        TNorm::Product => (b, a),
        TNorm::Max => {
            if a <= b {
                (1.0, 0.0)
            } else {
                (0.0, 1.0)
            }
        }
        TNorm::Lukasiewicz => {
            if a + b - 1.0 > 0.0 {
                (1.0, 1.0)
            } else {
                (0.0, 0.0)
            }
        }
    }
}

/// `(∂/∂a, ∂/∂b)` of [`tnorm_or`]; `max` routes to the first operand on ties.
#[inline]
pub(crate) fn or_partials(a: f64, b: f64, kind: TNorm) -> (f64, f64) {
    match kind {
        TNorm::Product => (1.0 - b, 1.0 - a),
        TNorm::Max => {
            if a >= b {
                (1.0, 0.0)
            } else {
                (0.0, 1.0)
            }
        }
        TNorm::Lukasiewicz => {
            if a + b < 1.0 {
                (1.0, 1.0)
            } else {
                (0.0, 0.0)
            }
        }
    }
}

/// Disjunction over a slice (closed form of the left fold).
#[inline]
pub(crate) fn or_reduce(values: &[f64], kind: TNorm) -> f64 {
    match kind {
        TNorm::Max => values.iter().copied().fold(0.0, f64::max),
        TNorm::Product => 1.0 - values.iter().map(|v| 1.0 - v).product::<f64>(),
        TNorm::Lukasiewicz => values.iter().sum::<f64>().min(1.0),
    }
}

/// Adds `upstream * ∂or_reduce/∂values[i]` into `grad[i]`.
pub(crate) fn or_reduce_backward(values: &[f64], kind: TNorm, upstream: f64, grad: &mut [f64]) {
    if upstream == 0.0 {
        return;
    }
    match kind {
        TNorm::Max => {
            let mut best = 0;
            for (i, &v) in values.iter().enumerate() {
                if v > values[best] {
                    best = i;
                }
            }
            grad[best] += upstream;
        }
        TNorm::Product => {
            // ∂/∂v_i = Π_{j≠i} (1 - v_j), via prefix and suffix products
            let mut prefix = 1.0;
            let mut suffix = vec![1.0; values.len() + 1];
            for i in (0..values.len()).rev() {
                suffix[i] = suffix[i + 1] * (1.0 - values[i]);
            }
            for (i, &v) in values.iter().enumerate() {
                grad[i] += upstream * prefix * suffix[i + 1];
                prefix *= 1.0 - v;
            }
        }
        TNorm::Lukasiewicz => {
            if values.iter().sum::<f64>() < 1.0 {
                for g in grad.iter_mut() {
                    *g += upstream;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const KINDS: [TNorm; 3] = [TNorm::Product, TNorm::Max, TNorm::Lukasiewicz];

    #[test]
    fn worked_values() {
        assert!((tnorm_and(0.5, 0.4, TNorm::Product) - 0.2).abs() < 1e-15);
        assert!((tnorm_or(0.5, 0.4, TNorm::Product) - 0.7).abs() < 1e-15);
        assert_eq!(tnorm_and(0.7, 0.2, TNorm::Lukasiewicz), 0.0);
        assert_eq!(tnorm_and(0.7, 0.2, TNorm::Max), 0.2);
        assert_eq!(tnorm_or(0.7, 0.2, TNorm::Max), 0.7);
        assert_eq!(tnorm_or(0.7, 0.6, TNorm::Lukasiewicz), 1.0);
    }

    #[test]
    fn max_ties_route_to_first_operand() {
        assert_eq!(and_partials(0.3, 0.3, TNorm::Max), (1.0, 0.0));
        assert_eq!(or_partials(0.3, 0.3, TNorm::Max), (1.0, 0.0));
        let mut g = [0.0; 3];
        or_reduce_backward(&[0.2, 0.7, 0.7], TNorm::Max, 1.0, &mut g);
        assert_eq!(g, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn parses_names() {
        for k in KINDS {
            assert_eq!(k.to_string().parse::<TNorm>().unwrap(), k);
        }
        assert!("min".parse::<TNorm>().is_err());
    }

    proptest! {
        #[test]
        fn identity_laws_and_range(x in 0.0f64..=1.0, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            for k in KINDS {
                prop_assert!((tnorm_and(x, 1.0, k) - x).abs() < 1e-15);
                prop_assert!((tnorm_or(x, 0.0, k) - x).abs() < 1e-15);
                prop_assert!((0.0..=1.0).contains(&tnorm_and(a, b, k)));
                prop_assert!((0.0..=1.0).contains(&tnorm_or(a, b, k)));
            }
        }

        #[test]
        fn reduce_matches_left_fold(values in proptest::collection::vec(0.0f64..=1.0, 1..8)) {
            for k in KINDS {
                let folded = values.iter().skip(1).fold(values[0], |acc, &v| tnorm_or(acc, v, k));
                prop_assert!((or_reduce(&values, k) - folded).abs() < 1e-12);
            }
        }

        #[test]
        fn reduce_gradient_matches_finite_differences(values in proptest::collection::vec(0.05f64..0.95, 1..6)) {
            // Łukasiewicz and max are piecewise linear; compare only away from kinks
            for k in [TNorm::Product] {
                let mut g = vec![0.0; values.len()];
                or_reduce_backward(&values, k, 1.0, &mut g);
                for i in 0..values.len() {
                    let h = 1e-6;
                    let mut up = values.clone();
                    up[i] += h;
                    let mut down = values.clone();
                    down[i] -= h;
                    let fd = (or_reduce(&up, k) - or_reduce(&down, k)) / (2.0 * h);
                    prop_assert!((fd - g[i]).abs() < 1e-6);
                }
            }
        }
    }
}
