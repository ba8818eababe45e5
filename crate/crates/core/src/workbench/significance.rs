//! Two-sided tests for a difference between two success rates.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Discrete, Hypergeometric};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Which test produced a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    TwoProportionZ,
    FisherExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    pub p_value: f64,
    pub test: TestKind,
}

/// Compares `successes_a / runs_a` against `successes_b / runs_b`.
///
/// Uses the pooled two-proportion z-test, falling back to Fisher's exact
/// test when the pooled variance is zero or any expected cell count of the
/// 2×2 table is below 5.
pub fn significance(successes_a: u64, runs_a: u64, successes_b: u64, runs_b: u64) -> Result<Significance> {
    if runs_a == 0 || runs_b == 0 {
        return Err(Error::Config("significance needs at least one run per cell".into()));
    }
    if successes_a > runs_a || successes_b > runs_b {
        return Err(Error::Config("more successes than runs".into()));
    }
    let (na, nb) = (runs_a as f64, runs_b as f64);
    let pooled = (successes_a + successes_b) as f64 / (na + nb);
    let total = na + nb;
    let small = [na, nb]
        .into_iter()
        .flat_map(|n| [n * pooled, n * (1.0 - pooled)])
        .any(|expected| expected < 5.0);
    let var = pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb);
    if var <= 0.0 || small {
        return Ok(Significance { p_value: fisher_exact(successes_a, runs_a, successes_b, runs_b), test: TestKind::FisherExact });
    }
    debug_assert!(total > 0.0);
    let z = (successes_a as f64 / na - successes_b as f64 / nb) / var.sqrt();
    let p = erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0);
    Ok(Significance { p_value: p, test: TestKind::TwoProportionZ })
}

/// Two-sided Fisher exact test: total probability of tables no more likely
/// than the observed one, with margins fixed.
pub fn fisher_exact(successes_a: u64, runs_a: u64, successes_b: u64, runs_b: u64) -> f64 {
    let population = runs_a + runs_b;
    let successes = successes_a + successes_b;
    let Ok(h) = Hypergeometric::new(population, successes, runs_a) else { return 1.0 };
    let observed = h.pmf(successes_a);
    let lo = successes.saturating_sub(runs_b);
    let hi = successes.min(runs_a);
    let p: f64 = (lo..=hi).map(|k| h.pmf(k)).filter(|&q| q <= observed * (1.0 + 1e-7)).sum();
    p.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximal_separation_is_highly_significant() {
        let s = significance(100, 100, 0, 100).unwrap();
        assert!(s.p_value < 1e-10, "{s:?}");
    }

    #[test]
    fn identical_cells_give_one() {
        assert_eq!(significance(40, 100, 40, 100).unwrap().p_value, 1.0);
        let s = significance(20, 20, 20, 20).unwrap();
        assert_eq!(s.test, TestKind::FisherExact);
        assert!((s.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ninety_two_versus_seventy() {
        let s = significance(92, 100, 70, 100).unwrap();
        assert_eq!(s.test, TestKind::TwoProportionZ);
        assert!(s.p_value < 1e-4, "{s:?}");
    }

    #[test]
    fn fisher_matches_a_hand_computed_table() {
        // 3/3 vs 0/3: only the observed and the mirrored table are that extreme
        let p = fisher_exact(3, 3, 0, 3);
        assert!((p - 0.1).abs() < 1e-12, "{p}");
    }

    #[test]
    fn p_values_stay_in_the_unit_interval() {
        for a in 0..=12u64 {
            for b in 0..=12u64 {
                let p = significance(a, 12, b, 12).unwrap().p_value;
                assert!((0.0..=1.0).contains(&p));
            }
        }
    }

    #[test]
    fn empty_cells_are_rejected() {
        assert!(significance(0, 0, 1, 2).is_err());
    }
}
