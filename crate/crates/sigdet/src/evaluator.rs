//! Expected-cost evaluation of a strategy profile: exact enumeration over all
//! observation trajectories and seeded Monte Carlo estimation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Hypothesis, Obs, Scenario};
use crate::strategy::{rollout, StrategyError, StrategyProfile};

/// Default cap on `prod_i |Y_i|^T` for exact evaluation, overridable with the
/// `SIGDET_BUDGET` environment variable or an explicit argument.
pub const DEFAULT_EXACT_BUDGET: f64 = 1e7;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("exact evaluation needs {needed:e} trajectories, budget is {budget:e}")]
    BudgetExceeded { needed: f64, budget: f64 },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// Compensated (Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Exact => f.write_str("exact"),
            Method::MonteCarlo { .. } => f.write_str("monte-carlo"),
        }
    }
}

/// Expected-cost breakdown for one profile.
///
/// An "error" is any run whose terminal cost is strictly positive; under the
/// symmetric detection tables this coincides with declaring the wrong
/// hypothesis, and under general tables it means "the terminal outcome was
/// penalized".
#[derive(Debug, Clone)]
pub struct CostReport {
    pub method: Method,
    pub expected_cost: f64,
    pub operational: f64,
    pub terminal: f64,
    pub error_prob: f64,
    /// Standard error of `expected_cost`; `None` for exact evaluation.
    pub stderr: Option<f64>,
    pub samples: Option<u64>,
    /// Total probability mass enumerated; 1 up to rounding for exact
    /// evaluation, 1 exactly for Monte Carlo.
    pub weight_sum: f64,
}

impl CostReport {
    pub const CSV_HEADER: &'static str =
        "profile,method,expected_cost,operational,terminal,error_prob,stderr,samples";

    /// One CSV row under [`Self::CSV_HEADER`]. Floats use shortest
    /// round-trip formatting, so parsing the row recovers the exact values.
    pub fn csv_row(&self, profile_name: &str) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            profile_name,
            self.method,
            self.expected_cost,
            self.operational,
            self.terminal,
            self.error_prob,
            self.stderr.map_or(String::new(), |s| s.to_string()),
            self.samples.map_or(String::new(), |s| s.to_string()),
        )
    }
}

/// Resolves the exact-evaluation budget: explicit argument, else the
/// `SIGDET_BUDGET` environment variable, else [`DEFAULT_EXACT_BUDGET`].
pub fn resolve_budget(explicit: Option<f64>) -> f64 {
    explicit
        .or_else(|| std::env::var("SIGDET_BUDGET").ok()?.parse().ok())
        .unwrap_or(DEFAULT_EXACT_BUDGET)
}

/// Exact expected total cost by enumerating hypotheses outermost and all
/// joint observation trajectories, pruning branches of zero probability.
pub fn exact_expected_cost(
    scenario: &Scenario,
    profile: &StrategyProfile,
    budget: Option<f64>,
) -> Result<CostReport, EvalError> {
    let budget = resolve_budget(budget);
    let needed = scenario.trajectory_count();
    if needed > budget {
        return Err(EvalError::BudgetExceeded { needed, budget });
    }

    let n = scenario.sensor_count();
    let t = scenario.horizon();
    let mut total = KahanSum::default();
    let mut op = KahanSum::default();
    let mut term = KahanSum::default();
    let mut err = KahanSum::default();
    let mut wsum = KahanSum::default();

    // Depth-first over (sensor, time) slots with the running likelihood;
    // a zero pmf entry kills the whole subtree immediately. Slot s covers
    // sensor s / T at time s % T + 1.
    fn walk(
        scenario: &Scenario,
        profile: &StrategyProfile,
        h: Hypothesis,
        joint: &mut Vec<Vec<Obs>>,
        slot: usize,
        weight: f64,
        acc: &mut [&mut KahanSum; 5],
    ) -> Result<(), EvalError> {
        let t = scenario.horizon();
        if slot == scenario.sensor_count() * t {
            let outcome = rollout(scenario, profile, joint)?;
            let o = scenario.operational_cost(&outcome);
            let a = scenario.terminal_cost(h, &outcome);
            acc[0].add(weight * (o + a));
            acc[1].add(weight * o);
            acc[2].add(weight * a);
            if a > 0.0 {
                acc[3].add(weight);
            }
            acc[4].add(weight);
            return Ok(());
        }
        let (i, step) = (slot / t, slot % t + 1);
        for y in 0..scenario.observations().alphabet_size(i) {
            let p = scenario.observations().pmf(i, step, h, y);
            if p == 0.0 {
                continue;
            }
            joint[i][step - 1] = y;
            walk(scenario, profile, h, joint, slot + 1, weight * p, acc)?;
        }
        Ok(())
    }

    let mut joint: Vec<Vec<Obs>> = vec![vec![0; t]; n];
    for h in Hypothesis::BOTH {
        let prior = scenario.prior(h);
        if prior == 0.0 {
            continue;
        }
        walk(
            scenario,
            profile,
            h,
            &mut joint,
            0,
            prior,
            &mut [&mut total, &mut op, &mut term, &mut err, &mut wsum],
        )?;
    }

    Ok(CostReport {
        method: Method::Exact,
        expected_cost: total.value(),
        operational: op.value(),
        terminal: term.value(),
        error_prob: err.value(),
        stderr: None,
        samples: None,
        weight_sum: wsum.value(),
    })
}

fn sample_from_pmf(rng: &mut impl Rng, pmf: impl Fn(Obs) -> f64, alphabet: usize) -> Obs {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for y in 0..alphabet {
        acc += pmf(y);
        if u < acc {
            return y;
        }
    }
    alphabet - 1
}

/// Monte Carlo estimate of the expected total cost with a seeded ChaCha
/// stream; identical `(scenario, profile, samples, seed)` reproduce the
/// estimate bit-for-bit.
pub fn monte_carlo_cost(
    scenario: &Scenario,
    profile: &StrategyProfile,
    samples: u64,
    seed: u64,
) -> Result<CostReport, EvalError> {
    assert!(samples >= 2, "need at least two samples for a variance estimate");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = scenario.sensor_count();
    let t = scenario.horizon();

    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut op = KahanSum::default();
    let mut term = KahanSum::default();
    let mut errs = 0u64;
    let mut joint: Vec<Vec<Obs>> = vec![vec![0; t]; n];

    for k in 1..=samples {
        let h = if rng.gen::<f64>() < scenario.p0() {
            Hypothesis::H0
        } else {
            Hypothesis::H1
        };
        for (i, seq) in joint.iter_mut().enumerate() {
            let alphabet = scenario.observations().alphabet_size(i);
            for step in 1..=t {
                seq[step - 1] =
                    sample_from_pmf(&mut rng, |y| scenario.observations().pmf(i, step, h, y), alphabet);
            }
        }
        let outcome = rollout(scenario, profile, &joint)?;
        let o = scenario.operational_cost(&outcome);
        let a = scenario.terminal_cost(h, &outcome);
        let x = o + a;
        // Welford update for mean and variance of the total cost.
        let delta = x - mean;
        mean += delta / k as f64;
        m2 += delta * (x - mean);
        op.add(o);
        term.add(a);
        if a > 0.0 {
            errs += 1;
        }
    }

    let variance = m2 / (samples - 1) as f64;
    Ok(CostReport {
        method: Method::MonteCarlo { samples, seed },
        expected_cost: mean,
        operational: op.value() / samples as f64,
        terminal: term.value() / samples as f64,
        error_prob: errs as f64 / samples as f64,
        stderr: Some((variance / samples as f64).sqrt()),
        samples: Some(samples),
        weight_sum: 1.0,
    })
}

/// Evaluates several named profiles exactly and returns them sorted by
/// ascending expected cost.
pub fn compare_profiles(
    scenario: &Scenario,
    profiles: &[(String, StrategyProfile)],
    budget: Option<f64>,
) -> Result<Vec<(String, CostReport)>, EvalError> {
    let mut out = profiles
        .iter()
        .map(|(name, p)| Ok((name.clone(), exact_expected_cost(scenario, p, budget)?)))
        .collect::<Result<Vec<_>, EvalError>>()?;
    out.sort_by(|a, b| a.1.expected_cost.total_cmp(&b.1.expected_cost));
    Ok(out)
}

/// Closed-form expected cost of the `ex1` preset on the counterexample.
pub fn ex1_closed_form(k: f64, r1: f64) -> f64 {
    k + r1 + (1.0 - r1) * (k + 1.0)
}

/// Closed-form expected cost of the `ex2` preset on the counterexample.
pub fn ex2_closed_form(k: f64, r1: f64) -> f64 {
    k + 2.0 - r1 / 2.0
}

/// Closed-form expected cost of the `non_threshold` preset on the
/// counterexample.
pub fn non_threshold_closed_form(k: f64, r1: f64) -> f64 {
    k + 2.0 * (1.0 - r1) + r1 * (k + 1.0) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::counterexample_scenario;
    use crate::strategy::{preset_strategies, PresetRule};

    #[test]
    fn exact_matches_the_closed_forms() {
        let (k, r1) = (1.5, 0.4);
        let s = counterexample_scenario(k, r1, 100.0).unwrap();
        for (preset, want) in [
            (PresetRule::Ex1, ex1_closed_form(k, r1)),
            (PresetRule::Ex2, ex2_closed_form(k, r1)),
            (PresetRule::NonThreshold, non_threshold_closed_form(k, r1)),
        ] {
            let profile = preset_strategies(preset, &s).unwrap();
            let report = exact_expected_cost(&s, &profile, None).unwrap();
            assert!(
                (report.expected_cost - want).abs() < 1e-12,
                "{preset:?}: {} != {want}",
                report.expected_cost
            );
            // The presets never misdeclare on this instance.
            assert_eq!(report.error_prob, 0.0);
            assert!((report.weight_sum - 1.0).abs() < 1e-12);
            assert!((report.operational + report.terminal - report.expected_cost).abs() < 1e-12);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let s = counterexample_scenario(1.5, 0.4, 100.0).unwrap();
        let profile = preset_strategies(PresetRule::Ex1, &s).unwrap();
        let err = exact_expected_cost(&s, &profile, Some(10.0));
        assert!(matches!(err, Err(EvalError::BudgetExceeded { .. })));
    }

    #[test]
    fn monte_carlo_is_reproducible_and_close() {
        let s = counterexample_scenario(1.5, 0.4, 100.0).unwrap();
        let profile = preset_strategies(PresetRule::NonThreshold, &s).unwrap();
        let a = monte_carlo_cost(&s, &profile, 20_000, 7).unwrap();
        let b = monte_carlo_cost(&s, &profile, 20_000, 7).unwrap();
        assert_eq!(a.expected_cost, b.expected_cost);
        let exact = exact_expected_cost(&s, &profile, None).unwrap();
        let stderr = a.stderr.unwrap();
        assert!(
            (a.expected_cost - exact.expected_cost).abs() < 6.0 * stderr,
            "MC {} vs exact {} (stderr {stderr})",
            a.expected_cost,
            exact.expected_cost
        );
    }

    #[test]
    fn compare_sorts_ascending() {
        let (k, r1) = (1.5, 0.4);
        let s = counterexample_scenario(k, r1, 100.0).unwrap();
        let profiles: Vec<(String, StrategyProfile)> = [
            PresetRule::Ex1,
            PresetRule::Ex2,
            PresetRule::NonThreshold,
        ]
        .iter()
        .map(|&p| (p.to_string(), preset_strategies(p, &s).unwrap()))
        .collect();
        let ranked = compare_profiles(&s, &profiles, None).unwrap();
        assert_eq!(ranked[0].0, "non_threshold");
        for w in ranked.windows(2) {
            assert!(w[0].1.expected_cost <= w[1].1.expected_cost);
        }
    }
}
