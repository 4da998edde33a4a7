//! Per-sensor decision rules and trajectory execution.
//!
//! A strategy maps an active sensor's private history (own observations plus
//! messages received from predecessors) to a decision: stop with a message
//! symbol, or stay blank and keep observing. `rollout` executes a full
//! strategy profile on a realized joint observation draw.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::belief::{self, BeliefError, PrivateHistory};
use crate::model::{Obs, Scenario, StoppingOutcome};

/// A sensor's decision at one time step: `Stop(u)` emits message symbol `u`
/// in `0..M` and deactivates the sensor; `Blank` continues.
///
/// The derived ordering (`Stop(0) < Stop(1) < ... < Blank`) is the canonical
/// tie-break order used throughout the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decision {
    Stop(usize),
    Blank,
}

impl Decision {
    pub fn is_blank(self) -> bool {
        matches!(self, Decision::Blank)
    }
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decision::Stop(u) => write!(f, "{u}"),
            Decision::Blank => write!(f, "b"),
        }
    }
}

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("sensor {sensor} still blank at the horizon t={t}")]
    BlankAtHorizon { sensor: usize, t: usize },
    #[error("preset does not fit this scenario: {0}")]
    WrongScenario(String),
    #[error("belief computation failed: {0}")]
    Belief(Box<BeliefError>),
}

impl From<BeliefError> for StrategyError {
    fn from(e: BeliefError) -> Self {
        StrategyError::Belief(Box::new(e))
    }
}

/// Canonical private-history key: time-ordered own observations plus the
/// per-predecessor message rows `msgs[s][k]` for `s = 1..t-1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HistKey {
    pub own_obs: Vec<Obs>,
    pub msgs: Vec<Vec<Decision>>,
}

impl HistKey {
    pub fn t(&self) -> usize {
        self.own_obs.len()
    }
}

/// Finite map from private histories to decisions, one table per time step.
///
/// Unmapped histories fall back to `default`; a `Blank` default at the
/// horizon is replaced by `Stop(0)` so every tabular rule is total.
#[derive(Debug, Clone)]
pub struct TabularStrategy {
    horizon: usize,
    tables: Vec<BTreeMap<HistKey, Decision>>,
    default: Decision,
}

impl TabularStrategy {
    pub fn new(horizon: usize, default: Decision) -> Self {
        TabularStrategy {
            horizon,
            tables: vec![BTreeMap::new(); horizon],
            default,
        }
    }

    pub fn insert(&mut self, key: HistKey, decision: Decision) {
        let t = key.t();
        assert!(t >= 1 && t <= self.horizon, "history time out of range");
        self.tables[t - 1].insert(key, decision);
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn lookup(&self, key: &HistKey) -> Decision {
        let t = key.t();
        let d = self.tables[t - 1].get(key).copied().unwrap_or(self.default);
        if t == self.horizon && d.is_blank() {
            Decision::Stop(0)
        } else {
            d
        }
    }

    pub fn entries(&self, t: usize) -> impl Iterator<Item = (&HistKey, Decision)> {
        self.tables[t - 1].iter().map(|(k, &d)| (k, d))
    }
}

/// One belief interval per stop message; `None` means the message is never
/// emitted for this message-history class.
#[derive(Debug, Clone)]
pub struct IntervalRule {
    /// `intervals[m] = Some((lo, hi))`: emit `m` when `pi` is in the closed
    /// interval.
    pub intervals: Vec<Option<(f64, f64)>>,
}

impl IntervalRule {
    /// Membership test in the preference order stop-1, stop-0, stop-2, ...;
    /// overlapping degenerate intervals resolve to stop-1 first.
    fn decide(&self, pi: f64) -> Decision {
        let m = self.intervals.len();
        let order = std::iter::once(1)
            .chain(std::iter::once(0))
            .chain(2..m)
            .take(m);
        for u in order {
            if let Some((lo, hi)) = self.intervals[u] {
                if pi >= lo && pi <= hi {
                    return Decision::Stop(u);
                }
            }
        }
        Decision::Blank
    }
}

/// Belief-threshold rule: per time step and per exact received-message
/// history, closed stop intervals over the posterior `pi`.
#[derive(Debug, Clone)]
pub struct ThresholdStrategy {
    horizon: usize,
    rules: Vec<BTreeMap<Vec<Vec<Decision>>, IntervalRule>>,
}

impl ThresholdStrategy {
    pub fn new(horizon: usize) -> Self {
        ThresholdStrategy {
            horizon,
            rules: vec![BTreeMap::new(); horizon],
        }
    }

    pub fn insert(&mut self, t: usize, msgs: Vec<Vec<Decision>>, rule: IntervalRule) {
        assert!(t >= 1 && t <= self.horizon);
        self.rules[t - 1].insert(msgs, rule);
    }

    pub fn rule(&self, t: usize, msgs: &[Vec<Decision>]) -> Option<&IntervalRule> {
        self.rules[t - 1].get(msgs)
    }
}

#[derive(Debug, Clone)]
pub enum Strategy {
    Tabular(TabularStrategy),
    Threshold(ThresholdStrategy),
}

/// One strategy per sensor.
#[derive(Debug, Clone)]
pub struct StrategyProfile {
    strategies: Vec<Strategy>,
}

impl StrategyProfile {
    pub fn new(strategies: Vec<Strategy>) -> Self {
        StrategyProfile { strategies }
    }

    pub fn sensor_count(&self) -> usize {
        self.strategies.len()
    }

    pub fn strategy(&self, sensor: usize) -> &Strategy {
        &self.strategies[sensor]
    }

    /// Copy of this profile with sensor `i`'s strategy replaced.
    pub fn with_replaced(&self, sensor: usize, strategy: Strategy) -> StrategyProfile {
        let mut strategies = self.strategies.clone();
        strategies[sensor] = strategy;
        StrategyProfile { strategies }
    }
}

/// Evaluates the decision rule of `hist.sensor` on its private history.
///
/// Threshold rules compute the posterior through the belief machinery, which
/// conditions on the rest of `profile`; tabular rules are plain lookups.
pub fn decide(
    scenario: &Scenario,
    profile: &StrategyProfile,
    hist: &PrivateHistory,
) -> Result<Decision, StrategyError> {
    let t = hist.t();
    let d = match profile.strategy(hist.sensor) {
        Strategy::Tabular(tab) => tab.lookup(&hist.key()),
        Strategy::Threshold(th) => {
            let pi = belief::posterior_from_history(scenario, profile, hist)?;
            match th.rule(t, &hist.msgs) {
                Some(rule) => rule.decide(pi.pi()),
                None => Decision::Blank,
            }
        }
    };
    if d.is_blank() && t == scenario.horizon() {
        return Err(StrategyError::BlankAtHorizon { sensor: hist.sensor, t });
    }
    Ok(d)
}

/// Full decision stream of one simulated run.
#[derive(Debug, Clone)]
pub(crate) struct SimTrace {
    /// `stream[t-1][i]` = decision emitted by sensor `i` at time `t`
    /// (blank after it stops).
    pub stream: Vec<Vec<Decision>>,
    /// `(tau, u)` once sensor `i` has stopped.
    pub stopped: Vec<Option<(usize, usize)>>,
}

impl SimTrace {
    /// Messages received by `sensor` at times `1..=t_upto`, one row per time,
    /// one entry per predecessor.
    pub fn messages_for(&self, scenario: &Scenario, sensor: usize, t_upto: usize) -> Vec<Vec<Decision>> {
        let preds = scenario.graph().preds(sensor);
        (0..t_upto)
            .map(|s| preds.iter().map(|&j| self.stream[s][j]).collect())
            .collect()
    }
}

/// Steps the message-passing dynamics forward through `t_max`.
///
/// `forced` overrides one sensor's decisions with a fixed sequence (its
/// observations are never read); all other sensors apply their strategies.
/// Sensors that have stopped emit blanks.
pub(crate) fn simulate(
    scenario: &Scenario,
    profile: &StrategyProfile,
    joint_obs: &[Vec<Obs>],
    forced: Option<(usize, &[Decision])>,
    t_max: usize,
) -> Result<SimTrace, StrategyError> {
    let n = scenario.sensor_count();
    let mut trace = SimTrace {
        stream: Vec::with_capacity(t_max),
        stopped: vec![None; n],
    };
    for t in 1..=t_max {
        let mut row = vec![Decision::Blank; n];
        for i in 0..n {
            if trace.stopped[i].is_some() {
                continue;
            }
            let d = match forced {
                Some((fi, seq)) if fi == i => seq[t - 1],
                _ => {
                    let hist = PrivateHistory {
                        sensor: i,
                        own_obs: joint_obs[i][..t].to_vec(),
                        msgs: trace.messages_for(scenario, i, t - 1),
                    };
                    decide(scenario, profile, &hist)?
                }
            };
            row[i] = d;
        }
        for (i, d) in row.iter().enumerate() {
            if let Decision::Stop(u) = *d {
                trace.stopped[i] = Some((t, u));
            }
        }
        trace.stream.push(row);
    }
    Ok(trace)
}

/// Executes a profile on one joint observation draw and returns every
/// sensor's stopping time and final decision.
pub fn rollout(
    scenario: &Scenario,
    profile: &StrategyProfile,
    joint_obs: &[Vec<Obs>],
) -> Result<StoppingOutcome, StrategyError> {
    let trace = simulate(scenario, profile, joint_obs, None, scenario.horizon())?;
    let mut stop_times = Vec::with_capacity(scenario.sensor_count());
    let mut decisions = Vec::with_capacity(scenario.sensor_count());
    for (i, s) in trace.stopped.iter().enumerate() {
        let (tau, u) = s.unwrap_or_else(|| panic!("sensor {i} did not stop by the horizon"));
        stop_times.push(tau);
        decisions.push(u);
    }
    Ok(StoppingOutcome { stop_times, decisions })
}

// ---------------------------------------------------------------------------
// Counterexample preset profiles
// ---------------------------------------------------------------------------

/// The three two-sensor profiles analyzed around the counterexample: two
/// threshold rules and the non-threshold signaling rule that beats them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetRule {
    Ex1,
    Ex2,
    NonThreshold,
}

impl std::str::FromStr for PresetRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ex1" => Ok(PresetRule::Ex1),
            "ex2" => Ok(PresetRule::Ex2),
            "non_threshold" | "non-threshold" => Ok(PresetRule::NonThreshold),
            other => Err(format!("unknown preset rule {other:?}")),
        }
    }
}

impl std::fmt::Display for PresetRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PresetRule::Ex1 => "ex1",
            PresetRule::Ex2 => "ex2",
            PresetRule::NonThreshold => "non_threshold",
        })
    }
}

fn check_counterexample_shape(scenario: &Scenario) -> Result<(), StrategyError> {
    let ok = scenario.sensor_count() == 2
        && scenario.horizon() == 3
        && scenario.message_alphabet() == 2
        && scenario.observations().alphabet_size(0) == 2
        && scenario.observations().alphabet_size(1) == 3
        && scenario.graph().preds(0) == [1]
        && scenario.graph().preds(1) == [0];
    if ok {
        Ok(())
    } else {
        Err(StrategyError::WrongScenario(
            "preset rules are defined only for the counterexample scenario".into(),
        ))
    }
}

/// Builds the full two-sensor profile for one of the named preset rules.
///
/// The prose fixing sensor 0's companion behavior covers only realized
/// message paths; off-path histories default to stopping with 0 at the
/// earliest legal time, which carries zero probability and leaves expected
/// costs unchanged.
pub fn preset_strategies(name: PresetRule, scenario: &Scenario) -> Result<StrategyProfile, StrategyError> {
    check_counterexample_shape(scenario)?;
    let all_msgs = [Decision::Stop(0), Decision::Stop(1), Decision::Blank];

    // Sensor 0 is the slow sensor whose third observation reveals H; it
    // reacts to sensor 1's t=1 message and otherwise waits.
    let mut s0 = TabularStrategy::new(3, Decision::Stop(0));
    for a in 0..2 {
        s0.insert(
            HistKey { own_obs: vec![a], msgs: vec![] },
            Decision::Blank,
        );
    }
    // Decision at t=2 as a function of sensor 1's t=1 message; the message
    // value that sends sensor 0 on to t=3 differs per preset.
    let (t2_rule, continue_msg): (Box<dyn Fn(Decision) -> Decision>, Decision) = match name {
        PresetRule::Ex1 => (
            Box::new(|m| match m {
                Decision::Stop(u) => Decision::Stop(u),
                Decision::Blank => Decision::Blank,
            }),
            Decision::Blank,
        ),
        PresetRule::Ex2 => (
            Box::new(|m| match m {
                Decision::Stop(0) => Decision::Stop(0),
                _ => Decision::Blank,
            }),
            Decision::Stop(1),
        ),
        PresetRule::NonThreshold => (
            Box::new(|m| match m {
                Decision::Stop(1) => Decision::Stop(1),
                Decision::Blank => Decision::Stop(0),
                _ => Decision::Blank,
            }),
            Decision::Stop(0),
        ),
    };
    for a in 0..2 {
        for b in 0..2 {
            for &m in &all_msgs {
                s0.insert(
                    HistKey { own_obs: vec![a, b], msgs: vec![vec![m]] },
                    t2_rule(m),
                );
            }
        }
    }
    // At t=3 the observation equals H; declare it.
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for &m2 in &all_msgs {
                    s0.insert(
                        HistKey {
                            own_obs: vec![a, b, c],
                            msgs: vec![vec![continue_msg], vec![m2]],
                        },
                        Decision::Stop(c),
                    );
                }
            }
        }
    }

    // Sensor 1's belief after its first observation is 1, 1/2 or 0 for
    // y = 0, 1, 2 respectively; the presets differ only in this map.
    let t1_map: [Decision; 3] = match name {
        PresetRule::Ex1 => [Decision::Stop(0), Decision::Blank, Decision::Stop(1)],
        PresetRule::Ex2 => [Decision::Stop(0), Decision::Stop(1), Decision::Stop(1)],
        PresetRule::NonThreshold => [Decision::Blank, Decision::Stop(0), Decision::Stop(1)],
    };
    let mut s1 = TabularStrategy::new(3, Decision::Stop(0));
    for (y, d) in t1_map.into_iter().enumerate() {
        s1.insert(HistKey { own_obs: vec![y], msgs: vec![] }, d);
    }
    // If still active at t=2, stop with 0 (the tabular default already does
    // this; entries are omitted on purpose).

    Ok(StrategyProfile::new(vec![
        Strategy::Tabular(s0),
        Strategy::Tabular(s1),
    ]))
}

// ---------------------------------------------------------------------------
// Strategy config loading
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum DecisionRepr {
    Stop(usize),
    Sym(String),
}

fn parse_decision(repr: &DecisionRepr) -> Result<Decision, String> {
    match repr {
        DecisionRepr::Stop(u) => Ok(Decision::Stop(*u)),
        DecisionRepr::Sym(s) if s == "b" => Ok(Decision::Blank),
        DecisionRepr::Sym(s) => Err(format!("expected message symbol or \"b\", got {s:?}")),
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum StrategyConfig {
    Tabular {
        #[serde(default)]
        default: Option<DecisionRepr>,
        entries: Vec<TabularEntry>,
    },
    Threshold {
        entries: Vec<ThresholdEntry>,
    },
}

#[derive(Debug, Deserialize)]
pub struct TabularEntry {
    pub obs: Vec<Obs>,
    pub msgs: Vec<Vec<DecisionRepr>>,
    pub decision: DecisionRepr,
}

#[derive(Debug, Deserialize)]
pub struct ThresholdEntry {
    pub t: usize,
    pub message_history: Vec<Vec<DecisionRepr>>,
    #[serde(default)]
    pub stop1: Option<(f64, f64)>,
    #[serde(default)]
    pub stop0: Option<(f64, f64)>,
    /// General M-ary form; overrides `stop0`/`stop1` when present.
    #[serde(default)]
    pub intervals: Option<Vec<Option<(f64, f64)>>>,
}

fn parse_msgs(rows: &[Vec<DecisionRepr>]) -> Result<Vec<Vec<Decision>>, String> {
    rows.iter()
        .map(|row| row.iter().map(parse_decision).collect())
        .collect()
}

/// Materializes one sensor's strategy from its config sub-document.
pub fn build_strategy(config: &StrategyConfig, scenario: &Scenario) -> Result<Strategy, String> {
    match config {
        StrategyConfig::Tabular { default, entries } => {
            let default = match default {
                Some(repr) => parse_decision(repr)?,
                None => Decision::Blank,
            };
            let mut tab = TabularStrategy::new(scenario.horizon(), default);
            for e in entries {
                if e.obs.is_empty() || e.obs.len() > scenario.horizon() {
                    return Err(format!("tabular entry has bad history length {}", e.obs.len()));
                }
                tab.insert(
                    HistKey { own_obs: e.obs.clone(), msgs: parse_msgs(&e.msgs)? },
                    parse_decision(&e.decision)?,
                );
            }
            Ok(Strategy::Tabular(tab))
        }
        StrategyConfig::Threshold { entries } => {
            let m = scenario.message_alphabet();
            let mut th = ThresholdStrategy::new(scenario.horizon());
            for e in entries {
                if e.t < 1 || e.t > scenario.horizon() {
                    return Err(format!("threshold entry time {} out of range", e.t));
                }
                let intervals = match &e.intervals {
                    Some(v) => {
                        if v.len() != m {
                            return Err(format!("expected {m} intervals, got {}", v.len()));
                        }
                        v.clone()
                    }
                    None => {
                        let mut v = vec![None; m];
                        v[0] = e.stop0;
                        v[1] = e.stop1;
                        v
                    }
                };
                th.insert(e.t, parse_msgs(&e.message_history)?, IntervalRule { intervals });
            }
            Ok(Strategy::Threshold(th))
        }
    }
}

/// Parses a JSON profile document: an array with one strategy config per
/// sensor.
pub fn profile_from_json(text: &str, scenario: &Scenario) -> Result<StrategyProfile, String> {
    let configs: Vec<StrategyConfig> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if configs.len() != scenario.sensor_count() {
        return Err(format!(
            "profile has {} strategies, scenario has {} sensors",
            configs.len(),
            scenario.sensor_count()
        ));
    }
    let strategies = configs
        .iter()
        .map(|c| build_strategy(c, scenario))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StrategyProfile::new(strategies))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::counterexample_scenario;

    fn ce() -> Scenario {
        counterexample_scenario(1.5, 0.4, 100.0).unwrap()
    }

    fn hist1(sensor: usize, y: Obs) -> PrivateHistory {
        PrivateHistory { sensor, own_obs: vec![y], msgs: vec![] }
    }

    #[test]
    fn preset_t1_decisions_match_the_belief_partition() {
        let s = ce();
        // Sensor 1's reachable beliefs at t=1 are pi=1 (y=0), 1/2 (y=1),
        // 0 (y=2).
        let ex1 = preset_strategies(PresetRule::Ex1, &s).unwrap();
        assert_eq!(decide(&s, &ex1, &hist1(1, 1)).unwrap(), Decision::Blank);
        let non = preset_strategies(PresetRule::NonThreshold, &s).unwrap();
        assert_eq!(decide(&s, &non, &hist1(1, 0)).unwrap(), Decision::Blank);
        assert_eq!(decide(&s, &non, &hist1(1, 1)).unwrap(), Decision::Stop(0));
        assert_eq!(decide(&s, &non, &hist1(1, 2)).unwrap(), Decision::Stop(1));
        let ex2 = preset_strategies(PresetRule::Ex2, &s).unwrap();
        assert_eq!(decide(&s, &ex2, &hist1(1, 1)).unwrap(), Decision::Stop(1));
        assert_eq!(decide(&s, &ex2, &hist1(1, 0)).unwrap(), Decision::Stop(0));
    }

    #[test]
    fn preset_rejects_other_scenarios() {
        let obs = crate::model::ObservationModel::new(vec![vec![
            [vec![0.5, 0.5], vec![0.5, 0.5]],
        ]])
        .unwrap();
        let graph = crate::model::CommGraph::new(1, []).unwrap();
        let s = Scenario::new(
            0.5,
            1,
            2,
            obs,
            graph,
            crate::model::OperationalCost::LinearPerSensor { rates: vec![1.0] },
            crate::model::TerminalCost::DecisionTable { table: vec![0.0, 1.0, 1.0, 0.0] },
        )
        .unwrap();
        assert!(matches!(
            preset_strategies(PresetRule::Ex1, &s),
            Err(StrategyError::WrongScenario(_))
        ));
    }

    #[test]
    fn rollout_traces_the_signaling_narrative() {
        let s = ce();
        // ex1 with y^2_1 = 0: sensor 1 is certain of H0, stops at t=1 with 0;
        // sensor 0 echoes at t=2.
        let ex1 = preset_strategies(PresetRule::Ex1, &s).unwrap();
        let outcome = rollout(&s, &ex1, &[vec![0, 0, 0], vec![0, 1, 1]]).unwrap();
        assert_eq!(outcome.stop_times, vec![2, 1]);
        assert_eq!(outcome.decisions[1], 0);
        assert_eq!(outcome.decisions[0], 0);

        // non_threshold with y^2_1 = 0: sensor 1 signals certainty by staying
        // blank; both stop at t=2 declaring 0.
        let non = preset_strategies(PresetRule::NonThreshold, &s).unwrap();
        let outcome = rollout(&s, &non, &[vec![0, 0, 0], vec![0, 1, 1]]).unwrap();
        assert_eq!(outcome.stop_times, vec![2, 2]);
        assert_eq!(outcome.decisions, vec![0, 0]);

        // non_threshold with y^2_1 = 2: sensor 1 declares 1, sensor 0 echoes.
        let outcome = rollout(&s, &non, &[vec![1, 0, 1], vec![2, 1, 1]]).unwrap();
        assert_eq!(outcome.stop_times, vec![2, 1]);
        assert_eq!(outcome.decisions, vec![1, 1]);

        // non_threshold with y^2_1 = 1: sensor 1 stops with 0, sensor 0 waits
        // for the noiseless observation at t=3.
        let outcome = rollout(&s, &non, &[vec![0, 1, 1], vec![1, 1, 1]]).unwrap();
        assert_eq!(outcome.stop_times, vec![3, 1]);
        assert_eq!(outcome.decisions, vec![1, 0]);
    }

    #[test]
    fn rollout_is_deterministic() {
        let s = ce();
        let non = preset_strategies(PresetRule::NonThreshold, &s).unwrap();
        let obs = [vec![0, 1, 0], vec![1, 1, 1]];
        let a = rollout(&s, &non, &obs).unwrap();
        let b = rollout(&s, &non, &obs).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stopped_sensor_emits_blank_forever() {
        let s = ce();
        let ex2 = preset_strategies(PresetRule::Ex2, &s).unwrap();
        let trace = simulate(&s, &ex2, &[vec![0, 0, 0], vec![1, 1, 1]], None, 3).unwrap();
        // Sensor 1 stops at t=1 under ex2; afterwards only blanks.
        assert!(matches!(trace.stream[0][1], Decision::Stop(_)));
        assert!(trace.stream[1][1].is_blank());
        assert!(trace.stream[2][1].is_blank());
    }

    #[test]
    fn interval_rule_ties_resolve_to_stop1() {
        let rule = IntervalRule { intervals: vec![Some((0.5, 0.5)), Some((0.5, 0.5))] };
        assert_eq!(rule.decide(0.5), Decision::Stop(1));
    }

    #[test]
    fn threshold_full_cover_never_blank_at_horizon() {
        let s = ce();
        // Sensor 1 stops immediately by threshold; sensor 0 covers [0,1] at
        // every t, so a rollout never raises BlankAtHorizon.
        let mut th0 = ThresholdStrategy::new(3);
        let all = IntervalRule { intervals: vec![Some((0.0, 0.5)), Some((0.5, 1.0))] };
        th0.insert(1, vec![], all.clone());
        let mut th1 = ThresholdStrategy::new(3);
        th1.insert(1, vec![], all);
        let profile = StrategyProfile::new(vec![Strategy::Threshold(th0), Strategy::Threshold(th1)]);
        let outcome = rollout(&s, &profile, &[vec![0, 0, 0], vec![1, 1, 1]]).unwrap();
        assert_eq!(outcome.stop_times, vec![1, 1]);
    }
}
