//! Single-sensor best response against a fixed profile: a backward dynamic
//! program over `(posterior, received-message history)` information states,
//! an exhaustive search oracle, structural verifiers for the value function
//! (concavity in the posterior, interval stop regions), and person-by-person
//! improvement.
//!
//! The DP never touches raw private histories in its backward pass: stop
//! costs come from the joint belief reconstructed from `(pi, messages)`, and
//! continuation values flow through the message-conditioning and Bayes-step
//! updates. Agreement with the exhaustive oracle is therefore evidence that
//! the scalar posterior really is a sufficient summary of the own-observation
//! history.

use std::collections::BTreeMap;
use std::io::Write;

use thiserror::Error;

use crate::belief::{
    self, others_likelihood, others_obs_histories, Belief, BeliefError, SystemMap,
};
use crate::evaluator::{self, EvalError, KahanSum};
use crate::model::{Hypothesis, Obs, Scenario};
use crate::strategy::{
    Decision, HistKey, IntervalRule, Strategy, StrategyError, StrategyProfile, TabularStrategy,
    ThresholdStrategy,
};

/// Default cap on the number of candidate strategies the exhaustive oracle
/// will evaluate.
pub const DEFAULT_BRUTE_BUDGET: f64 = 1e6;

/// Rounding width used to group exact posteriors into information states.
pub const PI_ROUND: f64 = 1e-9;

/// Maximum posterior mismatch tolerated when matching a predicted successor
/// belief to a computed information state.
const SUCCESSOR_MATCH_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver needs {needed:e} units of work, budget is {budget:e}")]
    BudgetExceeded { needed: f64, budget: f64 },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// An action available to an active sensor: stop with a message symbol, or
/// keep observing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Action {
    Stop(usize),
    Continue,
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Action::Stop(u) => write!(f, "stop{u}"),
            Action::Continue => f.write_str("continue"),
        }
    }
}

/// One information state of the focal sensor with its cost-to-go breakdown.
#[derive(Debug, Clone)]
pub struct StateRecord {
    pub t: usize,
    pub msgs: Vec<Vec<Decision>>,
    /// Posterior `P(H0 | state)`; the reach-weighted mean over grouped
    /// histories (they agree to within the rounding width).
    pub pi: f64,
    /// Probability of reaching this state (given the sensor never stops).
    pub reach: f64,
    /// Expected total system cost of stopping now with message `u`.
    pub stop_costs: Vec<f64>,
    /// Expected cost-to-go of staying blank; `None` at the horizon.
    pub continue_cost: Option<f64>,
    pub value: f64,
    pub argmin: Action,
    /// Private histories grouped into this state.
    pub members: Vec<HistKey>,
}

/// Backward-induction value table of the focal sensor, one record per
/// reachable information state.
#[derive(Debug, Clone)]
pub struct ValueTable {
    pub sensor: usize,
    /// `per_t[t-1]` = states at time `t`.
    pub per_t: Vec<Vec<StateRecord>>,
    /// Expected cost of the induced strategy, taken before the first
    /// observation.
    pub root_value: f64,
}

impl ValueTable {
    /// CSV rows for the whole table, columns
    /// `t,message_history,pi,V,cost_stop0,..,cost_continue,argmin`.
    /// Message rows are joined with `|`, entries within a row with `;`.
    pub fn write_csv<W: Write>(&self, m: usize, mut w: W) -> std::io::Result<()> {
        write!(w, "t,message_history,pi,V")?;
        for u in 0..m {
            write!(w, ",cost_stop{u}")?;
        }
        writeln!(w, ",cost_continue,argmin")?;
        for states in &self.per_t {
            for s in states {
                write!(w, "{},{},{},{}", s.t, format_msgs(&s.msgs), s.pi, s.value)?;
                for c in &s.stop_costs {
                    write!(w, ",{c}")?;
                }
                match s.continue_cost {
                    Some(c) => writeln!(w, ",{c},{}", s.argmin)?,
                    None => writeln!(w, ",,{}", s.argmin)?,
                }
            }
        }
        Ok(())
    }
}

pub fn format_msgs(msgs: &[Vec<Decision>]) -> String {
    msgs.iter()
        .map(|row| {
            row.iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(";")
        })
        .collect::<Vec<_>>()
        .join("|")
}

/// How private histories are aggregated into DP states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    /// Group by `(message history, rounded posterior)` — the information
    /// state of the theory.
    InfoState,
    /// One state per raw private history; used by the sufficiency check.
    History,
}

/// Best response of one sensor: the induced strategy, its exact expected
/// cost, and the full value table.
#[derive(Debug, Clone)]
pub struct BestResponse {
    pub sensor: usize,
    pub strategy: TabularStrategy,
    pub value: f64,
    pub table: ValueTable,
}

/// Reach weights of every positive-probability private history of `sensor`,
/// per hypothesis, while the sensor itself stays blank.
fn forward_histories(
    scenario: &Scenario,
    profile: &StrategyProfile,
    sensor: usize,
    budget: Option<f64>,
) -> Result<Vec<BTreeMap<HistKey, [f64; 2]>>, SolverError> {
    let budget = evaluator::resolve_budget(budget);
    let needed = scenario.trajectory_count();
    if needed > budget {
        return Err(SolverError::BudgetExceeded { needed, budget });
    }
    let t_total = scenario.horizon();
    let map = SystemMap::new(scenario, profile, sensor);
    let mut nodes: Vec<BTreeMap<HistKey, [f64; 2]>> = vec![BTreeMap::new(); t_total];

    // Own observation sequences with their per-hypothesis likelihoods.
    let alphabet = scenario.observations().alphabet_size(sensor);
    let mut own: Vec<(Vec<Obs>, [f64; 2])> = vec![(Vec::new(), [1.0, 1.0])];
    for t in 1..=t_total {
        let mut next = Vec::with_capacity(own.len() * alphabet);
        for (seq, lik) in &own {
            for y in 0..alphabet {
                let l = [
                    lik[0] * scenario.observations().pmf(sensor, t, Hypothesis::H0, y),
                    lik[1] * scenario.observations().pmf(sensor, t, Hypothesis::H1, y),
                ];
                if l[0] == 0.0 && l[1] == 0.0 {
                    continue;
                }
                let mut ext = seq.clone();
                ext.push(y);
                next.push((ext, l));
            }
        }
        own = next;
    }

    for yo in &others_obs_histories(scenario, sensor, t_total) {
        let olik = [
            others_likelihood(scenario, sensor, yo, Hypothesis::H0),
            others_likelihood(scenario, sensor, yo, Hypothesis::H1),
        ];
        if olik[0] == 0.0 && olik[1] == 0.0 {
            continue;
        }
        let msgs = map.messages(yo, t_total - 1)?;
        for (seq, slik) in &own {
            let w = [
                scenario.prior(Hypothesis::H0) * olik[0] * slik[0],
                scenario.prior(Hypothesis::H1) * olik[1] * slik[1],
            ];
            if w[0] == 0.0 && w[1] == 0.0 {
                continue;
            }
            // Adding the full-trajectory weight at every prefix yields the
            // exact marginal reach of each history once all trajectories
            // are in.
            for t in 1..=t_total {
                let key = HistKey {
                    own_obs: seq[..t].to_vec(),
                    msgs: msgs[..t - 1].to_vec(),
                };
                let e = nodes[t - 1].entry(key).or_insert([0.0; 2]);
                e[0] += w[0];
                e[1] += w[1];
            }
        }
    }
    Ok(nodes)
}

/// Expected total system cost if the focal sensor, in state
/// `(pi, msgs)` at time `t`, stops now with message `u`.
///
/// The joint belief over `(h, other sensors' observations)` is reconstructed
/// from the scalar state, then extended over the other sensors' future
/// observations while the dynamics run to the horizon.
fn stop_cost(
    scenario: &Scenario,
    profile: &StrategyProfile,
    sensor: usize,
    t: usize,
    pi: f64,
    msgs: &[Vec<Decision>],
    u: usize,
) -> Result<f64, SolverError> {
    let t_total = scenario.horizon();
    let rho = belief::rho_from_pi(scenario, profile, sensor, Belief::new(pi), msgs)?;
    let mut forced = vec![Decision::Blank; t_total];
    forced[t - 1] = Decision::Stop(u);

    // Future observation slots of the other sensors, in a fixed order.
    let slots: Vec<(usize, usize)> = (0..scenario.sensor_count())
        .filter(|&j| j != sensor)
        .flat_map(|j| (t + 1..=t_total).map(move |s| (j, s)))
        .collect();

    let mut acc = KahanSum::default();
    for (h, yo_prefix, p) in rho.entries() {
        let mut joint: Vec<Vec<Obs>> = yo_prefix
            .iter()
            .map(|seq| {
                let mut v = seq.clone();
                v.resize(t_total.max(v.len()), 0);
                v
            })
            .collect();
        extend_and_score(
            scenario, profile, sensor, h, &mut joint, &slots, 0, p, &forced, t, u, &mut acc,
        )?;
    }
    Ok(acc.value())
}

#[allow(clippy::too_many_arguments)]
fn extend_and_score(
    scenario: &Scenario,
    profile: &StrategyProfile,
    sensor: usize,
    h: Hypothesis,
    joint: &mut Vec<Vec<Obs>>,
    slots: &[(usize, usize)],
    depth: usize,
    weight: f64,
    forced: &[Decision],
    stop_t: usize,
    stop_u: usize,
    acc: &mut KahanSum,
) -> Result<(), SolverError> {
    if depth == slots.len() {
        let trace =
            crate::strategy::simulate(scenario, profile, joint, Some((sensor, forced)), scenario.horizon())?;
        let mut stop_times = Vec::with_capacity(scenario.sensor_count());
        let mut decisions = Vec::with_capacity(scenario.sensor_count());
        for (j, s) in trace.stopped.iter().enumerate() {
            if j == sensor {
                stop_times.push(stop_t);
                decisions.push(stop_u);
            } else {
                let (tau, u) = s.ok_or_else(|| {
                    SolverError::Internal(format!("sensor {j} never stopped in a scored run"))
                })?;
                stop_times.push(tau);
                decisions.push(u);
            }
        }
        let outcome = crate::model::StoppingOutcome { stop_times, decisions };
        acc.add(weight * scenario.total_cost(h, &outcome));
        return Ok(());
    }
    let (j, s) = slots[depth];
    for y in 0..scenario.observations().alphabet_size(j) {
        let p = scenario.observations().pmf(j, s, h, y);
        if p == 0.0 {
            continue;
        }
        joint[j][s - 1] = y;
        extend_and_score(
            scenario, profile, sensor, h, joint, slots, depth + 1, weight * p, forced, stop_t,
            stop_u, acc,
        )?;
    }
    Ok(())
}

struct Group {
    msgs: Vec<Vec<Decision>>,
    pi: f64,
    reach: f64,
    members: Vec<HistKey>,
}

/// Runs the backward dynamic program and returns the full value table.
pub fn value_table(
    scenario: &Scenario,
    profile: &StrategyProfile,
    sensor: usize,
    grouping: Grouping,
    budget: Option<f64>,
) -> Result<ValueTable, SolverError> {
    let nodes = forward_histories(scenario, profile, sensor, budget)?;
    let t_total = scenario.horizon();
    let m = scenario.message_alphabet();
    let mut per_t: Vec<Vec<StateRecord>> = vec![Vec::new(); t_total];

    for t in (1..=t_total).rev() {
        // Aggregate histories into states.
        let groups: Vec<Group> = match grouping {
            Grouping::History => nodes[t - 1]
                .iter()
                .map(|(key, w)| Group {
                    msgs: key.msgs.clone(),
                    pi: w[0] / (w[0] + w[1]),
                    reach: w[0] + w[1],
                    members: vec![key.clone()],
                })
                .collect(),
            Grouping::InfoState => {
                // Key: (message history, rounded pi); value: (pi-weighted
                // reach, total reach, member histories).
                type GroupAcc = (f64, f64, Vec<HistKey>);
                let mut agg: BTreeMap<(Vec<Vec<Decision>>, i64), GroupAcc> = BTreeMap::new();
                for (key, w) in &nodes[t - 1] {
                    let reach = w[0] + w[1];
                    let pi = w[0] / reach;
                    let pk = (pi / PI_ROUND).round() as i64;
                    let e = agg
                        .entry((key.msgs.clone(), pk))
                        .or_insert((0.0, 0.0, Vec::new()));
                    e.0 += pi * reach;
                    e.1 += reach;
                    e.2.push(key.clone());
                }
                agg.into_iter()
                    .map(|((msgs, _), (wpi, reach, members))| Group {
                        msgs,
                        pi: wpi / reach,
                        reach,
                        members,
                    })
                    .collect()
            }
        };

        // Successor lookups into the (already computed) layer t+1.
        let mut succ_by_hist: BTreeMap<&HistKey, usize> = BTreeMap::new();
        let mut succ_by_msgs: BTreeMap<&[Vec<Decision>], Vec<usize>> = BTreeMap::new();
        if t < t_total {
            for (idx, s) in per_t[t].iter().enumerate() {
                match grouping {
                    Grouping::History => {
                        succ_by_hist.insert(&s.members[0], idx);
                    }
                    Grouping::InfoState => {
                        succ_by_msgs.entry(&s.msgs).or_default().push(idx);
                    }
                }
            }
        }

        let mut layer = Vec::with_capacity(groups.len());
        for g in &groups {
            let stop_costs = (0..m)
                .map(|u| stop_cost(scenario, profile, sensor, t, g.pi, &g.msgs, u))
                .collect::<Result<Vec<_>, _>>()?;

            let continue_cost = if t == t_total {
                None
            } else {
                // Expected cost-to-go of staying blank: condition the joint
                // belief on each possible time-t message row and own next
                // observation, then read the successor state's value.
                let rho =
                    belief::rho_from_pi(scenario, profile, sensor, Belief::new(g.pi), &g.msgs)?;
                let map = SystemMap::new(scenario, profile, sensor);
                let mut by_row: BTreeMap<Vec<Decision>, f64> = BTreeMap::new();
                for (_, yo, p) in rho.entries() {
                    let rows = map.messages(yo, t)?;
                    *by_row.entry(rows[t - 1].clone()).or_insert(0.0) += p;
                }
                let mut acc = KahanSum::default();
                for (row, prob_row) in by_row {
                    if prob_row <= 0.0 {
                        continue;
                    }
                    let sigma = belief::sigma_update(scenario, profile, &rho, &row)?;
                    let s0 = sigma.marginal(Hypothesis::H0);
                    let s1 = sigma.marginal(Hypothesis::H1);
                    for y in 0..scenario.observations().alphabet_size(sensor) {
                        let f0 = scenario.observations().pmf(sensor, t + 1, Hypothesis::H0, y);
                        let f1 = scenario.observations().pmf(sensor, t + 1, Hypothesis::H1, y);
                        let den = f0 * s0 + f1 * s1;
                        if den <= 0.0 {
                            continue;
                        }
                        let pi_next = f0 * s0 / den;
                        let mut next_msgs = g.msgs.clone();
                        next_msgs.push(row.clone());
                        let v = match grouping {
                            Grouping::History => {
                                let mut own = g.members[0].own_obs.clone();
                                own.push(y);
                                let key = HistKey { own_obs: own, msgs: next_msgs };
                                let idx = succ_by_hist.get(&key).ok_or_else(|| {
                                    SolverError::Internal(format!(
                                        "missing successor history at t={}",
                                        t + 1
                                    ))
                                })?;
                                per_t[t][*idx].value
                            }
                            Grouping::InfoState => {
                                let cands = succ_by_msgs.get(next_msgs.as_slice()).ok_or_else(
                                    || {
                                        SolverError::Internal(format!(
                                            "no successor states for message history at t={}",
                                            t + 1
                                        ))
                                    },
                                )?;
                                let best = cands
                                    .iter()
                                    .min_by(|&&a, &&b| {
                                        (per_t[t][a].pi - pi_next)
                                            .abs()
                                            .total_cmp(&(per_t[t][b].pi - pi_next).abs())
                                    })
                                    .copied()
                                    .unwrap();
                                if (per_t[t][best].pi - pi_next).abs() > SUCCESSOR_MATCH_TOL {
                                    return Err(SolverError::Internal(format!(
                                        "successor belief {pi_next} has no state within {SUCCESSOR_MATCH_TOL} at t={}",
                                        t + 1
                                    )));
                                }
                                per_t[t][best].value
                            }
                        };
                        acc.add(prob_row * den * v);
                    }
                }
                Some(acc.value())
            };

            // Tie-break order: stop-0, stop-1, ..., continue.
            let mut value = f64::INFINITY;
            let mut argmin = Action::Stop(0);
            for (u, &c) in stop_costs.iter().enumerate() {
                if c < value {
                    value = c;
                    argmin = Action::Stop(u);
                }
            }
            if let Some(c) = continue_cost {
                if c < value {
                    value = c;
                    argmin = Action::Continue;
                }
            }

            layer.push(StateRecord {
                t,
                msgs: g.msgs.clone(),
                pi: g.pi,
                reach: g.reach,
                stop_costs,
                continue_cost,
                value,
                argmin,
                members: g.members.clone(),
            });
        }
        per_t[t - 1] = layer;
    }

    let root_value = per_t[0].iter().map(|s| s.reach * s.value).sum();
    Ok(ValueTable { sensor, per_t, root_value })
}

/// Computes one sensor's optimal reply to the rest of the profile by
/// backward induction over information states, and materializes it as a
/// tabular strategy over the reachable private histories.
pub fn best_response(
    scenario: &Scenario,
    profile: &StrategyProfile,
    sensor: usize,
    budget: Option<f64>,
) -> Result<BestResponse, SolverError> {
    let table = value_table(scenario, profile, sensor, Grouping::InfoState, budget)?;
    let mut strategy = TabularStrategy::new(scenario.horizon(), Decision::Blank);
    for states in &table.per_t {
        for s in states {
            let d = match s.argmin {
                Action::Stop(u) => Decision::Stop(u),
                Action::Continue => Decision::Blank,
            };
            for member in &s.members {
                strategy.insert(member.clone(), d);
            }
        }
    }
    Ok(BestResponse {
        sensor,
        value: table.root_value,
        strategy,
        table,
    })
}

/// Exhaustive best-response oracle: enumerates every assignment of actions to
/// the reachable private histories, evaluates each induced profile exactly,
/// and returns the first strict minimum in canonical order.
///
/// Candidates are ordered lexicographically with histories sorted by time
/// then key, and per-history actions in the order stop-0, ..,
/// stop-(M-1), blank (no blank at the horizon).
pub fn brute_force_best_response(
    scenario: &Scenario,
    profile: &StrategyProfile,
    sensor: usize,
    budget: Option<f64>,
) -> Result<(TabularStrategy, f64), SolverError> {
    let budget = budget.unwrap_or(DEFAULT_BRUTE_BUDGET);
    let nodes = forward_histories(scenario, profile, sensor, None)?;
    let t_total = scenario.horizon();
    let m = scenario.message_alphabet();

    let mut hists: Vec<HistKey> = Vec::new();
    let mut options: Vec<Vec<Decision>> = Vec::new();
    for t in 1..=t_total {
        for key in nodes[t - 1].keys() {
            let mut opts: Vec<Decision> = (0..m).map(Decision::Stop).collect();
            if t < t_total {
                opts.push(Decision::Blank);
            }
            hists.push(key.clone());
            options.push(opts);
        }
    }
    let candidates: f64 = options.iter().map(|o| o.len() as f64).product();
    if candidates > budget {
        return Err(SolverError::BudgetExceeded { needed: candidates, budget });
    }

    let mut digits = vec![0usize; hists.len()];
    let mut best: Option<(TabularStrategy, f64)> = None;
    loop {
        let mut tab = TabularStrategy::new(t_total, Decision::Stop(0));
        for (k, &d) in digits.iter().enumerate() {
            tab.insert(hists[k].clone(), options[k][d]);
        }
        let candidate = profile.with_replaced(sensor, Strategy::Tabular(tab.clone()));
        let cost = evaluator::exact_expected_cost(scenario, &candidate, None)?.expected_cost;
        // A candidate replaces the incumbent only on strict improvement, so
        // the earliest minimizer in enumeration order wins.
        if best.as_ref().is_none_or(|(_, b)| cost < *b) {
            best = Some((tab, cost));
        }
        // Odometer step, last digit fastest.
        let mut k = digits.len();
        loop {
            if k == 0 {
                return Ok(best.unwrap());
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < options[k].len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Structural verifiers
// ---------------------------------------------------------------------------

/// Witness that two histories mapped to the same information state disagree
/// on which actions are optimal.
#[derive(Debug, Clone)]
pub struct SufficiencyViolation {
    pub t: usize,
    pub msgs: Vec<Vec<Decision>>,
    pub pi: f64,
    pub hists: Vec<HistKey>,
}

#[derive(Debug, Clone)]
pub struct SufficiencyReport {
    pub groups_checked: usize,
    pub violations: Vec<SufficiencyViolation>,
}

impl SufficiencyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that the scalar posterior plus the message history is a sufficient
/// statistic for acting: all raw histories sharing an information state must
/// admit a common optimal action.
///
/// The per-history action costs come from the ungrouped (raw-history) DP, so
/// nothing here presumes the property being verified.
pub fn verify_info_state_sufficiency(
    scenario: &Scenario,
    profile: &StrategyProfile,
    sensor: usize,
    tol: f64,
    budget: Option<f64>,
) -> Result<SufficiencyReport, SolverError> {
    let table = value_table(scenario, profile, sensor, Grouping::History, budget)?;
    let mut groups_checked = 0;
    let mut violations = Vec::new();
    for states in &table.per_t {
        let mut groups: BTreeMap<(Vec<Vec<Decision>>, i64), Vec<&StateRecord>> = BTreeMap::new();
        for s in states {
            groups
                .entry((s.msgs.clone(), (s.pi / PI_ROUND).round() as i64))
                .or_default()
                .push(s);
        }
        for ((msgs, _), records) in groups {
            groups_checked += 1;
            // Intersect the near-optimal action sets across the group.
            let mut common: Option<Vec<Action>> = None;
            for r in &records {
                let mut near = Vec::new();
                for (u, &c) in r.stop_costs.iter().enumerate() {
                    if c <= r.value + tol {
                        near.push(Action::Stop(u));
                    }
                }
                if let Some(c) = r.continue_cost {
                    if c <= r.value + tol {
                        near.push(Action::Continue);
                    }
                }
                common = Some(match common {
                    None => near,
                    Some(prev) => prev.into_iter().filter(|a| near.contains(a)).collect(),
                });
            }
            if common.is_some_and(|c| c.is_empty()) {
                violations.push(SufficiencyViolation {
                    t: records[0].t,
                    msgs,
                    pi: records[0].pi,
                    hists: records.iter().map(|r| r.members[0].clone()).collect(),
                });
            }
        }
    }
    Ok(SufficiencyReport { groups_checked, violations })
}

/// A sampled point of the value function within one message-history class.
#[derive(Debug, Clone)]
pub struct ConcavityViolation {
    pub t: usize,
    pub msgs: Vec<Vec<Decision>>,
    pub pis: [f64; 3],
    pub values: [f64; 3],
    /// How far below the chord the middle value dips.
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct ConcavityReport {
    pub triples_checked: usize,
    pub violations: Vec<ConcavityViolation>,
}

impl ConcavityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks concavity of the value function in the posterior, separately per
/// time step and message history: every interior sampled point must lie on or
/// above the chord through its neighbors (within `tol`).
pub fn verify_concavity(table: &ValueTable, tol: f64) -> ConcavityReport {
    let mut triples_checked = 0;
    let mut violations = Vec::new();
    for states in &table.per_t {
        let mut by_msgs: BTreeMap<&[Vec<Decision>], Vec<&StateRecord>> = BTreeMap::new();
        for s in states {
            by_msgs.entry(&s.msgs).or_default().push(s);
        }
        for (_, mut group) in by_msgs {
            group.sort_by(|a, b| a.pi.total_cmp(&b.pi));
            for w in group.windows(3) {
                triples_checked += 1;
                let (a, b, c) = (w[0], w[1], w[2]);
                if c.pi - a.pi <= 0.0 {
                    continue;
                }
                let chord = a.value + (c.value - a.value) * (b.pi - a.pi) / (c.pi - a.pi);
                if b.value < chord - tol {
                    violations.push(ConcavityViolation {
                        t: b.t,
                        msgs: b.msgs.clone(),
                        pis: [a.pi, b.pi, c.pi],
                        values: [a.value, b.value, c.value],
                        gap: chord - b.value,
                    });
                }
            }
        }
    }
    ConcavityReport { triples_checked, violations }
}

/// A posterior at which the optimal-stop region of some message breaks
/// contiguity.
#[derive(Debug, Clone)]
pub struct IntervalViolation {
    pub t: usize,
    pub msgs: Vec<Vec<Decision>>,
    pub action: usize,
    pub pi: f64,
}

/// Result of the stop-region structure check, including a threshold strategy
/// assembled from the observed regions.
///
/// Scope note: the check (and the extracted thresholds) cover only the
/// posteriors reachable under the fixed profile — the DP samples the value
/// function, it does not evaluate it on a continuum.
#[derive(Debug, Clone)]
pub struct IntervalReport {
    pub groups_checked: usize,
    pub violations: Vec<IntervalViolation>,
    pub threshold: ThresholdStrategy,
}

impl IntervalReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that, per time step and message history, the set of sampled
/// posteriors where stop-`u` is optimal is contiguous (ties tolerated within
/// `tie_tol`), and that at the horizon some stop action is optimal
/// everywhere. Also assembles the interval rule implied by the table.
pub fn extract_intervals(table: &ValueTable, m: usize, tie_tol: f64) -> IntervalReport {
    let horizon = table.per_t.len();
    let mut threshold = ThresholdStrategy::new(horizon);
    let mut groups_checked = 0;
    let mut violations = Vec::new();
    for states in &table.per_t {
        let mut by_msgs: BTreeMap<&[Vec<Decision>], Vec<&StateRecord>> = BTreeMap::new();
        for s in states {
            by_msgs.entry(&s.msgs).or_default().push(s);
        }
        for (msgs, mut group) in by_msgs {
            groups_checked += 1;
            group.sort_by(|a, b| a.pi.total_cmp(&b.pi));
            let mut intervals: Vec<Option<(f64, f64)>> = vec![None; m];
            for (u, interval) in intervals.iter_mut().enumerate() {
                let optimal: Vec<usize> = group
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.stop_costs[u] <= s.value + tie_tol)
                    .map(|(k, _)| k)
                    .collect();
                if let (Some(&lo), Some(&hi)) = (optimal.first(), optimal.last()) {
                    for (k, rec) in group.iter().enumerate().take(hi + 1).skip(lo) {
                        if !optimal.contains(&k) {
                            violations.push(IntervalViolation {
                                t: rec.t,
                                msgs: msgs.to_vec(),
                                action: u,
                                pi: rec.pi,
                            });
                        }
                    }
                    *interval = Some((group[lo].pi, group[hi].pi));
                }
            }
            let t = group[0].t;
            if t == horizon {
                // Full coverage at the horizon: continuing is not available,
                // so some stop action is optimal at every sampled posterior.
                for s in &group {
                    let covered = (0..m).any(|u| s.stop_costs[u] <= s.value + tie_tol);
                    assert!(covered, "state at the horizon with no optimal stop action");
                }
            }
            threshold.insert(t, msgs.to_vec(), IntervalRule { intervals });
        }
    }
    IntervalReport { groups_checked, violations, threshold }
}

// ---------------------------------------------------------------------------
// Person-by-person improvement
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PbpResult {
    pub profile: StrategyProfile,
    /// Exact expected costs: the initial profile, then one entry after each
    /// single-sensor replacement.
    pub trace: Vec<f64>,
    pub rounds: usize,
}

/// Cycles best responses over the sensors until a full round improves the
/// exact expected cost by less than `tol` or `max_rounds` is hit.
pub fn person_by_person(
    scenario: &Scenario,
    initial: &StrategyProfile,
    max_rounds: usize,
    tol: f64,
    budget: Option<f64>,
) -> Result<PbpResult, SolverError> {
    let mut profile = initial.clone();
    let mut trace = vec![evaluator::exact_expected_cost(scenario, &profile, budget)?.expected_cost];
    let mut rounds = 0;
    for _ in 0..max_rounds {
        rounds += 1;
        let round_start = *trace.last().unwrap();
        for i in 0..scenario.sensor_count() {
            let br = best_response(scenario, &profile, i, budget)?;
            profile = profile.with_replaced(i, Strategy::Tabular(br.strategy));
            trace.push(evaluator::exact_expected_cost(scenario, &profile, budget)?.expected_cost);
        }
        if round_start - *trace.last().unwrap() < tol {
            break;
        }
    }
    Ok(PbpResult { profile, trace, rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::{exact_expected_cost, non_threshold_closed_form};
    use crate::model::{
        counterexample_scenario, CommGraph, ObservationModel, OperationalCost, Scenario,
        TerminalCost,
    };
    use crate::strategy::{preset_strategies, PresetRule};

    fn tiny_scenario() -> Scenario {
        // Two sensors, T = 2, binary alphabets, one-way edge 1 -> 0.
        let pmf0 = vec![
            [vec![0.7, 0.3], vec![0.2, 0.8]],
            [vec![0.6, 0.4], vec![0.4, 0.6]],
        ];
        let pmf1 = vec![
            [vec![0.8, 0.2], vec![0.3, 0.7]],
            [vec![0.5, 0.5], vec![0.5, 0.5]],
        ];
        let obs = ObservationModel::new(vec![pmf0, pmf1]).unwrap();
        let graph = CommGraph::new(2, [(1, 0)]).unwrap();
        Scenario::new(
            0.4,
            2,
            2,
            obs,
            graph,
            OperationalCost::LinearPerSensor { rates: vec![0.3, 0.2] },
            TerminalCost::DecisionTable {
                table: vec![0.0, 2.0, 0.0, 2.0, 3.0, 0.0, 3.0, 0.0],
            },
        )
        .unwrap()
    }

    fn always_stop_profile(scenario: &Scenario) -> StrategyProfile {
        let strategies = (0..scenario.sensor_count())
            .map(|_| Strategy::Tabular(TabularStrategy::new(scenario.horizon(), Decision::Stop(0))))
            .collect();
        StrategyProfile::new(strategies)
    }

    #[test]
    fn dp_root_value_matches_exact_evaluation_of_materialized_strategy() {
        let s = tiny_scenario();
        let profile = always_stop_profile(&s);
        for sensor in 0..2 {
            let br = best_response(&s, &profile, sensor, None).unwrap();
            let replaced = profile.with_replaced(sensor, Strategy::Tabular(br.strategy.clone()));
            let exact = exact_expected_cost(&s, &replaced, None).unwrap().expected_cost;
            assert!(
                (br.value - exact).abs() < 1e-10,
                "sensor {sensor}: DP {} vs exact {exact}",
                br.value
            );
        }
    }

    #[test]
    fn dp_matches_brute_force_on_the_tiny_scenario() {
        let s = tiny_scenario();
        let profile = always_stop_profile(&s);
        for sensor in 0..2 {
            let br = best_response(&s, &profile, sensor, None).unwrap();
            let (_, bf_value) = brute_force_best_response(&s, &profile, sensor, None).unwrap();
            assert!(
                (br.value - bf_value).abs() < 1e-10,
                "sensor {sensor}: DP {} vs brute force {bf_value}",
                br.value
            );
        }
    }

    #[test]
    fn grouped_and_ungrouped_dp_agree() {
        let s = tiny_scenario();
        let profile = always_stop_profile(&s);
        let a = value_table(&s, &profile, 0, Grouping::InfoState, None).unwrap();
        let b = value_table(&s, &profile, 0, Grouping::History, None).unwrap();
        assert!((a.root_value - b.root_value).abs() < 1e-10);
    }

    #[test]
    fn best_response_on_the_counterexample_recovers_the_signaling_value() {
        let (k, r1) = (1.5, 0.4);
        let s = counterexample_scenario(k, r1, 100.0).unwrap();
        // Fix sensor 1 to the non-threshold signaling rule; sensor 0's best
        // response must do at least as well as its preset companion.
        let profile = preset_strategies(PresetRule::NonThreshold, &s).unwrap();
        let br = best_response(&s, &profile, 0, None).unwrap();
        let preset_cost = non_threshold_closed_form(k, r1);
        assert!(
            br.value <= preset_cost + 1e-10,
            "BR value {} should not exceed the preset cost {preset_cost}",
            br.value
        );
        let replaced = profile.with_replaced(0, Strategy::Tabular(br.strategy.clone()));
        let exact = exact_expected_cost(&s, &replaced, None).unwrap().expected_cost;
        assert!((br.value - exact).abs() < 1e-10);
    }

    #[test]
    fn sufficiency_and_structure_hold_on_the_tiny_scenario() {
        let s = tiny_scenario();
        let profile = always_stop_profile(&s);
        let suff = verify_info_state_sufficiency(&s, &profile, 0, 1e-9, None).unwrap();
        assert!(suff.passed());
        let table = value_table(&s, &profile, 0, Grouping::InfoState, None).unwrap();
        let conc = verify_concavity(&table, 1e-9);
        assert!(conc.passed(), "{:?}", conc.violations);
        let ivl = extract_intervals(&table, s.message_alphabet(), 1e-9);
        assert!(ivl.passed(), "{:?}", ivl.violations);
    }

    #[test]
    fn corrupted_table_fails_concavity() {
        let s = tiny_scenario();
        let profile = always_stop_profile(&s);
        let mut table = value_table(&s, &profile, 0, Grouping::InfoState, None).unwrap();
        // Push one interior value far below its neighbors.
        let layer = table
            .per_t
            .iter_mut()
            .find(|l| {
                let mut by: BTreeMap<&[Vec<Decision>], usize> = BTreeMap::new();
                for s in l.iter() {
                    *by.entry(&s.msgs).or_default() += 1;
                }
                by.values().any(|&c| c >= 3)
            })
            .expect("a layer with three states in one message class");
        let msgs = layer[0].msgs.clone();
        let mut in_class: Vec<&mut StateRecord> =
            layer.iter_mut().filter(|s| s.msgs == msgs).collect();
        in_class.sort_by(|a, b| a.pi.total_cmp(&b.pi));
        in_class[1].value -= 1.0;
        let conc = verify_concavity(&table, 1e-9);
        assert!(!conc.passed());
    }

    #[test]
    fn lone_sensor_single_step_picks_the_cheaper_terminal_decision() {
        // N = 1, T = 1: the sensor must stop immediately, so the best
        // response is the pointwise argmin of the expected terminal costs.
        let obs = ObservationModel::new(vec![vec![[vec![0.5, 0.5], vec![0.5, 0.5]]]]).unwrap();
        let graph = CommGraph::new(1, []).unwrap();
        let scenario = Scenario::new(
            0.4,
            1,
            2,
            obs,
            graph,
            OperationalCost::LinearPerSensor { rates: vec![0.0] },
            TerminalCost::DecisionTable { table: vec![0.0, 5.0, 7.0, 0.0] },
        )
        .unwrap();
        let profile = always_stop_profile(&scenario);
        let br = best_response(&scenario, &profile, 0, None).unwrap();
        // pi stays at p0 = 0.4 (uninformative observation):
        // stop-0 costs (1 - 0.4) * 7 = 4.2, stop-1 costs 0.4 * 5 = 2.0.
        assert!((br.value - 2.0).abs() < 1e-12);
        for states in &br.table.per_t {
            for s in states {
                assert_eq!(s.argmin, Action::Stop(1));
            }
        }
    }

    #[test]
    fn person_by_person_trace_is_monotone() {
        let s = tiny_scenario();
        let start = always_stop_profile(&s);
        let result = person_by_person(&s, &start, 10, 1e-12, None).unwrap();
        for w in result.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "trace increased: {:?}", result.trace);
        }
        assert!(result.trace.last().unwrap() < result.trace.first().unwrap());
    }
}
