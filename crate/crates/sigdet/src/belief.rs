//! Belief computations: posteriors over the hypothesis conditioned on a
//! sensor's private history, and sparse joint beliefs over the hypothesis and
//! the other sensors' observation histories.
//!
//! Message histories are deterministic functions of the other sensors'
//! observations (given their strategies and with the focal sensor silent), so
//! conditioning on messages means restricting to the compatible observation
//! histories. All updates follow that recipe: restrict, reweight by
//! likelihoods, normalize.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{Hypothesis, Obs, Scenario};
use crate::strategy::{self, Decision, HistKey, StrategyError, StrategyProfile};

#[derive(Debug, Error)]
pub enum BeliefError {
    #[error("the conditioning history has probability zero")]
    ZeroProbabilityHistory,
    #[error("observation has zero likelihood under the current belief")]
    ZeroLikelihood,
    #[error("no observation history of the other sensors is compatible with the messages")]
    NoCompatibleHistory,
    #[error("strategy evaluation failed during belief update: {0}")]
    Strategy(Box<StrategyError>),
}

impl From<StrategyError> for BeliefError {
    fn from(e: StrategyError) -> Self {
        BeliefError::Strategy(Box::new(e))
    }
}

/// Posterior probability of `H0`, validated to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Belief(f64);

impl Belief {
    pub fn new(pi: f64) -> Belief {
        assert!(
            pi.is_finite() && (-1e-12..=1.0 + 1e-12).contains(&pi),
            "belief {pi} outside [0, 1]"
        );
        Belief(pi.clamp(0.0, 1.0))
    }

    /// `P(H = H0 | ...)`.
    pub fn pi(self) -> f64 {
        self.0
    }
}

/// Everything a sensor has seen through time `t = own_obs.len()`: its own
/// observations `y_{1..t}` and the predecessor message rows for `s = 1..t-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateHistory {
    pub sensor: usize,
    pub own_obs: Vec<Obs>,
    pub msgs: Vec<Vec<Decision>>,
}

impl PrivateHistory {
    pub fn t(&self) -> usize {
        self.own_obs.len()
    }

    pub fn key(&self) -> HistKey {
        HistKey {
            own_obs: self.own_obs.clone(),
            msgs: self.msgs.clone(),
        }
    }
}

/// Enumerates every assignment of observation prefixes `y^j_{1..t}` to the
/// sensors `j != sensor`; slot `sensor` stays empty in each result.
pub(crate) fn others_obs_histories(scenario: &Scenario, sensor: usize, t: usize) -> Vec<Vec<Vec<Obs>>> {
    let n = scenario.sensor_count();
    let mut out = vec![vec![Vec::new(); n]];
    for j in 0..n {
        if j == sensor {
            continue;
        }
        let alphabet = scenario.observations().alphabet_size(j);
        for _ in 0..t {
            let mut next = Vec::with_capacity(out.len() * alphabet);
            for partial in &out {
                for y in 0..alphabet {
                    let mut ext = partial.clone();
                    ext[j].push(y);
                    next.push(ext);
                }
            }
            out = next;
        }
    }
    out
}

/// Likelihood of the other sensors' observation prefixes under `h`.
pub(crate) fn others_likelihood(
    scenario: &Scenario,
    sensor: usize,
    others: &[Vec<Obs>],
    h: Hypothesis,
) -> f64 {
    (0..scenario.sensor_count())
        .filter(|&j| j != sensor)
        .map(|j| scenario.observations().seq_prob(j, &others[j], h))
        .product()
}

/// The deterministic map from the other sensors' observations to the message
/// rows one sensor receives, holding that sensor silent.
///
/// Silence is the right counterfactual: a sensor's belief must not condition
/// on its own future decisions, and while it is still deliberating it has
/// emitted only blanks.
pub struct SystemMap<'a> {
    scenario: &'a Scenario,
    profile: &'a StrategyProfile,
    sensor: usize,
}

impl<'a> SystemMap<'a> {
    pub fn new(scenario: &'a Scenario, profile: &'a StrategyProfile, sensor: usize) -> Self {
        SystemMap { scenario, profile, sensor }
    }

    /// Message rows received by the focal sensor at times `1..=t_max`.
    ///
    /// `others` is indexed by absolute sensor id (the focal slot is ignored)
    /// and each non-focal slot must cover at least `t_max` observations.
    pub fn messages(&self, others: &[Vec<Obs>], t_max: usize) -> Result<Vec<Vec<Decision>>, StrategyError> {
        let blanks = vec![Decision::Blank; t_max];
        let trace = strategy::simulate(
            self.scenario,
            self.profile,
            others,
            Some((self.sensor, &blanks)),
            t_max,
        )?;
        Ok(trace.messages_for(self.scenario, self.sensor, t_max))
    }
}

/// Sparse joint distribution over `(h, other sensors' observation prefixes)`
/// from one sensor's point of view; only strictly positive atoms are stored.
#[derive(Debug, Clone)]
pub struct JointBelief {
    pub sensor: usize,
    /// Length of the stored observation prefixes.
    pub t: usize,
    entries: BTreeMap<(usize, Vec<Vec<Obs>>), f64>,
}

impl JointBelief {
    fn from_entries(
        sensor: usize,
        t: usize,
        entries: BTreeMap<(usize, Vec<Vec<Obs>>), f64>,
    ) -> JointBelief {
        JointBelief { sensor, t, entries }
    }

    pub fn entries(&self) -> impl Iterator<Item = (Hypothesis, &[Vec<Obs>], f64)> {
        self.entries
            .iter()
            .map(|((h, obs), &p)| (Hypothesis::from_index(*h), obs.as_slice(), p))
    }

    /// Marginal probability of the hypothesis.
    pub fn marginal(&self, h: Hypothesis) -> f64 {
        self.entries
            .iter()
            .filter(|((hi, _), _)| *hi == h.index())
            .map(|(_, &p)| p)
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum()
    }
}

/// Exact posterior `P(H0 | private history)` computed from first principles:
/// enumerate the other sensors' observation prefixes, keep those whose induced
/// messages match the history, and apply Bayes with the prior and the own
/// observation likelihood.
pub fn posterior_from_history(
    scenario: &Scenario,
    profile: &StrategyProfile,
    hist: &PrivateHistory,
) -> Result<Belief, BeliefError> {
    let t = hist.t();
    if t == 0 {
        return Ok(Belief::new(scenario.p0()));
    }
    let map = SystemMap::new(scenario, profile, hist.sensor);
    let others = others_obs_histories(scenario, hist.sensor, t - 1);
    let mut w = [0.0f64; 2];
    for h in Hypothesis::BOTH {
        let own = scenario
            .observations()
            .seq_prob(hist.sensor, &hist.own_obs, h);
        if scenario.prior(h) * own == 0.0 {
            continue;
        }
        let mut z = 0.0;
        for yo in &others {
            let lik = others_likelihood(scenario, hist.sensor, yo, h);
            if lik == 0.0 {
                continue;
            }
            if map.messages(yo, t - 1)? == hist.msgs {
                z += lik;
            }
        }
        w[h.index()] = scenario.prior(h) * own * z;
    }
    let total = w[0] + w[1];
    if total <= 0.0 {
        return Err(BeliefError::ZeroProbabilityHistory);
    }
    Ok(Belief::new(w[0] / total))
}

/// One private Bayes step: update `pi` after observing a symbol with
/// likelihoods `f0` under `H0` and `f1` under `H1`.
pub fn bayes_step(belief: Belief, f0: f64, f1: f64) -> Result<Belief, BeliefError> {
    let pi = belief.pi();
    let den = f0 * pi + f1 * (1.0 - pi);
    if den <= 0.0 {
        return Err(BeliefError::ZeroLikelihood);
    }
    Ok(Belief::new(f0 * pi / den))
}

/// Reconstructs the joint belief over `(h, y^{-i}_{1..t})` from the scalar
/// summary `pi` and the received messages, where `t = msgs.len() + 1`.
///
/// Conditioned on `h`, the compatible observation prefixes are reweighted by
/// their likelihood and normalized per hypothesis; the hypothesis marginals
/// are pinned to `(pi, 1 - pi)`. This is exactly why `pi` plus the message
/// history determines the joint belief.
pub fn rho_from_pi(
    scenario: &Scenario,
    profile: &StrategyProfile,
    sensor: usize,
    pi: Belief,
    msgs: &[Vec<Decision>],
) -> Result<JointBelief, BeliefError> {
    let t = msgs.len() + 1;
    let map = SystemMap::new(scenario, profile, sensor);
    let others = others_obs_histories(scenario, sensor, t);
    let weight = [pi.pi(), 1.0 - pi.pi()];
    let mut entries = BTreeMap::new();
    for h in Hypothesis::BOTH {
        if weight[h.index()] == 0.0 {
            continue;
        }
        let mut compatible = Vec::new();
        let mut z = 0.0;
        for yo in &others {
            let lik = others_likelihood(scenario, sensor, yo, h);
            if lik == 0.0 {
                continue;
            }
            // Messages through t-1 depend only on observations through t-1,
            // which the length-t prefixes cover.
            if map.messages(yo, t - 1)? == msgs {
                z += lik;
                compatible.push((yo.clone(), lik));
            }
        }
        if z <= 0.0 {
            return Err(BeliefError::NoCompatibleHistory);
        }
        for (yo, lik) in compatible {
            entries.insert((h.index(), yo), weight[h.index()] * lik / z);
        }
    }
    Ok(JointBelief::from_entries(sensor, t, entries))
}

/// Conditions a joint belief on the message row observed at time `t`
/// (the prefix length of `rho`): atoms whose induced time-`t` messages differ
/// are dropped and the rest renormalized.
pub fn sigma_update(
    scenario: &Scenario,
    profile: &StrategyProfile,
    rho: &JointBelief,
    new_msgs: &[Decision],
) -> Result<JointBelief, BeliefError> {
    let map = SystemMap::new(scenario, profile, rho.sensor);
    let t = rho.t;
    let mut kept = BTreeMap::new();
    let mut z = 0.0;
    for (h, yo, p) in rho.entries() {
        let rows = map.messages(yo, t)?;
        if rows[t - 1] == new_msgs {
            z += p;
            kept.insert((h.index(), yo.to_vec()), p);
        }
    }
    if z <= 0.0 {
        return Err(BeliefError::NoCompatibleHistory);
    }
    for p in kept.values_mut() {
        *p /= z;
    }
    Ok(JointBelief::from_entries(rho.sensor, t, kept))
}

/// One full information-state update: from `(pi_t, past messages)` plus the
/// time-`t` message row and the time-`t+1` own observation, to `pi_{t+1}`.
///
/// Composes the three primitive steps (joint reconstruction, message
/// conditioning, private Bayes step) and must agree with
/// `posterior_from_history` on the extended history.
pub fn lemma1_update(
    scenario: &Scenario,
    profile: &StrategyProfile,
    sensor: usize,
    pi: Belief,
    past_msgs: &[Vec<Decision>],
    new_msgs: &[Decision],
    y_next: Obs,
) -> Result<Belief, BeliefError> {
    let t = past_msgs.len() + 1;
    assert!(t < scenario.horizon(), "no observation arrives after the horizon");
    let rho = rho_from_pi(scenario, profile, sensor, pi, past_msgs)?;
    let sigma = sigma_update(scenario, profile, &rho, new_msgs)?;
    let s0 = sigma.marginal(Hypothesis::H0);
    let s1 = sigma.marginal(Hypothesis::H1);
    let f0 = scenario.observations().pmf(sensor, t + 1, Hypothesis::H0, y_next);
    let f1 = scenario.observations().pmf(sensor, t + 1, Hypothesis::H1, y_next);
    bayes_step(Belief::new(s0 / (s0 + s1)), f0, f1)
}
