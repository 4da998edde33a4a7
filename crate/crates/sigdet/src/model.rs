//! Problem instances: hypothesis prior, finite observation models, the
//! directed communication graph, stopping/decision semantics and cost
//! specifications, plus builders for the standard special cases and the
//! two-sensor signaling counterexample.
//!
//! Sensors are indexed `0..N`. Time is 1-based: observations arrive at
//! `t = 1..=T` and every sensor must stop no later than the horizon `T`.

use std::collections::BTreeSet;

use serde::Deserialize;
use thiserror::Error;

/// Tolerance used when validating that a pmf row sums to one.
pub const PMF_TOL: f64 = 1e-12;

/// Observation symbols are indices into a sensor's finite alphabet.
pub type Obs = usize;

/// The binary hypothesis being detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    H0,
    H1,
}

impl Hypothesis {
    pub const BOTH: [Hypothesis; 2] = [Hypothesis::H0, Hypothesis::H1];

    /// 0 for `H0`, 1 for `H1`.
    pub fn index(self) -> usize {
        match self {
            Hypothesis::H0 => 0,
            Hypothesis::H1 => 1,
        }
    }

    pub fn from_index(h: usize) -> Hypothesis {
        match h {
            0 => Hypothesis::H0,
            1 => Hypothesis::H1,
            _ => panic!("hypothesis index out of range: {h}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("prior p0 = {0} is outside the open interval (0, 1)")]
    InvalidPrior(f64),
    #[error("pmf for sensor {sensor} at t={t} under H{h} sums to {sum}, expected 1")]
    PmfNotNormalized {
        sensor: usize,
        t: usize,
        h: usize,
        sum: f64,
    },
    #[error("probability {value} for sensor {sensor} at t={t} is outside [0, 1]")]
    ProbabilityOutOfRange { sensor: usize, t: usize, value: f64 },
    #[error("communication graph inconsistent: {0}")]
    GraphInconsistent(String),
    #[error("cost table incomplete: {0}")]
    CostTableIncomplete(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("scenario inconsistent: {0}")]
    Inconsistent(String),
    #[error("config error: {0}")]
    Config(String),
}

/// Per-sensor, per-time conditional pmfs `f_t^i(y | h)` over finite alphabets.
///
/// The alphabet of a sensor is fixed across time; only the pmf values may
/// vary with `t`.
#[derive(Debug, Clone)]
pub struct ObservationModel {
    /// `pmfs[i][t-1][h][y]`
    pmfs: Vec<Vec<[Vec<f64>; 2]>>,
}

impl ObservationModel {
    pub fn new(pmfs: Vec<Vec<[Vec<f64>; 2]>>) -> Result<Self, ModelError> {
        let model = ObservationModel { pmfs };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<(), ModelError> {
        for (i, per_time) in self.pmfs.iter().enumerate() {
            if per_time.is_empty() {
                return Err(ModelError::Inconsistent(format!(
                    "sensor {i} has no observation pmfs"
                )));
            }
            let alphabet = per_time[0][0].len();
            if alphabet == 0 {
                return Err(ModelError::Inconsistent(format!(
                    "sensor {i} has an empty observation alphabet"
                )));
            }
            for (t0, rows) in per_time.iter().enumerate() {
                for (h, row) in rows.iter().enumerate() {
                    if row.len() != alphabet {
                        return Err(ModelError::Inconsistent(format!(
                            "sensor {i} alphabet size changes at t={}",
                            t0 + 1
                        )));
                    }
                    let mut sum = 0.0;
                    for &p in row {
                        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                            return Err(ModelError::ProbabilityOutOfRange {
                                sensor: i,
                                t: t0 + 1,
                                value: p,
                            });
                        }
                        sum += p;
                    }
                    if (sum - 1.0).abs() > PMF_TOL {
                        return Err(ModelError::PmfNotNormalized {
                            sensor: i,
                            t: t0 + 1,
                            h,
                            sum,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn sensor_count(&self) -> usize {
        self.pmfs.len()
    }

    pub fn horizon(&self) -> usize {
        self.pmfs[0].len()
    }

    pub fn alphabet_size(&self, sensor: usize) -> usize {
        self.pmfs[sensor][0][0].len()
    }

    /// `f_t^i(y | h)` with 1-based `t`.
    pub fn pmf(&self, sensor: usize, t: usize, h: Hypothesis, y: Obs) -> f64 {
        self.pmfs[sensor][t - 1][h.index()][y]
    }

    /// Likelihood of an observation prefix `y_{1..=len}` under `h`.
    pub fn seq_prob(&self, sensor: usize, ys: &[Obs], h: Hypothesis) -> f64 {
        ys.iter()
            .enumerate()
            .map(|(t0, &y)| self.pmfs[sensor][t0][h.index()][y])
            .product()
    }
}

/// Directed communication graph: an edge `(i, j)` means sensor `j` observes
/// sensor `i`'s decisions.
#[derive(Debug, Clone)]
pub struct CommGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl CommGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ModelError> {
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        for &(a, b) in &edges {
            if a == b {
                return Err(ModelError::GraphInconsistent(format!("self-loop at sensor {a}")));
            }
            if a >= n || b >= n {
                return Err(ModelError::GraphInconsistent(format!(
                    "edge ({a}, {b}) references a sensor >= N = {n}"
                )));
            }
        }
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(a, b) in &edges {
            preds[b].push(a);
            succs[a].push(b);
        }
        Ok(CommGraph { n, edges, preds, succs })
    }

    pub fn sensor_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Senders to `i`, in increasing index order.
    pub fn preds(&self, i: usize) -> &[usize] {
        &self.preds[i]
    }

    /// Receivers of `i`'s decisions, in increasing index order.
    pub fn succs(&self, i: usize) -> &[usize] {
        &self.succs[i]
    }
}

/// Operational cost accrued while sensors are active.
#[derive(Debug, Clone)]
pub enum OperationalCost {
    /// `sum_i c_i * tau_i`.
    LinearPerSensor { rates: Vec<f64> },
    /// `sum_{t=1..T} c(A_t)` where `A_t` is the set of sensors with
    /// `tau >= t`; the table is indexed by the subset bitmask.
    ActiveSet { table: Vec<f64> },
}

/// Terminal cost incurred at the end of the run.
#[derive(Debug, Clone)]
pub enum TerminalCost {
    /// Two-sensor form: the decision of the sensor that stops later is the
    /// system decision; on a tie, sensor 0's decision counts. Cost is
    /// `mu * 1{decision != H}`.
    LastStopper { mu: f64 },
    /// `table[h][u]` applied to a designated fusion sensor's final decision.
    Fusion { sensor: usize, table: Vec<Vec<f64>> },
    /// General table over `(h, all final decisions)`, indexed by
    /// `h * M^N + sum_i u_i * M^i`.
    DecisionTable { table: Vec<f64> },
    /// Fully general table over `(h, decisions, stopping times)`, indexed by
    /// `(h * M^N + sum_i u_i * M^i) * T^N + sum_i (tau_i - 1) * T^i`.
    GeneralTable { table: Vec<f64> },
}

/// Per-sensor final decision and stopping time of one completed run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoppingOutcome {
    /// 1-based stopping times `tau_i`.
    pub stop_times: Vec<usize>,
    /// Final decisions, each in `0..M`.
    pub decisions: Vec<usize>,
}

/// A full problem instance.
#[derive(Debug, Clone)]
pub struct Scenario {
    p0: f64,
    horizon: usize,
    message_alphabet: usize,
    obs: ObservationModel,
    graph: CommGraph,
    operational: OperationalCost,
    terminal: TerminalCost,
}

impl Scenario {
    pub fn new(
        p0: f64,
        horizon: usize,
        message_alphabet: usize,
        obs: ObservationModel,
        graph: CommGraph,
        operational: OperationalCost,
        terminal: TerminalCost,
    ) -> Result<Self, ModelError> {
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(ModelError::InvalidPrior(p0));
        }
        if horizon == 0 {
            return Err(ModelError::ParameterOutOfRange("horizon must be >= 1".into()));
        }
        if message_alphabet < 2 {
            return Err(ModelError::ParameterOutOfRange(
                "message alphabet must have size >= 2".into(),
            ));
        }
        let n = graph.sensor_count();
        if obs.sensor_count() != n {
            return Err(ModelError::Inconsistent(format!(
                "observation model covers {} sensors, graph has {n}",
                obs.sensor_count()
            )));
        }
        if obs.horizon() != horizon {
            return Err(ModelError::Inconsistent(format!(
                "observation model covers {} time steps, horizon is {horizon}",
                obs.horizon()
            )));
        }
        match &operational {
            OperationalCost::LinearPerSensor { rates } => {
                if rates.len() != n {
                    return Err(ModelError::CostTableIncomplete(format!(
                        "expected {n} per-sensor rates, got {}",
                        rates.len()
                    )));
                }
                if rates.iter().any(|c| !c.is_finite() || *c < 0.0) {
                    return Err(ModelError::ParameterOutOfRange(
                        "per-sensor rates must be finite and >= 0".into(),
                    ));
                }
            }
            OperationalCost::ActiveSet { table } => {
                if table.len() != 1 << n {
                    return Err(ModelError::CostTableIncomplete(format!(
                        "active-set table must cover all {} subsets, got {} entries",
                        1 << n,
                        table.len()
                    )));
                }
                if table.iter().any(|c| !c.is_finite() || *c < 0.0) {
                    return Err(ModelError::ParameterOutOfRange(
                        "active-set costs must be finite and >= 0".into(),
                    ));
                }
            }
        }
        let m = message_alphabet;
        match &terminal {
            TerminalCost::LastStopper { mu } => {
                if !mu.is_finite() || *mu < 0.0 {
                    return Err(ModelError::ParameterOutOfRange(format!(
                        "last-stopper mu = {mu} must be finite and >= 0"
                    )));
                }
                if n != 2 {
                    return Err(ModelError::Inconsistent(
                        "last-stopper terminal cost requires exactly two sensors".into(),
                    ));
                }
            }
            TerminalCost::Fusion { sensor, table } => {
                if *sensor >= n {
                    return Err(ModelError::Inconsistent(format!(
                        "fusion sensor {sensor} >= N = {n}"
                    )));
                }
                if table.len() != 2 || table.iter().any(|row| row.len() != m) {
                    return Err(ModelError::CostTableIncomplete(format!(
                        "fusion table must be 2 x {m}"
                    )));
                }
                if table.iter().flatten().any(|c| !c.is_finite() || *c < 0.0) {
                    return Err(ModelError::ParameterOutOfRange(
                        "fusion costs must be finite and >= 0".into(),
                    ));
                }
            }
            TerminalCost::DecisionTable { table } => {
                let want = 2 * m.pow(n as u32);
                if table.len() != want {
                    return Err(ModelError::CostTableIncomplete(format!(
                        "decision table must have {want} entries, got {}",
                        table.len()
                    )));
                }
                if table.iter().any(|c| !c.is_finite() || *c < 0.0) {
                    return Err(ModelError::ParameterOutOfRange(
                        "decision-table costs must be finite and >= 0".into(),
                    ));
                }
            }
            TerminalCost::GeneralTable { table } => {
                let want = 2 * m.pow(n as u32) * horizon.pow(n as u32);
                if table.len() != want {
                    return Err(ModelError::CostTableIncomplete(format!(
                        "general table must have {want} entries, got {}",
                        table.len()
                    )));
                }
                if table.iter().any(|c| !c.is_finite() || *c < 0.0) {
                    return Err(ModelError::ParameterOutOfRange(
                        "general-table costs must be finite and >= 0".into(),
                    ));
                }
            }
        }
        Ok(Scenario {
            p0,
            horizon,
            message_alphabet,
            obs,
            graph,
            operational,
            terminal,
        })
    }

    pub fn sensor_count(&self) -> usize {
        self.graph.sensor_count()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Size of the stop-message alphabet (2 for binary decisions).
    pub fn message_alphabet(&self) -> usize {
        self.message_alphabet
    }

    pub fn prior(&self, h: Hypothesis) -> f64 {
        match h {
            Hypothesis::H0 => self.p0,
            Hypothesis::H1 => 1.0 - self.p0,
        }
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn observations(&self) -> &ObservationModel {
        &self.obs
    }

    pub fn graph(&self) -> &CommGraph {
        &self.graph
    }

    pub fn operational(&self) -> &OperationalCost {
        &self.operational
    }

    pub fn terminal(&self) -> &TerminalCost {
        &self.terminal
    }

    /// Number of joint observation trajectories `prod_i |Y_i|^T`.
    pub fn trajectory_count(&self) -> f64 {
        (0..self.sensor_count())
            .map(|i| (self.obs.alphabet_size(i) as f64).powi(self.horizon as i32))
            .product()
    }

    /// Operational part of the total cost for a completed run.
    pub fn operational_cost(&self, outcome: &StoppingOutcome) -> f64 {
        match &self.operational {
            OperationalCost::LinearPerSensor { rates } => outcome
                .stop_times
                .iter()
                .zip(rates)
                .map(|(&tau, &c)| c * tau as f64)
                .sum(),
            OperationalCost::ActiveSet { table } => {
                let mut total = 0.0;
                for t in 1..=self.horizon {
                    let mut mask = 0usize;
                    for (i, &tau) in outcome.stop_times.iter().enumerate() {
                        if tau >= t {
                            mask |= 1 << i;
                        }
                    }
                    total += table[mask];
                }
                total
            }
        }
    }

    /// Terminal part of the total cost for a completed run.
    pub fn terminal_cost(&self, h: Hypothesis, outcome: &StoppingOutcome) -> f64 {
        let m = self.message_alphabet;
        match &self.terminal {
            TerminalCost::LastStopper { mu } => {
                let responsible = if outcome.stop_times[0] >= outcome.stop_times[1] {
                    0
                } else {
                    1
                };
                if outcome.decisions[responsible] != h.index() {
                    *mu
                } else {
                    0.0
                }
            }
            TerminalCost::Fusion { sensor, table } => {
                table[h.index()][outcome.decisions[*sensor]]
            }
            TerminalCost::DecisionTable { table } => {
                let mut idx = 0usize;
                for &u in outcome.decisions.iter().rev() {
                    idx = idx * m + u;
                }
                table[h.index() * m.pow(self.sensor_count() as u32) + idx]
            }
            TerminalCost::GeneralTable { table } => {
                let n = self.sensor_count() as u32;
                let t = self.horizon;
                let mut dec_idx = 0usize;
                for &u in outcome.decisions.iter().rev() {
                    dec_idx = dec_idx * m + u;
                }
                let mut tau_idx = 0usize;
                for &tau in outcome.stop_times.iter().rev() {
                    tau_idx = tau_idx * t + (tau - 1);
                }
                table[(h.index() * m.pow(n) + dec_idx) * t.pow(n) + tau_idx]
            }
        }
    }

    /// Total system cost `O(tau) + A(h, decisions, taus)` for a completed run.
    pub fn total_cost(&self, h: Hypothesis, outcome: &StoppingOutcome) -> f64 {
        self.operational_cost(outcome) + self.terminal_cost(h, outcome)
    }
}

/// Default "sufficiently high" mistake cost for the counterexample: 100x the
/// worst-case operational cost of any trajectory (both sensors active for the
/// whole horizon).
pub fn counterexample_default_mu(k: f64) -> f64 {
    100.0 * 3.0 * k
}

/// The two-sensor instance on which a non-threshold rule strictly beats every
/// two-threshold rule: `N = 2`, `T = 3`, equal prior, bidirectional edges,
/// active-set operational cost with `c({0}) = c({1}) = 1` and
/// `c({0, 1}) = K`, last-stopper terminal cost.
///
/// Sensor 0 observes `{0, 1}` with symmetric flip probabilities
/// `q1 = q2 = 1/2`, `q3 = 1` (the third observation reveals `H` noiselessly).
/// Sensor 1 observes `{0, 1, 2}`: symbol 0 certifies `H0`, symbol 2 certifies
/// `H1`, each seen with probability `r1` at `t = 1` and never afterwards.
pub fn counterexample_scenario(k: f64, r1: f64, mu: f64) -> Result<Scenario, ModelError> {
    if !(k > 1.0 && k < 2.0) {
        return Err(ModelError::ParameterOutOfRange(format!(
            "K = {k} must lie in (1, 2)"
        )));
    }
    if !(r1 > 0.0 && r1 < 1.0) {
        return Err(ModelError::ParameterOutOfRange(format!(
            "r1 = {r1} must lie in (0, 1)"
        )));
    }
    if mu <= 0.0 || mu.is_nan() {
        return Err(ModelError::ParameterOutOfRange(format!("mu = {mu} must be > 0")));
    }
    let qs = [0.5, 0.5, 1.0];
    let sensor0 = qs
        .iter()
        .map(|&q| [vec![q, 1.0 - q], vec![1.0 - q, q]])
        .collect();
    let rs = [r1, 0.0, 0.0];
    let sensor1 = rs
        .iter()
        .map(|&r| [vec![r, 1.0 - r, 0.0], vec![0.0, 1.0 - r, r]])
        .collect();
    let obs = ObservationModel::new(vec![sensor0, sensor1])?;
    let graph = CommGraph::new(2, [(0, 1), (1, 0)])?;
    let operational = OperationalCost::ActiveSet {
        table: vec![0.0, 1.0, 1.0, k],
    };
    let terminal = TerminalCost::LastStopper { mu };
    Scenario::new(0.5, 3, 2, obs, graph, operational, terminal)
}

/// Named special-case topologies and cost forms.
#[derive(Debug, Clone)]
pub enum SpecialCase {
    /// Empty edge set, linear operational costs, terminal table over all
    /// final decisions.
    NoComm {
        rates: Vec<f64>,
        decision_table: Vec<f64>,
    },
    /// Sensors `1..N` send their final decision to sensor 0, which carries
    /// the system decision.
    OneWay {
        rates: Vec<f64>,
        fusion_table: Vec<Vec<f64>>,
    },
    /// Two sensors with bidirectional edges; the later stopper's decision is
    /// the system decision.
    TwoWay { rates: Vec<f64>, mu: f64 },
}

pub fn special_case_scenario(
    case: SpecialCase,
    p0: f64,
    horizon: usize,
    message_alphabet: usize,
    obs: ObservationModel,
) -> Result<Scenario, ModelError> {
    let n = obs.sensor_count();
    match case {
        SpecialCase::NoComm { rates, decision_table } => {
            let graph = CommGraph::new(n, [])?;
            Scenario::new(
                p0,
                horizon,
                message_alphabet,
                obs,
                graph,
                OperationalCost::LinearPerSensor { rates },
                TerminalCost::DecisionTable { table: decision_table },
            )
        }
        SpecialCase::OneWay { rates, fusion_table } => {
            let graph = CommGraph::new(n, (1..n).map(|i| (i, 0)))?;
            Scenario::new(
                p0,
                horizon,
                message_alphabet,
                obs,
                graph,
                OperationalCost::LinearPerSensor { rates },
                TerminalCost::Fusion { sensor: 0, table: fusion_table },
            )
        }
        SpecialCase::TwoWay { rates, mu } => {
            if n != 2 {
                return Err(ModelError::ParameterOutOfRange(
                    "two-way special case requires exactly two sensors".into(),
                ));
            }
            let graph = CommGraph::new(2, [(0, 1), (1, 0)])?;
            Scenario::new(
                p0,
                horizon,
                message_alphabet,
                obs,
                graph,
                OperationalCost::LinearPerSensor { rates },
                TerminalCost::LastStopper { mu },
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Config loading
// ---------------------------------------------------------------------------

/// A probability (or cost) that may be written as a float or as an exact
/// rational string `"a/b"`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(try_from = "NumRepr")]
pub struct Num(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum NumRepr {
    Float(f64),
    Ratio(String),
}

impl TryFrom<NumRepr> for Num {
    type Error = String;

    fn try_from(repr: NumRepr) -> Result<Self, String> {
        match repr {
            NumRepr::Float(x) => Ok(Num(x)),
            NumRepr::Ratio(s) => {
                let (a, b) = s
                    .split_once('/')
                    .ok_or_else(|| format!("expected \"a/b\" rational, got {s:?}"))?;
                let num: f64 = a.trim().parse().map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
                let den: f64 = b.trim().parse().map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
                if den == 0.0 {
                    return Err(format!("zero denominator in {s:?}"));
                }
                Ok(Num(num / den))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub prior: Num,
    pub horizon: usize,
    #[serde(default = "default_message_alphabet")]
    pub message_alphabet: usize,
    pub sensors: Vec<SensorConfig>,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
    pub cost: CostConfig,
}

fn default_message_alphabet() -> usize {
    2
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorConfig {
    /// `pmf[t][h][y]`, 0-based `t`.
    pub pmf: Vec<Vec<Vec<Num>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostConfig {
    pub operational: OperationalConfig,
    pub terminal: TerminalConfig,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum OperationalConfig {
    Linear { rates: Vec<Num> },
    /// `table[mask]` over subset bitmasks, `2^N` entries.
    ActiveSet { table: Vec<Num> },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum TerminalConfig {
    LastStopper { mu: Num },
    Fusion { sensor: usize, table: Vec<Vec<Num>> },
    DecisionTable { table: Vec<Num> },
    GeneralTable { table: Vec<Num> },
}

fn nums(v: &[Num]) -> Vec<f64> {
    v.iter().map(|n| n.0).collect()
}

/// Validates and materializes a parsed config into a `Scenario`.
pub fn build_scenario(config: &ScenarioConfig) -> Result<Scenario, ModelError> {
    let pmfs = config
        .sensors
        .iter()
        .map(|s| {
            s.pmf
                .iter()
                .map(|rows| {
                    if rows.len() != 2 {
                        return Err(ModelError::Config(
                            "each pmf time step needs exactly two hypothesis rows".into(),
                        ));
                    }
                    Ok([nums(&rows[0]), nums(&rows[1])])
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let obs = ObservationModel::new(pmfs)?;
    let graph = CommGraph::new(config.sensors.len(), config.edges.iter().copied())?;
    let operational = match &config.cost.operational {
        OperationalConfig::Linear { rates } => OperationalCost::LinearPerSensor { rates: nums(rates) },
        OperationalConfig::ActiveSet { table } => OperationalCost::ActiveSet { table: nums(table) },
    };
    let terminal = match &config.cost.terminal {
        TerminalConfig::LastStopper { mu } => TerminalCost::LastStopper { mu: mu.0 },
        TerminalConfig::Fusion { sensor, table } => TerminalCost::Fusion {
            sensor: *sensor,
            table: table.iter().map(|row| nums(row)).collect(),
        },
        TerminalConfig::DecisionTable { table } => TerminalCost::DecisionTable { table: nums(table) },
        TerminalConfig::GeneralTable { table } => TerminalCost::GeneralTable { table: nums(table) },
    };
    Scenario::new(
        config.prior.0,
        config.horizon,
        config.message_alphabet,
        obs,
        graph,
        operational,
        terminal,
    )
}

pub fn scenario_from_json(text: &str) -> Result<Scenario, ModelError> {
    let config: ScenarioConfig =
        serde_json::from_str(text).map_err(|e| ModelError::Config(e.to_string()))?;
    build_scenario(&config)
}
