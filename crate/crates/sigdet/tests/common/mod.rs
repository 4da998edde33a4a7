//! Seeded random scenario and strategy-profile generators shared by the
//! integration tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sigdet::model::{
    CommGraph, ObservationModel, OperationalCost, Scenario, TerminalCost,
};
use sigdet::strategy::{Decision, HistKey, Strategy, StrategyProfile, TabularStrategy};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A pmf row from small integer weights; zeros are allowed (structural
/// impossibilities) but at least one weight is positive.
fn random_pmf_row(rng: &mut ChaCha8Rng, alphabet: usize) -> Vec<f64> {
    loop {
        let weights: Vec<u32> = (0..alphabet).map(|_| rng.gen_range(0..=4)).collect();
        let sum: u32 = weights.iter().sum();
        if sum > 0 {
            return weights.iter().map(|&w| w as f64 / sum as f64).collect();
        }
    }
}

fn random_observations(
    rng: &mut ChaCha8Rng,
    alphabets: &[usize],
    horizon: usize,
) -> ObservationModel {
    let pmfs = alphabets
        .iter()
        .map(|&a| {
            (0..horizon)
                .map(|_| [random_pmf_row(rng, a), random_pmf_row(rng, a)])
                .collect()
        })
        .collect();
    ObservationModel::new(pmfs).expect("generated pmfs are valid")
}

fn random_edges(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(0.5) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// A random scenario with the given shape: random pmfs, random edge set,
/// random operational form (linear or active-set with `c(empty) = 0`) and a
/// random decision-table terminal cost.
pub fn random_scenario(
    rng: &mut ChaCha8Rng,
    alphabets: &[usize],
    horizon: usize,
    message_alphabet: usize,
) -> Scenario {
    let n = alphabets.len();
    let obs = random_observations(rng, alphabets, horizon);
    let graph = CommGraph::new(n, random_edges(rng, n)).unwrap();
    let operational = if rng.gen_bool(0.5) {
        OperationalCost::LinearPerSensor {
            rates: (0..n).map(|_| rng.gen_range(0..=10) as f64 / 10.0).collect(),
        }
    } else {
        let table = (0..1usize << n)
            .map(|mask| {
                if mask == 0 {
                    0.0
                } else {
                    rng.gen_range(1..=20) as f64 / 10.0
                }
            })
            .collect();
        OperationalCost::ActiveSet { table }
    };
    let entries = 2 * message_alphabet.pow(n as u32);
    let terminal = TerminalCost::DecisionTable {
        table: (0..entries).map(|_| rng.gen_range(0..=10) as f64).collect(),
    };
    let p0 = rng.gen_range(2..=8) as f64 / 10.0;
    Scenario::new(p0, horizon, message_alphabet, obs, graph, operational, terminal).unwrap()
}

/// A random two-sensor (or single-sensor), horizon-2, binary-alphabet
/// scenario for the DP-versus-exhaustive-search battery.
pub fn random_small_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let n = if rng.gen_bool(0.5) { 1 } else { 2 };
    random_scenario(rng, &vec![2; n], 2, 2)
}

/// Every possible private history of `sensor` at time `t`: all own
/// observation prefixes crossed with all predecessor message rows (including
/// unreachable ones).
pub fn all_histories(scenario: &Scenario, sensor: usize, t: usize) -> Vec<HistKey> {
    let alphabet = scenario.observations().alphabet_size(sensor);
    let mut own: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..t {
        own = own
            .iter()
            .flat_map(|seq| {
                (0..alphabet).map(move |y| {
                    let mut s = seq.clone();
                    s.push(y);
                    s
                })
            })
            .collect();
    }
    let symbols: Vec<Decision> = (0..scenario.message_alphabet())
        .map(Decision::Stop)
        .chain(std::iter::once(Decision::Blank))
        .collect();
    let n_preds = scenario.graph().preds(sensor).len();
    let mut rows: Vec<Vec<Decision>> = vec![Vec::new()];
    for _ in 0..n_preds {
        rows = rows
            .iter()
            .flat_map(|r| {
                symbols.iter().map(move |&d| {
                    let mut r = r.clone();
                    r.push(d);
                    r
                })
            })
            .collect();
    }
    let mut msg_histories: Vec<Vec<Vec<Decision>>> = vec![Vec::new()];
    for _ in 1..t {
        msg_histories = msg_histories
            .iter()
            .flat_map(|m| {
                rows.iter().map(move |r| {
                    let mut m = m.clone();
                    m.push(r.clone());
                    m
                })
            })
            .collect();
    }
    own.iter()
        .flat_map(|seq| {
            msg_histories.iter().map(move |msgs| HistKey {
                own_obs: seq.clone(),
                msgs: msgs.clone(),
            })
        })
        .collect()
}

/// A totally specified random tabular profile: every possible history gets a
/// decision, with only stop decisions at the horizon.
pub fn random_profile(rng: &mut ChaCha8Rng, scenario: &Scenario) -> StrategyProfile {
    let m = scenario.message_alphabet();
    let strategies = (0..scenario.sensor_count())
        .map(|i| {
            let mut tab = TabularStrategy::new(scenario.horizon(), Decision::Stop(0));
            for t in 1..=scenario.horizon() {
                for key in all_histories(scenario, i, t) {
                    let options = if t < scenario.horizon() { m + 1 } else { m };
                    let pick = rng.gen_range(0..options);
                    let d = if pick == m { Decision::Blank } else { Decision::Stop(pick) };
                    tab.insert(key, d);
                }
            }
            Strategy::Tabular(tab)
        })
        .collect();
    StrategyProfile::new(strategies)
}
