//! Stochastic mass-action kinetics (Gillespie direct method) with
//! convergence-time measurement and seeded multi-trial statistics.
//!
//! Trial `i` of a run seeded with `s` draws from `ChaCha8Rng` seeded with `s`
//! on stream `i`, so results do not depend on thread scheduling.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::crn::{apply, vote_of, Configuration, Crc, Crd, Crn, CrnError, Reaction, SpeciesId, Vote};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KineticsError {
    #[error("reaction {index} has {order} reactants; only uni- and bimolecular reactions are simulated")]
    HigherOrder { index: usize, order: u64 },
    #[error("unbounded network: the computer is flagged as having an unbounded reachable space")]
    Unbounded,
    #[error("count bound violated: {count} molecules exceed the declared limit {limit} at event {event}")]
    CountBoundViolated { count: u64, limit: u64, event: u64 },
    #[error("volume must be positive and finite, got {0}")]
    BadVolume(f64),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Crn(#[from] CrnError),
}

pub type Result<T, E = KineticsError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolumePolicy {
    /// `max(1, total initial count)`.
    Auto,
    Fixed(f64),
}

impl VolumePolicy {
    pub fn volume(&self, init: &Configuration) -> Result<f64> {
        match *self {
            VolumePolicy::Auto => Ok((init.total().max(1)) as f64),
            VolumePolicy::Fixed(v) if v > 0.0 && v.is_finite() => Ok(v),
            VolumePolicy::Fixed(v) => Err(KineticsError::BadVolume(v)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimLimits {
    /// `None` selects `50 n (ceil(log2 n) + 1) R` with `n` the initial
    /// molecule count and `R` the number of reactions.
    pub max_events: Option<u64>,
    pub max_time: f64,
}

impl Default for SimLimits {
    fn default() -> Self {
        SimLimits {
            max_events: None,
            max_time: f64::INFINITY,
        }
    }
}

impl SimLimits {
    pub fn events(n: u64) -> Self {
        SimLimits {
            max_events: Some(n),
            ..Default::default()
        }
    }

    pub fn resolve_events(&self, initial_count: u64, reactions: usize) -> u64 {
        self.max_events.unwrap_or_else(|| {
            let n = initial_count.max(1);
            let log = 64 - (n - 1).leading_zeros() as u64; // ceil(log2 n)
            50 * n * (log + 1) * reactions.max(1) as u64
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub final_config: Configuration,
    pub terminal: bool,
    pub events: u64,
    pub end_time: f64,
    /// Time of the last event that changed an output count (computers) or
    /// the vote (deciders).
    pub last_output_change_time: f64,
    /// Output counts of a computer; for a decider, `[1]` for yes, `[0]` for
    /// no and empty when the vote is undefined.
    pub output: Vec<u64>,
    pub count_peak: u64,
}

/// What to simulate: a computer or a decider.
#[derive(Debug, Clone, Copy)]
pub enum Machine<'a> {
    Computer(&'a Crc),
    Decider(&'a Crd),
}

impl<'a> From<&'a Crc> for Machine<'a> {
    fn from(c: &'a Crc) -> Self {
        Machine::Computer(c)
    }
}

impl<'a> From<&'a Crd> for Machine<'a> {
    fn from(d: &'a Crd) -> Self {
        Machine::Decider(d)
    }
}

impl Machine<'_> {
    pub fn crn(&self) -> &Crn {
        match self {
            Machine::Computer(c) => c.crn(),
            Machine::Decider(d) => d.crn(),
        }
    }

    fn initial(&self, x: &[u64]) -> Result<Configuration> {
        Ok(match self {
            Machine::Computer(c) => c.initial_configuration(x)?,
            Machine::Decider(d) => d.initial_configuration(x)?,
        })
    }

    fn observed(&self) -> Vec<SpeciesId> {
        match self {
            Machine::Computer(c) => c.outputs().to_vec(),
            Machine::Decider(d) => d.voters().iter().map(|&(s, _)| s).collect(),
        }
    }

    fn output(&self, counts: &[u64]) -> Vec<u64> {
        match self {
            Machine::Computer(c) => c.outputs().iter().map(|&s| counts[s]).collect(),
            Machine::Decider(d) => match vote_of(d.voters(), counts) {
                Vote::Yes => vec![1],
                Vote::No => vec![0],
                Vote::Undefined => vec![],
            },
        }
    }
}

fn check_order(crn: &Crn) -> Result<()> {
    for (index, r) in crn.reactions().iter().enumerate() {
        if r.order() > 2 {
            return Err(KineticsError::HigherOrder {
                index,
                order: r.order(),
            });
        }
    }
    Ok(())
}

fn propensity_of(r: &Reaction, counts: &[u64], v: f64) -> f64 {
    let k = r.rate();
    match r.reactants() {
        [] => k * v,
        [(x, 1)] => k * counts[*x] as f64,
        [(x, 2)] => {
            let n = counts[*x] as f64;
            k * 0.5 * n * (n - 1.0).max(0.0) / v
        }
        [(x, 1), (y, 1)] => k * counts[*x] as f64 * counts[*y] as f64 / v,
        _ => 0.0,
    }
}

/// Mass-action propensity of `r` in configuration `c` at volume `v`.
pub fn propensity(r: &Reaction, c: &Configuration, v: f64) -> Result<f64> {
    if r.order() > 2 {
        return Err(KineticsError::HigherOrder {
            index: 0,
            order: r.order(),
        });
    }
    Ok(propensity_of(r, c.counts(), v))
}

fn exp_sample(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    let u: f64 = rng.gen();
    -(1.0 - u).ln() / rate
}

fn pick(rng: &mut ChaCha8Rng, props: &[f64], total: f64) -> usize {
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in props.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if target < acc {
                return i;
            }
        }
    }
    last
}

/// One event of the direct method: the next configuration, the waiting time
/// and the reaction fired, or `None` when no reaction is enabled.
pub fn step(
    crn: &Crn,
    c: &Configuration,
    v: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Option<(Configuration, f64, usize)>> {
    check_order(crn)?;
    let props: Vec<f64> = crn.reactions().iter().map(|r| propensity_of(r, c.counts(), v)).collect();
    let total: f64 = props.iter().sum();
    if total <= 0.0 {
        return Ok(None);
    }
    let dt = exp_sample(rng, total);
    let r = pick(rng, &props, total);
    Ok(Some((apply(c, &crn.reactions()[r])?, dt, r)))
}

/// The RNG for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Simulates `machine` on input `x` with sub-stream 0 of `seed`.
pub fn simulate<'a>(
    machine: impl Into<Machine<'a>>,
    x: &[u64],
    policy: VolumePolicy,
    limits: SimLimits,
    seed: u64,
) -> Result<SimResult> {
    simulate_observed(machine.into(), x, policy, limits, &mut trial_rng(seed, 0), &mut |_, _, _| {})
}

/// Simulation with a callback `(time, counts, reaction)` after every event.
pub fn simulate_observed(
    machine: Machine<'_>,
    x: &[u64],
    policy: VolumePolicy,
    limits: SimLimits,
    rng: &mut ChaCha8Rng,
    observer: &mut dyn FnMut(f64, &[u64], usize),
) -> Result<SimResult> {
    let bound = match machine {
        Machine::Computer(c) => {
            if !c.is_bounded() {
                return Err(KineticsError::Unbounded);
            }
            c.count_bound()
        }
        Machine::Decider(_) => None,
    };
    let crn = machine.crn();
    check_order(crn)?;
    let init = machine.initial(x)?;
    let v = policy.volume(&init)?;
    let reactions = crn.reactions();
    let max_events = limits.resolve_events(init.total(), reactions.len());
    let limit = bound.map(|b| b.limit(x.iter().sum()));

    let s = crn.species_count();
    let observed = machine.observed();
    let mut is_observed = vec![false; s];
    for &o in &observed {
        is_observed[o] = true;
    }
    // deps[r]: reactions whose propensity may change when r fires.
    let mut readers: Vec<Vec<usize>> = vec![Vec::new(); s];
    for (i, r) in reactions.iter().enumerate() {
        for &(sp, _) in r.reactants() {
            readers[sp].push(i);
        }
    }
    let deltas: Vec<Vec<(usize, i64)>> = reactions.iter().map(Reaction::delta).collect();
    let deps: Vec<Vec<usize>> = deltas
        .iter()
        .map(|d| {
            let mut v: Vec<usize> = d.iter().flat_map(|&(sp, _)| readers[sp].iter().copied()).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let net_total: Vec<i64> = deltas.iter().map(|d| d.iter().map(|&(_, n)| n).sum()).collect();
    let touches_output: Vec<bool> = deltas.iter().map(|d| d.iter().any(|&(sp, _)| is_observed[sp])).collect();

    let mut counts = init.into_counts();
    let mut props: Vec<f64> = reactions.iter().map(|r| propensity_of(r, &counts, v)).collect();
    let mut total_count: u64 = counts.iter().sum();
    let mut peak = total_count;
    if let Some(l) = limit {
        if total_count > l {
            return Err(KineticsError::CountBoundViolated {
                count: total_count,
                limit: l,
                event: 0,
            });
        }
    }
    let mut time = 0.0;
    let mut last_change = 0.0;
    let mut events = 0u64;
    let mut vote = machine.output(&counts);
    let terminal = loop {
        let total: f64 = props.iter().sum();
        if total <= 0.0 {
            break true;
        }
        if events >= max_events {
            break false;
        }
        let dt = exp_sample(rng, total);
        if time + dt > limits.max_time {
            time = limits.max_time;
            break false;
        }
        let r = pick(rng, &props, total);
        time += dt;
        events += 1;
        for &(sp, d) in &deltas[r] {
            counts[sp] = (counts[sp] as i64 + d) as u64;
        }
        total_count = (total_count as i64 + net_total[r]) as u64;
        peak = peak.max(total_count);
        if let Some(l) = limit {
            if total_count > l {
                return Err(KineticsError::CountBoundViolated {
                    count: total_count,
                    limit: l,
                    event: events,
                });
            }
        }
        for &d in &deps[r] {
            props[d] = propensity_of(&reactions[d], &counts, v);
        }
        if touches_output[r] {
            match machine {
                Machine::Computer(_) => last_change = time,
                Machine::Decider(_) => {
                    let now = machine.output(&counts);
                    if now != vote {
                        vote = now;
                        last_change = time;
                    }
                }
            }
        }
        observer(time, &counts, r);
    };
    let output = machine.output(&counts);
    Ok(SimResult {
        final_config: Configuration::from_counts(counts),
        terminal,
        events,
        end_time: time,
        last_output_change_time: last_change,
        output,
        count_peak: peak,
    })
}

/// One line of the per-trial CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub n: u64,
    pub trial: u64,
    pub seed: u64,
    pub conv_time: f64,
    pub end_time: f64,
    pub events: u64,
    pub terminal: bool,
    pub correct: Option<bool>,
    pub count_peak: u64,
}

pub const TRIAL_CSV_HEADER: &str = "n,trial,seed,conv_time,end_time,events,terminal,correct,count_peak";

impl TrialRecord {
    pub fn csv_row(&self) -> String {
        let correct = match self.correct {
            Some(b) => b.to_string(),
            None => String::new(),
        };
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n, self.trial, self.seed, self.conv_time, self.end_time, self.events, self.terminal, correct, self.count_peak
        )
    }
}

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut s = String::from(TRIAL_CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(s, "{}", r.csv_row());
    }
    s
}

/// Summary over trials. Convergence-time statistics use terminal
/// (uncensored) trials only; `None` when there are none.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialStats {
    pub input: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
    pub mean_conv_time: Option<f64>,
    pub median_conv_time: Option<f64>,
    pub stddev_conv_time: Option<f64>,
    pub mean_end_time: Option<f64>,
    pub fraction_correct: Option<f64>,
    pub fraction_terminal: f64,
    /// Every trial reached a terminal configuration.
    pub terminal: bool,
    pub mean_count_peak: f64,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl TrialStats {
    pub fn censored_fraction(&self) -> f64 {
        1.0 - self.fraction_terminal
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("stats serialize");
        s.push('\n');
        s
    }
}

pub fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let m = s.len() / 2;
    Some(if s.len() % 2 == 1 { s[m] } else { (s[m - 1] + s[m]) / 2.0 })
}

/// Sample standard deviation (0 for a single value).
pub fn stddev(v: &[f64]) -> Option<f64> {
    let m = mean(v)?;
    if v.len() < 2 {
        return Some(0.0);
    }
    Some((v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt())
}

/// Expected output at an input, if defined there.
pub type Oracle<'a> = dyn Fn(&[u64]) -> Option<Vec<u64>> + Sync + 'a;

/// Runs `trials` independent simulations in parallel. When `oracle` is given
/// a trial is correct iff it ended terminal with output equal to the
/// oracle's.
pub fn run_trials<'a>(
    machine: impl Into<Machine<'a>>,
    x: &[u64],
    trials: u64,
    seed: u64,
    policy: VolumePolicy,
    limits: SimLimits,
    oracle: Option<&Oracle>,
) -> Result<TrialStats> {
    if trials == 0 {
        return Err(KineticsError::NoTrials);
    }
    let machine = machine.into();
    let expected = oracle.and_then(|f| f(x));
    let n: u64 = x.iter().sum();
    let results: Vec<Result<SimResult>> = (0..trials)
        .into_par_iter()
        .map(|t| simulate_observed(machine, x, policy, limits, &mut trial_rng(seed, t), &mut |_, _, _| {}))
        .collect();
    let mut records = Vec::with_capacity(trials as usize);
    for (t, r) in results.into_iter().enumerate() {
        let r = r?;
        records.push(TrialRecord {
            n,
            trial: t as u64,
            seed,
            conv_time: r.last_output_change_time,
            end_time: r.end_time,
            events: r.events,
            terminal: r.terminal,
            correct: expected.as_ref().map(|e| r.terminal && &r.output == e),
            count_peak: r.count_peak,
        });
    }
    let done: Vec<&TrialRecord> = records.iter().filter(|r| r.terminal).collect();
    let conv: Vec<f64> = done.iter().map(|r| r.conv_time).collect();
    let ends: Vec<f64> = done.iter().map(|r| r.end_time).collect();
    let fraction_correct = expected
        .as_ref()
        .map(|_| records.iter().filter(|r| r.correct == Some(true)).count() as f64 / trials as f64);
    Ok(TrialStats {
        input: x.to_vec(),
        trials,
        seed,
        mean_conv_time: mean(&conv),
        median_conv_time: median(&conv),
        stddev_conv_time: stddev(&conv),
        mean_end_time: mean(&ends),
        fraction_correct,
        fraction_terminal: done.len() as f64 / trials as f64,
        terminal: done.len() as u64 == trials,
        mean_count_peak: records.iter().map(|r| r.count_peak as f64).sum::<f64>() / trials as f64,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_crn;

    fn crn(text: &str) -> Crn {
        parse_crn(text).unwrap().crn
    }

    #[test]
    fn propensity_examples() {
        let c = crn("rxn X -> 2 Y\nrxn 2 X -> Y\nrxn X + Y -> Z\n");
        let conf = c.configuration(&[("X", 7)]).unwrap();
        assert_eq!(propensity(&c.reactions()[0], &conf, 123.0).unwrap(), 7.0);
        let conf = c.configuration(&[("X", 5)]).unwrap();
        assert_eq!(propensity(&c.reactions()[1], &conf, 10.0).unwrap(), 1.0);
        let conf = c.configuration(&[("Y", 5)]).unwrap();
        assert_eq!(propensity(&c.reactions()[2], &conf, 1.0).unwrap(), 0.0);
        let t = crn("rxn 3 X -> Y\n");
        assert!(matches!(
            propensity(&t.reactions()[0], &t.zero_configuration(), 1.0),
            Err(KineticsError::HigherOrder { .. })
        ));
    }

    #[test]
    fn step_cases() {
        let c = crn("rxn X -> Y\nrxn Y -> 0\n");
        let mut rng = trial_rng(1, 0);
        let start = c.configuration(&[("X", 1)]).unwrap();
        let (next, dt, r) = step(&c, &start, 1.0, &mut rng).unwrap().unwrap();
        assert_eq!((r, next.counts()), (0, &[0, 1][..]));
        assert!(dt > 0.0);
        assert!(step(&c, &c.zero_configuration(), 1.0, &mut rng).unwrap().is_none());
        let bad = crn("rxn A + B + C -> 0\n");
        assert!(step(&bad, &bad.zero_configuration(), 1.0, &mut rng).is_err());
    }

    #[test]
    fn selection_frequency_matches_ratio() {
        // propensities 3 and 1
        let c = crn("rxn A -> A + B\nrxn C -> C + D\n");
        let start = c.configuration(&[("A", 3), ("C", 1)]).unwrap();
        let mut rng = trial_rng(7, 0);
        let mut first = 0;
        for _ in 0..10_000 {
            let (_, _, r) = step(&c, &start, 1.0, &mut rng).unwrap().unwrap();
            first += (r == 0) as u32;
        }
        let freq = first as f64 / 10_000.0;
        assert!((freq - 0.75).abs() < 0.02, "{freq}");
    }

    #[test]
    fn simulate_matches_step() {
        let crc = parse_crn("input X\noutput Y\nrxn 2 X -> Y\n").unwrap().into_crc().unwrap();
        let a = simulate(&crc, &[9], VolumePolicy::Auto, SimLimits::default(), 3).unwrap();
        let mut rng = trial_rng(3, 0);
        let mut c = crc.initial_configuration(&[9]).unwrap();
        let mut t = 0.0;
        while let Some((next, dt, _)) = step(crc.crn(), &c, 9.0, &mut rng).unwrap() {
            c = next;
            t += dt;
        }
        assert_eq!(a.final_config, c);
        assert_eq!(a.end_time, t);
        assert!(a.terminal);
        assert_eq!(a.output, vec![4]);
        assert!(a.last_output_change_time <= a.end_time);
    }

    #[test]
    fn censoring_and_bounds() {
        let crc = parse_crn("input X\noutput Y\nrxn X -> Y\n").unwrap().into_crc().unwrap();
        let r = simulate(&crc, &[5], VolumePolicy::Auto, SimLimits::events(1), 0).unwrap();
        assert!(!r.terminal);
        assert_eq!(r.events, 1);
        let unb = crc.clone().with_bounded(false);
        assert_eq!(simulate(&unb, &[1], VolumePolicy::Auto, SimLimits::default(), 0).unwrap_err(), KineticsError::Unbounded);
        let grow = parse_crn("input X\noutput Y\nrxn X -> 3 Y\n").unwrap().into_crc().unwrap();
        let tight = grow.with_count_bound(Some(crate::crn::CountBound { c0: 0, c1: 2 }));
        assert!(matches!(
            simulate(&tight, &[2], VolumePolicy::Auto, SimLimits::default(), 0),
            Err(KineticsError::CountBoundViolated { .. })
        ));
        assert!(VolumePolicy::Fixed(0.0).volume(&Configuration::zeros(1)).is_err());
    }

    #[test]
    fn default_event_budget() {
        // n = 8: 50 * 8 * (3 + 1) * 2
        assert_eq!(SimLimits::default().resolve_events(8, 2), 3200);
        assert_eq!(SimLimits::default().resolve_events(0, 1), 50);
    }

    #[test]
    fn trials_are_reproducible() {
        let crc = parse_crn("input X\noutput Y\nrxn 2 X -> Y\n").unwrap().into_crc().unwrap();
        let oracle = |x: &[u64]| Some(vec![x[0] / 2]);
        let a = run_trials(&crc, &[10], 20, 5, VolumePolicy::Auto, SimLimits::default(), Some(&oracle)).unwrap();
        let b = run_trials(&crc, &[10], 20, 5, VolumePolicy::Auto, SimLimits::default(), Some(&oracle)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fraction_correct, Some(1.0));
        assert_eq!(trials_csv(&a.records), trials_csv(&b.records));
        let one = run_trials(&crc, &[10], 1, 5, VolumePolicy::Auto, SimLimits::default(), None).unwrap();
        let direct = simulate(&crc, &[10], VolumePolicy::Auto, SimLimits::default(), 5).unwrap();
        assert_eq!(one.records[0].end_time, direct.end_time);
    }

    #[test]
    fn decider_votes() {
        let d = parse_crn("input X\nvoter L1=yes L0=no\ninit L0=1\nrxn X + L0 -> L1\n").unwrap().into_crd().unwrap();
        let r = simulate(&d, &[1], VolumePolicy::Auto, SimLimits::default(), 0).unwrap();
        assert_eq!(r.output, vec![1]);
        assert!(r.last_output_change_time > 0.0);
        let r = simulate(&d, &[0], VolumePolicy::Auto, SimLimits::default(), 0).unwrap();
        assert_eq!((r.output, r.last_output_change_time), (vec![0], 0.0));
    }

    proptest::proptest! {
        // Exact closed forms on random uni/bimolecular reactions.
        #[test]
        fn propensity_closed_forms(a in 0u64..50, b in 0u64..50, v in 1u32..100, kind in 0usize..3) {
            let c = crn("rxn X -> Y\nrxn 2 X -> Y\nrxn X + Y -> Z\n");
            let conf = c.configuration(&[("X", a), ("Y", b)]).unwrap();
            let v = v as f64;
            let got = propensity(&c.reactions()[kind], &conf, v).unwrap();
            let want = match kind {
                0 => a as f64,
                1 => (a * a.saturating_sub(1)) as f64 / 2.0 / v,
                _ => (a * b) as f64 / v,
            };
            proptest::prop_assert!((got - want).abs() <= 1e-12 * want.max(1.0));
            let terminal = c.is_terminal(&conf).unwrap();
            let total: f64 = c.reactions().iter().map(|r| propensity(r, &conf, v).unwrap()).sum();
            proptest::prop_assert_eq!(terminal, total == 0.0);
        }
    }
}
