//! Statistical distance and distinguishing advantage, exact and Monte Carlo.
//!
//! Convention: a distinguisher emitting `0` on its `guess` port guesses "real".

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use crate::causal::OutcomeDistribution;
use crate::causal::{
    attach, check_bound, exact_distribution, Assignment, CausalSystem, Direction, Evaluator, Plan, Port, Reaction,
    Symbol, SystemError,
};
use crate::rational::{self, Rational};
use crate::spacetime::{common_future, strictly_precedes, SpaceTimePoint};

/// Name of the distinguisher's single exposed output.
pub const GUESS: &str = "guess";

/// `(1/2) Σ |P(o) − Q(o)|` over the union of supports.
pub fn statistical_distance(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<Rational, SystemError> {
    if p.labels() != q.labels() {
        return Err(SystemError::Interface(format!(
            "outcome labels differ: {:?} vs {:?}",
            p.labels(),
            q.labels()
        )));
    }
    let mut acc = Rational::zero();
    for (k, pv) in p.iter() {
        acc += (pv - q.prob(k)).abs();
    }
    for (k, qv) in q.iter() {
        if p.prob(k).is_zero() {
            acc += qv;
        }
    }
    Ok(acc / rational::int(2))
}

fn closed_guess_index(closed: &CausalSystem) -> Result<usize, SystemError> {
    let plan = closed.plan();
    let extra: Vec<String> = closed.ports().filter(|p| p.name != GUESS).map(|p| p.name.clone()).collect();
    if !extra.is_empty() {
        return Err(SystemError::Interface(format!("distinguisher leaves ports unconnected: {extra:?}")));
    }
    let g = closed.port(GUESS).ok_or_else(|| SystemError::Interface("no guess port".into()))?;
    if g.direction != Direction::Out || g.points.len() != 1 {
        return Err(SystemError::Interface("guess must be a single-point output".into()));
    }
    Ok(plan.ext_out_index(GUESS, &g.points[0]).expect("guess slot"))
}

/// `Pr[D(R) = 0]`.
pub fn guess_zero_probability(d: &CausalSystem, r: &CausalSystem) -> Result<Rational, SystemError> {
    let closed = attach(d, r)?;
    let gi = closed_guess_index(&closed)?;
    let dist = exact_distribution(&closed, &Assignment::new())?;
    Ok(dist.prob_where(|o| o[gi] == Symbol::ZERO))
}

/// `|Pr[D(R) = 0] − Pr[D(S) = 0]|`.
pub fn advantage_exact(d: &CausalSystem, r: &CausalSystem, s: &CausalSystem) -> Result<Rational, SystemError> {
    Ok((guess_zero_probability(d, r)? - guess_zero_probability(d, s)?).abs())
}

/// A point strictly after every given point, for placing a guess.
pub fn final_point<'a, I: IntoIterator<Item = &'a SpaceTimePoint>>(points: I) -> SpaceTimePoint {
    let pts: Vec<&SpaceTimePoint> = points.into_iter().collect();
    match common_future(pts) {
        Some(p) => p.later_by(&rational::one()),
        None => SpaceTimePoint::origin(),
    }
}

/// Observed values handed to a non-adaptive guessing rule.
pub struct Observed<'a> {
    labels: &'a [(String, SpaceTimePoint)],
    values: &'a [Symbol],
}

impl Observed<'_> {
    /// Value on the first point of `port`.
    pub fn get(&self, port: &str) -> Symbol {
        self.labels.iter().position(|(p, _)| p == port).map(|i| self.values[i]).unwrap_or(Symbol::Vacuum)
    }

    pub fn at(&self, port: &str, point: &SpaceTimePoint) -> Symbol {
        self.labels
            .iter()
            .position(|(p, q)| p == port && q == point)
            .map(|i| self.values[i])
            .unwrap_or(Symbol::Vacuum)
    }
}

/// A distinguisher that feeds fixed inputs to every input port of `ports`, reads every
/// output port, and guesses with `rule` after everything has been observed.
pub fn non_adaptive_distinguisher<F>(
    name: &str,
    ports: &[Port],
    inputs: &Assignment,
    rule: F,
) -> Result<CausalSystem, SystemError>
where
    F: Fn(&Observed) -> u32 + Send + Sync + 'static,
{
    let mut mirrored: Vec<Port> = Vec::new();
    for p in ports {
        let mut q = p.clone();
        q.direction = p.direction.flip();
        mirrored.push(q);
    }
    let guess_at = final_point(ports.iter().flat_map(|p| p.points.iter()));
    mirrored.push(Port::new(GUESS, Direction::Out, Symbol::bits(), vec![guess_at])?);

    let in_labels: Vec<(String, SpaceTimePoint)> = mirrored
        .iter()
        .filter(|p| p.direction == Direction::In)
        .flat_map(|p| p.points.iter().map(move |q| (p.name.clone(), q.clone())))
        .collect();
    let mut fixed: Vec<Symbol> = Vec::new();
    for p in mirrored.iter().filter(|p| p.direction == Direction::Out && p.name != GUESS) {
        for q in &p.points {
            fixed.push(inputs.get(&p.name, q).unwrap_or(Symbol::Vacuum));
        }
    }
    let n_in = in_labels.len();
    let out_slots = fixed.len() + 1;
    let deps: Vec<Vec<usize>> = (0..out_slots)
        .map(|o| if o + 1 == out_slots { (0..n_in).collect() } else { Vec::new() })
        .collect();
    let react: Reaction = Arc::new(move |inp: &[Symbol], _| {
        let mut out = fixed.clone();
        out.push(Symbol::bit(rule(&Observed { labels: &in_labels, values: inp })));
        out
    });
    // the guess port was pushed last, so its slot is the last output slot
    CausalSystem::atom(name, mirrored, vec![rational::one()], deps, react, false)
}

/// Outer interfaces are compatible when port names, directions and points agree and
/// input alphabets are equal. Output alphabets may differ.
pub fn check_compatible(r: &CausalSystem, s: &CausalSystem) -> Result<(), SystemError> {
    let key = |sys: &CausalSystem| {
        let mut v: Vec<Port> = sys.ports().cloned().collect();
        v.sort_by(|a, b| a.name.cmp(&b.name));
        v
    };
    let (pr, ps) = (key(r), key(s));
    if pr.len() != ps.len() {
        return Err(SystemError::Interface(format!(
            "port sets differ: {:?} vs {:?}",
            pr.iter().map(|p| &p.name).collect::<Vec<_>>(),
            ps.iter().map(|p| &p.name).collect::<Vec<_>>()
        )));
    }
    for (a, b) in pr.iter().zip(&ps) {
        if a.name != b.name || a.direction != b.direction || a.points != b.points {
            return Err(SystemError::Interface(format!("port {} differs from {}", a.name, b.name)));
        }
        if a.direction == Direction::In && a.alphabet != b.alphabet {
            return Err(SystemError::Interface(format!("input alphabets of {} differ", a.name)));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct SupReport {
    #[serde(with = "rational::serde_rat")]
    pub advantage: Rational,
    pub strategies: u128,
    /// Inputs chosen by a maximising strategy, per input slot and observed history.
    pub best_strategy: Vec<StrategyEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrategyEntry {
    pub input: String,
    pub history: Vec<(String, Symbol)>,
    pub value: Symbol,
}

struct StrategySpace {
    /// Per input slot, the output slots it may observe.
    histories: Vec<Vec<usize>>,
    /// Per output slot, the symbols that may appear there.
    out_choices: Vec<Vec<Symbol>>,
    in_choices: Vec<Vec<Symbol>>,
    /// Per input slot, number of history keys.
    domain: Vec<usize>,
}

impl StrategySpace {
    fn new(pr: &Plan, out_choices: Vec<Vec<Symbol>>) -> Self {
        let histories: Vec<Vec<usize>> = pr
            .ext_in
            .iter()
            .map(|i| (0..pr.ext_out.len()).filter(|&o| strictly_precedes(&pr.ext_out[o].point, &i.point)).collect())
            .collect();
        let domain: Vec<usize> =
            histories.iter().map(|h| h.iter().map(|&o| out_choices[o].len()).product::<usize>()).collect();
        StrategySpace { histories, out_choices, in_choices: pr.ext_in.iter().map(|i| i.choices()).collect(), domain }
    }

    fn history_key(&self, slot: usize, get: impl Fn(usize) -> Symbol) -> usize {
        self.histories[slot].iter().fold(0, |acc, &o| {
            let v = get(o);
            let c = &self.out_choices[o];
            acc * c.len() + c.iter().position(|s| *s == v).unwrap_or(0)
        })
    }

    fn decode(&self, mut index: u128) -> Vec<Vec<usize>> {
        let mut table: Vec<Vec<usize>> = self.domain.iter().map(|&d| vec![0; d]).collect();
        for (slot, row) in table.iter_mut().enumerate().rev() {
            let radix = self.in_choices[slot].len() as u128;
            for e in row.iter_mut().rev() {
                *e = (index % radix) as usize;
                index /= radix;
            }
        }
        table
    }

    fn count(&self) -> u128 {
        self.domain
            .iter()
            .zip(&self.in_choices)
            .map(|(&d, c)| (c.len() as u128).saturating_pow(d as u32))
            .fold(1u128, |a, b| a.saturating_mul(b))
    }
}

fn transcript_distribution(
    sys: &CausalSystem,
    space: &StrategySpace,
    out_map: &[usize],
    table: &[Vec<usize>],
    ev: &mut Evaluator,
) -> Result<BTreeMap<Vec<Symbol>, Rational>, SystemError> {
    let plan = sys.plan();
    let mut acc: BTreeMap<Vec<Symbol>, Rational> = BTreeMap::new();
    for (seeds, w) in plan.joint_seeds()? {
        ev.run(&seeds, |e, view| {
            let key = space.history_key(e, |o| view.get(out_map[o]));
            space.in_choices[e][table[e][key]]
        });
        let mut t: Vec<Symbol> = out_map.iter().map(|&o| ev.ext_out(o)).collect();
        t.extend((0..plan.ext_in.len()).map(|i| ev.ext_in(i)));
        *acc.entry(t).or_insert_with(Rational::zero) += w;
    }
    Ok(acc)
}

fn sd_maps(p: &BTreeMap<Vec<Symbol>, Rational>, q: &BTreeMap<Vec<Symbol>, Rational>) -> Rational {
    let mut acc = Rational::zero();
    for (k, pv) in p {
        acc += (pv - q.get(k).cloned().unwrap_or_else(Rational::zero)).abs();
    }
    for (k, qv) in q {
        if !p.contains_key(k) {
            acc += qv;
        }
    }
    acc / rational::int(2)
}

/// Maximum advantage over every deterministic adaptive distinguisher on the finite
/// outer interface shared by `r` and `s`.
///
/// Each input slot is chosen as a function of the outputs observed at strictly
/// earlier points; for a fixed strategy the best final guess achieves the
/// statistical distance of the two transcript distributions.
pub fn advantage_sup_enumerated(r: &CausalSystem, s: &CausalSystem) -> Result<SupReport, SystemError> {
    check_compatible(r, s)?;
    let (pr, ps) = (r.plan(), s.plan());
    let out_map_s: Vec<usize> = pr
        .ext_out
        .iter()
        .map(|o| ps.ext_out_index(&o.port, &o.point).expect("compatible"))
        .collect();
    let out_map_r: Vec<usize> = (0..pr.ext_out.len()).collect();
    let out_choices: Vec<Vec<Symbol>> = pr
        .ext_out
        .iter()
        .zip(&out_map_s)
        .map(|(o, &j)| {
            let mut c = o.choices();
            c.extend(ps.ext_out[j].alphabet.iter().copied());
            c.sort();
            c.dedup();
            c
        })
        .collect();
    let space = StrategySpace::new(pr, out_choices);
    let count = space.count();
    check_bound("distinguisher strategy family", count)?;
    check_bound(
        "strategy evaluation workload",
        count.saturating_mul(pr.joint_seed_count() + ps.joint_seed_count()),
    )?;

    let best = (0..count as u64)
        .into_par_iter()
        .map_init(
            || (Evaluator::new(r), Evaluator::new(s)),
            |(er, es), idx| -> Result<(Rational, u64), SystemError> {
                let table = space.decode(idx as u128);
                let dr = transcript_distribution(r, &space, &out_map_r, &table, er)?;
                let ds = transcript_distribution(s, &space, &out_map_s, &table, es)?;
                Ok((sd_maps(&dr, &ds), idx))
            },
        )
        .try_reduce(
            || (Rational::zero(), u64::MAX),
            |a, b| Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        )?;

    let table = space.decode(best.1.min(count as u64 - 1) as u128);
    let mut best_strategy = Vec::new();
    for (slot, row) in table.iter().enumerate() {
        for (key, &c) in row.iter().enumerate() {
            let mut rem = key;
            let mut hist = Vec::new();
            for &o in space.histories[slot].iter().rev() {
                let n = space.out_choices[o].len();
                hist.push((pr.ext_out[o].label.clone(), space.out_choices[o][rem % n]));
                rem /= n;
            }
            hist.reverse();
            best_strategy.push(StrategyEntry {
                input: pr.ext_in[slot].label.clone(),
                history: hist,
                value: space.in_choices[slot][c],
            });
        }
    }
    Ok(SupReport { advantage: best.0, strategies: count, best_strategy })
}

/// Highest probability of `event` over every deterministic adaptive strategy for the
/// open inputs of `sys`. The event sees outputs and the inputs that were sent.
pub fn max_event_probability<F>(sys: &CausalSystem, event: F) -> Result<Rational, SystemError>
where
    F: Fn(&Observed) -> bool + Sync,
{
    let pr = sys.plan();
    let space = StrategySpace::new(pr, pr.ext_out.iter().map(|o| o.choices()).collect());
    let count = space.count();
    check_bound("strategy family", count)?;
    check_bound("strategy evaluation workload", count.saturating_mul(pr.joint_seed_count()))?;
    let labels: Vec<(String, SpaceTimePoint)> = pr
        .ext_out
        .iter()
        .chain(pr.ext_in.iter())
        .map(|s| (s.port.clone(), s.point.clone()))
        .collect();
    let out_map: Vec<usize> = (0..pr.ext_out.len()).collect();
    (0..count as u64)
        .into_par_iter()
        .map_init(
            || Evaluator::new(sys),
            |ev, idx| -> Result<Rational, SystemError> {
                let table = space.decode(idx as u128);
                let dist = transcript_distribution(sys, &space, &out_map, &table, ev)?;
                Ok(dist
                    .iter()
                    .filter(|(t, _)| event(&Observed { labels: &labels, values: t }))
                    .map(|(_, w)| w.clone())
                    .sum())
            },
        )
        .try_reduce(Rational::zero, |a, b| Ok(a.max(b)))
}

/// Monte Carlo estimate of an advantage with Hoeffding confidence half-widths.
#[derive(Clone, Debug, Serialize)]
pub struct McEstimate {
    pub n: u64,
    pub delta: f64,
    pub p_real: f64,
    pub p_ideal: f64,
    /// `|p_real − p_ideal|`.
    pub estimate: f64,
    /// Half-width of each branch interval, `sqrt(ln(2/δ) / (2n))`.
    pub half_width: f64,
    /// Half-width for the difference, twice the branch half-width.
    pub ci: f64,
}

impl McEstimate {
    pub fn covers(&self, exact: &Rational) -> bool {
        (self.estimate - rational::to_f64(exact)).abs() <= self.ci
    }
}

pub fn hoeffding_half_width(n: u64, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

const MC_BATCH: u64 = 4096;

fn mc_branch(closed: &CausalSystem, gi: usize, n: u64, rng_seed: u64, stream_base: u64) -> u64 {
    let batches = n.div_ceil(MC_BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(stream_base + b);
            let mut ev = Evaluator::new(closed);
            let todo = MC_BATCH.min(n - b * MC_BATCH);
            let mut zeros = 0;
            for _ in 0..todo {
                let seeds = closed.plan().sample_seeds(&mut rng);
                ev.run(&seeds, |_, _| Symbol::Vacuum);
                if ev.ext_out(gi) == Symbol::ZERO {
                    zeros += 1;
                }
            }
            zeros
        })
        .sum()
}

/// Samples `D∘R` and `D∘S` `n` times each with independent ChaCha streams.
pub fn advantage_mc(
    d: &CausalSystem,
    r: &CausalSystem,
    s: &CausalSystem,
    n: u64,
    delta: f64,
    rng_seed: u64,
) -> Result<McEstimate, SystemError> {
    if n == 0 {
        return Err(SystemError::Interface("sample count must be at least 1".into()));
    }
    let cr = attach(d, r)?;
    let cs = attach(d, s)?;
    let (gr, gs) = (closed_guess_index(&cr)?, closed_guess_index(&cs)?);
    let zr = mc_branch(&cr, gr, n, rng_seed, 0);
    let zs = mc_branch(&cs, gs, n, rng_seed, 1 << 32);
    let p_real = zr as f64 / n as f64;
    let p_ideal = zs as f64 / n as f64;
    let h = hoeffding_half_width(n, delta);
    Ok(McEstimate { n, delta, p_real, p_ideal, estimate: (p_real - p_ideal).abs(), half_width: h, ci: 2.0 * h })
}

/// Exact value and optional estimate for one comparison.
#[derive(Clone, Debug, Serialize)]
pub struct AdvantageReport {
    pub distinguisher: String,
    pub real: String,
    pub ideal: String,
    #[serde(serialize_with = "ser_opt_rat")]
    pub exact: Option<Rational>,
    pub estimate: Option<McEstimate>,
    pub convention: &'static str,
}

pub(crate) fn ser_opt_rat<S: serde::Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(v) => s.serialize_str(&rational::format(v)),
        None => s.serialize_none(),
    }
}

pub const GUESS_CONVENTION: &str = "guess 0 means real";
