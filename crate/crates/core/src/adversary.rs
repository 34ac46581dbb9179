//! Attacks on coin flipping without a trusted channel and on delay extension.
//!
//! A man in the middle who flips with each party separately and steers both outputs
//! with one shared rule makes them agree with probability at most `(1 + p) / 2`.
//! Separate rules for the two biases do better when `p < 1/2`, see
//! [`unrestricted_agreement_closed_form`]. A candidate coin flip built from direct
//! messages splits into three hybrid steps, each measured exactly here.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{advantage_exact, advantage_sup_enumerated, non_adaptive_distinguisher};
use crate::causal::{
    attach, compose_parallel, exact_distribution, AtomBuilder, Assignment, CausalSystem, Direction, Port,
    Symbol, INNER,
};
use crate::error::{require_strict, Error, Result};
use crate::protocols::{
    at, default_eps, pi_cd_to_cf, pi_cdabort_to_cfunfair, pi_unfair_to_biased, AbortToUnfairGeometry,
    CdToCfGeometry, Construction, UnfairToBiasedGeometry, MEET,
};
use crate::rational::{self, Rational};
use crate::resources::{
    blocker, delta_converter, make_cd, make_cd_abort, make_cf, BiasPoints, CdSpec, CfSpec, Side,
};
use crate::spacetime::{diamond_subset, precedes, strictly_precedes, CausalDiamond};

/// Coin flip geometry used by the man in the middle: leaks at 1, biases at 2,
/// outputs at 3.
pub fn mitm_spec(p: Rational) -> CfSpec {
    let t = |n| at(rational::int(n));
    let bp = BiasPoints { leak: t(1), bias: t(2) };
    CfSpec { p, out_a: t(3), out_b: t(3), dishonest_a: bp.clone(), dishonest_b: bp }
}

/// Bias choices as truth tables indexed by `2c + c'`, where `c` is the coin shared
/// with Alice and `c'` the coin shared with Bob.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MitmStrategy {
    /// Bias sent towards Alice's output.
    pub b: u8,
    /// Bias sent towards Bob's output.
    pub b_prime: u8,
}

impl MitmStrategy {
    /// Independent rules for `b` and `b'`.
    pub const COUNT: usize = 256;
    /// One rule shared by `b = b'`.
    pub const SHARED_COUNT: usize = 16;

    pub fn from_index(i: usize) -> Self {
        Self { b: (i & 0xf) as u8, b_prime: (i >> 4) as u8 }
    }

    pub fn shared(table: u8) -> Self {
        Self { b: table & 0xf, b_prime: table & 0xf }
    }

    /// Steer both outputs towards `c`.
    pub fn copy_c() -> Self {
        Self::shared(0b1100)
    }

    /// Steer both outputs towards `c'`.
    pub fn copy_c_prime() -> Self {
        Self::shared(0b1010)
    }

    /// Steer Alice towards `c'` and Bob towards `c`.
    pub fn cross() -> Self {
        Self { b: 0b1010, b_prime: 0b1100 }
    }

    fn bias(table: u8, c: u32, c_prime: u32) -> Symbol {
        Symbol::bit(((table >> (2 * c + c_prime)) & 1) as u32)
    }
}

/// The man in the middle as a converter between `CF^p_B` (with Alice) and `CF^p_A`
/// (with Bob).
pub fn mitm_sigma(spec: &CfSpec, strategy: MitmStrategy) -> Result<CausalSystem> {
    require_strict(&spec.dishonest_b.leak, &spec.dishonest_b.bias, "leak and bias towards Alice")?;
    require_strict(&spec.dishonest_a.leak, &spec.dishonest_b.bias, "Bob's leak and bias towards Alice")?;
    require_strict(&spec.dishonest_b.leak, &spec.dishonest_a.bias, "Alice's leak and bias towards Bob")?;
    let n = |s: &str| format!("{INNER}{s}");
    Ok(AtomBuilder::new("mitm")
        .input(&n("B.leak"), Symbol::bits(), vec![spec.dishonest_b.leak.clone()])
        .input(&n("A.leak"), Symbol::bits(), vec![spec.dishonest_a.leak.clone()])
        .output(&n("B.bias"), Symbol::bits(), vec![spec.dishonest_b.bias.clone()])
        .output(&n("A.bias"), Symbol::bits(), vec![spec.dishonest_a.bias.clone()])
        .build(move |i, _| match (i[0].as_val(), i[1].as_val()) {
            (Some(c), Some(cp)) => {
                vec![MitmStrategy::bias(strategy.b, c, cp), MitmStrategy::bias(strategy.b_prime, c, cp)]
            }
            _ => vec![Symbol::Vacuum; 2],
        })?)
}

/// `CF^p_B σ CF^p_A`: Alice's output comes from the first coin flip, Bob's from the second.
pub fn mitm_composite(spec: &CfSpec, strategy: MitmStrategy) -> Result<CausalSystem> {
    let cf = make_cf(spec)?;
    let left = attach(&cf.dishonest_b, &mitm_sigma(spec, strategy)?)?;
    Ok(attach(&left, &cf.dishonest_a)?)
}

pub fn agreement_probability(sys: &CausalSystem) -> Result<Rational> {
    let d = exact_distribution(sys, &Assignment::new())?;
    let a = d.port_index("A.c").ok_or_else(|| Error::Geometry("no output A.c".into()))?;
    let b = d.port_index("B.c").ok_or_else(|| Error::Geometry("no output B.c".into()))?;
    Ok(d.prob_where(|o| o[a] == o[b]))
}

#[derive(Clone, Debug, Serialize)]
pub struct MitmReport {
    #[serde(with = "rational::serde_rat")]
    pub p: Rational,
    /// Best agreement when both biases follow one rule of `(c, c')`.
    #[serde(with = "rational::serde_rat")]
    pub agreement: Rational,
    pub best: MitmStrategy,
    /// Best agreement when `b` and `b'` follow separate rules.
    #[serde(with = "rational::serde_rat")]
    pub unrestricted_agreement: Rational,
    pub unrestricted_best: MitmStrategy,
}

fn best_agreement(spec: &CfSpec, strategies: &[MitmStrategy]) -> Result<(Rational, MitmStrategy)> {
    let (agreement, i) = strategies
        .par_iter()
        .enumerate()
        .map(|(i, &s)| Ok((agreement_probability(&mitm_composite(spec, s)?)?, i)))
        .try_reduce(
            || (rational::zero(), usize::MAX),
            |x, y| Ok::<_, Error>(if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x }),
        )?;
    Ok((agreement, strategies[i]))
}

/// Best agreement over the shared-rule strategies, alongside the best over all
/// deterministic pairs of rules.
pub fn mitm_agreement_probability(p: &Rational) -> Result<MitmReport> {
    let spec = mitm_spec(p.clone());
    spec.validate()?;
    let shared: Vec<MitmStrategy> = (0..MitmStrategy::SHARED_COUNT as u8).map(MitmStrategy::shared).collect();
    let all: Vec<MitmStrategy> = (0..MitmStrategy::COUNT).map(MitmStrategy::from_index).collect();
    let (agreement, best) = best_agreement(&spec, &shared)?;
    let (unrestricted_agreement, unrestricted_best) = best_agreement(&spec, &all)?;
    Ok(MitmReport { p: p.clone(), agreement, best, unrestricted_agreement, unrestricted_best })
}

/// `1/2 + max(p, 2p(1 - p))/2`: crossing the biases beats copying one coin for `p < 1/2`.
pub fn unrestricted_agreement_closed_form(p: &Rational) -> Rational {
    let one = rational::one();
    let cross = rational::int(2) * p * (&one - p);
    let gain = if cross > *p { cross } else { p.clone() };
    (one + gain) / rational::int(2)
}

/// Reads both outputs and guesses 1 when they agree, 0 otherwise.
pub fn equality_distinguisher(ports: &[Port]) -> Result<CausalSystem> {
    Ok(non_adaptive_distinguisher("equality", ports, &Assignment::new(), |o| {
        u32::from(o.get("A.c") == o.get("B.c"))
    })?)
}

/// The three hybrid steps for a coin flip candidate built from messages alone.
#[derive(Clone, Debug, Serialize)]
pub struct TriangleReport {
    pub candidate: String,
    #[serde(with = "rational::serde_rat")]
    pub p: Rational,
    /// Honest protocol against the ideal coin flip.
    #[serde(with = "rational::serde_rat")]
    pub honest_step: Rational,
    /// Bob's protocol replaced by the simulator for a dishonest Alice.
    #[serde(with = "rational::serde_rat")]
    pub alice_step: Rational,
    /// Alice's protocol replaced by the simulator for a dishonest Bob.
    #[serde(with = "rational::serde_rat")]
    pub bob_step: Rational,
    /// Both protocols replaced: the man in the middle against the ideal coin flip.
    #[serde(with = "rational::serde_rat")]
    pub composite: Rational,
    /// The same three steps, measured on the candidate's own construction cases.
    #[serde(with = "rational::serde_rat_vec")]
    pub lifted: Vec<Rational>,
    #[serde(with = "rational::serde_rat")]
    pub certified: Rational,
    #[serde(with = "rational::serde_rat")]
    pub bound: Rational,
    pub triangle_holds: bool,
    pub bound_met: bool,
}

/// Splits the man in the middle formed by a candidate's simulators into hybrid steps
/// and measures each with the equality distinguisher.
pub fn triangle_decompose(candidate: &Construction, p: &Rational) -> Result<TriangleReport> {
    if candidate.assumed.is_some() {
        return Err(Error::Geometry("the candidate must not assume a resource".into()));
    }
    let cf = &candidate.target;
    let ports: Vec<Port> = cf.honest.ports().cloned().collect();
    let d = equality_distinguisher(&ports)?;
    let h = attach(&candidate.pi_a, &candidate.pi_b)?;
    let ideal_a = attach(&candidate.sigma_a, &cf.dishonest_a)?;
    let ideal_b = attach(&cf.dishonest_b, &candidate.sigma_b)?;
    let x = attach(&candidate.pi_a, &ideal_a)?;
    let y = attach(&ideal_b, &ideal_a)?;

    let honest_step = advantage_exact(&d, &h, &cf.honest)?;
    let alice_step = advantage_exact(&d, &x, &h)?;
    let bob_step = advantage_exact(&d, &y, &x)?;
    let composite = advantage_exact(&d, &y, &cf.honest)?;

    let lifted = vec![
        honest_step.clone(),
        advantage_exact(&attach(&d, &candidate.pi_a)?, &candidate.pi_b, &ideal_a)?,
        advantage_exact(&attach(&d, &ideal_a)?, &candidate.pi_a, &ideal_b)?,
    ];
    let certified = [&honest_step, &alice_step, &bob_step].into_iter().max().cloned().unwrap_or_default();
    let bound = (rational::one() - p) / rational::int(6);
    Ok(TriangleReport {
        candidate: candidate.name.clone(),
        p: p.clone(),
        triangle_holds: composite <= &honest_step + &alice_step + &bob_step,
        bound_met: certified >= bound,
        honest_step,
        alice_step,
        bob_step,
        composite,
        lifted,
        certified,
        bound,
    })
}

/// A coin flip candidate where Alice simply sends her bit: leak at 1, message at 2,
/// bias at 3, outputs at 4.
pub fn direct_message_candidate(p: &Rational) -> Result<Construction> {
    let t = |n| at(rational::int(n));
    let bp = BiasPoints { leak: t(1), bias: t(3) };
    let spec = CfSpec { p: p.clone(), out_a: t(4), out_b: t(4), dishonest_a: bp.clone(), dishonest_b: bp };
    let msg = "msg.a";
    let n = |s: &str| format!("{INNER}{s}");
    let pi_a = AtomBuilder::new("send")
        .output(msg, Symbol::bits(), vec![t(2)])
        .output("A.c", Symbol::bits(), vec![t(4)])
        .uniform_seeds(2)
        .build(|_, s| vec![Symbol::bit(s as u32); 2])?;
    let pi_b = AtomBuilder::new("receive")
        .input(msg, Symbol::bits(), vec![t(2)])
        .output("B.c", Symbol::bits(), vec![t(4)])
        .uniform_seeds(2)
        .depends("B.c", &[msg])
        .build(|i, s| vec![if i[0].is_vacuum() { Symbol::bit(s as u32) } else { i[0] }])?;
    let sigma_a = AtomBuilder::new("sigma_A")
        .input(msg, Symbol::bits(), vec![t(2)])
        .input(&n("A.leak"), Symbol::bits(), vec![t(1)])
        .output(&n("A.bias"), Symbol::bits(), vec![t(3)])
        .depends(&n("A.bias"), &[msg])
        .build(|i, _| vec![i[0]])?;
    let sigma_b = AtomBuilder::new("sigma_B")
        .input(&n("B.leak"), Symbol::bits(), vec![t(1)])
        .output(msg, Symbol::bits(), vec![t(2)])
        .output(&n("B.bias"), Symbol::bits(), vec![t(3)])
        .build(|i, _| vec![i[0], i[0]])?;
    Ok(Construction {
        name: "direct message".into(),
        pi_a,
        pi_b,
        sigma_a,
        sigma_b,
        assumed: None,
        target: make_cf(&spec)?,
    })
}

fn sink(port: &str, alphabet: Vec<Symbol>, pt: crate::spacetime::SpaceTimePoint) -> Result<CausalSystem> {
    Ok(AtomBuilder::new("sink").input(port, alphabet, vec![pt]).build(|_, _| Vec::new())?)
}

fn silence(port: &str, alphabet: Vec<Symbol>, pt: crate::spacetime::SpaceTimePoint) -> Result<CausalSystem> {
    Ok(AtomBuilder::new("silence").output(port, alphabet, vec![pt]).build(|_, _| vec![Symbol::Vacuum])?)
}

/// The channel-based coin flip run with the channel cut: nothing Alice sends arrives.
pub fn blocked_channel_candidate(p: &Rational) -> Result<Construction> {
    let g = CdToCfGeometry::canonical();
    let spec = g.cf_spec(p.clone());
    let pair = pi_cd_to_cf(&g)?;
    let pi_a = attach(&pair.pi_a, &sink("A.in", Symbol::bits(), g.cd.p.clone())?)?;
    let pi_b = attach(&silence("B.out", Symbol::bits(), g.cd.q.clone())?, &pair.pi_b)?;
    let n = |s: &str| format!("{INNER}{s}");
    let sigma_a = AtomBuilder::new("sigma_A")
        .input(&n("A.leak"), Symbol::bits(), vec![spec.dishonest_a.leak.clone()])
        .output(MEET, Symbol::bits(), vec![g.meet.clone()])
        .output(&n("A.bias"), Symbol::bits(), vec![spec.dishonest_a.bias.clone()])
        .uniform_seeds(2)
        .build(|_, s| vec![Symbol::bit(s as u32), Symbol::Vacuum])?;
    let sigma_b = AtomBuilder::new("sigma_B")
        .input(MEET, Symbol::bits(), vec![g.meet.clone()])
        .input(&n("B.leak"), Symbol::bits(), vec![spec.dishonest_b.leak.clone()])
        .output(&n("B.bias"), Symbol::bits(), vec![spec.dishonest_b.bias.clone()])
        .build(|_, _| vec![Symbol::Vacuum])?;
    Ok(Construction {
        name: "blocked channel".into(),
        pi_a,
        pi_b,
        sigma_a,
        sigma_b,
        assumed: None,
        target: make_cf(&spec)?,
    })
}

/// Candidate abort channels built from a direct message `comm.a`.
///
/// `direct` sends at `1/2`, before the channel's `P'`, so the receiver simulator has
/// nothing to go on. `late` sends at `7/2`, after `P'`, so the sender simulator
/// cannot feed the channel in time.
pub fn abort_channel_candidates() -> Result<Vec<Construction>> {
    let g = AbortToUnfairGeometry::canonical();
    let spec = g.channel.clone();
    let cd = &spec.cd;
    let mut out = Vec::new();
    for (name, send_at) in [("direct", rational::half()), ("late", rational::rat(7, 2))] {
        let send = at(send_at.clone());
        let late = strictly_precedes(&cd.p_prime, &send);
        let msg = "comm.a";
        let n = |s: &str| format!("{INNER}{s}");
        let pi_a = AtomBuilder::new("send")
            .input("A.in", cd.alphabet.clone(), vec![cd.p.clone()])
            .output(msg, cd.alphabet.clone(), vec![send.clone()])
            .depends(msg, &["A.in"])
            .build(|i, _| vec![i[0]])?;
        let pi_b = AtomBuilder::new("receive")
            .input(msg, cd.alphabet.clone(), vec![send.clone()])
            .output("B.out", cd.alphabet.clone(), vec![cd.q.clone()])
            .depends("B.out", &[msg])
            .build(|i, _| vec![i[0]])?;
        let sigma_a = AtomBuilder::new("sigma_A")
            .input(msg, cd.alphabet.clone(), vec![send.clone()])
            .output(&n("A.in"), cd.alphabet.clone(), vec![cd.p_prime.clone()])
            .output(&n("A.retract"), vec![Symbol::Abort], vec![spec.r.clone()]);
        let sigma_a = if late {
            sigma_a.build(|_, _| vec![Symbol::Vacuum; 2])?
        } else {
            sigma_a.depends(&n("A.in"), &[msg]).build(|i, _| vec![i[0], Symbol::Vacuum])?
        };
        let k = cd.alphabet.len();
        let alphabet = cd.alphabet.clone();
        let sigma_b = AtomBuilder::new("sigma_B")
            .input(&n("B.out"), cd.alphabet.clone(), vec![cd.q_prime.clone()])
            .output(msg, cd.alphabet.clone(), vec![send.clone()])
            .uniform_seeds(k)
            .build(move |i, s| vec![if late { i[0] } else { alphabet[s] }])?;
        out.push(Construction {
            name: name.into(),
            pi_a,
            pi_b,
            sigma_a,
            sigma_b,
            assumed: None,
            target: make_cd_abort(&spec)?,
        });
    }
    Ok(out)
}

/// The abort-channel and unfair-coin constructions stacked, as used on top of a
/// candidate abort channel.
pub fn abort_channel_to_biased_cf() -> Result<Construction> {
    let lower_g = AbortToUnfairGeometry::canonical();
    let lower = pi_cdabort_to_cfunfair(&lower_g)?;
    let out = lower_g.out_a.later_by(&rational::one());
    let upper = pi_unfair_to_biased(&UnfairToBiasedGeometry {
        unfair: lower_g.unfair_spec(),
        out_a: out.clone(),
        out_b: out,
        eps: default_eps(),
    })?;
    Construction::stack(&lower, &upper)
}

#[derive(Clone, Debug, Serialize)]
pub struct AbortChainReport {
    pub candidate: String,
    /// Advantage of the hybrid steps on the stacked coin flip candidate.
    pub triangle: TriangleReport,
    /// The same distinguishers pushed through the upper constructions onto the
    /// candidate abort channel's own cases.
    #[serde(with = "rational::serde_rat_vec")]
    pub on_candidate: Vec<Rational>,
    #[serde(with = "rational::serde_rat")]
    pub certified: Rational,
    #[serde(with = "rational::serde_rat")]
    pub bound: Rational,
    pub bound_met: bool,
    pub consistent: bool,
}

/// Certifies that a candidate abort channel built from messages is distinguishable
/// with advantage at least `1/12` in one of its cases.
pub fn abort_channel_certificate(candidate: &Construction) -> Result<AbortChainReport> {
    let upper = abort_channel_to_biased_cf()?;
    let stacked = Construction::stack(candidate, &upper)?;
    let half = rational::half();
    let triangle = triangle_decompose(&stacked, &half)?;

    let ports: Vec<Port> = upper.target.honest.ports().cloned().collect();
    let d = equality_distinguisher(&ports)?;
    let d1 = attach(&attach(&d, &upper.pi_a)?, &upper.pi_b)?;
    let d2 = attach(&attach(&d, &stacked.pi_a)?, &upper.pi_b)?;
    let d3 = attach(&attach(&attach(&d, &stacked.sigma_a)?, &upper.target.dishonest_a)?, &upper.pi_a)?;
    let mut on_candidate = Vec::new();
    for (dist, case) in [d1, d2, d3].iter().zip(candidate.cases()?) {
        on_candidate.push(advantage_exact(dist, &case.real, &case.ideal)?);
    }
    let certified = on_candidate.iter().max().cloned().unwrap_or_default();
    let bound = rational::rat(1, 12);
    let consistent = on_candidate[0] == triangle.honest_step
        && on_candidate[1] == triangle.alice_step
        && on_candidate[2] == triangle.bob_step;
    Ok(AbortChainReport {
        candidate: candidate.name.clone(),
        bound_met: certified >= bound,
        triangle,
        on_candidate,
        certified,
        bound,
        consistent,
    })
}

/// Channels composed in parallel and the single channel they are claimed to build.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct DelayExtensionScenario {
    pub channels: Vec<CdSpec>,
    pub claimed: CdSpec,
}

impl DelayExtensionScenario {
    /// Channels `(0, 1, 3, 4)` and `(4, 5, 7, 8)` claimed to give `(-1, 2, 6, 9)`.
    pub fn canonical(k: u32) -> Self {
        let t = |n| at(rational::int(n));
        let ch = |a, b, c, d| CdSpec { p: t(a), p_prime: t(b), q_prime: t(c), q: t(d), alphabet: Symbol::values(k) };
        Self { channels: vec![ch(0, 1, 3, 4), ch(4, 5, 7, 8)], claimed: ch(-1, 2, 6, 9) }
    }

    fn prefix(i: usize) -> String {
        format!("ch{}.", i + 1)
    }

    pub fn validate(&self) -> Result<()> {
        self.claimed.validate()?;
        if self.channels.is_empty() {
            return Err(Error::Geometry("no channels to chain".into()));
        }
        for c in &self.channels {
            c.validate()?;
            if c.alphabet != self.claimed.alphabet {
                return Err(Error::Geometry("channel alphabets differ from the claimed one".into()));
            }
            require_strict(&self.claimed.p, &c.p, "claimed input and channel input")?;
            require_strict(&c.q, &self.claimed.q, "channel delivery and claimed delivery")?;
        }
        Ok(())
    }
}

/// Naive chaining: Alice sends her message into every channel and Bob outputs the
/// value of the latest channel that delivered.
pub fn naive_chain_protocol(s: &DelayExtensionScenario) -> Result<(CausalSystem, CausalSystem)> {
    s.validate()?;
    let alphabet = s.claimed.alphabet.clone();
    let mut a = AtomBuilder::new("chain_A").input("A.in", alphabet.clone(), vec![s.claimed.p.clone()]);
    let mut b = AtomBuilder::new("chain_B");
    let mut inner_b = Vec::new();
    for (i, c) in s.channels.iter().enumerate() {
        let pre = DelayExtensionScenario::prefix(i);
        let ia = format!("{INNER}{pre}A.in");
        a = a.output(&ia, alphabet.clone(), vec![c.p.clone()]).depends(&ia, &["A.in"]);
        let ib = format!("{INNER}{pre}B.out");
        b = b.input(&ib, alphabet.clone(), vec![c.q.clone()]);
        inner_b.push(ib);
    }
    let n = s.channels.len();
    let pi_a = a.build(move |i, _| vec![i[0]; n])?;
    let refs: Vec<&str> = inner_b.iter().map(String::as_str).collect();
    // channels are tried latest delivery first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| s.channels[y].q.cmp(&s.channels[x].q));
    let pi_b = b
        .output("B.out", alphabet, vec![s.claimed.q.clone()])
        .depends("B.out", &refs)
        .build(move |i, _| vec![order.iter().map(|&j| i[j]).find(|v| !v.is_vacuum()).unwrap_or(Symbol::Vacuum)])?;
    Ok((pi_a, pi_b))
}

/// Simulator for a dishonest receiver of the naive chain: a channel delivering after
/// the claimed early delivery forwards the message, earlier ones carry a uniform guess.
pub fn naive_chain_sigma_b(s: &DelayExtensionScenario) -> Result<CausalSystem> {
    s.validate()?;
    let alphabet = s.claimed.alphabet.clone();
    let k = alphabet.len();
    let inner = format!("{INNER}B.out");
    let mut b = AtomBuilder::new("sigma_B").input(&inner, alphabet.clone(), vec![s.claimed.q_prime.clone()]);
    let mut informed = Vec::new();
    for (i, c) in s.channels.iter().enumerate() {
        let name = format!("{}B.out", DelayExtensionScenario::prefix(i));
        b = b.output(&name, alphabet.clone(), vec![c.q_prime.clone()]);
        let sees = strictly_precedes(&s.claimed.q_prime, &c.q_prime);
        if sees {
            b = b.depends(&name, &[&inner]);
        }
        informed.push(sees);
    }
    let seeds = k.checked_pow(s.channels.len() as u32).ok_or_else(|| Error::Geometry("too many channels".into()))?;
    Ok(b.uniform_seeds(seeds).build(move |i, mut seed| {
        informed
            .iter()
            .map(|&sees| {
                let guess = alphabet[seed % k];
                seed /= k;
                if sees { i[0] } else { guess }
            })
            .collect()
    })?)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DelayExtensionOutcome {
    /// The claimed trusted region already lies inside one channel's region.
    NotApplicable { channel: usize },
    Attack(DelayExtensionReport),
}

#[derive(Clone, Debug, Serialize)]
pub struct DelayExtensionReport {
    pub alphabet_size: usize,
    /// Channels whose cheating input point does not precede the claimed one.
    pub blocked: Vec<usize>,
    /// Best advantage against the honest naive chain.
    #[serde(with = "rational::serde_rat")]
    pub honest_advantage: Rational,
    /// Whether every shift converter turns a cheating channel interface into the honest one.
    pub shifts_exact: bool,
    /// Advantage of sending one fixed message and checking it arrives.
    #[serde(with = "rational::serde_rat")]
    pub fixed_message_advantage: Rational,
    #[serde(with = "rational::serde_rat")]
    pub expected: Rational,
    /// One of the four hybrid steps has at least this advantage.
    #[serde(with = "rational::serde_rat")]
    pub epsilon_lower_bound: Rational,
}

/// Builds `CD'_B σ_B δ_B ⊥_B π_B` for the naive chain and compares it with the
/// claimed channel.
pub fn delay_extension_attack(s: &DelayExtensionScenario) -> Result<DelayExtensionOutcome> {
    s.validate()?;
    let claimed_region = CausalDiamond::new(s.claimed.p_prime.clone(), s.claimed.q_prime.clone())?;
    for (i, c) in s.channels.iter().enumerate() {
        let region = CausalDiamond::new(c.p_prime.clone(), c.q_prime.clone())?;
        if diamond_subset(&claimed_region, &region) {
            return Ok(DelayExtensionOutcome::NotApplicable { channel: i });
        }
    }
    let (pi_a, pi_b) = naive_chain_protocol(s)?;
    let claimed = make_cd(&s.claimed)?;

    let mut channels_honest: Option<CausalSystem> = None;
    let mut shifts: Option<CausalSystem> = None;
    let mut shifts_exact = true;
    let mut block_ports = Vec::new();
    let mut blocked = Vec::new();
    for (i, c) in s.channels.iter().enumerate() {
        let pre = DelayExtensionScenario::prefix(i);
        let cd = make_cd(c)?;
        let delta_a = delta_converter(c, Side::A)?;
        let delta_b = delta_converter(c, Side::B)?;
        shifts_exact &= advantage_sup_enumerated(&attach(&delta_a, &cd.dishonest_a)?, &cd.honest)?.advantage
            == rational::zero();
        shifts_exact &= advantage_sup_enumerated(&attach(&cd.dishonest_b, &delta_b)?, &cd.honest)?.advantage
            == rational::zero();
        let honest = cd.honest.with_prefix(&pre)?;
        let delta_b = delta_b.with_prefix(&pre)?;
        channels_honest = Some(match channels_honest {
            None => honest,
            Some(acc) => compose_parallel(&acc, &honest)?,
        });
        shifts = Some(match shifts {
            None => delta_b,
            Some(acc) => compose_parallel(&acc, &delta_b)?,
        });
        block_ports.push(Port::new(&format!("{pre}B.out"), Direction::Out, c.alphabet.clone(), vec![c.q.clone()])?);
        if !precedes(&c.p_prime, &s.claimed.p_prime) {
            blocked.push(i);
        }
    }
    let (channels_honest, shifts) = (channels_honest.expect("channels"), shifts.expect("channels"));
    let real = attach(&attach(&pi_a, &channels_honest)?, &pi_b)?;
    let honest_advantage = advantage_sup_enumerated(&real, &claimed.honest)?.advantage;

    let blocked_names: Vec<String> =
        blocked.iter().map(|&i| format!("{}B.out", DelayExtensionScenario::prefix(i))).collect();
    let bottom = blocker(&block_ports, move |name, _| blocked_names.iter().any(|b| b == name))?;
    let receiver = attach(&shifts, &attach(&bottom, &pi_b)?)?;
    let hybrid = attach(&attach(&claimed.dishonest_b, &naive_chain_sigma_b(s)?)?, &receiver)?;

    let m = s.claimed.alphabet[0];
    let ports: Vec<Port> = claimed.honest.ports().cloned().collect();
    let inputs = Assignment::new().with("A.in", s.claimed.p.clone(), m);
    let d = non_adaptive_distinguisher("fixed message", &ports, &inputs, move |o| u32::from(o.get("B.out") != m))?;
    let adv = advantage_exact(&d, &claimed.honest, &hybrid)?;
    let k = s.claimed.alphabet.len();
    Ok(DelayExtensionOutcome::Attack(DelayExtensionReport {
        alphabet_size: k,
        blocked,
        honest_advantage,
        shifts_exact,
        epsilon_lower_bound: &adv / rational::int(4),
        fixed_message_advantage: adv,
        expected: rational::one() - rational::rat(1, k as i64),
    }))
}
