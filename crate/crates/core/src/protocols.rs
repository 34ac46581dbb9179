//! Honest protocols, simulators and the construction cases they must satisfy.
//!
//! A [`Construction`] bundles a protocol pair and a simulator pair for building a
//! target resource from an assumed one (or from direct messages only). Each of its
//! three cases compares a real system with an ideal system on the same outer
//! interface.

use serde::Serialize;

use crate::analysis::{advantage_sup_enumerated, SupReport};
use crate::causal::{attach, AtomBuilder, CausalSystem, Symbol, INNER};
use crate::error::{require_strict, Error, Result};
use crate::rational::{self, Rational};
use crate::resources::{
    make_cd, make_cd_abort, make_cf, make_cf_unfair, BcSpec, BiasPoints, Case, CdAbortSpec, CdSpec, CfSpec,
    ResourceTriple,
};
use crate::spacetime::{diamond_contains, midpoint, SpaceTimePoint};

/// Direct message in which Bob hands his bit to Alice.
pub const MEET: &str = "meet.b";

/// Bob's announcement in the commitment-based coin flip.
pub const ANNOUNCE: &str = "bob.b";

/// Time step used to place points just before a given point.
pub fn default_eps() -> Rational {
    rational::rat(1, 1000)
}

/// Point on the spatial origin line at time `t`.
pub fn at(t: Rational) -> SpaceTimePoint {
    SpaceTimePoint::on_line(t, rational::zero())
}

fn earlier(p: &SpaceTimePoint, dt: &Rational) -> SpaceTimePoint {
    p.later_by(&-dt.clone())
}

#[derive(Clone, Debug)]
pub struct ProtocolPair {
    pub pi_a: CausalSystem,
    pub pi_b: CausalSystem,
}

/// Protocols and simulators for building `target` from `assumed`; `assumed` is
/// `None` when the parties only exchange messages.
#[derive(Clone, Debug)]
pub struct Construction {
    pub name: String,
    pub pi_a: CausalSystem,
    pub pi_b: CausalSystem,
    pub sigma_a: CausalSystem,
    pub sigma_b: CausalSystem,
    pub assumed: Option<ResourceTriple>,
    pub target: ResourceTriple,
}

#[derive(Clone, Debug)]
pub struct ConstructionCase {
    pub which: Case,
    pub real: CausalSystem,
    pub ideal: CausalSystem,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub which: Case,
    #[serde(flatten)]
    pub sup: SupReport,
}

impl Construction {
    pub fn protocol(&self) -> ProtocolPair {
        ProtocolPair { pi_a: self.pi_a.clone(), pi_b: self.pi_b.clone() }
    }

    /// Real and ideal systems of one case.
    pub fn case(&self, which: Case) -> Result<ConstructionCase> {
        let real = match (&self.assumed, which) {
            (Some(r), Case::Honest) => attach(&attach(&self.pi_a, &r.honest)?, &self.pi_b)?,
            (Some(r), Case::DishonestA) => attach(&r.dishonest_a, &self.pi_b)?,
            (Some(r), Case::DishonestB) => attach(&self.pi_a, &r.dishonest_b)?,
            (None, Case::Honest) => attach(&self.pi_a, &self.pi_b)?,
            (None, Case::DishonestA) => self.pi_b.clone(),
            (None, Case::DishonestB) => self.pi_a.clone(),
        };
        let ideal = match which {
            Case::Honest => self.target.honest.clone(),
            Case::DishonestA => attach(&self.sigma_a, &self.target.dishonest_a)?,
            Case::DishonestB => attach(&self.target.dishonest_b, &self.sigma_b)?,
        };
        Ok(ConstructionCase { which, real, ideal })
    }

    pub fn cases(&self) -> Result<Vec<ConstructionCase>> {
        Case::ALL.iter().map(|&c| self.case(c)).collect()
    }

    /// Best advantage over the complete deterministic adaptive distinguisher family,
    /// for each case.
    pub fn verify(&self) -> Result<Vec<CaseReport>> {
        self.cases()?
            .into_iter()
            .map(|c| Ok(CaseReport { which: c.which, sup: advantage_sup_enumerated(&c.real, &c.ideal)? }))
            .collect()
    }

    /// Builds `upper.target` from `lower.assumed` by running `upper` on top of the
    /// resource that `lower` constructs.
    pub fn stack(lower: &Construction, upper: &Construction) -> Result<Construction> {
        Ok(Construction {
            name: format!("{} then {}", lower.name, upper.name),
            pi_a: attach(&upper.pi_a, &lower.pi_a)?,
            pi_b: attach(&lower.pi_b, &upper.pi_b)?,
            sigma_a: attach(&lower.sigma_a, &upper.sigma_a)?,
            sigma_b: attach(&upper.sigma_b, &lower.sigma_b)?,
            assumed: lower.assumed.clone(),
            target: upper.target.clone(),
        })
    }
}

/// Geometry of the coin flip built from a channel with delay: the channel, the
/// meeting point and both output points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct CdToCfGeometry {
    pub cd: CdSpec,
    pub meet: SpaceTimePoint,
    pub out_a: SpaceTimePoint,
    pub out_b: SpaceTimePoint,
    #[serde(with = "rational::serde_rat", default = "default_eps")]
    pub eps: Rational,
}

impl CdToCfGeometry {
    /// Channel `(0, 1, 3, 4)` on one line, meeting at `t = 2`, outputs at `t = 5`.
    pub fn canonical() -> Self {
        let t = |n| at(rational::int(n));
        Self {
            cd: CdSpec::binary(t(0), t(1), t(3), t(4)),
            meet: t(2),
            out_a: t(5),
            out_b: t(5),
            eps: default_eps(),
        }
    }

    /// Target coin flip: unbiased, leaking `2ε` and accepting the bias `ε` before
    /// the meeting point on both sides.
    pub fn cf_spec(&self, p: Rational) -> CfSpec {
        let bp = BiasPoints {
            leak: earlier(&self.meet, &(&self.eps * rational::int(2))),
            bias: earlier(&self.meet, &self.eps),
        };
        CfSpec { p, out_a: self.out_a.clone(), out_b: self.out_b.clone(), dishonest_a: bp.clone(), dishonest_b: bp }
    }

    pub fn validate(&self) -> Result<()> {
        self.cd.validate()?;
        if self.cd.alphabet != Symbol::bits() {
            return Err(Error::Geometry("the coin flip protocol needs a binary channel".into()));
        }
        let region = crate::resources::trusted_region(&self.cd)?;
        if !diamond_contains(&region, &self.meet) {
            return Err(Error::Geometry(format!("meeting point {} is outside the trusted region", self.meet)));
        }
        self.validate_outputs()
    }

    fn validate_outputs(&self) -> Result<()> {
        require_strict(&self.meet, &self.out_a, "meeting point and Alice's output")?;
        require_strict(&self.cd.q, &self.out_b, "channel delivery and Bob's output")
    }
}

/// Alice's side: sends a uniform `a` into the channel, reads Bob's bit at the
/// meeting point and outputs the XOR, replacing a missing bit by a local coin.
fn pi_a_channel(g: &CdToCfGeometry) -> Result<CausalSystem> {
    let inner = format!("{INNER}A.in");
    Ok(AtomBuilder::new("Pi_A")
        .input(MEET, Symbol::bits(), vec![g.meet.clone()])
        .output(&inner, Symbol::bits(), vec![g.cd.p.clone()])
        .output("A.c", Symbol::bits(), vec![g.out_a.clone()])
        .uniform_seeds(4)
        .depends("A.c", &[MEET])
        .build(|i, s| {
            let a = Symbol::bit((s / 2) as u32);
            let b = if i[0].is_vacuum() { Symbol::bit((s % 2) as u32) } else { i[0] };
            vec![a, a.xor(b).expect("bits")]
        })?)
}

/// Bob's side: hands a uniform `b` over at the meeting point, reads the channel and
/// outputs the XOR; `missing` decides what a silent channel turns into.
fn pi_b_channel(g: &CdToCfGeometry, abort_on_silence: bool) -> Result<CausalSystem> {
    let inner = format!("{INNER}B.out");
    let alphabet = if abort_on_silence {
        vec![Symbol::ZERO, Symbol::ONE, Symbol::Abort]
    } else {
        Symbol::bits()
    };
    Ok(AtomBuilder::new("Pi_B")
        .input(&inner, Symbol::bits(), vec![g.cd.q.clone()])
        .output(MEET, Symbol::bits(), vec![g.meet.clone()])
        .output("B.c", alphabet, vec![g.out_b.clone()])
        .uniform_seeds(4)
        .depends("B.c", &[&inner])
        .build(move |i, s| {
            let b = Symbol::bit((s / 2) as u32);
            let c = match (i[0], abort_on_silence) {
                (Symbol::Vacuum, true) => Symbol::Abort,
                (Symbol::Vacuum, false) => b.xor(Symbol::bit((s % 2) as u32)).expect("bits"),
                (a, _) => a.xor(b).expect("bits"),
            };
            vec![b, c]
        })?)
}

/// The coin flip protocol over a channel with delay.
pub fn pi_cd_to_cf(g: &CdToCfGeometry) -> Result<ProtocolPair> {
    g.validate()?;
    Ok(ProtocolPair { pi_a: pi_a_channel(g)?, pi_b: pi_b_channel(g, false)? })
}

fn check_sigma_a(g: &CdToCfGeometry, cf: &CfSpec) -> Result<()> {
    require_strict(&cf.dishonest_a.leak, &g.meet, "simulator for Alice: leaked coin and meeting point")?;
    require_strict(&g.cd.p_prime, &g.meet, "simulator for Alice: P' and meeting point")
}

fn check_sigma_b(g: &CdToCfGeometry, cf: &CfSpec) -> Result<()> {
    require_strict(&cf.dishonest_b.leak, &g.cd.q_prime, "simulator for Bob: leaked coin and Q'")?;
    require_strict(&g.meet, &g.cd.q_prime, "simulator for Bob: meeting point and Q'")
}

/// Simulator for dishonest Alice: hands `a ⊕ c` over at the meeting point, with a
/// local coin for a missing `a`, and never biases.
fn sigma_a_channel(g: &CdToCfGeometry, cf: &CfSpec) -> Result<CausalSystem> {
    let (leak, bias) = (format!("{INNER}A.leak"), format!("{INNER}A.bias"));
    Ok(AtomBuilder::new("sigma_A")
        .input("A.in", Symbol::bits(), vec![g.cd.p_prime.clone()])
        .input(&leak, Symbol::bits(), vec![cf.dishonest_a.leak.clone()])
        .output(MEET, Symbol::bits(), vec![g.meet.clone()])
        .output(&bias, Symbol::bits(), vec![cf.dishonest_a.bias.clone()])
        .uniform_seeds(2)
        .depends(MEET, &["A.in", &leak])
        .build(|i, s| {
            let a = if i[0].is_vacuum() { Symbol::bit(s as u32) } else { i[0] };
            vec![a.xor(i[1]).unwrap_or(a), Symbol::Vacuum]
        })?)
}

/// Simulator for dishonest Bob: delivers `b ⊕ c` at `Q'`, with a local coin for a
/// missing `b`, and never biases.
fn sigma_b_channel(g: &CdToCfGeometry, cf: &CfSpec) -> Result<CausalSystem> {
    let (leak, bias) = (format!("{INNER}B.leak"), format!("{INNER}B.bias"));
    Ok(AtomBuilder::new("sigma_B")
        .input(MEET, Symbol::bits(), vec![g.meet.clone()])
        .input(&leak, Symbol::bits(), vec![cf.dishonest_b.leak.clone()])
        .output("B.out", Symbol::bits(), vec![g.cd.q_prime.clone()])
        .output(&bias, Symbol::bits(), vec![cf.dishonest_b.bias.clone()])
        .uniform_seeds(2)
        .depends("B.out", &[MEET, &leak])
        .build(|i, s| {
            let b = if i[0].is_vacuum() { Symbol::bit(s as u32) } else { i[0] };
            vec![b.xor(i[1]).unwrap_or(b), Symbol::Vacuum]
        })?)
}

pub fn sigma_cf_a(g: &CdToCfGeometry, cf: &CfSpec) -> Result<CausalSystem> {
    check_sigma_a(g, cf)?;
    sigma_a_channel(g, cf)
}

pub fn sigma_cf_b(g: &CdToCfGeometry, cf: &CfSpec) -> Result<CausalSystem> {
    check_sigma_b(g, cf)?;
    sigma_b_channel(g, cf)
}

/// Unbiased coin flip from a channel with delay.
pub fn construct_cf(g: &CdToCfGeometry) -> Result<Construction> {
    let pair = pi_cd_to_cf(g)?;
    let cf = g.cf_spec(rational::zero());
    Ok(Construction {
        name: "channel to coin flip".into(),
        pi_a: pair.pi_a,
        pi_b: pair.pi_b,
        sigma_a: sigma_cf_a(g, &cf)?,
        sigma_b: sigma_cf_b(g, &cf)?,
        assumed: Some(make_cd(&g.cd)?),
        target: make_cf(&cf)?,
    })
}

/// The same protocol and simulators with the region and ordering checks skipped,
/// for showing what goes wrong when the meeting point leaves the trusted region.
pub fn construct_cf_unchecked(g: &CdToCfGeometry) -> Result<Construction> {
    g.cd.validate()?;
    g.validate_outputs()?;
    let cf = g.cf_spec(rational::zero());
    Ok(Construction {
        name: "channel to coin flip, unchecked".into(),
        pi_a: pi_a_channel(g)?,
        pi_b: pi_b_channel(g, false)?,
        sigma_a: sigma_a_channel(g, &cf)?,
        sigma_b: sigma_b_channel(g, &cf)?,
        assumed: Some(make_cd(&g.cd)?),
        target: make_cf(&cf)?,
    })
}

/// Geometry for turning an unfair coin flip into a half-biased one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct UnfairToBiasedGeometry {
    /// Points of the unfair coin flip; its bias is ignored.
    pub unfair: CfSpec,
    pub out_a: SpaceTimePoint,
    pub out_b: SpaceTimePoint,
    #[serde(with = "rational::serde_rat", default = "default_eps")]
    pub eps: Rational,
}

impl UnfairToBiasedGeometry {
    /// Leak at 1, abort at 2, unfair outputs at 3, final outputs at 4.
    pub fn canonical() -> Self {
        let t = |n| at(rational::int(n));
        let bp = BiasPoints { leak: t(1), bias: t(2) };
        Self {
            unfair: CfSpec {
                p: rational::zero(),
                out_a: t(3),
                out_b: t(3),
                dishonest_a: bp.clone(),
                dishonest_b: bp,
            },
            out_a: t(4),
            out_b: t(4),
            eps: default_eps(),
        }
    }

    /// The half-biased target: leaks `ε` before the unfair leak and takes the bias
    /// halfway between the abort point and the final output.
    pub fn biased_spec(&self) -> CfSpec {
        let side = |bp: &BiasPoints, out: &SpaceTimePoint| BiasPoints {
            leak: earlier(&bp.leak, &self.eps),
            bias: midpoint(&bp.bias, out),
        };
        CfSpec {
            p: rational::half(),
            out_a: self.out_a.clone(),
            out_b: self.out_b.clone(),
            dishonest_a: side(&self.unfair.dishonest_a, &self.out_b),
            dishonest_b: side(&self.unfair.dishonest_b, &self.out_a),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.unfair.validate()?;
        require_strict(&self.unfair.out_a, &self.out_a, "unfair and final outputs for Alice")?;
        require_strict(&self.unfair.out_b, &self.out_b, "unfair and final outputs for Bob")?;
        self.biased_spec().validate()
    }
}

fn abort_alphabet() -> Vec<Symbol> {
    vec![Symbol::ZERO, Symbol::ONE, Symbol::Abort]
}

/// Forwards a received bit and replaces an abort or silence by a local coin.
fn pi_unfair(side: &str, from: &SpaceTimePoint, to: &SpaceTimePoint) -> Result<CausalSystem> {
    let outer = format!("{side}.c");
    let inner = format!("{INNER}{outer}");
    Ok(AtomBuilder::new(format!("Pi'_{side}"))
        .input(&inner, abort_alphabet(), vec![from.clone()])
        .output(&outer, Symbol::bits(), vec![to.clone()])
        .uniform_seeds(2)
        .depends(&outer, &[&inner])
        .build(|i, s| vec![if i[0].as_val().is_some() { i[0] } else { Symbol::bit(s as u32) }])?)
}

/// Forwards the leaked coin and turns an abort into the flipped coin as bias.
fn sigma_unfair(side: &str, unfair: &BiasPoints, biased: &BiasPoints) -> Result<CausalSystem> {
    let (leak, abort) = (format!("{side}.leak"), format!("{side}.abort"));
    let (ileak, ibias) = (format!("{INNER}{side}.leak"), format!("{INNER}{side}.bias"));
    Ok(AtomBuilder::new(format!("sigma'_{side}"))
        .input(&ileak, Symbol::bits(), vec![biased.leak.clone()])
        .input(&abort, vec![Symbol::Abort, Symbol::NoAbort], vec![unfair.bias.clone()])
        .output(&leak, Symbol::bits(), vec![unfair.leak.clone()])
        .output(&ibias, Symbol::bits(), vec![biased.bias.clone()])
        .depends(&leak, &[&ileak])
        .depends(&ibias, &[&ileak, &abort])
        .build(|i, _| {
            let c = i[0];
            let b = if i[1] == Symbol::Abort { c.xor(Symbol::ONE).unwrap_or(c) } else { c };
            vec![c, b]
        })?)
}

/// Half-biased coin flip from an unfair one.
pub fn pi_unfair_to_biased(g: &UnfairToBiasedGeometry) -> Result<Construction> {
    g.validate()?;
    let biased = g.biased_spec();
    Ok(Construction {
        name: "unfair to half-biased coin flip".into(),
        pi_a: pi_unfair("A", &g.unfair.out_a, &g.out_a)?,
        pi_b: pi_unfair("B", &g.unfair.out_b, &g.out_b)?,
        sigma_a: sigma_unfair("A", &g.unfair.dishonest_a, &biased.dishonest_a)?,
        sigma_b: sigma_unfair("B", &g.unfair.dishonest_b, &biased.dishonest_b)?,
        assumed: Some(make_cf_unfair(&g.unfair)?),
        target: make_cf(&biased)?,
    })
}

/// Geometry for turning an abort channel into an unfair coin flip.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct AbortToUnfairGeometry {
    pub channel: CdAbortSpec,
    pub meet: SpaceTimePoint,
    pub out_a: SpaceTimePoint,
    pub out_b: SpaceTimePoint,
    /// Where the unfair coin leaks to a cheater.
    pub leak: SpaceTimePoint,
    /// Where the cheater's abort decision enters the unfair coin flip.
    pub abort: SpaceTimePoint,
}

impl AbortToUnfairGeometry {
    /// Channel `(0, 1, 3, 4)` with retraction at `5/2`, meeting at 2, leak at `3/2`,
    /// abort decision at 3, outputs at 5.
    pub fn canonical() -> Self {
        let t = |n| at(rational::int(n));
        Self {
            channel: CdAbortSpec { cd: CdSpec::binary(t(0), t(1), t(3), t(4)), r: at(rational::rat(5, 2)) },
            meet: t(2),
            out_a: t(5),
            out_b: t(5),
            leak: at(rational::rat(3, 2)),
            abort: t(3),
        }
    }

    fn as_channel_geometry(&self) -> CdToCfGeometry {
        CdToCfGeometry {
            cd: self.channel.cd.clone(),
            meet: self.meet.clone(),
            out_a: self.out_a.clone(),
            out_b: self.out_b.clone(),
            eps: default_eps(),
        }
    }

    pub fn unfair_spec(&self) -> CfSpec {
        let bp = BiasPoints { leak: self.leak.clone(), bias: self.abort.clone() };
        CfSpec {
            p: rational::zero(),
            out_a: self.out_a.clone(),
            out_b: self.out_b.clone(),
            dishonest_a: bp.clone(),
            dishonest_b: bp,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        self.as_channel_geometry().validate()?;
        self.unfair_spec().validate()?;
        require_strict(&self.leak, &self.meet, "unfair leak and meeting point")?;
        require_strict(&self.channel.cd.p_prime, &self.meet, "P' and meeting point")?;
        require_strict(&self.channel.r, &self.abort, "retraction and abort decision")?;
        require_strict(&self.meet, &self.channel.cd.q_prime, "meeting point and Q'")
    }
}

/// Simulator for a cheating sender on the abort channel: as in the plain channel
/// case, and it aborts the coin flip when no message came or the message was retracted.
fn sigma_a_abort(g: &AbortToUnfairGeometry) -> Result<CausalSystem> {
    let (leak, abort) = (format!("{INNER}A.leak"), format!("{INNER}A.abort"));
    Ok(AtomBuilder::new("sigma_A")
        .input("A.in", Symbol::bits(), vec![g.channel.cd.p_prime.clone()])
        .input("A.retract", vec![Symbol::Abort], vec![g.channel.r.clone()])
        .input(&leak, Symbol::bits(), vec![g.leak.clone()])
        .output(MEET, Symbol::bits(), vec![g.meet.clone()])
        .output(&abort, vec![Symbol::Abort, Symbol::NoAbort], vec![g.abort.clone()])
        .uniform_seeds(2)
        .depends(MEET, &["A.in", &leak])
        .depends(&abort, &["A.in", "A.retract"])
        .build(|i, s| {
            let a = if i[0].is_vacuum() { Symbol::bit(s as u32) } else { i[0] };
            let stop = i[0].is_vacuum() || i[1] == Symbol::Abort;
            vec![a.xor(i[2]).unwrap_or(a), if stop { Symbol::Abort } else { Symbol::NoAbort }]
        })?)
}

/// Simulator for a cheating receiver: as in the plain channel case, never aborting.
fn sigma_b_abort(g: &AbortToUnfairGeometry) -> Result<CausalSystem> {
    let (leak, abort) = (format!("{INNER}B.leak"), format!("{INNER}B.abort"));
    Ok(AtomBuilder::new("sigma_B")
        .input(MEET, Symbol::bits(), vec![g.meet.clone()])
        .input(&leak, Symbol::bits(), vec![g.leak.clone()])
        .output("B.out", Symbol::bits(), vec![g.channel.cd.q_prime.clone()])
        .output(&abort, vec![Symbol::Abort, Symbol::NoAbort], vec![g.abort.clone()])
        .uniform_seeds(2)
        .depends("B.out", &[MEET, &leak])
        .build(|i, s| {
            let b = if i[0].is_vacuum() { Symbol::bit(s as u32) } else { i[0] };
            vec![b.xor(i[1]).unwrap_or(b), Symbol::NoAbort]
        })?)
}

/// Unfair coin flip from an abort channel: the channel protocol, with Bob reporting
/// an abort when the channel stays silent.
pub fn pi_cdabort_to_cfunfair(g: &AbortToUnfairGeometry) -> Result<Construction> {
    g.validate()?;
    let cg = g.as_channel_geometry();
    Ok(Construction {
        name: "abort channel to unfair coin flip".into(),
        pi_a: pi_a_channel(&cg)?,
        pi_b: pi_b_channel(&cg, true)?,
        sigma_a: sigma_a_abort(g)?,
        sigma_b: sigma_b_abort(g)?,
        assumed: Some(make_cd_abort(&g.channel)?),
        target: make_cf_unfair(&g.unfair_spec())?,
    })
}

/// Geometry of the commitment-based coin flip: Bob announces his bit after the
/// commitment notice and before the opening.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct BlumGeometry {
    pub bc: BcSpec,
    pub announce: SpaceTimePoint,
    pub out_a: SpaceTimePoint,
    pub out_b: SpaceTimePoint,
}

impl BlumGeometry {
    /// Commit 0, notice 1, announcement 2, open 3, reveal 4, outputs 5.
    pub fn canonical() -> Self {
        let t = |n| at(rational::int(n));
        Self { bc: BcSpec { t1: t(0), t1p: t(1), t2: t(3), t2p: t(4) }, announce: t(2), out_a: t(5), out_b: t(5) }
    }

    pub fn validate(&self) -> Result<()> {
        self.bc.validate()?;
        require_strict(&self.bc.t1p, &self.announce, "commitment notice and announcement")?;
        require_strict(&self.announce, &self.bc.t2, "announcement and opening")?;
        require_strict(&self.announce, &self.out_a, "announcement and Alice's output")?;
        require_strict(&self.bc.t2p, &self.out_b, "reveal and Bob's output")
    }
}

/// Coin flip by commitment: Alice commits to `a`, Bob announces `b`, Alice opens and
/// both output `a ⊕ b`. A missing announcement or reveal is replaced by a local coin.
pub fn blum_cf_from_bc(g: &BlumGeometry) -> Result<ProtocolPair> {
    g.validate()?;
    let (commit, open) = (format!("{INNER}A.commit"), format!("{INNER}A.open"));
    let pi_a = AtomBuilder::new("Blum_A")
        .input(ANNOUNCE, Symbol::bits(), vec![g.announce.clone()])
        .output(&commit, Symbol::bits(), vec![g.bc.t1.clone()])
        .output(&open, vec![Symbol::Open], vec![g.bc.t2.clone()])
        .output("A.c", Symbol::bits(), vec![g.out_a.clone()])
        .uniform_seeds(4)
        .depends("A.c", &[ANNOUNCE])
        .build(|i, s| {
            let a = Symbol::bit((s / 2) as u32);
            let b = if i[0].is_vacuum() { Symbol::bit((s % 2) as u32) } else { i[0] };
            vec![a, Symbol::Open, a.xor(b).expect("bits")]
        })?;
    let (comm, reveal) = (format!("{INNER}B.comm"), format!("{INNER}B.reveal"));
    let pi_b = AtomBuilder::new("Blum_B")
        .input(&comm, vec![Symbol::Comm], vec![g.bc.t1p.clone()])
        .input(&reveal, Symbol::bits(), vec![g.bc.t2p.clone()])
        .output(ANNOUNCE, Symbol::bits(), vec![g.announce.clone()])
        .output("B.c", Symbol::bits(), vec![g.out_b.clone()])
        .uniform_seeds(4)
        .depends(ANNOUNCE, &[&comm])
        .depends("B.c", &[&comm, &reveal])
        .build(|i, s| {
            let b = Symbol::bit((s / 2) as u32);
            let announce = if i[0] == Symbol::Comm { b } else { Symbol::Vacuum };
            let out = match (i[0], i[1]) {
                (Symbol::Comm, a @ Symbol::Val(_)) => a.xor(b).expect("bits"),
                _ => Symbol::bit((s % 2) as u32),
            };
            vec![announce, out]
        })?;
    Ok(ProtocolPair { pi_a, pi_b })
}
