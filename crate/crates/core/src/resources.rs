//! Two-party resources as finite causal systems, and the converters that act on them.
//!
//! Port names carry the party as a prefix: `A.` for Alice's interface and `B.` for
//! Bob's. Each resource comes as a triple of the honest system and the two systems
//! seen when one party is dishonest.

use serde::{Deserialize, Serialize};

use crate::causal::{AtomBuilder, CausalSystem, Direction, Port, Symbol, INNER};
use crate::error::{require_strict, Error, Result};
use crate::rational::{self, Rational};
use crate::spacetime::{CausalDiamond, SpaceTimePoint};

#[derive(Clone, Debug)]
pub struct ResourceTriple {
    pub honest: CausalSystem,
    pub dishonest_a: CausalSystem,
    pub dishonest_b: CausalSystem,
}

impl ResourceTriple {
    pub fn get(&self, case: Case) -> &CausalSystem {
        match case {
            Case::Honest => &self.honest,
            Case::DishonestA => &self.dishonest_a,
            Case::DishonestB => &self.dishonest_b,
        }
    }
}

/// Which party, if any, is dishonest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    Honest,
    DishonestA,
    DishonestB,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::Honest, Case::DishonestA, Case::DishonestB];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn prefix(self) -> &'static str {
        match self {
            Side::A => "A.",
            Side::B => "B.",
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// Where a dishonest party sees the coin early and where it may steer the outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiasPoints {
    pub leak: SpaceTimePoint,
    pub bias: SpaceTimePoint,
}

/// Coin flip geometry. `dishonest_b` holds Bob's points when he cheats; they must
/// precede Alice's output, and symmetrically for `dishonest_a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfSpec {
    #[serde(with = "rational::serde_rat")]
    pub p: Rational,
    pub out_a: SpaceTimePoint,
    pub out_b: SpaceTimePoint,
    pub dishonest_a: BiasPoints,
    pub dishonest_b: BiasPoints,
}

impl CfSpec {
    pub fn validate(&self) -> Result<()> {
        if self.p < rational::zero() || self.p > rational::one() {
            return Err(Error::Geometry(format!("bias {} is outside [0, 1]", self.p)));
        }
        let b = &self.dishonest_b;
        require_strict(&b.leak, &b.bias, "dishonest Bob's leak and bias points")?;
        require_strict(&b.bias, &self.out_a, "dishonest Bob's bias point and Alice's output")?;
        let a = &self.dishonest_a;
        require_strict(&a.leak, &a.bias, "dishonest Alice's leak and bias points")?;
        require_strict(&a.bias, &self.out_b, "dishonest Alice's bias point and Bob's output")
    }

    /// Same geometry with another bias.
    pub fn with_p(&self, p: Rational) -> Self {
        Self { p, ..self.clone() }
    }

    fn out(&self, side: Side) -> &SpaceTimePoint {
        match side {
            Side::A => &self.out_a,
            Side::B => &self.out_b,
        }
    }

    fn cheat(&self, side: Side) -> &BiasPoints {
        match side {
            Side::A => &self.dishonest_a,
            Side::B => &self.dishonest_b,
        }
    }
}

fn honest_cf(spec: &CfSpec) -> Result<CausalSystem> {
    Ok(AtomBuilder::new("CF")
        .output("A.c", Symbol::bits(), vec![spec.out_a.clone()])
        .output("B.c", Symbol::bits(), vec![spec.out_b.clone()])
        .uniform_seeds(2)
        .build(|_, s| vec![Symbol::bit(s as u32); 2])?)
}

/// Honest party's output after `cheater` saw the coin and may have steered it.
/// Seeds encode `2c + replace`, where `replace` has probability `p`.
fn biased_cf(spec: &CfSpec, cheater: Side) -> Result<CausalSystem> {
    let honest = cheater.other();
    let pts = spec.cheat(cheater);
    let out = format!("{}c", honest.prefix());
    let leak = format!("{}leak", cheater.prefix());
    let bias = format!("{}bias", cheater.prefix());
    let keep = (rational::one() - &spec.p) / rational::int(2);
    let swap = &spec.p / rational::int(2);
    let b = AtomBuilder::new(format!("CF^p_{cheater:?}"))
        .input(&bias, Symbol::bits(), vec![pts.bias.clone()])
        .output(&out, Symbol::bits(), vec![spec.out(honest).clone()])
        .output(&leak, Symbol::bits(), vec![pts.leak.clone()])
        .seeds(vec![keep.clone(), swap.clone(), keep, swap])
        .depends(&out, &[&bias]);
    Ok(b.build(|i, s| {
        let c = Symbol::bit((s / 2) as u32);
        let o = if s % 2 == 1 && !i[0].is_vacuum() { i[0] } else { c };
        vec![o, c]
    })?)
}

/// `(CF, CF^p_A, CF^p_B)`. A missing bias input leaves the coin untouched.
pub fn make_cf(spec: &CfSpec) -> Result<ResourceTriple> {
    spec.validate()?;
    Ok(ResourceTriple {
        honest: honest_cf(spec)?,
        dishonest_a: biased_cf(spec, Side::A)?,
        dishonest_b: biased_cf(spec, Side::B)?,
    })
}

fn unfair_cf(spec: &CfSpec, cheater: Side) -> Result<CausalSystem> {
    let honest = cheater.other();
    let pts = spec.cheat(cheater);
    let out = format!("{}c", honest.prefix());
    let leak = format!("{}leak", cheater.prefix());
    let abort = format!("{}abort", cheater.prefix());
    Ok(AtomBuilder::new(format!("CF^uf_{cheater:?}"))
        .input(&abort, vec![Symbol::Abort, Symbol::NoAbort], vec![pts.bias.clone()])
        .output(&out, vec![Symbol::ZERO, Symbol::ONE, Symbol::Abort], vec![spec.out(honest).clone()])
        .output(&leak, Symbol::bits(), vec![pts.leak.clone()])
        .uniform_seeds(2)
        .depends(&out, &[&abort])
        .build(|i, s| {
            let c = Symbol::bit(s as u32);
            let o = if i[0] == Symbol::Abort { Symbol::Abort } else { c };
            vec![o, c]
        })?)
}

/// `(CF, CF^uf_A, CF^uf_B)`. The cheater's `abort` input sits at the bias point; a
/// missing input delivers the coin. The bias `p` of `spec` is not used.
pub fn make_cf_unfair(spec: &CfSpec) -> Result<ResourceTriple> {
    spec.validate()?;
    Ok(ResourceTriple {
        honest: honest_cf(spec)?,
        dishonest_a: unfair_cf(spec, Side::A)?,
        dishonest_b: unfair_cf(spec, Side::B)?,
    })
}

/// Bit commitment times: commit `t1`, notification `t1p`, open `t2`, reveal `t2p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BcSpec {
    pub t1: SpaceTimePoint,
    pub t1p: SpaceTimePoint,
    pub t2: SpaceTimePoint,
    pub t2p: SpaceTimePoint,
}

impl BcSpec {
    pub fn validate(&self) -> Result<()> {
        require_strict(&self.t1, &self.t1p, "commit and notification")?;
        require_strict(&self.t1p, &self.t2, "notification and open")?;
        require_strict(&self.t2, &self.t2p, "open and reveal")
    }
}

/// The commitment resource; all three members are the same system.
pub fn make_bc(spec: &BcSpec) -> Result<ResourceTriple> {
    spec.validate()?;
    let bc = AtomBuilder::new("BC")
        .input("A.commit", Symbol::bits(), vec![spec.t1.clone()])
        .input("A.open", vec![Symbol::Open], vec![spec.t2.clone()])
        .output("B.comm", vec![Symbol::Comm], vec![spec.t1p.clone()])
        .output("B.reveal", Symbol::bits(), vec![spec.t2p.clone()])
        .depends("B.comm", &["A.commit"])
        .depends("B.reveal", &["A.commit", "A.open"])
        .build(|i, _| {
            let comm = if i[0].is_vacuum() { Symbol::Vacuum } else { Symbol::Comm };
            let reveal = if i[1] == Symbol::Open { i[0] } else { Symbol::Vacuum };
            vec![comm, reveal]
        })?;
    Ok(ResourceTriple { honest: bc.clone(), dishonest_a: bc.clone(), dishonest_b: bc })
}

/// Channel with delay: honest input at `p`, honest delivery at `q`, cheating sender
/// input at `p_prime`, cheating receiver delivery at `q_prime`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdSpec {
    pub p: SpaceTimePoint,
    pub p_prime: SpaceTimePoint,
    pub q_prime: SpaceTimePoint,
    pub q: SpaceTimePoint,
    pub alphabet: Vec<Symbol>,
}

impl CdSpec {
    /// Binary channel through four points.
    pub fn binary(p: SpaceTimePoint, p_prime: SpaceTimePoint, q_prime: SpaceTimePoint, q: SpaceTimePoint) -> Self {
        Self { p, p_prime, q_prime, q, alphabet: Symbol::bits() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphabet.is_empty() || self.alphabet.iter().any(|s| s.is_vacuum()) {
            return Err(Error::Geometry("channel alphabet must be non-empty and exclude the vacuum".into()));
        }
        require_strict(&self.p, &self.p_prime, "P and P'")?;
        require_strict(&self.p_prime, &self.q_prime, "P' and Q'")?;
        require_strict(&self.q_prime, &self.q, "Q' and Q")
    }
}

fn channel(name: &str, alphabet: &[Symbol], from: &SpaceTimePoint, to: &SpaceTimePoint) -> Result<CausalSystem> {
    Ok(AtomBuilder::new(name)
        .input("A.in", alphabet.to_vec(), vec![from.clone()])
        .output("B.out", alphabet.to_vec(), vec![to.clone()])
        .depends("B.out", &["A.in"])
        .build(|i, _| vec![i[0]])?)
}

/// `(CD, CD_A, CD_B)` with ports `A.in` and `B.out`.
pub fn make_cd(spec: &CdSpec) -> Result<ResourceTriple> {
    spec.validate()?;
    Ok(ResourceTriple {
        honest: channel("CD", &spec.alphabet, &spec.p, &spec.q)?,
        dishonest_a: channel("CD_A", &spec.alphabet, &spec.p_prime, &spec.q)?,
        dishonest_b: channel("CD_B", &spec.alphabet, &spec.p, &spec.q_prime)?,
    })
}

/// Abort channel: a channel whose cheating sender may retract at `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdAbortSpec {
    pub cd: CdSpec,
    pub r: SpaceTimePoint,
}

impl CdAbortSpec {
    pub fn validate(&self) -> Result<()> {
        self.cd.validate()?;
        require_strict(&self.cd.p_prime, &self.r, "P' and R")?;
        require_strict(&self.r, &self.cd.q_prime, "R and Q'")
    }
}

/// `(CD, CD^⊥_A, CD_B)`. The cheating sender's `A.retract` port takes `abort` at `r`.
pub fn make_cd_abort(spec: &CdAbortSpec) -> Result<ResourceTriple> {
    spec.validate()?;
    let cd = &spec.cd;
    let dishonest_a = AtomBuilder::new("CD^abort_A")
        .input("A.in", cd.alphabet.clone(), vec![cd.p_prime.clone()])
        .input("A.retract", vec![Symbol::Abort], vec![spec.r.clone()])
        .output("B.out", cd.alphabet.clone(), vec![cd.q.clone()])
        .depends("B.out", &["A.in", "A.retract"])
        .build(|i, _| vec![if i[1] == Symbol::Abort { Symbol::Vacuum } else { i[0] }])?;
    Ok(ResourceTriple {
        honest: channel("CD", &cd.alphabet, &cd.p, &cd.q)?,
        dishonest_a,
        dishonest_b: channel("CD_B", &cd.alphabet, &cd.p, &cd.q_prime)?,
    })
}

/// `D(P', Q')`.
pub fn trusted_region(spec: &CdSpec) -> Result<CausalDiamond> {
    spec.validate()?;
    Ok(CausalDiamond::new(spec.p_prime.clone(), spec.q_prime.clone())?)
}

/// Converter that makes a cheating interface look honest: on Alice's side it takes
/// the message at `P` and hands it to the channel at `P'`; on Bob's side it takes the
/// delivery at `Q'` and releases it at `Q`.
pub fn delta_converter(spec: &CdSpec, side: Side) -> Result<CausalSystem> {
    spec.validate()?;
    let (outer, inner, from, to) = match side {
        Side::A => ("A.in", format!("{INNER}A.in"), &spec.p, &spec.p_prime),
        Side::B => ("B.out", format!("{INNER}B.out"), &spec.q_prime, &spec.q),
    };
    let b = AtomBuilder::new(format!("delta_{side:?}"));
    let b = match side {
        Side::A => b
            .input(outer, spec.alphabet.clone(), vec![from.clone()])
            .output(&inner, spec.alphabet.clone(), vec![to.clone()])
            .depends(&inner, &[outer]),
        Side::B => b
            .input(&inner, spec.alphabet.clone(), vec![from.clone()])
            .output(outer, spec.alphabet.clone(), vec![to.clone()])
            .depends(outer, &[&inner]),
    };
    Ok(b.build(|i, _| vec![i[0]])?)
}

/// Zero-delay converter over `ports` that forwards every slot except those where
/// `blocked(port, point)` holds, which carry the vacuum instead.
pub fn blocker<F>(ports: &[Port], blocked: F) -> Result<CausalSystem>
where
    F: Fn(&str, &SpaceTimePoint) -> bool,
{
    let mut b = AtomBuilder::new("blocker").zero_delay();
    let mut pass = Vec::new();
    for p in ports {
        let inner = format!("{INNER}{}", p.name);
        pass.extend(p.points.iter().map(|q| !blocked(&p.name, q)));
        b = match p.direction {
            Direction::Out => b
                .input(&inner, p.alphabet.clone(), p.points.clone())
                .output(&p.name, p.alphabet.clone(), p.points.clone())
                .depends(&p.name, &[&inner]),
            Direction::In => b
                .input(&p.name, p.alphabet.clone(), p.points.clone())
                .output(&inner, p.alphabet.clone(), p.points.clone())
                .depends(&inner, &[&p.name]),
        };
    }
    // one input and one output slot per forwarded slot, in the same order
    Ok(b.build(move |i, _| i.iter().zip(&pass).map(|(v, ok)| if *ok { *v } else { Symbol::Vacuum }).collect())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::{attach, exact_distribution, validate_causality, Assignment};
    use crate::rational::rat;

    fn pt(t: i64) -> SpaceTimePoint {
        SpaceTimePoint::int(t, 0)
    }

    pub(crate) fn cf_spec(p: Rational) -> CfSpec {
        let bp = BiasPoints { leak: pt(1), bias: pt(2) };
        CfSpec { p, out_a: pt(3), out_b: pt(3), dishonest_a: bp.clone(), dishonest_b: bp }
    }

    fn cd_spec(k: u32) -> CdSpec {
        CdSpec { p: pt(0), p_prime: pt(1), q_prime: pt(3), q: pt(4), alphabet: Symbol::values(k) }
    }

    fn agree_with(p: Rational, b: Symbol) -> Rational {
        let cf = make_cf(&cf_spec(p)).unwrap();
        let d = exact_distribution(&cf.dishonest_b, &Assignment::new().with("B.bias", pt(2), b)).unwrap();
        let i = d.port_index("A.c").unwrap();
        d.prob_where(|o| o[i] == b)
    }

    #[test]
    fn bias_examples() {
        assert_eq!(agree_with(rat(0, 1), Symbol::ONE), rat(1, 2));
        assert_eq!(agree_with(rat(1, 1), Symbol::ZERO), rat(1, 1));
        assert_eq!(agree_with(rat(1, 2), Symbol::ONE), rat(3, 4));
    }

    #[test]
    fn honest_coin_is_shared_and_uniform() {
        let cf = make_cf(&cf_spec(rat(1, 2))).unwrap();
        let d = exact_distribution(&cf.honest, &Assignment::new()).unwrap();
        assert_eq!(d.prob(&[Symbol::ZERO, Symbol::ZERO]), rat(1, 2));
        assert_eq!(d.prob(&[Symbol::ONE, Symbol::ONE]), rat(1, 2));
    }

    #[test]
    fn cf_ordering_is_checked() {
        let mut s = cf_spec(rat(1, 2));
        s.dishonest_b.bias = pt(5);
        assert!(matches!(make_cf(&s), Err(Error::Geometry(_))));
    }

    #[test]
    fn unfair_abort_and_default() {
        let cf = make_cf_unfair(&cf_spec(rat(0, 1))).unwrap();
        let run = |v: Option<Symbol>| {
            let mut a = Assignment::new();
            if let Some(v) = v {
                a.set("B.abort", pt(2), v);
            }
            let d = exact_distribution(&cf.dishonest_b, &a).unwrap();
            let (o, l) = (d.port_index("A.c").unwrap(), d.port_index("B.leak").unwrap());
            (d.prob_where(|x| x[o] == Symbol::Abort), d.prob_where(|x| x[o] == x[l]))
        };
        assert_eq!(run(Some(Symbol::Abort)), (rat(1, 1), rat(0, 1)));
        assert_eq!(run(Some(Symbol::NoAbort)), (rat(0, 1), rat(1, 1)));
        assert_eq!(run(None), (rat(0, 1), rat(1, 1)));
    }

    #[test]
    fn commitment_reveals_only_when_opened() {
        let spec = BcSpec { t1: pt(0), t1p: pt(1), t2: pt(2), t2p: pt(3) };
        let bc = make_bc(&spec).unwrap().honest;
        let opened = Assignment::new().with("A.commit", pt(0), Symbol::ONE).with("A.open", pt(2), Symbol::Open);
        let d = exact_distribution(&bc, &opened).unwrap();
        assert_eq!(d.prob(&[Symbol::Comm, Symbol::ONE]), rat(1, 1));
        let closed = Assignment::new().with("A.commit", pt(0), Symbol::ONE);
        assert_eq!(exact_distribution(&bc, &closed).unwrap().prob(&[Symbol::Comm, Symbol::Vacuum]), rat(1, 1));
        let none = exact_distribution(&bc, &Assignment::new()).unwrap();
        assert_eq!(none.prob(&[Symbol::Vacuum, Symbol::Vacuum]), rat(1, 1));
    }

    #[test]
    fn channel_variants_shift_stamps() {
        let cd = make_cd(&cd_spec(2)).unwrap();
        let d = exact_distribution(&cd.honest, &Assignment::new().with("A.in", pt(0), Symbol::ONE)).unwrap();
        assert_eq!(d.labels(), &["B.out@(t=4, 0)".to_string()]);
        assert_eq!(d.prob(&[Symbol::ONE]), rat(1, 1));
        let d = exact_distribution(&cd.dishonest_b, &Assignment::new().with("A.in", pt(0), Symbol::ZERO)).unwrap();
        assert_eq!(d.labels(), &["B.out@(t=3, 0)".to_string()]);
        assert_eq!(d.prob(&[Symbol::ZERO]), rat(1, 1));
        let d = exact_distribution(&cd.honest, &Assignment::new()).unwrap();
        assert_eq!(d.prob(&[Symbol::Vacuum]), rat(1, 1));
    }

    #[test]
    fn abort_channel_retracts() {
        let spec = CdAbortSpec { cd: cd_spec(2), r: SpaceTimePoint::on_line(rat(5, 2), rat(0, 1)) };
        let t = make_cd_abort(&spec).unwrap();
        let sent = Assignment::new().with("A.in", pt(1), Symbol::ONE);
        assert_eq!(exact_distribution(&t.dishonest_a, &sent).unwrap().prob(&[Symbol::ONE]), rat(1, 1));
        let retracted = sent.with("A.retract", spec.r.clone(), Symbol::Abort);
        assert_eq!(exact_distribution(&t.dishonest_a, &retracted).unwrap().prob(&[Symbol::Vacuum]), rat(1, 1));
        assert!(t.honest.port("A.retract").is_none());
    }

    #[test]
    fn delta_converters_restore_honest_channel() {
        for k in 2..=3 {
            let spec = cd_spec(k);
            let cd = make_cd(&spec).unwrap();
            let a = attach(&delta_converter(&spec, Side::A).unwrap(), &cd.dishonest_a).unwrap();
            let b = attach(&cd.dishonest_b, &delta_converter(&spec, Side::B).unwrap()).unwrap();
            for v in std::iter::once(Symbol::Vacuum).chain(spec.alphabet.clone()) {
                let inp = Assignment::new().with("A.in", pt(0), v);
                let want = exact_distribution(&cd.honest, &inp).unwrap();
                assert_eq!(exact_distribution(&a, &inp).unwrap(), want);
                assert_eq!(exact_distribution(&b, &inp).unwrap(), want);
            }
        }
    }

    #[test]
    fn trusted_region_is_the_inner_diamond() {
        let r = trusted_region(&cd_spec(2)).unwrap();
        assert_eq!((r.lo, r.hi), (pt(1), pt(3)));
        let mut bad = cd_spec(2);
        bad.q_prime = bad.p_prime.clone();
        assert!(trusted_region(&bad).is_err());
    }

    #[test]
    fn blocker_all_or_nothing() {
        let spec = cd_spec(2);
        let cd = make_cd(&spec).unwrap().honest;
        let ports: Vec<Port> = cd.ports().filter(|p| p.name == "A.in").cloned().collect();
        let inp = Assignment::new().with("A.in", pt(0), Symbol::ONE);
        let all = attach(&blocker(&ports, |_, _| true).unwrap(), &cd).unwrap();
        assert_eq!(exact_distribution(&all, &inp).unwrap().prob(&[Symbol::Vacuum]), rat(1, 1));
        let none = attach(&blocker(&ports, |_, _| false).unwrap(), &cd).unwrap();
        assert_eq!(exact_distribution(&none, &inp).unwrap(), exact_distribution(&cd, &inp).unwrap());
    }

    #[test]
    fn constructed_systems_are_causal() {
        let cf = make_cf(&cf_spec(rat(1, 3))).unwrap();
        let uf = make_cf_unfair(&cf_spec(rat(0, 1))).unwrap();
        let cd = make_cd(&cd_spec(3)).unwrap();
        for s in [cf.honest, cf.dishonest_a, cf.dishonest_b, uf.dishonest_a, uf.dishonest_b, cd.dishonest_a] {
            assert!(validate_causality(&s).unwrap().passed, "{}", s.name());
        }
    }
}
