mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use relcrypt::adversary::{
    abort_channel_candidates, abort_channel_certificate, delay_extension_attack, direct_message_candidate,
    equality_distinguisher, mitm_agreement_probability, mitm_composite, mitm_spec, triangle_decompose,
    DelayExtensionOutcome, DelayExtensionScenario,
};
use relcrypt::analysis::{advantage_exact, advantage_mc, advantage_sup_enumerated, non_adaptive_distinguisher};
use relcrypt::causal::{attach, exact_distribution, validate_causality, Assignment, AtomBuilder, CausalSystem, Port, Symbol};
use relcrypt::cuts::{
    all_cuts, canonical_cd_points, cd_channel_map, verify_cd_mutual_consistency, validate_causality_function,
    CausalityFunctionTable, FinitePoset,
};
use relcrypt::protocols::{
    at, construct_cf, pi_cdabort_to_cfunfair, pi_unfair_to_biased, AbortToUnfairGeometry, CdToCfGeometry,
    UnfairToBiasedGeometry,
};
use relcrypt::qsmall::{epr_distinguisher, epr_test_success, QuantumChannel};
use relcrypt::rational::{self, rat, Rational};
use relcrypt::resources::{make_cf, Case};
use relcrypt::spacetime::{diamond_subset, precedes, strictly_precedes, CausalDiamond, SpaceTimePoint};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

fn fmt(r: &Rational) -> String {
    rational::format(r)
}

fn all_zero(c: &relcrypt::protocols::Construction) -> Outcome {
    let reports = ok(c.verify())?;
    for r in &reports {
        ensure!(r.sup.advantage == rational::zero(), "{}: {:?} has advantage {}", c.name, r.which, fmt(&r.sup.advantage));
    }
    let strategies: u128 = reports.iter().map(|r| r.sup.strategies).sum();
    Ok(format!("{} cases at 0 over {strategies} strategies", reports.len()))
}

fn channel_construction() -> Outcome {
    all_zero(&ok(construct_cf(&CdToCfGeometry::canonical()))?)
}

fn man_in_the_middle() -> Outcome {
    let mut worst = Duration::ZERO;
    for p in [rat(0, 1), rat(1, 4), rat(1, 2), rat(3, 4), rat(1, 1)] {
        let start = Instant::now();
        let one = rational::one();
        let report = ok(mitm_agreement_probability(&p))?;
        let want = (&one + &p) / rational::int(2);
        ensure!(report.agreement == want, "p = {}: agreement {}", fmt(&p), fmt(&report.agreement));

        let spec = mitm_spec(p.clone());
        let cf = ok(make_cf(&spec))?;
        let ports: Vec<Port> = cf.honest.ports().cloned().collect();
        let d = ok(equality_distinguisher(&ports))?;
        let adv = ok(advantage_exact(&d, &ok(mitm_composite(&spec, report.best))?, &cf.honest))?;
        let want = (&one - &p) / rational::int(2);
        ensure!(adv == want, "p = {}: equality advantage {}", fmt(&p), fmt(&adv));

        let t = ok(triangle_decompose(&ok(direct_message_candidate(&p))?, &p))?;
        ensure!(t.triangle_holds && t.bound_met, "p = {}: certified {} below {}", fmt(&p), fmt(&t.certified), fmt(&t.bound));
        worst = worst.max(start.elapsed());
        ensure!(start.elapsed() < Duration::from_secs(5), "p = {} took {:?}", fmt(&p), start.elapsed());
    }
    Ok(format!("5 biases, slowest {worst:.2?}"))
}

fn unfair_to_biased() -> Outcome {
    let g = UnfairToBiasedGeometry::canonical();
    let c = ok(pi_unfair_to_biased(&g))?;
    let detail = all_zero(&c)?;
    let real = ok(c.case(Case::DishonestB))?.real;
    let inp = Assignment::new().with("B.abort", g.unfair.dishonest_b.bias.clone(), Symbol::Abort);
    let d = ok(exact_distribution(&real, &inp))?;
    let (a, l) = (d.port_index("A.c").ok_or("no A.c")?, d.port_index("B.leak").ok_or("no B.leak")?);
    let agree = d.prob_where(|o| o[a] == o[l]);
    ensure!(agree == rational::half(), "agreement under abort {}", fmt(&agree));
    Ok(format!("{detail}, agreement under abort 1/2"))
}

fn abort_channel() -> Outcome {
    let detail = all_zero(&ok(pi_cdabort_to_cfunfair(&AbortToUnfairGeometry::canonical()))?)?;
    let candidates = ok(abort_channel_candidates())?;
    let mut lowest: Option<Rational> = None;
    for c in &candidates {
        let r = ok(abort_channel_certificate(c))?;
        ensure!(r.consistent, "{}: certificate steps disagree", c.name);
        ensure!(r.bound_met && r.bound == rat(1, 12), "{}: certified {}", c.name, fmt(&r.certified));
        lowest = Some(lowest.map_or(r.certified.clone(), |l: Rational| l.min(r.certified)));
    }
    let lowest = lowest.ok_or("no candidates")?;
    Ok(format!("{detail}, {} candidates certified at least {}", candidates.len(), fmt(&lowest)))
}

fn delay_extension() -> Outcome {
    for k in 2..=4u32 {
        let outcome = ok(delay_extension_attack(&DelayExtensionScenario::canonical(k)))?;
        let DelayExtensionOutcome::Attack(r) = outcome else {
            return Err(format!("k = {k}: canonical claim reported as contained"));
        };
        let want = rational::one() - rat(1, i64::from(k));
        ensure!(r.fixed_message_advantage == want, "k = {k}: advantage {}", fmt(&r.fixed_message_advantage));
        ensure!(r.fixed_message_advantage >= rational::half(), "k = {k}: below 1/2");
        ensure!(r.shifts_exact && r.honest_advantage == rational::zero(), "k = {k}: honest chain or shifts inexact");
    }
    // claimed regions along the line: contained ones are refused, the rest are attacked
    let (mut refused, mut attacked) = (0, 0);
    for a in -1i64..=16 {
        for len in 1i64..=17 {
            let mut s = DelayExtensionScenario::canonical(2);
            s.claimed.p_prime = at(rat(a, 2));
            s.claimed.q_prime = at(rat(a + len, 2));
            if s.validate().is_err() {
                continue;
            }
            let claimed = ok(CausalDiamond::new(s.claimed.p_prime.clone(), s.claimed.q_prime.clone()))?;
            let contained = s.channels.iter().any(|c| {
                CausalDiamond::new(c.p_prime.clone(), c.q_prime.clone()).is_ok_and(|d| diamond_subset(&claimed, &d))
            });
            match ok(delay_extension_attack(&s))? {
                DelayExtensionOutcome::NotApplicable { .. } => {
                    ensure!(contained, "claim ({a}/2, {}/2) refused but not contained", a + len);
                    refused += 1;
                }
                DelayExtensionOutcome::Attack(r) => {
                    ensure!(!contained, "claim ({a}/2, {}/2) attacked but contained", a + len);
                    ensure!(r.fixed_message_advantage >= rational::half(), "claim ({a}/2, {}/2) below 1/2", a + len);
                    attacked += 1;
                }
            }
        }
    }
    Ok(format!("1 - 1/k for k = 2..4; {refused} contained claims refused, {attacked} attacked"))
}

fn epr() -> Outcome {
    const TOL: f64 = 1e-9;
    let id = ok(epr_test_success(&ok(QuantumChannel::identity(2))?))?;
    ensure!((id - 1.0).abs() < TOL, "identity accepted with {id}");
    let mut r = common::rng(6);
    for i in 0..10 {
        let tau = ok(relcrypt::cli::tasks::random_state(2, &mut r))?;
        let s = ok(epr_test_success(&ok(QuantumChannel::replace(2, &tau))?))?;
        ensure!((s - 0.25).abs() < TOL, "state {i} accepted with {s}");
        let rep = ok(epr_distinguisher(2, &tau))?;
        ensure!((rep.advantage - 0.75).abs() < TOL, "state {i}: advantage {}", rep.advantage);
    }
    Ok("identity 1, ten replacements 0.25, advantage 0.75".into())
}

fn cuts() -> Outcome {
    let mut r = common::rng(7);
    let mut total = 0;
    for i in 0..30 {
        let n = r.random_range(1..=8);
        let density = r.random_range(0.1..0.6);
        let mut leq = vec![vec![false; n]; n];
        for a in 0..n {
            leq[a][a] = true;
            for b in a + 1..n {
                leq[a][b] = r.random_bool(density);
            }
        }
        for k in 0..n {
            for a in 0..n {
                for b in 0..n {
                    leq[a][b] |= leq[a][k] && leq[k][b];
                }
            }
        }
        let labels = (0..n).map(|i| format!("e{i}")).collect();
        let p = ok(FinitePoset::new(labels, leq))?;
        let mut got: Vec<u32> = ok(all_cuts(&p))?.into_iter().map(|c| c.0).collect();
        got.sort_unstable();
        let want = common::down_set_oracle(n, |a, b| p.leq(a, b));
        ensure!(got == want, "poset {i}: {} cuts, oracle {}", got.len(), want.len());
        total += got.len();
    }

    let (labels, points) = canonical_cd_points();
    let poset = ok(FinitePoset::from_points(labels.clone(), &points))?;
    let strict = ok(validate_causality_function(&poset, &ok(CausalityFunctionTable::strict_past(&poset))?))?;
    ensure!(strict.all_passed(), "strict past rejected");
    let ident = ok(validate_causality_function(&poset, &ok(CausalityFunctionTable::identity(&poset))?))?;
    let failed: Vec<&str> = ident.conditions.iter().filter(|c| !c.passed).map(|c| c.condition.as_str()).collect();
    ensure!(!failed.is_empty(), "identity accepted");
    ensure!(
        ident.conditions.iter().all(|c| c.passed || c.counterexample.is_some()),
        "identity rejected without a counterexample"
    );
    for k in 2..=4 {
        let rep = ok(verify_cd_mutual_consistency(labels.clone(), &points, 0, 3, k, None, cd_channel_map(0, 3)))?;
        ensure!(rep.consistent, "channel box inconsistent for alphabet {k}");
    }
    Ok(format!("30 posets, {total} cuts; identity fails {}", failed.join(", ")))
}

fn random_point(r: &mut rand_chacha::ChaCha8Rng) -> SpaceTimePoint {
    let mut c = || rat(r.random_range(-6..=6), r.random_range(1..=2));
    SpaceTimePoint::new(c(), [c(), c(), c()])
}

fn sup(x: &CausalSystem, y: &CausalSystem) -> Result<Rational, String> {
    ok(advantage_sup_enumerated(x, y)).map(|s| s.advantage)
}

fn properties() -> Outcome {
    let mut r = common::rng(8);
    for _ in 0..3000 {
        let (p, q, s) = (random_point(&mut r), random_point(&mut r), random_point(&mut r));
        ensure!(precedes(&p, &p) && !strictly_precedes(&p, &p), "not reflexive at {p:?}");
        ensure!(precedes(&p, &q) == common::cone_oracle(&p, &q), "cone mismatch {p:?} {q:?}");
        ensure!(!(precedes(&p, &q) && precedes(&q, &p)) || p == q, "not antisymmetric");
        ensure!(!(precedes(&p, &q) && precedes(&q, &s)) || precedes(&p, &s), "not transitive");
    }

    for seed in 0..500u64 {
        let chain = common::random_chain(seed, 2 + (seed % 2) as usize, seed % 3 == 0);
        let rep = ok(validate_causality(&chain.system))?;
        ensure!(rep.passed, "composed system {seed} acausal: {:?}", rep.witness);
    }

    for seed in 0..100u64 {
        let (a, b, c) = common::triple(seed);
        let (ab, ba, ac, cb) = (sup(&a, &b)?, sup(&b, &a)?, sup(&a, &c)?, sup(&c, &b)?);
        ensure!(sup(&a, &a)? == rational::zero() && ab == ba, "triple {seed}: not symmetric");
        ensure!(ab <= &ac + &cb, "triple {seed}: triangle fails");
        let mut g = common::rng(seed ^ 2);
        let view = [("view", common::times(&[4, 5]))];
        let alpha = common::random_atom(&mut g, "alpha", &[("inner:out", common::times(&[1, 3]))], &view, 2, true);
        let (xa, xb) = (ok(attach(&alpha.system, &a))?, ok(attach(&alpha.system, &b))?);
        ensure!(sup(&xa, &xb)? <= ab, "triple {seed}: converter increased the advantage");
        let d = common::random_distinguisher(&mut g, &xa);
        ensure!(ok(advantage_exact(&d, &xa, &xb))? <= ab, "triple {seed}: distinguisher beat the bound");
    }

    let coin = |name: &str, w: Vec<Rational>| {
        AtomBuilder::new(name)
            .output("out", Symbol::bits(), vec![common::ipt(1, 0)])
            .seeds(w)
            .build(|_, s| vec![Symbol::bit(s as u32)])
    };
    let fair = ok(coin("fair", vec![rational::half(), rational::half()]))?;
    let zero = ok(coin("zero", vec![rational::one(), rational::zero()]))?;
    let ports: Vec<Port> = fair.ports().cloned().collect();
    let d = ok(non_adaptive_distinguisher("read", &ports, &Assignment::new(), |o| match o.get("out") {
        Symbol::Val(v) => v,
        _ => 1,
    }))?;
    let exact = ok(advantage_exact(&d, &fair, &zero))?;
    let mut covered = 0;
    for seed in 0..200 {
        if ok(advantage_mc(&d, &fair, &zero, 10_000, 0.05, seed))?.covers(&exact) {
            covered += 1;
        }
    }
    ensure!(covered >= 190, "intervals covered the exact value {covered}/200 times");
    Ok(format!("3000 point triples, 500 composed systems, 100 triples, coverage {covered}/200"))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 8] = [
        ("channel with delay gives a perfect coin flip", 5, channel_construction),
        ("man in the middle correlates two coin flips", 25, man_in_the_middle),
        ("unfair coin flip gives a half-biased one", 2, unfair_to_biased),
        ("abort channel gives an unfair coin flip, candidates refuted", 10, abort_channel),
        ("naive delay extension is distinguishable", 5, delay_extension),
        ("maximally entangled test", 1, epr),
        ("cuts and causality functions", 10, cuts),
        ("property suites", 600, properties),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(d) if took > Duration::from_secs(budget) => Err(format!("{d}; over the {budget} s budget")),
            o => o,
        };
        match outcome {
            Ok(d) => println!("PASS {} {name} ({took:.2?}): {d}", i + 1),
            Err(e) => {
                failures += 1;
                println!("FAIL {} {name} ({took:.2?}): {e}", i + 1);
            }
        }
    }
    if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
