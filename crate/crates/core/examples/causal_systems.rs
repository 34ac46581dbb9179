//! Two components wired into one system, then checked for causality and enumerated.
use relcrypt::causal::{compose_parallel, connect, exact_distribution, validate_causality, Assignment, AtomBuilder, Symbol};
use relcrypt::protocols::at;
use relcrypt::rational::{self, rat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = |n| at(rational::int(n));
    // noisy relay: forwards its input with probability 3/4
    let relay = AtomBuilder::new("relay")
        .input("relay.in", Symbol::bits(), vec![t(0)])
        .output("relay.out", Symbol::bits(), vec![t(1)])
        .depends("relay.out", &["relay.in"])
        .seeds(vec![rat(3, 4), rat(1, 4)])
        .build(|i, s| vec![if s == 0 { i[0] } else { i[0].xor(Symbol::ONE).unwrap_or(i[0]) }])?;
    let parity = AtomBuilder::new("parity")
        .input("parity.in", Symbol::bits(), vec![t(1)])
        .output("parity.out", Symbol::bits(), vec![t(2)])
        .depends("parity.out", &["parity.in"])
        .build(|i, _| vec![i[0]])?;
    let joint = compose_parallel(&relay, &parity)?;
    let sys = connect(&joint, &[("relay.out", "parity.in")])?;
    println!("causal: {}", validate_causality(&sys)?.passed);

    let d = exact_distribution(&sys, &Assignment::new().with("relay.in", t(0), Symbol::ONE))?;
    for (outcome, p) in d.iter() {
        println!("{outcome:?}: {}", rational::format(p));
    }

    // an output that reads an input at the same point is not causal
    let echo = AtomBuilder::new("echo")
        .input("in", Symbol::bits(), vec![t(0)])
        .output("out", Symbol::bits(), vec![t(0)])
        .depends("out", &["in"])
        .build(|i, _| vec![i[0]])?;
    let r = validate_causality(&echo)?;
    println!("zero-delay echo causal: {}, witness {:?}", r.passed, r.witness);
    Ok(())
}
