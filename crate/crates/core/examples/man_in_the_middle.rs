//! Forwarding between two biased coin flips makes their outcomes agree more often
//! than independent coins would.
use relcrypt::adversary::{
    direct_message_candidate, equality_distinguisher, mitm_agreement_probability, mitm_composite, mitm_spec,
    triangle_decompose,
};
use relcrypt::analysis::advantage_exact;
use relcrypt::causal::Port;
use relcrypt::rational::{format, rat};
use relcrypt::resources::make_cf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("p     agree  any rule  equality  triangle");
    for n in 0..=4 {
        let p = rat(n, 4);
        let report = mitm_agreement_probability(&p)?;
        let spec = mitm_spec(p.clone());
        let cf = make_cf(&spec)?;
        let ports: Vec<Port> = cf.honest.ports().cloned().collect();
        let adv = advantage_exact(&equality_distinguisher(&ports)?, &mitm_composite(&spec, report.best)?, &cf.honest)?;
        let t = triangle_decompose(&direct_message_candidate(&p)?, &p)?;
        println!(
            "{:<5} {:<6} {:<9} {:<9} {} >= {}",
            format(&p),
            format(&report.agreement),
            format(&report.unrestricted_agreement),
            format(&adv),
            format(&t.certified),
            format(&t.bound)
        );
    }
    Ok(())
}
