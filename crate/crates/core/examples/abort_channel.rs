//! Abort channels give unfair coin flips, so a message-only abort channel would give
//! a biased coin flip and fall to the man in the middle.
use relcrypt::adversary::{abort_channel_candidates, abort_channel_certificate};
use relcrypt::protocols::{pi_cdabort_to_cfunfair, AbortToUnfairGeometry};
use relcrypt::rational::format;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = pi_cdabort_to_cfunfair(&AbortToUnfairGeometry::canonical())?;
    for r in c.verify()? {
        println!("{:?}: {}", r.which, format(&r.sup.advantage));
    }
    for cand in abort_channel_candidates()? {
        let r = abort_channel_certificate(&cand)?;
        let steps: Vec<String> = r.on_candidate.iter().map(format).collect();
        println!("{}: steps [{}], certified {} (bound {})", r.candidate, steps.join(", "), format(&r.certified), format(&r.bound));
    }
    Ok(())
}
