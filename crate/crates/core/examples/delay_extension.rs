use relcrypt::adversary::{delay_extension_attack, DelayExtensionOutcome, DelayExtensionScenario};
use relcrypt::protocols::at;
use relcrypt::rational::{self, format};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for k in 2..=4 {
        match delay_extension_attack(&DelayExtensionScenario::canonical(k))? {
            DelayExtensionOutcome::Attack(r) => println!(
                "k = {k}: blocked {:?}, advantage {}, some hybrid step at least {}",
                r.blocked,
                format(&r.fixed_message_advantage),
                format(&r.epsilon_lower_bound)
            ),
            other => println!("k = {k}: {other:?}"),
        }
    }

    // a claim inside the first channel's region is nothing new
    let mut s = DelayExtensionScenario::canonical(2);
    s.claimed.p_prime = at(rational::int(1));
    s.claimed.q_prime = at(rational::int(3));
    println!("claim (1, 3): {:?}", delay_extension_attack(&s)?);
    Ok(())
}
