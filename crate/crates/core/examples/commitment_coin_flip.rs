use relcrypt::analysis::max_event_probability;
use relcrypt::causal::{attach, exact_distribution, Assignment, Symbol};
use relcrypt::protocols::{blum_cf_from_bc, BlumGeometry};
use relcrypt::rational::format;
use relcrypt::resources::make_bc;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = BlumGeometry::canonical();
    let pair = blum_cf_from_bc(&g)?;
    let bc = make_bc(&g.bc)?;

    let honest = attach(&attach(&pair.pi_a, &bc.honest)?, &pair.pi_b)?;
    let d = exact_distribution(&honest, &Assignment::new())?;
    let (a, b) = (d.port_index("A.c").unwrap(), d.port_index("B.c").unwrap());
    println!("honest agreement {}", format(&d.prob_where(|o| o[a] == o[b])));

    let bob = max_event_probability(&attach(&pair.pi_a, &bc.dishonest_b)?, |o| o.get("A.c") == Symbol::ZERO)?;
    let alice = max_event_probability(&attach(&bc.dishonest_a, &pair.pi_b)?, |o| o.get("B.c") == Symbol::ZERO)?;
    println!("cheating Bob forces 0 with {}, cheating Alice with {}", format(&bob), format(&alice));
    Ok(())
}
