use relcrypt::causal::{exact_distribution, Assignment, Symbol};
use relcrypt::protocols::{pi_unfair_to_biased, UnfairToBiasedGeometry};
use relcrypt::rational::format;
use relcrypt::resources::Case;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = UnfairToBiasedGeometry::canonical();
    let c = pi_unfair_to_biased(&g)?;
    for r in c.verify()? {
        println!("{:?}: {}", r.which, format(&r.sup.advantage));
    }

    // Bob aborts: Alice falls back to a fresh coin, independent of what Bob saw
    let real = c.case(Case::DishonestB)?.real;
    let inp = Assignment::new().with("B.abort", g.unfair.dishonest_b.bias.clone(), Symbol::Abort);
    let d = exact_distribution(&real, &inp)?;
    let (a, leak) = (d.port_index("A.c").unwrap(), d.port_index("B.leak").unwrap());
    println!("agreement with the leaked coin after abort: {}", format(&d.prob_where(|o| o[a] == o[leak])));
    Ok(())
}
