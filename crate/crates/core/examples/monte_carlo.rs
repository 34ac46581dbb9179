use relcrypt::adversary::{equality_distinguisher, mitm_composite, mitm_spec, MitmStrategy};
use relcrypt::analysis::{advantage_exact, advantage_mc};
use relcrypt::causal::Port;
use relcrypt::rational::{self, rat};
use relcrypt::resources::make_cf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = mitm_spec(rat(1, 4));
    let cf = make_cf(&spec)?;
    let real = mitm_composite(&spec, MitmStrategy::copy_c())?;
    let ports: Vec<Port> = cf.honest.ports().cloned().collect();
    let d = equality_distinguisher(&ports)?;
    let exact = advantage_exact(&d, &real, &cf.honest)?;
    println!("exact {}", rational::format(&exact));
    for n in [100, 1000, 10_000, 100_000] {
        let e = advantage_mc(&d, &real, &cf.honest, n, 0.05, 1)?;
        println!("n = {n:>6}: {:.4} +- {:.4} covers: {}", e.estimate, e.half_width * 2.0, e.covers(&exact));
    }
    Ok(())
}
