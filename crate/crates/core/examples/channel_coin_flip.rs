//! A perfect coin flip from a channel with delay, and what goes wrong when the
//! parties meet outside the channel's trusted region.
use relcrypt::protocols::{at, construct_cf, construct_cf_unchecked, CdToCfGeometry};
use relcrypt::rational::{self, rat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = CdToCfGeometry::canonical();
    let c = construct_cf(&g)?;
    for r in c.verify()? {
        println!("{:?}: advantage {} over {} strategies", r.which, rational::format(&r.sup.advantage), r.sup.strategies);
    }

    let late = CdToCfGeometry { meet: at(rat(7, 2)), ..g };
    println!("meeting at t = 7/2: {}", construct_cf(&late).unwrap_err());
    for r in construct_cf_unchecked(&late)?.verify()? {
        println!("  {:?}: advantage {}", r.which, rational::format(&r.sup.advantage));
    }
    Ok(())
}
