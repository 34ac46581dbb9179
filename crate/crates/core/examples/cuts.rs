use relcrypt::cuts::{
    all_cuts, canonical_cd_points, cd_channel_map, validate_causality_function, verify_cd_mutual_consistency,
    CausalityFunctionTable, FinitePoset,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (labels, points) = canonical_cd_points();
    let poset = FinitePoset::from_points(labels.clone(), &points)?;
    for c in all_cuts(&poset)? {
        println!("{{{}}}", poset.names(c).join(", "));
    }

    for (name, chi) in [
        ("strict past", CausalityFunctionTable::strict_past(&poset)?),
        ("identity", CausalityFunctionTable::identity(&poset)?),
    ] {
        let r = validate_causality_function(&poset, &chi)?;
        for c in &r.conditions {
            println!("{name} / {}: {} {:?}", c.condition, c.passed, c.counterexample);
        }
    }

    let r = verify_cd_mutual_consistency(labels, &points, 0, 3, 3, None, cd_channel_map(0, 3))?;
    println!("channel box consistent: {} ({} pairs)", r.consistent, r.pairs_checked);
    Ok(())
}
