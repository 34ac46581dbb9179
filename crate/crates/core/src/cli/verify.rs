//! `verify causality` and `verify cuts`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::adversary::{mitm_composite, mitm_spec, MitmStrategy};
use crate::causal::{system_from_json, validate_causality, CausalSystem, SystemJson};
use crate::cuts::{
    all_cuts, canonical_cd_points, cd_channel_map, validate_causality_function, verify_cd_mutual_consistency,
    CausalityFunctionTable, Cut, FinitePoset,
};
use crate::protocols::{
    construct_cf, pi_cdabort_to_cfunfair, pi_unfair_to_biased, AbortToUnfairGeometry, CdToCfGeometry,
    UnfairToBiasedGeometry,
};
use crate::rational;
use crate::resources::Case;

use super::tasks::{Check, Report};
use super::CliError;

/// Every resource, protocol and simulator the bundled constructions use.
pub fn bundled_systems() -> Result<Vec<(String, CausalSystem)>, CliError> {
    let mut out = Vec::new();
    let constructions = [
        construct_cf(&CdToCfGeometry::canonical())?,
        pi_unfair_to_biased(&UnfairToBiasedGeometry::canonical())?,
        pi_cdabort_to_cfunfair(&AbortToUnfairGeometry::canonical())?,
    ];
    for c in &constructions {
        for (part, sys) in [("pi_A", &c.pi_a), ("pi_B", &c.pi_b), ("sigma_A", &c.sigma_a), ("sigma_B", &c.sigma_b)] {
            out.push((format!("{}: {part}", c.name), sys.clone()));
        }
        for case in Case::ALL {
            out.push((format!("{}: target {case:?}", c.name), c.target.get(case).clone()));
            if let Some(r) = &c.assumed {
                out.push((format!("{}: assumed {case:?}", c.name), r.get(case).clone()));
            }
        }
    }
    out.push(("man in the middle, p = 1/2".into(), mitm_composite(&mitm_spec(rational::half()), MitmStrategy::copy_c())?));
    Ok(out)
}

pub fn causality(system: Option<&Path>) -> Result<Report, CliError> {
    let systems = match system {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
            let spec: SystemJson = serde_json::from_str(&text)
                .map_err(|e| CliError::Parse(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))?;
            vec![(path.display().to_string(), system_from_json(&spec)?)]
        }
        None => bundled_systems()?,
    };
    let mut checks = Vec::new();
    let mut results = Vec::new();
    for (name, sys) in &systems {
        let r = validate_causality(sys)?;
        checks.push(Check::new(name.clone(), r.passed, format!("{} assignments", r.assignments_checked)));
        results.push(json!({ "system": name, "report": r }));
    }
    Ok(Report {
        name: "causality".into(),
        kind: "causality".into(),
        passed: checks.iter().all(|c| c.passed),
        result: json!({ "systems": results }),
        checks,
    })
}

/// Random partial order: a random relation on index order, transitively closed.
pub fn random_poset(n: usize, density: f64, rng: &mut ChaCha8Rng) -> FinitePoset {
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
        for cell in row.iter_mut().skip(i + 1) {
            *cell = rng.random_bool(density);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    let labels = (0..n).map(|i| format!("e{i}")).collect();
    FinitePoset::new(labels, leq).expect("closure of an upward relation is a partial order")
}

/// Down-sets by checking every subset directly.
pub fn brute_force_down_sets(p: &FinitePoset) -> Vec<Cut> {
    let n = p.len();
    (0u32..1 << n)
        .filter(|&mask| {
            (0..n).all(|i| mask >> i & 1 == 0 || (0..n).all(|j| !p.leq(j, i) || mask >> j & 1 == 1))
        })
        .map(Cut)
        .collect()
}

pub fn cuts(posets: usize, max_points: usize, seed: u64) -> Result<Report, CliError> {
    let err = |e: crate::cuts::CutsError| CliError::Geometry(e.to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let mut mismatches = 0;
    for i in 0..posets {
        let n = rng.random_range(1..=max_points.clamp(1, 12));
        let p = random_poset(n, rng.random_range(0.1..0.6), &mut rng);
        let mut got = all_cuts(&p).map_err(err)?;
        let mut want = brute_force_down_sets(&p);
        got.sort();
        want.sort();
        if got != want {
            mismatches += 1;
            checks.push(Check::new(format!("poset {i}"), false, format!("{} cuts, expected {}", got.len(), want.len())));
        }
    }
    checks.push(Check::new("cut enumeration", mismatches == 0, format!("{posets} random posets")));

    let (labels, points) = canonical_cd_points();
    let poset = FinitePoset::from_points(labels.clone(), &points).map_err(err)?;
    let strict = validate_causality_function(&poset, &CausalityFunctionTable::strict_past(&poset).map_err(err)?)
        .map_err(err)?;
    let ident = validate_causality_function(&poset, &CausalityFunctionTable::identity(&poset).map_err(err)?)
        .map_err(err)?;
    checks.push(Check::new("strict past is a causality function", strict.all_passed(), ""));
    checks.push(Check::new(
        "identity is rejected with a counterexample",
        !ident.all_passed() && ident.conditions.iter().any(|c| !c.passed && c.counterexample.is_some()),
        "",
    ));
    let mut consistency = Vec::new();
    for k in 2..=4u32 {
        let r = verify_cd_mutual_consistency(labels.clone(), &points, 0, 3, k, None, cd_channel_map(0, 3))
            .map_err(err)?;
        checks.push(Check::new(format!("channel box consistent, alphabet {k}"), r.consistent, format!("{} pairs", r.pairs_checked)));
        consistency.push(r);
    }
    Ok(Report {
        name: "cuts".into(),
        kind: "cuts".into(),
        passed: checks.iter().all(|c| c.passed),
        result: json!({
            "posets": posets,
            "mismatches": mismatches,
            "strict_past": strict,
            "identity": ident,
            "channel_consistency": consistency,
        }),
        checks,
    })
}
