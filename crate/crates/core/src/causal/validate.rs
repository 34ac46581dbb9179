use std::collections::HashMap;

use serde::Serialize;

use super::eval::Evaluator;
use super::{check_bound, CausalSystem, Symbol, SystemError};
use crate::spacetime::{precedes, strictly_precedes};

/// Two input assignments that agree on the causal past of an output slot but yield
/// different values there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CausalityWitness {
    pub output: String,
    pub seed: Vec<usize>,
    pub inputs_a: Vec<(String, Symbol)>,
    pub inputs_b: Vec<(String, Symbol)>,
    pub value_a: Symbol,
    pub value_b: Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CausalityReport {
    pub passed: bool,
    pub assignments_checked: u128,
    pub seeds_checked: u128,
    pub witness: Option<CausalityWitness>,
    /// Set when a component emitted a symbol outside its port alphabet.
    pub alphabet_violation: Option<String>,
}

/// Checks that every exposed output depends only on exposed inputs at strictly
/// earlier points, over every joint seed and every input assignment.
///
/// Systems built only from zero-delay converters are checked against the reflexive
/// order instead, since they forward at the point of arrival.
pub fn validate_causality(sys: &CausalSystem) -> Result<CausalityReport, SystemError> {
    let plan = sys.plan();
    let n_assign = plan.input_assignment_count();
    check_bound("input assignment space", n_assign)?;
    let seeds: Vec<(Vec<usize>, _)> = plan.joint_seeds()?.collect();
    check_bound("validation workload", n_assign.saturating_mul(seeds.len() as u128))?;

    let reflexive = sys.is_passthrough();
    let past: Vec<Vec<usize>> = plan
        .ext_out
        .iter()
        .map(|o| {
            plan.ext_in
                .iter()
                .enumerate()
                .filter(|(_, i)| {
                    if reflexive {
                        precedes(&i.point, &o.point)
                    } else {
                        strictly_precedes(&i.point, &o.point)
                    }
                })
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    let choices: Vec<Vec<Symbol>> = plan.ext_in.iter().map(|s| s.choices()).collect();
    let named = |vals: &[Symbol]| -> Vec<(String, Symbol)> {
        plan.ext_in.iter().zip(vals).map(|(s, v)| (s.label.clone(), *v)).collect()
    };

    let mut ev = Evaluator::new(sys);
    for (seed, _) in &seeds {
        let mut seen: Vec<HashMap<Vec<Symbol>, (Symbol, Vec<Symbol>)>> = vec![HashMap::new(); plan.ext_out.len()];
        let mut idx = vec![0usize; choices.len()];
        loop {
            let vals: Vec<Symbol> = idx.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
            ev.run_fixed(seed, &vals);
            if let Some(v) = ev.outputs_in_alphabet() {
                return Ok(CausalityReport {
                    passed: false,
                    assignments_checked: n_assign,
                    seeds_checked: seeds.len() as u128,
                    witness: None,
                    alphabet_violation: Some(v),
                });
            }
            for (o, deps) in past.iter().enumerate() {
                let key: Vec<Symbol> = deps.iter().map(|&k| vals[k]).collect();
                let v = ev.ext_out(o);
                match seen[o].get(&key) {
                    Some((prev, prev_vals)) if *prev != v => {
                        return Ok(CausalityReport {
                            passed: false,
                            assignments_checked: n_assign,
                            seeds_checked: seeds.len() as u128,
                            witness: Some(CausalityWitness {
                                output: plan.ext_out[o].label.clone(),
                                seed: seed.clone(),
                                inputs_a: named(prev_vals),
                                inputs_b: named(&vals),
                                value_a: *prev,
                                value_b: v,
                            }),
                            alphabet_violation: None,
                        });
                    }
                    Some(_) => {}
                    None => {
                        seen[o].insert(key, (v, vals.clone()));
                    }
                }
            }
            if !super::odometer_next(&mut idx, |k| choices[k].len()) {
                break;
            }
        }
    }
    Ok(CausalityReport {
        passed: true,
        assignments_checked: n_assign,
        seeds_checked: seeds.len() as u128,
        witness: None,
        alphabet_violation: None,
    })
}
