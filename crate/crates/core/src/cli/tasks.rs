//! Runs scenario tasks and collects their built-in checks.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::adversary::{
    abort_channel_candidates, abort_channel_certificate, blocked_channel_candidate, delay_extension_attack,
    direct_message_candidate, equality_distinguisher, mitm_agreement_probability, mitm_composite, mitm_spec,
    triangle_decompose, DelayExtensionOutcome, DelayExtensionScenario,
};
use crate::analysis::{advantage_exact, advantage_mc, max_event_probability, non_adaptive_distinguisher};
use crate::causal::{attach, Assignment, CausalSystem, Direction, Port, Symbol};
use crate::protocols::{
    blum_cf_from_bc, construct_cf, pi_cdabort_to_cfunfair, pi_unfair_to_biased, AbortToUnfairGeometry,
    BlumGeometry, CdToCfGeometry, Construction, UnfairToBiasedGeometry,
};
use crate::qsmall::{epr_distinguisher, DensityMatrix, TOL};
use crate::rational::{self, Rational};
use crate::resources::make_bc;

use super::scenario::{Analysis, Mode, Scenario, Task};
use super::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }

    fn equal(name: &str, got: &Rational, want: &Rational) -> Self {
        Self::new(name, got == want, format!("{} (expected {})", rational::format(got), rational::format(want)))
    }

    fn at_least(name: &str, got: &Rational, min: &Rational) -> Self {
        Self::new(name, got >= min, format!("{} (at least {})", rational::format(got), rational::format(min)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub name: String,
    pub kind: String,
    pub result: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub struct TaskOutput {
    pub kind: &'static str,
    pub result: Value,
    pub checks: Vec<Check>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

pub fn run_scenario(s: &Scenario) -> Result<Report, CliError> {
    let out = run_task(&s.task, &s.analysis)?;
    let mut checks = out.checks;
    for text in &s.assertions {
        let a = super::scenario::Assertion::parse(text)?;
        let (ok, detail) = a.check(&out.result);
        checks.push(Check::new(text.clone(), ok, detail));
    }
    Ok(Report {
        name: s.name.clone(),
        kind: out.kind.to_string(),
        passed: checks.iter().all(|c| c.passed),
        result: out.result,
        checks,
    })
}

pub fn run_task(task: &Task, analysis: &Analysis) -> Result<TaskOutput, CliError> {
    match task {
        Task::ConstructCf { geometry } => {
            let g = geometry.clone().unwrap_or_else(CdToCfGeometry::canonical);
            construction("construct_cf", &construct_cf(&g)?, analysis)
        }
        Task::UnfairToBiased { geometry } => {
            let g = geometry.clone().unwrap_or_else(UnfairToBiasedGeometry::canonical);
            let mut out = construction("unfair_to_biased", &pi_unfair_to_biased(&g)?, analysis)?;
            let agree = abort_agreement(&g)?;
            out.checks.push(Check::equal("abort agreement", &agree, &rational::half()));
            out.result["abort_agreement"] = json!(rational::format(&agree));
            Ok(out)
        }
        Task::AbortToUnfair { geometry } => {
            let g = geometry.clone().unwrap_or_else(AbortToUnfairGeometry::canonical);
            construction("abort_to_unfair", &pi_cdabort_to_cfunfair(&g)?, analysis)
        }
        Task::AbortChannelCertificate { candidates } => abort_certificates(candidates),
        Task::Mitm { p, candidate } => mitm(&p.0, candidate.as_deref(), analysis),
        Task::DelayExtension { channels, k } => {
            let mut s = channels.clone().unwrap_or_else(|| DelayExtensionScenario::canonical(k.unwrap_or(2)));
            if let Some(k) = k {
                let alphabet = Symbol::values(*k);
                s.claimed.alphabet = alphabet.clone();
                s.channels.iter_mut().for_each(|c| c.alphabet = alphabet.clone());
            }
            delay(&s)
        }
        Task::Epr { dim, samples } => epr(*dim, *samples, analysis.rng_seed),
        Task::Blum { geometry } => blum(&geometry.clone().unwrap_or_else(BlumGeometry::canonical)),
    }
}

/// Non-adaptive probe used for Monte Carlo cross-checks: feeds the first symbol of
/// every input alphabet and guesses the parity of everything observed.
fn parity_probe(ports: &[Port]) -> Result<CausalSystem, CliError> {
    let mut inputs = Assignment::new();
    for p in ports.iter().filter(|p| p.direction == Direction::In) {
        for q in &p.points {
            inputs.set(&p.name, q.clone(), p.alphabet[0]);
        }
    }
    let names: Vec<String> =
        ports.iter().filter(|p| p.direction == Direction::Out).map(|p| p.name.clone()).collect();
    Ok(non_adaptive_distinguisher("parity probe", ports, &inputs, move |o| {
        names.iter().filter_map(|n| o.get(n).as_val()).fold(0, |a, v| a ^ (v & 1))
    })?)
}

fn construction(kind: &'static str, c: &Construction, analysis: &Analysis) -> Result<TaskOutput, CliError> {
    let mut cases = Vec::new();
    let mut checks = Vec::new();
    for (case, report) in c.cases()?.iter().zip(c.verify()?) {
        let mut entry = json!({
            "case": report.which,
            "advantage": rational::format(&report.sup.advantage),
            "strategies": report.sup.strategies.to_string(),
        });
        checks.push(Check::equal(&format!("{:?} advantage", report.which), &report.sup.advantage, &Rational::zero()));
        if analysis.mode == Mode::Mc {
            let ports: Vec<Port> = case.real.ports().cloned().collect();
            let d = parity_probe(&ports)?;
            let exact = advantage_exact(&d, &case.real, &case.ideal)?;
            let est = advantage_mc(&d, &case.real, &case.ideal, analysis.n, analysis.delta, analysis.rng_seed)?;
            entry["probe_exact"] = json!(rational::format(&exact));
            entry["probe_estimate"] = to_value(&est);
            entry["probe_covered"] = json!(est.covers(&exact));
        }
        cases.push(entry);
    }
    Ok(TaskOutput { kind, result: json!({ "construction": c.name, "cases": cases }), checks })
}

fn abort_agreement(g: &UnfairToBiasedGeometry) -> Result<Rational, CliError> {
    let c = pi_unfair_to_biased(g)?;
    let real = c.case(crate::resources::Case::DishonestB)?.real;
    let inp = Assignment::new().with("B.abort", g.unfair.dishonest_b.bias.clone(), Symbol::Abort);
    let d = crate::causal::exact_distribution(&real, &inp)?;
    let (a, l) = (d.port_index("A.c"), d.port_index("B.leak"));
    let (Some(a), Some(l)) = (a, l) else {
        return Err(CliError::Geometry("unfair coin flip lacks A.c or B.leak".into()));
    };
    Ok(d.prob_where(|o| o[a] == o[l]))
}

fn abort_certificates(names: &[String]) -> Result<TaskOutput, CliError> {
    let base = construction("abort_channel_certificate", &pi_cdabort_to_cfunfair(&AbortToUnfairGeometry::canonical())?, &Analysis::default())?;
    let mut checks = base.checks;
    let mut reports = Vec::new();
    for cand in abort_channel_candidates()? {
        if !names.is_empty() && !names.contains(&cand.name) {
            continue;
        }
        let r = abort_channel_certificate(&cand)?;
        checks.push(Check::at_least(&format!("{} certified", cand.name), &r.certified, &r.bound));
        checks.push(Check::new(format!("{} lifted steps agree", cand.name), r.consistent, ""));
        reports.push(to_value(&r));
    }
    if reports.is_empty() {
        return Err(CliError::Parse(format!("no bundled candidate among {names:?}")));
    }
    Ok(TaskOutput {
        kind: "abort_channel_certificate",
        result: json!({ "construction": base.result, "candidates": reports }),
        checks,
    })
}

pub fn mitm(p: &Rational, candidate: Option<&str>, analysis: &Analysis) -> Result<TaskOutput, CliError> {
    let report = mitm_agreement_probability(p)?;
    let spec = mitm_spec(p.clone());
    let cf = crate::resources::make_cf(&spec)?;
    let composite = mitm_composite(&spec, report.best)?;
    let ports: Vec<Port> = cf.honest.ports().cloned().collect();
    let d = equality_distinguisher(&ports)?;
    let advantage = advantage_exact(&d, &composite, &cf.honest)?;
    let one = rational::one();
    let bound = (&one - p) / rational::int(6);
    let mut result = json!({
        "p": rational::format(p),
        "agreement": rational::format(&report.agreement),
        "best_strategy": report.best,
        "unrestricted_agreement": rational::format(&report.unrestricted_agreement),
        "unrestricted_best_strategy": report.unrestricted_best,
        "advantage": rational::format(&advantage),
        "bound": rational::format(&bound),
        "bound_exceeded": &advantage / rational::int(3) >= bound,
    });
    let mut checks = vec![
        Check::equal("agreement", &report.agreement, &((&one + p) / rational::int(2))),
        Check::equal("equality advantage", &advantage, &((&one - p) / rational::int(2))),
    ];
    if analysis.mode == Mode::Mc {
        let est = advantage_mc(&d, &composite, &cf.honest, analysis.n, analysis.delta, analysis.rng_seed)?;
        checks.push(Check::new("estimate covers exact", est.covers(&advantage), format!("{:.4} ± {:.4}", est.estimate, est.ci)));
        result["estimate"] = to_value(&est);
    }
    if let Some(name) = candidate {
        let cand = match name {
            "direct_message" => direct_message_candidate(p)?,
            "blocked_channel" => blocked_channel_candidate(p)?,
            other => return Err(CliError::Parse(format!("unknown candidate {other:?}"))),
        };
        let t = triangle_decompose(&cand, p)?;
        checks.push(Check::at_least("triangle certified", &t.certified, &t.bound));
        checks.push(Check::new("triangle inequality", t.triangle_holds, ""));
        result["triangle"] = to_value(&t);
    }
    Ok(TaskOutput { kind: "mitm", result, checks })
}

fn delay(s: &DelayExtensionScenario) -> Result<TaskOutput, CliError> {
    let outcome = delay_extension_attack(s)?;
    let mut checks = Vec::new();
    if let DelayExtensionOutcome::Attack(r) = &outcome {
        checks.push(Check::equal("honest chain", &r.honest_advantage, &Rational::zero()));
        checks.push(Check::new("shift converters exact", r.shifts_exact, ""));
        checks.push(Check::equal("fixed message advantage", &r.fixed_message_advantage, &r.expected));
        checks.push(Check::at_least("at least one half", &r.fixed_message_advantage, &rational::half()));
    }
    Ok(TaskOutput { kind: "delay_extension", result: to_value(&outcome), checks })
}

/// Random density matrix `G G† / tr(G G†)` with entries uniform in the unit square.
pub fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> Result<DensityMatrix, CliError> {
    let g = crate::qsmall::CMatrix::from_fn(dim, dim, |_, _| {
        num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    let m = m / tr;
    // symmetrise away rounding so the Hermitian check passes
    let m = (&m + m.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
    DensityMatrix::new(m).map_err(|e| CliError::Geometry(e.to_string()))
}

pub fn epr(dim: usize, samples: usize, seed: u64) -> Result<TaskOutput, CliError> {
    let q = |e: crate::qsmall::QError| CliError::Geometry(e.to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let expected_accept = 1.0 / (dim * dim) as f64;
    let mut runs = Vec::new();
    let mut checks = Vec::new();
    for i in 0..samples.max(1) {
        let tau = if i == 0 { DensityMatrix::basis(dim, 0).map_err(q)? } else { random_state(dim, &mut rng)? };
        let r = epr_distinguisher(dim, &tau).map_err(q)?;
        checks.push(Check::new(
            format!("sample {i}"),
            (r.accept_identity - 1.0).abs() < TOL && (r.accept_replace - expected_accept).abs() < TOL,
            format!("identity {:.12}, replace {:.12}", r.accept_identity, r.accept_replace),
        ));
        runs.push(r);
    }
    let advantage = runs.iter().map(|r| r.advantage).fold(f64::INFINITY, f64::min);
    Ok(TaskOutput {
        kind: "epr",
        result: json!({
            "dim": dim,
            "advantage": advantage,
            "expected_advantage": 1.0 - expected_accept,
            "runs": runs,
        }),
        checks,
    })
}

fn blum(g: &BlumGeometry) -> Result<TaskOutput, CliError> {
    let pair = blum_cf_from_bc(g)?;
    let bc = make_bc(&g.bc)?;
    let honest = attach(&attach(&pair.pi_a, &bc.honest)?, &pair.pi_b)?;
    let d = crate::causal::exact_distribution(&honest, &Assignment::new())?;
    let (a, b) = (d.port_index("A.c"), d.port_index("B.c"));
    let (Some(a), Some(b)) = (a, b) else {
        return Err(CliError::Geometry("protocol lacks outputs".into()));
    };
    let agree = d.prob_where(|o| o[a] == o[b]);
    let zero = Symbol::ZERO;
    let bob = max_event_probability(&attach(&pair.pi_a, &bc.dishonest_b)?, |o| o.get("A.c") == zero)?;
    let alice = max_event_probability(&attach(&bc.dishonest_a, &pair.pi_b)?, |o| o.get("B.c") == zero)?;
    let checks = vec![
        Check::equal("honest agreement", &agree, &rational::one()),
        Check::equal("dishonest Bob steering", &bob, &rational::half()),
        Check::equal("dishonest Alice steering", &alice, &rational::rat(3, 4)),
    ];
    Ok(TaskOutput {
        kind: "blum",
        result: json!({
            "honest_agreement": rational::format(&agree),
            "dishonest_bob_max_zero": rational::format(&bob),
            "dishonest_alice_max_zero": rational::format(&alice),
        }),
        checks,
    })
}
