use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::eval::Evaluator;
use super::{check_bound, odometer_next, CausalSystem, Direction, Port, Symbol, SystemError};
use crate::rational::RatString;
use crate::spacetime::strictly_precedes;

/// Slot reference by port name and index into the port's point list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotJson {
    pub port: String,
    pub point: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepJson {
    pub out: SlotJson,
    pub inputs: Vec<SlotJson>,
}

/// One row of an exhaustive reaction table. Input and output values follow slot
/// order: ports in declaration order, points in port order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowJson {
    pub seed: usize,
    #[serde(rename = "in")]
    pub inputs: Vec<Symbol>,
    pub out: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemJson {
    pub name: String,
    pub ports: Vec<Port>,
    pub seeds: Vec<RatString>,
    #[serde(default)]
    pub zero_delay: bool,
    #[serde(default)]
    pub deps: Vec<DepJson>,
    pub table: Vec<RowJson>,
}

fn slot_list(ports: &[Port], dir: Direction) -> Vec<(usize, usize)> {
    ports
        .iter()
        .enumerate()
        .filter(|(_, p)| p.direction == dir)
        .flat_map(|(i, p)| (0..p.points.len()).map(move |k| (i, k)))
        .collect()
}

/// Builds a single-component system from an exhaustive reaction table.
pub fn system_from_json(spec: &SystemJson) -> Result<CausalSystem, SystemError> {
    let ports: Vec<Port> = spec
        .ports
        .iter()
        .map(|p| Port::new(p.name.clone(), p.direction, p.alphabet.clone(), p.points.clone()))
        .collect::<Result<_, _>>()?;
    let ins = slot_list(&ports, Direction::In);
    let outs = slot_list(&ports, Direction::Out);
    let weights: Vec<_> = spec.seeds.iter().map(|w| w.0.clone()).collect();

    let resolve = |s: &SlotJson, dir: Direction, list: &[(usize, usize)]| {
        let p = ports
            .iter()
            .position(|q| q.name == s.port && q.direction == dir)
            .ok_or_else(|| SystemError::UnknownPort(s.port.clone()))?;
        list.iter()
            .position(|&x| x == (p, s.point))
            .ok_or_else(|| SystemError::Table(format!("{} has no point index {}", s.port, s.point)))
    };
    let mut deps = vec![Vec::new(); outs.len()];
    for d in &spec.deps {
        let o = resolve(&d.out, Direction::Out, &outs)?;
        for i in &d.inputs {
            deps[o].push(resolve(i, Direction::In, &ins)?);
        }
    }

    let expected: u128 = ins.iter().map(|&(p, _)| ports[p].alphabet.len() as u128 + 1).product::<u128>()
        * weights.len() as u128;
    check_bound("reaction table", expected)?;
    let mut table: HashMap<(usize, Vec<Symbol>), Vec<Symbol>> = HashMap::new();
    for row in &spec.table {
        if row.seed >= weights.len() || row.inputs.len() != ins.len() || row.out.len() != outs.len() {
            return Err(SystemError::Table(format!("malformed row {row:?}")));
        }
        for (v, &(p, _)) in row.inputs.iter().zip(&ins) {
            if !ports[p].accepts(*v) {
                return Err(SystemError::Table(format!("input {v} not in alphabet of {}", ports[p].name)));
            }
        }
        for (v, &(p, _)) in row.out.iter().zip(&outs) {
            if !ports[p].accepts(*v) {
                return Err(SystemError::Table(format!("output {v} not in alphabet of {}", ports[p].name)));
            }
        }
        if table.insert((row.seed, row.inputs.clone()), row.out.clone()).is_some() {
            return Err(SystemError::Table(format!("duplicate row {row:?}")));
        }
    }
    if table.len() as u128 != expected {
        return Err(SystemError::Table(format!(
            "table has {} rows, an exhaustive table needs {expected}",
            table.len()
        )));
    }
    let react = move |inp: &[Symbol], seed: usize| table[&(seed, inp.to_vec())].clone();
    CausalSystem::atom(spec.name.clone(), ports, weights, deps, Arc::new(react), spec.zero_delay)
}

/// Tabulates the exposed behaviour of any system as a single-component table.
///
/// Seeds of the table are the joint seeds of the network with nonzero weight;
/// dependencies list every exposed input strictly preceding each output.
pub fn system_to_json(sys: &CausalSystem) -> Result<SystemJson, SystemError> {
    let plan = sys.plan();
    let mut ports: Vec<Port> = sys.ports().cloned().collect();
    ports.sort_by(|a, b| a.name.cmp(&b.name));
    let ins = slot_list(&ports, Direction::In);
    let outs = slot_list(&ports, Direction::Out);
    let in_map: Vec<usize> = ins
        .iter()
        .map(|&(p, k)| plan.ext_in_index(&ports[p].name, &ports[p].points[k]).expect("slot"))
        .collect();
    let out_map: Vec<usize> = outs
        .iter()
        .map(|&(p, k)| plan.ext_out_index(&ports[p].name, &ports[p].points[k]).expect("slot"))
        .collect();
    let seeds: Vec<_> = plan.joint_seeds()?.collect();
    check_bound("reaction table", plan.input_assignment_count().saturating_mul(seeds.len() as u128))?;

    let choices: Vec<Vec<Symbol>> = ins.iter().map(|&(p, _)| ports[p].choices()).collect();
    let mut ev = Evaluator::new(sys);
    let mut table = Vec::new();
    for (si, (seed, _)) in seeds.iter().enumerate() {
        let mut idx = vec![0usize; ins.len()];
        loop {
            let row_in: Vec<Symbol> = idx.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
            let mut fixed = vec![Symbol::Vacuum; plan.ext_in.len()];
            for (v, &e) in row_in.iter().zip(&in_map) {
                fixed[e] = *v;
            }
            ev.run_fixed(seed, &fixed);
            let out = out_map.iter().map(|&e| ev.ext_out(e)).collect();
            table.push(RowJson { seed: si, inputs: row_in, out });
            if !odometer_next(&mut idx, |k| choices[k].len()) {
                break;
            }
        }
    }
    let deps = outs
        .iter()
        .map(|&(p, k)| DepJson {
            out: SlotJson { port: ports[p].name.clone(), point: k },
            inputs: ins
                .iter()
                .filter(|&&(q, j)| strictly_precedes(&ports[q].points[j], &ports[p].points[k]))
                .map(|&(q, j)| SlotJson { port: ports[q].name.clone(), point: j })
                .collect(),
        })
        .collect();
    Ok(SystemJson {
        name: sys.name().to_string(),
        ports,
        seeds: seeds.into_iter().map(|(_, w)| RatString(w)).collect(),
        zero_delay: sys.is_passthrough(),
        deps,
        table,
    })
}
