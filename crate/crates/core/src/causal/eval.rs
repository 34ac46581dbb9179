use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use super::system::{Atom, ExtPort};
use super::{check_bound, Direction, Symbol, SystemError};
use crate::rational::Rational;
use crate::spacetime::{precedes, SpaceTimePoint};

/// A slot of one component: `slot` indexes its input or output slot list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SlotRef {
    pub atom: usize,
    pub slot: usize,
}

/// An exposed slot of a network.
#[derive(Clone, Debug)]
pub struct ExtSlot {
    pub port: String,
    pub point: SpaceTimePoint,
    pub label: String,
    /// Non-vacuum alphabet of the port.
    pub alphabet: Vec<Symbol>,
    global: usize,
}

impl ExtSlot {
    pub fn choices(&self) -> Vec<Symbol> {
        let mut v = vec![Symbol::Vacuum];
        v.extend(self.alphabet.iter().copied());
        v
    }
}

struct Fire {
    atom: usize,
    /// Output slots of the component located at this step's point.
    outs: Vec<usize>,
}

struct Step {
    ext_inputs: Vec<usize>,
    fires: Vec<Fire>,
}

enum Sampler {
    Int { total: u64, cum: Vec<(u64, usize)> },
    Float { cum: Vec<(f64, usize)> },
}

/// Compiled evaluation schedule of a network.
pub struct Plan {
    in_off: Vec<usize>,
    out_off: Vec<usize>,
    n_in: usize,
    n_out: usize,
    route: Vec<Option<usize>>,
    pub ext_in: Vec<ExtSlot>,
    pub ext_out: Vec<ExtSlot>,
    steps: Vec<Step>,
    support: Vec<Vec<(usize, Rational)>>,
    samplers: Vec<Sampler>,
}

impl Plan {
    pub(crate) fn compile(
        atoms: &[Arc<Atom>],
        wires: &[(SlotRef, SlotRef)],
        ports: &[ExtPort],
        schedule: Option<&[SpaceTimePoint]>,
    ) -> Result<Self, SystemError> {
        let mut in_off = Vec::with_capacity(atoms.len());
        let mut out_off = Vec::with_capacity(atoms.len());
        let (mut n_in, mut n_out) = (0, 0);
        for a in atoms {
            in_off.push(n_in);
            out_off.push(n_out);
            n_in += a.in_slots.len();
            n_out += a.out_slots.len();
        }
        let mut route = vec![None; n_out];
        let mut fed = vec![false; n_in];
        for (o, i) in wires {
            let g = in_off[i.atom] + i.slot;
            if fed[g] {
                return Err(SystemError::Wiring {
                    from: atoms[o.atom].name.clone(),
                    to: atoms[i.atom].name.clone(),
                    reason: "input slot already has a source".into(),
                });
            }
            fed[g] = true;
            route[out_off[o.atom] + o.slot] = Some(g);
        }

        let mut ext_in = Vec::new();
        let mut ext_out = Vec::new();
        for ep in ports {
            let atom = &atoms[ep.atom];
            for (k, pt) in ep.port.points.iter().enumerate() {
                let slot = (ep.atom_port, k);
                let (list, base, target) = match ep.port.direction {
                    Direction::In => (&atom.in_slots, in_off[ep.atom], &mut ext_in),
                    Direction::Out => (&atom.out_slots, out_off[ep.atom], &mut ext_out),
                };
                let idx = list.iter().position(|&s| s == slot).expect("exposed slot");
                target.push(ExtSlot {
                    port: ep.port.name.clone(),
                    point: pt.clone(),
                    label: ep.port.slot_label(k),
                    alphabet: ep.port.alphabet.clone(),
                    global: base + idx,
                });
            }
        }
        let key = |s: &ExtSlot| (s.port.clone(), s.point.clone());
        ext_in.sort_by_key(key);
        ext_out.sort_by_key(key);

        let mut points: Vec<SpaceTimePoint> = ext_in.iter().map(|s| s.point.clone()).collect();
        for a in atoms {
            points.extend(a.out_slots.iter().map(|&s| a.slot_point(s).clone()));
        }
        points.sort();
        points.dedup();
        let points = match schedule {
            None => points,
            Some(order) => {
                for p in &points {
                    if !order.contains(p) {
                        return Err(SystemError::Schedule(format!("point {p} is missing")));
                    }
                }
                for (i, a) in order.iter().enumerate() {
                    for b in &order[i + 1..] {
                        if a == b {
                            return Err(SystemError::Schedule(format!("point {a} repeats")));
                        }
                        if precedes(b, a) {
                            return Err(SystemError::Schedule(format!("{b} precedes {a} but is scheduled later")));
                        }
                    }
                }
                order.to_vec()
            }
        };

        let mut steps = Vec::with_capacity(points.len());
        for x in &points {
            let ext_inputs = ext_in.iter().enumerate().filter(|(_, s)| &s.point == x).map(|(i, _)| i).collect();
            let mut fires: Vec<Fire> = atoms
                .iter()
                .enumerate()
                .filter_map(|(ai, a)| {
                    let outs: Vec<usize> =
                        (0..a.out_slots.len()).filter(|&o| a.slot_point(a.out_slots[o]) == x).collect();
                    (!outs.is_empty()).then_some(Fire { atom: ai, outs })
                })
                .collect();
            order_zero_delay(atoms, wires, &mut fires, x)?;
            steps.push(Step { ext_inputs, fires });
        }

        let support: Vec<Vec<(usize, Rational)>> = atoms
            .iter()
            .map(|a| {
                a.weights
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(i, w)| (i, w.clone()))
                    .collect()
            })
            .collect();
        let samplers = support.iter().map(|s| sampler(s)).collect();
        Ok(Self { in_off, out_off, n_in, n_out, route, ext_in, ext_out, steps, support, samplers })
    }

    pub fn ext_in_index(&self, port: &str, point: &SpaceTimePoint) -> Option<usize> {
        self.ext_in.iter().position(|s| s.port == port && &s.point == point)
    }

    pub fn ext_out_index(&self, port: &str, point: &SpaceTimePoint) -> Option<usize> {
        self.ext_out.iter().position(|s| s.port == port && &s.point == point)
    }

    pub fn out_labels(&self) -> Vec<String> {
        self.ext_out.iter().map(|s| s.label.clone()).collect()
    }

    /// Number of joint seeds with nonzero weight.
    pub fn joint_seed_count(&self) -> u128 {
        self.support.iter().map(|s| s.len() as u128).product()
    }

    /// Number of exhaustive external input assignments.
    pub fn input_assignment_count(&self) -> u128 {
        self.ext_in.iter().map(|s| s.alphabet.len() as u128 + 1).product()
    }

    pub fn joint_seeds(&self) -> Result<JointSeeds<'_>, SystemError> {
        check_bound("joint seed space", self.joint_seed_count())?;
        Ok(JointSeeds { support: &self.support, idx: vec![0; self.support.len()], done: false })
    }

    pub fn sample_seeds<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        self.samplers
            .iter()
            .map(|s| match s {
                Sampler::Int { total, cum } => {
                    let u = rng.random_range(0..*total);
                    cum.iter().find(|(c, _)| u < *c).map(|(_, i)| *i).unwrap_or(cum[cum.len() - 1].1)
                }
                Sampler::Float { cum } => {
                    let u: f64 = rng.random();
                    cum.iter().find(|(c, _)| u < *c).map(|(_, i)| *i).unwrap_or(cum[cum.len() - 1].1)
                }
            })
            .collect()
    }
}

fn sampler(support: &[(usize, Rational)]) -> Sampler {
    let lcm = support.iter().fold(BigInt::one(), |l, (_, w)| l.lcm(w.denom()));
    if let Some(total) = lcm.to_u64() {
        let mut acc = 0u64;
        let cum = support
            .iter()
            .map(|(i, w)| {
                acc += (w.numer() * (&lcm / w.denom())).to_u64().expect("fits");
                (acc, *i)
            })
            .collect();
        return Sampler::Int { total, cum };
    }
    let mut acc = 0.0;
    let cum = support
        .iter()
        .map(|(i, w)| {
            acc += crate::rational::to_f64(w);
            (acc, *i)
        })
        .collect();
    Sampler::Float { cum }
}

/// Orders same-point firings so that zero-delay components run after their sources.
fn order_zero_delay(
    atoms: &[Arc<Atom>],
    wires: &[(SlotRef, SlotRef)],
    fires: &mut Vec<Fire>,
    x: &SpaceTimePoint,
) -> Result<(), SystemError> {
    if !fires.iter().any(|f| atoms[f.atom].zero_delay) {
        return Ok(());
    }
    let n = fires.len();
    let pos = |a: usize| fires.iter().position(|f| f.atom == a);
    let mut edges = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for (o, i) in wires {
        let (Some(src), Some(dst)) = (pos(o.atom), pos(i.atom)) else { continue };
        let sa = &atoms[o.atom];
        let da = &atoms[i.atom];
        if !da.zero_delay || sa.slot_point(sa.out_slots[o.slot]) != x || da.slot_point(da.in_slots[i.slot]) != x {
            continue;
        }
        let read = fires[dst].outs.iter().any(|&oi| da.deps[oi].contains(&i.slot));
        if read && !edges[src].contains(&dst) {
            edges[src].push(dst);
            indeg[dst] += 1;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut ready: Vec<usize> = (0..n).filter(|&k| indeg[k] == 0).collect();
    while let Some(k) = ready.first().copied() {
        ready.remove(0);
        order.push(k);
        for &d in &edges[k] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                ready.push(d);
            }
        }
    }
    if order.len() < n {
        return Err(SystemError::ZeroDelayCycle(x.clone()));
    }
    let mut old: Vec<Option<Fire>> = std::mem::take(fires).into_iter().map(Some).collect();
    *fires = order.into_iter().map(|k| old[k].take().expect("once")).collect();
    Ok(())
}

/// Enumerates joint seeds with nonzero weight and their product weight.
pub struct JointSeeds<'a> {
    support: &'a [Vec<(usize, Rational)>],
    idx: Vec<usize>,
    done: bool,
}

impl Iterator for JointSeeds<'_> {
    type Item = (Vec<usize>, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let seeds = self.idx.iter().zip(self.support).map(|(&k, s)| s[k].0).collect();
        let w = self.idx.iter().zip(self.support).fold(Rational::one(), |acc, (&k, s)| acc * &s[k].1);
        self.done = true;
        for (k, s) in self.idx.iter_mut().zip(self.support).rev() {
            *k += 1;
            if *k < s.len() {
                self.done = false;
                break;
            }
            *k = 0;
        }
        Some((seeds, w))
    }
}

/// Read access to exposed outputs produced so far.
pub struct OutView<'a> {
    plan: &'a Plan,
    out_vals: &'a [Symbol],
}

impl OutView<'_> {
    pub fn get(&self, ext_out: usize) -> Symbol {
        self.out_vals[self.plan.ext_out[ext_out].global]
    }
}

/// Reusable buffers for repeated evaluation of one network.
pub struct Evaluator {
    plan: Arc<Plan>,
    atoms: Vec<Arc<Atom>>,
    in_vals: Vec<Symbol>,
    out_vals: Vec<Symbol>,
}

impl Evaluator {
    pub fn new(sys: &super::CausalSystem) -> Self {
        Self {
            plan: sys.plan.clone(),
            atoms: sys.atoms.clone(),
            in_vals: vec![Symbol::Vacuum; sys.plan.n_in],
            out_vals: vec![Symbol::Vacuum; sys.plan.n_out],
        }
    }

    pub fn plan(&self) -> &Plan {
        &self.plan
    }

    /// Runs the schedule once. `policy` supplies each exposed input when its point is
    /// reached and sees every exposed output produced earlier in the schedule.
    pub fn run<P>(&mut self, seeds: &[usize], mut policy: P)
    where
        P: FnMut(usize, &OutView) -> Symbol,
    {
        self.in_vals.fill(Symbol::Vacuum);
        self.out_vals.fill(Symbol::Vacuum);
        let plan = &*self.plan;
        for step in &plan.steps {
            for &e in &step.ext_inputs {
                let v = policy(e, &OutView { plan, out_vals: &self.out_vals });
                self.in_vals[plan.ext_in[e].global] = v;
            }
            for f in &step.fires {
                let atom = &self.atoms[f.atom];
                let lo = plan.in_off[f.atom];
                let outs = (atom.react)(&self.in_vals[lo..lo + atom.in_slots.len()], seeds[f.atom]);
                for &o in &f.outs {
                    let g = plan.out_off[f.atom] + o;
                    let v = outs[o];
                    self.out_vals[g] = v;
                    if let Some(i) = plan.route[g] {
                        self.in_vals[i] = v;
                    }
                }
            }
        }
    }

    /// Runs with a fixed value per exposed input slot.
    pub fn run_fixed(&mut self, seeds: &[usize], inputs: &[Symbol]) {
        self.run(seeds, |e, _| inputs[e]);
    }

    pub fn ext_out(&self, i: usize) -> Symbol {
        self.out_vals[self.plan.ext_out[i].global]
    }

    pub fn ext_outs(&self) -> Vec<Symbol> {
        (0..self.plan.ext_out.len()).map(|i| self.ext_out(i)).collect()
    }

    pub fn ext_in(&self, i: usize) -> Symbol {
        self.in_vals[self.plan.ext_in[i].global]
    }

    /// Whether every emitted output lies in its port alphabet.
    pub(crate) fn outputs_in_alphabet(&self) -> Option<String> {
        for (ai, a) in self.atoms.iter().enumerate() {
            for (o, &(p, k)) in a.out_slots.iter().enumerate() {
                let v = self.out_vals[self.plan.out_off[ai] + o];
                if !a.ports[p].accepts(v) {
                    return Some(format!("{} emitted {v} on {}", a.name, a.ports[p].slot_label(k)));
                }
            }
        }
        None
    }
}
