use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::eval::{Plan, SlotRef};
use super::{Direction, Port, Symbol, SystemError};
use crate::rational::Rational;
use crate::spacetime::{precedes, strictly_precedes, SpaceTimePoint};

/// Reaction of an atomic component: input slot values and a seed index to output
/// slot values. Slots are ordered by port declaration, then by point within the port.
pub type Reaction = Arc<dyn Fn(&[Symbol], usize) -> Vec<Symbol> + Send + Sync>;

/// Prefix marking the side of a converter that faces the resource.
pub const INNER: &str = "inner:";

pub(crate) struct Atom {
    pub name: String,
    pub ports: Vec<Port>,
    pub in_slots: Vec<(usize, usize)>,
    pub out_slots: Vec<(usize, usize)>,
    pub weights: Vec<Rational>,
    /// Per output slot, the input slots it may read.
    pub deps: Vec<Vec<usize>>,
    pub react: Reaction,
    pub zero_delay: bool,
}

impl Atom {
    pub fn slot_point(&self, (port, pt): (usize, usize)) -> &SpaceTimePoint {
        &self.ports[port].points[pt]
    }

    fn slot_label(&self, (port, pt): (usize, usize)) -> String {
        self.ports[port].slot_label(pt)
    }
}

fn slots_of(ports: &[Port], dir: Direction) -> Vec<(usize, usize)> {
    ports
        .iter()
        .enumerate()
        .filter(|(_, p)| p.direction == dir)
        .flat_map(|(i, p)| (0..p.points.len()).map(move |k| (i, k)))
        .collect()
}

/// Builder for a single-component system.
pub struct AtomBuilder {
    name: String,
    ports: Vec<Result<Port, SystemError>>,
    weights: Vec<Rational>,
    deps: Vec<(String, Vec<String>)>,
    zero_delay: bool,
}

impl AtomBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ports: Vec::new(),
            weights: vec![Rational::one()],
            deps: Vec::new(),
            zero_delay: false,
        }
    }

    pub fn input(mut self, name: &str, alphabet: Vec<Symbol>, points: Vec<SpaceTimePoint>) -> Self {
        self.ports.push(Port::new(name, Direction::In, alphabet, points));
        self
    }

    pub fn output(mut self, name: &str, alphabet: Vec<Symbol>, points: Vec<SpaceTimePoint>) -> Self {
        self.ports.push(Port::new(name, Direction::Out, alphabet, points));
        self
    }

    pub fn seeds(mut self, weights: Vec<Rational>) -> Self {
        self.weights = weights;
        self
    }

    pub fn uniform_seeds(self, n: usize) -> Self {
        let w = Rational::new(1.into(), (n as i64).into());
        self.seeds(vec![w; n])
    }

    /// Marks a wire-level converter whose outputs may read inputs at the same point.
    pub fn zero_delay(mut self) -> Self {
        self.zero_delay = true;
        self
    }

    /// Declares that every slot of `out` may read every causally earlier slot of `ins`.
    pub fn depends(mut self, out: &str, ins: &[&str]) -> Self {
        self.deps.push((out.to_string(), ins.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn build<F>(self, react: F) -> Result<CausalSystem, SystemError>
    where
        F: Fn(&[Symbol], usize) -> Vec<Symbol> + Send + Sync + 'static,
    {
        let ports: Vec<Port> = self.ports.into_iter().collect::<Result<_, _>>()?;
        let in_slots = slots_of(&ports, Direction::In);
        let out_slots = slots_of(&ports, Direction::Out);
        let find = |name: &str, dir: Direction| {
            ports
                .iter()
                .position(|p| p.name == name && p.direction == dir)
                .ok_or_else(|| SystemError::UnknownPort(name.to_string()))
        };
        let mut deps = vec![Vec::new(); out_slots.len()];
        for (out, ins) in &self.deps {
            let op = find(out, Direction::Out)?;
            let in_ports: Vec<usize> = ins.iter().map(|n| find(n, Direction::In)).collect::<Result<_, _>>()?;
            for (oi, &(p, k)) in out_slots.iter().enumerate() {
                if p != op {
                    continue;
                }
                let at = &ports[p].points[k];
                for (ii, &(q, j)) in in_slots.iter().enumerate() {
                    let from = &ports[q].points[j];
                    let ok = if self.zero_delay { precedes(from, at) } else { strictly_precedes(from, at) };
                    if in_ports.contains(&q) && ok && !deps[oi].contains(&ii) {
                        deps[oi].push(ii);
                    }
                }
            }
        }
        CausalSystem::atom(self.name, ports, self.weights, deps, Arc::new(react), self.zero_delay)
    }
}

#[derive(Clone)]
pub(crate) struct ExtPort {
    pub port: Port,
    pub atom: usize,
    pub atom_port: usize,
}

/// A network of atomic components with some ports exposed.
#[derive(Clone)]
pub struct CausalSystem {
    name: String,
    pub(crate) atoms: Vec<Arc<Atom>>,
    pub(crate) wires: Vec<(SlotRef, SlotRef)>,
    pub(crate) ports: Vec<ExtPort>,
    schedule: Option<Vec<SpaceTimePoint>>,
    pub(crate) plan: Arc<Plan>,
}

impl fmt::Debug for CausalSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CausalSystem")
            .field("name", &self.name)
            .field("components", &self.atoms.iter().map(|a| a.name.as_str()).collect::<Vec<_>>())
            .field("ports", &self.ports.iter().map(|p| &p.port.name).collect::<Vec<_>>())
            .finish()
    }
}

impl CausalSystem {
    /// A single-component system with explicit per-slot dependencies.
    pub fn atom(
        name: impl Into<String>,
        ports: Vec<Port>,
        weights: Vec<Rational>,
        deps: Vec<Vec<usize>>,
        react: Reaction,
        zero_delay: bool,
    ) -> Result<Self, SystemError> {
        let name = name.into();
        for (i, p) in ports.iter().enumerate() {
            if ports[..i].iter().any(|q| q.name == p.name) {
                return Err(SystemError::PortClash(p.name.clone()));
            }
        }
        if weights.is_empty() || weights.iter().any(|w| w.is_negative()) {
            return Err(SystemError::BadWeights(format!("{name}: weights must be nonnegative")));
        }
        let total: Rational = weights.iter().fold(Rational::zero(), |a, w| a + w);
        if !total.is_one() {
            return Err(SystemError::BadWeights(format!("{name}: weights sum to {total}")));
        }
        let in_slots = slots_of(&ports, Direction::In);
        let out_slots = slots_of(&ports, Direction::Out);
        if deps.len() != out_slots.len() {
            return Err(SystemError::Table(format!("{name}: one dependency list per output slot")));
        }
        let atom = Atom {
            name: name.clone(),
            ports,
            in_slots,
            out_slots,
            weights,
            deps,
            react,
            zero_delay,
        };
        for (oi, ds) in atom.deps.iter().enumerate() {
            let at = atom.slot_point(atom.out_slots[oi]);
            for &ii in ds {
                let from = atom.slot_point(*atom.in_slots.get(ii).ok_or_else(|| {
                    SystemError::Table(format!("{name}: dependency on missing input slot {ii}"))
                })?);
                let ok = if zero_delay { precedes(from, at) } else { strictly_precedes(from, at) };
                if !ok {
                    return Err(SystemError::IllegalDependency {
                        out: atom.slot_label(atom.out_slots[oi]),
                        input: atom.slot_label(atom.in_slots[ii]),
                        reason: if zero_delay {
                            "input is not in the causal past".into()
                        } else {
                            "input does not strictly precede the output".into()
                        },
                    });
                }
            }
        }
        let ports = (0..atom.ports.len())
            .map(|i| ExtPort { port: atom.ports[i].clone(), atom: 0, atom_port: i })
            .collect();
        Self::assemble(name, vec![Arc::new(atom)], Vec::new(), ports, None)
    }

    fn assemble(
        name: String,
        atoms: Vec<Arc<Atom>>,
        wires: Vec<(SlotRef, SlotRef)>,
        ports: Vec<ExtPort>,
        schedule: Option<Vec<SpaceTimePoint>>,
    ) -> Result<Self, SystemError> {
        let plan = Arc::new(Plan::compile(&atoms, &wires, &ports, schedule.as_deref())?);
        Ok(Self { name, atoms, wires, ports, schedule, plan })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn ports(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().map(|p| &p.port)
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports().find(|p| p.name == name)
    }

    pub fn component_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn component_names(&self) -> Vec<&str> {
        self.atoms.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn plan(&self) -> &Plan {
        &self.plan
    }

    /// True when every component is a zero-delay wire converter.
    pub fn is_passthrough(&self) -> bool {
        self.atoms.iter().all(|a| a.zero_delay)
    }

    /// Renames one exposed port.
    pub fn renamed(&self, from: &str, to: &str) -> Result<Self, SystemError> {
        let mut ports = self.ports.clone();
        let idx = ports
            .iter()
            .position(|p| p.port.name == from)
            .ok_or_else(|| SystemError::UnknownPort(from.to_string()))?;
        if ports.iter().any(|p| p.port.name == to) {
            return Err(SystemError::PortClash(to.to_string()));
        }
        ports[idx].port.name = to.to_string();
        self.rebuilt(ports)
    }

    /// Prefixes every exposed port name, keeping the `inner:` marker in front.
    pub fn with_prefix(&self, prefix: &str) -> Result<Self, SystemError> {
        let mut ports = self.ports.clone();
        for p in &mut ports {
            p.port.name = match p.port.name.strip_prefix(INNER) {
                Some(rest) => format!("{INNER}{prefix}{rest}"),
                None => format!("{prefix}{}", p.port.name),
            };
        }
        self.rebuilt(ports)
    }

    /// Same system evaluated in a caller-chosen order of points, which must be a
    /// linear extension of the causal order covering every scheduled point.
    pub fn with_schedule(&self, schedule: Vec<SpaceTimePoint>) -> Result<Self, SystemError> {
        Self::assemble(
            self.name.clone(),
            self.atoms.clone(),
            self.wires.clone(),
            self.ports.clone(),
            Some(schedule),
        )
    }

    fn rebuilt(&self, ports: Vec<ExtPort>) -> Result<Self, SystemError> {
        Self::assemble(self.name.clone(), self.atoms.clone(), self.wires.clone(), ports, self.schedule.clone())
    }

    /// Identity converter for the given ports: exposes each port under its own name on
    /// the outer side and under `inner:` on the resource side.
    pub fn identity_converter(ports: &[Port]) -> Result<Self, SystemError> {
        let mut b = AtomBuilder::new("identity").zero_delay();
        for p in ports {
            let inner = format!("{INNER}{}", p.name);
            b = match p.direction {
                Direction::Out => b
                    .input(&inner, p.alphabet.clone(), p.points.clone())
                    .output(&p.name, p.alphabet.clone(), p.points.clone())
                    .depends(&p.name, &[&inner]),
                Direction::In => b
                    .input(&p.name, p.alphabet.clone(), p.points.clone())
                    .output(&inner, p.alphabet.clone(), p.points.clone())
                    .depends(&inner, &[&p.name]),
            };
        }
        // slot order is preserved pairwise, so outputs copy inputs one to one
        b.build(|inp, _| inp.to_vec())
    }
}

fn merge(x: &CausalSystem, y: &CausalSystem) -> (Vec<Arc<Atom>>, Vec<(SlotRef, SlotRef)>, usize) {
    let off = x.atoms.len();
    let mut atoms = x.atoms.clone();
    atoms.extend(y.atoms.iter().cloned());
    let mut wires = x.wires.clone();
    wires.extend(y.wires.iter().map(|(o, i)| {
        (SlotRef { atom: o.atom + off, slot: o.slot }, SlotRef { atom: i.atom + off, slot: i.slot })
    }));
    (atoms, wires, off)
}

fn wire_ports(
    atoms: &[Arc<Atom>],
    a: &ExtPort,
    b: &ExtPort,
    wires: &mut Vec<(SlotRef, SlotRef)>,
) -> Result<(), SystemError> {
    let (out, inp) = match (a.port.direction, b.port.direction) {
        (Direction::Out, Direction::In) => (a, b),
        (Direction::In, Direction::Out) => (b, a),
        _ => {
            return Err(SystemError::Wiring {
                from: a.port.name.clone(),
                to: b.port.name.clone(),
                reason: "directions are not opposite".into(),
            })
        }
    };
    let err = |reason: String| SystemError::Wiring {
        from: out.port.name.clone(),
        to: inp.port.name.clone(),
        reason,
    };
    if let Some(s) = out.port.alphabet.iter().find(|s| !inp.port.alphabet.contains(s)) {
        return Err(err(format!("symbol {s} is not in the receiving alphabet")));
    }
    let oa = &atoms[out.atom];
    let ia = &atoms[inp.atom];
    for (k, pt) in out.port.points.iter().enumerate() {
        let j = inp
            .port
            .points
            .iter()
            .position(|q| q == pt)
            .ok_or_else(|| err(format!("point {pt} is not accepted by the receiving port")))?;
        let os = oa.out_slots.iter().position(|&s| s == (out.atom_port, k)).expect("slot");
        let is = ia.in_slots.iter().position(|&s| s == (inp.atom_port, j)).expect("slot");
        wires.push((SlotRef { atom: out.atom, slot: os }, SlotRef { atom: inp.atom, slot: is }));
    }
    Ok(())
}

fn ensure_unique(ports: &[ExtPort]) -> Result<(), SystemError> {
    for (i, p) in ports.iter().enumerate() {
        if ports[..i].iter().any(|q| q.port.name == p.port.name) {
            return Err(SystemError::PortClash(p.port.name.clone()));
        }
    }
    Ok(())
}

fn shifted(ports: &[ExtPort], off: usize) -> Vec<ExtPort> {
    ports
        .iter()
        .map(|p| ExtPort { port: p.port.clone(), atom: p.atom + off, atom_port: p.atom_port })
        .collect()
}

/// Side-by-side composition; port names must be disjoint.
pub fn compose_parallel(x: &CausalSystem, y: &CausalSystem) -> Result<CausalSystem, SystemError> {
    let (atoms, wires, off) = merge(x, y);
    let mut ports = x.ports.clone();
    ports.extend(shifted(&y.ports, off));
    ensure_unique(&ports)?;
    CausalSystem::assemble(format!("{} | {}", x.name, y.name), atoms, wires, ports, None)
}

/// Wires pairs of exposed ports of one system, `(output, input)`.
pub fn connect(s: &CausalSystem, pairs: &[(&str, &str)]) -> Result<CausalSystem, SystemError> {
    if pairs.is_empty() {
        return Ok(s.clone());
    }
    let mut wires = s.wires.clone();
    let mut used = vec![false; s.ports.len()];
    for (o, i) in pairs {
        let find = |n: &str| {
            s.ports
                .iter()
                .position(|p| p.port.name == n)
                .ok_or_else(|| SystemError::UnknownPort(n.to_string()))
        };
        let (oi, ii) = (find(o)?, find(i)?);
        if used[oi] || used[ii] {
            return Err(SystemError::Wiring {
                from: o.to_string(),
                to: i.to_string(),
                reason: "port already wired".into(),
            });
        }
        if s.ports[oi].port.direction != Direction::Out || s.ports[ii].port.direction != Direction::In {
            return Err(SystemError::Wiring {
                from: o.to_string(),
                to: i.to_string(),
                reason: "expected an output and an input".into(),
            });
        }
        wire_ports(&s.atoms, &s.ports[oi], &s.ports[ii], &mut wires)?;
        used[oi] = true;
        used[ii] = true;
    }
    let ports = s.ports.iter().zip(&used).filter(|(_, u)| !**u).map(|(p, _)| p.clone()).collect();
    CausalSystem::assemble(s.name.clone(), s.atoms.clone(), wires, ports, None)
}

fn plugs_into(a: &Port, b: &Port) -> bool {
    a.direction != b.direction
        && (a.name.strip_prefix(INNER) == Some(b.name.as_str())
            || b.name.strip_prefix(INNER) == Some(a.name.as_str()))
}

/// Plugs two systems together.
///
/// A port `inner:N` on one side wires to port `N` of opposite direction on the other;
/// remaining ports of equal name and opposite direction wire to each other. Ports of
/// equal name and equal direction are a clash; everything else stays exposed.
pub fn attach(x: &CausalSystem, y: &CausalSystem) -> Result<CausalSystem, SystemError> {
    let (atoms, mut wires, off) = merge(x, y);
    let yp = shifted(&y.ports, off);
    let mut x_used = vec![false; x.ports.len()];
    let mut y_used = vec![false; yp.len()];
    for (i, px) in x.ports.iter().enumerate() {
        let j = yp
            .iter()
            .enumerate()
            .position(|(j, py)| !y_used[j] && plugs_into(&px.port, &py.port))
            .or_else(|| {
                yp.iter().enumerate().position(|(j, py)| {
                    !y_used[j] && py.port.name == px.port.name && py.port.direction != px.port.direction
                })
            });
        if let Some(j) = j {
            wire_ports(&atoms, px, &yp[j], &mut wires)?;
            x_used[i] = true;
            y_used[j] = true;
        }
    }
    let mut ports: Vec<ExtPort> =
        x.ports.iter().zip(&x_used).filter(|(_, u)| !**u).map(|(p, _)| p.clone()).collect();
    ports.extend(yp.into_iter().zip(&y_used).filter(|(_, u)| !**u).map(|(p, _)| p));
    ensure_unique(&ports)?;
    CausalSystem::assemble(format!("{} . {}", x.name, y.name), atoms, wires, ports, None)
}
