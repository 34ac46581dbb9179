//! Generators and brute-force oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relcrypt::analysis::non_adaptive_distinguisher;
use relcrypt::causal::{Assignment, AtomBuilder, CausalSystem, Direction, Port, Symbol};
use relcrypt::rational::{self, Rational};
use relcrypt::spacetime::SpaceTimePoint;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn line(t: Rational, x: Rational) -> SpaceTimePoint {
    SpaceTimePoint::on_line(t, x)
}

pub fn ipt(t: i64, x: i64) -> SpaceTimePoint {
    SpaceTimePoint::int(t, x)
}

/// Small rationals `n/d` with `|n| <= 12`, `1 <= d <= 4`.
pub fn small_rat() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=4).prop_map(|(n, d)| rational::rat(n, d))
}

pub fn point3() -> impl Strategy<Value = SpaceTimePoint> {
    (small_rat(), small_rat(), small_rat(), small_rat()).prop_map(|(t, a, b, c)| SpaceTimePoint::new(t, [a, b, c]))
}

pub fn line_point() -> impl Strategy<Value = SpaceTimePoint> {
    (small_rat(), small_rat()).prop_map(|(t, x)| line(t, x))
}

/// Light-cone test written out on squared norms.
pub fn cone_oracle(p: &SpaceTimePoint, q: &SpaceTimePoint) -> bool {
    let dt = &q.t - &p.t;
    if dt < rational::zero() {
        return false;
    }
    let mut r2 = rational::zero();
    for i in 0..3 {
        let d = &q.x[i] - &p.x[i];
        r2 += &d * &d;
    }
    r2 <= &dt * &dt
}

/// Down-sets of `leq` on `n` points, by testing every subset against every pair.
pub fn down_set_oracle(n: usize, leq: impl Fn(usize, usize) -> bool) -> Vec<u32> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let mut closed = true;
        for i in 0..n {
            for j in 0..n {
                if mask & (1 << i) != 0 && mask & (1 << j) == 0 && leq(j, i) {
                    closed = false;
                }
            }
        }
        if closed {
            out.push(mask);
        }
    }
    out
}

/// A random linear extension of the causal order on `points`.
pub fn linear_extension(points: &[SpaceTimePoint], rng: &mut ChaCha8Rng) -> Vec<SpaceTimePoint> {
    let mut left: Vec<SpaceTimePoint> = points.to_vec();
    let mut out = Vec::new();
    while !left.is_empty() {
        let minimal: Vec<usize> = (0..left.len())
            .filter(|&i| !(0..left.len()).any(|j| j != i && cone_oracle(&left[j], &left[i])))
            .collect();
        let pick = minimal[rng.random_range(0..minimal.len())];
        out.push(left.remove(pick));
    }
    out
}

fn code(s: Symbol) -> u64 {
    match s {
        Symbol::Vacuum => 0,
        Symbol::Val(v) => 1 + v as u64,
        other => 1000 + other.to_string().len() as u64,
    }
}

fn mix(mut h: u64, v: u64) -> u64 {
    h ^= v.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
    h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h ^ (h >> 31)
}

/// Response table of a random component: each output slot is a hash of the seed and
/// the inputs it is allowed to read.
#[derive(Clone, Debug)]
pub struct Table {
    pub salt: u64,
    pub k: u32,
    /// Input slots read by each output slot.
    pub reads: Vec<Vec<usize>>,
}

impl Table {
    pub fn react(&self, inp: &[Symbol], seed: usize) -> Vec<Symbol> {
        self.reads
            .iter()
            .enumerate()
            .map(|(o, rs)| {
                let mut h = mix(self.salt, o as u64);
                h = mix(h, seed as u64);
                for &i in rs {
                    h = mix(h, code(inp[i]));
                }
                let r = (h % (self.k as u64 + 1)) as u32;
                if r == self.k {
                    Symbol::Vacuum
                } else {
                    Symbol::Val(r)
                }
            })
            .collect()
    }
}

/// A random component together with the table it was built from.
#[derive(Clone)]
pub struct RandomAtom {
    pub system: CausalSystem,
    pub table: Arc<Table>,
    pub weights: Vec<Rational>,
    pub in_points: Vec<SpaceTimePoint>,
    pub out_points: Vec<SpaceTimePoint>,
}

pub type PortSpec<'a> = (&'a str, Vec<SpaceTimePoint>);

/// Builds a component over the given ports. With `honest` each output reads only
/// inputs strictly in its past; otherwise it also reads every other input.
pub fn random_atom(
    rng: &mut ChaCha8Rng,
    name: &str,
    ins: &[PortSpec],
    outs: &[PortSpec],
    k: u32,
    honest: bool,
) -> RandomAtom {
    let in_points: Vec<SpaceTimePoint> = ins.iter().flat_map(|(_, p)| p.iter().cloned()).collect();
    let out_points: Vec<SpaceTimePoint> = outs.iter().flat_map(|(_, p)| p.iter().cloned()).collect();
    let reads = out_points
        .iter()
        .map(|o| {
            (0..in_points.len())
                .filter(|&i| !honest || (cone_oracle(&in_points[i], o) && in_points[i].t < o.t))
                .collect()
        })
        .collect();
    let n_seeds = rng.random_range(1..=3usize);
    let raw: Vec<i64> = (0..n_seeds).map(|_| rng.random_range(1..=3)).collect();
    let total: i64 = raw.iter().sum();
    let weights: Vec<Rational> = raw.iter().map(|&w| rational::rat(w, total)).collect();
    let table = Arc::new(Table { salt: rng.random(), k, reads });

    let mut b = AtomBuilder::new(name).seeds(weights.clone());
    for (n, p) in ins {
        b = b.input(n, Symbol::values(k), p.clone());
    }
    let in_names: Vec<&str> = ins.iter().map(|(n, _)| *n).collect();
    for (n, p) in outs {
        b = b.output(n, Symbol::values(k), p.clone()).depends(n, &in_names);
    }
    let t = table.clone();
    let system = b.build(move |inp, s| t.react(inp, s)).expect("random component");
    RandomAtom { system, table, weights, in_points, out_points }
}

/// Grid of 15 points on the line: `t` in `0..=4`, `x` in `-1..=1`.
pub fn grid() -> Vec<SpaceTimePoint> {
    let mut g = Vec::new();
    for t in 0..=4 {
        for x in -1..=1 {
            g.push(ipt(t, x));
        }
    }
    g
}

/// One or two distinct grid points, sorted.
pub fn pick_points(rng: &mut ChaCha8Rng, lo_t: i64, hi_t: i64) -> Vec<SpaceTimePoint> {
    let n = rng.random_range(1..=2);
    let mut out: Vec<SpaceTimePoint> = Vec::new();
    while out.len() < n {
        let p = ipt(rng.random_range(lo_t..=hi_t), rng.random_range(-1..=1));
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out.sort();
    out
}

/// Up to three random components chained `a -> b -> c`, optionally with a feedback
/// wire from `b` back into `a`.
pub struct Chain {
    pub system: CausalSystem,
    pub atoms: Vec<RandomAtom>,
    pub feedback: bool,
    pub a_in: Vec<SpaceTimePoint>,
}

pub fn random_chain(seed: u64, len: usize, feedback: bool) -> Chain {
    use relcrypt::causal::{compose_parallel, connect};
    let mut r = rng(seed);
    let k = r.random_range(2..=3);
    let a_in = pick_points(&mut r, 0, 2);
    let a_out = pick_points(&mut r, 0, 3);
    let fb = pick_points(&mut r, 1, 4);
    let mut a_ins: Vec<PortSpec> = vec![("a.in", a_in.clone())];
    if feedback {
        a_ins.push(("a.fb", fb.clone()));
    }
    let a = random_atom(&mut r, "a", &a_ins, &[("a.out", a_out.clone())], k, true);
    let b_out = pick_points(&mut r, 1, 4);
    let mut b_outs: Vec<PortSpec> = vec![("b.out", b_out.clone())];
    if feedback {
        b_outs.push(("b.fb", fb));
    }
    let b = random_atom(&mut r, "b", &[("b.in", a_out)], &b_outs, k, true);
    let mut sys = compose_parallel(&a.system, &b.system).expect("disjoint");
    let mut pairs = vec![("a.out", "b.in")];
    if feedback {
        pairs.push(("b.fb", "a.fb"));
    }
    let mut atoms = vec![a, b];
    if len >= 3 {
        let c_out = pick_points(&mut r, 2, 4);
        let c = random_atom(&mut r, "c", &[("c.in", b_out)], &[("c.out", c_out)], k, true);
        sys = compose_parallel(&sys, &c.system).expect("disjoint");
        pairs.push(("b.out", "c.in"));
        atoms.push(c);
    }
    let system = connect(&sys, &pairs).expect("wiring");
    Chain { system, atoms, feedback, a_in }
}

/// Joint distribution of the last component's outputs for a feed-forward chain,
/// computed by running the tables in order over every seed combination.
pub fn chain_oracle(chain: &Chain, a_in: &[Symbol]) -> BTreeMap<Vec<Symbol>, Rational> {
    assert!(!chain.feedback);
    let mut acc = BTreeMap::new();
    let mut stack: Vec<(usize, Vec<Symbol>, Rational)> = vec![(0, a_in.to_vec(), rational::one())];
    while let Some((i, inp, w)) = stack.pop() {
        if i == chain.atoms.len() {
            *acc.entry(inp).or_insert_with(rational::zero) += w;
            continue;
        }
        let atom = &chain.atoms[i];
        for (s, ws) in atom.weights.iter().enumerate() {
            let out = atom.table.react(&inp, s);
            stack.push((i + 1, out, &w * ws));
        }
    }
    acc
}

/// Points on the line at `x = 0`.
pub fn times(ts: &[i64]) -> Vec<SpaceTimePoint> {
    ts.iter().map(|&t| ipt(t, 0)).collect()
}

/// Input at t = 0, 2 and output at t = 1, 3, so later inputs can react to earlier outputs.
pub fn interleaved(r: &mut ChaCha8Rng, name: &str) -> RandomAtom {
    random_atom(r, name, &[("in", times(&[0, 2]))], &[("out", times(&[1, 3]))], 2, true)
}

pub fn triple(seed: u64) -> (CausalSystem, CausalSystem, CausalSystem) {
    let mut r = rng(seed);
    (interleaved(&mut r, "R").system, interleaved(&mut r, "S").system, interleaved(&mut r, "T").system)
}

/// Fixed inputs and a hashed guess over every observed output.
pub fn random_distinguisher(r: &mut ChaCha8Rng, sys: &CausalSystem) -> CausalSystem {
    let ports: Vec<Port> = sys.ports().cloned().collect();
    let mut inputs = Assignment::new();
    let mut observed = Vec::new();
    for p in &ports {
        for q in &p.points {
            match p.direction {
                Direction::In => {
                    inputs.set(&p.name, q.clone(), p.alphabet[r.random_range(0..p.alphabet.len())]);
                }
                Direction::Out => observed.push((p.name.clone(), q.clone())),
            }
        }
    }
    let table: Vec<u32> = (0..64).map(|_| r.random_range(0..2)).collect();
    non_adaptive_distinguisher("D", &ports, &inputs, move |o| {
        let key = observed.iter().fold(0usize, |acc, (n, q)| {
            acc * 4 + match o.at(n, q) {
                Symbol::Val(v) => 1 + v as usize,
                _ => 0,
            }
        });
        table[key % table.len()]
    })
    .unwrap()
}
