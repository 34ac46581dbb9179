//! Cuts of finite posets, causality functions on them, and the mutual-consistency
//! check for the channel-with-delay causal box restricted to classical
//! single-message states.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::spacetime::{precedes, strictly_precedes, SpaceTimePoint};

/// Largest poset whose cuts are enumerated.
pub const MAX_POSET_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CutsError {
    #[error("relation matrix is {rows}x? for {points} points")]
    Shape { points: usize, rows: usize },
    #[error("relation is not reflexive at {0}")]
    NotReflexive(String),
    #[error("relation is not antisymmetric between {0} and {1}")]
    NotAntisymmetric(String, String),
    #[error("relation is not transitive through {0} <= {1} <= {2}")]
    NotTransitive(String, String, String),
    #[error("poset has {0} points; cut enumeration is limited to {MAX_POSET_POINTS}")]
    SizeExceeded(usize),
    #[error("subset refers to point index {0} outside the poset")]
    OutOfRange(usize),
    #[error("causality function table has no entry for cut {0:?}")]
    MissingEntry(Vec<String>),
    #[error("causality function maps {from:?} to {to:?}, which is not a cut")]
    NotACut { from: Vec<String>, to: Vec<String> },
    #[error("channel geometry: {0}")]
    Geometry(String),
}

/// A finite partially ordered set given by an explicit `≤` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PosetRepr", into = "PosetRepr")]
pub struct FinitePoset {
    labels: Vec<String>,
    leq: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct PosetRepr {
    points: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl TryFrom<PosetRepr> for FinitePoset {
    type Error = CutsError;
    fn try_from(r: PosetRepr) -> Result<Self, CutsError> {
        FinitePoset::new(r.points, r.leq)
    }
}

impl From<FinitePoset> for PosetRepr {
    fn from(p: FinitePoset) -> Self {
        PosetRepr { points: p.labels, leq: p.leq }
    }
}

impl FinitePoset {
    pub fn new(labels: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self, CutsError> {
        let n = labels.len();
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(CutsError::Shape { points: n, rows: leq.len() });
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(CutsError::NotReflexive(labels[i].clone()));
            }
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(CutsError::NotAntisymmetric(labels[i].clone(), labels[j].clone()));
                }
                if !leq[i][j] {
                    continue;
                }
                for k in 0..n {
                    if leq[j][k] && !leq[i][k] {
                        return Err(CutsError::NotTransitive(
                            labels[i].clone(),
                            labels[j].clone(),
                            labels[k].clone(),
                        ));
                    }
                }
            }
        }
        Ok(Self { labels, leq })
    }

    /// The poset induced by the causal order on a finite set of events.
    pub fn from_points(labels: Vec<String>, points: &[SpaceTimePoint]) -> Result<Self, CutsError> {
        let leq = points
            .iter()
            .map(|p| points.iter().map(|q| precedes(p, q)).collect())
            .collect();
        Self::new(labels, leq)
    }

    pub fn chain(n: usize) -> Self {
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        let leq = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
        Self { labels, leq }
    }

    pub fn antichain(n: usize) -> Self {
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        let leq = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        Self { labels, leq }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    /// `T^{≤t}` as a bit set.
    pub fn down_set(&self, t: usize) -> Cut {
        Cut((0..self.len()).filter(|&p| self.leq[p][t]).fold(0, |acc, p| acc | (1 << p)))
    }

    pub fn names(&self, c: Cut) -> Vec<String> {
        c.members().map(|i| self.labels[i].clone()).collect()
    }

    /// A cut is bounded when it sits below a single point.
    pub fn is_bounded(&self, c: Cut) -> bool {
        (0..self.len()).any(|t| c.is_subset(self.down_set(t)))
    }

    fn check_size(&self) -> Result<(), CutsError> {
        if self.len() > MAX_POSET_POINTS {
            return Err(CutsError::SizeExceeded(self.len()));
        }
        Ok(())
    }

    fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        // counting strict predecessors gives a valid topological key
        order.sort_by_key(|&i| (0..self.len()).filter(|&j| self.lt(j, i)).count());
        order
    }
}

/// A subset of poset points stored as a bit set (at most [`MAX_POSET_POINTS`] points).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cut(pub u32);

impl Cut {
    pub const EMPTY: Cut = Cut(0);

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        Cut(it.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.0 & (1u32 << i) != 0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Cut) -> Cut {
        Cut(self.0 | o.0)
    }

    pub fn intersection(self, o: Cut) -> Cut {
        Cut(self.0 & o.0)
    }

    pub fn minus(self, o: Cut) -> Cut {
        Cut(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Cut) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }
}

/// `S` is a cut iff it equals the union of the down-sets of its elements.
pub fn is_cut(poset: &FinitePoset, subset: Cut) -> Result<bool, CutsError> {
    if let Some(bad) = subset.members().find(|&i| i >= poset.len()) {
        return Err(CutsError::OutOfRange(bad));
    }
    let closure = subset
        .members()
        .fold(Cut::EMPTY, |acc, t| acc.union(poset.down_set(t)));
    Ok(closure == subset)
}

/// Every downward-closed subset, in increasing bit-set order.
pub fn all_cuts(poset: &FinitePoset) -> Result<Vec<Cut>, CutsError> {
    poset.check_size()?;
    let order = poset.linear_extension();
    let mut out = Vec::new();
    fn rec(poset: &FinitePoset, order: &[usize], idx: usize, cur: Cut, out: &mut Vec<Cut>) {
        if idx == order.len() {
            out.push(cur);
            return;
        }
        let p = order[idx];
        rec(poset, order, idx + 1, cur, out);
        let preds_in = (0..poset.len()).all(|q| !poset.lt(q, p) || cur.contains(q));
        if preds_in {
            rec(poset, order, idx + 1, Cut(cur.0 | (1 << p)), out);
        }
    }
    rec(poset, &order, 0, Cut::EMPTY, &mut out);
    out.sort();
    Ok(out)
}

/// An explicit map from cuts to cuts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalityFunctionTable {
    map: BTreeMap<Cut, Cut>,
}

impl CausalityFunctionTable {
    /// Tabulates `f` on every cut of the poset, rejecting images that are not cuts.
    pub fn from_fn<F: Fn(Cut) -> Cut>(poset: &FinitePoset, f: F) -> Result<Self, CutsError> {
        let mut map = BTreeMap::new();
        for c in all_cuts(poset)? {
            let image = f(c);
            if !is_cut(poset, image)? {
                return Err(CutsError::NotACut { from: poset.names(c), to: poset.names(image) });
            }
            map.insert(c, image);
        }
        Ok(Self { map })
    }

    /// `χ(C) = {t : t < s for some s ∈ C}`, i.e. `C` minus its maximal elements.
    pub fn strict_past(poset: &FinitePoset) -> Result<Self, CutsError> {
        Self::from_fn(poset, |c| {
            Cut::from_indices((0..poset.len()).filter(|&t| c.members().any(|s| poset.lt(t, s))))
        })
    }

    pub fn identity(poset: &FinitePoset) -> Result<Self, CutsError> {
        Self::from_fn(poset, |c| c)
    }

    pub fn constant_empty(poset: &FinitePoset) -> Result<Self, CutsError> {
        Self::from_fn(poset, |_| Cut::EMPTY)
    }

    pub fn apply(&self, c: Cut) -> Option<Cut> {
        self.map.get(&c).copied()
    }

    fn get(&self, poset: &FinitePoset, c: Cut) -> Result<Cut, CutsError> {
        self.apply(c).ok_or_else(|| CutsError::MissingEntry(poset.names(c)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub condition: String,
    pub passed: bool,
    /// Labels of the offending cut(s) when the condition fails.
    pub counterexample: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CausalityFunctionReport {
    pub conditions: Vec<ConditionResult>,
}

impl CausalityFunctionReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn condition(&self, idx: usize) -> &ConditionResult {
        &self.conditions[idx - 1]
    }
}

/// Checks the four causality-function conditions: union preservation, monotonicity,
/// strict shrinking of nonempty bounded cuts, and eventual exhaustion.
pub fn validate_causality_function(
    poset: &FinitePoset,
    chi: &CausalityFunctionTable,
) -> Result<CausalityFunctionReport, CutsError> {
    let cuts = all_cuts(poset)?;
    let images: Vec<Cut> = cuts.iter().map(|&c| chi.get(poset, c)).collect::<Result<_, _>>()?;
    let image_of = |c: Cut| -> Result<Cut, CutsError> { chi.get(poset, c) };
    let names = |cs: &[Cut]| -> Vec<Vec<String>> { cs.iter().map(|&c| poset.names(c)).collect() };

    let mut union_cx = None;
    let mut mono_cx = None;
    'outer: for (i, &c) in cuts.iter().enumerate() {
        for (j, &d) in cuts.iter().enumerate() {
            let u = c.union(d);
            if union_cx.is_none() && image_of(u)? != images[i].union(images[j]) {
                union_cx = Some(names(&[c, d]));
            }
            if mono_cx.is_none() && c.is_subset(d) && !images[i].is_subset(images[j]) {
                mono_cx = Some(names(&[c, d]));
            }
            if union_cx.is_some() && mono_cx.is_some() {
                break 'outer;
            }
        }
    }

    let mut shrink_cx = None;
    let mut exhaust_cx = None;
    for (i, &c) in cuts.iter().enumerate() {
        if !poset.is_bounded(c) {
            continue;
        }
        let img = images[i];
        if shrink_cx.is_none() && !c.is_empty() && !(img.is_subset(c) && img != c) {
            shrink_cx = Some(names(&[c, img]));
        }
        if exhaust_cx.is_none() {
            // a finite poset has finitely many cuts, so |cuts| iterations suffice
            let mut survivors = c;
            let mut cur = c;
            for _ in 0..=cuts.len() {
                cur = image_of(cur)?;
                survivors = survivors.intersection(cur);
                if survivors.is_empty() {
                    break;
                }
            }
            if !survivors.is_empty() {
                exhaust_cx = Some(names(&[c, survivors]));
            }
        }
    }

    let make = |name: &str, cx: Option<Vec<Vec<String>>>| ConditionResult {
        condition: name.to_string(),
        passed: cx.is_none(),
        counterexample: cx,
    };
    Ok(CausalityFunctionReport {
        conditions: vec![
            make("union", union_cx),
            make("monotone", mono_cx),
            make("shrinks", shrink_cx),
            make("exhausts", exhaust_cx),
        ],
    })
}

/// Classical single-message state on a wire: nothing, or one value at one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ClassicalState {
    Vacuum,
    Message { value: u32, point: usize },
}

impl ClassicalState {
    /// Replaces any message outside `keep` by the vacuum.
    pub fn restrict(self, keep: Cut) -> Self {
        match self {
            ClassicalState::Message { point, .. } if !keep.contains(point) => ClassicalState::Vacuum,
            s => s,
        }
    }
}

/// The channel-with-delay family `Φ^C`: on a cut containing `B`, move a message found
/// at `A` to `B`; otherwise output the vacuum.
///
/// Arguments are the cut `C`, the causality-function image `χ(C)` and an input state
/// already supported on `χ(C)`.
pub fn cd_channel_map(a: usize, b: usize) -> impl Fn(Cut, Cut, ClassicalState) -> ClassicalState {
    move |c, chi_c, rho| match rho.restrict(Cut::from_indices([a])) {
        ClassicalState::Message { value, .. } if c.contains(b) && chi_c.contains(a) => {
            ClassicalState::Message { value, point: b }
        }
        _ => ClassicalState::Vacuum,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MutualConsistencyWitness {
    pub smaller_cut: Vec<String>,
    pub larger_cut: Vec<String>,
    pub input: ClassicalState,
    pub lhs: ClassicalState,
    pub rhs: ClassicalState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MutualConsistencyReport {
    pub consistent: bool,
    pub pairs_checked: usize,
    pub witness: Option<MutualConsistencyWitness>,
}

/// Checks `tr_{D\C} ∘ Φ^D = Φ^C ∘ tr_{T\χ(C)}` on every pair of cuts `C ⊆ D` of the
/// finite event set and every classical single-message input.
///
/// `chi` defaults to the strict causal past. All cuts of a finite event set are
/// bounded in Minkowski space (a common future point always exists), so every pair
/// is checked, not only those whose smaller cut contains `B`.
pub fn verify_cd_mutual_consistency<F>(
    labels: Vec<String>,
    points: &[SpaceTimePoint],
    a: usize,
    b: usize,
    alphabet: u32,
    chi: Option<&CausalityFunctionTable>,
    map: F,
) -> Result<MutualConsistencyReport, CutsError>
where
    F: Fn(Cut, Cut, ClassicalState) -> ClassicalState,
{
    if a >= points.len() || b >= points.len() {
        return Err(CutsError::Geometry("A or B is not in the point set".into()));
    }
    if !strictly_precedes(&points[a], &points[b]) {
        return Err(CutsError::Geometry(format!(
            "A={} does not strictly precede B={}",
            points[a], points[b]
        )));
    }
    let poset = FinitePoset::from_points(labels, points)?;
    let default_chi;
    let chi = match chi {
        Some(c) => c,
        None => {
            default_chi = CausalityFunctionTable::strict_past(&poset)?;
            &default_chi
        }
    };
    let cuts = all_cuts(&poset)?;
    for &c in &cuts {
        let img = chi.get(&poset, c)?;
        if c.contains(b) && !img.contains(a) {
            return Err(CutsError::Geometry(format!(
                "cut {:?} contains B but its causal image {:?} misses A",
                poset.names(c),
                poset.names(img)
            )));
        }
    }

    let mut inputs = vec![ClassicalState::Vacuum];
    for point in 0..points.len() {
        for value in 0..alphabet {
            inputs.push(ClassicalState::Message { value, point });
        }
    }

    let mut pairs = 0;
    for &c in &cuts {
        let chi_c = chi.get(&poset, c)?;
        for &d in cuts.iter().filter(|d| c.is_subset(**d)) {
            let chi_d = chi.get(&poset, d)?;
            pairs += 1;
            for &rho in &inputs {
                let out_d = map(d, chi_d, rho.restrict(chi_d));
                let lhs = match out_d {
                    ClassicalState::Message { point, .. } if !d.contains(point) => None,
                    s => Some(s.restrict(c)),
                };
                let out_c = map(c, chi_c, rho.restrict(chi_c));
                let rhs = match out_c {
                    ClassicalState::Message { point, .. } if !c.contains(point) => None,
                    s => Some(s),
                };
                if lhs.is_none() || rhs.is_none() || lhs != rhs {
                    return Ok(MutualConsistencyReport {
                        consistent: false,
                        pairs_checked: pairs,
                        witness: Some(MutualConsistencyWitness {
                            smaller_cut: poset.names(c),
                            larger_cut: poset.names(d),
                            input: rho,
                            lhs: out_d,
                            rhs: out_c,
                        }),
                    });
                }
            }
        }
    }
    Ok(MutualConsistencyReport { consistent: true, pairs_checked: pairs, witness: None })
}

/// The four events `A ≺ A′ ≺ B′ ≺ B` on a time-like line used by the channel box.
pub fn canonical_cd_points() -> (Vec<String>, Vec<SpaceTimePoint>) {
    (
        vec!["A".into(), "A'".into(), "B'".into(), "B".into()],
        vec![
            SpaceTimePoint::int(0, 0),
            SpaceTimePoint::int(1, 0),
            SpaceTimePoint::int(3, 0),
            SpaceTimePoint::int(4, 0),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_cuts(p: &FinitePoset) -> Vec<Cut> {
        (0u32..(1 << p.len()))
            .map(Cut)
            .filter(|&s| {
                s.members()
                    .all(|q| (0..p.len()).all(|r| !p.leq(r, q) || s.contains(r)))
            })
            .collect()
    }

    #[test]
    fn is_cut_examples() {
        let chain = FinitePoset::chain(3);
        assert!(is_cut(&chain, Cut::from_indices([0, 1])).unwrap());
        assert!(!is_cut(&chain, Cut::from_indices([1])).unwrap());
        let anti = FinitePoset::antichain(2);
        assert!(is_cut(&anti, Cut::from_indices([0])).unwrap());
        assert!(is_cut(&chain, Cut::from_indices([7])).is_err());
    }

    #[test]
    fn all_cuts_examples() {
        let chain = FinitePoset::chain(3);
        let cuts = all_cuts(&chain).unwrap();
        assert_eq!(cuts, brute_force_cuts(&chain));
        assert_eq!(cuts.len(), 4);
        assert_eq!(all_cuts(&FinitePoset::antichain(2)).unwrap().len(), 4);
        assert_eq!(all_cuts(&FinitePoset::chain(0)).unwrap(), vec![Cut::EMPTY]);
    }

    #[test]
    fn enumeration_bound() {
        let big = FinitePoset::antichain(21);
        assert_eq!(all_cuts(&big), Err(CutsError::SizeExceeded(21)));
    }

    #[test]
    fn rejects_non_partial_orders() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(matches!(
            FinitePoset::new(labels.clone(), vec![vec![true, true], vec![true, true]]),
            Err(CutsError::NotAntisymmetric(..))
        ));
        assert!(matches!(
            FinitePoset::new(labels, vec![vec![false, false], vec![false, true]]),
            Err(CutsError::NotReflexive(_))
        ));
        let three: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let leq = vec![
            vec![true, true, false],
            vec![false, true, true],
            vec![false, false, true],
        ];
        assert!(matches!(FinitePoset::new(three, leq), Err(CutsError::NotTransitive(..))));
    }

    #[test]
    fn strict_past_on_chain_passes_everything() {
        let chain = FinitePoset::chain(3);
        let chi = CausalityFunctionTable::strict_past(&chain).unwrap();
        // hand check: {} -> {}, {a} -> {}, {a,b} -> {a}, {a,b,c} -> {a,b}
        assert_eq!(chi.apply(Cut::from_indices([0, 1])), Some(Cut::from_indices([0])));
        assert_eq!(chi.apply(Cut::from_indices([0])), Some(Cut::EMPTY));
        let report = validate_causality_function(&chain, &chi).unwrap();
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn identity_fails_shrinking_with_counterexample() {
        let chain = FinitePoset::chain(3);
        let chi = CausalityFunctionTable::identity(&chain).unwrap();
        let report = validate_causality_function(&chain, &chi).unwrap();
        assert!(report.condition(1).passed);
        assert!(report.condition(2).passed);
        assert!(!report.condition(3).passed);
        assert!(report.condition(3).counterexample.is_some());
        assert!(!report.condition(4).passed);
    }

    #[test]
    fn constant_empty_passes() {
        let chain = FinitePoset::chain(3);
        let chi = CausalityFunctionTable::constant_empty(&chain).unwrap();
        assert!(validate_causality_function(&chain, &chi).unwrap().all_passed());
    }

    #[test]
    fn non_cut_image_is_rejected() {
        let chain = FinitePoset::chain(2);
        let err = CausalityFunctionTable::from_fn(&chain, |_| Cut::from_indices([1])).unwrap_err();
        assert!(matches!(err, CutsError::NotACut { .. }));
    }

    #[test]
    fn canonical_channel_is_mutually_consistent() {
        let (labels, points) = canonical_cd_points();
        for k in 2..=4 {
            let r = verify_cd_mutual_consistency(labels.clone(), &points, 0, 3, k, None, cd_channel_map(0, 3))
                .unwrap();
            assert!(r.consistent, "{r:?}");
            // 5 cuts on a 4-chain give 15 nested pairs
            assert_eq!(r.pairs_checked, 15);
        }
    }

    #[test]
    fn channel_emitting_early_is_inconsistent() {
        let (labels, points) = canonical_cd_points();
        let corrupted = |c: Cut, chi_c: Cut, rho: ClassicalState| match rho.restrict(Cut::from_indices([0])) {
            ClassicalState::Message { value, .. } if c.contains(3) && chi_c.contains(0) => {
                ClassicalState::Message { value, point: 2 }
            }
            _ => ClassicalState::Vacuum,
        };
        let r = verify_cd_mutual_consistency(labels, &points, 0, 3, 2, None, corrupted).unwrap();
        assert!(!r.consistent);
        let w = r.witness.unwrap();
        assert!(!w.smaller_cut.contains(&"B".to_string()));
        assert!(w.larger_cut.contains(&"B".to_string()));
    }

    #[test]
    fn two_point_channel() {
        let labels = vec!["A".to_string(), "B".to_string()];
        let points = vec![SpaceTimePoint::int(0, 0), SpaceTimePoint::int(1, 0)];
        let r = verify_cd_mutual_consistency(labels, &points, 0, 1, 2, None, cd_channel_map(0, 1)).unwrap();
        assert!(r.consistent);
    }

    #[test]
    fn geometry_precondition() {
        let labels = vec!["A".to_string(), "B".to_string()];
        let points = vec![SpaceTimePoint::int(0, 0), SpaceTimePoint::int(0, 1)];
        assert!(matches!(
            verify_cd_mutual_consistency(labels, &points, 0, 1, 2, None, cd_channel_map(0, 1)),
            Err(CutsError::Geometry(_))
        ));
    }

    #[test]
    fn poset_json_round_trip() {
        let p = FinitePoset::chain(2);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"points":["p0","p1"],"leq":[[true,true],[false,true]]}"#);
        let back: FinitePoset = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<FinitePoset>(r#"{"points":["a"],"leq":[[false]]}"#).is_err());
    }
}
