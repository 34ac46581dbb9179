//! Exact Minkowski geometry in units where the speed of light is 1.
//!
//! Every predicate compares squared norms of rational coordinates, so light-cone
//! boundaries are decided without rounding.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{self, Rational, RatString};

/// An event `(t, x)` with exact rational coordinates.
///
/// The derived order (time first, then space) is a linear extension of the causal
/// order, which is what evaluation schedules rely on.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SpaceTimePoint {
    pub t: Rational,
    pub x: [Rational; 3],
}

impl SpaceTimePoint {
    pub fn new(t: Rational, x: [Rational; 3]) -> Self {
        Self { t, x }
    }

    /// Point on the first spatial axis, the only one any bundled scenario needs.
    pub fn on_line(t: Rational, x: Rational) -> Self {
        Self { t, x: [x, Rational::zero(), Rational::zero()] }
    }

    /// Integer convenience constructor `(t, x, 0, 0)`.
    pub fn int(t: i64, x: i64) -> Self {
        Self::on_line(rational::int(t), rational::int(x))
    }

    pub fn origin() -> Self {
        Self::int(0, 0)
    }

    pub fn shifted(&self, dt: &Rational, dx: &[Rational; 3]) -> Self {
        Self {
            t: &self.t + dt,
            x: [&self.x[0] + &dx[0], &self.x[1] + &dx[1], &self.x[2] + &dx[2]],
        }
    }

    pub fn later_by(&self, dt: &Rational) -> Self {
        self.shifted(dt, &zero3())
    }

    /// Rescales time so that a scenario written with speed of light `c` uses `c = 1`.
    pub fn normalized(&self, c: &Rational) -> Self {
        Self { t: &self.t * c, x: self.x.clone() }
    }

    fn spatial_sq_dist(&self, other: &Self) -> Rational {
        self.x
            .iter()
            .zip(other.x.iter())
            .map(|(a, b)| {
                let d = b - a;
                &d * &d
            })
            .fold(Rational::zero(), |acc, v| acc + v)
    }
}

fn zero3() -> [Rational; 3] {
    [Rational::zero(), Rational::zero(), Rational::zero()]
}

impl fmt::Display for SpaceTimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t={}", self.t)?;
        let dims = if self.x[2].is_zero() {
            if self.x[1].is_zero() {
                1
            } else {
                2
            }
        } else {
            3
        };
        for c in &self.x[..dims] {
            write!(f, ", {}", c)?;
        }
        f.write_str(")")
    }
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    t: RatString,
    #[serde(default)]
    x: Vec<RatString>,
}

impl Serialize for SpaceTimePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PointRepr {
            t: RatString(self.t.clone()),
            x: self.x.iter().cloned().map(RatString).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpaceTimePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PointRepr::deserialize(d)?;
        if repr.x.len() > 3 {
            return Err(serde::de::Error::custom("at most three spatial coordinates"));
        }
        let mut x = zero3();
        for (slot, v) in x.iter_mut().zip(repr.x) {
            *slot = v.0;
        }
        Ok(SpaceTimePoint { t: repr.t.0, x })
    }
}

/// Reflexive causal order `P ≼ Q`: `Q` lies in the closed future light cone of `P`.
pub fn precedes(p: &SpaceTimePoint, q: &SpaceTimePoint) -> bool {
    let dt = &q.t - &p.t;
    !dt.is_negative() && p.spatial_sq_dist(q) <= &dt * &dt
}

/// `P ≼ Q`, `P ≠ Q` and a strictly positive time gap.
pub fn strictly_precedes(p: &SpaceTimePoint, q: &SpaceTimePoint) -> bool {
    q.t > p.t && p != q && precedes(p, q)
}

pub fn spacelike(p: &SpaceTimePoint, q: &SpaceTimePoint) -> bool {
    !precedes(p, q) && !precedes(q, p)
}

/// A point in the common causal future of every given point.
///
/// Uses the L1 spatial distance as a rational upper bound on the Euclidean one.
pub fn common_future<'a, I>(points: I) -> Option<SpaceTimePoint>
where
    I: IntoIterator<Item = &'a SpaceTimePoint>,
{
    let pts: Vec<&SpaceTimePoint> = points.into_iter().collect();
    let first = pts.first()?;
    let n = Rational::from_integer(pts.len().into());
    let mut centre = zero3();
    for p in &pts {
        for (c, v) in centre.iter_mut().zip(p.x.iter()) {
            *c += v;
        }
    }
    for c in centre.iter_mut() {
        *c = &*c / &n;
    }
    let mut t = first.t.clone();
    for p in &pts {
        let l1 = p
            .x
            .iter()
            .zip(centre.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(Rational::zero(), |acc, v| acc + v);
        let needed = &p.t + l1;
        if needed > t {
            t = needed;
        }
    }
    Some(SpaceTimePoint { t, x: centre })
}

/// Midpoint of the segment `PQ`; lies causally between `P` and `Q` whenever `P ≼ Q`.
pub fn midpoint(p: &SpaceTimePoint, q: &SpaceTimePoint) -> SpaceTimePoint {
    let two = rational::int(2);
    SpaceTimePoint {
        t: (&p.t + &q.t) / &two,
        x: [
            (&p.x[0] + &q.x[0]) / &two,
            (&p.x[1] + &q.x[1]) / &two,
            (&p.x[2] + &q.x[2]) / &two,
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("diamond endpoints are not causally ordered: {lo} does not precede {hi}")]
pub struct DiamondError {
    pub lo: SpaceTimePoint,
    pub hi: SpaceTimePoint,
}

/// `D(lo, hi)`: the intersection of the future cone of `lo` with the past cone of `hi`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CausalDiamond {
    pub lo: SpaceTimePoint,
    pub hi: SpaceTimePoint,
}

impl CausalDiamond {
    pub fn new(lo: SpaceTimePoint, hi: SpaceTimePoint) -> Result<Self, DiamondError> {
        if !precedes(&lo, &hi) {
            return Err(DiamondError { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, t: &SpaceTimePoint) -> bool {
        diamond_contains(self, t)
    }
}

pub fn diamond_contains(d: &CausalDiamond, t: &SpaceTimePoint) -> bool {
    precedes(&d.lo, t) && precedes(t, &d.hi)
}

/// `D1 ⊆ D2`, decided from the endpoints alone.
pub fn diamond_subset(d1: &CausalDiamond, d2: &CausalDiamond) -> bool {
    precedes(&d2.lo, &d1.lo) && precedes(&d1.hi, &d2.hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn p(t: Rational, x: Rational) -> SpaceTimePoint {
        SpaceTimePoint::on_line(t, x)
    }

    #[test]
    fn precedes_examples() {
        let o = SpaceTimePoint::origin();
        assert!(precedes(&o, &p(int(1), rat(1, 2))));
        assert!(!precedes(&o, &p(int(0), int(1))));
        assert!(precedes(&o, &o));
    }

    #[test]
    fn light_like_boundary_is_included() {
        let o = SpaceTimePoint::origin();
        assert!(precedes(&o, &SpaceTimePoint::int(1, 1)));
        assert!(strictly_precedes(&o, &SpaceTimePoint::int(1, 1)));
        assert!(!precedes(&o, &SpaceTimePoint::int(1, 2)));
    }

    #[test]
    fn strict_examples() {
        let o = SpaceTimePoint::origin();
        assert!(strictly_precedes(&o, &SpaceTimePoint::int(1, 0)));
        assert!(!strictly_precedes(&o, &o));
        // (2, (1,1,0)): squared separation 2 <= 4
        let q = SpaceTimePoint::new(int(2), [int(1), int(1), int(0)]);
        assert!(strictly_precedes(&o, &q));
    }

    #[test]
    fn spacelike_examples() {
        let o = SpaceTimePoint::origin();
        assert!(spacelike(&o, &SpaceTimePoint::int(0, 1)));
        assert!(!spacelike(&o, &SpaceTimePoint::int(1, 0)));
        assert!(spacelike(&o, &SpaceTimePoint::int(1, 3)));
    }

    #[test]
    fn diamond_membership() {
        let d = CausalDiamond::new(SpaceTimePoint::int(0, 0), SpaceTimePoint::int(2, 0)).unwrap();
        assert!(d.contains(&p(int(1), rat(1, 2))));
        assert!(d.contains(&d.lo.clone()));
        assert!(!d.contains(&SpaceTimePoint::int(3, 0)));
    }

    #[test]
    fn diamond_subset_examples() {
        let inner = CausalDiamond::new(SpaceTimePoint::int(1, 0), SpaceTimePoint::int(2, 0)).unwrap();
        let outer = CausalDiamond::new(SpaceTimePoint::int(0, 0), SpaceTimePoint::int(3, 0)).unwrap();
        assert!(diamond_subset(&inner, &outer));
        assert!(diamond_subset(&outer, &outer));
        assert!(!diamond_subset(&outer, &inner));
    }

    #[test]
    fn diamond_rejects_unordered_endpoints() {
        assert!(CausalDiamond::new(SpaceTimePoint::int(1, 0), SpaceTimePoint::int(0, 0)).is_err());
        assert!(CausalDiamond::new(SpaceTimePoint::int(0, 0), SpaceTimePoint::int(0, 1)).is_err());
    }

    #[test]
    fn common_future_of_spacelike_pair() {
        let a = SpaceTimePoint::int(0, -3);
        let b = SpaceTimePoint::int(1, 5);
        let r = common_future([&a, &b]).unwrap();
        assert!(precedes(&a, &r) && precedes(&b, &r));
    }

    #[test]
    fn midpoint_is_between() {
        let a = SpaceTimePoint::int(0, 0);
        let b = SpaceTimePoint::int(4, 2);
        let m = midpoint(&a, &b);
        assert!(strictly_precedes(&a, &m) && strictly_precedes(&m, &b));
    }

    #[test]
    fn json_round_trip_uses_rational_strings() {
        let q = p(rat(3, 2), rat(-1, 4));
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"t":"3/2","x":["-1/4","0/1","0/1"]}"#);
        let back: SpaceTimePoint = serde_json::from_str(r#"{"t":"3/2","x":["-1/4"]}"#).unwrap();
        assert_eq!(back, q);
    }
}
