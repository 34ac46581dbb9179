use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::SystemError;
use crate::spacetime::SpaceTimePoint;

/// A wire value. `Vacuum` is the absence of a message and belongs to every alphabet.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Symbol {
    Vacuum,
    /// `⊥`
    Abort,
    /// `⊥̄`, the explicit decision not to abort.
    NoAbort,
    Comm,
    Open,
    Val(u32),
}

impl Symbol {
    pub const ZERO: Symbol = Symbol::Val(0);
    pub const ONE: Symbol = Symbol::Val(1);

    pub fn bit(b: u32) -> Self {
        Symbol::Val(b & 1)
    }

    pub fn as_val(self) -> Option<u32> {
        match self {
            Symbol::Val(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_vacuum(self) -> bool {
        self == Symbol::Vacuum
    }

    /// XOR of two bit values; `None` if either is not a value.
    pub fn xor(self, other: Symbol) -> Option<Symbol> {
        Some(Symbol::Val(self.as_val()? ^ other.as_val()?))
    }

    /// `{0, .., k-1}`.
    pub fn values(k: u32) -> Vec<Symbol> {
        (0..k).map(Symbol::Val).collect()
    }

    pub fn bits() -> Vec<Symbol> {
        Self::values(2)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Vacuum => f.write_str("vac"),
            Symbol::Abort => f.write_str("abort"),
            Symbol::NoAbort => f.write_str("no-abort"),
            Symbol::Comm => f.write_str("comm"),
            Symbol::Open => f.write_str("open"),
            Symbol::Val(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Symbol {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.trim() {
            "vac" | "vacuum" | "" => Symbol::Vacuum,
            "abort" | "⊥" => Symbol::Abort,
            "no-abort" | "⊥̄" => Symbol::NoAbort,
            "comm" => Symbol::Comm,
            "open" => Symbol::Open,
            other => Symbol::Val(other.parse().map_err(|_| format!("unknown symbol {other:?}"))?),
        })
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A value together with the event at which it is sent or received.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct StampedMessage {
    pub value: Symbol,
    pub point: SpaceTimePoint,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::In => Direction::Out,
            Direction::Out => Direction::In,
        }
    }
}

/// A named wire end carrying at most one message per allowed point.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Port {
    pub name: String,
    pub direction: Direction,
    /// Non-vacuum symbols; the vacuum is always allowed in addition.
    pub alphabet: Vec<Symbol>,
    pub points: Vec<SpaceTimePoint>,
}

impl Port {
    pub fn new(
        name: impl Into<String>,
        direction: Direction,
        alphabet: Vec<Symbol>,
        points: Vec<SpaceTimePoint>,
    ) -> Result<Self, SystemError> {
        let name = name.into();
        let mut alphabet: Vec<Symbol> = alphabet.into_iter().filter(|s| !s.is_vacuum()).collect();
        alphabet.sort();
        alphabet.dedup();
        if alphabet.is_empty() {
            return Err(SystemError::InvalidPort(format!("{name}: empty alphabet")));
        }
        if points.is_empty() {
            return Err(SystemError::InvalidPort(format!("{name}: no points")));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(SystemError::InvalidPort(format!("{name}: repeated point {p}")));
            }
        }
        Ok(Self { name, direction, alphabet, points })
    }

    pub fn accepts(&self, s: Symbol) -> bool {
        s.is_vacuum() || self.alphabet.contains(&s)
    }

    /// Alphabet including the vacuum, vacuum first.
    pub fn choices(&self) -> Vec<Symbol> {
        let mut v = vec![Symbol::Vacuum];
        v.extend(self.alphabet.iter().copied());
        v
    }

    pub fn slot_label(&self, point_idx: usize) -> String {
        format!("{}@{}", self.name, self.points[point_idx])
    }
}
