//! Cardinalities attached to diagram nodes.
//!
//! A node either stands for finitely many pairwise-incomparable primes, for
//! countably many, or for continuum many. The three tiers are totally
//! ordered and closed under the max/sum arithmetic used by box merging.

use std::fmt;

use serde::de::{self, Deserializer, Unexpected};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// The number of primes a single diagram node stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cardinality {
    /// Exactly `n` primes, `n >= 1` for any node actually present.
    Finite(u64),
    /// Countably infinitely many primes.
    Aleph0,
    /// Continuum many primes.
    Continuum,
}

impl Cardinality {
    /// Rank used by the total order: all finite values sit below `Aleph0`,
    /// which sits below `Continuum`.
    fn tier(self) -> u8 {
        match self {
            Cardinality::Finite(_) => 0,
            Cardinality::Aleph0 => 1,
            Cardinality::Continuum => 2,
        }
    }

    /// Cardinal sum: finite values add, anything involving an infinite
    /// cardinal is absorbed into the larger operand.
    pub fn sum(self, other: Cardinality) -> Cardinality {
        match (self, other) {
            (Cardinality::Finite(a), Cardinality::Finite(b)) => Cardinality::Finite(a + b),
            (a, b) => a.max(b),
        }
    }

    /// Sum over an iterator; the empty sum is `Finite(0)`.
    pub fn sum_all<I: IntoIterator<Item = Cardinality>>(iter: I) -> Cardinality {
        iter.into_iter()
            .fold(Cardinality::Finite(0), Cardinality::sum)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Cardinality::Finite(_))
    }

    /// Countable-mode squashing: `Continuum` drops to `Aleph0`, everything
    /// else is unchanged.
    pub fn capped_at_countable(self) -> Cardinality {
        match self {
            Cardinality::Continuum => Cardinality::Aleph0,
            c => c,
        }
    }
}

impl PartialOrd for Cardinality {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cardinality {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Cardinality::Finite(a), Cardinality::Finite(b)) => a.cmp(b),
            (a, b) => a.tier().cmp(&b.tier()),
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::Aleph0 => write!(f, "\u{2135}0"),
            Cardinality::Continuum => write!(f, "\u{1d520}"),
        }
    }
}

// Serialized form: a plain integer for finite values, the strings
// "aleph0" / "continuum" for the infinite tiers.
impl Serialize for Cardinality {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Cardinality::Finite(n) => serializer.serialize_u64(*n),
            Cardinality::Aleph0 => serializer.serialize_str("aleph0"),
            Cardinality::Continuum => serializer.serialize_str("continuum"),
        }
    }
}

impl<'de> Deserialize<'de> for Cardinality {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CardVisitor;
        impl<'de> de::Visitor<'de> for CardVisitor {
            type Value = Cardinality;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative integer, \"aleph0\", or \"continuum\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cardinality, E> {
                Ok(Cardinality::Finite(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cardinality, E> {
                u64::try_from(v)
                    .map(Cardinality::Finite)
                    .map_err(|_| E::invalid_value(Unexpected::Signed(v), &self))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Cardinality, E> {
                match v {
                    "aleph0" => Ok(Cardinality::Aleph0),
                    "continuum" => Ok(Cardinality::Continuum),
                    _ => Err(E::invalid_value(Unexpected::Str(v), &self)),
                }
            }
        }
        deserializer.deserialize_any(CardVisitor)
    }
}
