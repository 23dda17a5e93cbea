use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// One of the six impact dimensions tracked for every hazard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsequenceKind {
    Fatalities,
    Injuries,
    PropertyDamage,
    CropDamage,
    CustomersWithoutPower,
    BusinessesClosed,
}

impl ConsequenceKind {
    pub const ALL: [ConsequenceKind; 6] = [
        ConsequenceKind::Fatalities,
        ConsequenceKind::Injuries,
        ConsequenceKind::PropertyDamage,
        ConsequenceKind::CropDamage,
        ConsequenceKind::CustomersWithoutPower,
        ConsequenceKind::BusinessesClosed,
    ];

    pub const COUNT: usize = 6;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConsequenceKind::Fatalities => "fatalities",
            ConsequenceKind::Injuries => "injuries",
            ConsequenceKind::PropertyDamage => "property_damage",
            ConsequenceKind::CropDamage => "crop_damage",
            ConsequenceKind::CustomersWithoutPower => "customers_without_power",
            ConsequenceKind::BusinessesClosed => "businesses_closed",
        }
    }

    /// Property and crop damage are already measured in dollars.
    pub fn is_monetary(self) -> bool {
        matches!(self, ConsequenceKind::PropertyDamage | ConsequenceKind::CropDamage)
    }
}

impl fmt::Display for ConsequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConsequenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConsequenceKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown consequence kind `{s}`")))
    }
}

/// A value for each consequence kind. Serialized as a map keyed by kind; all
/// six keys are required on input.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Consequences<T>(pub [T; ConsequenceKind::COUNT]);

impl<T: Copy> Consequences<T> {
    pub fn splat(v: T) -> Self {
        Consequences([v; ConsequenceKind::COUNT])
    }

    pub fn iter(&self) -> impl Iterator<Item = (ConsequenceKind, T)> + '_ {
        ConsequenceKind::ALL.into_iter().map(move |k| (k, self.0[k.index()]))
    }

    pub fn map<U>(&self, mut f: impl FnMut(ConsequenceKind, T) -> U) -> Consequences<U> {
        Consequences(ConsequenceKind::ALL.map(|k| f(k, self.0[k.index()])))
    }
}

impl<T> Index<ConsequenceKind> for Consequences<T> {
    type Output = T;

    fn index(&self, kind: ConsequenceKind) -> &T {
        &self.0[kind.index()]
    }
}

impl<T> IndexMut<ConsequenceKind> for Consequences<T> {
    fn index_mut(&mut self, kind: ConsequenceKind) -> &mut T {
        &mut self.0[kind.index()]
    }
}

impl<T: Serialize> Serialize for Consequences<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(ConsequenceKind::COUNT))?;
        for kind in ConsequenceKind::ALL {
            map.serialize_entry(kind.as_str(), &self.0[kind.index()])?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Consequences<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ConsequenceVisitor<T>(std::marker::PhantomData<T>);

        impl<'de, T: Deserialize<'de>> Visitor<'de> for ConsequenceVisitor<T> {
            type Value = Consequences<T>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map with one entry per consequence kind")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut slots: [Option<T>; ConsequenceKind::COUNT] = Default::default();
                while let Some(key) = access.next_key::<ConsequenceKind>()? {
                    let slot = &mut slots[key.index()];
                    if slot.is_some() {
                        return Err(de::Error::custom(format!("duplicate consequence kind `{key}`")));
                    }
                    *slot = Some(access.next_value()?);
                }
                let mut missing = ConsequenceKind::ALL.into_iter().filter(|k| slots[k.index()].is_none());
                if let Some(kind) = missing.next() {
                    return Err(de::Error::custom(format!("missing consequence kind `{kind}`")));
                }
                Ok(Consequences(slots.map(|s| s.expect("checked above"))))
            }
        }

        deserializer.deserialize_map(ConsequenceVisitor(std::marker::PhantomData))
    }
}
