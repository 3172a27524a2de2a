//! System types: the three atomic kinds and their ordered composites.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One of the three atomic Witworld system kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomicSystem {
    /// Classical system with `v` outcomes.
    Classical(usize),
    /// Quantum system on a `d`-dimensional Hilbert space.
    Quantum(usize),
    /// Boxworld system with `n` measurements of `k` outcomes each.
    Boxworld { n: usize, k: usize },
}

impl AtomicSystem {
    pub fn boxworld(n: usize, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "Boxworld outcome count must be at least 2, got {k}"
            )));
        }
        Ok(AtomicSystem::Boxworld { n, k })
    }

    /// Real dimension of the atom's vector space.
    pub fn dimension(&self) -> usize {
        match *self {
            AtomicSystem::Classical(v) => v,
            AtomicSystem::Quantum(d) => d * d,
            AtomicSystem::Boxworld { n, k } => n * (k - 1) + 1,
        }
    }

    pub fn is_quantum(&self) -> bool {
        matches!(self, AtomicSystem::Quantum(_))
    }

    pub fn is_classical(&self) -> bool {
        matches!(self, AtomicSystem::Classical(_))
    }

    /// Classical and Boxworld atoms have polytopic state spaces.
    pub fn is_polytopic(&self) -> bool {
        !self.is_quantum()
    }

    fn validate(&self) -> Result<()> {
        match *self {
            AtomicSystem::Classical(0) => Err(Error::InvalidArgument(
                "classical system needs at least one outcome".into(),
            )),
            AtomicSystem::Quantum(0) => Err(Error::InvalidArgument(
                "quantum system needs positive Hilbert dimension".into(),
            )),
            AtomicSystem::Boxworld { k, .. } if k < 2 => Err(Error::InvalidArgument(
                "Boxworld outcome count must be at least 2".into(),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for AtomicSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AtomicSystem::Classical(v) => write!(f, "C{v}"),
            AtomicSystem::Quantum(d) => write!(f, "Q{d}"),
            AtomicSystem::Boxworld { n, k } => write!(f, "B{n},{k}"),
        }
    }
}

impl FromStr for AtomicSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unrecognised atom '{s}', expected Q<d>, C<v> or B<n>,<k>"));
        let (tag, rest) = s.split_at_checked(1).ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let atom = match tag {
            "Q" => AtomicSystem::Quantum(num(rest)?),
            "C" => AtomicSystem::Classical(num(rest)?),
            "B" => {
                let (n, k) = rest.split_once(',').ok_or_else(bad)?;
                AtomicSystem::Boxworld {
                    n: num(n)?,
                    k: num(k)?,
                }
            }
            _ => return Err(bad()),
        };
        atom.validate().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(atom)
    }
}

/// Ordered list of atoms. The empty list is the trivial (scalar) system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct SystemType(Vec<AtomicSystem>);

impl SystemType {
    pub fn new(atoms: Vec<AtomicSystem>) -> Result<Self> {
        for a in &atoms {
            a.validate()?;
        }
        Ok(SystemType(atoms))
    }

    pub fn trivial() -> Self {
        SystemType(Vec::new())
    }

    pub fn atom(a: AtomicSystem) -> Self {
        SystemType(vec![a])
    }

    pub fn classical(v: usize) -> Self {
        SystemType(vec![AtomicSystem::Classical(v)])
    }

    pub fn quantum(d: usize) -> Self {
        SystemType(vec![AtomicSystem::Quantum(d)])
    }

    pub fn boxworld(n: usize, k: usize) -> Self {
        SystemType(vec![AtomicSystem::Boxworld { n, k }])
    }

    pub fn atoms(&self) -> &[AtomicSystem] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_atomic(&self) -> bool {
        self.0.len() == 1
    }

    /// Product of the atomic dimensions; 1 for the trivial system.
    pub fn dimension(&self) -> usize {
        self.0.iter().map(AtomicSystem::dimension).product()
    }

    pub fn atom_dims(&self) -> Vec<usize> {
        self.0.iter().map(AtomicSystem::dimension).collect()
    }

    /// The composite `self · other`.
    pub fn compose(&self, other: &SystemType) -> SystemType {
        let mut atoms = self.0.clone();
        atoms.extend_from_slice(&other.0);
        SystemType(atoms)
    }

    pub fn is_all_quantum(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(AtomicSystem::is_quantum)
    }

    pub fn is_polytopic(&self) -> bool {
        self.0.iter().all(AtomicSystem::is_polytopic)
    }

    /// Hilbert dimensions when every atom is quantum.
    pub fn hilbert_dims(&self) -> Option<Vec<usize>> {
        self.0
            .iter()
            .map(|a| match *a {
                AtomicSystem::Quantum(d) => Some(d),
                _ => None,
            })
            .collect()
    }

    /// Sub-system made of the atoms at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<SystemType> {
        indices
            .iter()
            .map(|&i| {
                self.0.get(i).copied().ok_or_else(|| {
                    Error::InvalidArgument(format!("factor index {i} out of range for {self}"))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(SystemType)
    }

    pub fn labels(&self) -> Vec<String> {
        self.0.iter().map(ToString::to_string).collect()
    }

    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        labels
            .iter()
            .map(|l| l.as_ref().parse())
            .collect::<Result<Vec<_>>>()
            .map(SystemType)
    }
}

impl From<AtomicSystem> for SystemType {
    fn from(a: AtomicSystem) -> Self {
        SystemType(vec![a])
    }
}

impl fmt::Display for SystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<_> = self.labels();
        write!(f, "{}", parts.join("·"))
    }
}

impl Serialize for SystemType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.labels().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SystemType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<String>::deserialize(d)?;
        SystemType::from_labels(&labels).map_err(serde::de::Error::custom)
    }
}
