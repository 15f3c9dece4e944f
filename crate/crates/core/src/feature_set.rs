use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FeatureSpace;

/// A set of feature indices, stored 0-based and displayed 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct FeatureSet(BTreeSet<usize>);

impl FeatureSet {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        Self(indices.into_iter().collect())
    }

    pub fn single(index: usize) -> Self {
        Self::new([index])
    }

    /// All features `0..n`.
    pub fn all(n: usize) -> Self {
        Self::new(0..n)
    }

    /// Builds a set from 1-based positions, as written in reports and on the CLI.
    pub fn from_one_based(positions: impl IntoIterator<Item = usize>) -> Result<Self> {
        positions
            .into_iter()
            .map(|p| {
                p.checked_sub(1)
                    .ok_or(Error::FeatureIndex { index: p, n: 0 })
            })
            .collect::<Result<BTreeSet<_>>>()
            .map(Self)
    }

    /// Parses `"1,2"` or `"x1,x3"` (names from `space`) into a set.
    pub fn parse(text: &str, space: &FeatureSpace) -> Result<Self> {
        let mut set = BTreeSet::new();
        for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let index = match token.parse::<usize>() {
                Ok(p) if p >= 1 && p <= space.len() => p - 1,
                Ok(p) => {
                    return Err(Error::FeatureIndex {
                        index: p,
                        n: space.len(),
                    })
                }
                Err(_) => space
                    .index_of(token)
                    .ok_or_else(|| Error::Config(format!("unknown feature `{token}`")))?,
            };
            set.insert(index);
        }
        if set.is_empty() {
            return Err(Error::EmptyStudiedSet);
        }
        Ok(Self(set))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains(&index)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &FeatureSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// Checks every index against a space of `n` features.
    pub fn check_bounds(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i >= n) {
            Some(&i) => Err(Error::FeatureIndex { index: i + 1, n }),
            None => Ok(()),
        }
    }

    /// Human label, e.g. `x1` or `{x1,x2}`, using names from the space.
    pub fn label(&self, space: &FeatureSpace) -> String {
        let names: Vec<&str> = self
            .iter()
            .map(|i| space.feature(i).name.as_str())
            .collect();
        if names.len() == 1 {
            names[0].to_string()
        } else {
            format!("{{{}}}", names.join(","))
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl From<FeatureSet> for Vec<usize> {
    fn from(set: FeatureSet) -> Self {
        set.one_based()
    }
}

impl TryFrom<Vec<usize>> for FeatureSet {
    type Error = Error;

    fn try_from(positions: Vec<usize>) -> Result<Self> {
        Self::from_one_based(positions)
    }
}
