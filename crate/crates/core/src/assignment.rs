use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::text::is_valid_name;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("variable `{0}` is bound twice")]
    DoubleBinding(String),
    #[error("malformed binding `{0}`, expected name=0 or name=1")]
    Malformed(String),
}

/// A partial map from variable names to bits.
///
/// Iteration and display are ordered by name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Assignment {
    bindings: BTreeMap<String, bool>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `name`; a variable may be bound only once.
    pub fn bind(&mut self, name: impl Into<String>, bit: bool) -> Result<(), AssignmentError> {
        let name = name.into();
        if self.bindings.contains_key(&name) {
            return Err(AssignmentError::DoubleBinding(name));
        }
        self.bindings.insert(name, bit);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.bindings.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.bindings.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.bindings.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.bindings.keys().map(String::as_str)
    }

    /// Union of two assignments with disjoint domains.
    pub fn union(&self, other: &Assignment) -> Result<Assignment, AssignmentError> {
        let mut out = self.clone();
        for (name, bit) in other.iter() {
            out.bind(name, bit)?;
        }
        Ok(out)
    }

    /// Binds `names[j]` to bit `(index >> (len - 1 - j)) & 1`, so that counting
    /// `index` upwards walks the assignments in lexicographic order with the
    /// first name most significant.
    pub fn from_index(names: &[String], index: u64) -> Assignment {
        let len = names.len();
        let bindings = names
            .iter()
            .enumerate()
            .map(|(j, name)| (name.clone(), (index >> (len - 1 - j)) & 1 == 1))
            .collect();
        Assignment { bindings }
    }
}

impl<S: Into<String>> FromIterator<(S, bool)> for Assignment {
    /// Later bindings of the same name overwrite earlier ones.
    fn from_iter<I: IntoIterator<Item = (S, bool)>>(iter: I) -> Self {
        Assignment {
            bindings: iter.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }
}

impl FromStr for Assignment {
    type Err = AssignmentError;

    /// Parses `x1=1,x2=0`. The empty string is the empty assignment.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Assignment::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, bit) = part
                .split_once('=')
                .ok_or_else(|| AssignmentError::Malformed(part.to_string()))?;
            let name = name.trim();
            let bit = match bit.trim() {
                "0" => false,
                "1" => true,
                _ => return Err(AssignmentError::Malformed(part.to_string())),
            };
            if !is_valid_name(name) {
                return Err(AssignmentError::Malformed(part.to_string()));
            }
            out.bind(name, bit)?;
        }
        Ok(out)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, bit)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{name}={}", u8::from(bit))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let a: Assignment = "x2=0, x1=1".parse().unwrap();
        assert_eq!(a.get("x1"), Some(true));
        assert_eq!(a.to_string(), "x1=1,x2=0");
        assert!("x1=2".parse::<Assignment>().is_err());
        assert_eq!(
            "x1=1,x1=0".parse::<Assignment>(),
            Err(AssignmentError::DoubleBinding("x1".into()))
        );
    }

    #[test]
    fn lexicographic_indexing() {
        let names = vec!["a".to_string(), "b".to_string()];
        let order: Vec<_> = (0..4).map(|i| Assignment::from_index(&names, i).to_string()).collect();
        assert_eq!(order, ["a=0,b=0", "a=0,b=1", "a=1,b=0", "a=1,b=1"]);
    }
}
