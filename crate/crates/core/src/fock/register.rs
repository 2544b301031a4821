use std::collections::HashMap;
use std::fmt;

use super::FockError;

/// Ordered set of optical mode labels.
///
/// The position of a label fixes its slot in every occupation vector built on
/// this register, so a register is never mutated in place; the `with_*`
/// methods return new registers.
#[derive(Clone, PartialEq, Eq)]
pub struct ModeRegister {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl ModeRegister {
    pub fn new<I, S>(labels: I) -> Result<Self, FockError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut register = ModeRegister {
            labels: Vec::new(),
            index: HashMap::new(),
        };
        for label in labels {
            register.push(label.into())?;
        }
        Ok(register)
    }

    pub fn empty() -> Self {
        ModeRegister {
            labels: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn push(&mut self, label: String) -> Result<(), FockError> {
        if self.index.contains_key(&label) {
            return Err(FockError::DuplicateMode(label));
        }
        self.index.insert(label.clone(), self.labels.len());
        self.labels.push(label);
        Ok(())
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

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn index_of(&self, label: &str) -> Result<usize, FockError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| FockError::UnknownMode(label.to_string()))
    }

    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>, FockError> {
        labels.iter().map(|l| self.index_of(l.as_ref())).collect()
    }

    /// Register with `label` appended as the last mode.
    pub fn with_mode(&self, label: &str) -> Result<Self, FockError> {
        let mut out = self.clone();
        out.push(label.to_string())?;
        Ok(out)
    }

    /// Concatenation `self ++ other`; fails on any shared label.
    pub fn concat(&self, other: &ModeRegister) -> Result<Self, FockError> {
        let mut out = self.clone();
        for label in &other.labels {
            out.push(label.clone())?;
        }
        Ok(out)
    }

    /// Register restricted to `keep`, preserving this register's order.
    pub fn subset<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self, FockError> {
        let wanted = self.indices_of(keep)?;
        let mut positions = wanted.clone();
        positions.sort_unstable();
        positions.dedup();
        ModeRegister::new(positions.into_iter().map(|i| self.labels[i].clone()))
    }

    pub fn renamed(&self, old: &str, new: &str) -> Result<Self, FockError> {
        let pos = self.index_of(old)?;
        if old != new && self.contains(new) {
            return Err(FockError::DuplicateMode(new.to_string()));
        }
        let mut labels = self.labels.clone();
        labels[pos] = new.to_string();
        ModeRegister::new(labels)
    }
}

impl fmt::Debug for ModeRegister {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.labels.iter()).finish()
    }
}
