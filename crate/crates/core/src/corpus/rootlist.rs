use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ids::TermId;

use super::index::tokenize;

pub const VARIANT_DELIMITER: char = '|';

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    pub id: TermId,
    pub canonical: String,
    pub variants: Vec<String>,
}

impl Root {
    /// Canonical form followed by the variants.
    pub fn forms(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.canonical.as_str()).chain(self.variants.iter().map(String::as_str))
    }
}

/// The curated vocabulary. Term ids are positions in `roots`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootList {
    roots: Vec<Root>,
}

impl RootList {
    /// Builds a root list from `(canonical, variants)` entries.
    ///
    /// Every form is normalized to its token sequence; two roots may not
    /// share a canonical form, and no normalized form may belong to two
    /// roots.
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<S>)>,
        S: Into<String>,
    {
        let mut roots: Vec<Root> = Vec::new();
        let mut owner: HashMap<Vec<String>, usize> = HashMap::new();
        for (line, (canonical, variants)) in entries.into_iter().enumerate() {
            let canonical: String = canonical.into().trim().to_string();
            let key = tokenize(&canonical);
            if key.is_empty() {
                return Err(Error::EmptyRoot { line: line + 1 });
            }
            if let Some(&other) = owner.get(&key) {
                return Err(if tokenize(&roots[other].canonical) == key {
                    Error::DuplicateRoot(canonical)
                } else {
                    Error::AmbiguousVariant {
                        variant: canonical,
                        first: roots[other].canonical.clone(),
                        second: key.join(" "),
                    }
                });
            }
            let index = roots.len();
            owner.insert(key, index);
            roots.push(Root {
                id: TermId(index as u32),
                canonical,
                variants: Vec::new(),
            });
            for variant in variants {
                let variant: String = variant.into().trim().to_string();
                let key = tokenize(&variant);
                if key.is_empty() {
                    continue;
                }
                match owner.get(&key) {
                    Some(&o) if o == index => {}
                    Some(&o) => {
                        return Err(Error::AmbiguousVariant {
                            variant,
                            first: roots[o].canonical.clone(),
                            second: roots[index].canonical.clone(),
                        })
                    }
                    None => {
                        owner.insert(key, index);
                    }
                }
                roots[index].variants.push(variant);
            }
        }
        Ok(RootList { roots })
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn get(&self, id: TermId) -> Option<&Root> {
        self.roots.get(id.0 as usize)
    }

    pub fn label(&self, id: TermId) -> &str {
        self.roots
            .get(id.0 as usize)
            .map(|r| r.canonical.as_str())
            .unwrap_or("?")
    }

    /// Case-insensitive lookup by canonical form.
    pub fn find(&self, form: &str) -> Option<TermId> {
        let key = tokenize(form);
        self.roots
            .iter()
            .find(|r| tokenize(&r.canonical) == key)
            .map(|r| r.id)
    }
}

/// Reads one root per line; `|` separates the canonical form from its
/// variants. Blank lines are skipped.
pub fn parse_rootlist(path: &Path) -> Result<RootList> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let entries = text.lines().filter(|l| !l.trim().is_empty()).map(|line| {
        let mut forms = line.split(VARIANT_DELIMITER);
        let canonical = forms.next().unwrap_or_default();
        (canonical, forms.collect::<Vec<_>>())
    });
    RootList::new(entries)
}
