//! Name-keyed registries of interchangeable algorithm implementations.
//!
//! Each pluggable stage (title language identification, context
//! classification, reference matching) defines a trait; implementations are
//! registered here under a name and built at runtime from a
//! [`StrategyConfig`], usually from a CLI flag.
//!
//! ```
//! use xling_core::strategy::StrategyConfig;
//! use xling_core::title::identifier_registry;
//!
//! let registry = identifier_registry();
//! let identifier = registry.create("script", &StrategyConfig::default()).unwrap();
//! assert_eq!(identifier.name(), "script");
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};

/// Options passed to a strategy factory.
#[derive(Debug, Clone, Default)]
pub struct StrategyConfig {
    /// Data file backing the strategy (lexicon, lookup table, ...).
    pub path: Option<PathBuf>,
}

impl StrategyConfig {
    pub fn with_path(path: impl Into<PathBuf>) -> Self {
        StrategyConfig {
            path: Some(path.into()),
        }
    }
}

type Factory<T> = Box<dyn Fn(&StrategyConfig) -> Result<Box<T>> + Send + Sync>;

struct Entry<T: ?Sized> {
    description: &'static str,
    factory: Factory<T>,
}

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<String, Entry<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Registers `factory` under `name`, replacing any previous entry.
    pub fn register<F>(&mut self, name: &str, description: &'static str, factory: F) -> &mut Self
    where
        F: Fn(&StrategyConfig) -> Result<Box<T>> + Send + Sync + 'static,
    {
        self.entries.insert(
            name.to_string(),
            Entry {
                description,
                factory: Box::new(factory),
            },
        );
        self
    }

    pub fn create(&self, name: &str, config: &StrategyConfig) -> Result<Box<T>> {
        match self.entries.get(name) {
            Some(entry) => (entry.factory)(config),
            None => Err(Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().collect::<Vec<_>>().join(", "),
            }),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// `(name, description)` pairs, sorted by name.
    pub fn describe(&self) -> impl Iterator<Item = (&str, &'static str)> {
        self.entries.iter().map(|(n, e)| (n.as_str(), e.description))
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}

/// Fetches the required data path of a strategy.
pub(crate) fn require_path<'a>(
    config: &'a StrategyConfig,
    kind: &'static str,
    name: &str,
) -> Result<&'a PathBuf> {
    config.path.as_ref().ok_or_else(|| Error::StrategyConfig {
        kind,
        name: name.to_string(),
        what: "a data file path",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter {
        fn greet(&self) -> String;
    }

    struct Fixed(&'static str);
    impl Greeter for Fixed {
        fn greet(&self) -> String {
            self.0.to_string()
        }
    }

    #[test]
    fn lookup_by_name() {
        let mut reg: Registry<dyn Greeter> = Registry::new("greeter");
        reg.register("hi", "says hi", |_| Ok(Box::new(Fixed("hi"))));
        reg.register("yo", "says yo", |_| Ok(Box::new(Fixed("yo"))));
        assert_eq!(reg.create("yo", &StrategyConfig::default()).unwrap().greet(), "yo");
        assert_eq!(reg.names().collect::<Vec<_>>(), ["hi", "yo"]);
        let err = reg.create("hey", &StrategyConfig::default()).err().unwrap();
        assert_eq!(err.to_string(), "unknown greeter \"hey\" (available: hi, yo)");
    }
}
