// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! Name-keyed registries of interchangeable strategies.
//!
//! Each strategy family (coupling curves, optimizer costs, cycle noise
//! channels) is a trait; a [`Registry`] maps a config `kind` string to a
//! factory that builds a boxed trait object from a context value and the
//! JSON options block that accompanied the `kind`.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::error::{Error, Result};

pub type Factory<Ctx, T> = fn(&Ctx, &Value) -> Result<Box<T>>;

pub struct Registry<Ctx, T: ?Sized> {
    family: &'static str,
    entries: BTreeMap<&'static str, Factory<Ctx, T>>,
}

impl<Ctx, T: ?Sized> Registry<Ctx, T> {
    pub fn new(family: &'static str) -> Self {
        Self {
            family,
            entries: BTreeMap::new(),
        }
    }

    /// Registers `factory` under `name`, replacing any previous entry.
    pub fn register(&mut self, name: &'static str, factory: Factory<Ctx, T>) -> &mut Self {
        self.entries.insert(name, factory);
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn build(&self, name: &str, ctx: &Ctx, options: &Value) -> Result<Box<T>> {
        match self.entries.get(name) {
            Some(factory) => factory(ctx, options),
            None => Err(Error::UnknownStrategy {
                family: self.family,
                name: name.to_string(),
                known: self.names().collect::<Vec<_>>().join(", "),
            }),
        }
    }
}

/// Reads an optional `f64` option, falling back to `default`.
pub(crate) fn opt_f64(options: &Value, key: &str, default: f64) -> Result<f64> {
    match options.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::Config(format!("option `{key}` must be a number"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    trait Shape {
        fn area(&self) -> f64;
    }
    struct Square(f64);
    impl Shape for Square {
        fn area(&self) -> f64 {
            self.0 * self.0
        }
    }

    #[test]
    fn build_and_unknown() {
        let mut reg: Registry<(), dyn Shape> = Registry::new("shape");
        reg.register("square", |_, o| {
            Ok(Box::new(Square(opt_f64(o, "side", 1.0)?)))
        });
        let s = reg.build("square", &(), &json!({"side": 3.0})).unwrap();
        assert_eq!(s.area(), 9.0);
        let s = reg.build("square", &(), &Value::Null).unwrap();
        assert_eq!(s.area(), 1.0);
        let err = reg.build("circle", &(), &Value::Null).err().unwrap();
        assert!(err.to_string().contains("known: square"));
        assert!(reg.build("square", &(), &json!({"side": "x"})).is_err());
    }
}
