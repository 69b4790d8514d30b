//! Shared inputs for the criterion benches.

use ehhk::{Catalog, SpaceSpec};

/// Every named row plus the two smallest instances of each family.
pub fn specs() -> Vec<SpaceSpec> {
    Catalog::builtin()
        .expanded(2)
        .expect("builtin catalog expands")
}

pub fn spec(name: &str) -> SpaceSpec {
    Catalog::builtin().resolve(name, &[]).expect("named space")
}
