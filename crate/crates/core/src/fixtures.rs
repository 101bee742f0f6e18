//! Instance documents compiled into the binary.

use crate::surface::{parse_instance, SurfaceError, SurfaceInstance};

macro_rules! fixture {
    ($name:literal) => {
        ($name, include_str!(concat!("../fixtures/", $name, ".json")))
    };
}

/// Every built-in surface instance, by name.
pub const BUILTIN_INSTANCES: &[(&str, &str)] = &[
    fixture!("theorem1-r4"),
    fixture!("p1xp1-4lines"),
    fixture!("product-curve-s2"),
    fixture!("product-curve-s3"),
    fixture!("product-curve-s4"),
    fixture!("product-curve-s5"),
    fixture!("symsquare-r3"),
    fixture!("symsquare-r4"),
    fixture!("symsquare-r5"),
    fixture!("abelian-r4-e1"),
    fixture!("quadratic-xi-r4"),
    fixture!("hodge-violation"),
];

/// The three-dimensional filtration pair used by the `basis` demo.
pub const BASIS_D3: &str = include_str!("../fixtures/basis-d3.json");

/// Instances run by `examples`, with the expected verdict of the main
/// criterion for each.
pub const EXPECTED_EXAMPLES: &[(&str, bool)] = &[
    ("p1xp1-4lines", false),
    ("product-curve-s2", false),
    ("product-curve-s3", true),
    ("product-curve-s4", true),
    ("product-curve-s5", true),
    ("symsquare-r3", false),
    ("symsquare-r4", true),
    ("symsquare-r5", true),
    ("abelian-r4-e1", true),
];

pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTIN_INSTANCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

/// Parses a built-in instance; `None` for an unknown name.
pub fn builtin(name: &str) -> Option<Result<SurfaceInstance, SurfaceError>> {
    builtin_source(name).map(parse_instance)
}

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTIN_INSTANCES.iter().map(|(n, _)| *n)
}
