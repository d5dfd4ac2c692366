//! Small hand-checked inputs used by tests, examples and the demo.

/// Six concepts: `R` with children `A`, `B`; `A` with `A1`, `A2`; `B` with `B1`.
pub const O1_OBO: &str = "\
[Term]
id: R
name: R

[Term]
id: A
name: A
is_a: R ! root

[Term]
id: B
name: B
is_a: R

[Term]
id: A1
name: A1
is_a: A

[Term]
id: A2
name: A2
is_a: A

[Term]
id: B1
name: B1
is_a: B
";

/// Four documents over [`O1_OBO`], one concept each.
pub const C1_TSV: &str = "D1\tA1\nD2\tA2\nD3\tB1\nD4\tB\n";

/// A small Gene-Ontology-flavoured ontology (ids and labels only loosely
/// follow GO) with a matching gene annotation file.
pub const SAMPLE_OBO: &str = include_str!("../../../data/sample.obo");
pub const SAMPLE_TSV: &str = include_str!("../../../data/sample.tsv");
