//! Exact invariant theory of finite pseudoreflection groups: cyclotomic
//! arithmetic, sparse multivariate polynomials, group catalogs, invariant
//! rings and module bases, basic-invariant decompositions, isotypic
//! projections, and reproducing kernel transforms.

pub mod cli;
pub mod cst;
pub mod cyclotomic;
pub mod error;
pub mod group;
pub mod invariant;
pub mod isotypic;
pub mod kernel;
pub mod linalg;
pub mod poly;
pub mod report;

pub fn run() -> i32 {
    cli::run()
}
