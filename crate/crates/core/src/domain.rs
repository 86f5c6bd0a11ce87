//! Inhomogeneous domains: subdomain function sets, homogeneity queries and
//! random domain synthesis from warped Meyer-type kernel systems.

mod grid;
pub mod io;
mod meyer;
mod realize;
mod subdomains;

pub use grid::{GridFunction, DEFAULT_GRID_STEP};
pub use meyer::{meyer_aux, MeyerSystem};
pub use realize::{
    assign_kernels, random_warp, realize_domain, realize_domain_with, subdomains_from_kernels,
    RealizeOptions,
};
pub use subdomains::{SubdomainSet, DEFAULT_HOMOGENEITY_TOL, PARTITION_TOL};
