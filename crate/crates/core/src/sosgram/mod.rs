//! Gram (sum-of-squares) relaxations of `H(z) ⪰ h̲ I` on the torus, solved as
//! realified single-block SDPs.

mod basis;
mod certificate;
mod relaxation;
mod sdpa;

pub use basis::MonomialBasis;
pub use certificate::{
    lower_bound_hierarchy, solve_relaxation, sos_lower_bound, FarkasRay, GramCertificate,
    HierarchyEntry, SosOutcome, SosSolve, CERTIFY_THRESHOLD,
};
pub use relaxation::{
    build_relaxation, relaxation_dims, Part, Relaxation, RelaxationDims, RelaxationMode, RowKey,
};
pub use sdpa::{dump_json, export_sdpa, import_sdpa, read_sdpa, write_sdpa};
