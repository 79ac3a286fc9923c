//! Traces for ℂ-elliptic operators: symbol tests, polynomial kernels,
//! dyadic cube covers and the projection-based replacement trace.

pub mod cover;
pub mod kernel;
pub mod operator;
pub mod poly;
pub mod quadrature;
pub mod trace;

pub use cover::{build_cover, build_pou, Cube, CubeCover, Localizer, PartitionOfUnity};
pub use kernel::{kernel_basis, kernel_dimension, KernelBasis, DEFAULT_DEGREE_CAP};
pub use operator::{is_c_elliptic, DiffOperator, Ellipticity};
pub use quadrature::{project, project_fn, Projection};
pub use trace::{replacement_trace, trace_bounds_check, BoundsOptions, TraceBoundsReport, TraceRun};
