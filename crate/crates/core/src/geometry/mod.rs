mod chart;
mod conformal;
mod curvature;
mod metric;
mod tensor;

pub use chart::{Chart, Orientation};
pub use conformal::{conformal_box, conformal_ricci};
pub use curvature::{
    box_scalar, christoffel, einstein_tensor, first_bianchi, inverse_metric, ricci, ricci_scalar,
    riemann, Geometry,
};
pub use metric::{MetricSpec, Signature};
pub use tensor::{sample_max_abs, Slot, TensorField};
