//! Numerical checks of Kuo-type jet sufficiency and of the (a), (c), (m) and
//! (c_d) regularity conditions for polynomial map-germs and their linear
//! deformations `F(x, t) = f(x) + t (g(x) - f(x))`.

pub mod horn;
pub mod linalg;
pub mod poly;
pub mod regularity;
pub mod subspace;
pub mod suite;

pub use horn::{HornSpec, ShellSchedule};
pub use poly::{MapGerm, Polynomial};
pub use regularity::{RegularityReport, Thresholds, Verdict};
pub use subspace::{Frame, Subspace};
