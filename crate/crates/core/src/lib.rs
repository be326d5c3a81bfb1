//! Random regular graphs and two structural measurements on them: maximum
//! vertex congestion under equal-split geodesic routing, and Gromov
//! four-point hyperbolicity, together with the almost-geodesic cycle
//! construction that exhibits large four-point defects.

pub mod congestion;
pub mod cycle_probe;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod hyperbolicity;
pub mod paths;
pub mod seed;

pub use error::{Error, Result};
pub use graph::{read_edge_list, write_edge_list, Graph};
