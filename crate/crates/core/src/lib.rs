pub mod displacement;
pub mod error;
pub mod exterior;
pub mod flux;
pub mod linalg;
pub mod manifold;
pub mod poly;
pub mod rational;
