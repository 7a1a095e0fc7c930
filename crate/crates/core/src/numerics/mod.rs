pub mod quadrature;
pub mod sparse;
pub mod spline;
pub mod tridiag;
