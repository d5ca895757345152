pub mod critical;
pub mod eigen;
pub mod exact;
pub mod io;
pub mod motion;
pub mod numeric;
pub mod quad;
pub mod specfun;
pub mod spline;
pub mod tridiag;
