pub mod curve;
pub mod eigen;
pub mod fit;
pub mod signatures;
pub mod validate;
