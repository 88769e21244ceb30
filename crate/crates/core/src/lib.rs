pub mod cli;
pub mod constructors;
pub mod cyclo;
pub mod datum;
pub mod homology;
pub mod linalg;
pub mod repmod;
