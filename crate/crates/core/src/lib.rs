pub mod annealsim;
pub mod cli;
pub mod codes;
pub mod distance;
pub mod gf2;
pub mod qubo;
pub mod solvers;
