pub mod linalg;
pub mod symplectic;
pub mod duistermaat;
pub mod maslov;
pub mod models;
