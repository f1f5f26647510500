pub(crate) mod mp;
pub mod basis;
pub mod cli;
pub mod eigensolver;
pub mod lognls;
pub mod ptspec;
pub mod quadrature;
