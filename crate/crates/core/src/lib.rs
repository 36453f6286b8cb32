pub mod plf;
pub mod cli;
pub mod gen;
pub mod index;
pub mod instance;
pub mod operator;
pub mod plot;
pub mod radii;
pub mod rational;
pub mod skeleton;
pub mod suites;
