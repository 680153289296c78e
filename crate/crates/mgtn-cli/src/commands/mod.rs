pub mod tools;
pub mod trade;
pub mod train;
