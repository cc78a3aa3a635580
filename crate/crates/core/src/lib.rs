pub mod cartier;
pub mod enumerate;
pub mod error;
pub mod experiment;
pub mod field;
pub mod groebner;
pub mod ideal;
pub mod linalg;
pub mod maps;
pub mod order;
pub mod paper;
pub mod parse;
pub mod poly;
pub mod radical;
pub mod ring;
pub mod runner;
pub mod scenario;
pub mod splitting;
pub mod trace;
pub mod univariate;
