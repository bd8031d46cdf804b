pub mod exactnum;
pub mod series;
pub mod ratfun;
pub mod algdata;
pub mod msdata;
pub mod examples;
pub mod report;
pub mod jacobi;
pub mod checkers;
pub mod cli;
