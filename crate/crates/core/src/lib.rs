pub mod case;
pub mod checks;
pub mod cli;
pub mod engine;
pub mod logic;
pub mod report;
pub mod translator;
