pub mod error;
pub mod field;
pub mod matrix;
pub mod space;
pub mod maps;
pub mod witt;
pub mod extend;
pub mod flags;
pub mod decomp;
pub mod oracle;
pub mod cli;
