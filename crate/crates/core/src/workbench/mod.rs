pub mod commands;
pub mod fixtures;
pub mod manifest;
pub mod oracle;
pub mod report;
