pub mod beats;
pub mod records;
pub mod reports;
pub mod trainlog;
