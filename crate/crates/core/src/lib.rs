//! Evidential (Dempster-Shafer) classification of radar obstacle readings
//! and detection of spoofed sensor packets.

pub mod cli;
pub mod detector;
pub mod dst;
pub mod feature_model;
pub mod radar_data;
