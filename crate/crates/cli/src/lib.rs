//! Command-line front end: configuration, stage orchestration with
//! fingerprint caching, report and chart emission, and a synthetic demo
//! corpus generator. All analysis lives in `review_miner_core`; this crate
//! only moves bytes between files and core calls.

pub mod chart;
pub mod config;
pub mod demo;
pub mod error;
pub mod manifest;
pub mod pipeline;
pub mod report;
