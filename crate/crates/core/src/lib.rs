//! Mobility analysis of parallel mechanisms from joint-axis topology.

pub mod algebra;
pub mod cli;
pub mod generate;
pub mod leg;
pub mod mechfile;
pub mod mobility;
pub mod oracle;
pub mod par;
pub mod relation;
pub mod report;
pub mod subchain;
pub mod topology;
