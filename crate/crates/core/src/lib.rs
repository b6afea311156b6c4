// SPDX-License-Identifier: Apache-2.0
//! Relative attribute reducts, value reduction and demarcation measures for
//! categorical decision tables, built on sorted cascade tasks.

pub mod table;
pub mod tasks;
pub mod squeeze;
pub mod oracle;
pub mod valred;
pub mod heuristics;
pub mod measures;
pub mod classifier;
