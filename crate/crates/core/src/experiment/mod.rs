//! Sweep plans, CSV persistence and run manifests.

mod plan;
mod run;
mod table;

pub use plan::{Cell, ExperimentPlan, GateCount, Grid, SweepGrid};
pub use run::{
    load_cell, load_run, run_cell, simulate, write_record, CellFailure, Manifest, RunReport,
    RunStatus, MANIFEST,
};
pub use table::{parse_table, read_table, render, write_table, Column, Table};
