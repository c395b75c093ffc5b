//! Input-output tables: parsing, expenditure shares, pruning of disconnected
//! sectors, diagnosability reports and shock propagation.

mod report;
mod share;
mod shock;
mod table;

pub use report::{table_report, table_report_with, TableOptions, TableReport};
pub use share::{expenditure_share, expenditure_share_with, Normalization, ShareMatrix};
pub use shock::{half_life, simulate_direct, simulate_shock, Mode, ShockReport, ShockScenario};
pub use table::{parse_io_table, prune_disconnected, IoTable};
