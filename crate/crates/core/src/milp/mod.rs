//! Linearized mixed-integer model of the scheduling problem, LP-format
//! export, warm starts and solution import.
//!
//! Each demand row picks exactly one valid option through one-hot binaries
//! `lam`, which makes every flow linear in the decision variables. The
//! percentile is linearized with exemption binaries `u` per link, direction
//! and slot: at most `floor(0.05·T)` slots per series are exempt, the billable
//! `z` must cover every non-exempt sample, and exempt samples may use the
//! physical capacity instead of the billable cap. Overage `w ≥ z − c_basic`,
//! `w ≥ 0` carries the objective `Σ rate·w`.
//!
//! # Variable names
//!
//! | name                    | kind       | meaning                               |
//! |-------------------------|------------|---------------------------------------|
//! | `lam_t{t}_n{n}_k{k}_p{p}` | binary   | demand (t, n, k) uses option p        |
//! | `fei_n{n}_i{i}_t{t}`    | continuous | inbound flow on edge link (n, i)      |
//! | `feo_n{n}_i{i}_t{t}`    | continuous | outbound flow on edge link (n, i)     |
//! | `fli_i{i}_t{t}`         | continuous | inbound flow on ISP link i            |
//! | `flo_i{i}_t{t}`         | continuous | outbound flow on ISP link i           |
//! | `uei_n{n}_i{i}_t{t}`, `ueo_…` | binary | edge sample exempt (in / out)      |
//! | `uli_i{i}_t{t}`, `ulo_…` | binary    | ISP sample exempt (in / out)          |
//! | `ze_n{n}_i{i}`, `zl_i{i}` | continuous | billable bandwidth                  |
//! | `we_n{n}_i{i}`, `wl_i{i}` | continuous | overage above the basic capacity    |
//!
//! All continuous variables are nonnegative with no upper bound.
//!
//! # Start and solution files
//!
//! Both are plain text. Lines starting with `#` are comments, except a line
//! `# Objective value = <number>`, which carries the objective. Every other
//! nonblank line is `<variable name> <value>`.

mod lp;
mod model;
mod solution;

pub use lp::{parse_lp, write_lp, write_lp_file, ParsedConstraint, ParsedLp};
pub use model::{linearize, Constraint, MilpLayout, MilpModel, Sense, VarKind, Variable};
pub use solution::{
    assignment_for_scheme, read_solution, read_solution_file, write_warmstart, write_warmstart_file, SolutionImport,
};
