//! Exact analysis at q a primitive m-th root of unity: the period-block
//! matrix M, its trace/determinant/eigen data, classification of the
//! convergence behaviour, limit values G(q) and H(q), Schur/Zhang
//! cross-checks, the Table-1 progression checks, and the constructive
//! constants of the growth lemmas.

mod block;
mod constants;
mod hvalue;
mod table;

pub use block::{
    block_matrix, block_power_closed_form, classify, power_times_vector, verify_eigenvectors,
    verify_rec2, BlockAnalysis, BlockMatrix, Classification, QuadExt, RootOfUnity,
};
pub use constants::{growth_constants, CConstants, ConstantsReport, DConstants, QuadRat};
pub use hvalue::{h_value, schur_value, ExactH, HValueTable, SchurValue};
pub use table::{table_check, table_data_for, GgObservation, TableData, TableReport};
