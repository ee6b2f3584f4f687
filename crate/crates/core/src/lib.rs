//! Numerical laboratory for bipartite quantum correlations of 2⊗d states.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`] – dense complex matrix helpers and the two small eigensolvers
//!   (closed-form 3×3 symmetric, cyclic Jacobi for Hermitian matrices).
//! * [`basis`], [`state`], [`bloch`], [`random`] – density matrices, operator
//!   bases, Bloch decomposition and seeded random-state sampling.
//! * [`measures`] – geometric discord (closed form and eigenvalue route), its
//!   lower bound `Q`, negativity of quantumness and entanglement negativity.
//! * [`protocol`] – local-rotation + CNOT readout of the correlation matrix.
//! * [`channels`] and [`trajectory`] – generalized amplitude damping and phase
//!   damping evolution of two-qubit states, and sudden-transition detection.
//! * [`state_file`] – the JSON state file format.

pub mod basis;
pub mod bloch;
pub mod channels;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod protocol;
pub mod random;
pub mod state;
pub mod state_file;
pub mod trajectory;

pub use basis::{gellmann_basis, pauli_basis, OperatorBasis};
pub use bloch::{bloch_compose, bloch_decompose, BlochRecord};
pub use channels::{
    apply_two_qubit_channel, evolve, gad_kraus, j_coupling_unitary, pd_kraus, pseudo_epr_transform, KrausSet,
    RelaxationParams,
};
pub use error::{QcorrError, Result};
pub use linalg::{hermitian_eigenvalues, sym3_eigenvalues, CMatrix};
pub use measures::{
    deviation_report, full_report, geometric_discord_closed, geometric_discord_eig, negativity,
    negativity_of_quantumness_bell, q_lower_bound, report_from_record, s_matrix, scaled_record, CorrelationReport,
    ReportOptions, SMatrix, Scale, Units,
};
pub use protocol::{
    cnot_gate, direct_correlation, direct_local, measurement_budget, rotation_gate, run_direct_protocol, Axis,
    MeasurementRecord, RotationSpec,
};
pub use random::random_density_matrix;
pub use state::{BellDiagonalState, BellMode, DensityMatrix, DeviationState};
pub use state_file::{LoadedState, StateFile};
pub use trajectory::{
    detect_transition, detect_transitions, make_trajectory, TimeGrid, Trajectory, TrajectoryPoint, Transition,
};
