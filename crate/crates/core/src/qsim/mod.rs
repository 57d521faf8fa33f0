//! Dense gate-level simulation, ansatz construction and Clifford substitution.

pub mod ansatz;
pub mod circuit;
pub mod clifford;
pub mod gate;
pub mod simulate;
pub mod state;

pub use ansatz::{build_hea, build_uccsd, build_uccsd_circuit, hartree_fock_circuit, uccsd_excitations, Excitation};
pub use circuit::{Circuit, Layer, LayerKind};
pub use clifford::{cliffordize, cliffordize_with_report, nearest_clifford, Substitution};
pub use gate::{Gate, GateKind, ParamRef};
pub use simulate::{apply, run_pure, simulate, NoiseMode, NoiseModel};
pub use state::QuantumState;
