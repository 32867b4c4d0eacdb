//! Data-layer rules: classical repetition bits corrected by Toom's rule and
//! Pauli-frame simulation of small measurement-free gadgets.

mod code;
mod conditions;
pub mod gadget;
mod pauli;
mod readout;

pub use code::{errors_of_weight, CodeKind, CodeSpec, DecodeResult, PauliOp};
pub use conditions::{
    check_gadget_conditions, exrec_correctness, for_each_fault_set, single_faults, ConditionReport, Counterexample,
    ExRecCheck, DEFAULT_CASE_CAP,
};
pub use pauli::{run_gadget, GadgetCircuit, Gate, PauliFault, PauliFrameState, Role};
pub use readout::{classical_data_step, logical_readout, Readout};
