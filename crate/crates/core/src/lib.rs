//! Enumeration and classification of small stabilizer codes up to local
//! Clifford equivalence and qubit permutation.
//!
//! Groups are phase-free: a Pauli on `n` qubits is a `2n`-bit word
//! `[x | z]`, and a stabilizer group is a list of independent, pairwise
//! commuting words.

pub mod canon;
pub mod db;
pub mod f2;
pub mod pauli;
pub mod properties;
pub mod search;
pub mod transform;
pub mod verify;

pub use canon::{are_equivalent, aut_size, class_key, CanonicalKey};
pub use db::{CodeRecord, Query};
pub use pauli::{parse_generator_file, Letter, PauliError, PauliOp, StabGroup};
pub use search::{enumerate_classes, ClassEntry, Enumeration, GraphState};
pub use transform::{LCPerm, LetterPerm, LocalClifford, QubitPerm};
