//! Shared fixtures for the benchmark targets.

use synmom::codes::{self, Code};
use synmom::noise::SupportModel;

/// The five-qubit code with independent per-qubit channels at fixed
/// rates, the standard benchmark workload.
pub fn planted_five_qubit() -> (Code, SupportModel) {
    let code = codes::five_qubit();
    let mut model = SupportModel::new(code.shape());
    for q in 0..5 {
        model
            .add_pauli_channel(q, [0.9, 0.05, 0.03, 0.02])
            .expect("valid channel");
    }
    (code, model)
}
