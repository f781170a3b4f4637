//! Gate-level encoding circuits: the controlled-unitary network `W`, the basis
//! change `T` to token states, gate accounting and logical depth.

mod pipeline;
mod report;
mod synth;
mod tstage;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{pauli_x, Matrix, C64};
use crate::statevec::StateVector;

pub use pipeline::{build_encoding_circuit, EncodingCircuit, TStage};
pub use report::{gate_count_report, GateCountReport, PathCount};
pub use synth::{
    general_count_formula, general_depth_formula, general_unfused_count, synth_w_abelian,
    synth_w_cyclic, synth_w_general, uniform_control_prep, abelian_bound,
};
pub use tstage::{
    apply_t_direct, decode_via_t_dagger, qft_no_swap, register_fiducial, register_network,
    synth_t_cyclic, t_direct_matrix,
};

/// `40 (k - 2)` elementary gates for the pair of `k`-controlled NOTs, clamped
/// at zero for `k < 2`.
pub fn toffoli_chain_cost(controls: usize) -> usize {
    40 * controls.saturating_sub(2)
}

/// `⌈log2 n⌉` (0 for `n <= 1`).
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    /// One-qudit unitary.
    Single { target: usize, matrix: Matrix },
    /// `matrix` on `targets` when every control wire holds its value.
    /// `via_ancilla` marks gates fed by a preceding Toffoli-chain marker.
    Controlled {
        controls: Vec<(usize, usize)>,
        targets: Vec<usize>,
        matrix: Matrix,
        via_ancilla: bool,
    },
    Cnot { control: usize, target: usize },
    /// X on every listed wire, counted as one basis-change layer.
    Flip { wires: Vec<usize> },
    /// Stand-in for the compute/uncompute `r'`-controlled NOT chains onto an
    /// ancilla; a no-op in simulation because the following controlled gates
    /// carry the full control pattern.
    ToffoliChain { controls: Vec<usize> },
    /// Diagonal phases on a block of wires.
    Phase { wires: Vec<usize>, phases: Vec<C64> },
    /// Arbitrary unitary on a block of wires (used for `T`).
    Unitary { wires: Vec<usize>, matrix: Matrix },
    /// Prepares `state` from `|0...0⟩` on `wires` (completed to a unitary).
    Prepare { wires: Vec<usize>, matrix: Matrix },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub cost: usize,
    pub duration: usize,
}

impl Gate {
    pub fn new(kind: GateKind, cost: usize) -> Self {
        Gate {
            kind,
            cost,
            duration: cost,
        }
    }

    pub fn unit(kind: GateKind) -> Self {
        Gate::new(kind, 1)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            GateKind::Single { .. } => "single",
            GateKind::Controlled { .. } => "controlled",
            GateKind::Cnot { .. } => "cnot",
            GateKind::Flip { .. } => "flip",
            GateKind::ToffoliChain { .. } => "toffoli_chain",
            GateKind::Phase { .. } => "phase",
            GateKind::Unitary { .. } => "unitary",
            GateKind::Prepare { .. } => "prepare",
        }
    }

    /// (wires read, wires written); `ancilla` is the virtual ancilla wire.
    fn access(&self, ancilla: usize) -> (Vec<usize>, Vec<usize>) {
        match &self.kind {
            GateKind::Single { target, .. } => (vec![], vec![*target]),
            GateKind::Controlled {
                controls,
                targets,
                via_ancilla,
                ..
            } => {
                let mut reads: Vec<usize> = controls.iter().map(|c| c.0).collect();
                if *via_ancilla {
                    reads.push(ancilla);
                }
                (reads, targets.clone())
            }
            GateKind::Cnot { control, target } => (vec![*control], vec![*target]),
            GateKind::Flip { wires } => (vec![], wires.clone()),
            GateKind::ToffoliChain { controls } => (controls.clone(), vec![ancilla]),
            GateKind::Phase { wires, .. }
            | GateKind::Unitary { wires, .. }
            | GateKind::Prepare { wires, .. } => (vec![], wires.clone()),
        }
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        match &self.kind {
            GateKind::Single { target, matrix } => state.apply_local(matrix, *target),
            GateKind::Controlled {
                controls,
                targets,
                matrix,
                ..
            } => state.apply_controlled(controls, matrix, targets),
            GateKind::Cnot { control, target } => {
                state.apply_controlled(&[(*control, 1)], &pauli_x(), &[*target])
            }
            GateKind::Flip { wires } => {
                let x = pauli_x();
                for &w in wires {
                    state.apply_local(&x, w)?;
                }
                Ok(())
            }
            GateKind::ToffoliChain { .. } => Ok(()),
            GateKind::Phase { wires, phases } => state.apply_block(&Matrix::diagonal(phases), wires),
            GateKind::Unitary { wires, matrix } | GateKind::Prepare { wires, matrix } => {
                state.apply_block(matrix, wires)
            }
        }
    }

    /// Classical action on a basis index for permutation gates (CNOT, flips,
    /// markers); `None` for anything else.
    pub fn apply_to_bits(&self, bits: &mut [bool]) -> Option<()> {
        match &self.kind {
            GateKind::Cnot { control, target } => {
                if bits[*control] {
                    bits[*target] = !bits[*target];
                }
                Some(())
            }
            GateKind::Flip { wires } => {
                for &w in wires {
                    bits[w] = !bits[w];
                }
                Some(())
            }
            GateKind::ToffoliChain { .. } => Some(()),
            _ => None,
        }
    }

    pub fn export(&self) -> GateExport {
        let mat = |m: &Matrix| {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect()
        };
        let (controls, targets, matrix) = match &self.kind {
            GateKind::Single { target, matrix } => (vec![], vec![*target], Some(mat(matrix))),
            GateKind::Controlled {
                controls,
                targets,
                matrix,
                ..
            } => (controls.clone(), targets.clone(), Some(mat(matrix))),
            GateKind::Cnot { control, target } => (vec![(*control, 1)], vec![*target], None),
            GateKind::Flip { wires } => (vec![], wires.clone(), None),
            GateKind::ToffoliChain { controls } => {
                (controls.iter().map(|&c| (c, 1)).collect(), vec![], None)
            }
            GateKind::Phase { wires, phases } => (
                vec![],
                wires.clone(),
                Some(mat(&Matrix::diagonal(phases))),
            ),
            GateKind::Unitary { wires, matrix } | GateKind::Prepare { wires, matrix } => {
                (vec![], wires.clone(), Some(mat(matrix)))
            }
        };
        GateExport {
            kind: self.name(),
            controls,
            targets,
            matrix,
            cost: self.cost,
            duration: self.duration,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GateExport {
    pub kind: &'static str,
    pub controls: Vec<(usize, usize)>,
    pub targets: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    pub cost: usize,
    pub duration: usize,
}

/// Wire assignment of a plan. `control` is the register holding group labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Layout {
    pub wires: usize,
    pub control: Vec<usize>,
    pub token: Vec<usize>,
    pub message: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Path {
    General,
    Abelian,
    Cyclic,
}

impl std::str::FromStr for Path {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Path::General),
            "abelian" => Ok(Path::Abelian),
            "cyclic" => Ok(Path::Cyclic),
            other => Err(Error::Parse(format!("unknown path '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CircuitPlan {
    pub gates: Vec<Gate>,
    pub layout: Layout,
    /// Group element encoded by each control-register value (`None` if unused).
    pub control_labels: Vec<Option<usize>>,
}

impl CircuitPlan {
    pub fn total_count(&self) -> usize {
        self.gates.iter().map(|g| g.cost).sum()
    }

    pub fn count_of(&self, name: &str) -> usize {
        self.gates
            .iter()
            .filter(|g| g.name() == name)
            .map(|g| g.cost)
            .sum()
    }

    pub fn gates_named(&self, name: &str) -> usize {
        self.gates.iter().filter(|g| g.name() == name).count()
    }

    /// Greedy as-soon-as-possible layering. Controls are shared reads, so
    /// gates that only share control wires run in parallel.
    pub fn logical_depth(&self) -> usize {
        let ancilla = self.layout.wires;
        let mut last_write = vec![0usize; ancilla + 1];
        let mut last_read = vec![0usize; ancilla + 1];
        let mut depth = 0;
        for gate in &self.gates {
            let (reads, writes) = gate.access(ancilla);
            let start = reads
                .iter()
                .map(|&w| last_write[w])
                .chain(writes.iter().map(|&w| last_write[w].max(last_read[w])))
                .max()
                .unwrap_or(0);
            let end = start + gate.duration;
            for &w in &reads {
                last_read[w] = last_read[w].max(end);
            }
            for &w in &writes {
                last_write[w] = end;
            }
            depth = depth.max(end);
        }
        depth
    }

    pub fn simulate(&self, state: &mut StateVector) -> Result<()> {
        if state.qudits() != self.layout.wires {
            return Err(Error::ShapeMismatch(format!(
                "plan has {} wires, state has {} qudits",
                self.layout.wires,
                state.qudits()
            )));
        }
        for g in &self.gates {
            g.apply(state)?;
        }
        Ok(())
    }

    /// Runs a plan made only of permutation gates on a bit string.
    pub fn simulate_bits(&self, bits: &mut [bool]) -> Result<()> {
        for g in &self.gates {
            g.apply_to_bits(bits).ok_or_else(|| {
                Error::ShapeMismatch(format!("gate '{}' is not a classical permutation", g.name()))
            })?;
        }
        Ok(())
    }

    /// Appends the gates of `other`, which must share the layout.
    pub fn then(mut self, other: CircuitPlan) -> Result<CircuitPlan> {
        if other.layout.wires != self.layout.wires {
            return Err(Error::ShapeMismatch("plans have different wire counts".into()));
        }
        self.gates.extend(other.gates);
        Ok(self)
    }

    pub fn export(&self) -> Vec<GateExport> {
        self.gates.iter().map(Gate::export).collect()
    }
}
