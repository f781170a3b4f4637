//! Whole encoders: uniform preparation, `W`, then `T`.

use serde::Serialize;

use crate::codec::{encode, TokenSet};
use crate::error::{Error, Result};
use crate::group::abelian_basis;
use crate::linalg::{C64, ONE, ZERO};
use crate::rep::{CharacterTable, UnitaryRep};
use crate::statevec::StateVector;

use super::synth::{synth_w_abelian, synth_w_cyclic, synth_w_general, uniform_control_prep};
use super::tstage::{apply_t_direct, register_fiducial, synth_t_cyclic};
use super::{ceil_log2, CircuitPlan, Layout, Path};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TStage {
    /// Dense unitary onto the canonical tokens.
    Direct,
    /// QFT plus CNOT network (`Z_N`, `N = 2^k`, qubits).
    Register,
}

impl std::str::FromStr for TStage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(TStage::Direct),
            "register" => Ok(TStage::Register),
            other => Err(Error::Parse(format!("unknown T stage '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EncodingCircuit {
    pub path: Path,
    pub t_stage: TStage,
    /// Tokens the circuit produces; the register stage has its own fiducial.
    pub tokens: TokenSet,
    pub prep: CircuitPlan,
    pub w: CircuitPlan,
    pub t: CircuitPlan,
}

fn single_generator(rep: &UnitaryRep) -> Result<usize> {
    let gens = abelian_basis(rep.group())?;
    match gens.as_slice() {
        [g] => Ok(*g),
        [] => Err(Error::BadGenerators("trivial group has no generator".into())),
        _ => Err(Error::BadGenerators(format!(
            "group needs {} generators, the cyclic path needs one",
            gens.len()
        ))),
    }
}

pub fn build_encoding_circuit(
    rep: &UnitaryRep,
    table: &CharacterTable,
    m: usize,
    path: Path,
    t_stage: TStage,
) -> Result<EncodingCircuit> {
    if rep.dim() != 2 {
        return Err(Error::UnsupportedDimension(rep.dim()));
    }
    let order = rep.group().order();
    let rp = ceil_log2(order);
    let (tokens, layout) = match t_stage {
        TStage::Direct => {
            let tokens = TokenSet::canonical(rep, table)?;
            let bits = match path {
                Path::Abelian => abelian_basis(rep.group())?
                    .iter()
                    .map(|&g| ceil_log2(rep.group().element_order(g)))
                    .sum(),
                _ => rp,
            };
            let layout = Layout::embedded(tokens.r(), bits, m)?;
            (tokens, layout)
        }
        TStage::Register => {
            if path != Path::Cyclic {
                return Err(Error::ShapeMismatch(
                    "the register T stage pairs with the cyclic path".into(),
                ));
            }
            let tokens = TokenSet::build(rep, register_fiducial(order)?)?;
            (tokens, Layout::separate(rp, order - 1, m))
        }
    };
    let w = match path {
        Path::General => synth_w_general(rep, m, &layout)?,
        Path::Abelian => synth_w_abelian(rep, m, &layout, &abelian_basis(rep.group())?)?,
        Path::Cyclic => synth_w_cyclic(rep, m, &layout, single_generator(rep)?)?,
    };
    let prep = uniform_control_prep(&layout, &w.control_labels)?;
    let t = match t_stage {
        TStage::Direct => apply_t_direct(&tokens, &w.control_labels, &layout)?,
        TStage::Register => {
            // the register T reads j as the exponent of the generator
            if w.control_labels.iter().enumerate().any(|(j, l)| *l != Some(j) && j < order) {
                return Err(Error::BadGenerators(
                    "register T needs element j on control value j".into(),
                ));
            }
            synth_t_cyclic(order, &layout)?
        }
    };
    Ok(EncodingCircuit {
        path,
        t_stage,
        tokens,
        prep,
        w,
        t,
    })
}

impl EncodingCircuit {
    pub fn layout(&self) -> &Layout {
        &self.w.layout
    }

    pub fn full_plan(&self) -> Result<CircuitPlan> {
        self.prep.clone().then(self.w.clone())?.then(self.t.clone())
    }

    /// Runs the circuit on `|0...0⟩ ⊗ φ` and returns the token+message state.
    /// A separate control register must come back to `|0⟩`.
    pub fn run(&self, message: &StateVector) -> Result<StateVector> {
        let layout = self.layout();
        if message.qudits() != layout.message.len() || message.d() != 2 {
            return Err(Error::ShapeMismatch(format!(
                "message has {} qudits of d = {}, circuit expects {} qubits",
                message.qudits(),
                message.d(),
                layout.message.len()
            )));
        }
        let head = layout.wires - layout.message.len();
        let mut state = StateVector::basis(2, head, 0)?.tensor(message)?;
        self.full_plan()?.simulate(&mut state)?;
        let extra: Vec<usize> = layout
            .control
            .iter()
            .copied()
            .filter(|w| !layout.token.contains(w))
            .collect();
        if extra.is_empty() {
            return Ok(state);
        }
        let mut zero = vec![ZERO; 1 << extra.len()];
        zero[0] = ONE;
        let rest = state.contract(&extra, &zero)?;
        let kept = layout.wires - extra.len();
        let norm = crate::linalg::norm(&rest);
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::BadNormalization(format!(
                "control register not returned to |0⟩ (weight {norm:.3e})"
            )));
        }
        StateVector::from_amplitudes(2, kept, rest)
    }

    /// `|⟨encode(φ)|circuit(φ)⟩|²` and the complex overlap.
    pub fn verify(&self, message: &StateVector) -> Result<(f64, C64)> {
        let got = self.run(message)?;
        let want = encode(&self.tokens, message)?;
        let ov = want.inner(&got)?;
        Ok((ov.norm_sqr(), ov))
    }
}
