//! The basis change `T: |0..0, g⟩ ↦ ψ(g)` on the token register.

use std::f64::consts::PI;

use crate::codec::{Decoded, TokenSet, PERP_TOL};
use crate::error::{Error, Result};
use crate::isotypic::MAX_PROJECTOR_DIM;
use crate::linalg::{hadamard, Matrix, C64, ONE, ZERO};
use crate::statevec::{Outcome, StateVector};

use super::synth::complete_unitary;
use super::{ceil_log2, CircuitPlan, Gate, GateKind, Layout};

/// Dense `T` on `r` token qudits. The control register is the last
/// `log2(labels.len())` of them, so basis index `code` is `|0..0, code⟩`;
/// its column is `ψ(label)`. Unused columns are completed arbitrarily.
pub fn t_direct_matrix(tokens: &TokenSet, labels: &[Option<usize>]) -> Result<Matrix> {
    let dim = tokens.fiducial().len();
    if dim > MAX_PROJECTOR_DIM {
        return Err(Error::ResourceLimit(format!(
            "dense T of dimension {dim} exceeds {MAX_PROJECTOR_DIM}"
        )));
    }
    if labels.len() > dim {
        return Err(Error::ShapeMismatch(format!(
            "{} control values do not fit in dimension {dim}",
            labels.len()
        )));
    }
    let mut first = Vec::new();
    let mut order = Vec::new();
    for (code, label) in labels.iter().enumerate() {
        if let Some(g) = *label {
            first.push(tokens.token(g).amplitudes().to_vec());
            order.push(code);
        }
    }
    let completed = complete_unitary(first, dim)?;
    // place the token columns at their codes, fill the rest in order
    let mut columns: Vec<Option<Vec<C64>>> = vec![None; dim];
    for (k, &code) in order.iter().enumerate() {
        columns[code] = Some(completed.column(k));
    }
    let mut spare = (order.len()..dim).map(|k| completed.column(k));
    let columns: Vec<Vec<C64>> = columns
        .into_iter()
        .map(|c| c.unwrap_or_else(|| spare.next().expect("column count")))
        .collect();
    Ok(Matrix::from_columns(&columns))
}

/// One dense gate on the token wires; costed at `d^r`.
pub fn apply_t_direct(
    tokens: &TokenSet,
    labels: &[Option<usize>],
    layout: &Layout,
) -> Result<CircuitPlan> {
    if layout.token.len() != tokens.r() {
        return Err(Error::ShapeMismatch(format!(
            "layout has {} token wires, r = {}",
            layout.token.len(),
            tokens.r()
        )));
    }
    let matrix = t_direct_matrix(tokens, labels)?;
    let cost = matrix.rows();
    Ok(CircuitPlan {
        gates: vec![Gate::new(
            GateKind::Unitary {
                wires: layout.token.clone(),
                matrix,
            },
            cost,
        )],
        layout: layout.clone(),
        control_labels: labels.to_vec(),
    })
}

/// QFT `|x⟩ ↦ N^{-1/2} Σ_y e^{2πi xy/N} |y⟩` without the final swaps: on
/// output `wires[k]` holds the bit of `y` with weight `2^k`.
pub fn qft_no_swap(wires: &[usize]) -> Vec<Gate> {
    let n = wires.len();
    let mut gates = Vec::new();
    for k in 0..n {
        gates.push(Gate::unit(GateKind::Single {
            target: wires[k],
            matrix: hadamard(),
        }));
        for l in k + 1..n {
            let angle = 2.0 * PI / (1u64 << (l - k + 1)) as f64;
            gates.push(Gate::unit(GateKind::Controlled {
                controls: vec![(wires[l], 1)],
                targets: vec![wires[k]],
                matrix: Matrix::diagonal(&[ONE, C64::from_polar(1.0, angle)]),
                via_ancilla: false,
            }));
        }
    }
    gates
}

/// Token wires of group `A_j` (`2^{j-1}` qubits); groups run
/// `A_{r'}, ..., A_1` from the first token wire.
fn weight_groups(token: &[usize], r_prime: usize) -> Vec<Vec<usize>> {
    let mut groups = vec![Vec::new(); r_prime + 1];
    let mut next = 0;
    for j in (1..=r_prime).rev() {
        let size = 1 << (j - 1);
        groups[j] = token[next..next + size].to_vec();
        next += size;
    }
    groups
}

/// CNOT network moving `|j⟩|0⟩` to `|0⟩|A(j)⟩`: control bit `j_k` (on
/// `bit_wires[k-1]`) is copied onto every qubit of `A_k`, then one qubit of
/// `A_k` clears `j_k`. `r + r'` CNOTs.
pub fn register_network(layout: &Layout, bit_wires: &[usize]) -> Result<CircuitPlan> {
    let rp = bit_wires.len();
    let r = (1usize << rp) - 1;
    if layout.token.len() != r {
        return Err(Error::ShapeMismatch(format!(
            "register network for {rp} bits needs {r} token wires, layout has {}",
            layout.token.len()
        )));
    }
    let groups = weight_groups(&layout.token, rp);
    let mut gates = Vec::new();
    for k in 1..=rp {
        for &t in &groups[k] {
            gates.push(Gate::unit(GateKind::Cnot {
                control: bit_wires[k - 1],
                target: t,
            }));
        }
    }
    for k in 1..=rp {
        gates.push(Gate::unit(GateKind::Cnot {
            control: groups[k][0],
            target: bit_wires[k - 1],
        }));
    }
    Ok(CircuitPlan {
        gates,
        layout: layout.clone(),
        control_labels: (0..1 << rp).map(Some).collect(),
    })
}

/// `N^{-1/2} Σ_λ |A(λ)⟩` on `N − 1` qubits: the fiducial the cyclic `T`
/// produces. `|A(λ)⟩` has weight `λ`, so it lies in irrep `λ` of
/// `diag(1, ω^g)^{⊗(N-1)}`.
pub fn register_fiducial(n: usize) -> Result<StateVector> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::ShapeMismatch(format!(
            "register fiducial needs N a power of two, got {n}"
        )));
    }
    let rp = ceil_log2(n);
    let r = n - 1;
    let token: Vec<usize> = (0..r).collect();
    let groups = weight_groups(&token, rp);
    let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut amps = vec![ZERO; 1 << r];
    for lambda in 0..n {
        let mut idx = 0;
        for (k, group) in groups.iter().enumerate().take(rp + 1).skip(1) {
            if (lambda >> (k - 1)) & 1 == 1 {
                for &w in group {
                    idx |= 1 << (r - 1 - w);
                }
            }
        }
        amps[idx] = amp;
    }
    StateVector::from_amplitudes(2, r, amps)
}

/// `T` for `Z_N`, `N = 2^{r'}`, qubits: QFT on the control register, then
/// the register network. Needs `layout.token.len() == N − 1`.
pub fn synth_t_cyclic(n: usize, layout: &Layout) -> Result<CircuitPlan> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::ShapeMismatch(format!(
            "cyclic T needs N a power of two, got {n}"
        )));
    }
    let rp = ceil_log2(n);
    if layout.control.len() != rp {
        return Err(Error::ShapeMismatch(format!(
            "layout has {} control wires, need {rp}",
            layout.control.len()
        )));
    }
    let mut gates = qft_no_swap(&layout.control);
    // after the swap-free QFT the weight-2^{k-1} bit sits on control[k-1]
    let net = register_network(layout, &layout.control)?;
    gates.extend(net.gates);
    Ok(CircuitPlan {
        gates,
        layout: layout.clone(),
        control_labels: (0..n).map(Some).collect(),
    })
}

/// Decoding through the circuit: `T†` on the token qudits, a computational
/// measurement of the control code, then `U_{g^{-1}}` on every message qudit.
/// Outcome order follows group elements, so a seed gives the same outcome as
/// the token-projector decoder.
pub fn decode_via_t_dagger(
    tokens: &TokenSet,
    labels: &[Option<usize>],
    received: &StateVector,
    seed: u64,
) -> Result<Decoded> {
    let r = tokens.r();
    let t = t_direct_matrix(tokens, labels)?;
    let mut state = received.clone();
    let token_wires: Vec<usize> = (0..r).collect();
    state.apply_block(&t.adjoint(), &token_wires)?;
    let dim = tokens.fiducial().len();
    let order = tokens.group_order();
    let mut code_of = vec![usize::MAX; order];
    for (code, label) in labels.iter().enumerate() {
        if let Some(g) = *label {
            code_of[g] = code;
        }
    }
    let kets: Vec<Vec<C64>> = code_of
        .iter()
        .map(|&c| {
            let mut e = vec![ZERO; dim];
            e[c] = ONE;
            e
        })
        .collect();
    let rec = state.project_measure(&token_wires, &kets, seed)?;
    let g = match rec.outcome {
        Outcome::Index(g) if rec.perp_probability <= PERP_TOL => g,
        _ => {
            return Err(Error::PerpOutcome {
                probability: rec.perp_probability,
            })
        }
    };
    let rest = state.contract(&token_wires, &kets[g])?;
    let m = received.qudits() - r;
    let mut message = StateVector::normalized(tokens.d(), m, rest)?;
    let rep = tokens.rep();
    let inv = rep.matrix(rep.group().inverse(g));
    for q in 0..m {
        message.apply_local(inv, q)?;
    }
    Ok(Decoded {
        message,
        outcome: g,
        probability: rec.probability,
        seed,
    })
}
