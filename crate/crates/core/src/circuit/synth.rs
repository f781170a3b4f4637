//! Synthesis of `W = Σ_g |g⟩⟨g| ⊗ U_g^{⊗m}` on a binary control register.

use crate::error::{Error, Result};
use crate::linalg::{hadamard, gram_schmidt_step, Matrix, C64, ONE, ZERO};
use crate::rep::UnitaryRep;

use super::{ceil_log2, toffoli_chain_cost, CircuitPlan, Gate, GateKind, Layout};

const PHASE_TOL: f64 = 1e-10;

impl Layout {
    /// Control register inside the token register (its last `control_bits`
    /// qubits), message after the tokens.
    pub fn embedded(r: usize, control_bits: usize, m: usize) -> Result<Layout> {
        if control_bits > r {
            return Err(Error::ShapeMismatch(format!(
                "{control_bits} control bits do not fit in {r} token qubits"
            )));
        }
        Ok(Layout {
            wires: r + m,
            control: (r - control_bits..r).collect(),
            token: (0..r).collect(),
            message: (r..r + m).collect(),
        })
    }

    /// Separate control register, then tokens, then message.
    pub fn separate(control_bits: usize, r: usize, m: usize) -> Layout {
        Layout {
            wires: control_bits + r + m,
            control: (0..control_bits).collect(),
            token: (control_bits..control_bits + r).collect(),
            message: (control_bits + r..control_bits + r + m).collect(),
        }
    }

    /// Control register and message only; enough for counting.
    pub fn minimal(control_bits: usize, m: usize) -> Layout {
        Layout::separate(control_bits, 0, m)
    }
}

/// `|G| (41 r' − 80 + m)` with the fused flip layer costed at `r'`.
pub fn general_count_formula(order: usize, r_prime: usize, m: usize) -> i64 {
    order as i64 * (41 * r_prime as i64 - 80 + m as i64)
}

/// Same count with two separate flip layers per block.
pub fn general_unfused_count(order: usize, r_prime: usize, m: usize) -> i64 {
    order as i64 * (42 * r_prime as i64 - 80 + m as i64)
}

/// `|G| (41 r' − 79)`: flip, chain, then the `m` parallel controlled gates.
pub fn general_depth_formula(order: usize, r_prime: usize) -> i64 {
    order as i64 * (41 * r_prime as i64 - 79)
}

/// `Σ_j L_j (f(⌈log2 L_j⌉) + m)` with `f(k) = 40 max(k − 2, 0)`.
pub fn abelian_bound(orders: &[usize], m: usize) -> usize {
    orders
        .iter()
        .map(|&l| l * (toffoli_chain_cost(ceil_log2(l)) + m))
        .sum()
}

fn require_qubits(rep: &UnitaryRep) -> Result<()> {
    if rep.dim() != 2 {
        return Err(Error::UnsupportedDimension(rep.dim()));
    }
    Ok(())
}

fn check_layout(layout: &Layout, control_bits: usize, m: usize) -> Result<()> {
    if layout.control.len() != control_bits || layout.message.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "layout has {} control and {} message wires, synthesis needs {control_bits} and {m}",
            layout.control.len(),
            layout.message.len()
        )));
    }
    Ok(())
}

/// Bits of `value` on `wires`, most significant first.
fn pattern(wires: &[usize], value: usize) -> Vec<(usize, usize)> {
    let n = wires.len();
    wires
        .iter()
        .enumerate()
        .map(|(k, &w)| (w, (value >> (n - 1 - k)) & 1))
        .collect()
}

fn flip_layer(wires: &[usize], mask: usize, cost: usize) -> Option<Gate> {
    let n = wires.len();
    let flipped: Vec<usize> = (0..n)
        .filter(|k| (mask >> (n - 1 - k)) & 1 == 1)
        .map(|k| wires[k])
        .collect();
    if flipped.is_empty() {
        return None;
    }
    Some(Gate::new(GateKind::Flip { wires: flipped }, cost))
}

/// One block per element: a fused X layer brings the register value `i` to
/// all ones, a Toffoli chain stands in for the `r'`-controlled ancilla, then
/// `m` controlled `U_{g_i}`.
pub fn synth_w_general(rep: &UnitaryRep, m: usize, layout: &Layout) -> Result<CircuitPlan> {
    require_qubits(rep)?;
    let order = rep.group().order();
    let rp = ceil_log2(order);
    check_layout(layout, rp, m)?;
    let ctrl = &layout.control;
    let full = (1usize << rp) - 1;
    let mut gates = Vec::new();
    let all_ones: Vec<(usize, usize)> = ctrl.iter().map(|&w| (w, 1)).collect();
    let chain = toffoli_chain_cost(rp);
    for i in 0..order {
        let mask = if i == 0 { full } else { (i - 1) ^ i };
        gates.extend(flip_layer(ctrl, mask, rp));
        if chain > 0 {
            gates.push(Gate::new(
                GateKind::ToffoliChain {
                    controls: ctrl.clone(),
                },
                chain,
            ));
        }
        for &t in &layout.message {
            gates.push(Gate::unit(GateKind::Controlled {
                controls: all_ones.clone(),
                targets: vec![t],
                matrix: rep.matrix(i).clone(),
                via_ancilla: chain > 0,
            }));
        }
    }
    // undo the accumulated flips ~(|G|-1); nothing left for |G| = 2^r'
    gates.extend(flip_layer(ctrl, !(order - 1) & full, rp));
    let labels = (0..1usize << rp)
        .map(|c| (c < order).then_some(c))
        .collect();
    Ok(CircuitPlan {
        gates,
        layout: layout.clone(),
        control_labels: labels,
    })
}

/// Generators `g_j` of orders `L_j`, each with its own `⌈log2 L_j⌉`-bit
/// segment holding `l_j`; controlled `U_{g_j}^l` for every `l ≥ 1`.
pub fn synth_w_abelian(
    rep: &UnitaryRep,
    m: usize,
    layout: &Layout,
    generators: &[usize],
) -> Result<CircuitPlan> {
    require_qubits(rep)?;
    let group = rep.group();
    if !group.is_abelian() {
        return Err(Error::NotAbelian);
    }
    let orders: Vec<usize> = generators.iter().map(|&g| group.element_order(g)).collect();
    let bits: Vec<usize> = orders.iter().map(|&l| ceil_log2(l)).collect();
    let total_bits: usize = bits.iter().sum();
    check_layout(layout, total_bits, m)?;
    let labels = abelian_labels(rep, generators, &orders, &bits)?;

    let mut gates = Vec::new();
    let mut offset = 0;
    for (j, &g) in generators.iter().enumerate() {
        let seg = &layout.control[offset..offset + bits[j]];
        offset += bits[j];
        let chain = toffoli_chain_cost(bits[j]);
        for l in 1..orders[j] {
            if chain > 0 {
                gates.push(Gate::new(
                    GateKind::ToffoliChain {
                        controls: seg.to_vec(),
                    },
                    chain,
                ));
            }
            let u = rep.matrix(g).pow(l as u64);
            for &t in &layout.message {
                gates.push(Gate::unit(GateKind::Controlled {
                    controls: pattern(seg, l),
                    targets: vec![t],
                    matrix: u.clone(),
                    via_ancilla: chain > 0,
                }));
            }
        }
    }
    let mut plan = CircuitPlan {
        gates,
        layout: layout.clone(),
        control_labels: labels,
    };
    add_phase_correction(rep, &mut plan)?;
    Ok(plan)
}

fn abelian_labels(
    rep: &UnitaryRep,
    generators: &[usize],
    orders: &[usize],
    bits: &[usize],
) -> Result<Vec<Option<usize>>> {
    let group = rep.group();
    let total_bits: usize = bits.iter().sum();
    if total_bits > 24 {
        return Err(Error::ResourceLimit(format!("{total_bits} control bits")));
    }
    let mut labels = vec![None; 1 << total_bits];
    let mut seen = vec![false; group.order()];
    for (code, label) in labels.iter_mut().enumerate() {
        let mut shift = total_bits;
        let mut g = group.identity();
        let mut valid = true;
        for (j, &gen) in generators.iter().enumerate() {
            shift -= bits[j];
            let l = (code >> shift) & ((1 << bits[j]) - 1);
            if l >= orders[j] {
                valid = false;
                break;
            }
            g = group.mul(g, group.pow(gen, l));
        }
        if valid {
            if seen[g] {
                return Err(Error::BadGenerators(format!(
                    "element {} has two exponent decompositions",
                    group.label(g)
                )));
            }
            seen[g] = true;
            *label = Some(g);
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::BadGenerators("generators do not span the group".into()));
    }
    Ok(labels)
}

/// Controlled `U^{2^{i-1}}` from control bit `i` onto each message qubit;
/// value `j` in the register then applies `U^j`.
pub fn synth_w_cyclic(
    rep: &UnitaryRep,
    m: usize,
    layout: &Layout,
    generator: usize,
) -> Result<CircuitPlan> {
    require_qubits(rep)?;
    let group = rep.group();
    let n = group.order();
    if group.element_order(generator) != n {
        return Err(Error::BadGenerators(format!(
            "element {} has order {}, group order is {n}",
            group.label(generator),
            group.element_order(generator)
        )));
    }
    let rp = ceil_log2(n);
    check_layout(layout, rp, m)?;
    let u = rep.matrix(generator);
    let mut gates = Vec::new();
    for i in 1..=rp {
        let wire = layout.control[rp - i];
        let power = u.pow(1 << (i - 1));
        for &t in &layout.message {
            gates.push(Gate::unit(GateKind::Controlled {
                controls: vec![(wire, 1)],
                targets: vec![t],
                matrix: power.clone(),
                via_ancilla: false,
            }));
        }
    }
    let labels = (0..1usize << rp)
        .map(|j| (j < n).then(|| group.pow(generator, j)))
        .collect();
    let mut plan = CircuitPlan {
        gates,
        layout: layout.clone(),
        control_labels: labels,
    };
    add_phase_correction(rep, &mut plan)?;
    Ok(plan)
}

/// Product of the controlled single-wire gates acting on `target` when the
/// control register holds `code`.
pub(crate) fn effective_operator(plan: &CircuitPlan, code: usize, target: usize) -> Matrix {
    let ctrl = &plan.layout.control;
    let value_of = |w: usize| {
        let k = ctrl.iter().position(|&c| c == w)?;
        Some((code >> (ctrl.len() - 1 - k)) & 1)
    };
    let mut acc = Matrix::identity(2);
    for g in &plan.gates {
        if let GateKind::Controlled {
            controls,
            targets,
            matrix,
            ..
        } = &g.kind
        {
            if targets == &[target] && controls.iter().all(|&(w, v)| value_of(w) == Some(v)) {
                acc = matrix * &acc;
            }
        }
    }
    acc
}

/// Projective representations can leave `Π U_{g_j}^{l_j} = c U_g`; a diagonal
/// gate on the control register removes `c^m`.
fn add_phase_correction(rep: &UnitaryRep, plan: &mut CircuitPlan) -> Result<()> {
    let Some(&first) = plan.layout.message.first() else {
        return Ok(());
    };
    let m = plan.layout.message.len() as i32;
    let mut phases = vec![ONE; plan.control_labels.len()];
    let mut needed = false;
    for (code, label) in plan.control_labels.iter().enumerate() {
        let Some(g) = *label else { continue };
        let actual = effective_operator(plan, code, first);
        let want = rep.matrix(g);
        let c = want.hs_inner(&actual) / C64::new(2.0, 0.0);
        if (c.norm() - 1.0).abs() > PHASE_TOL || actual.max_abs_diff(&want.scale(c)) > PHASE_TOL {
            return Err(Error::BadGenerators(format!(
                "controlled product for code {code} is not U_g up to phase"
            )));
        }
        let fix = c.conj().powi(m);
        if (fix - ONE).norm() > PHASE_TOL {
            needed = true;
        }
        phases[code] = fix;
    }
    if needed {
        plan.gates.push(Gate::unit(GateKind::Phase {
            wires: plan.layout.control.clone(),
            phases,
        }));
    }
    Ok(())
}

/// Uniform superposition over the labelled control values: Hadamards when
/// every value is used, otherwise one preparation unitary.
pub fn uniform_control_prep(layout: &Layout, labels: &[Option<usize>]) -> Result<CircuitPlan> {
    let ctrl = &layout.control;
    let gates = if labels.iter().all(Option::is_some) {
        ctrl.iter()
            .map(|&w| {
                Gate::unit(GateKind::Single {
                    target: w,
                    matrix: hadamard(),
                })
            })
            .collect()
    } else {
        let dim = labels.len();
        let count = labels.iter().filter(|l| l.is_some()).count();
        let amp = C64::new(1.0 / (count as f64).sqrt(), 0.0);
        let first: Vec<C64> = labels
            .iter()
            .map(|l| if l.is_some() { amp } else { ZERO })
            .collect();
        vec![Gate::unit(GateKind::Prepare {
            wires: ctrl.clone(),
            matrix: complete_unitary(vec![first], dim)?,
        })]
    };
    Ok(CircuitPlan {
        gates,
        layout: layout.clone(),
        control_labels: labels.to_vec(),
    })
}

/// Extends orthonormal columns to a unitary with standard basis vectors.
pub(crate) fn complete_unitary(mut columns: Vec<Vec<C64>>, dim: usize) -> Result<Matrix> {
    let mut k = 0;
    while columns.len() < dim {
        if k >= dim {
            return Err(Error::NumericalDegeneracy {
                irrep: 0,
                found: columns.len(),
                expected: dim,
            });
        }
        let mut e = vec![ZERO; dim];
        e[k] = ONE;
        k += 1;
        if let Some(v) = gram_schmidt_step(&columns, &e, 1e-8) {
            columns.push(v);
        }
    }
    Ok(Matrix::from_columns(&columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::BuiltinGroup;
    use crate::rep::{cyclic_diagonal_rep, klein_pauli_rep, s3_two_dim_rep};
    use crate::statevec::StateVector;

    fn code_of(ctrl: &[usize], n: usize, idx: usize) -> usize {
        ctrl.iter().fold(0, |acc, &w| (acc << 1) | ((idx >> (n - 1 - w)) & 1))
    }

    // one multi-controlled U_g^{⊗m} per labelled value
    fn w_reference(rep: &UnitaryRep, plan: &CircuitPlan, input: &StateVector) -> StateVector {
        let mut out = input.clone();
        let m = plan.layout.message.len();
        for (code, label) in plan.control_labels.iter().enumerate() {
            let Some(g) = *label else { continue };
            out.apply_controlled(
                &pattern(&plan.layout.control, code),
                &rep.matrix(g).kron_power(m),
                &plan.layout.message,
            )
            .unwrap();
        }
        out
    }

    fn check_plan(rep: &UnitaryRep, plan: &CircuitPlan, seed: u64) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = plan.layout.wires;
        let mut amps = crate::linalg::random_state_vector(1 << n, &mut rng);
        for (idx, a) in amps.iter_mut().enumerate() {
            if plan.control_labels[code_of(&plan.layout.control, n, idx)].is_none() {
                *a = ZERO;
            }
        }
        let input = StateVector::normalized(2, n, amps).unwrap();
        let mut got = input.clone();
        plan.simulate(&mut got).unwrap();
        let want = w_reference(rep, plan, &input);
        let ov = want.inner(&got).unwrap();
        assert!((ov - ONE).norm() < 1e-10, "overlap {ov}");
    }

    #[test]
    fn general_counts_match_formula() {
        let k4 = klein_pauli_rep();
        for m in [1, 3] {
            let plan = synth_w_general(&k4, m, &Layout::minimal(2, m)).unwrap();
            assert_eq!(plan.total_count() as i64, general_count_formula(4, 2, m));
        }
        assert_eq!(general_count_formula(4, 2, 3), 20);
        assert_eq!(general_count_formula(4, 2, 1), 12);
        let z8 = cyclic_diagonal_rep(8, 2);
        let plan = synth_w_general(&z8, 2, &Layout::minimal(3, 2)).unwrap();
        assert_eq!(plan.total_count(), 360);
        assert_eq!(plan.logical_depth(), 352);
        assert_eq!(general_depth_formula(8, 3), 352);
    }

    #[test]
    fn k4_depth_is_twelve() {
        let plan = synth_w_general(&klein_pauli_rep(), 3, &Layout::minimal(2, 3)).unwrap();
        assert_eq!(plan.logical_depth(), 12);
    }

    #[test]
    fn general_w_acts_correctly() {
        for (rep, rp) in [
            (klein_pauli_rep(), 2),
            (cyclic_diagonal_rep(3, 2), 2),
            (cyclic_diagonal_rep(5, 2), 3),
            (s3_two_dim_rep(), 3),
        ] {
            for m in [1, 2] {
                let plan = synth_w_general(&rep, m, &Layout::minimal(rp, m)).unwrap();
                check_plan(&rep, &plan, 7 + m as u64);
            }
        }
    }

    #[test]
    fn cyclic_w_acts_correctly() {
        for n in [2, 3, 4, 6, 8] {
            let rep = cyclic_diagonal_rep(n, 2);
            let rp = ceil_log2(n);
            for m in [1, 2] {
                let plan = synth_w_cyclic(&rep, m, &Layout::minimal(rp, m), 1).unwrap();
                assert_eq!(plan.total_count(), m * rp);
                assert_eq!(plan.logical_depth(), rp);
                check_plan(&rep, &plan, n as u64);
            }
        }
    }

    #[test]
    fn cyclic_exponent_identity() {
        let rep = cyclic_diagonal_rep(8, 2);
        let plan = synth_w_cyclic(&rep, 1, &Layout::minimal(3, 1), 1).unwrap();
        let u = rep.matrix(1);
        for j in 0..8usize {
            let mut prod = Matrix::identity(2);
            for i in 1..=3 {
                if (j >> (i - 1)) & 1 == 1 {
                    prod = &u.pow(1 << (i - 1)) * &prod;
                }
            }
            assert!(prod.max_abs_diff(&u.pow(j as u64)) < 1e-12);
            assert!(effective_operator(&plan, j, 3).max_abs_diff(&u.pow(j as u64)) < 1e-12);
        }
    }

    #[test]
    fn abelian_k4_with_phase_fix() {
        let rep = klein_pauli_rep();
        let gens = BuiltinGroup::Klein.abelian_generators().unwrap();
        for m in [1, 2, 3] {
            // Z X = iY: no correction in this order
            let plan = synth_w_abelian(&rep, m, &Layout::minimal(2, m), &gens).unwrap();
            assert_eq!(plan.gates_named("phase"), 0);
            assert!(plan.total_count() <= abelian_bound(&[2, 2], m));
            check_plan(&rep, &plan, 30 + m as u64);
            // X Z = -iY: odd m picks up a sign
            let plan = synth_w_abelian(&rep, m, &Layout::minimal(2, m), &[3, 1]).unwrap();
            assert_eq!(plan.gates_named("phase"), m % 2);
            assert!(plan.total_count() <= abelian_bound(&[2, 2], m));
            check_plan(&rep, &plan, 40 + m as u64);
        }
    }

    #[test]
    fn abelian_single_generator() {
        let rep = cyclic_diagonal_rep(8, 2);
        let plan = synth_w_abelian(&rep, 2, &Layout::minimal(3, 2), &[1]).unwrap();
        assert!(plan.total_count() <= abelian_bound(&[8], 2));
        assert_eq!(plan.gates_named("phase"), 0);
        check_plan(&rep, &plan, 3);
    }

    #[test]
    fn bad_generators_rejected() {
        let rep = cyclic_diagonal_rep(4, 2);
        let err = synth_w_abelian(&rep, 1, &Layout::minimal(1, 1), &[2]).unwrap_err();
        assert!(matches!(err, Error::BadGenerators(_)));
        let err = synth_w_cyclic(&rep, 1, &Layout::minimal(2, 1), 2).unwrap_err();
        assert!(matches!(err, Error::BadGenerators(_)));
    }

    #[test]
    fn qutrits_are_unsupported() {
        let rep = cyclic_diagonal_rep(3, 3);
        let err = synth_w_general(&rep, 1, &Layout::minimal(2, 1)).unwrap_err();
        assert_eq!(err, Error::UnsupportedDimension(3));
    }

    #[test]
    fn prep_is_uniform_over_labels() {
        let layout = Layout::minimal(3, 0);
        let labels: Vec<Option<usize>> = (0..8).map(|c| (c < 5).then_some(c)).collect();
        let plan = uniform_control_prep(&layout, &labels).unwrap();
        let mut s = StateVector::basis(2, 3, 0).unwrap();
        plan.simulate(&mut s).unwrap();
        for (i, a) in s.amplitudes().iter().enumerate() {
            let want = if i < 5 { 1.0 / 5f64.sqrt() } else { 0.0 };
            assert!((a - C64::new(want, 0.0)).norm() < 1e-12);
        }
    }
}
