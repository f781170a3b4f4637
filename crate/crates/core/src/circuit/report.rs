use serde::Serialize;

use crate::codec::Rate;
use crate::error::Result;
use crate::group::abelian_basis;
use crate::rep::{min_r, CharacterTable, UnitaryRep, DEFAULT_R_MAX};

use super::synth::{
    abelian_bound, general_count_formula, general_depth_formula, general_unfused_count,
    synth_w_abelian, synth_w_cyclic, synth_w_general,
};
use super::{ceil_log2, Layout, Path};

#[derive(Debug, Clone, Serialize)]
pub struct PathCount {
    pub path: Path,
    pub control_bits: usize,
    /// Sum of gate costs of the emitted plan (qubit representations only).
    pub emitted: Option<usize>,
    pub depth: Option<usize>,
    pub formula: Option<i64>,
    pub unfused_formula: Option<i64>,
    pub depth_formula: Option<i64>,
    pub bound: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GateCountReport {
    pub group_order: usize,
    pub d: usize,
    pub m: usize,
    pub r: usize,
    pub r_prime: usize,
    pub rate: Rate,
    pub paths: Vec<PathCount>,
    /// `d^r`: size of the dense token-basis change.
    pub t_direct_bound: usize,
    /// CNOTs of the cyclic register network, when it applies.
    pub t_cyclic_cnots: Option<usize>,
    pub t_cyclic_qft_gates: Option<usize>,
    pub scaling: String,
}

/// Counts for every applicable path. Emitted plans need qubits; for larger
/// `d` only the formulas are reported.
pub fn gate_count_report(
    rep: &UnitaryRep,
    table: &CharacterTable,
    m: usize,
) -> Result<GateCountReport> {
    let group = rep.group();
    let order = group.order();
    let d = rep.dim();
    let r = min_r(rep, table, DEFAULT_R_MAX)?;
    let rp = ceil_log2(order);
    let qubits = d == 2;

    let mut paths = Vec::new();
    let general = if qubits {
        Some(synth_w_general(rep, m, &Layout::minimal(rp, m))?)
    } else {
        None
    };
    paths.push(PathCount {
        path: Path::General,
        control_bits: rp,
        emitted: general.as_ref().map(|p| p.total_count()),
        depth: general.as_ref().map(|p| p.logical_depth()),
        formula: Some(general_count_formula(order, rp, m)),
        unfused_formula: Some(general_unfused_count(order, rp, m)),
        depth_formula: Some(general_depth_formula(order, rp)),
        bound: None,
    });

    let mut cyclic_generator = None;
    if group.is_abelian() {
        let gens = abelian_basis(group)?;
        let orders: Vec<usize> = gens.iter().map(|&g| group.element_order(g)).collect();
        let bits: usize = orders.iter().map(|&l| ceil_log2(l)).sum();
        let plan = if qubits {
            Some(synth_w_abelian(rep, m, &Layout::minimal(bits, m), &gens)?)
        } else {
            None
        };
        paths.push(PathCount {
            path: Path::Abelian,
            control_bits: bits,
            emitted: plan.as_ref().map(|p| p.total_count()),
            depth: plan.as_ref().map(|p| p.logical_depth()),
            formula: None,
            unfused_formula: None,
            depth_formula: None,
            bound: Some(abelian_bound(&orders, m)),
        });
        if gens.len() <= 1 {
            cyclic_generator = Some(gens.first().copied().unwrap_or(0));
        }
    }
    if let Some(g) = cyclic_generator.filter(|_| order > 1) {
        let plan = if qubits {
            Some(synth_w_cyclic(rep, m, &Layout::minimal(rp, m), g)?)
        } else {
            None
        };
        paths.push(PathCount {
            path: Path::Cyclic,
            control_bits: rp,
            emitted: plan.as_ref().map(|p| p.total_count()),
            depth: plan.as_ref().map(|p| p.logical_depth()),
            formula: Some((m * rp) as i64),
            unfused_formula: None,
            depth_formula: Some(rp as i64),
            bound: None,
        });
    }

    let register_applies = cyclic_generator.is_some() && qubits && order.is_power_of_two() && order > 1 && r == order - 1;
    Ok(GateCountReport {
        group_order: order,
        d,
        m,
        r,
        r_prime: rp,
        rate: Rate::new(m, r),
        paths,
        t_direct_bound: d.saturating_pow(r as u32),
        t_cyclic_cnots: register_applies.then_some(r + rp),
        t_cyclic_qft_gates: register_applies.then_some(rp * (rp + 1) / 2),
        scaling: "W: O(m |G| log|G|) general, O(m log|G|) cyclic; T: O(d^r)".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::{cyclic_diagonal_rep, klein_pauli_rep};

    #[test]
    fn k4_report() {
        let rep = klein_pauli_rep();
        let rpt = gate_count_report(&rep, &CharacterTable::klein().unwrap(), 3).unwrap();
        assert_eq!(rpt.r, 2);
        let general = &rpt.paths[0];
        assert_eq!(general.emitted, Some(20));
        assert_eq!(general.formula, Some(20));
        assert_eq!(general.depth, Some(12));
        assert_eq!(rpt.t_direct_bound, 4);
        assert!(rpt.t_cyclic_cnots.is_none());
    }

    #[test]
    fn z8_report() {
        let rep = cyclic_diagonal_rep(8, 2);
        let rpt = gate_count_report(&rep, &CharacterTable::cyclic(8).unwrap(), 2).unwrap();
        assert_eq!(rpt.r, 7);
        assert_eq!(rpt.paths[0].emitted, Some(360));
        assert_eq!(rpt.paths[0].depth, Some(352));
        let cyc = rpt.paths.iter().find(|p| p.path == Path::Cyclic).unwrap();
        assert_eq!(cyc.emitted, Some(6));
        assert_eq!(cyc.depth, Some(3));
        assert_eq!(rpt.t_cyclic_cnots, Some(10));
    }

    #[test]
    fn qutrit_report_is_symbolic() {
        let rep = cyclic_diagonal_rep(3, 3);
        let rpt = gate_count_report(&rep, &CharacterTable::cyclic(3).unwrap(), 1).unwrap();
        assert!(rpt.paths.iter().all(|p| p.emitted.is_none()));
        assert_eq!(rpt.t_direct_bound, 3);
    }
}
