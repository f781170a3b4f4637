//! Block-diagonal basis of a tensor power `U^{⊗r}`.
//!
//! Column `|λ, m, β⟩` carries row `m` of irrep `λ` and copy `β` of it, so in
//! this basis every `U_g^{⊗r}` reads `⊕_λ U^(λ)_g ⊗ I`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt_step, inner, Matrix, C64, ZERO};
use crate::rep::{multiplicities, CharacterTable, UnitaryRep};

/// Largest `d^r` for which the projector construction is attempted.
pub const MAX_PROJECTOR_DIM: usize = 1024;
/// Largest `d^r` for the full decomposition of a diagonal representation.
pub const MAX_DIAGONAL_FULL_DIM: usize = 1 << 20;
/// Largest `d^r` scanned when only the leading vectors are needed.
pub const MAX_DIAGONAL_SCAN_DIM: usize = 1 << 24;

pub const RANK_TOL: f64 = 1e-7;

/// Sparse vector over `(C_d)^{⊗r}`: `(basis index, amplitude)` sorted by index.
pub type SparseVec = Vec<(usize, C64)>;

#[derive(Debug, Clone, Serialize)]
pub struct IsotypicBlock {
    pub irrep: usize,
    pub dim: usize,
    pub multiplicity: usize,
    /// `vectors[m][β] = |λ, m, β⟩`.
    #[serde(skip)]
    pub vectors: Vec<Vec<SparseVec>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsotypicDecomposition {
    pub d: usize,
    pub r: usize,
    pub blocks: Vec<IsotypicBlock>,
    /// False when only the leading multiplicity vectors were computed.
    pub complete: bool,
}

impl IsotypicDecomposition {
    /// All `|λ, m, β⟩`, blocks in irrep order, `m`-major inside a block.
    pub fn compute(rep: &UnitaryRep, r: usize, table: &CharacterTable) -> Result<Self> {
        build(rep, r, table, false)
    }

    /// Only the first `min(γ_λ, d_λ)` multiplicity vectors of every irrep,
    /// which is all the fiducial state needs.
    pub fn leading(rep: &UnitaryRep, r: usize, table: &CharacterTable) -> Result<Self> {
        build(rep, r, table, true)
    }

    pub fn total_dim(&self) -> usize {
        self.d.pow(self.r as u32)
    }

    pub fn block(&self, irrep: usize) -> &IsotypicBlock {
        &self.blocks[irrep]
    }

    /// Columns in canonical order as dense vectors.
    pub fn columns(&self) -> Vec<Vec<C64>> {
        let n = self.total_dim();
        let mut out = Vec::new();
        for b in &self.blocks {
            for row in &b.vectors {
                for v in row {
                    out.push(densify(v, n));
                }
            }
        }
        out
    }

    /// Basis-change matrix with the block vectors as columns.
    pub fn basis_change(&self) -> Matrix {
        Matrix::from_columns(&self.columns())
    }

    /// Largest deviation of `V† U_g^{⊗r} V` from `⊕ U^(λ)_g ⊗ I` over all `g`,
    /// using the table's irrep matrices (or characters for abelian tables).
    pub fn block_structure_residue(&self, rep: &UnitaryRep, table: &CharacterTable) -> f64 {
        let n = self.total_dim();
        let cols = self.columns();
        // (irrep, m, beta) per column
        let mut labels = Vec::new();
        for b in &self.blocks {
            for (m, row) in b.vectors.iter().enumerate() {
                for beta in 0..row.len() {
                    labels.push((b.irrep, m, beta));
                }
            }
        }
        let mut worst: f64 = 0.0;
        for g in rep.group().elements() {
            let u = rep.matrix(g);
            for (j, col) in cols.iter().enumerate() {
                let image = apply_power(u, self.r, col, n);
                for (i, row) in cols.iter().enumerate() {
                    let got = inner(row, &image);
                    let (li, mi, bi) = labels[i];
                    let (lj, mj, bj) = labels[j];
                    let expect = if li == lj && bi == bj {
                        irrep_entry(table, li, g, mi, mj)
                    } else {
                        ZERO
                    };
                    worst = worst.max((got - expect).norm());
                }
            }
        }
        worst
    }
}

fn densify(v: &SparseVec, n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n];
    for &(i, a) in v {
        out[i] = a;
    }
    out
}

fn sparsify(v: &[C64]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 1e-15)
        .map(|(i, &a)| (i, a))
        .collect()
}

/// `u^(λ)_{mn}(g)`.
fn irrep_entry(table: &CharacterTable, irrep: usize, g: usize, m: usize, n: usize) -> C64 {
    match table.irrep_matrix(irrep, g) {
        Some(mat) => mat[(m, n)],
        None => table.character(irrep, g),
    }
}

/// `(u ⊗ ... ⊗ u) v` without forming the Kronecker power.
pub fn apply_power(u: &Matrix, r: usize, v: &[C64], n: usize) -> Vec<C64> {
    let d = u.rows();
    let mut cur = v.to_vec();
    let mut next = vec![ZERO; n];
    for k in 0..r {
        let stride = d.pow((r - 1 - k) as u32);
        next.iter_mut().for_each(|x| *x = ZERO);
        for (idx, &a) in cur.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let digit = (idx / stride) % d;
            let base = idx - digit * stride;
            for out in 0..d {
                let c = u[(out, digit)];
                if c != ZERO {
                    next[base + out * stride] += c * a;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

fn checked_power(d: usize, r: usize, limit: usize) -> Result<usize> {
    let mut n: usize = 1;
    for _ in 0..r {
        n = n
            .checked_mul(d)
            .filter(|&x| x <= limit)
            .ok_or_else(|| Error::ResourceLimit(format!("{d}^{r} exceeds {limit}")))?;
    }
    Ok(n)
}

fn build(
    rep: &UnitaryRep,
    r: usize,
    table: &CharacterTable,
    leading: bool,
) -> Result<IsotypicDecomposition> {
    let mv = multiplicities(rep, table, r)?;
    if rep.is_diagonal() && rep.is_linear() && table.is_abelian() {
        let limit = if leading {
            MAX_DIAGONAL_SCAN_DIM
        } else {
            MAX_DIAGONAL_FULL_DIM
        };
        let n = checked_power(rep.dim(), r, limit)?;
        return diagonal_path(rep, r, table, &mv.gammas, n, leading);
    }
    for (l, &d) in table.dims().iter().enumerate() {
        if d > 1 && mv.gammas[l] > 0 && !table.has_irrep_matrices() {
            return Err(Error::MissingIrrepMatrices { irrep: l, dim: d });
        }
    }
    let n = checked_power(rep.dim(), r, MAX_PROJECTOR_DIM)?;
    projector_path(rep, r, table, &mv.gammas, n, leading)
}

/// Diagonal representation of an abelian group: every basis state spans a
/// one-dimensional irrep, identified by the product of its digits' characters.
fn diagonal_path(
    rep: &UnitaryRep,
    r: usize,
    table: &CharacterTable,
    gammas: &[usize],
    n: usize,
    leading: bool,
) -> Result<IsotypicDecomposition> {
    let d = rep.dim();
    let s = table.num_irreps();
    let group = rep.group();
    let find_irrep = |values: &dyn Fn(usize) -> C64| -> Result<usize> {
        (0..s)
            .find(|&l| group.elements().all(|g| (table.character(l, g) - values(g)).norm() < 1e-9))
            .ok_or_else(|| Error::InvalidCharacterTable("diagonal entry is not an irreducible character".into()))
    };
    let digit_irrep: Vec<usize> = (0..d)
        .map(|j| find_irrep(&|g| rep.matrix(g)[(j, j)]))
        .collect::<Result<_>>()?;
    let mut product = vec![vec![0usize; s]; s];
    for (a, row) in product.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            *slot = find_irrep(&|g| table.character(a, g) * table.character(b, g))?;
        }
    }
    let want: Vec<usize> = if leading {
        gammas.iter().map(|&g| g.min(1)).collect()
    } else {
        gammas.to_vec()
    };
    let mut found: Vec<Vec<SparseVec>> = vec![Vec::new(); s];
    let mut remaining: usize = want.iter().sum();
    let mut digits = vec![0usize; r];
    for idx in 0..n {
        if idx > 0 {
            // increment big-endian counter
            let mut k = r;
            while k > 0 {
                k -= 1;
                digits[k] += 1;
                if digits[k] < d {
                    break;
                }
                digits[k] = 0;
            }
        }
        let label = digits.iter().fold(0, |acc, &j| product[acc][digit_irrep[j]]);
        if found[label].len() < want[label] {
            found[label].push(vec![(idx, C64::new(1.0, 0.0))]);
            remaining -= 1;
            if remaining == 0 && leading {
                break;
            }
        }
    }
    for l in 0..s {
        if found[l].len() < want[l] {
            return Err(Error::NumericalDegeneracy {
                irrep: l,
                found: found[l].len(),
                expected: want[l],
            });
        }
    }
    let blocks = found
        .into_iter()
        .enumerate()
        .map(|(l, vecs)| IsotypicBlock {
            irrep: l,
            dim: 1,
            multiplicity: gammas[l],
            vectors: vec![vecs],
        })
        .collect();
    Ok(IsotypicDecomposition {
        d,
        r,
        blocks,
        complete: !leading,
    })
}

/// Matrix-element projectors `P_{m1} = (d_λ/|G|) Σ_g u_{m1}(g)* U_g^{⊗r}`;
/// copies are Gram–Schmidt images of `P_{11}|b⟩` in lexicographic order of `b`.
fn projector_path(
    rep: &UnitaryRep,
    r: usize,
    table: &CharacterTable,
    gammas: &[usize],
    n: usize,
    leading: bool,
) -> Result<IsotypicDecomposition> {
    let order = rep.group().order() as f64;
    let powers: Vec<Matrix> = rep
        .group()
        .elements()
        .map(|g| rep.matrix(g).kron_power(r))
        .collect();
    let mut blocks = Vec::new();
    for (l, &dl) in table.dims().iter().enumerate() {
        let want = if leading { gammas[l].min(dl) } else { gammas[l] };
        let projector = |m: usize| -> Matrix {
            let mut p = Matrix::zeros(n, n);
            for (g, pw) in powers.iter().enumerate() {
                let c = irrep_entry(table, l, g, m, 0).conj() * (dl as f64 / order);
                if c == ZERO {
                    continue;
                }
                let scaled = pw.scale(c);
                for i in 0..n {
                    for j in 0..n {
                        p[(i, j)] += scaled[(i, j)];
                    }
                }
            }
            p
        };
        let mut copies: Vec<Vec<C64>> = Vec::new();
        if want > 0 {
            let p11 = projector(0);
            for b in 0..n {
                if copies.len() == want {
                    break;
                }
                if let Some(v) = gram_schmidt_step(&copies, &p11.column(b), RANK_TOL) {
                    copies.push(v);
                }
            }
        }
        if copies.len() < want {
            return Err(Error::NumericalDegeneracy {
                irrep: l,
                found: copies.len(),
                expected: want,
            });
        }
        let mut vectors = vec![copies.iter().map(|v| sparsify(v)).collect::<Vec<_>>()];
        for m in 1..dl {
            let pm1 = projector(m);
            vectors.push(copies.iter().map(|v| sparsify(&pm1.apply(v))).collect());
        }
        blocks.push(IsotypicBlock {
            irrep: l,
            dim: dl,
            multiplicity: gammas[l],
            vectors,
        });
    }
    Ok(IsotypicDecomposition {
        d: rep.dim(),
        r,
        blocks,
        complete: !leading,
    })
}
