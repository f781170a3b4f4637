//! Unitary representations, character tables and multiplicity arithmetic.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{abelian_basis, direct_product, BuiltinGroup, ConjugacyClasses, FiniteGroup};
use crate::linalg::{root_of_unity, Matrix, C64, ONE, ZERO};

pub const UNITARY_TOL: f64 = 1e-9;
pub const FAITHFUL_TOL: f64 = 1e-9;
pub const MULTIPLICITY_TOL: f64 = 1e-6;
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
pub const DEFAULT_R_MAX: usize = 32;

/// A map `g -> U_g` into `d x d` unitaries.
///
/// The group law may hold only up to a phase, `U_g U_k = c(g,k) U_{gk}`, as
/// for the Pauli matrices `{I, X, iY, Z}`. Such a projective representation is
/// accepted; the phases are kept so that callers can tell which tensor powers
/// are honest (linear) representations.
#[derive(Debug, Clone)]
pub struct UnitaryRep {
    group: FiniteGroup,
    dim: usize,
    matrices: Vec<Matrix>,
    cocycle: Vec<C64>,
    phase_order: usize,
}

impl UnitaryRep {
    pub fn new(group: &FiniteGroup, matrices: Vec<Matrix>) -> Result<Self> {
        let n = group.order();
        if matrices.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices given for a group of order {n}",
                matrices.len()
            )));
        }
        let dim = matrices[0].rows();
        for (g, m) in matrices.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "matrix {g} is {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                )));
            }
            let dev = m.unitarity_deviation();
            if dev > UNITARY_TOL {
                return Err(Error::NotUnitary {
                    element: g,
                    deviation: dev,
                });
            }
        }
        let mut matrices = matrices;
        let id_dev = matrices[0].max_abs_diff(&Matrix::identity(dim));
        if id_dev > UNITARY_TOL {
            return Err(Error::NotHomomorphism {
                left: 0,
                right: 0,
                deviation: id_dev,
            });
        }
        matrices[0] = Matrix::identity(dim);

        let mut cocycle = vec![ONE; n * n];
        for a in 0..n {
            for b in 0..n {
                let prod = &matrices[a] * &matrices[b];
                let target = &matrices[group.mul(a, b)];
                let c = target.hs_inner(&prod) / dim as f64;
                let phase = if (c.norm() - 1.0).abs() <= 1e-6 {
                    c / c.norm()
                } else {
                    ONE
                };
                let dev = prod.max_abs_diff(&target.scale(phase));
                if dev > UNITARY_TOL {
                    return Err(Error::NotHomomorphism {
                        left: a,
                        right: b,
                        deviation: dev,
                    });
                }
                cocycle[a * n + b] = if (phase - ONE).norm() <= UNITARY_TOL {
                    ONE
                } else {
                    phase
                };
            }
        }
        let phase_order = (1..=4 * n)
            .find(|&k| cocycle.iter().all(|c| (c.powu(k as u32) - ONE).norm() <= 1e-7))
            .unwrap_or(0);
        Ok(UnitaryRep {
            group: group.clone(),
            dim,
            matrices,
            cocycle,
            phase_order,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &Matrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    /// `c(g, k)` with `U_g U_k = c(g, k) U_{gk}`.
    pub fn cocycle(&self, g: usize, k: usize) -> C64 {
        self.cocycle[g * self.group.order() + k]
    }

    pub fn is_linear(&self) -> bool {
        self.phase_order == 1
    }

    /// Whether `U^{⊗n}` satisfies the group law exactly.
    pub fn power_is_linear(&self, n: usize) -> bool {
        self.phase_order != 0 && n.is_multiple_of(self.phase_order)
    }

    pub fn is_diagonal(&self) -> bool {
        self.matrices.iter().all(|m| m.is_diagonal(1e-12))
    }

    pub fn is_faithful(&self) -> Result<()> {
        let n = self.group.order();
        for a in 0..n {
            for b in a + 1..n {
                if self.matrices[a].max_abs_diff(&self.matrices[b]) <= FAITHFUL_TOL {
                    return Err(Error::NotFaithful {
                        first: a,
                        second: b,
                    });
                }
            }
        }
        Ok(())
    }

    /// `tr U_g` for every element (not just class representatives).
    pub fn element_traces(&self) -> Vec<C64> {
        self.matrices.iter().map(Matrix::trace).collect()
    }

    /// Compound character per conjugacy class, read off each class's first
    /// element. Returns the largest spread seen inside a class alongside.
    pub fn compound_character(&self, classes: &ConjugacyClasses) -> (Vec<C64>, f64) {
        let traces = self.element_traces();
        let mut spread: f64 = 0.0;
        let chi = classes
            .classes()
            .iter()
            .map(|cls| {
                let rep = traces[cls[0]];
                for &g in cls {
                    spread = spread.max((traces[g] - rep).norm());
                }
                rep
            })
            .collect();
        (chi, spread)
    }

    /// Direct sum `self ⊕ other` over the same group.
    pub fn direct_sum(&self, other: &UnitaryRep) -> Result<UnitaryRep> {
        let d = self.dim + other.dim;
        let mats = (0..self.group.order())
            .map(|g| {
                let mut m = Matrix::zeros(d, d);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        m[(i, j)] = self.matrices[g][(i, j)];
                    }
                }
                for i in 0..other.dim {
                    for j in 0..other.dim {
                        m[(self.dim + i, self.dim + j)] = other.matrices[g][(i, j)];
                    }
                }
                m
            })
            .collect();
        UnitaryRep::new(&self.group, mats)
    }
}

/// Irreducible characters, one row per irrep, one column per class.
#[derive(Debug, Clone, Serialize)]
pub struct CharacterTable {
    #[serde(skip)]
    classes: ConjugacyClasses,
    order: usize,
    dims: Vec<usize>,
    chars: Vec<Vec<C64>>,
    #[serde(skip)]
    irrep_matrices: Option<Vec<Vec<Matrix>>>,
}

impl CharacterTable {
    /// Checks row 0 is trivial, `Σ d² = |G|` and row orthogonality; when
    /// irrep matrices are present, also that they are unitary, obey the group
    /// law and reproduce the characters.
    pub fn new(
        group: &FiniteGroup,
        dims: Vec<usize>,
        chars: Vec<Vec<C64>>,
        irrep_matrices: Option<Vec<Vec<Matrix>>>,
    ) -> Result<Self> {
        let classes = group.conjugacy_classes();
        let s = classes.count();
        let bad = |m: String| Err(Error::InvalidCharacterTable(m));
        if dims.len() != s || chars.len() != s {
            return bad(format!(
                "{} dims and {} rows given, group has {s} classes",
                dims.len(),
                chars.len()
            ));
        }
        if let Some(row) = chars.iter().position(|r| r.len() != s) {
            return bad(format!("row {row} does not have {s} entries"));
        }
        if dims.iter().map(|d| d * d).sum::<usize>() != group.order() {
            return bad(format!("sum of squared dimensions is not {}", group.order()));
        }
        if chars[0].iter().any(|c| (c - ONE).norm() > ORTHOGONALITY_TOL) {
            return bad("row 0 is not the trivial irrep".into());
        }
        for (l, row) in chars.iter().enumerate() {
            if (row[0] - C64::new(dims[l] as f64, 0.0)).norm() > ORTHOGONALITY_TOL {
                return bad(format!("character of irrep {l} at identity is not its dimension"));
            }
        }
        let sizes = classes.sizes();
        let n = group.order() as f64;
        for a in 0..s {
            for b in 0..s {
                let ip: C64 = (0..s)
                    .map(|i| chars[a][i] * chars[b][i].conj() * sizes[i] as f64)
                    .sum::<C64>()
                    / n;
                let expect = if a == b { ONE } else { ZERO };
                if (ip - expect).norm() > ORTHOGONALITY_TOL {
                    return bad(format!("rows {a} and {b} violate orthogonality ({ip})"));
                }
            }
        }
        if let Some(mats) = &irrep_matrices {
            if mats.len() != s {
                return bad("irrep matrices must be given for every irrep".into());
            }
            for (l, per_g) in mats.iter().enumerate() {
                if per_g.len() != group.order() {
                    return bad(format!("irrep {l}: wrong number of matrices"));
                }
                let rep = UnitaryRep::new(group, per_g.clone())
                    .map_err(|e| Error::InvalidCharacterTable(format!("irrep {l}: {e}")))?;
                if !rep.is_linear() || rep.dim() != dims[l] {
                    return bad(format!("irrep {l}: matrices are not a {}-dim representation", dims[l]));
                }
                for g in group.elements() {
                    if (per_g[g].trace() - chars[l][classes.class_of(g)]).norm() > 1e-9 {
                        return bad(format!("irrep {l}: trace at element {g} disagrees with the table"));
                    }
                }
            }
        }
        Ok(CharacterTable {
            classes,
            order: group.order(),
            dims,
            chars,
            irrep_matrices,
        })
    }

    /// Character table of an abelian group, irreps labelled by exponents of a
    /// cyclic decomposition (mixed radix, first generator most significant).
    pub fn abelian(group: &FiniteGroup) -> Result<Self> {
        let gens = abelian_basis(group)?;
        let orders: Vec<usize> = gens.iter().map(|&g| group.element_order(g)).collect();
        let n = group.order();
        // exponents[g] = (l_1, .., l_k) with g = g_1^{l_1} ... g_k^{l_k}
        let mut exponents = vec![Vec::new(); n];
        for code in 0..n {
            let mut rest = code;
            let mut ls = vec![0; orders.len()];
            for j in (0..orders.len()).rev() {
                ls[j] = rest % orders[j];
                rest /= orders[j];
            }
            let g = ls
                .iter()
                .zip(&gens)
                .fold(0, |acc, (&l, &gen)| group.mul(acc, group.pow(gen, l)));
            exponents[g] = ls;
        }
        let classes = group.conjugacy_classes();
        let chars: Vec<Vec<C64>> = (0..n)
            .map(|code| {
                let mut rest = code;
                let mut lam = vec![0; orders.len()];
                for j in (0..orders.len()).rev() {
                    lam[j] = rest % orders[j];
                    rest /= orders[j];
                }
                (0..n)
                    .map(|c| {
                        let g = classes.representative(c);
                        exponents[g]
                            .iter()
                            .zip(&lam)
                            .zip(&orders)
                            .map(|((&l, &m), &o)| root_of_unity((l * m) as i64, o))
                            .product()
                    })
                    .collect()
            })
            .collect();
        Self::from_one_dimensional(group, chars)
    }

    fn from_one_dimensional(group: &FiniteGroup, chars: Vec<Vec<C64>>) -> Result<Self> {
        let classes = group.conjugacy_classes();
        let mats = chars
            .iter()
            .map(|row| {
                group
                    .elements()
                    .map(|g| Matrix::diagonal(&[row[classes.class_of(g)]]))
                    .collect()
            })
            .collect();
        let dims = vec![1; chars.len()];
        CharacterTable::new(group, dims, chars, Some(mats))
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        let group = BuiltinGroup::Cyclic(n).build();
        let chars = (0..n)
            .map(|l| (0..n).map(|g| root_of_unity((l * g) as i64, n)).collect())
            .collect();
        Self::from_one_dimensional(&group, chars)
    }

    /// Irreps U0..U3 of `{e, x, y, z}` with rows (1,1,1,1), (1,1,-1,-1),
    /// (1,-1,1,-1), (1,-1,-1,1).
    pub fn klein() -> Result<Self> {
        let group = BuiltinGroup::Klein.build();
        let rows: [[f64; 4]; 4] = [
            [1.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, 1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0],
        ];
        let chars = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_one_dimensional(&group, chars)
    }

    /// Trivial, sign and the two-dimensional irrep of S3.
    pub fn symmetric3() -> Result<Self> {
        let group = BuiltinGroup::Symmetric3.build();
        let trivial = (0..6).map(|_| Matrix::identity(1)).collect();
        let sign = (0..6)
            .map(|g| Matrix::diagonal(&[C64::new(if g < 3 { 1.0 } else { -1.0 }, 0.0)]))
            .collect();
        let two = s3_two_dim_matrices(&group);
        let real = |v: &[f64]| v.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>();
        let chars = vec![
            real(&[1.0, 1.0, 1.0]),
            real(&[1.0, 1.0, -1.0]),
            real(&[2.0, -1.0, 0.0]),
        ];
        CharacterTable::new(&group, vec![1, 1, 2], chars, Some(vec![trivial, sign, two]))
    }

    /// Table of `G x H` from the tables of the factors; irrep `(a, b)` has
    /// index `a * s_H + b`.
    pub fn product(
        ga: &FiniteGroup,
        ta: &CharacterTable,
        gb: &FiniteGroup,
        tb: &CharacterTable,
    ) -> Result<Self> {
        let group = direct_product(ga, gb);
        let (sa, sb) = (ta.num_irreps(), tb.num_irreps());
        let nb = gb.order();
        let mut dims = Vec::new();
        let mut chars = Vec::new();
        let mut mats = Vec::new();
        let both = ta.irrep_matrices.is_some() && tb.irrep_matrices.is_some();
        for a in 0..sa {
            for b in 0..sb {
                dims.push(ta.dims[a] * tb.dims[b]);
                chars.push(
                    (0..sa * sb)
                        .map(|c| {
                            let (ca, cb) = (c / sb, c % sb);
                            ta.chars[a][ca] * tb.chars[b][cb]
                        })
                        .collect(),
                );
                if both {
                    mats.push(
                        group
                            .elements()
                            .map(|g| {
                                ta.irrep_matrix(a, g / nb)
                                    .unwrap()
                                    .kron(tb.irrep_matrix(b, g % nb).unwrap())
                            })
                            .collect(),
                    );
                }
            }
        }
        CharacterTable::new(&group, dims, chars, both.then_some(mats))
    }

    pub fn for_builtin(g: &BuiltinGroup) -> Result<Self> {
        match g {
            BuiltinGroup::Cyclic(n) => Self::cyclic(*n),
            BuiltinGroup::Klein => Self::klein(),
            BuiltinGroup::Symmetric3 => Self::symmetric3(),
            BuiltinGroup::DirectProduct(a, b) => Self::product(
                &a.build(),
                &Self::for_builtin(a)?,
                &b.build(),
                &Self::for_builtin(b)?,
            ),
        }
    }

    pub fn classes(&self) -> &ConjugacyClasses {
        &self.classes
    }

    pub fn group_order(&self) -> usize {
        self.order
    }

    pub fn num_irreps(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn chars(&self) -> &[Vec<C64>] {
        &self.chars
    }

    /// `χ^(λ)(g)` for an element.
    pub fn character(&self, irrep: usize, g: usize) -> C64 {
        self.chars[irrep][self.classes.class_of(g)]
    }

    pub fn has_irrep_matrices(&self) -> bool {
        self.irrep_matrices.is_some()
    }

    pub fn irrep_matrix(&self, irrep: usize, g: usize) -> Option<&Matrix> {
        self.irrep_matrices.as_ref().map(|m| &m[irrep][g])
    }

    pub fn is_abelian(&self) -> bool {
        self.dims.iter().all(|&d| d == 1)
    }

    /// Largest deviation from row orthogonality (should be ~1e-16).
    pub fn orthogonality_residue(&self) -> f64 {
        let s = self.num_irreps();
        let sizes = self.classes.sizes();
        let mut worst: f64 = 0.0;
        for a in 0..s {
            for b in 0..s {
                let ip: C64 = (0..s)
                    .map(|i| self.chars[a][i] * self.chars[b][i].conj() * sizes[i] as f64)
                    .sum::<C64>()
                    / self.order as f64;
                let expect = if a == b { ONE } else { ZERO };
                worst = worst.max((ip - expect).norm());
            }
        }
        worst
    }
}

/// Two-dimensional irrep of S3 generated from the images of (123) and (12)(3).
fn s3_two_dim_matrices(group: &FiniteGroup) -> Vec<Matrix> {
    let h = 3f64.sqrt() / 2.0;
    let r = Matrix::from_real_rows(&[&[-0.5, -h], &[h, -0.5]]);
    let s = Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
    generate_rep(group, &[(1, r), (3, s)])
}

/// Extends generator images to the whole group by breadth-first products.
pub fn generate_rep(group: &FiniteGroup, gens: &[(usize, Matrix)]) -> Vec<Matrix> {
    let d = gens.first().map_or(1, |(_, m)| m.rows());
    let mut out: Vec<Option<Matrix>> = vec![None; group.order()];
    out[0] = Some(Matrix::identity(d));
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (g, m) in gens {
            let y = group.mul(x, *g);
            if out[y].is_none() {
                out[y] = Some(out[x].as_ref().unwrap() * m);
                queue.push_back(y);
            }
        }
    }
    out.into_iter()
        .map(|m| m.expect("generators do not generate the group"))
        .collect()
}

/// Irrep multiplicities `γ^(λ)_n` of the `n`-th tensor power.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicityVector {
    pub n: usize,
    pub gammas: Vec<usize>,
    /// Largest distance of a raw `γ` from its rounded value.
    pub residue: f64,
}

impl MultiplicityVector {
    /// `Σ_λ γ_λ d_λ`, the dimension of the decomposed space.
    pub fn total_dimension(&self, table: &CharacterTable) -> usize {
        self.gammas.iter().zip(table.dims()).map(|(g, d)| g * d).sum()
    }
}

/// `γ^(λ)_n = (1/|G|) Σ_i |[g_i]| χ^(λ)*_i χ_i^n`, using the base compound
/// character raised to the `n`-th power.
pub fn multiplicities(rep: &UnitaryRep, table: &CharacterTable, n: usize) -> Result<MultiplicityVector> {
    multiplicities_with_tol(rep, table, n, MULTIPLICITY_TOL)
}

pub fn multiplicities_with_tol(
    rep: &UnitaryRep,
    table: &CharacterTable,
    n: usize,
    tol: f64,
) -> Result<MultiplicityVector> {
    check_same_group(rep, table)?;
    if !rep.power_is_linear(n) {
        return Err(Error::ProjectivePower { power: n });
    }
    let (chi, _) = rep.compound_character(table.classes());
    let chi_n: Vec<C64> = chi.iter().map(|c| c.powu(n as u32)).collect();
    multiplicities_from_character(table, &chi_n, n, tol)
}

/// Multiplicities of an arbitrary class function given per class.
pub fn multiplicities_from_character(
    table: &CharacterTable,
    chi: &[C64],
    n: usize,
    tol: f64,
) -> Result<MultiplicityVector> {
    let sizes = table.classes().sizes();
    let order = table.group_order() as f64;
    let mut gammas = Vec::with_capacity(table.num_irreps());
    let mut worst: f64 = 0.0;
    for (l, row) in table.chars().iter().enumerate() {
        let g: C64 = row
            .iter()
            .zip(chi)
            .zip(&sizes)
            .map(|((a, b), &s)| a.conj() * b * s as f64)
            .sum::<C64>()
            / order;
        let rounded = g.re.round();
        let residue = (g - C64::new(rounded, 0.0)).norm();
        if residue > tol * (1.0 + g.norm()) || rounded < 0.0 {
            return Err(Error::NonIntegerMultiplicity {
                irrep: l,
                residue,
            });
        }
        worst = worst.max(residue);
        gammas.push(rounded as usize);
    }
    Ok(MultiplicityVector {
        n,
        gammas,
        residue: worst,
    })
}

pub fn contains_regular(mv: &MultiplicityVector, table: &CharacterTable) -> bool {
    mv.gammas.iter().zip(table.dims()).all(|(g, d)| g >= d)
}

/// Smallest `r <= r_max` such that `U^{⊗r}` contains the regular
/// representation. Powers that are only projective are skipped.
pub fn min_r(rep: &UnitaryRep, table: &CharacterTable, r_max: usize) -> Result<usize> {
    check_same_group(rep, table)?;
    rep.is_faithful()?;
    for r in 1..=r_max {
        if !rep.power_is_linear(r) {
            continue;
        }
        let mv = multiplicities(rep, table, r)?;
        if contains_regular(&mv, table) {
            return Ok(r);
        }
    }
    Err(Error::RMaxExceeded { r_max })
}

fn check_same_group(rep: &UnitaryRep, table: &CharacterTable) -> Result<()> {
    if rep.group().order() != table.group_order() {
        return Err(Error::DimensionMismatch(format!(
            "representation is of a group of order {}, table of order {}",
            rep.group().order(),
            table.group_order()
        )));
    }
    Ok(())
}

/// `R_{g_k} |g_i> = |g_k g_i>`.
pub fn regular_rep(group: &FiniteGroup) -> UnitaryRep {
    let n = group.order();
    let mats = group
        .elements()
        .map(|k| {
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                m[(group.mul(k, i), i)] = ONE;
            }
            m
        })
        .collect();
    UnitaryRep::new(group, mats).expect("regular representation is a representation")
}

pub fn trivial_rep(group: &FiniteGroup, dim: usize) -> UnitaryRep {
    let mats = group.elements().map(|_| Matrix::identity(dim)).collect();
    UnitaryRep::new(group, mats).expect("trivial representation")
}

/// `U_g = Σ_n ω^{n g} |n><n|`, `n < d`, for `Z_N`.
pub fn cyclic_diagonal_rep(n: usize, d: usize) -> UnitaryRep {
    let group = BuiltinGroup::Cyclic(n).build();
    let mats = group
        .elements()
        .map(|g| {
            let diag: Vec<C64> = (0..d).map(|k| root_of_unity((k * g) as i64, n)).collect();
            Matrix::diagonal(&diag)
        })
        .collect();
    UnitaryRep::new(&group, mats).expect("diagonal cyclic representation")
}

/// `{I, X, iY, Z}` on `{e, x, y, z}`; a representation only up to sign.
pub fn klein_pauli_rep() -> UnitaryRep {
    let group = BuiltinGroup::Klein.build();
    let iy = Matrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
    let mats = vec![
        Matrix::identity(2),
        crate::linalg::pauli_x(),
        iy,
        crate::linalg::pauli_z(),
    ];
    UnitaryRep::new(&group, mats).expect("Pauli representation of K4")
}

/// Linear diagonal qutrit representation of K4: `diag(1, U1(g), U2(g))`.
pub fn klein_diagonal_rep() -> UnitaryRep {
    let group = BuiltinGroup::Klein.build();
    let table = CharacterTable::klein().expect("K4 table");
    diagonal_character_rep(&group, &table, &[0, 1, 2])
}

/// `U_g = diag(χ^(λ_1)(g), ..., χ^(λ_k)(g))` for one-dimensional irreps.
pub fn diagonal_character_rep(group: &FiniteGroup, table: &CharacterTable, irreps: &[usize]) -> UnitaryRep {
    let mats = group
        .elements()
        .map(|g| {
            let diag: Vec<C64> = irreps.iter().map(|&l| table.character(l, g)).collect();
            Matrix::diagonal(&diag)
        })
        .collect();
    UnitaryRep::new(group, mats).expect("diagonal character representation")
}

/// The two-dimensional irrep of S3 as a representation.
pub fn s3_two_dim_rep() -> UnitaryRep {
    let group = BuiltinGroup::Symmetric3.build();
    let mats = s3_two_dim_matrices(&group);
    UnitaryRep::new(&group, mats).expect("S3 two-dimensional irrep")
}

/// Default faithful representation of a built-in group.
///
/// Cyclic groups use `diag(1, ω^g)`, K4 the Pauli matrices, S3 its
/// two-dimensional irrep. For products of cyclic groups the representation is
/// `diag(1, χ_1(g), ..., χ_k(g))` with one generating character per factor;
/// other products use the direct sum of the factors' defaults.
pub fn default_rep(g: &BuiltinGroup) -> Result<UnitaryRep> {
    match g {
        BuiltinGroup::Cyclic(1) => Ok(trivial_rep(&g.build(), 1)),
        BuiltinGroup::Cyclic(n) => Ok(cyclic_diagonal_rep(*n, 2)),
        BuiltinGroup::Klein => Ok(klein_pauli_rep()),
        BuiltinGroup::Symmetric3 => Ok(s3_two_dim_rep()),
        BuiltinGroup::DirectProduct(..) => {
            let group = g.build();
            let factors = cyclic_factors(g);
            if let Some(factors) = factors {
                let table = CharacterTable::for_builtin(g)?;
                // The irrep that is the generating character of factor j and
                // trivial elsewhere, in mixed radix over the factors.
                let mut irreps = vec![0];
                for j in 0..factors.len() {
                    let stride: usize = factors[j + 1..].iter().product();
                    irreps.push(stride);
                }
                Ok(diagonal_character_rep(&group, &table, &irreps))
            } else {
                let BuiltinGroup::DirectProduct(a, b) = g else {
                    unreachable!()
                };
                let ra = default_rep(a)?;
                let rb = default_rep(b)?;
                let nb = b.build().order();
                let lift_a = UnitaryRep::new(
                    &group,
                    group.elements().map(|x| ra.matrix(x / nb).clone()).collect(),
                )?;
                let lift_b = UnitaryRep::new(
                    &group,
                    group.elements().map(|x| rb.matrix(x % nb).clone()).collect(),
                )?;
                lift_a.direct_sum(&lift_b)
            }
        }
    }
}

fn cyclic_factors(g: &BuiltinGroup) -> Option<Vec<usize>> {
    match g {
        BuiltinGroup::Cyclic(n) => Some(vec![*n]),
        BuiltinGroup::DirectProduct(a, b) => {
            let mut f = cyclic_factors(a)?;
            f.extend(cyclic_factors(b)?);
            Some(f)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega3(k: i64) -> C64 {
        root_of_unity(k, 3)
    }

    #[test]
    fn builtin_tables_are_orthogonal() {
        for name in ["z1", "z2", "z5", "z8", "k4", "s3", "z4xz2", "z2xs3", "k4xz3"] {
            let g: BuiltinGroup = name.parse().unwrap();
            let t = CharacterTable::for_builtin(&g).unwrap();
            assert!(t.orthogonality_residue() <= ORTHOGONALITY_TOL, "{name}");
            let order = g.build().order();
            assert_eq!(t.dims().iter().map(|d| d * d).sum::<usize>(), order, "{name}");
        }
    }

    #[test]
    fn abelian_table_matches_cyclic_ordering() {
        let g = BuiltinGroup::Cyclic(6).build();
        let a = CharacterTable::abelian(&g).unwrap();
        let c = CharacterTable::cyclic(6).unwrap();
        for l in 0..6 {
            for k in 0..6 {
                assert!((a.chars()[l][k] - c.chars()[l][k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pauli_rep_is_projective_with_sign_cocycle() {
        let rep = klein_pauli_rep();
        assert!(!rep.is_linear());
        assert!(rep.power_is_linear(2));
        assert!(!rep.power_is_linear(3));
        // X (iY) = -Z
        assert!((rep.cocycle(1, 2) + ONE).norm() < 1e-12);
    }

    #[test]
    fn pauli_square_character() {
        let rep = klein_pauli_rep();
        let t = CharacterTable::klein().unwrap();
        let (chi, _) = rep.compound_character(t.classes());
        let sq: Vec<C64> = chi.iter().map(|c| c * c).collect();
        assert!((sq[0] - C64::new(4.0, 0.0)).norm() < 1e-12);
        assert!(sq[1..].iter().all(|c| c.norm() < 1e-12));
        assert_eq!(multiplicities(&rep, &t, 2).unwrap().gammas, vec![1, 1, 1, 1]);
        assert!(matches!(
            multiplicities(&rep, &t, 1),
            Err(Error::ProjectivePower { power: 1 })
        ));
        assert_eq!(min_r(&rep, &t, DEFAULT_R_MAX).unwrap(), 2);
    }

    #[test]
    fn z3_example() {
        let rep = cyclic_diagonal_rep(3, 2);
        let t = CharacterTable::cyclic(3).unwrap();
        let (chi, spread) = rep.compound_character(t.classes());
        assert_eq!(spread, 0.0);
        assert!((chi[0] - C64::new(2.0, 0.0)).norm() < 1e-12);
        assert!((chi[1] + omega3(2)).norm() < 1e-12);
        assert!((chi[2] + omega3(1)).norm() < 1e-12);
        assert_eq!(multiplicities(&rep, &t, 1).unwrap().gammas, vec![1, 1, 0]);
        assert_eq!(multiplicities(&rep, &t, 2).unwrap().gammas, vec![1, 2, 1]);
        assert_eq!(min_r(&rep, &t, DEFAULT_R_MAX).unwrap(), 2);
    }

    #[test]
    fn s3_two_dim_powers() {
        let rep = s3_two_dim_rep();
        let t = CharacterTable::symmetric3().unwrap();
        let m2 = multiplicities(&rep, &t, 2).unwrap();
        assert_eq!(m2.gammas, vec![1, 1, 1]);
        assert!(!contains_regular(&m2, &t));
        let m3 = multiplicities(&rep, &t, 3).unwrap();
        assert_eq!(m3.gammas, vec![1, 1, 3]);
        assert!(contains_regular(&m3, &t));
        assert_eq!(min_r(&rep, &t, DEFAULT_R_MAX).unwrap(), 3);
    }

    #[test]
    fn regular_rep_traces_and_multiplicities() {
        for name in ["z2", "k4", "s3", "z3xz3"] {
            let g: BuiltinGroup = name.parse().unwrap();
            let group = g.build();
            let t = CharacterTable::for_builtin(&g).unwrap();
            let r = regular_rep(&group);
            let tr = r.element_traces();
            assert_eq!(tr[0].re as usize, group.order());
            assert!(tr[1..].iter().all(|c| c.norm() == 0.0));
            let mv = multiplicities(&r, &t, 1).unwrap();
            assert_eq!(mv.gammas, t.dims());
            assert!(contains_regular(&mv, &t));
        }
        let z2 = BuiltinGroup::Cyclic(2).build();
        let swap = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(regular_rep(&z2).matrix(1), &swap);
    }

    #[test]
    fn cyclic_diagonal_min_r_formula() {
        for n in 2..=12usize {
            let t = CharacterTable::cyclic(n).unwrap();
            for d in 2..=4usize.min(n) {
                let rep = cyclic_diagonal_rep(n, d);
                let expect = (n - 1).div_ceil(d - 1);
                assert_eq!(min_r(&rep, &t, DEFAULT_R_MAX).unwrap(), expect, "N={n} d={d}");
            }
        }
    }

    #[test]
    fn trivial_rep_is_not_faithful() {
        let g = BuiltinGroup::Cyclic(3).build();
        let t = CharacterTable::cyclic(3).unwrap();
        assert!(matches!(
            min_r(&trivial_rep(&g, 2), &t, 4),
            Err(Error::NotFaithful { .. })
        ));
    }

    #[test]
    fn r_max_too_small() {
        let rep = cyclic_diagonal_rep(8, 2);
        let t = CharacterTable::cyclic(8).unwrap();
        assert_eq!(min_r(&rep, &t, 3), Err(Error::RMaxExceeded { r_max: 3 }));
    }

    #[test]
    fn rejects_non_unitary_and_non_homomorphic() {
        let g = BuiltinGroup::Cyclic(2).build();
        let bad = vec![Matrix::identity(1), Matrix::diagonal(&[C64::new(2.0, 0.0)])];
        assert!(matches!(UnitaryRep::new(&g, bad), Err(Error::NotUnitary { element: 1, .. })));
        let g3 = BuiltinGroup::Cyclic(3).build();
        let bad = vec![
            Matrix::identity(2),
            crate::linalg::pauli_z(),
            crate::linalg::pauli_x(),
        ];
        assert!(matches!(UnitaryRep::new(&g3, bad), Err(Error::NotHomomorphism { .. })));
    }

    #[test]
    fn default_product_reps_are_faithful() {
        let g: BuiltinGroup = "z4xz2".parse().unwrap();
        let rep = default_rep(&g).unwrap();
        assert_eq!(rep.dim(), 3);
        assert!(rep.is_linear());
        rep.is_faithful().unwrap();
        let t = CharacterTable::for_builtin(&g).unwrap();
        min_r(&rep, &t, DEFAULT_R_MAX).unwrap();
        let g: BuiltinGroup = "z2xs3".parse().unwrap();
        let rep = default_rep(&g).unwrap();
        assert_eq!(rep.dim(), 4);
        rep.is_faithful().unwrap();
    }
}
