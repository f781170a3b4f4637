//! Finite groups given by their Cayley table.
//!
//! Elements are plain indices `0..order`. After validation the identity is
//! always index 0.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_GROUP_ORDER: usize = 64;

/// Group data as read from a file, before any checking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGroup {
    pub order: usize,
    pub cayley: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteGroup {
    order: usize,
    cayley: Vec<usize>,
    inverse: Vec<usize>,
    labels: Vec<String>,
}

impl FiniteGroup {
    /// Checks the group axioms and relabels so that the identity is index 0.
    ///
    /// The reported reason names the first offending entry or triple in
    /// lexicographic order.
    pub fn validate(raw: &RawGroup) -> Result<FiniteGroup> {
        let n = raw.order;
        if n == 0 {
            return Err(Error::NotAGroup("order must be positive".into()));
        }
        if n > MAX_GROUP_ORDER {
            return Err(Error::GroupTooLarge {
                order: n,
                max: MAX_GROUP_ORDER,
            });
        }
        if raw.cayley.len() != n {
            return Err(Error::NotAGroup(format!(
                "cayley table has {} rows, expected {n}",
                raw.cayley.len()
            )));
        }
        for (i, row) in raw.cayley.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotAGroup(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some((k, &v)) = row.iter().enumerate().find(|(_, &v)| v >= n) {
                return Err(Error::NotAGroup(format!(
                    "entry [{i}][{k}] = {v} is out of range (closure)"
                )));
            }
        }
        if let Some(labels) = &raw.labels {
            if labels.len() != n {
                return Err(Error::NotAGroup(format!(
                    "{} labels given for {n} elements",
                    labels.len()
                )));
            }
        }
        let t = |i: usize, k: usize| raw.cayley[i][k];

        let identity = (0..n)
            .find(|&e| (0..n).all(|k| t(e, k) == k && t(k, e) == k))
            .ok_or_else(|| Error::NotAGroup("no two-sided identity element".into()))?;

        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let left = t(t(i, j), k);
                    let right = t(i, t(j, k));
                    if left != right {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails for ({i}, {j}, {k}): ({i}*{j})*{k} = {left} but {i}*({j}*{k}) = {right}"
                        )));
                    }
                }
            }
        }

        for i in 0..n {
            let row: BTreeSet<usize> = (0..n).map(|k| t(i, k)).collect();
            if row.len() != n {
                return Err(Error::NotAGroup(format!("row {i} is not a permutation")));
            }
            let col: BTreeSet<usize> = (0..n).map(|k| t(k, i)).collect();
            if col.len() != n {
                return Err(Error::NotAGroup(format!("column {i} is not a permutation")));
            }
        }

        // Relabel by swapping the identity into slot 0.
        let relabel = |x: usize| -> usize {
            if x == identity {
                0
            } else if x == 0 {
                identity
            } else {
                x
            }
        };
        let mut cayley = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                cayley[relabel(i) * n + relabel(k)] = relabel(t(i, k));
            }
        }
        let mut inverse = vec![usize::MAX; n];
        for i in 0..n {
            let inv = (0..n)
                .find(|&k| cayley[i * n + k] == 0)
                .ok_or_else(|| Error::NotAGroup(format!("element {i} has no inverse")))?;
            if cayley[inv * n + i] != 0 {
                return Err(Error::NotAGroup(format!(
                    "right inverse of element {i} is not a left inverse"
                )));
            }
            inverse[i] = inv;
        }
        let labels = match &raw.labels {
            Some(l) => (0..n).map(|x| l[relabel(x)].clone()).collect(),
            None => (0..n).map(|x| relabel(x).to_string()).collect(),
        };
        Ok(FiniteGroup {
            order: n,
            cayley,
            inverse,
            labels,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a * self.order + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn cayley_rows(&self) -> Vec<Vec<usize>> {
        self.cayley.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn to_raw(&self) -> RawGroup {
        RawGroup {
            order: self.order,
            cayley: self.cayley_rows(),
            labels: Some(self.labels.clone()),
        }
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|i| (0..i).all(|k| self.mul(i, k) == self.mul(k, i)))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// `g^e` by repeated multiplication.
    pub fn pow(&self, g: usize, e: usize) -> usize {
        (0..e).fold(0, |acc, _| self.mul(acc, g))
    }

    /// Sorted element set of the subgroup generated by `gens`.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut frontier = vec![0];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    frontier.push(y);
                }
            }
        }
        (0..self.order).filter(|&x| seen[x]).collect()
    }

    pub fn conjugacy_classes(&self) -> ConjugacyClasses {
        ConjugacyClasses::of(self)
    }
}

/// Partition of the elements into conjugacy classes, sorted by each class's
/// smallest element (so the identity class comes first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugacyClasses {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl ConjugacyClasses {
    pub fn of(group: &FiniteGroup) -> Self {
        let n = group.order();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for g in 0..n {
            if class_of[g] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let members: BTreeSet<usize> = (0..n)
                .map(|l| group.mul(group.mul(l, g), group.inverse(l)))
                .collect();
            for &m in &members {
                class_of[m] = id;
            }
            classes.push(members.into_iter().collect());
        }
        // Classes are discovered in order of their smallest element already.
        ConjugacyClasses { classes, class_of }
    }

    pub fn count(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    pub fn representative(&self, class: usize) -> usize {
        self.classes[class][0]
    }
}

/// The groups used throughout the examples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltinGroup {
    Cyclic(usize),
    Klein,
    Symmetric3,
    DirectProduct(Box<BuiltinGroup>, Box<BuiltinGroup>),
}

impl BuiltinGroup {
    pub fn build(&self) -> FiniteGroup {
        let raw = match self {
            BuiltinGroup::Cyclic(n) => cyclic_raw(*n),
            BuiltinGroup::Klein => klein_raw(),
            BuiltinGroup::Symmetric3 => s3_raw(),
            BuiltinGroup::DirectProduct(a, b) => return direct_product(&a.build(), &b.build()),
        };
        FiniteGroup::validate(&raw).expect("built-in group tables are valid")
    }

    /// Generators with unique exponent decomposition, for abelian built-ins.
    pub fn abelian_generators(&self) -> Option<Vec<usize>> {
        match self {
            BuiltinGroup::Cyclic(1) => Some(vec![]),
            BuiltinGroup::Cyclic(_) => Some(vec![1]),
            // x and z
            BuiltinGroup::Klein => Some(vec![1, 3]),
            BuiltinGroup::Symmetric3 => None,
            BuiltinGroup::DirectProduct(a, b) => {
                let ga = a.abelian_generators()?;
                let gb = b.abelian_generators()?;
                let nb = b.build().order();
                let mut gens: Vec<usize> = ga.iter().map(|&g| g * nb).collect();
                gens.extend(gb);
                Some(gens)
            }
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for BuiltinGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinGroup::Cyclic(n) => write!(f, "z{n}"),
            BuiltinGroup::Klein => write!(f, "k4"),
            BuiltinGroup::Symmetric3 => write!(f, "s3"),
            BuiltinGroup::DirectProduct(a, b) => write!(f, "{a}x{b}"),
        }
    }
}

impl FromStr for BuiltinGroup {
    type Err = Error;

    /// `z<N>`, `k4`, `s3`, or factors joined by `x` (`z4xz2`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let factors: Vec<&str> = s.split('x').collect();
        let parse_one = |f: &str| -> Result<BuiltinGroup> {
            match f {
                "k4" => Ok(BuiltinGroup::Klein),
                "s3" => Ok(BuiltinGroup::Symmetric3),
                _ => {
                    let n = f
                        .strip_prefix('z')
                        .and_then(|n| n.parse::<usize>().ok())
                        .filter(|&n| n >= 1)
                        .ok_or_else(|| Error::Parse(format!("unknown built-in group '{f}'")))?;
                    Ok(BuiltinGroup::Cyclic(n))
                }
            }
        };
        let mut parts = factors.into_iter().map(parse_one);
        let first = parts
            .next()
            .ok_or_else(|| Error::Parse("empty group name".into()))??;
        parts.try_fold(first, |acc, next| {
            Ok(BuiltinGroup::DirectProduct(Box::new(acc), Box::new(next?)))
        })
    }
}

fn cyclic_raw(n: usize) -> RawGroup {
    assert!(n >= 1);
    RawGroup {
        order: n,
        cayley: (0..n).map(|i| (0..n).map(|k| (i + k) % n).collect()).collect(),
        labels: Some((0..n).map(|i| i.to_string()).collect()),
    }
}

/// `{e, x, y, z}` with `x z = y`; the index law is bitwise xor.
fn klein_raw() -> RawGroup {
    RawGroup {
        order: 4,
        cayley: (0..4).map(|i| (0..4).map(|k| i ^ k).collect()).collect(),
        labels: Some(vec!["e".into(), "x".into(), "y".into(), "z".into()]),
    }
}

/// Permutations of {1,2,3} in the order e, (123), (132), (12)(3), (13)(2), (23)(1).
/// Product `g h` applies `h` first.
fn s3_raw() -> RawGroup {
    // images of (1, 2, 3)
    let perms: [[usize; 3]; 6] = [
        [1, 2, 3],
        [2, 3, 1],
        [3, 1, 2],
        [2, 1, 3],
        [3, 2, 1],
        [1, 3, 2],
    ];
    let index_of = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    let compose = |g: [usize; 3], h: [usize; 3]| [g[h[0] - 1], g[h[1] - 1], g[h[2] - 1]];
    let cayley = (0..6)
        .map(|i| (0..6).map(|k| index_of(compose(perms[i], perms[k]))).collect())
        .collect();
    let labels = ["(1)(2)(3)", "(123)", "(132)", "(12)(3)", "(13)(2)", "(23)(1)"];
    RawGroup {
        order: 6,
        cayley,
        labels: Some(labels.iter().map(|s| s.to_string()).collect()),
    }
}

/// `A x B` with element `(a, b)` at index `a * |B| + b`.
pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
    let (na, nb) = (a.order(), b.order());
    let n = na * nb;
    let cayley = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| a.mul(i / nb, k / nb) * nb + b.mul(i % nb, k % nb))
                .collect()
        })
        .collect();
    let labels = (0..n)
        .map(|i| format!("({},{})", a.label(i / nb), b.label(i % nb)))
        .collect();
    let raw = RawGroup {
        order: n,
        cayley,
        labels: Some(labels),
    };
    FiniteGroup::validate(&raw).expect("direct product of groups is a group")
}

/// Finds generators `g_1..g_k` such that every element is uniquely
/// `g_1^{l_1} ... g_k^{l_k}` with `0 <= l_j < ord(g_j)`.
///
/// Greedy: repeatedly take the element of largest order whose cyclic
/// subgroup meets the span so far trivially.
pub fn abelian_basis(group: &FiniteGroup) -> Result<Vec<usize>> {
    if !group.is_abelian() {
        return Err(Error::NotAbelian);
    }
    let mut gens = Vec::new();
    let mut span = vec![0usize];
    while span.len() < group.order() {
        let in_span: BTreeSet<usize> = span.iter().copied().collect();
        let candidate = group
            .elements()
            .filter(|&g| {
                let cyc = group.generated_subgroup(&[g]);
                cyc.iter().all(|x| *x == 0 || !in_span.contains(x))
            })
            .max_by_key(|&g| (group.element_order(g), std::cmp::Reverse(g)));
        let g = candidate.ok_or_else(|| {
            Error::BadGenerators("greedy cyclic decomposition got stuck".into())
        })?;
        gens.push(g);
        span = group.generated_subgroup(&gens);
    }
    Ok(gens)
}
