//! Dense state vectors over `n` qudits of dimension `d`.
//!
//! Qudit 0 is the most significant digit of the basis index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, norm, random_state_vector, Matrix, C64, ZERO};

pub const MAX_AMPLITUDES: usize = 1 << 24;
pub const NORM_TOL: f64 = 1e-10;
pub const PROJECTOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    d: usize,
    n: usize,
    amps: Vec<C64>,
}

fn checked_dim(d: usize, n: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::ShapeMismatch(format!("local dimension {d} < 2")));
    }
    if n == 0 {
        return Err(Error::ShapeMismatch("at least one qudit is required".into()));
    }
    let mut size: usize = 1;
    for _ in 0..n {
        size = size
            .checked_mul(d)
            .filter(|&s| s <= MAX_AMPLITUDES)
            .ok_or_else(|| {
                Error::ResourceLimit(format!("{d}^{n} amplitudes exceed {MAX_AMPLITUDES}"))
            })?;
    }
    Ok(size)
}

impl StateVector {
    pub fn basis(d: usize, n: usize, index: usize) -> Result<Self> {
        let size = checked_dim(d, n)?;
        if index >= size {
            return Err(Error::ShapeMismatch(format!("basis index {index} >= {size}")));
        }
        let mut amps = vec![ZERO; size];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { d, n, amps })
    }

    /// Takes amplitudes as given; the norm must be 1 within `1e-10`.
    pub fn from_amplitudes(d: usize, n: usize, amps: Vec<C64>) -> Result<Self> {
        let s = StateVector::unnormalized(d, n, amps)?;
        let nv = s.norm();
        if (nv - 1.0).abs() > NORM_TOL {
            return Err(Error::BadNormalization(format!("state norm is {nv}")));
        }
        Ok(s)
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(d: usize, n: usize, amps: Vec<C64>) -> Result<Self> {
        let mut s = StateVector::unnormalized(d, n, amps)?;
        let nv = s.norm();
        if nv <= 1e-300 {
            return Err(Error::BadNormalization("zero vector".into()));
        }
        s.amps.iter_mut().for_each(|a| *a /= nv);
        Ok(s)
    }

    fn unnormalized(d: usize, n: usize, amps: Vec<C64>) -> Result<Self> {
        let size = checked_dim(d, n)?;
        if amps.len() != size {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes given, {d}^{n} = {size} expected",
                amps.len()
            )));
        }
        Ok(StateVector { d, n, amps })
    }

    pub fn random<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Self> {
        let size = checked_dim(d, n)?;
        Ok(StateVector {
            d,
            n,
            amps: random_state_vector(size, rng),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn qudits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// `self ⊗ other`, `self` on the leading qudits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        if self.d != other.d {
            return Err(Error::ShapeMismatch(format!(
                "cannot join d = {} with d = {}",
                self.d, other.d
            )));
        }
        checked_dim(self.d, self.n + other.n)?;
        let mut amps = Vec::with_capacity(self.len() * other.len());
        for &a in &self.amps {
            for &b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector {
            d: self.d,
            n: self.n + other.n,
            amps,
        })
    }

    fn stride(&self, qudit: usize) -> usize {
        self.d.pow((self.n - 1 - qudit) as u32)
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.n {
                return Err(Error::BadTarget {
                    target: t,
                    qudits: self.n,
                });
            }
            if targets[..i].contains(&t) {
                return Err(Error::DuplicateTargets(t));
            }
        }
        Ok(())
    }

    fn check_unitary(&self, u: &Matrix, k: usize) -> Result<()> {
        let dim = self.d.pow(k as u32);
        if u.rows() != dim || u.cols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "operator is {}x{}, expected {dim}x{dim}",
                u.rows(),
                u.cols()
            )));
        }
        let dev = u.unitarity_deviation();
        if dev > PROJECTOR_TOL {
            return Err(Error::NotUnitary {
                element: 0,
                deviation: dev,
            });
        }
        Ok(())
    }

    /// `U` on a single qudit.
    pub fn apply_local(&mut self, u: &Matrix, target: usize) -> Result<()> {
        self.check_targets(&[target])?;
        self.check_unitary(u, 1)?;
        self.apply_local_unchecked(u, target);
        Ok(())
    }

    fn apply_local_unchecked(&mut self, u: &Matrix, target: usize) {
        let d = self.d;
        let stride = self.stride(target);
        let block = stride * d;
        let mut buf = vec![ZERO; d];
        for start in (0..self.amps.len()).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = self.amps[base + j * stride];
                }
                for i in 0..d {
                    let mut acc = ZERO;
                    for (j, b) in buf.iter().enumerate() {
                        acc += u[(i, j)] * b;
                    }
                    self.amps[base + i * stride] = acc;
                }
            }
        }
    }

    /// `U ⊗ U ⊗ ...` on every qudit in `targets`.
    pub fn apply_collective(&mut self, u: &Matrix, targets: &[usize]) -> Result<()> {
        self.check_targets(targets)?;
        self.check_unitary(u, 1)?;
        for &t in targets {
            self.apply_local_unchecked(u, t);
        }
        Ok(())
    }

    /// `U` on all qudits.
    pub fn apply_all(&mut self, u: &Matrix) -> Result<()> {
        let all: Vec<usize> = (0..self.n).collect();
        self.apply_collective(u, &all)
    }

    /// A `d^k x d^k` unitary on the ordered qudit block `targets`.
    pub fn apply_block(&mut self, u: &Matrix, targets: &[usize]) -> Result<()> {
        self.apply_controlled(&[], u, targets)
    }

    /// Applies `u` to `targets` on the branches where every control qudit
    /// holds its required value; other amplitudes are untouched.
    pub fn apply_controlled(
        &mut self,
        controls: &[(usize, usize)],
        u: &Matrix,
        targets: &[usize],
    ) -> Result<()> {
        self.check_targets(targets)?;
        let cqudits: Vec<usize> = controls.iter().map(|c| c.0).collect();
        self.check_targets(&cqudits)?;
        if let Some(&(c, _)) = controls.iter().find(|(c, _)| targets.contains(c)) {
            return Err(Error::ControlTargetOverlap(c));
        }
        if let Some(&(_, v)) = controls.iter().find(|(_, v)| *v >= self.d) {
            return Err(Error::ShapeMismatch(format!("control value {v} >= d")));
        }
        self.check_unitary(u, targets.len())?;
        self.apply_controlled_unchecked(controls, u, targets);
        Ok(())
    }

    pub(crate) fn apply_controlled_unchecked(
        &mut self,
        controls: &[(usize, usize)],
        u: &Matrix,
        targets: &[usize],
    ) {
        let d = self.d;
        let k = targets.len();
        let dim = u.rows();
        let offsets: Vec<usize> = (0..dim)
            .map(|p| {
                let mut rest = p;
                let mut off = 0;
                for j in (0..k).rev() {
                    off += (rest % d) * self.stride(targets[j]);
                    rest /= d;
                }
                off
            })
            .collect();
        let control_offset: usize = controls.iter().map(|&(q, v)| v * self.stride(q)).sum();
        let fixed: Vec<usize> = targets
            .iter()
            .copied()
            .chain(controls.iter().map(|c| c.0))
            .collect();
        let free: Vec<usize> = (0..self.n).filter(|q| !fixed.contains(q)).collect();
        let free_strides: Vec<usize> = free.iter().map(|&q| self.stride(q)).collect();
        let free_count = d.pow(free.len() as u32);
        let mut buf = vec![ZERO; dim];
        let mut digits = vec![0usize; free.len()];
        let mut base = control_offset;
        for step in 0..free_count {
            if step > 0 {
                let mut j = free.len();
                while j > 0 {
                    j -= 1;
                    digits[j] += 1;
                    base += free_strides[j];
                    if digits[j] < d {
                        break;
                    }
                    base -= d * free_strides[j];
                    digits[j] = 0;
                }
            }
            for (p, b) in buf.iter_mut().enumerate() {
                *b = self.amps[base + offsets[p]];
            }
            for i in 0..dim {
                let mut acc = ZERO;
                for (j, b) in buf.iter().enumerate() {
                    let c = u[(i, j)];
                    if c != ZERO {
                        acc += c * b;
                    }
                }
                self.amps[base + offsets[i]] = acc;
            }
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.same_shape(other)?;
        Ok(inner(&self.amps, &other.amps))
    }

    /// `|⟨a|b⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn same_shape(&self, other: &StateVector) -> Result<()> {
        if self.d != other.d || self.n != other.n {
            return Err(Error::ShapeMismatch(format!(
                "(d={}, n={}) vs (d={}, n={})",
                self.d, self.n, other.d, other.n
            )));
        }
        Ok(())
    }

    /// Splits every basis index into (digits on `subset`, digits elsewhere).
    fn split_index(&self, subset: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let rest: Vec<usize> = (0..self.n).filter(|q| !subset.contains(q)).collect();
        let mut sub_idx = vec![0; self.amps.len()];
        let mut rest_idx = vec![0; self.amps.len()];
        for idx in 0..self.amps.len() {
            let digit = |q: usize| (idx / self.stride(q)) % self.d;
            sub_idx[idx] = subset.iter().fold(0, |acc, &q| acc * self.d + digit(q));
            rest_idx[idx] = rest.iter().fold(0, |acc, &q| acc * self.d + digit(q));
        }
        (sub_idx, rest_idx)
    }

    /// `(⟨ket| ⊗ I) self`, unnormalized, over the qudits outside `subset`
    /// (kept in their original order).
    pub fn contract(&self, subset: &[usize], ket: &[C64]) -> Result<Vec<C64>> {
        self.check_targets(subset)?;
        let sub_dim = self.d.pow(subset.len() as u32);
        if ket.len() != sub_dim {
            return Err(Error::ShapeMismatch(format!(
                "ket has {} entries, subset dimension is {sub_dim}",
                ket.len()
            )));
        }
        let rest_dim = self.amps.len() / sub_dim;
        let mut out = vec![ZERO; rest_dim];
        if subset.iter().enumerate().all(|(i, &q)| q == i) {
            for (s, k) in ket.iter().enumerate() {
                if *k == ZERO {
                    continue;
                }
                let kc = k.conj();
                for (o, a) in out.iter_mut().zip(&self.amps[s * rest_dim..(s + 1) * rest_dim]) {
                    *o += kc * a;
                }
            }
        } else {
            let (sub_idx, rest_idx) = self.split_index(subset);
            for idx in 0..self.amps.len() {
                out[rest_idx[idx]] += ket[sub_idx[idx]].conj() * self.amps[idx];
            }
        }
        Ok(out)
    }

    /// Probabilities of rank-one outcomes `|k_i⟩⟨k_i| ⊗ I` on `subset` and of
    /// the complement `A_⊥`.
    pub fn outcome_probabilities(&self, subset: &[usize], kets: &[Vec<C64>]) -> Result<(Vec<f64>, f64)> {
        check_orthonormal(kets)?;
        let probs: Vec<f64> = kets
            .iter()
            .map(|k| self.contract(subset, k).map(|v| norm(&v).powi(2)))
            .collect::<Result<_>>()?;
        let total = self.norm().powi(2);
        let perp = (total - probs.iter().sum::<f64>()).max(0.0);
        Ok((probs, perp))
    }

    /// Projective measurement `{|k_i⟩⟨k_i|} ∪ {A_⊥}` on `subset`, sampled with
    /// a ChaCha8 stream seeded by `seed`.
    pub fn project_measure(&self, subset: &[usize], kets: &[Vec<C64>], seed: u64) -> Result<MeasurementRecord> {
        let (probs, perp) = self.outcome_probabilities(subset, kets)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: f64 = rng.gen::<f64>() * (probs.iter().sum::<f64>() + perp);
        let mut acc = 0.0;
        let mut outcome = Outcome::Perp;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            if x < acc {
                outcome = Outcome::Index(i);
                break;
            }
        }
        let state = self.post_measurement(subset, kets, outcome)?;
        let probability = match outcome {
            Outcome::Index(i) => probs[i],
            Outcome::Perp => perp,
        };
        Ok(MeasurementRecord {
            outcome,
            probability,
            probabilities: probs,
            perp_probability: perp,
            state,
            seed,
        })
    }

    /// Normalized post-measurement state for a given outcome.
    pub fn post_measurement(&self, subset: &[usize], kets: &[Vec<C64>], outcome: Outcome) -> Result<StateVector> {
        let projected = |k: &[C64]| -> Result<Vec<C64>> {
            let rest = self.contract(subset, k)?;
            Ok(self.embed(subset, k, &rest))
        };
        let amps = match outcome {
            Outcome::Index(i) => projected(&kets[i])?,
            Outcome::Perp => {
                let mut v = self.amps.clone();
                for k in kets {
                    for (a, p) in v.iter_mut().zip(projected(k)?) {
                        *a -= p;
                    }
                }
                v
            }
        };
        StateVector::normalized(self.d, self.n, amps)
    }

    /// `|ket⟩_subset ⊗ |rest⟩` as a full amplitude vector.
    fn embed(&self, subset: &[usize], ket: &[C64], rest: &[C64]) -> Vec<C64> {
        if subset.iter().enumerate().all(|(i, &q)| q == i) {
            let mut out = Vec::with_capacity(self.amps.len());
            for &k in ket {
                out.extend(rest.iter().map(|&r| k * r));
            }
            return out;
        }
        let (sub_idx, rest_idx) = self.split_index(subset);
        (0..self.amps.len())
            .map(|idx| ket[sub_idx[idx]] * rest[rest_idx[idx]])
            .collect()
    }

    pub fn dump(&self) -> StateDump {
        StateDump {
            d: self.d,
            n: self.n,
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn from_dump(dump: &StateDump) -> Result<Self> {
        let amps = dump
            .amplitudes
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        StateVector::from_amplitudes(dump.d, dump.n, amps)
    }
}

fn check_orthonormal(kets: &[Vec<C64>]) -> Result<()> {
    let mut worst: f64 = 0.0;
    for (i, a) in kets.iter().enumerate() {
        for (j, b) in kets.iter().enumerate().skip(i) {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner(a, b) - C64::new(expect, 0.0)).norm());
        }
    }
    if worst > PROJECTOR_TOL {
        return Err(Error::NonOrthogonalProjectors { overlap: worst });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Index(usize),
    Perp,
}

#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub outcome: Outcome,
    pub probability: f64,
    pub probabilities: Vec<f64>,
    pub perp_probability: f64,
    pub state: StateVector,
    pub seed: u64,
}

/// Serialized state: header plus `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub d: usize,
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
}
