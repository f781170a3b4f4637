//! Token states, encoding into the noiseless state, channel simulation and
//! decoding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::isotypic::{apply_power, IsotypicDecomposition};
use crate::linalg::{Matrix, C64, ZERO};
use crate::rep::{min_r, CharacterTable, UnitaryRep, DEFAULT_R_MAX};
use crate::statevec::{Outcome, StateVector};

pub const CONDITION_ONE_TOL: f64 = 1e-8;
pub const CONDITION_TWO_TOL: f64 = 1e-9;
/// Probability above which a complement outcome counts as a real leak.
pub const PERP_TOL: f64 = 1e-9;

/// `ψ = Σ_λ √(d_λ/|G|) Σ_n |λ, n, β=n⟩` from the leading copies of every irrep.
pub fn build_fiducial(decomp: &IsotypicDecomposition, table: &CharacterTable) -> Result<StateVector> {
    let order = table.group_order() as f64;
    let size = decomp.total_dim();
    let mut amps = vec![ZERO; size];
    for block in &decomp.blocks {
        let copies = block.vectors.first().map_or(0, Vec::len);
        if copies < block.dim {
            return Err(Error::RegularRepMissing {
                irrep: block.irrep,
                multiplicity: block.multiplicity,
                dim: block.dim,
            });
        }
        let w = (block.dim as f64 / order).sqrt();
        for n in 0..block.dim {
            for &(i, a) in &block.vectors[n][n] {
                amps[i] += a * w;
            }
        }
    }
    StateVector::normalized(decomp.d, decomp.r, amps)
}

/// The fiducial state, its `|G|` translates `ψ(g_i) = U_{g_i}^{⊗r} ψ`, and the
/// certified residues of both token conditions.
#[derive(Debug, Clone)]
pub struct TokenSet {
    rep: UnitaryRep,
    r: usize,
    fiducial: StateVector,
    tokens: Vec<StateVector>,
    gram_residue: f64,
    closure_residue: f64,
}

impl TokenSet {
    /// Tokens from a given fiducial; fails unless both conditions hold.
    pub fn build(rep: &UnitaryRep, fiducial: StateVector) -> Result<Self> {
        if fiducial.d() != rep.dim() {
            return Err(Error::DimensionMismatch(format!(
                "fiducial has d = {}, representation d = {}",
                fiducial.d(),
                rep.dim()
            )));
        }
        if (fiducial.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::BadNormalization(format!("fiducial norm {}", fiducial.norm())));
        }
        let r = fiducial.qudits();
        let all: Vec<usize> = (0..r).collect();
        let tokens: Vec<StateVector> = rep
            .group()
            .elements()
            .map(|g| {
                let mut t = fiducial.clone();
                t.apply_collective(rep.matrix(g), &all)?;
                Ok(t)
            })
            .collect::<Result<_>>()?;

        let mut gram_residue: f64 = 0.0;
        for (i, a) in tokens.iter().enumerate() {
            for (k, b) in tokens.iter().enumerate().skip(i) {
                let expect = if i == k { 1.0 } else { 0.0 };
                gram_residue = gram_residue.max((a.inner(b)? - C64::new(expect, 0.0)).norm());
            }
        }
        if gram_residue > CONDITION_ONE_TOL {
            return Err(Error::ConditionOneViolated {
                residue: gram_residue,
            });
        }

        let group = rep.group();
        let mut closure_residue: f64 = 0.0;
        for k in group.elements() {
            for i in group.elements() {
                let mut moved = tokens[i].clone();
                moved.apply_collective(rep.matrix(k), &all)?;
                let target = group.mul(k, i);
                let overlap = tokens[target].inner(&moved)?;
                let dev = (overlap - C64::new(1.0, 0.0)).norm();
                if dev > CONDITION_TWO_TOL {
                    return Err(Error::ConditionTwoViolated {
                        applied: k,
                        token: i,
                        expected: target,
                        overlap: format!("{:.6}{:+.6}i", overlap.re, overlap.im),
                    });
                }
                closure_residue = closure_residue.max(dev);
            }
        }
        Ok(TokenSet {
            rep: rep.clone(),
            r,
            fiducial,
            tokens,
            gram_residue,
            closure_residue,
        })
    }

    /// Minimal `r`, canonical decomposition, fiducial and tokens.
    pub fn canonical(rep: &UnitaryRep, table: &CharacterTable) -> Result<Self> {
        let r = min_r(rep, table, DEFAULT_R_MAX)?;
        TokenSet::with_r(rep, table, r)
    }

    pub fn with_r(rep: &UnitaryRep, table: &CharacterTable, r: usize) -> Result<Self> {
        let decomp = IsotypicDecomposition::leading(rep, r, table)?;
        let fiducial = build_fiducial(&decomp, table)?;
        TokenSet::build(rep, fiducial)
    }

    pub fn rep(&self) -> &UnitaryRep {
        &self.rep
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn d(&self) -> usize {
        self.rep.dim()
    }

    pub fn group_order(&self) -> usize {
        self.rep.group().order()
    }

    pub fn fiducial(&self) -> &StateVector {
        &self.fiducial
    }

    pub fn token(&self, g: usize) -> &StateVector {
        &self.tokens[g]
    }

    pub fn tokens(&self) -> &[StateVector] {
        &self.tokens
    }

    pub fn gram_residue(&self) -> f64 {
        self.gram_residue
    }

    pub fn closure_residue(&self) -> f64 {
        self.closure_residue
    }

    fn token_kets(&self) -> Vec<Vec<C64>> {
        self.tokens.iter().map(|t| t.amplitudes().to_vec()).collect()
    }

    fn token_qudits(&self) -> Vec<usize> {
        (0..self.r).collect()
    }

    /// `‖[U_g^{⊗r}, P_G]‖_max` over all `g`, with `P_G = (1/|G|) Σ |ψ(g)⟩⟨ψ(g)|`.
    pub fn commutator_residue(&self) -> f64 {
        let n = self.fiducial.len();
        let order = self.group_order() as f64;
        let mut p = Matrix::zeros(n, n);
        for t in &self.tokens {
            let a = t.amplitudes();
            for i in 0..n {
                for j in 0..n {
                    p[(i, j)] += a[i] * a[j].conj() / order;
                }
            }
        }
        let mut worst: f64 = 0.0;
        for g in self.rep.group().elements() {
            let u = self.rep.matrix(g);
            for j in 0..n {
                let col = p.column(j);
                let up = apply_power(u, self.r, &col, n);
                let mut e = vec![ZERO; n];
                e[j] = C64::new(1.0, 0.0);
                let ue = apply_power(u, self.r, &e, n);
                let pu = p.apply(&ue);
                for (x, y) in up.iter().zip(&pu) {
                    worst = worst.max((x - y).norm());
                }
            }
        }
        worst
    }
}

/// `χ_φ = (1/√|G|) Σ_g ψ(g) ⊗ U_g^{⊗m} φ`.
pub fn encode(tokens: &TokenSet, message: &StateVector) -> Result<StateVector> {
    if message.d() != tokens.d() {
        return Err(Error::DimensionMismatch(format!(
            "message has d = {}, representation d = {}",
            message.d(),
            tokens.d()
        )));
    }
    let m = message.qudits();
    let all: Vec<usize> = (0..m).collect();
    let scale = 1.0 / (tokens.group_order() as f64).sqrt();
    let size = tokens.fiducial.len() * message.len();
    let mut amps = vec![ZERO; size];
    for g in tokens.rep.group().elements() {
        let mut moved = message.clone();
        moved.apply_collective(tokens.rep.matrix(g), &all)?;
        let joint = tokens.tokens[g].tensor(&moved)?;
        for (a, b) in amps.iter_mut().zip(joint.amplitudes()) {
            *a += b * scale;
        }
    }
    StateVector::from_amplitudes(tokens.d(), tokens.r + m, amps)
}

/// Channel description: a probability per element, or one fixed element.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Distribution(Vec<f64>),
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub struct ChannelSpec {
    rep: UnitaryRep,
    kind: ChannelKind,
}

impl ChannelSpec {
    pub fn new(rep: &UnitaryRep, kind: ChannelKind) -> Result<Self> {
        let n = rep.group().order();
        match &kind {
            ChannelKind::Fixed(g) if *g >= n => {
                return Err(Error::BadDistribution(format!("element {g} out of range")));
            }
            ChannelKind::Distribution(p) => {
                if p.len() != n {
                    return Err(Error::BadDistribution(format!(
                        "{} probabilities for {n} elements",
                        p.len()
                    )));
                }
                if p.iter().any(|&x| x < 0.0 || !x.is_finite()) {
                    return Err(Error::BadDistribution("negative or non-finite probability".into()));
                }
                let total: f64 = p.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::BadDistribution(format!("probabilities sum to {total}")));
                }
            }
            ChannelKind::Fixed(_) => {}
        }
        Ok(ChannelSpec {
            rep: rep.clone(),
            kind,
        })
    }

    pub fn uniform(rep: &UnitaryRep) -> Self {
        let n = rep.group().order();
        ChannelSpec {
            rep: rep.clone(),
            kind: ChannelKind::Distribution(vec![1.0 / n as f64; n]),
        }
    }

    pub fn fixed(rep: &UnitaryRep, g: usize) -> Result<Self> {
        ChannelSpec::new(rep, ChannelKind::Fixed(g))
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    /// Draws the channel element for a seed.
    pub fn sample(&self, seed: u64) -> usize {
        match &self.kind {
            ChannelKind::Fixed(g) => *g,
            ChannelKind::Distribution(p) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let x: f64 = rng.gen();
                let mut acc = 0.0;
                for (g, &pg) in p.iter().enumerate() {
                    acc += pg;
                    if x < acc {
                        return g;
                    }
                }
                p.iter().rposition(|&pg| pg > 0.0).unwrap_or(0)
            }
        }
    }
}

/// Applies `U_g^{⊗(r+m)}` for a sampled (or fixed) `g`; returns it alongside.
pub fn transmit(channel: &ChannelSpec, state: &StateVector, seed: u64) -> Result<(StateVector, usize)> {
    let g = channel.sample(seed);
    let mut out = state.clone();
    out.apply_all(channel.rep.matrix(g))?;
    Ok((out, g))
}

#[derive(Debug, Clone)]
pub struct Decoded {
    pub message: StateVector,
    pub outcome: usize,
    pub probability: f64,
    pub seed: u64,
}

/// Measures `{|ψ(g_i)⟩⟨ψ(g_i)|} ∪ {A_⊥}` on the first `r` qudits, then undoes
/// `U_{g_i}` on each message qudit separately.
pub fn decode(tokens: &TokenSet, received: &StateVector, seed: u64) -> Result<Decoded> {
    check_received(tokens, received)?;
    let kets = tokens.token_kets();
    let qudits = tokens.token_qudits();
    let rec = received.project_measure(&qudits, &kets, seed)?;
    let i = match rec.outcome {
        Outcome::Index(i) => i,
        Outcome::Perp => {
            return Err(Error::PerpOutcome {
                probability: rec.perp_probability,
            })
        }
    };
    if rec.perp_probability > PERP_TOL {
        return Err(Error::PerpOutcome {
            probability: rec.perp_probability,
        });
    }
    let message = correct(tokens, received, i)?;
    Ok(Decoded {
        message,
        outcome: i,
        probability: rec.probability,
        seed,
    })
}

/// Decoding as if outcome `i` had been observed.
pub fn decode_with_outcome(tokens: &TokenSet, received: &StateVector, i: usize) -> Result<StateVector> {
    check_received(tokens, received)?;
    if i >= tokens.group_order() {
        return Err(Error::BadTarget {
            target: i,
            qudits: tokens.group_order(),
        });
    }
    correct(tokens, received, i)
}

fn correct(tokens: &TokenSet, received: &StateVector, i: usize) -> Result<StateVector> {
    let rest = received.contract(&tokens.token_qudits(), tokens.tokens[i].amplitudes())?;
    let m = received.qudits() - tokens.r;
    let mut message = StateVector::normalized(tokens.d(), m, rest)?;
    let inv = tokens.rep.matrix(tokens.rep.group().inverse(i));
    for q in 0..m {
        message.apply_local(inv, q)?;
    }
    Ok(message)
}

fn check_received(tokens: &TokenSet, received: &StateVector) -> Result<()> {
    if received.d() != tokens.d() || received.qudits() <= tokens.r {
        return Err(Error::ShapeMismatch(format!(
            "received state has {} qudits of d = {}; need more than r = {} of d = {}",
            received.qudits(),
            received.d(),
            tokens.r,
            tokens.d()
        )));
    }
    Ok(())
}

/// Exact decode outcome probabilities and the complement probability.
pub fn outcome_probabilities(tokens: &TokenSet, received: &StateVector) -> Result<(Vec<f64>, f64)> {
    check_received(tokens, received)?;
    received.outcome_probabilities(&tokens.token_qudits(), &tokens.token_kets())
}

/// Alice sends `ψ(g_i) ⊗ U_{g_i}^{⊗m} φ`; after channel element `g_k` Bob's
/// measurement reveals `g_k g_i` and the correction restores `φ`.
pub fn measure_and_realign(
    tokens: &TokenSet,
    message: &StateVector,
    alice_element: usize,
    channel: &ChannelSpec,
    seed: u64,
) -> Result<(Decoded, usize)> {
    let m = message.qudits();
    let all: Vec<usize> = (0..m).collect();
    let mut moved = message.clone();
    moved.apply_collective(tokens.rep.matrix(alice_element), &all)?;
    let sent = tokens.tokens[alice_element].tensor(&moved)?;
    let (channel_seed, measure_seed) = split_seed(seed);
    let (received, applied) = transmit(channel, &sent, channel_seed)?;
    Ok((decode(tokens, &received, measure_seed)?, applied))
}

/// `max |1 − ⟨χ_φ|U_g^{⊗(r+m)}|χ_φ⟩|` over random messages and all `g`.
pub fn invariance_certificate(tokens: &TokenSet, m: usize, trials: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let phi = StateVector::random(tokens.d(), m, &mut rng)?;
        let chi = encode(tokens, &phi)?;
        for g in tokens.rep.group().elements() {
            let mut moved = chi.clone();
            moved.apply_all(tokens.rep.matrix(g))?;
            worst = worst.max((chi.inner(&moved)? - C64::new(1.0, 0.0)).norm());
        }
    }
    Ok(worst)
}

/// Channel and measurement seeds derived from one user seed.
pub fn split_seed(seed: u64) -> (u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (rng.gen(), rng.gen())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rate {
    pub numerator: usize,
    pub denominator: usize,
}

impl Rate {
    /// Logical qudits per physical qudit, `m/(m+r)`.
    pub fn new(m: usize, r: usize) -> Self {
        Rate {
            numerator: m,
            denominator: m + r,
        }
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub group_order: usize,
    pub d: usize,
    pub m: usize,
    pub r: usize,
    pub rate: f64,
    pub rate_exact: Rate,
    pub fidelity: f64,
    pub outcome: usize,
    pub outcome_probability: f64,
    pub perp_probability: f64,
    pub applied_element: usize,
    pub seed: u64,
    pub channel_seed: u64,
    pub measurement_seed: u64,
}

/// Encode, transmit, decode; reports the fidelity with the input message.
pub fn roundtrip(
    tokens: &TokenSet,
    message: &StateVector,
    channel: &ChannelSpec,
    seed: u64,
) -> Result<(StateVector, ProtocolReport)> {
    let (channel_seed, measurement_seed) = split_seed(seed);
    let chi = encode(tokens, message)?;
    let (received, applied) = transmit(channel, &chi, channel_seed)?;
    let (_, perp) = outcome_probabilities(tokens, &received)?;
    let decoded = decode(tokens, &received, measurement_seed)?;
    let fidelity = decoded.message.fidelity(message)?;
    let m = message.qudits();
    let rate = Rate::new(m, tokens.r);
    Ok((
        decoded.message,
        ProtocolReport {
            group_order: tokens.group_order(),
            d: tokens.d(),
            m,
            r: tokens.r,
            rate: rate.value(),
            rate_exact: rate,
            fidelity,
            outcome: decoded.outcome,
            outcome_probability: decoded.probability,
            perp_probability: perp,
            applied_element: applied,
            seed,
            channel_seed,
            measurement_seed,
        },
    ))
}
