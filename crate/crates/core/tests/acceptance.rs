//! Acceptance checks, one line per criterion. Runs as a plain binary so the
//! output order is fixed; exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};

use dfscodec::circuit::{
    build_encoding_circuit, register_network, synth_w_cyclic, synth_w_general, Layout, Path,
    TStage,
};
use dfscodec::codec::{
    encode, measure_and_realign, outcome_probabilities, roundtrip, ChannelKind, ChannelSpec, Rate,
    TokenSet,
};
use dfscodec::linalg::C64;
use dfscodec::rep::{
    cyclic_diagonal_rep, klein_pauli_rep, min_r, multiplicities, s3_two_dim_rep, CharacterTable,
    UnitaryRep, DEFAULT_R_MAX,
};
use dfscodec::statevec::StateVector;
use dfscodec::su2::{
    block_form, block_structure_certificate, euler_su2, logical_qubit_roundtrip, random_angles,
    EulerAngles, LogicalEncoding, Su2Basis,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn protocol_groups() -> Vec<(&'static str, UnitaryRep, CharacterTable)> {
    vec![
        ("K4", klein_pauli_rep(), CharacterTable::klein().unwrap()),
        ("Z3", cyclic_diagonal_rep(3, 2), CharacterTable::cyclic(3).unwrap()),
        ("Z4", cyclic_diagonal_rep(4, 2), CharacterTable::cyclic(4).unwrap()),
        ("Z8", cyclic_diagonal_rep(8, 2), CharacterTable::cyclic(8).unwrap()),
        ("Z3/d=3", cyclic_diagonal_rep(3, 3), CharacterTable::cyclic(3).unwrap()),
        ("S3", s3_two_dim_rep(), CharacterTable::symmetric3().unwrap()),
    ]
}

fn multiplicity_tables() -> Check {
    let z3 = cyclic_diagonal_rep(3, 2);
    let z3t = CharacterTable::cyclic(3).map_err(e)?;
    let s3 = s3_two_dim_rep();
    let s3t = CharacterTable::symmetric3().map_err(e)?;
    let cases: [(&UnitaryRep, &CharacterTable, usize, &[usize]); 5] = [
        (&z3, &z3t, 1, &[1, 1, 0]),
        (&z3, &z3t, 2, &[1, 2, 1]),
        (&s3, &s3t, 1, &[0, 0, 1]),
        (&s3, &s3t, 2, &[1, 1, 1]),
        (&s3, &s3t, 3, &[1, 1, 3]),
    ];
    let mut worst: f64 = 0.0;
    for (rep, table, n, want) in cases {
        let mv = multiplicities(rep, table, n).map_err(e)?;
        ensure(mv.gammas == want, format!("n={n}: got {:?}, want {want:?}", mv.gammas))?;
        worst = worst.max(mv.residue);
    }
    ensure(worst < 1e-6, format!("residue {worst:e}"))?;
    Ok(format!("5 tables match, max residue {worst:.1e}"))
}

fn min_r_values() -> Check {
    let z3 = min_r(&cyclic_diagonal_rep(3, 2), &CharacterTable::cyclic(3).map_err(e)?, DEFAULT_R_MAX)
        .map_err(e)?;
    ensure(z3 == 2, format!("Z3: {z3}"))?;
    let s3 = min_r(&s3_two_dim_rep(), &CharacterTable::symmetric3().map_err(e)?, DEFAULT_R_MAX)
        .map_err(e)?;
    ensure(s3 == 3, format!("S3: {s3}"))?;
    let mut cases = 0;
    for n in 2..=8usize {
        let table = CharacterTable::cyclic(n).map_err(e)?;
        for d in [2usize, 3] {
            let r = min_r(&cyclic_diagonal_rep(n, d), &table, DEFAULT_R_MAX).map_err(e)?;
            let want = (n - 1).div_ceil(d - 1);
            ensure(r == want, format!("Z{n} d={d}: {r} vs {want}"))?;
            cases += 1;
        }
    }
    Ok(format!("Z3 → 2, S3 → 3, {cases} (N,d) cases match ⌈(N−1)/(d−1)⌉"))
}

fn close(s: &StateVector, want: &[C64], tol: f64) -> bool {
    s.amplitudes().len() == want.len()
        && s.amplitudes().iter().zip(want).all(|(a, b)| (a - b).norm() <= tol)
}

fn token_fixtures() -> Check {
    let re = |x: f64| C64::new(x, 0.0);
    let h = 0.5f64.sqrt();
    let z = re(0.0);
    let k4 = TokenSet::canonical(&klein_pauli_rep(), &CharacterTable::klein().map_err(e)?).map_err(e)?;
    let want = [
        [re(h), re(h), z, z],
        [z, z, re(h), re(h)],
        [z, z, re(-h), re(h)],
        [re(h), re(-h), z, z],
    ];
    ensure(close(k4.fiducial(), &want[0], 1e-12), "K4 fiducial is not |0+⟩")?;
    for (g, w) in want.iter().enumerate() {
        ensure(close(k4.token(g), w, 1e-12), format!("K4 token {g}"))?;
    }

    let z3 = TokenSet::canonical(&cyclic_diagonal_rep(3, 2), &CharacterTable::cyclic(3).map_err(e)?)
        .map_err(e)?;
    let t = 1.0 / 3f64.sqrt();
    ensure(close(z3.fiducial(), &[re(t), re(t), z, re(t)], 1e-12), "Z3 fiducial")?;

    for n in 2..=8usize {
        let ts = TokenSet::canonical(&cyclic_diagonal_rep(n, 2), &CharacterTable::cyclic(n).map_err(e)?)
            .map_err(e)?;
        let r = n - 1;
        // |0..0 1..1⟩ with λ trailing ones
        let mut want = vec![z; 1 << r];
        for lambda in 0..n {
            want[(1usize << lambda) - 1] = re(1.0 / (n as f64).sqrt());
        }
        ensure(close(ts.fiducial(), &want, 1e-12), format!("Z{n} staircase"))?;
    }
    Ok("K4 |0+⟩ with {|0+⟩,|1+⟩,−|1−⟩,|0−⟩}, Z3 and Z2..Z8 staircase fiducials exact".into())
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn protocol_exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut runs = 0;
    let mut worst_fid: f64 = 1.0;
    let mut worst_perp: f64 = 0.0;
    for (name, rep, table) in protocol_groups() {
        let tokens = TokenSet::canonical(&rep, &table).map_err(e)?;
        let d = rep.dim();
        let mut channels: Vec<ChannelSpec> = rep
            .group()
            .elements()
            .map(|g| ChannelSpec::fixed(&rep, g))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        for _ in 0..5 {
            let p = random_distribution(&mut rng, rep.group().order());
            channels.push(ChannelSpec::new(&rep, ChannelKind::Distribution(p)).map_err(e)?);
        }
        for channel in &channels {
            for k in 0..20 {
                let m = 1 + k % 2;
                let phi = StateVector::random(d, m, &mut rng).map_err(e)?;
                let (_, report) = roundtrip(&tokens, &phi, channel, rng.gen()).map_err(e)?;
                worst_fid = worst_fid.min(report.fidelity);
                worst_perp = worst_perp.max(report.perp_probability);
                ensure(
                    report.fidelity >= 1.0 - 1e-9 && report.perp_probability <= 1e-10,
                    format!("{name}: fidelity {} perp {:e}", report.fidelity, report.perp_probability),
                )?;
                runs += 1;
            }
        }
    }
    Ok(format!(
        "{runs} round trips, min fidelity {worst_fid:.12}, max A_⊥ probability {worst_perp:.1e}"
    ))
}

fn hiding() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for (_, rep, table) in protocol_groups() {
        let tokens = TokenSet::canonical(&rep, &table).map_err(e)?;
        let order = rep.group().order() as f64;
        for m in 1..=2 {
            let phi = StateVector::random(rep.dim(), m, &mut rng).map_err(e)?;
            let chi = encode(&tokens, &phi).map_err(e)?;
            for g in rep.group().elements() {
                let mut received = chi.clone();
                received.apply_all(rep.matrix(g)).map_err(e)?;
                let (probs, _) = outcome_probabilities(&tokens, &received).map_err(e)?;
                for p in probs {
                    worst = worst.max((p - 1.0 / order).abs());
                }
            }
        }
    }
    ensure(worst <= 1e-10, format!("deviation {worst:e}"))?;
    Ok(format!("every outcome probability is 1/|G| within {worst:.1e}"))
}

fn gate_counts() -> Check {
    let k4 = klein_pauli_rep();
    for (m, want) in [(3usize, 20usize), (1, 12)] {
        let plan = synth_w_general(&k4, m, &Layout::minimal(2, m)).map_err(e)?;
        let summed: usize = plan.gates.iter().map(|g| g.cost).sum();
        ensure(summed == want, format!("K4 m={m}: {summed} gates"))?;
    }
    for m in 1..=4 {
        let plan = synth_w_general(&k4, m, &Layout::minimal(2, m)).map_err(e)?;
        ensure(plan.logical_depth() == 12, format!("K4 depth m={m}: {}", plan.logical_depth()))?;
    }
    let z8 = cyclic_diagonal_rep(8, 2);
    let cyc = synth_w_cyclic(&z8, 4, &Layout::minimal(3, 4), 1).map_err(e)?;
    let controlled = cyc.gates.iter().filter(|g| g.name() == "controlled").count();
    ensure(controlled == 12, format!("Z8 cyclic m=4: {controlled} controlled gates"))?;
    let bits: Vec<usize> = (0..3).rev().collect();
    let net = register_network(&Layout::separate(3, 7, 0), &bits).map_err(e)?;
    let cnots = net.gates.iter().filter(|g| g.name() == "cnot").count();
    ensure(cnots == 10, format!("Z8 register network: {cnots} CNOTs"))?;
    Ok("K4 m=3 → 20, m=1 → 12, depth 12 for m=1..4; Z8 cyclic m=4 → 12 controlled; T-stage 10 CNOTs".into())
}

type EquivCase = (String, UnitaryRep, CharacterTable, Vec<(Path, TStage)>);

fn circuit_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases: Vec<EquivCase> = vec![(
        "K4".into(),
        klein_pauli_rep(),
        CharacterTable::klein().unwrap(),
        vec![(Path::General, TStage::Direct), (Path::Abelian, TStage::Direct)],
    )];
    for n in 2..=8usize {
        let mut paths = vec![
            (Path::General, TStage::Direct),
            (Path::Abelian, TStage::Direct),
            (Path::Cyclic, TStage::Direct),
        ];
        if n.is_power_of_two() {
            paths.push((Path::Cyclic, TStage::Register));
        }
        cases.push((format!("Z{n}"), cyclic_diagonal_rep(n, 2), CharacterTable::cyclic(n).unwrap(), paths));
    }
    let mut count = 0;
    let mut worst: f64 = 1.0;
    for (name, rep, table, paths) in &cases {
        for &(path, t) in paths {
            for m in 1..=2 {
                let circ = build_encoding_circuit(rep, table, m, path, t).map_err(e)?;
                for _ in 0..10 {
                    let phi = StateVector::random(2, m, &mut rng).map_err(e)?;
                    let (fid, _) = circ.verify(&phi).map_err(e)?;
                    ensure(fid >= 1.0 - 1e-9, format!("{name} {path:?}/{t:?} m={m}: {fid}"))?;
                    worst = worst.min(fid);
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} simulated encodings, min fidelity {worst:.12}"))
}

fn measure_realign() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pairs = 0;
    for (rep, table) in [
        (klein_pauli_rep(), CharacterTable::klein().unwrap()),
        (cyclic_diagonal_rep(3, 2), CharacterTable::cyclic(3).unwrap()),
    ] {
        let tokens = TokenSet::canonical(&rep, &table).map_err(e)?;
        let group = rep.group();
        for i in group.elements() {
            for k in group.elements() {
                let phi = StateVector::random(2, 1, &mut rng).map_err(e)?;
                let channel = ChannelSpec::fixed(&rep, k).map_err(e)?;
                let (dec, applied) = measure_and_realign(&tokens, &phi, i, &channel, rng.gen()).map_err(e)?;
                ensure(applied == k, "channel applied a different element")?;
                ensure(dec.outcome == group.mul(k, i), format!("(i,k)=({i},{k}): outcome {}", dec.outcome))?;
                let fid = dec.message.fidelity(&phi).map_err(e)?;
                ensure(fid >= 1.0 - 1e-9, format!("(i,k)=({i},{k}): fidelity {fid}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} (i,k) pairs: outcome = k·i, message recovered"))
}

fn su2() -> Check {
    let violation = block_structure_certificate(50, 11);
    ensure(violation <= 1e-10, format!("violation {violation:e}"))?;
    let phi = PI / 3.0;
    let b = block_form(&Su2Basis::new(), &euler_su2(EulerAngles { theta: 0.0, phi, psi: 0.0 }));
    let spot = b[(0, 0)];
    let closed = 0.75 * (PI / 6.0).cos();
    ensure((spot - C64::new(closed, 0.0)).norm() < 1e-12, format!("d_3/2,3/2 = {spot}"))?;
    let enc = LogicalEncoding::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 1.0;
    for _ in 0..20 {
        let u = euler_su2(random_angles(&mut rng));
        let v = dfscodec::linalg::random_state_vector(2, &mut rng);
        let rt = logical_qubit_roundtrip(&enc, &u, [v[0], v[1]]).map_err(e)?;
        worst = worst.min(rt.fidelity);
    }
    ensure(worst >= 1.0 - 1e-9, format!("logical fidelity {worst}"))?;
    Ok(format!(
        "violation {violation:.1e}, d_3/2,3/2(π/3) = {:.12}, min logical fidelity {worst:.12}",
        spot.re
    ))
}

fn rates() -> Check {
    let rep = cyclic_diagonal_rep(8, 2);
    let tokens = TokenSet::canonical(&rep, &CharacterTable::cyclic(8).map_err(e)?).map_err(e)?;
    ensure(tokens.r() == 7, format!("r = {}", tokens.r()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let channel = ChannelSpec::uniform(&rep);
    for m in [1usize, 7] {
        let phi = StateVector::random(2, m, &mut rng).map_err(e)?;
        let (_, report) = roundtrip(&tokens, &phi, &channel, 3).map_err(e)?;
        let want = Rate::new(m, 7);
        ensure(report.rate_exact == want, format!("m={m}: {:?}", report.rate_exact))?;
        ensure(report.rate == m as f64 / (m + 7) as f64, "float rate")?;
    }
    let fractions: Vec<(usize, usize)> = [1usize, 7, 70]
        .iter()
        .map(|&m| {
            let r = Rate::new(m, tokens.r());
            (r.numerator, r.denominator)
        })
        .collect();
    ensure(fractions == [(1, 8), (7, 14), (70, 77)], format!("{fractions:?}"))?;
    let values: Vec<f64> = (1..=200).map(|m| Rate::new(m, 7).value()).collect();
    ensure(values.windows(2).all(|w| w[0] < w[1]) && values[199] < 1.0, "not monotone below 1")?;
    Ok("Z8: 1/8, 7/14 = 1/2, 70/77; strictly increasing toward 1".into())
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let checks: [Criterion; 10] = [
        ("multiplicity tables", multiplicity_tables),
        ("minimal r", min_r_values),
        ("token fixtures", token_fixtures),
        ("protocol exactness", protocol_exactness),
        ("hiding property", hiding),
        ("gate counts and depth", gate_counts),
        ("circuit/codec equivalence", circuit_equivalence),
        ("measure and realign", measure_realign),
        ("SU(2) subsystem", su2),
        ("rate reporting", rates),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Err(msg)
            });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
