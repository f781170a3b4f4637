use dfscodec::circuit::{
    build_encoding_circuit, decode_via_t_dagger, register_fiducial, register_network, Layout, Path,
    TStage,
};
use dfscodec::codec::{decode, encode, TokenSet};
use dfscodec::rep::{cyclic_diagonal_rep, klein_pauli_rep, s3_two_dim_rep, CharacterTable, UnitaryRep};
use dfscodec::statevec::StateVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cases() -> Vec<(String, UnitaryRep, CharacterTable)> {
    let mut out = vec![(
        "k4".to_string(),
        klein_pauli_rep(),
        CharacterTable::klein().unwrap(),
    )];
    for n in 2..=8 {
        out.push((format!("z{n}"), cyclic_diagonal_rep(n, 2), CharacterTable::cyclic(n).unwrap()));
    }
    out
}

fn paths_for(name: &str) -> Vec<(Path, TStage)> {
    let mut p = vec![(Path::General, TStage::Direct), (Path::Abelian, TStage::Direct)];
    if name != "k4" {
        p.push((Path::Cyclic, TStage::Direct));
        let n: usize = name[1..].parse().unwrap();
        if n.is_power_of_two() {
            p.push((Path::Cyclic, TStage::Register));
        }
    }
    p
}

#[test]
fn circuit_matches_codec_encoding() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (name, rep, table) in cases() {
        for (path, t) in paths_for(&name) {
            for m in 1..=2 {
                let circ = build_encoding_circuit(&rep, &table, m, path, t)
                    .unwrap_or_else(|e| panic!("{name} {path:?} {t:?}: {e}"));
                for _ in 0..3 {
                    let phi = StateVector::random(2, m, &mut rng).unwrap();
                    let (fid, _) = circ.verify(&phi).unwrap();
                    assert!(fid > 1.0 - 1e-10, "{name} {path:?} {t:?} m={m}: fidelity {fid}");
                }
            }
        }
    }
}

#[test]
fn s3_general_path_matches() {
    let rep = s3_two_dim_rep();
    let table = CharacterTable::symmetric3().unwrap();
    let circ = build_encoding_circuit(&rep, &table, 1, Path::General, TStage::Direct).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let phi = StateVector::random(2, 1, &mut rng).unwrap();
    assert!(circ.verify(&phi).unwrap().0 > 1.0 - 1e-10);
}

#[test]
fn register_tokens_satisfy_both_conditions() {
    for n in [2usize, 4, 8] {
        let rep = cyclic_diagonal_rep(n, 2);
        let tokens = TokenSet::build(&rep, register_fiducial(n).unwrap()).unwrap();
        assert!(tokens.gram_residue() < 1e-10);
    }
}

#[test]
fn register_network_exhaustive() {
    for rp in 1..=4usize {
        let n = 1usize << rp;
        let r = n - 1;
        let layout = Layout::separate(rp, r, 0);
        // natural order: wire k of the control register holds weight 2^{rp-1-k}
        let bit_wires: Vec<usize> = (0..rp).map(|k| rp - 1 - k).collect();
        let net = register_network(&layout, &bit_wires).unwrap();
        assert_eq!(net.gates_named("cnot"), r + rp);
        for j in 0..n {
            let mut bits = vec![false; rp + r];
            for (k, bit) in bits.iter_mut().take(rp).enumerate() {
                *bit = (j >> (rp - 1 - k)) & 1 == 1;
            }
            net.simulate_bits(&mut bits).unwrap();
            assert!(bits[..rp].iter().all(|b| !b), "control not cleared for j={j}");
            // groups A_rp..A_1 from the left, each filled with its bit
            let mut pos = rp;
            for m in (1..=rp).rev() {
                let bit = (j >> (m - 1)) & 1 == 1;
                for _ in 0..(1 << (m - 1)) {
                    assert_eq!(bits[pos], bit, "N={n} j={j} group {m}");
                    pos += 1;
                }
            }
            let weight = bits.iter().filter(|b| **b).count();
            assert_eq!(weight, j);
        }
    }
}

#[test]
fn t_dagger_decoding_matches_projector_decoding() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for (name, rep, table) in cases() {
        let tokens = TokenSet::canonical(&rep, &table).unwrap();
        let labels: Vec<Option<usize>> = (0..1usize << tokens.r().min(10))
            .map(|c| (c < rep.group().order()).then_some(c))
            .collect();
        for seed in 0..5 {
            let phi = StateVector::random(2, 1, &mut rng).unwrap();
            let chi = encode(&tokens, &phi).unwrap();
            let a = decode(&tokens, &chi, seed).unwrap();
            let b = decode_via_t_dagger(&tokens, &labels, &chi, seed).unwrap();
            assert_eq!(a.outcome, b.outcome, "{name} seed {seed}");
            assert!(b.message.fidelity(&phi).unwrap() > 1.0 - 1e-10);
        }
    }
}
