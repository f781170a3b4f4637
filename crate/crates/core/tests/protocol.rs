use dfscodec::codec::{decode, encode, transmit, ChannelSpec, TokenSet};
use dfscodec::rep::{cyclic_diagonal_rep, klein_pauli_rep, s3_two_dim_rep, CharacterTable};
use dfscodec::statevec::StateVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// Upper 0.1% points of χ² with k degrees of freedom.
fn chi2_critical(k: usize) -> f64 {
    match k {
        3 => 16.27,
        5 => 20.52,
        7 => 24.32,
        _ => unreachable!(),
    }
}

#[test]
fn decode_outcomes_are_uniform() {
    let cases = [
        (klein_pauli_rep(), CharacterTable::klein().unwrap()),
        (s3_two_dim_rep(), CharacterTable::symmetric3().unwrap()),
        (cyclic_diagonal_rep(8, 2), CharacterTable::cyclic(8).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (rep, table) in cases {
        let tokens = TokenSet::canonical(&rep, &table).unwrap();
        let n = rep.group().order();
        let phi = StateVector::random(2, 1, &mut rng).unwrap();
        let chi = encode(&tokens, &phi).unwrap();
        let channel = ChannelSpec::uniform(&rep);
        let samples = 10_000;
        let mut counts = vec![0usize; n];
        for seed in 0..samples as u64 {
            let (received, _) = transmit(&channel, &chi, seed).unwrap();
            counts[decode(&tokens, &received, seed.wrapping_mul(0x9e37_79b9)).unwrap().outcome] += 1;
        }
        let expect = samples as f64 / n as f64;
        let stat: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        assert!(stat < chi2_critical(n - 1), "order {n}: χ² = {stat}, counts {counts:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn any_channel_element_roundtrips(seed in any::<u64>(), g in 0usize..6, m in 1usize..=2) {
        let rep = s3_two_dim_rep();
        let tokens = TokenSet::canonical(&rep, &CharacterTable::symmetric3().unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = StateVector::random(2, m, &mut rng).unwrap();
        let chi = encode(&tokens, &phi).unwrap();
        let (received, _) = transmit(&ChannelSpec::fixed(&rep, g).unwrap(), &chi, seed).unwrap();
        let dec = decode(&tokens, &received, seed).unwrap();
        prop_assert!(dec.message.fidelity(&phi).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn encoded_state_is_normalized(seed in any::<u64>(), n in 2usize..=6) {
        let rep = cyclic_diagonal_rep(n, 2);
        let tokens = TokenSet::canonical(&rep, &CharacterTable::cyclic(n).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = StateVector::random(2, 1, &mut rng).unwrap();
        let chi = encode(&tokens, &phi).unwrap();
        prop_assert!((chi.norm() - 1.0).abs() < 1e-12);
    }
}
