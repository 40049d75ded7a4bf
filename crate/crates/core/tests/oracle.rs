mod common;

use common::{brute_force_te, series};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teflow::entropy::{directed_te, EmbedParams};

#[test]
fn hand_fixture_matches_enumerator() {
    let x = [0, 0, 1, 1, 0];
    let y = [1, 0, 1, 0, 1];
    let te = directed_te(&series("X", &x, 2), &series("Y", &y, 2), EmbedParams::default()).unwrap();
    // triples (next, x, y): (0,0,1) (1,0,0) (1,1,1) (0,1,0), each once; y fully
    // determines next given x, and x alone leaves next uniform when x = 0 or 1
    assert!((te - 1.0).abs() < 1e-12, "{te}");
    assert!((te - brute_force_te(&x, &y, 2)).abs() < 1e-12);
}

#[test]
fn random_pairs_match_enumerator() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..2000 {
        let alphabet = rng.random_range(2..=3u8);
        let n = rng.random_range(3..=12);
        let x: Vec<u8> = (0..n).map(|_| rng.random_range(0..alphabet)).collect();
        let y: Vec<u8> = (0..n).map(|_| rng.random_range(0..alphabet)).collect();
        let te = directed_te(
            &series("X", &x, alphabet as usize),
            &series("Y", &y, alphabet as usize),
            EmbedParams::default(),
        )
        .unwrap();
        let oracle = brute_force_te(&x, &y, alphabet);
        assert!((te - oracle).abs() < 1e-12, "x={x:?} y={y:?} te={te} oracle={oracle}");
    }
}

#[test]
fn direction_matters_on_asymmetric_fixture() {
    let x = [0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 0];
    let y = [1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 0, 1];
    let (sx, sy) = (series("X", &x, 2), series("Y", &y, 2));
    let forward = directed_te(&sx, &sy, EmbedParams::default()).unwrap();
    let backward = directed_te(&sy, &sx, EmbedParams::default()).unwrap();
    assert_ne!(forward, backward);
}
