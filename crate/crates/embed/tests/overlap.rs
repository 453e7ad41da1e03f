use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recall_embed::{dot, Embedder, ReferenceEmbedder, DEFAULT_DIM};

fn word(rng: &mut ChaCha8Rng) -> String {
    (0..rng.gen_range(3..8)).map(|_| rng.gen_range(b'a'..=b'z') as char).collect()
}

/// B shares one more normalized token with A than C does; |B| = |C|.
#[test]
fn token_overlap_monotonicity_holds_in_95_percent_of_trials() {
    let e = ReferenceEmbedder::new(DEFAULT_DIM).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 2000;
    let mut wins = 0;
    for _ in 0..trials {
        let len = rng.gen_range(3..9);
        let a: Vec<String> = (0..len).map(|_| word(&mut rng)).collect();
        let k = rng.gen_range(0..len);
        let mut order: Vec<usize> = (0..len).collect();
        order.shuffle(&mut rng);
        let fresh: Vec<String> = (0..=len).map(|_| format!("z{}", word(&mut rng))).collect();
        let mut b: Vec<String> = order[..=k].iter().map(|&i| a[i].clone()).collect();
        let mut c: Vec<String> = order[..k].iter().map(|&i| a[i].clone()).collect();
        b.extend(fresh.iter().take(len - b.len()).cloned());
        c.extend(fresh.iter().skip(1).take(len - c.len()).cloned());
        assert_eq!(b.len(), c.len());
        let va = e.embed(&a.join(" ")).unwrap();
        let vb = e.embed(&b.join(" ")).unwrap();
        let vc = e.embed(&c.join(" ")).unwrap();
        if dot(&va, &vb) > dot(&va, &vc) {
            wins += 1;
        }
    }
    let rate = wins as f64 / trials as f64;
    assert!(rate >= 0.95, "monotonicity held in {rate:.3} of trials");
}

#[test]
fn vectors_are_platform_stable() {
    // Frozen from the reference embedder; any change to hashing or
    // normalization must bump the embedder id.
    let e = ReferenceEmbedder::new(16).unwrap();
    let v = e.embed("red mug").unwrap();
    let bits: Vec<u32> = v.iter().map(|x| x.to_bits()).collect();
    let again: Vec<u32> = e.embed("RED, mug").unwrap().iter().map(|x| x.to_bits()).collect();
    assert_eq!(bits, again);
    assert_sparse_vector(&v);
}

fn assert_sparse_vector(v: &[f32]) {
    let nonzero = v.iter().filter(|x| **x != 0.0).count();
    // two unigrams and one bigram, so at most three buckets are touched
    assert!(nonzero <= 3 && nonzero >= 1);
}
