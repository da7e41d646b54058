//! Seeded sampling primitives. All randomness in the crate flows through
//! [`seeded_rng`], so outputs depend only on the configured seed.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `k` distinct indices below `n`, uniformly at random, in ascending order.
pub fn sample_sorted(rng: &mut SeededRng, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n, "cannot sample {k} of {n}");
    let mut picked = index::sample(rng, n, k).into_vec();
    picked.sort_unstable();
    picked
}

/// Splits `target` across strata proportionally to their sizes with the
/// largest-remainder method. Quotas never exceed stratum sizes and always
/// sum to `target` (which must not exceed the total size).
pub fn proportional_allocation(sizes: &[usize], target: usize) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    assert!(target <= total, "target {target} exceeds population {total}");
    if total == 0 {
        return vec![0; sizes.len()];
    }
    let mut quotas: Vec<usize> = Vec::with_capacity(sizes.len());
    let mut remainders: Vec<(u128, usize)> = Vec::with_capacity(sizes.len());
    for (i, &n) in sizes.iter().enumerate() {
        let scaled = n as u128 * target as u128;
        quotas.push((scaled / total as u128) as usize);
        remainders.push((scaled % total as u128, i));
    }
    let mut left = target - quotas.iter().sum::<usize>();
    // Largest remainder first; earlier strata win ties.
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (_, i) in remainders {
        if left == 0 {
            break;
        }
        if quotas[i] < sizes[i] {
            quotas[i] += 1;
            left -= 1;
        }
    }
    quotas
}
