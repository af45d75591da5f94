//! Seeded sampling of small ordinals and increasing tuples, shared by the
//! checkers, the command line tool and the tests.

use rand::Rng;

use crate::ladder::{Context, LadderSystem};
use crate::ordinal::Ordinal;

/// A random ordinal below `ω^degree` in Cantor normal form
/// `ω^{degree-1}·c + … + c₀` with every coefficient at most `max_coeff`.
pub fn ordinal_below<R: Rng + ?Sized>(rng: &mut R, degree: u64, max_coeff: u64) -> Ordinal {
    let mut out = Ordinal::zero();
    for e in (0..degree).rev() {
        let c = rng.gen_range(0..=max_coeff);
        if c > 0 {
            out = out.add(&Ordinal::monomial(Ordinal::from(e), c));
        }
    }
    out
}

/// A random strictly increasing tuple of `len` ordinals below `ω^degree`.
pub fn increasing_tuple<R: Rng + ?Sized>(rng: &mut R, len: usize, degree: u64, max_coeff: u64) -> Vec<Ordinal> {
    loop {
        let mut v: Vec<Ordinal> = (0..len).map(|_| ordinal_below(rng, degree, max_coeff)).collect();
        v.sort();
        v.dedup();
        if v.len() == len {
            return v;
        }
    }
}

/// Ordinals in `[lo, hi]` that a walk or an expansion between `lo` and `hi`
/// is likely to touch: the given seeds, their successors, and the first
/// few elements of their ladders that land in the interval.
pub fn neighbourhood(sys: &LadderSystem, seeds: &[Ordinal], lo: &Ordinal, hi: &Ordinal, per_ladder: usize) -> Vec<Ordinal> {
    let mut pool: Vec<Ordinal> = Vec::new();
    for s in seeds {
        pool.push(s.clone());
        pool.push(s.succ());
        let ctx = Context::ordinal(s.clone());
        let (first, _) = ctx.prefix(sys, per_ladder);
        pool.extend(first);
        if let Some(x) = ctx.min_from(sys, lo) {
            let mut cur = Some(x);
            for _ in 0..per_ladder {
                match cur {
                    Some(x) => {
                        cur = ctx.step(sys, &x);
                        pool.push(x);
                    }
                    None => break,
                }
            }
        }
    }
    pool.retain(|x| x >= lo && x <= hi);
    pool.sort();
    pool.dedup();
    pool
}

/// A random strictly increasing tuple of `len` elements drawn from `pool`,
/// or `None` when the pool is too small.
pub fn tuple_from_pool<R: Rng + ?Sized>(rng: &mut R, pool: &[Ordinal], len: usize) -> Option<Vec<Ordinal>> {
    if pool.len() < len {
        return None;
    }
    let mut idx = rand::seq::index::sample(rng, pool.len(), len).into_vec();
    idx.sort_unstable();
    Some(idx.into_iter().map(|i| pool[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::is_increasing;
    use crate::ordinal::ord;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_stay_below_the_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            assert!(ordinal_below(&mut rng, 3, 4) < ord("w^3"));
            let t = increasing_tuple(&mut rng, 3, 3, 4);
            assert!(is_increasing(&t));
        }
    }

    #[test]
    fn neighbourhood_is_sorted_and_bounded() {
        let sys = LadderSystem::canonical();
        let pool = neighbourhood(&sys, &[ord("w*2"), ord("w+3")], &ord("w"), &ord("w*2"), 4);
        assert!(is_increasing(&pool));
        assert!(pool.contains(&ord("w+1")) && pool.contains(&ord("w+4")));
        assert!(pool.iter().all(|x| *x >= ord("w") && *x <= ord("w*2")));
    }
}
