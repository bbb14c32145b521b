use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::{Error, Result};

const TIE_TOL: f64 = 1e-12;
const BUDGET: u64 = 1 << 24;

/// Entropy of the empirical distribution of the entries of a tuple.
pub fn tuple_entropy<T: Eq + Hash>(a: &[T]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::Domain("tuple must be nonempty".into()));
    }
    let mut counts: HashMap<&T, usize> = HashMap::new();
    for x in a {
        *counts.entry(x).or_insert(0) += 1;
    }
    Ok(entropy_of_counts(counts.values().copied(), a.len()))
}

fn entropy_of_counts(counts: impl Iterator<Item = usize>, k: usize) -> f64 {
    let k = k as f64;
    let h: f64 = counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / k;
            -p * p.ln()
        })
        .sum();
    h.max(0.0)
}

/// `#{a in E^k : H(a) <= h}`, summing multinomial coefficients over the
/// compositions of `k` into `|E|` parts.
pub fn bowen_count(k: usize, h: f64, e: usize) -> Result<BigUint> {
    if e == 0 || k == 0 {
        return Err(Error::Range("need a nonempty alphabet and a positive length".into()));
    }
    let compositions = binomial(k + e - 1, e - 1);
    if compositions > BigUint::from(BUDGET) {
        return Err(Error::Budget(format!(
            "{compositions} compositions exceed the budget of {BUDGET}"
        )));
    }
    let fact: Vec<BigUint> = std::iter::once(BigUint::one())
        .chain((1..=k).scan(BigUint::one(), |acc, i| {
            *acc *= i;
            Some(acc.clone())
        }))
        .collect();
    let mut total = BigUint::zero();
    let mut parts = vec![0usize; e];
    visit_compositions(k, 0, &mut parts, &mut |parts| {
        if entropy_of_counts(parts.iter().copied(), k) <= h + TIE_TOL {
            let denom = parts.iter().fold(BigUint::one(), |acc, &c| acc * &fact[c]);
            total += &fact[k] / denom;
        }
    });
    Ok(total)
}

fn visit_compositions(left: usize, slot: usize, parts: &mut [usize], f: &mut impl FnMut(&[usize])) {
    if slot + 1 == parts.len() {
        parts[slot] = left;
        f(parts);
        return;
    }
    for c in 0..=left {
        parts[slot] = c;
        visit_compositions(left - c, slot + 1, parts, f);
    }
}

fn binomial(n: usize, k: usize) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// The same count by listing every tuple; only for `|E|^k <= 2^24`.
pub fn bowen_count_brute(k: usize, h: f64, e: usize) -> Result<u64> {
    let total = (e as u64).checked_pow(k as u32).filter(|&t| t <= BUDGET);
    let Some(total) = total else {
        return Err(Error::Budget(
            "tuple enumeration exceeds 2^24; use the composition count".into(),
        ));
    };
    let mut count = 0;
    let mut tuple = vec![0usize; k];
    for code in 0..total {
        let mut c = code;
        for slot in tuple.iter_mut() {
            *slot = (c % e as u64) as usize;
            c /= e as u64;
        }
        if tuple_entropy(&tuple)? <= h + TIE_TOL {
            count += 1;
        }
    }
    Ok(count)
}
