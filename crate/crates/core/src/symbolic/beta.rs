use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::sft::log_count;
use crate::{Error, Result};

/// Distance to an integer below which `beta * r` is treated as that integer.
///
/// A floating-point `beta` only pins the real number to about 1e-16; a
/// greedy digit that lands this close to an integer is read as an exact tie
/// (finite expansion), which is what algebraic inputs like the golden ratio
/// or integers mean.
const TIE_TOLERANCE: f64 = 1e-9;

/// Greedy expansion of 1 in base `beta` and its quasi-greedy version,
/// which drives beta-shift admissibility.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaExpansion {
    pub beta: f64,
    /// Greedy digits; `finite` says whether they terminate.
    pub greedy: Vec<usize>,
    pub finite: bool,
    /// Quasi-greedy digits `d*(1)`, at least the requested length.
    pub quasi_greedy: Vec<usize>,
}

pub fn beta_expansion_of_one(beta: f64, len: usize) -> Result<BetaExpansion> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be a finite real > 1, got {beta}")));
    }
    let b = BigRational::from_float(beta).expect("finite");
    let mut r = BigRational::one();
    let mut greedy = Vec::with_capacity(len);
    let mut finite = false;
    while greedy.len() < len {
        let x = &b * &r;
        let nearest = x.round();
        let gap = (&x - &nearest).abs().to_f64().unwrap_or(f64::INFINITY);
        if gap < TIE_TOLERANCE && !nearest.is_zero() {
            greedy.push(nearest.to_integer().to_usize().expect("small digit"));
            finite = true;
            break;
        }
        let digit = x.floor();
        greedy.push(digit.to_integer().to_usize().expect("small digit"));
        r = x - digit;
        if r.is_zero() {
            finite = true;
            break;
        }
    }
    let quasi_greedy = if finite {
        let mut period = greedy.clone();
        let last = period.last_mut().expect("nonempty");
        *last -= 1;
        period.iter().copied().cycle().take(len.max(period.len())).collect()
    } else {
        greedy.clone()
    };
    Ok(BetaExpansion {
        beta,
        greedy,
        finite,
        quasi_greedy,
    })
}

/// Brute-force criterion: every suffix of `word` is lexicographically at
/// most the prefix of `d*(1)` of the same length.
pub fn is_beta_admissible(word: &[usize], quasi_greedy: &[usize]) -> bool {
    assert!(quasi_greedy.len() >= word.len(), "expansion too short");
    (0..word.len()).all(|k| {
        let suffix = &word[k..];
        suffix <= &quasi_greedy[..suffix.len()]
    })
}

/// Number of admissible words of length `n` in the beta-shift.
///
/// Counted on the standard automaton whose state is the length of the
/// current match with `d*(1)`: from state `i` a digit below `d*_i` resets
/// to 0, the digit `d*_i` advances, anything larger is forbidden.
pub fn beta_count(beta: f64, n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::Range("word length must be at least 1".into()));
    }
    let exp = beta_expansion_of_one(beta, n + 8)?;
    let d = &exp.quasi_greedy;
    let mut states: Vec<BigUint> = vec![BigUint::zero(); n + 1];
    states[0] = BigUint::one();
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); n + 1];
        for (i, c) in states.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let bound = d[i];
            if bound > 0 {
                next[0] += c * BigUint::from(bound);
            }
            next[i + 1] += c;
        }
        states = next;
    }
    Ok(states.into_iter().sum())
}

/// `(1/n) log beta_count(beta, n)`, which tends to `log beta`.
pub fn beta_entropy(beta: f64, n: usize) -> Result<f64> {
    Ok(log_count(&beta_count(beta, n)?) / n as f64)
}


#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> f64 {
        (1.0 + 5f64.sqrt()) / 2.0
    }

    fn brute(beta: f64, n: usize) -> u64 {
        let exp = beta_expansion_of_one(beta, n + 8).unwrap();
        let k = exp.quasi_greedy[0] + 1;
        let total = (k as u64).pow(n as u32);
        let mut count = 0;
        for code in 0..total {
            let mut c = code;
            let word: Vec<usize> = (0..n)
                .map(|_| {
                    let s = (c % k as u64) as usize;
                    c /= k as u64;
                    s
                })
                .collect();
            if is_beta_admissible(&word, &exp.quasi_greedy) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn expansions() {
        let two = beta_expansion_of_one(2.0, 6).unwrap();
        assert_eq!(two.greedy, vec![2]);
        assert_eq!(two.quasi_greedy, vec![1; 6]);
        let g = beta_expansion_of_one(golden(), 6).unwrap();
        assert_eq!(g.greedy, vec![1, 1]);
        assert_eq!(g.quasi_greedy, vec![1, 0, 1, 0, 1, 0]);
        assert!(beta_expansion_of_one(1.0, 4).is_err());
        assert!(beta_expansion_of_one(0.5, 4).is_err());
    }

    #[test]
    fn count_examples() {
        assert_eq!(beta_count(2.0, 8).unwrap(), BigUint::from(256u32));
        assert_eq!(beta_count(golden(), 5).unwrap(), BigUint::from(13u32));
        assert_eq!(beta_count(2.0, 1).unwrap(), BigUint::from(2u32));
        assert!(beta_count(1.0, 3).is_err());
    }

    #[test]
    fn automaton_matches_brute_force() {
        for &beta in &[golden(), 1.5, 1.8, 2.0, 2.5, 3.0, 1.2] {
            for n in 1..=9 {
                let fast = beta_count(beta, n).unwrap().to_u64().unwrap();
                assert_eq!(fast, brute(beta, n), "beta={beta} n={n}");
            }
        }
    }

    #[test]
    fn powers_of_two() {
        for n in 1..=20 {
            assert_eq!(beta_count(2.0, n).unwrap(), BigUint::one() << n);
        }
    }
}
