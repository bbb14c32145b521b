use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::Word;
use crate::{Error, Result};

/// One-sided subshift of finite type on `{0, .., alphabet - 1}`.
///
/// `transition[i][j] == true` means symbol `j` may follow symbol `i`. The
/// matrix is stored as given; construction only checks that at least one
/// bi-infinite path survives pruning.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSft", into = "RawSft")]
pub struct Sft {
    alphabet: usize,
    transition: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct RawSft {
    alphabet: usize,
    transition: Vec<Vec<u8>>,
}

impl TryFrom<RawSft> for Sft {
    type Error = Error;

    fn try_from(raw: RawSft) -> Result<Self> {
        if raw.transition.len() != raw.alphabet {
            return Err(Error::Domain(format!(
                "alphabet {} does not match {} matrix rows",
                raw.alphabet,
                raw.transition.len()
            )));
        }
        Sft::from_matrix(raw.transition)
    }
}

impl From<Sft> for RawSft {
    fn from(sft: Sft) -> Self {
        RawSft {
            alphabet: sft.alphabet,
            transition: sft
                .transition
                .iter()
                .map(|row| row.iter().map(|&b| b as u8).collect())
                .collect(),
        }
    }
}

impl Sft {
    pub fn from_matrix(matrix: Vec<Vec<u8>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::Domain("empty alphabet".into()));
        }
        let mut transition = Vec::with_capacity(n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Domain(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            let mut out = Vec::with_capacity(n);
            for &v in row {
                match v {
                    0 => out.push(false),
                    1 => out.push(true),
                    _ => return Err(Error::Domain(format!("entry {v} in row {i} is not 0/1"))),
                }
            }
            transition.push(out);
        }
        let sft = Sft { alphabet: n, transition };
        if sft.essential_symbols().is_empty() {
            return Err(Error::Domain("shift space is empty after pruning".into()));
        }
        Ok(sft)
    }

    pub fn full(alphabet: usize) -> Self {
        assert!(alphabet > 0, "full shift needs a nonempty alphabet");
        Sft {
            alphabet,
            transition: vec![vec![true; alphabet]; alphabet],
        }
    }

    /// Two symbols with the block `11` forbidden.
    pub fn golden_mean() -> Self {
        Sft {
            alphabet: 2,
            transition: vec![vec![true, true], vec![true, false]],
        }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn allows(&self, i: usize, j: usize) -> bool {
        self.transition[i][j]
    }

    pub fn matrix(&self) -> &[Vec<bool>] {
        &self.transition
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.transition[i]
            .iter()
            .enumerate()
            .filter_map(|(j, &b)| b.then_some(j))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.alphabet).flat_map(move |i| self.successors(i).map(move |j| (i, j)))
    }

    /// Symbols lying on some bi-infinite path.
    pub fn essential_symbols(&self) -> Vec<usize> {
        let n = self.alphabet;
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for i in 0..n {
                if !alive[i] {
                    continue;
                }
                let has_out = (0..n).any(|j| alive[j] && self.transition[i][j]);
                let has_in = (0..n).any(|j| alive[j] && self.transition[j][i]);
                if !has_out || !has_in {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..n).filter(|&i| alive[i]).collect()
    }

    /// Restriction to the essential symbols, with the map from new to old labels.
    pub fn pruned(&self) -> (Sft, Vec<usize>) {
        let keep = self.essential_symbols();
        let transition = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| self.transition[i][j]).collect())
            .collect();
        (
            Sft {
                alphabet: keep.len(),
                transition,
            },
            keep,
        )
    }

    fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.alphabet;
        let mut reach = self.transition.clone();
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        reach
    }

    /// Strongly connected classes that carry at least one cycle, in
    /// increasing order of their smallest symbol.
    pub fn irreducible_components(&self) -> Vec<Vec<usize>> {
        let n = self.alphabet;
        let reach = self.reachability();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if seen[i] || !reach[i][i] {
                continue;
            }
            let comp: Vec<usize> = (0..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
            for &j in &comp {
                seen[j] = true;
            }
            out.push(comp);
        }
        out
    }

    pub fn is_irreducible(&self) -> bool {
        let comps = self.irreducible_components();
        comps.len() == 1 && comps[0].len() == self.alphabet
    }

    /// Restriction of the matrix to a subset of symbols.
    pub fn restrict(&self, symbols: &[usize]) -> Result<Sft> {
        let transition: Vec<Vec<u8>> = symbols
            .iter()
            .map(|&i| symbols.iter().map(|&j| self.transition[i][j] as u8).collect())
            .collect();
        Sft::from_matrix(transition)
    }

    /// Period of an irreducible matrix (gcd of cycle lengths).
    pub fn period(&self) -> Option<usize> {
        if !self.is_irreducible() {
            return None;
        }
        let n = self.alphabet;
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for v in self.successors(u) {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut g = 0usize;
        for (u, v) in self.edges() {
            let d = (level[u] + 1).abs_diff(level[v]);
            g = gcd(g, d);
        }
        Some(g)
    }

    /// Smallest `k` with every entry of the `k`-th matrix power positive.
    pub fn mixing_gap(&self) -> Option<usize> {
        if self.period() != Some(1) {
            return None;
        }
        let n = self.alphabet;
        let mut power = self.transition.clone();
        let bound = (n - 1) * (n - 1) + 1;
        for k in 1..=bound {
            if power.iter().all(|row| row.iter().all(|&b| b)) {
                return Some(k);
            }
            power = bool_product(&power, &self.transition);
        }
        None
    }

    pub fn check_symbols(&self, symbols: &[usize]) -> Result<()> {
        match symbols.iter().find(|&&s| s >= self.alphabet) {
            Some(s) => Err(Error::Range(format!(
                "symbol {s} outside alphabet of size {}",
                self.alphabet
            ))),
            None => Ok(()),
        }
    }

    pub fn admits(&self, symbols: &[usize]) -> Result<bool> {
        self.check_symbols(symbols)?;
        Ok(symbols.windows(2).all(|w| self.transition[w[0]][w[1]]))
    }

    /// Admissible as a periodic orbit: also the wrap-around transition.
    pub fn admits_cyclically(&self, symbols: &[usize]) -> Result<bool> {
        if symbols.is_empty() {
            return Ok(false);
        }
        Ok(self.admits(symbols)?
            && self.transition[symbols[symbols.len() - 1]][symbols[0]])
    }

    /// Admissible and extendable to an infinite forward path.
    pub fn extendable(&self, symbols: &[usize]) -> Result<bool> {
        if !self.admits(symbols)? {
            return Ok(false);
        }
        match symbols.last() {
            None => Ok(true),
            Some(&last) => Ok(self.essential_forward().contains(&last)),
        }
    }

    /// Symbols from which an infinite forward path starts.
    fn essential_forward(&self) -> Vec<usize> {
        let n = self.alphabet;
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for i in 0..n {
                if alive[i] && !(0..n).any(|j| alive[j] && self.transition[i][j]) {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..n).filter(|&i| alive[i]).collect()
    }

    /// All admissible words of length `n`, in lexicographic order.
    pub fn words(&self, n: usize) -> Vec<Word> {
        let mut out = Vec::new();
        if n == 0 {
            out.push(Word::default());
            return out;
        }
        let mut stack: Vec<usize> = Vec::with_capacity(n);
        fn rec(sft: &Sft, n: usize, stack: &mut Vec<usize>, out: &mut Vec<Word>) {
            if stack.len() == n {
                out.push(Word(stack.clone()));
                return;
            }
            let candidates: Vec<usize> = match stack.last() {
                None => (0..sft.alphabet).collect(),
                Some(&l) => sft.successors(l).collect(),
            };
            for s in candidates {
                stack.push(s);
                rec(sft, n, stack, out);
                stack.pop();
            }
        }
        rec(self, n, &mut stack, &mut out);
        out
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn bool_product(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).any(|k| a[i][k] && b[k][j]))
                .collect()
        })
        .collect()
}

pub fn is_admissible(word: &Word, sft: &Sft) -> Result<bool> {
    sft.admits(&word.0)
}

/// Primitive transition matrix (some power entrywise positive).
pub fn is_mixing(sft: &Sft) -> Result<bool> {
    if sft.essential_symbols().is_empty() {
        return Err(Error::Domain("empty shift".into()));
    }
    Ok(sft.period() == Some(1))
}

/// Exact number of admissible words of length `n` (paths in the transition graph).
pub fn count_words(sft: &Sft, n: usize) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    let k = sft.alphabet;
    let mut v: Vec<BigUint> = vec![BigUint::one(); k];
    for _ in 1..n {
        let mut next = vec![BigUint::zero(); k];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for j in sft.successors(i) {
                next[j] += vi;
            }
        }
        v = next;
    }
    v.into_iter().sum()
}

/// Natural log of a big integer without overflow.
pub fn log_count(c: &BigUint) -> f64 {
    if c.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = c.bits();
    if bits < 1000 {
        return c.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (c >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&w("0110"), &Sft::full(2)).unwrap());
        assert!(!is_admissible(&w("011"), &Sft::golden_mean()).unwrap());
        assert!(is_admissible(&w("0101"), &Sft::golden_mean()).unwrap());
        assert!(matches!(
            is_admissible(&w("012"), &Sft::full(2)),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn mixing_examples() {
        assert!(is_mixing(&Sft::full(2)).unwrap());
        assert!(is_mixing(&Sft::golden_mean()).unwrap());
        let cycle = Sft::from_matrix(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(!is_mixing(&cycle).unwrap());
        assert_eq!(cycle.period(), Some(2));
        assert_eq!(Sft::golden_mean().mixing_gap(), Some(2));
        assert_eq!(Sft::full(3).mixing_gap(), Some(1));
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_words(&Sft::full(2), 10), BigUint::from(1024u32));
        assert_eq!(count_words(&Sft::golden_mean(), 5), BigUint::from(13u32));
        let one = Sft::full(1);
        for n in 1..20 {
            assert_eq!(count_words(&one, n), BigUint::one());
        }
    }

    #[test]
    fn empty_shift_rejected() {
        // 0 -> 1 only: no bi-infinite path.
        assert!(Sft::from_matrix(vec![vec![0, 1], vec![0, 0]]).is_err());
        assert!(Sft::from_matrix(vec![vec![1, 1]]).is_err());
        assert!(Sft::from_matrix(vec![vec![2]]).is_err());
    }

    #[test]
    fn pruning_and_components() {
        // symbol 2 is a dead end
        let s = Sft::from_matrix(vec![vec![1, 1, 1], vec![1, 0, 0], vec![0, 0, 0]]).unwrap();
        assert_eq!(s.essential_symbols(), vec![0, 1]);
        assert!(!s.is_irreducible());
        let (p, map) = s.pruned();
        assert_eq!(map, vec![0, 1]);
        assert_eq!(p, Sft::golden_mean());
        let two = Sft::from_matrix(vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(two.irreducible_components(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn json_schema() {
        let s: Sft = serde_json::from_str(r#"{"alphabet":2,"transition":[[1,1],[1,0]]}"#).unwrap();
        assert_eq!(s, Sft::golden_mean());
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"alphabet":2,"transition":[[1,1],[1,0]]}"#
        );
        assert!(serde_json::from_str::<Sft>(r#"{"alphabet":3,"transition":[[1,1],[1,0]]}"#).is_err());
    }

    #[test]
    fn log_count_large() {
        let c = count_words(&Sft::full(2), 2000);
        assert!((log_count(&c) - 2000.0 * 2f64.ln()).abs() < 1e-9);
    }
}
