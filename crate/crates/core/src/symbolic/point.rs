use std::fmt;
use std::sync::Arc;

use super::{Sft, Word};
use crate::{Error, Result};

/// A deterministic, replayable source of symbols for a point of a shift.
pub trait PointSource: Send + Sync + fmt::Debug {
    /// First `n` symbols of the point. Must be a pure function of `n`, and
    /// prefixes must be consistent across calls.
    fn prefix(&self, n: usize) -> Vec<usize>;
}

/// A point of a one-sided shift given by a finite description.
///
/// Orbit statistics only ever read finite prefixes, so a periodic word, a
/// stored prefix, or a replayable generator is all that is needed.
#[derive(Clone, Debug)]
pub enum PointSpec {
    Periodic(Word),
    /// A finite prefix of an unspecified longer point.
    Stored(Word),
    Streamed(Arc<dyn PointSource>),
}

#[derive(Debug)]
struct ShiftedSource {
    inner: Arc<dyn PointSource>,
    offset: usize,
}

impl PointSource for ShiftedSource {
    fn prefix(&self, n: usize) -> Vec<usize> {
        let mut p = self.inner.prefix(n + self.offset);
        p.drain(..self.offset);
        p
    }
}

impl PointSpec {
    pub fn periodic(word: &str) -> Result<Self> {
        let w: Word = word.parse()?;
        if w.is_empty() {
            return Err(Error::Domain("periodic word must be nonempty".into()));
        }
        Ok(PointSpec::Periodic(w))
    }

    pub fn stored(word: &str) -> Result<Self> {
        Ok(PointSpec::Stored(word.parse()?))
    }

    /// Number of available symbols, `None` when unbounded.
    pub fn available(&self) -> Option<usize> {
        match self {
            PointSpec::Stored(w) => Some(w.len()),
            _ => None,
        }
    }

    pub fn prefix(&self, n: usize) -> Result<Vec<usize>> {
        match self {
            PointSpec::Periodic(w) => {
                if w.is_empty() {
                    return Err(Error::Domain("empty periodic word".into()));
                }
                Ok(w.0.iter().copied().cycle().take(n).collect())
            }
            PointSpec::Stored(w) => {
                if n > w.len() {
                    Err(Error::Contract(format!(
                        "prefix of length {n} requested, only {} stored",
                        w.len()
                    )))
                } else {
                    Ok(w.0[..n].to_vec())
                }
            }
            PointSpec::Streamed(src) => {
                let p = src.prefix(n);
                if p.len() != n {
                    return Err(Error::Contract(format!(
                        "stream returned {} symbols, expected {n}",
                        p.len()
                    )));
                }
                Ok(p)
            }
        }
    }

    /// Prefix checked for admissibility in `sft`.
    pub fn admissible_prefix(&self, sft: &Sft, n: usize) -> Result<Vec<usize>> {
        let p = self.prefix(n)?;
        if !sft.admits(&p)? {
            return Err(Error::Domain(format!(
                "prefix of length {n} is not admissible"
            )));
        }
        if let PointSpec::Periodic(w) = self {
            if !sft.admits_cyclically(&w.0)? {
                return Err(Error::Domain(format!(
                    "periodic word {w} is not cyclically admissible"
                )));
            }
        }
        Ok(p)
    }

    /// The image of the point under `k` applications of the shift.
    pub fn shifted(&self, k: usize) -> PointSpec {
        match self {
            PointSpec::Periodic(w) => {
                let r = k % w.len().max(1);
                let mut v = w.0[r..].to_vec();
                v.extend_from_slice(&w.0[..r]);
                PointSpec::Periodic(Word(v))
            }
            PointSpec::Stored(w) => PointSpec::Stored(Word(w.0[k.min(w.len())..].to_vec())),
            PointSpec::Streamed(src) => PointSpec::Streamed(Arc::new(ShiftedSource {
                inner: Arc::clone(src),
                offset: k,
            })),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug)]
    struct Counter;
    impl PointSource for Counter {
        fn prefix(&self, n: usize) -> Vec<usize> {
            (0..n).map(|i| i % 3).collect()
        }
    }

    #[test]
    fn periodic_and_stored() {
        let p = PointSpec::periodic("01").unwrap();
        assert_eq!(p.prefix(5).unwrap(), vec![0, 1, 0, 1, 0]);
        let s = PointSpec::stored("0010").unwrap();
        assert_eq!(s.prefix(4).unwrap(), vec![0, 0, 1, 0]);
        assert!(s.prefix(5).is_err());
        assert!(PointSpec::periodic("").is_err());
    }

    #[test]
    fn shifting() {
        let p = PointSpec::periodic("001").unwrap().shifted(2);
        assert_eq!(p.prefix(4).unwrap(), vec![1, 0, 0, 1]);
        let s = PointSpec::Streamed(Arc::new(Counter)).shifted(1);
        assert_eq!(s.prefix(4).unwrap(), vec![1, 2, 0, 1]);
    }

    #[test]
    fn cyclic_admissibility() {
        let g = Sft::golden_mean();
        assert!(PointSpec::periodic("01").unwrap().admissible_prefix(&g, 6).is_ok());
        // "10" cyclic ok, "1" alone is 1->1 forbidden
        assert!(PointSpec::periodic("1").unwrap().admissible_prefix(&g, 1).is_err());
    }
}
