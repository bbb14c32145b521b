use std::collections::{BTreeMap, HashMap};

use super::empirical::l1;
use super::EmpiricalMeasure;
use crate::symbolic::{PointSpec, Sft, Word};
use crate::{Error, Result};

/// Group of checkpoints whose empirical measures sit near a common centroid.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    /// Indices into [`LimitDiagnostics::checkpoints`].
    pub members: Vec<usize>,
    /// Sample-length weighted average of the members' frequencies.
    pub centroid: BTreeMap<Word, f64>,
    /// Largest member distance to the centroid.
    pub radius: f64,
}

/// Empirical measures at a schedule of times, clustered to expose the
/// limit points of `delta_{x,n}`.
#[derive(Clone, Debug)]
pub struct LimitDiagnostics {
    pub depth: usize,
    pub tol: f64,
    pub checkpoints: Vec<(usize, EmpiricalMeasure)>,
    pub clusters: Vec<Cluster>,
}

impl LimitDiagnostics {
    /// A single cluster: the empirical measures appear to converge.
    pub fn converges(&self) -> bool {
        self.clusters.len() == 1
    }

    /// Largest distance to the own-cluster centroid over the later half
    /// of the checkpoints.
    pub fn tail_radius(&self) -> f64 {
        let start = self.checkpoints.len() / 2;
        let mut r: f64 = 0.0;
        for c in &self.clusters {
            for &m in &c.members {
                if m >= start {
                    r = r.max(l1(&self.checkpoints[m].1.freq, &c.centroid));
                }
            }
        }
        r
    }

    /// Cluster containing the given checkpoint.
    pub fn cluster_of(&self, checkpoint: usize) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.members.contains(&checkpoint))
    }
}

pub fn limit_diagnostics(
    sft: &Sft,
    x: &PointSpec,
    times: &[usize],
    depth: usize,
    tol: f64,
) -> Result<LimitDiagnostics> {
    if times.is_empty() || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract("checkpoint schedule must be nonempty and increasing".into()));
    }
    if depth == 0 || times[0] < depth {
        return Err(Error::Contract("depth must be positive and below the first checkpoint".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Contract("cluster tolerance must be positive".into()));
    }
    let last = *times.last().unwrap();
    let prefix = x.admissible_prefix(sft, last + depth - 1)?;
    let checkpoints = checkpoint_measures(&prefix, times, depth, sft.alphabet());
    let clusters = cluster(&checkpoints, tol);
    Ok(LimitDiagnostics {
        depth,
        tol,
        checkpoints,
        clusters,
    })
}

pub(crate) fn checkpoint_measures(
    prefix: &[usize],
    times: &[usize],
    depth: usize,
    alphabet: usize,
) -> Vec<(usize, EmpiricalMeasure)> {
    let modulus = (alphabet as u64).pow(depth as u32 - 1);
    let mut counts: HashMap<u64, u64> = HashMap::new();
    let mut out = Vec::with_capacity(times.len());
    let mut code: u64 = prefix[..depth - 1]
        .iter()
        .fold(0, |acc, &s| acc * alphabet as u64 + s as u64);
    let mut next_time = 0;
    for i in 0..*times.last().unwrap() {
        code = (code % modulus) * alphabet as u64 + prefix[i + depth - 1] as u64;
        *counts.entry(code).or_insert(0) += 1;
        if i + 1 == times[next_time] {
            let decoded: HashMap<Vec<usize>, u64> = counts
                .iter()
                .map(|(&c, &n)| (decode(c, depth, alphabet), n))
                .collect();
            out.push((i + 1, EmpiricalMeasure::from_counts(depth, i + 1, &decoded)));
            next_time += 1;
        }
    }
    out
}

fn decode(mut code: u64, depth: usize, alphabet: usize) -> Vec<usize> {
    let mut w = vec![0; depth];
    for slot in w.iter_mut().rev() {
        *slot = (code % alphabet as u64) as usize;
        code /= alphabet as u64;
    }
    w
}

fn centroid(checkpoints: &[(usize, EmpiricalMeasure)], members: &[usize]) -> BTreeMap<Word, f64> {
    let total: f64 = members.iter().map(|&m| checkpoints[m].0 as f64).sum();
    let mut c = BTreeMap::new();
    for &m in members {
        let (n, e) = &checkpoints[m];
        for (w, &p) in &e.freq {
            *c.entry(w.clone()).or_insert(0.0) += p * *n as f64 / total;
        }
    }
    c
}

fn radius(checkpoints: &[(usize, EmpiricalMeasure)], members: &[usize], c: &BTreeMap<Word, f64>) -> f64 {
    members
        .iter()
        .map(|&m| l1(&checkpoints[m].1.freq, c))
        .fold(0.0, f64::max)
}

/// Single-linkage agglomeration, refusing merges whose radius would exceed `tol`.
fn cluster(checkpoints: &[(usize, EmpiricalMeasure)], tol: f64) -> Vec<Cluster> {
    let m = checkpoints.len();
    let dist: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| l1(&checkpoints[i].1.freq, &checkpoints[j].1.freq)).collect())
        .collect();
    let mut groups: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
    loop {
        let mut pairs = Vec::new();
        for a in 0..groups.len() {
            for b in a + 1..groups.len() {
                let link = groups[a]
                    .iter()
                    .flat_map(|&i| groups[b].iter().map(move |&j| (i, j)))
                    .map(|(i, j)| dist[i][j])
                    .fold(f64::INFINITY, f64::min);
                if link <= tol {
                    pairs.push((link, a, b));
                }
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let merged = pairs.into_iter().find_map(|(_, a, b)| {
            let mut members = groups[a].clone();
            members.extend_from_slice(&groups[b]);
            members.sort_unstable();
            let c = centroid(checkpoints, &members);
            (radius(checkpoints, &members, &c) <= tol).then_some((a, b, members))
        });
        match merged {
            Some((a, b, members)) => {
                groups.remove(b);
                groups[a] = members;
            }
            None => break,
        }
    }
    groups.sort_by_key(|g| g[0]);
    groups
        .into_iter()
        .map(|members| {
            let c = centroid(checkpoints, &members);
            let r = radius(checkpoints, &members, &c);
            Cluster {
                members,
                centroid: c,
                radius: r,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_point_single_exact_cluster() {
        let d = limit_diagnostics(
            &Sft::full(2),
            &PointSpec::periodic("01").unwrap(),
            &[8, 16, 32, 64],
            1,
            0.01,
        )
        .unwrap();
        assert!(d.converges());
        let c = &d.clusters[0];
        assert_eq!(c.radius, 0.0);
        assert_eq!(c.centroid.get(&"0".parse::<Word>().unwrap()), Some(&0.5));
    }

    #[test]
    fn two_regimes_split() {
        // 0^100 then 1^900 then ...: checkpoints at 100 and 1000 are far apart
        let mut s = vec![0usize; 100];
        s.extend(vec![1usize; 9900]);
        let x = PointSpec::Stored(Word(s));
        let d = limit_diagnostics(&Sft::full(2), &x, &[50, 100, 5000, 10000], 1, 0.2).unwrap();
        assert_eq!(d.clusters.len(), 2);
        assert_eq!(d.clusters[0].members, vec![0, 1]);
        for c in &d.clusters {
            assert!(c.radius <= 0.2);
        }
    }

    #[test]
    fn bad_schedule() {
        let x = PointSpec::periodic("0").unwrap();
        assert!(limit_diagnostics(&Sft::full(2), &x, &[10, 5], 1, 0.1).is_err());
        assert!(limit_diagnostics(&Sft::full(2), &x, &[10], 1, 0.0).is_err());
    }
}
