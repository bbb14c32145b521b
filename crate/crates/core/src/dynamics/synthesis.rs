use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classic::classical_pressure;
use crate::measures::diagnostics::checkpoint_measures;
use crate::measures::empirical::l1;
use crate::measures::{LocallyConstantPotential, MarkovMeasure};
use crate::pesin::point_pressure_oracle;
use crate::star::{achievable_interval, expectation, star_equilibrium, DiagnosticsConfig, LevelSet, MeasureFamily};
use crate::symbolic::{is_mixing, PointSource, PointSpec, Sft, Word};
use crate::{Error, Result};

/// Length-`n` sample path of the chain started from its stationary law.
pub fn generic_word(mu: &MarkovMeasure, n: usize, seed: u64) -> Result<Word> {
    if !mu.is_ergodic() {
        return Err(Error::Domain("generic words need an ergodic measure".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(Word(sample_path(mu, n, &mut rng)))
}

fn draw(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

fn sample_path(mu: &MarkovMeasure, n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let mut s = draw(mu.stationary(), rng);
    out.push(s);
    for _ in 1..n {
        s = draw(&mu.kernel()[s], rng);
        out.push(s);
    }
    out
}

/// Block lengths grow like `N_{k+1} = max(ceil(growth * t_k) + 1, 4 N_k)`
/// where `t_k` is the end of block `k`; consecutive blocks are joined by
/// connectors of length `gap`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SynthesisSchedule {
    pub first_block: usize,
    pub growth: f64,
    /// Connector length; `None` uses the mixing gap of the shift.
    pub gap: Option<usize>,
    /// Checkpoints are reported up to this time.
    pub horizon: usize,
}

impl Default for SynthesisSchedule {
    fn default() -> Self {
        SynthesisSchedule {
            first_block: 16,
            growth: 32.0,
            gap: None,
            horizon: 1 << 20,
        }
    }
}

impl SynthesisSchedule {
    fn next_block(&self, block: usize, t: usize) -> usize {
        ((self.growth * t as f64).ceil() as usize + 1).max(4 * block)
    }

    /// Block lengths and checkpoint times `t_k` up to the horizon.
    pub fn layout(&self, gap: usize) -> (Vec<usize>, Vec<usize>) {
        let mut blocks = vec![self.first_block];
        let mut times = vec![self.first_block];
        loop {
            let t = *times.last().unwrap();
            let b = self.next_block(*blocks.last().unwrap(), t);
            if t + gap + b > self.horizon {
                break;
            }
            blocks.push(b);
            times.push(t + gap + b);
        }
        (blocks, times)
    }
}

#[derive(Debug)]
struct SynthSource {
    sft: Sft,
    measures: [MarkovMeasure; 2],
    schedule: SynthesisSchedule,
    gap: usize,
    seed: u64,
    /// `reach[m][i][j]`: a path of exactly `m` edges runs from `i` to `j`.
    reach: Vec<Vec<Vec<bool>>>,
    state: Mutex<Stream>,
}

#[derive(Debug, Default)]
struct Stream {
    symbols: Vec<usize>,
    blocks: usize,
    last_block: usize,
}

impl SynthSource {
    /// Lexicographically smallest `w` of length `gap` with `a w b` admissible.
    fn connector(&self, a: usize, b: usize) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.gap);
        let mut prev = a;
        for pos in 0..self.gap {
            let left = self.gap - pos;
            let c = (0..self.sft.alphabet())
                .find(|&c| self.sft.allows(prev, c) && self.reach[left][c][b])
                .expect("mixing shift admits a connector of the mixing gap");
            w.push(c);
            prev = c;
        }
        debug_assert!(self.sft.allows(prev, b));
        w
    }

    fn block_seed(&self, k: usize) -> u64 {
        self.seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }

    fn extend(&self, stream: &mut Stream) {
        let k = stream.blocks;
        let len = if k == 0 {
            self.schedule.first_block
        } else {
            self.schedule.next_block(stream.last_block, stream.symbols.len())
        };
        let mut rng = ChaCha8Rng::seed_from_u64(self.block_seed(k));
        let block = sample_path(&self.measures[k % 2], len, &mut rng);
        if let Some(&a) = stream.symbols.last() {
            let bridge = self.connector(a, block[0]);
            stream.symbols.extend(bridge);
        }
        stream.symbols.extend(block);
        stream.blocks += 1;
        stream.last_block = len;
    }
}

impl PointSource for SynthSource {
    fn prefix(&self, n: usize) -> Vec<usize> {
        let mut stream = self.state.lock().expect("synthesis cache poisoned");
        while stream.symbols.len() < n {
            self.extend(&mut stream);
        }
        stream.symbols[..n].to_vec()
    }
}

/// A point alternating between generic blocks of two measures.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub point: PointSpec,
    pub mu1: MarkovMeasure,
    pub mu2: MarkovMeasure,
    pub schedule: SynthesisSchedule,
    pub gap: usize,
    pub blocks: Vec<usize>,
    /// Ends of the blocks, `t_k`.
    pub checkpoints: Vec<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub checkpoints: Vec<usize>,
    /// Depth-1 distance at each checkpoint to the measure of the block
    /// just completed.
    pub distances: Vec<f64>,
    pub schedule: SynthesisSchedule,
    pub seed: u64,
    /// Smallest and largest Birkhoff average over the checkpoints past the
    /// second, when a potential was supplied.
    pub liminf: Option<f64>,
    pub limsup: Option<f64>,
}

impl Certificate {
    pub fn gap(&self) -> Option<f64> {
        Some(self.limsup? - self.liminf?)
    }
}

impl Synthesis {
    /// Diagnostics on the checkpoint times past the first block, with the
    /// two target measures as catalog. At `t_k` the earlier history has
    /// weight about `t_{k-1} / t_k`, which moves the empirical measure by up
    /// to twice that in L1; the snap tolerance allows for it plus sampling
    /// noise.
    pub fn diagnostics_config(&self) -> DiagnosticsConfig {
        let history = self
            .checkpoints
            .windows(2)
            .skip(1)
            .map(|w| (w[0] + self.gap) as f64 / w[1] as f64)
            .fold(0.0, f64::max);
        DiagnosticsConfig {
            times: self.checkpoints[1.min(self.checkpoints.len() - 1)..].to_vec(),
            depth: 2,
            tol: 0.05,
            catalog: vec![self.mu1.clone(), self.mu2.clone()],
            snap_tol: 0.05 + 2.0 * history,
        }
    }

    pub fn certificate(&self, sft: &Sft, phi: Option<&LocallyConstantPotential>) -> Result<Certificate> {
        let last = *self.checkpoints.last().unwrap();
        let prefix = self.point.admissible_prefix(sft, last)?;
        let measures = checkpoint_measures(&prefix, &self.checkpoints, 1, sft.alphabet());
        let targets = [self.mu1.cylinder_probabilities(1), self.mu2.cylinder_probabilities(1)];
        let distances = measures
            .iter()
            .enumerate()
            .map(|(k, (_, m))| l1(&m.freq, &targets[k % 2]))
            .collect();
        let (liminf, limsup) = match phi {
            Some(phi) if self.checkpoints.len() > 2 => {
                let horizons = &self.checkpoints[2..];
                let (lo, hi) = point_pressure_oracle(sft, &self.point, phi, horizons)?;
                (Some(lo), Some(hi))
            }
            _ => (None, None),
        };
        Ok(Certificate {
            checkpoints: self.checkpoints.clone(),
            distances,
            schedule: self.schedule.clone(),
            seed: self.seed,
            liminf,
            limsup,
        })
    }
}

fn reachability(sft: &Sft, max_len: usize) -> Vec<Vec<Vec<bool>>> {
    let n = sft.alphabet();
    let mut out = vec![vec![vec![false; n]; n]];
    for i in 0..n {
        out[0][i][i] = true;
    }
    for m in 1..=max_len {
        let prev = &out[m - 1];
        let next: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| sft.successors(i).any(|k| prev[k][j])).collect())
            .collect();
        out.push(next);
    }
    out
}

/// Concatenation `w_1 c_1 w_2 c_2 ...` of generic words of `mu1` (odd
/// blocks) and `mu2` (even blocks) joined by deterministic connectors.
pub fn specification_synthesizer(
    sft: &Sft,
    mu1: &MarkovMeasure,
    mu2: &MarkovMeasure,
    schedule: &SynthesisSchedule,
    seed: u64,
) -> Result<Synthesis> {
    if !is_mixing(sft)? {
        return Err(Error::Unsupported("synthesis needs a mixing shift".into()));
    }
    let mixing = sft.mixing_gap().expect("mixing shift has a mixing gap");
    let gap = schedule.gap.unwrap_or(mixing);
    if gap < mixing {
        return Err(Error::Contract(format!("connector length {gap} below the mixing gap {mixing}")));
    }
    if !(schedule.growth >= 2.0) || schedule.first_block == 0 {
        return Err(Error::Contract("growth factor must be at least 2 and blocks nonempty".into()));
    }
    for mu in [mu1, mu2] {
        mu.check_compatible(sft)?;
        if !mu.is_ergodic() {
            return Err(Error::Domain("synthesis targets must be ergodic".into()));
        }
    }
    let (blocks, checkpoints) = schedule.layout(gap);
    let source = SynthSource {
        sft: sft.clone(),
        measures: [mu1.clone(), mu2.clone()],
        schedule: schedule.clone(),
        gap,
        seed,
        reach: reachability(sft, gap),
        state: Mutex::new(Stream::default()),
    };
    Ok(Synthesis {
        point: PointSpec::Streamed(Arc::new(source)),
        mu1: mu1.clone(),
        mu2: mu2.clone(),
        schedule: schedule.clone(),
        gap,
        blocks,
        checkpoints,
        seed,
    })
}

#[derive(Clone, Debug)]
pub struct IrregularWitness {
    pub synthesis: Synthesis,
    pub certificate: Certificate,
    /// The two levels `int phi dmu1` and `int phi dmu2`.
    pub levels: (f64, f64),
}

/// A point whose Birkhoff averages of `phi` oscillate between the
/// maximal-entropy level and the far end of the achievable interval.
pub fn irregular_witness(sft: &Sft, phi: &LocallyConstantPotential, seed: u64) -> Result<IrregularWitness> {
    if phi.range() > 2 {
        return Err(Error::Unsupported("witness synthesis takes potentials of range at most 2".into()));
    }
    let (lo, hi) = achievable_interval(sft, phi)?;
    if hi - lo <= 1e-12 {
        return Err(Error::Domain("potential is cohomologous to a constant; no irregular points".into()));
    }
    let zero = LocallyConstantPotential::zero(sft);
    let mu1 = classical_pressure(sft, &zero)?
        .equilibrium
        .ok_or_else(|| Error::Domain("no maximal-entropy measure".into()))?;
    let a1 = expectation(&mu1, phi)?;
    let alpha = if hi - a1 > a1 - lo { hi } else { lo };
    let level = LevelSet::new(sft, phi.clone(), alpha)?;
    let mu2 = star_equilibrium(sft, &MeasureFamily::LevelSet(level), &zero)?
        .maximizer
        .expect("equilibrium carries a maximizer");
    if !mu2.is_ergodic() {
        return Err(Error::Unsupported("boundary maximizer is not ergodic".into()));
    }
    let a2 = expectation(&mu2, phi)?;
    let synthesis = specification_synthesizer(sft, &mu1, &mu2, &SynthesisSchedule::default(), seed)?;
    let certificate = synthesis.certificate(sft, Some(phi))?;
    Ok(IrregularWitness {
        synthesis,
        certificate,
        levels: (a1, a2),
    })
}
