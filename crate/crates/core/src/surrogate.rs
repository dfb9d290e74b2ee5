//! Surrogate series that keep selected marginal properties of a signal while
//! destroying its relation to any other signal.
//!
//! Shuffle surrogates permute the samples and preserve the value multiset
//! exactly. Phase surrogates randomise Fourier phases and preserve the
//! periodogram (hence the autocorrelation). Only the second kind preserves
//! the spectrum, so both are offered.
//!
//! Multichannel data is stored row-major (`len` rows of `channels` values).
//! Rows are permuted as a whole and all channels share the same random phases,
//! which keeps the relation between channels intact.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Residual imaginary part (relative to the largest real sample) tolerated
/// after the inverse transform.
const IMAG_RESIDUE_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SurrogateKind {
    #[default]
    Shuffle,
    Phase,
}

impl SurrogateKind {
    pub fn name(self) -> &'static str {
        match self {
            SurrogateKind::Shuffle => "shuffle",
            SurrogateKind::Phase => "phase",
        }
    }

    /// Applies the surrogate to row-major multichannel data.
    pub fn apply(self, data: &[f64], channels: usize, seed: u64) -> Result<Vec<f64>> {
        match self {
            SurrogateKind::Shuffle => shuffle_rows(data, channels, seed),
            SurrogateKind::Phase => phase_randomize_rows(data, channels, seed),
        }
    }
}

impl std::str::FromStr for SurrogateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shuffle" => Ok(SurrogateKind::Shuffle),
            "phase" => Ok(SurrogateKind::Phase),
            other => Err(Error::Argument(format!("unknown surrogate kind `{other}` (expected shuffle or phase)"))),
        }
    }
}

fn check_layout(data: &[f64], channels: usize, min_rows: usize) -> Result<usize> {
    if channels == 0 || data.len() % channels != 0 {
        return Err(Error::Argument(format!("{} values do not form rows of {channels} channels", data.len())));
    }
    let rows = data.len() / channels;
    if rows < min_rows {
        return Err(Error::Argument(format!("surrogate needs at least {min_rows} samples, got {rows}")));
    }
    Ok(rows)
}

/// Uniformly random permutation of the samples.
pub fn shuffle_surrogate(series: &[f64], seed: u64) -> Result<Vec<f64>> {
    shuffle_rows(series, 1, seed)
}

/// Uniformly random permutation of whole rows.
pub fn shuffle_rows(data: &[f64], channels: usize, seed: u64) -> Result<Vec<f64>> {
    let rows = check_layout(data, channels, 1)?;
    let mut order: Vec<usize> = (0..rows).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut out = Vec::with_capacity(data.len());
    for r in order {
        out.extend_from_slice(&data[r * channels..(r + 1) * channels]);
    }
    Ok(out)
}

/// Phase-randomised surrogate with the same periodogram as `series`.
pub fn phase_surrogate(series: &[f64], seed: u64) -> Result<Vec<f64>> {
    phase_randomize_rows(series, 1, seed)
}

/// Phase randomisation with one shared set of random phases for all channels.
///
/// The DC bin and, for even lengths, the Nyquist bin are kept as they are;
/// every other bin pair `(k, N-k)` is rotated by `(e^{iφ_k}, e^{-iφ_k})`.
pub fn phase_randomize_rows(data: &[f64], channels: usize, seed: u64) -> Result<Vec<f64>> {
    let n = check_layout(data, channels, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rotations: Vec<Complex64> =
        (1..=(n - 1) / 2).map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * TAU)).collect();

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut out = vec![0.0; data.len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..channels {
        for (t, z) in buf.iter_mut().enumerate() {
            *z = Complex64::new(data[t * channels + c], 0.0);
        }
        forward.process(&mut buf);
        for (j, rot) in rotations.iter().enumerate() {
            let k = j + 1;
            buf[k] *= rot;
            buf[n - k] *= rot.conj();
        }
        inverse.process(&mut buf);
        let scale = 1.0 / n as f64;
        let peak = buf.iter().fold(0.0f64, |m, z| m.max(z.re.abs())) * scale;
        let residue = buf.iter().fold(0.0f64, |m, z| m.max(z.im.abs())) * scale;
        assert!(
            residue <= IMAG_RESIDUE_LIMIT * peak.max(f64::MIN_POSITIVE),
            "phase surrogate left an imaginary residue of {residue:e} (peak {peak:e})"
        );
        for (t, z) in buf.iter().enumerate() {
            out[t * channels + c] = z.re * scale;
        }
    }
    Ok(out)
}
