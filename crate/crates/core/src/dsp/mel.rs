//! Mel spectrogram: 80 log-mel bands, 50 ms frames, 12.5 ms shift, 16 kHz.

use std::sync::Arc;

use ndarray::Array2;
use rustfft::{num_complex::Complex, Fft, FftPlanner};

use crate::audio::AudioClip;
use crate::error::{Error, Result};

pub const N_MELS: usize = 80;
pub const FRAME_LENGTH_MS: f64 = 50.0;
pub const FRAME_SHIFT_MS: f64 = 12.5;
/// 50 ms at 16 kHz.
pub const FRAME_LENGTH: usize = 800;
/// 12.5 ms at 16 kHz.
pub const FRAME_SHIFT: usize = 200;
pub const FFT_SIZE: usize = 1024;
pub const N_BINS: usize = FFT_SIZE / 2 + 1;
/// Magnitudes are clamped here before the log so silence stays finite.
pub const LOG_FLOOR: f64 = 1e-5;

/// Frames x 80 matrix of log mel-band magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct MelSpectrogram {
    pub values: Array2<f64>,
}

impl MelSpectrogram {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.ncols() != N_MELS {
            return Err(Error::shape(
                format!("frames x {N_MELS}"),
                format!("{} x {}", values.nrows(), values.ncols()),
                "mel spectrogram",
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("mel contains non-finite values".into()));
        }
        Ok(MelSpectrogram { values })
    }

    pub fn frames(&self) -> usize {
        self.values.nrows()
    }
}

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Number of frames produced for `num_samples` samples under center padding.
pub fn frame_count(num_samples: usize) -> usize {
    1 + num_samples / FRAME_SHIFT
}

/// Center time of frame `t` in seconds.
pub fn frame_time(t: usize) -> f64 {
    t as f64 * FRAME_SHIFT as f64 / crate::audio::SAMPLE_RATE as f64
}

/// Triangular mel filterbank, `N_MELS x N_BINS`, spanning 0..Nyquist.
pub fn mel_filterbank() -> Array2<f64> {
    let sr = crate::audio::SAMPLE_RATE as f64;
    let mel_max = hz_to_mel(sr / 2.0);
    // N_MELS + 2 edges, uniformly spaced on the mel scale.
    let edges: Vec<f64> = (0..N_MELS + 2)
        .map(|i| mel_to_hz(mel_max * i as f64 / (N_MELS + 1) as f64))
        .collect();
    let mut bank = Array2::zeros((N_MELS, N_BINS));
    for m in 0..N_MELS {
        let (lo, center, hi) = (edges[m], edges[m + 1], edges[m + 2]);
        for bin in 0..N_BINS {
            let f = bin as f64 * sr / FFT_SIZE as f64;
            let w = if f >= lo && f <= center {
                (f - lo) / (center - lo)
            } else if f > center && f <= hi {
                (hi - f) / (hi - center)
            } else {
                0.0
            };
            bank[[m, bin]] = w;
        }
    }
    bank
}

/// Periodic Hann window of length `FRAME_LENGTH`.
fn hann_window() -> Vec<f64> {
    (0..FRAME_LENGTH)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / FRAME_LENGTH as f64).cos())
        .collect()
}

/// Pads `FRAME_LENGTH / 2` zeros on each side so frame `t` is centered on
/// sample `t * FRAME_SHIFT`; frame count is then `1 + floor(N / shift)`.
pub(crate) fn center_padded(samples: &[f64]) -> Vec<f64> {
    let pad = FRAME_LENGTH / 2;
    let mut out = vec![0.0; samples.len() + 2 * pad];
    out[pad..pad + samples.len()].copy_from_slice(samples);
    out
}

/// Magnitude spectrogram, frames x N_BINS, center-padded Hann STFT.
pub fn magnitude_spectrogram(audio: &AudioClip) -> Result<Array2<f64>> {
    audio.check_pipeline_rate()?;
    if audio.is_empty() {
        return Err(Error::InvalidInput("empty audio".into()));
    }
    let padded = center_padded(&audio.samples);
    let n_frames = frame_count(audio.len());
    let window = hann_window();
    let fft = FftPlanner::new().plan_fft_forward(FFT_SIZE);
    let mut mags = Array2::zeros((n_frames, N_BINS));
    let mut buf = vec![Complex::new(0.0, 0.0); FFT_SIZE];
    for t in 0..n_frames {
        let start = t * FRAME_SHIFT;
        for i in 0..FFT_SIZE {
            buf[i] = if i < FRAME_LENGTH {
                Complex::new(padded[start + i] * window[i], 0.0)
            } else {
                Complex::new(0.0, 0.0)
            };
        }
        fft.process(&mut buf);
        for (bin, c) in buf.iter().take(N_BINS).enumerate() {
            mags[[t, bin]] = c.norm();
        }
    }
    Ok(mags)
}

/// 80-dim log-mel spectrum with 50 ms frame length and 12.5 ms frame shift.
pub fn mel_spectrogram(audio: &AudioClip) -> Result<MelSpectrogram> {
    let mags = magnitude_spectrogram(audio)?;
    let bank = mel_filterbank();
    // frames x bins  *  bins x mels
    let mel = mags.dot(&bank.t());
    let logged = mel.mapv(|v| v.max(LOG_FLOOR).ln());
    MelSpectrogram::new(logged)
}

pub(crate) fn istft_from_complex(
    spec: &[Vec<Complex<f64>>],
    out_len: usize,
    ifft: &Arc<dyn Fft<f64>>,
) -> Vec<f64> {
    let window = hann_window();
    let pad = FRAME_LENGTH / 2;
    let total = (spec.len().saturating_sub(1)) * FRAME_SHIFT + FRAME_LENGTH;
    let mut acc = vec![0.0; total];
    let mut norm = vec![0.0; total];
    let mut buf = vec![Complex::new(0.0, 0.0); FFT_SIZE];
    for (t, frame) in spec.iter().enumerate() {
        // Rebuild the full spectrum from the half-spectrum (real signal symmetry).
        for bin in 0..N_BINS {
            buf[bin] = frame[bin];
        }
        for bin in N_BINS..FFT_SIZE {
            buf[bin] = frame[FFT_SIZE - bin].conj();
        }
        ifft.process(&mut buf);
        let start = t * FRAME_SHIFT;
        for i in 0..FRAME_LENGTH {
            let v = buf[i].re / FFT_SIZE as f64;
            acc[start + i] += v * window[i];
            norm[start + i] += window[i] * window[i];
        }
    }
    let mut out = vec![0.0; out_len];
    for i in 0..out_len {
        let j = i + pad;
        if j < acc.len() && norm[j] > 1e-9 {
            out[i] = acc[j] / norm[j];
        }
    }
    out
}

pub(crate) fn stft_complex(samples: &[f64], n_frames: usize, fft: &Arc<dyn Fft<f64>>) -> Vec<Vec<Complex<f64>>> {
    let window = hann_window();
    let padded = center_padded(samples);
    let mut out = Vec::with_capacity(n_frames);
    let mut buf = vec![Complex::new(0.0, 0.0); FFT_SIZE];
    for t in 0..n_frames {
        let start = t * FRAME_SHIFT;
        for i in 0..FFT_SIZE {
            buf[i] = if i < FRAME_LENGTH {
                Complex::new(padded.get(start + i).copied().unwrap_or(0.0) * window[i], 0.0)
            } else {
                Complex::new(0.0, 0.0)
            };
        }
        fft.process(&mut buf);
        out.push(buf[..N_BINS].to_vec());
    }
    out
}
