//! Phase-reconstruction vocoder stand-in: log-mel back to a waveform.
//!
//! The mel matrix is inverted to a linear magnitude spectrogram with
//! multiplicative NNLS updates, then phases are recovered by fixed-point
//! iteration with a deterministic zero-phase start.

use ndarray::Array2;
use rustfft::{num_complex::Complex, FftPlanner};

use crate::audio::{AudioClip, SAMPLE_RATE};
use crate::dsp::mel::{
    istft_from_complex, mel_filterbank, stft_complex, MelSpectrogram, FFT_SIZE, FRAME_SHIFT,
    LOG_FLOOR, N_BINS,
};
use crate::error::Result;

pub const DEFAULT_ITERATIONS: usize = 60;
const NNLS_ITERATIONS: usize = 30;

/// Least-squares-ish inversion of the mel filterbank with non-negativity,
/// via multiplicative updates. Sharper than the plain transpose, which
/// matters for recovering harmonic spacing at low frequencies.
fn mel_to_linear(mel_mag: &Array2<f64>) -> Array2<f64> {
    let bank = mel_filterbank(); // mels x bins
    let bank_t = bank.t().to_owned(); // bins x mels
    // Init with the transpose projection (normalized by filter mass).
    let col_mass = bank.sum_axis(ndarray::Axis(0)).mapv(|v: f64| v.max(1e-8));
    let mut linear = mel_mag.dot(&bank); // frames x bins
    for mut row in linear.rows_mut() {
        for (bin, v) in row.iter_mut().enumerate() {
            *v /= col_mass[bin];
        }
    }
    linear.mapv_inplace(|v| v.max(1e-10));
    for _ in 0..NNLS_ITERATIONS {
        // x <- x * (M^T y) / (M^T M x), elementwise over bins.
        let reproj = linear.dot(&bank_t); // frames x mels
        let num = mel_mag.dot(&bank); // frames x bins
        let den = reproj.dot(&bank); // frames x bins
        ndarray::Zip::from(&mut linear)
            .and(&num)
            .and(&den)
            .for_each(|x, &n, &d| {
                *x *= n / d.max(1e-12);
                *x = x.max(1e-12);
            });
    }
    linear
}

/// Reconstructs a waveform whose length is `frames * shift` samples.
/// Deterministic for a fixed iteration count.
pub fn reconstruct_waveform(mel: &MelSpectrogram, iterations: usize) -> Result<AudioClip> {
    let n_frames = mel.frames();
    let mag = mel_to_linear(&mel.values.mapv(f64::exp));
    // Everything at the log floor renders as silence, not as a faint hiss.
    let floorish = mel
        .values
        .iter()
        .all(|&v| (v - LOG_FLOOR.ln()).abs() < 1e-6);
    let out_len = n_frames * FRAME_SHIFT;
    if floorish {
        return AudioClip::new(vec![0.0; out_len], SAMPLE_RATE);
    }

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(FFT_SIZE);
    let ifft = planner.plan_fft_inverse(FFT_SIZE);

    // Zero phase start.
    let mut spec: Vec<Vec<Complex<f64>>> = (0..n_frames)
        .map(|t| (0..N_BINS).map(|b| Complex::new(mag[[t, b]], 0.0)).collect())
        .collect();
    let mut audio = istft_from_complex(&spec, out_len, &ifft);
    for _ in 0..iterations {
        let est = stft_complex(&audio, n_frames, &fft);
        for t in 0..n_frames {
            for b in 0..N_BINS {
                let phase = est[t][b].arg();
                spec[t][b] = Complex::from_polar(mag[[t, b]], phase);
            }
        }
        audio = istft_from_complex(&spec, out_len, &ifft);
    }
    let peak = audio.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    if peak > 0.95 {
        let g = 0.95 / peak;
        audio.iter_mut().for_each(|v| *v *= g);
    }
    AudioClip::new(audio, SAMPLE_RATE)
}
