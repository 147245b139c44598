//! Per-frame fundamental frequency via normalized autocorrelation.
//!
//! Frames are aligned with the mel spectrogram (center padding, 12.5 ms
//! shift). Search range 50..500 Hz, voicing threshold 0.3 on the normalized
//! peak, parabolic interpolation for sub-sample lag.

use crate::audio::{AudioClip, SAMPLE_RATE};
use crate::dsp::mel::{center_padded, frame_count, FRAME_LENGTH, FRAME_SHIFT};
use crate::error::Result;

pub const F0_MIN: f64 = 50.0;
pub const F0_MAX: f64 = 500.0;
/// Normalized autocorrelation peak below this is treated as unvoiced.
pub const VOICING_THRESHOLD: f64 = 0.3;
/// A shorter-lag peak within this fraction of the best peak wins; guards
/// against octave-down errors on strongly periodic signals.
const OCTAVE_TOLERANCE: f64 = 0.92;
/// Frames quieter than this (mean |x|) are unvoiced outright.
const SILENCE_FLOOR: f64 = 1e-4;

/// lf0 (natural log of F0, 0 where unvoiced) and the binary VUV flag,
/// frame-aligned with the mel spectrogram of the same clip.
pub fn extract_f0(audio: &AudioClip) -> Result<(Vec<f64>, Vec<u8>)> {
    audio.check_pipeline_rate()?;
    let n_frames = frame_count(audio.len());
    let padded = center_padded(&audio.samples);
    let lag_min = (SAMPLE_RATE as f64 / F0_MAX).floor() as usize; // 32
    let lag_max = (SAMPLE_RATE as f64 / F0_MIN).ceil() as usize; // 320

    let mut lf0 = vec![0.0; n_frames];
    let mut vuv = vec![0u8; n_frames];
    for t in 0..n_frames {
        let frame = &padded[t * FRAME_SHIFT..t * FRAME_SHIFT + FRAME_LENGTH];
        if let Some(f0) = frame_f0(frame, lag_min, lag_max) {
            lf0[t] = f0.ln();
            vuv[t] = 1;
        }
    }
    Ok((lf0, vuv))
}

/// F0 of a single frame, or None when unvoiced.
fn frame_f0(frame: &[f64], lag_min: usize, lag_max: usize) -> Option<f64> {
    let n = frame.len();
    let mean_abs = frame.iter().map(|x| x.abs()).sum::<f64>() / n as f64;
    if mean_abs < SILENCE_FLOOR {
        return None;
    }
    // Normalized cross-correlation r(tau) over the overlapping region.
    let mut r = vec![0.0; lag_max + 2];
    for tau in lag_min..=lag_max.min(n - 1) {
        let m = n - tau;
        let mut dot = 0.0;
        let mut e0 = 0.0;
        let mut e1 = 0.0;
        for i in 0..m {
            let a = frame[i];
            let b = frame[i + tau];
            dot += a * b;
            e0 += a * a;
            e1 += b * b;
        }
        let denom = (e0 * e1).sqrt();
        r[tau] = if denom > 0.0 { dot / denom } else { 0.0 };
    }

    // Local maxima in the search range.
    let mut peaks: Vec<(usize, f64)> = Vec::new();
    for tau in lag_min.max(1)..lag_max.min(n - 2) {
        if r[tau] >= r[tau - 1] && r[tau] > r[tau + 1] {
            peaks.push((tau, r[tau]));
        }
    }
    let best = peaks
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() || best < VOICING_THRESHOLD {
        return None;
    }
    // Prefer the shortest lag whose peak is close to the best; true periods
    // beat their multiples, dominant-partial sublags stay below tolerance.
    let (tau, _) = peaks
        .iter()
        .copied()
        .find(|&(_, v)| v >= best * OCTAVE_TOLERANCE)
        .expect("at least the best peak qualifies");

    let refined = parabolic_interp(&r, tau);
    let f0 = SAMPLE_RATE as f64 / refined;
    if (F0_MIN..=F0_MAX).contains(&f0) {
        Some(f0)
    } else {
        None
    }
}

/// Sub-sample peak location from the three points around `i`.
fn parabolic_interp(r: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= r.len() {
        return i as f64;
    }
    let (a, b, c) = (r[i - 1], r[i], r[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom.abs() < 1e-12 {
        return i as f64;
    }
    let delta = 0.5 * (a - c) / denom;
    i as f64 + delta.clamp(-1.0, 1.0)
}
