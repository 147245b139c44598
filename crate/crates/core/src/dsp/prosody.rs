//! Explicit prosody carriers: lf0, VUV, z-normalized frame energy, and the
//! linear lf0 transform used at conversion time.

use crate::audio::AudioClip;
use crate::dsp::mel::{center_padded, frame_count, FRAME_LENGTH, FRAME_SHIFT};
use crate::dsp::pitch::extract_f0;
use crate::error::{Error, Result};

/// Per-frame lf0 (0 where unvoiced), VUV flag and z-normalized energy.
/// All three share the mel frame count of the same clip.
#[derive(Debug, Clone, PartialEq)]
pub struct ProsodyFeatures {
    pub lf0: Vec<f64>,
    pub vuv: Vec<u8>,
    pub energy: Vec<f64>,
}

impl ProsodyFeatures {
    pub fn frames(&self) -> usize {
        self.lf0.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.lf0.len() != self.vuv.len() || self.lf0.len() != self.energy.len() {
            return Err(Error::shape(
                "equal lf0/vuv/energy lengths",
                format!("{}/{}/{}", self.lf0.len(), self.vuv.len(), self.energy.len()),
                "prosody features",
            ));
        }
        for t in 0..self.lf0.len() {
            let voiced = self.vuv[t] == 1;
            if voiced != (self.lf0[t] > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "lf0/vuv inconsistent at frame {t}: lf0={} vuv={}",
                    self.lf0[t], self.vuv[t]
                )));
            }
        }
        Ok(())
    }
}

/// Voiced-frame lf0 statistics backing the conversion-phase transform.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct F0Stats {
    pub mean_lf0: f64,
    pub std_lf0: f64,
}

impl F0Stats {
    /// Population mean/std over voiced frames.
    pub fn from_lf0(lf0: &[f64], vuv: &[u8]) -> Result<F0Stats> {
        let voiced: Vec<f64> = lf0
            .iter()
            .zip(vuv)
            .filter(|(_, &v)| v == 1)
            .map(|(&l, _)| l)
            .collect();
        if voiced.is_empty() {
            return Err(Error::Degenerate("no voiced frames for F0 stats".into()));
        }
        let n = voiced.len() as f64;
        let mean = voiced.iter().sum::<f64>() / n;
        let var = voiced.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / n;
        Ok(F0Stats {
            mean_lf0: mean,
            std_lf0: var.sqrt(),
        })
    }

    pub fn from_audio(audio: &AudioClip) -> Result<F0Stats> {
        let (lf0, vuv) = extract_f0(audio)?;
        Self::from_lf0(&lf0, &vuv)
    }
}

/// Per-frame mean absolute amplitude, z-normalized over the utterance.
/// Constant-energy clips map to the all-zero vector.
pub fn frame_energy(audio: &AudioClip) -> Result<Vec<f64>> {
    audio.check_pipeline_rate()?;
    let n_frames = frame_count(audio.len());
    let padded = center_padded(&audio.samples);
    let mut raw = vec![0.0; n_frames];
    for t in 0..n_frames {
        let frame = &padded[t * FRAME_SHIFT..t * FRAME_SHIFT + FRAME_LENGTH];
        raw[t] = frame.iter().map(|x| x.abs()).sum::<f64>() / FRAME_LENGTH as f64;
    }
    let n = n_frames as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let var = raw.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std == 0.0 {
        return Ok(vec![0.0; n_frames]);
    }
    Ok(raw.iter().map(|e| (e - mean) / std).collect())
}

/// Composition of `extract_f0` and `frame_energy`, aligned by construction.
pub fn extract_prosody(audio: &AudioClip) -> Result<ProsodyFeatures> {
    let (lf0, vuv) = extract_f0(audio)?;
    let energy = frame_energy(audio)?;
    let features = ProsodyFeatures { lf0, vuv, energy };
    features.validate()?;
    Ok(features)
}

/// Maps voiced lf0 frames through the affine transform
/// `(lf0 - src.mean) * tgt.std / src.std + tgt.mean`; unvoiced frames stay 0.
pub fn transform_lf0(lf0: &[f64], vuv: &[u8], src: F0Stats, tgt: F0Stats) -> Result<Vec<f64>> {
    if src.std_lf0 <= 0.0 {
        return Err(Error::Degenerate(
            "source lf0 std must be positive for the linear transform".into(),
        ));
    }
    if lf0.len() != vuv.len() {
        return Err(Error::shape(
            "lf0 and vuv of equal length",
            format!("{}/{}", lf0.len(), vuv.len()),
            "transform_lf0",
        ));
    }
    let scale = tgt.std_lf0 / src.std_lf0;
    Ok(lf0
        .iter()
        .zip(vuv)
        .map(|(&l, &v)| {
            if v == 1 {
                (l - src.mean_lf0) * scale + tgt.mean_lf0
            } else {
                0.0
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::SAMPLE_RATE;

    fn tone(freq: f64, secs: f64, amp: f64) -> AudioClip {
        let n = (secs * SAMPLE_RATE as f64).round() as usize;
        let samples = (0..n)
            .map(|i| amp * (2.0 * std::f64::consts::PI * freq * i as f64 / SAMPLE_RATE as f64).sin())
            .collect();
        AudioClip::new(samples, SAMPLE_RATE).unwrap()
    }

    #[test]
    fn constant_tone_energy_is_near_zero() {
        let e = frame_energy(&tone(200.0, 0.5, 0.4)).unwrap();
        // Edge frames see the zero padding; interior frames are constant.
        let interior = &e[3..e.len() - 3];
        let max = interior.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
        assert!(max < 0.35, "interior energy after z-norm: {max}");
        let mean: f64 = e.iter().sum::<f64>() / e.len() as f64;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn half_gain_gives_identical_energy() {
        let clip = tone(180.0, 0.4, 0.6);
        let half = AudioClip::new(clip.samples.iter().map(|s| s * 0.5).collect(), SAMPLE_RATE).unwrap();
        assert_eq!(frame_energy(&clip).unwrap(), frame_energy(&half).unwrap());
    }

    #[test]
    fn amplitude_step_splits_sign() {
        let n = 16_000;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let amp = if i < n / 2 { 0.1 } else { 0.9 };
                amp * (2.0 * std::f64::consts::PI * 150.0 * i as f64 / SAMPLE_RATE as f64).sin()
            })
            .collect();
        let clip = AudioClip::new(samples, SAMPLE_RATE).unwrap();
        let e = frame_energy(&clip).unwrap();
        let mid = e.len() / 2;
        // Skip frames whose window straddles the step or the clip edges.
        assert!(e[2..mid - 2].iter().all(|&v| v < 0.0));
        assert!(e[mid + 2..e.len() - 2].iter().all(|&v| v > 0.0));
    }

    #[test]
    fn prosody_lengths_match_mel() {
        let clip = tone(220.0, 0.73, 0.4);
        let p = extract_prosody(&clip).unwrap();
        let mel = crate::dsp::mel::mel_spectrogram(&clip).unwrap();
        assert_eq!(p.lf0.len(), mel.frames());
        assert_eq!(p.vuv.len(), mel.frames());
        assert_eq!(p.energy.len(), mel.frames());
        assert!(p.vuv.iter().all(|&v| v == 1));
    }

    #[test]
    fn transform_identity_when_stats_equal() {
        let stats = F0Stats {
            mean_lf0: 150.0_f64.ln(),
            std_lf0: 0.1,
        };
        let lf0 = vec![5.0, 0.0, 5.1, 4.9];
        let vuv = vec![1, 0, 1, 1];
        let out = transform_lf0(&lf0, &vuv, stats, stats).unwrap();
        for (a, b) in lf0.iter().zip(&out) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn transform_affine_arithmetic() {
        let src = F0Stats {
            mean_lf0: 150.0_f64.ln(),
            std_lf0: 0.1,
        };
        let tgt = F0Stats {
            mean_lf0: 220.0_f64.ln(),
            std_lf0: 0.2,
        };
        let frame = 150.0_f64.ln() + 0.1;
        let out = transform_lf0(&[frame], &[1], src, tgt).unwrap();
        assert!((out[0] - (220.0_f64.ln() + 0.2)).abs() < 1e-12);
        // Fixed point: the source mean maps to the target mean.
        let out = transform_lf0(&[src.mean_lf0], &[1], src, tgt).unwrap();
        assert!((out[0] - tgt.mean_lf0).abs() < 1e-12);
    }

    #[test]
    fn transform_rejects_zero_std() {
        let src = F0Stats {
            mean_lf0: 5.0,
            std_lf0: 0.0,
        };
        let tgt = F0Stats {
            mean_lf0: 5.2,
            std_lf0: 0.1,
        };
        assert!(transform_lf0(&[5.0], &[1], src, tgt).is_err());
    }

    #[test]
    fn stats_reject_all_unvoiced() {
        assert!(F0Stats::from_lf0(&[0.0, 0.0], &[0, 0]).is_err());
    }

    #[test]
    fn transformed_stats_match_target_exactly_when_input_matches_source() {
        let lf0 = vec![5.0, 5.2, 4.8, 5.1, 4.9];
        let vuv = vec![1u8; 5];
        let src = F0Stats::from_lf0(&lf0, &vuv).unwrap();
        let tgt = F0Stats {
            mean_lf0: 5.5,
            std_lf0: 0.25,
        };
        let out = transform_lf0(&lf0, &vuv, src, tgt).unwrap();
        let got = F0Stats::from_lf0(&out, &vuv).unwrap();
        assert!((got.mean_lf0 - tgt.mean_lf0).abs() < 1e-9);
        assert!((got.std_lf0 - tgt.std_lf0).abs() < 1e-9);
    }
}
