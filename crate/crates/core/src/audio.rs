//! Mono waveform container and RIFF PCM16 I/O.

use std::path::Path;

use crate::error::{Error, Result};

/// Sample rate the whole pipeline runs at.
pub const SAMPLE_RATE: u32 = 16_000;

/// Mono waveform with its sample rate. Samples live in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidInput("audio contains NaN/Inf samples".into()));
        }
        Ok(AudioClip {
            samples,
            sample_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Rejects clips that cannot enter the 16 kHz pipeline.
    pub fn check_pipeline_rate(&self) -> Result<()> {
        if self.sample_rate != SAMPLE_RATE {
            return Err(Error::InvalidInput(format!(
                "pipeline requires {SAMPLE_RATE} Hz audio, got {} Hz",
                self.sample_rate
            )));
        }
        Ok(())
    }

    /// Writes the clip as RIFF PCM16 mono.
    pub fn save_wav(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: self.sample_rate,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut writer = hound::WavWriter::create(path, spec)
            .map_err(|e| Error::Data(format!("cannot create {}: {e}", path.display())))?;
        for &s in &self.samples {
            let clamped = s.clamp(-1.0, 1.0);
            let q = (clamped * 32767.0).round() as i16;
            writer
                .write_sample(q)
                .map_err(|e| Error::Data(format!("wav write to {}: {e}", path.display())))?;
        }
        writer
            .finalize()
            .map_err(|e| Error::Data(format!("wav finalize {}: {e}", path.display())))?;
        Ok(())
    }

    /// Reads a RIFF PCM16 mono file.
    pub fn load_wav(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = hound::WavReader::open(path)
            .map_err(|e| Error::Data(format!("cannot open wav {}: {e}", path.display())))?;
        let spec = reader.spec();
        if spec.channels != 1 {
            return Err(Error::Data(format!(
                "{}: expected mono, got {} channels",
                path.display(),
                spec.channels
            )));
        }
        let samples: std::result::Result<Vec<i16>, _> = reader.samples::<i16>().collect();
        let samples =
            samples.map_err(|e| Error::Data(format!("wav read {}: {e}", path.display())))?;
        let samples = samples.into_iter().map(|s| s as f64 / 32767.0).collect();
        AudioClip::new(samples, spec.sample_rate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wav_round_trip_preserves_quantized_samples() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        let clip = AudioClip::new(vec![0.0, 0.5, -0.5, 0.25], SAMPLE_RATE).unwrap();
        clip.save_wav(&path).unwrap();
        let back = AudioClip::load_wav(&path).unwrap();
        assert_eq!(back.sample_rate, SAMPLE_RATE);
        assert_eq!(back.len(), 4);
        for (a, b) in clip.samples.iter().zip(back.samples.iter()) {
            assert!((a - b).abs() < 1.0 / 32000.0);
        }
    }

    #[test]
    fn rejects_non_finite_samples() {
        assert!(AudioClip::new(vec![0.0, f64::NAN], SAMPLE_RATE).is_err());
    }

    #[test]
    fn rejects_wrong_rate_for_pipeline() {
        let clip = AudioClip::new(vec![0.0; 100], 22_050).unwrap();
        assert!(clip.check_pipeline_rate().is_err());
    }
}
