//! Deterministic signal-processing front end: mel spectrogram, f0/VUV,
//! frame energy, the linear lf0 transform, and phase-reconstruction
//! waveform synthesis.

pub mod griffin_lim;
pub mod mel;
pub mod pitch;
pub mod prosody;

pub use griffin_lim::{reconstruct_waveform, DEFAULT_ITERATIONS};
pub use mel::{mel_spectrogram, MelSpectrogram, FRAME_SHIFT_MS, N_MELS};
pub use pitch::extract_f0;
pub use prosody::{extract_prosody, frame_energy, transform_lf0, F0Stats, ProsodyFeatures};
