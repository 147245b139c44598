//! Single-tensor binary container used for all feature files.
//!
//! Layout: 16-byte magic, little-endian u64 header length, JSON header,
//! raw float32 little-endian payload in row-major order.

use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 16] = b"OVC-TENSOR-v1\0\0\0";
pub const DTYPE: &str = "float32le";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorHeader {
    pub shape: Vec<usize>,
    pub dtype: String,
    pub feature: String,
    pub frame_shift_ms: f64,
    /// Content hash of the source audio; used to skip up-to-date extractions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_sha256: Option<String>,
}

#[derive(Debug, Clone)]
pub struct TensorFile {
    pub header: TensorHeader,
    /// Row-major payload, f64 in memory, f32 on disk.
    pub data: Vec<f64>,
}

impl TensorFile {
    pub fn from_matrix(feature: &str, values: &Array2<f64>, frame_shift_ms: f64) -> Self {
        TensorFile {
            header: TensorHeader {
                shape: vec![values.nrows(), values.ncols()],
                dtype: DTYPE.into(),
                feature: feature.into(),
                frame_shift_ms,
                source_sha256: None,
            },
            data: values.iter().copied().collect(),
        }
    }

    pub fn from_vector(feature: &str, values: &[f64], frame_shift_ms: f64) -> Self {
        TensorFile {
            header: TensorHeader {
                shape: vec![values.len()],
                dtype: DTYPE.into(),
                feature: feature.into(),
                frame_shift_ms,
                source_sha256: None,
            },
            data: values.to_vec(),
        }
    }

    pub fn with_source_hash(mut self, hash: impl Into<String>) -> Self {
        self.header.source_sha256 = Some(hash.into());
        self
    }

    pub fn as_matrix(&self) -> Result<Array2<f64>> {
        if self.header.shape.len() != 2 {
            return Err(Error::shape(
                "2-d tensor",
                format!("{:?}", self.header.shape),
                format!("feature {}", self.header.feature),
            ));
        }
        let (r, c) = (self.header.shape[0], self.header.shape[1]);
        Array2::from_shape_vec((r, c), self.data.clone())
            .map_err(|e| Error::Data(format!("tensor shape: {e}")))
    }

    pub fn as_vector(&self) -> Result<Array1<f64>> {
        if self.header.shape.len() != 1 {
            return Err(Error::shape(
                "1-d tensor",
                format!("{:?}", self.header.shape),
                format!("feature {}", self.header.feature),
            ));
        }
        Ok(Array1::from_vec(self.data.clone()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let expected: usize = self.header.shape.iter().product();
        assert_eq!(expected, self.data.len(), "tensor payload/shape mismatch");
        let header_json = serde_json::to_vec(&self.header)?;
        let mut file =
            std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut buf = Vec::with_capacity(16 + 8 + header_json.len() + self.data.len() * 4);
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&(header_json.len() as u64).to_le_bytes());
        buf.extend_from_slice(&header_json);
        for &v in &self.data {
            buf.extend_from_slice(&(v as f32).to_le_bytes());
        }
        file.write_all(&buf)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut file =
            std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_bytes(&bytes).map_err(|e| match e {
            Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Reads only the header; used for idempotence checks.
    pub fn load_header(path: impl AsRef<Path>) -> Result<TensorHeader> {
        let path = path.as_ref();
        let bytes =
            std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let (header, _) = Self::parse_header(&bytes)?;
        Ok(header)
    }

    fn parse_header(bytes: &[u8]) -> Result<(TensorHeader, usize)> {
        if bytes.len() < 24 || &bytes[..16] != MAGIC {
            return Err(Error::Data("bad tensor magic".into()));
        }
        let header_len = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
        let payload_start = 24 + header_len;
        if bytes.len() < payload_start {
            return Err(Error::Data("truncated tensor header".into()));
        }
        let header: TensorHeader = serde_json::from_slice(&bytes[24..payload_start])
            .map_err(|e| Error::Data(format!("malformed tensor header: {e}")))?;
        if header.dtype != DTYPE {
            return Err(Error::Data(format!(
                "unsupported dtype {:?}, expected {DTYPE:?}",
                header.dtype
            )));
        }
        Ok((header, payload_start))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (header, payload_start) = Self::parse_header(bytes)?;
        let n: usize = header.shape.iter().product();
        let payload = &bytes[payload_start..];
        if payload.len() != n * 4 {
            return Err(Error::Data(format!(
                "payload is {} bytes, shape {:?} needs {}",
                payload.len(),
                header.shape,
                n * 4
            )));
        }
        let data = payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect();
        Ok(TensorFile { header, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.feat");
        let m = arr2(&[[1.0, 2.0], [3.0, 4.5], [-0.25, 0.0]]);
        TensorFile::from_matrix("mel", &m, 12.5).save(&path).unwrap();
        let back = TensorFile::load(&path).unwrap();
        assert_eq!(back.header.shape, vec![3, 2]);
        assert_eq!(back.header.feature, "mel");
        assert_eq!(back.as_matrix().unwrap(), m);
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.feat");
        std::fs::write(&path, b"definitely not a tensor file at all").unwrap();
        let err = TensorFile::load(&path).unwrap_err();
        assert!(matches!(err, Error::Data(_)));
    }

    #[test]
    fn rejects_truncated_payload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trunc.feat");
        let m = arr2(&[[1.0_f64, 2.0], [3.0, 4.0]]);
        TensorFile::from_matrix("mel", &m, 12.5).save(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 4]).unwrap();
        assert!(TensorFile::load(&path).is_err());
    }
}
