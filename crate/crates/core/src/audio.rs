//! PCM WAV input/output and fixed-length framing.
//!
//! Only mono 16-bit linear PCM is supported. The reader skips any chunks that
//! precede `data` (LIST, fact, ...); the writer always emits the canonical
//! 44-byte header.

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Sample rate every pipeline-bound clip must have.
pub const PIPELINE_SAMPLE_RATE: u32 = 16_000;
/// Analysis window length: 16 ms at 16 kHz.
pub const FRAME_LEN: usize = 256;

const HEADER_LEN: usize = 44;

/// Mono 16-bit PCM audio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AudioClip {
    pub sample_rate: u32,
    pub samples: Vec<i16>,
}

impl AudioClip {
    pub fn new(sample_rate: u32, samples: Vec<i16>) -> Self {
        Self { sample_rate, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    /// Fails with `RateMismatch` unless the clip is at the pipeline rate.
    pub fn ensure_pipeline_rate(&self) -> Result<()> {
        if self.sample_rate != PIPELINE_SAMPLE_RATE {
            return Err(Error::RateMismatch { expected: PIPELINE_SAMPLE_RATE, found: self.sample_rate });
        }
        Ok(())
    }

    pub fn samples_f64(&self) -> Vec<f64> {
        self.samples.iter().map(|&s| f64::from(s)).collect()
    }
}

/// One non-overlapping analysis window borrowed from a sample buffer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame<'a, T = i16> {
    pub index: usize,
    pub samples: &'a [T],
    pub start_ms: f64,
}

/// Splits a clip into contiguous `frame_len` windows. The trailing remainder
/// is dropped.
pub fn frames(clip: &AudioClip, frame_len: usize) -> Result<Vec<Frame<'_>>> {
    clip.ensure_pipeline_rate()?;
    Ok(frame_slices(&clip.samples, frame_len, clip.sample_rate))
}

/// Framing over an arbitrary sample buffer (raw or filtered audio).
pub fn frame_slices<T>(samples: &[T], frame_len: usize, sample_rate: u32) -> Vec<Frame<'_, T>> {
    assert!(frame_len > 0, "frame_len must be positive");
    samples
        .chunks_exact(frame_len)
        .enumerate()
        .map(|(index, samples)| Frame { index, samples, start_ms: frame_start_ms(index, frame_len, sample_rate) })
        .collect()
}

pub fn frame_start_ms(index: usize, frame_len: usize, sample_rate: u32) -> f64 {
    (index * frame_len) as f64 * 1000.0 / f64::from(sample_rate)
}

/// Reads a mono 16-bit PCM WAV file.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        ErrorKind::NotFound => Error::NotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    decode_wav(&bytes)
}

/// Parses WAV bytes already in memory.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioClip> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::UnsupportedFormat("not a RIFF/WAVE file".into()));
    }

    let mut pos = 12;
    let mut sample_rate = None;
    loop {
        if pos + 8 > bytes.len() {
            return Err(Error::CorruptHeader("missing data chunk".into()));
        }
        let id = &bytes[pos..pos + 4];
        let size = u32_le(&bytes[pos + 4..pos + 8]) as usize;
        let body = pos + 8;

        match id {
            b"fmt " => {
                if size < 16 || body + size > bytes.len() {
                    return Err(Error::CorruptHeader("truncated fmt chunk".into()));
                }
                let fmt = &bytes[body..body + size];
                let format_tag = u16_le(&fmt[0..2]);
                let channels = u16_le(&fmt[2..4]);
                let rate = u32_le(&fmt[4..8]);
                let bits = u16_le(&fmt[14..16]);
                if format_tag != 1 {
                    return Err(Error::UnsupportedFormat(format!("format tag {format_tag} (only PCM = 1)")));
                }
                if channels != 1 {
                    return Err(Error::UnsupportedFormat(format!("{channels} channels (mono only)")));
                }
                if bits != 16 {
                    return Err(Error::UnsupportedFormat(format!("{bits}-bit samples (16-bit only)")));
                }
                if rate == 0 {
                    return Err(Error::CorruptHeader("sample rate 0".into()));
                }
                sample_rate = Some(rate);
            }
            b"data" => {
                let rate = sample_rate.ok_or_else(|| Error::CorruptHeader("data chunk before fmt chunk".into()))?;
                if body + size > bytes.len() {
                    return Err(Error::CorruptHeader(format!(
                        "data chunk declares {size} bytes, only {} present",
                        bytes.len() - body
                    )));
                }
                if !size.is_multiple_of(2) {
                    return Err(Error::CorruptHeader("odd data length for 16-bit samples".into()));
                }
                let samples =
                    bytes[body..body + size].chunks_exact(2).map(|b| i16::from_le_bytes([b[0], b[1]])).collect();
                return Ok(AudioClip::new(rate, samples));
            }
            _ => {}
        }
        // chunks are word aligned
        pos = body + size + (size & 1);
    }
}

/// Writes the canonical 44-byte header followed by little-endian samples.
pub fn write_wav(path: impl AsRef<Path>, clip: &AudioClip) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(&encode_wav(clip))?;
    file.flush()?;
    Ok(())
}

pub fn encode_wav(clip: &AudioClip) -> Vec<u8> {
    let data_len = (clip.samples.len() * 2) as u32;
    let mut out = Vec::with_capacity(HEADER_LEN + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&clip.sample_rate.to_le_bytes());
    out.extend_from_slice(&(clip.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in &clip.samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

/// Rounds to nearest and saturates to the 16-bit range.
pub fn quantize(samples: &[f64]) -> Vec<i16> {
    samples.iter().map(|&x| x.round().clamp(f64::from(i16::MIN), f64::from(i16::MAX)) as i16).collect()
}

fn u16_le(b: &[u8]) -> u16 {
    u16::from_le_bytes([b[0], b[1]])
}

fn u32_le(b: &[u8]) -> u32 {
    u32::from_le_bytes([b[0], b[1], b[2], b[3]])
}
