use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Header word 0xCDAB, sent little-endian.
pub const HEADER: [u8; 2] = [0xAB, 0xCD];
pub const MAX_CHANNELS: usize = 4;

/// One packet of up to four 16-bit samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplotFrame {
    samples: Vec<i16>,
}

impl SimplotFrame {
    pub fn new(samples: &[i16]) -> Result<Self> {
        if samples.is_empty() || samples.len() > MAX_CHANNELS {
            return Err(invalid(format!(
                "a frame carries 1 to 4 channels, got {}",
                samples.len()
            )));
        }
        Ok(Self {
            samples: samples.to_vec(),
        })
    }

    pub fn samples(&self) -> &[i16] {
        &self.samples
    }
}

/// Header, payload size in bytes, then the samples, all little-endian.
pub fn simplot_encode(frame: &SimplotFrame) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 2 * frame.samples.len());
    out.extend_from_slice(&HEADER);
    out.extend_from_slice(&((2 * frame.samples.len()) as u16).to_le_bytes());
    for s in &frame.samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

/// Incremental decoder that scans for headers and skips bytes that cannot
/// start a valid frame.
#[derive(Debug, Default)]
pub struct SimplotDecoder {
    pending: Vec<u8>,
    skipped: usize,
}

impl SimplotDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bytes discarded so far while resynchronizing.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    /// Feeds bytes and returns every frame completed by them.
    pub fn push(&mut self, bytes: &[u8]) -> Vec<SimplotFrame> {
        self.pending.extend_from_slice(bytes);
        let mut frames = Vec::new();
        let mut pos = 0;
        let buf = &self.pending;
        while pos < buf.len() {
            if buf[pos] != HEADER[0] {
                pos += 1;
                self.skipped += 1;
                continue;
            }
            if pos + 1 >= buf.len() {
                break;
            }
            if buf[pos + 1] != HEADER[1] {
                pos += 1;
                self.skipped += 1;
                continue;
            }
            if pos + 4 > buf.len() {
                break;
            }
            let size = u16::from_le_bytes([buf[pos + 2], buf[pos + 3]]) as usize;
            if !(size == 2 || size == 4 || size == 6 || size == 8) {
                pos += 1;
                self.skipped += 1;
                continue;
            }
            if pos + 4 + size > buf.len() {
                break;
            }
            let samples = buf[pos + 4..pos + 4 + size]
                .chunks_exact(2)
                .map(|c| i16::from_le_bytes([c[0], c[1]]))
                .collect();
            frames.push(SimplotFrame { samples });
            pos += 4 + size;
        }
        self.pending.drain(..pos);
        frames
    }

    /// Ends the stream; an incomplete trailing frame counts as skipped.
    pub fn finish(mut self) -> usize {
        self.skipped += self.pending.len();
        self.pending.clear();
        self.skipped
    }
}

/// Decodes a complete byte stream, returning frames and skipped-byte count.
pub fn simplot_decode(bytes: &[u8]) -> (Vec<SimplotFrame>, usize) {
    let mut d = SimplotDecoder::new();
    let frames = d.push(bytes);
    (frames, d.finish())
}
