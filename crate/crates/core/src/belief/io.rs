//! Belief snapshot formats.
//!
//! Binary layout (all little-endian):
//!
//! ```text
//! magic      4 bytes  "SMB1"
//! rows (H)   u32
//! cols (W)   u32
//! layers (D) u32
//! n_classes  u32
//! resolution f64
//! origin     3 x f64
//! occupancy  H*W*D x (alpha f64, beta f64), row-major (row, col, layer)
//! semantics  H*W x n_classes x f64, row-major (row, col, class)
//! ```
//!
//! The JSON form carries the same header fields and flat parameter arrays.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::params::BetaParams;
use super::state::BeliefState;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

pub const BINARY_MAGIC: &[u8; 4] = b"SMB1";

pub fn write_binary<W: Write>(belief: &BeliefState, mut out: W) -> std::io::Result<()> {
    let g = belief.grid();
    out.write_all(BINARY_MAGIC)?;
    for n in [g.rows, g.cols, g.layers, belief.n_classes()] {
        out.write_all(&(n as u32).to_le_bytes())?;
    }
    out.write_all(&g.resolution.to_le_bytes())?;
    for o in g.origin {
        out.write_all(&o.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(g.n_voxels() * 16);
    for p in belief.occupancy() {
        buf.extend_from_slice(&p.alpha.to_le_bytes());
        buf.extend_from_slice(&p.beta.to_le_bytes());
    }
    for l in belief.semantics() {
        buf.extend_from_slice(&l.to_le_bytes());
    }
    out.write_all(&buf)
}

pub fn read_binary<R: Read>(mut input: R) -> Result<BeliefState> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| Error::Format(format!("reading belief: {e}")))?;
    let mut cur = Cursor {
        bytes: &bytes,
        pos: 0,
    };
    if cur.take(4)? != BINARY_MAGIC {
        return Err(Error::Format("not a belief snapshot (bad magic)".into()));
    }
    let rows = cur.u32()? as usize;
    let cols = cur.u32()? as usize;
    let layers = cur.u32()? as usize;
    let n_classes = cur.u32()? as usize;
    let resolution = cur.f64()?;
    let origin = [cur.f64()?, cur.f64()?, cur.f64()?];
    let grid = GridSpec {
        rows,
        cols,
        layers,
        resolution,
        origin,
    };
    grid.validate()
        .map_err(|e| Error::Format(format!("bad belief header: {e}")))?;
    let expected = grid.n_voxels() * 16 + grid.n_cells() * n_classes * 8;
    if bytes.len() - cur.pos != expected {
        return Err(Error::Format(format!(
            "belief payload has {} bytes, header implies {expected}",
            bytes.len() - cur.pos
        )));
    }
    let mut occupancy = Vec::with_capacity(grid.n_voxels());
    for _ in 0..grid.n_voxels() {
        occupancy.push(BetaParams {
            alpha: cur.f64()?,
            beta: cur.f64()?,
        });
    }
    let mut semantics = Vec::with_capacity(grid.n_cells() * n_classes);
    for _ in 0..grid.n_cells() * n_classes {
        semantics.push(cur.f64()?);
    }
    BeliefState::from_parts(grid, n_classes, occupancy, semantics)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Format("truncated belief snapshot".into()));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// JSON-friendly snapshot with flat row-major arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefSnapshot {
    pub rows: usize,
    pub cols: usize,
    pub layers: usize,
    pub resolution: f64,
    pub origin: [f64; 3],
    pub n_classes: usize,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub lambdas: Vec<f64>,
}

impl From<&BeliefState> for BeliefSnapshot {
    fn from(b: &BeliefState) -> Self {
        let g = b.grid();
        BeliefSnapshot {
            rows: g.rows,
            cols: g.cols,
            layers: g.layers,
            resolution: g.resolution,
            origin: g.origin,
            n_classes: b.n_classes(),
            alpha: b.occupancy().iter().map(|p| p.alpha).collect(),
            beta: b.occupancy().iter().map(|p| p.beta).collect(),
            lambdas: b.semantics().to_vec(),
        }
    }
}

impl TryFrom<BeliefSnapshot> for BeliefState {
    type Error = Error;

    fn try_from(s: BeliefSnapshot) -> Result<Self> {
        let grid = GridSpec {
            rows: s.rows,
            cols: s.cols,
            layers: s.layers,
            resolution: s.resolution,
            origin: s.origin,
        };
        grid.validate()?;
        if s.alpha.len() != s.beta.len() {
            return Err(Error::Format("alpha and beta lengths differ".into()));
        }
        let occupancy = s
            .alpha
            .iter()
            .zip(&s.beta)
            .map(|(&alpha, &beta)| BetaParams { alpha, beta })
            .collect();
        BeliefState::from_parts(grid, s.n_classes, occupancy, s.lambdas)
    }
}
