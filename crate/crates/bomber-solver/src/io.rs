//! Serialization of solved fields.
//!
//! Three formats, all self-describing and deterministic for a given
//! field (no timestamps, no platform-dependent content):
//!
//! * **Binary** — compact container, little-endian throughout:
//!
//!   ```text
//!   magic   4 bytes   "BMBR"
//!   layout  u32       container layout version (currently 1)
//!   vlen    u32       length of the solver version string
//!   ver     vlen      solver version, UTF-8
//!   v       f64       kill probability of the model
//!   mode    u8        0 = continuous, 1 = discrete unit
//!   step    f64       unit size (0.0 in continuous mode)
//!   x_max   f64
//!   nx      u64
//!   t_max   f64
//!   nt      u64
//!   P       nx·nt×f64 row-major, x-index major (row i holds all t)
//!   K       nx·nt×f64 same layout
//!   H       nx·nt×f64 same layout
//!   ```
//!
//! * **JSON** — a header object plus `P`, `K`, `H` as arrays of arrays
//!   (outer index x, inner index t). Numbers round-trip bit-exactly
//!   (shortest-representation printing).
//!
//! * **CSV** — one surface at a time, header `x,t,value`, rows in
//!   x-major order.
//!
//! Probabilities are serialized as `P` and `H` (not their stored
//! complements), so readers need no knowledge of the internal form.
//! Reading back therefore reconstructs `Q = 1 − P` from the rounded
//! probabilities: `P`, `K`, `H` round-trip bitwise, while internal
//! complements of a read-back field can differ from the original solve
//! by one ulp of 1 wherever `P` is not exactly representable as `1 − Q`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use bomber_core::ModelParams;

use crate::field::{FieldKind, SolutionField, SolveMode};
use crate::grid::Grid;
use crate::{SolverError, SOLVER_VERSION};

const MAGIC: &[u8; 4] = b"BMBR";
const LAYOUT_VERSION: u32 = 1;

/// Header common to the binary and JSON containers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    /// Kill probability `v` of the model.
    pub v: f64,
    /// Ammunition mode the field was solved in.
    pub mode: SolveMode,
    /// Grid extents and node counts.
    pub x_max: f64,
    pub nx: usize,
    pub t_max: f64,
    pub nt: usize,
    /// Version of the solver that produced the field.
    pub solver_version: String,
}

#[derive(Serialize, Deserialize)]
struct JsonContainer {
    header: FieldHeader,
    #[serde(rename = "P")]
    p: Vec<Vec<f64>>,
    #[serde(rename = "K")]
    k: Vec<Vec<f64>>,
    #[serde(rename = "H")]
    h: Vec<Vec<f64>>,
}

impl SolutionField {
    /// The serialization header for this field.
    pub fn header(&self) -> FieldHeader {
        FieldHeader {
            v: self.params().v,
            mode: self.mode(),
            x_max: self.grid().x_max,
            nx: self.grid().nx,
            t_max: self.grid().t_max,
            nt: self.grid().nt,
            solver_version: SOLVER_VERSION.to_string(),
        }
    }

    /// Writes the binary container.
    pub fn write_binary(&self, w: &mut impl Write) -> Result<(), SolverError> {
        let grid = self.grid();
        w.write_all(MAGIC)?;
        w.write_all(&LAYOUT_VERSION.to_le_bytes())?;
        let ver = SOLVER_VERSION.as_bytes();
        w.write_all(&(ver.len() as u32).to_le_bytes())?;
        w.write_all(ver)?;
        w.write_all(&self.params().v.to_le_bytes())?;
        match self.mode() {
            SolveMode::Continuous => {
                w.write_all(&[0u8])?;
                w.write_all(&0.0f64.to_le_bytes())?;
            }
            SolveMode::DiscreteUnit { step } => {
                w.write_all(&[1u8])?;
                w.write_all(&step.to_le_bytes())?;
            }
        }
        w.write_all(&grid.x_max.to_le_bytes())?;
        w.write_all(&(grid.nx as u64).to_le_bytes())?;
        w.write_all(&grid.t_max.to_le_bytes())?;
        w.write_all(&(grid.nt as u64).to_le_bytes())?;
        let mut write_surface = |value: &dyn Fn(usize, usize) -> f64| -> std::io::Result<()> {
            let mut buf = Vec::with_capacity(grid.nt * 8);
            for ix in 0..grid.nx {
                buf.clear();
                for it in 0..grid.nt {
                    buf.extend_from_slice(&value(ix, it).to_le_bytes());
                }
                w.write_all(&buf)?;
            }
            Ok(())
        };
        write_surface(&|ix, it| self.p(ix, it))?;
        write_surface(&|ix, it| self.k(ix, it))?;
        write_surface(&|ix, it| self.h(ix, it))?;
        Ok(())
    }

    /// Reads a binary container written by [`SolutionField::write_binary`].
    ///
    /// Structural validation only: magic, layout version, header sanity,
    /// and array sizes. Numeric invariants of the surfaces are the
    /// producer's responsibility.
    pub fn read_binary(r: &mut impl Read) -> Result<SolutionField, SolverError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(SolverError::MalformedContainer(format!(
                "bad magic {magic:?}"
            )));
        }
        let layout = read_u32(r)?;
        if layout != LAYOUT_VERSION {
            return Err(SolverError::MalformedContainer(format!(
                "unsupported layout version {layout}"
            )));
        }
        let vlen = read_u32(r)? as usize;
        if vlen > 4096 {
            return Err(SolverError::MalformedContainer(format!(
                "implausible version length {vlen}"
            )));
        }
        let mut ver = vec![0u8; vlen];
        r.read_exact(&mut ver)?;
        String::from_utf8(ver)
            .map_err(|e| SolverError::MalformedContainer(format!("version string: {e}")))?;
        let v = read_f64(r)?;
        let mut mode_tag = [0u8; 1];
        r.read_exact(&mut mode_tag)?;
        let step = read_f64(r)?;
        let mode = match mode_tag[0] {
            0 => SolveMode::Continuous,
            1 => SolveMode::DiscreteUnit { step },
            tag => {
                return Err(SolverError::MalformedContainer(format!(
                    "unknown mode tag {tag}"
                )))
            }
        };
        let x_max = read_f64(r)?;
        let nx = read_u64(r)? as usize;
        let t_max = read_f64(r)?;
        let nt = read_u64(r)? as usize;
        if !(0.0..=1.0).contains(&v) || v == 0.0 {
            return Err(SolverError::MalformedContainer(format!(
                "kill probability {v} outside (0, 1]"
            )));
        }
        let grid = Grid::new(x_max, nx, t_max, nt)
            .map_err(|e| SolverError::MalformedContainer(e.to_string()))?;
        let n = nx
            .checked_mul(nt)
            .ok_or_else(|| SolverError::MalformedContainer("node count overflow".into()))?;
        if n > 1_000_000_000 {
            return Err(SolverError::MalformedContainer(format!(
                "container declares {n} nodes; refusing to allocate"
            )));
        }
        let p = read_surface(r, nx, nt)?;
        let k = read_surface(r, nx, nt)?;
        let h = read_surface(r, nx, nt)?;
        debug_assert_eq!(p.len(), n);
        let params = ModelParams::new(v);
        Ok(SolutionField::from_parts(
            grid,
            params,
            mode,
            p.into_iter().map(|x| 1.0 - x).collect(),
            k,
            h.into_iter().map(|x| 1.0 - x).collect(),
        ))
    }

    /// Writes the JSON container.
    pub fn write_json(&self, w: &mut impl Write) -> Result<(), SolverError> {
        let grid = self.grid();
        let surface = |value: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
            (0..grid.nx)
                .map(|ix| (0..grid.nt).map(|it| value(ix, it)).collect())
                .collect()
        };
        let container = JsonContainer {
            header: self.header(),
            p: surface(&|ix, it| self.p(ix, it)),
            k: surface(&|ix, it| self.k(ix, it)),
            h: surface(&|ix, it| self.h(ix, it)),
        };
        serde_json::to_writer(&mut *w, &container)
            .map_err(|e| SolverError::MalformedContainer(e.to_string()))?;
        Ok(())
    }

    /// Reads a JSON container written by [`SolutionField::write_json`].
    pub fn read_json(r: &mut impl Read) -> Result<SolutionField, SolverError> {
        let container: JsonContainer = serde_json::from_reader(r)
            .map_err(|e| SolverError::MalformedContainer(e.to_string()))?;
        let h = container.header;
        let grid = Grid::new(h.x_max, h.nx, h.t_max, h.nt)
            .map_err(|e| SolverError::MalformedContainer(e.to_string()))?;
        if !(0.0..=1.0).contains(&h.v) || h.v == 0.0 {
            return Err(SolverError::MalformedContainer(format!(
                "kill probability {} outside (0, 1]",
                h.v
            )));
        }
        let flatten = |rows: Vec<Vec<f64>>, complement: bool| -> Result<Vec<f64>, SolverError> {
            if rows.len() != h.nx || rows.iter().any(|r| r.len() != h.nt) {
                return Err(SolverError::MalformedContainer(
                    "surface dimensions disagree with header".into(),
                ));
            }
            let mut flat = vec![0.0; h.nx * h.nt];
            for (ix, row) in rows.iter().enumerate() {
                for (it, &val) in row.iter().enumerate() {
                    flat[it * h.nx + ix] = if complement { 1.0 - val } else { val };
                }
            }
            Ok(flat)
        };
        let q = flatten(container.p, true)?;
        let k = flatten(container.k, false)?;
        let g = flatten(container.h, true)?;
        Ok(SolutionField::from_parts(
            grid,
            ModelParams::new(h.v),
            h.mode,
            q,
            k,
            g,
        ))
    }

    /// Writes one surface as CSV with header `x,t,value`, x-major.
    pub fn write_csv(&self, kind: FieldKind, w: &mut impl Write) -> Result<(), SolverError> {
        let grid = self.grid();
        writeln!(w, "x,t,value")?;
        for ix in 0..grid.nx {
            let x = grid.x(ix);
            for it in 0..grid.nt {
                let val = match kind {
                    FieldKind::P => self.p(ix, it),
                    FieldKind::K => self.k(ix, it),
                    FieldKind::H => self.h(ix, it),
                };
                writeln!(w, "{x},{},{val}", grid.t(it))?;
            }
        }
        Ok(())
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32, SolverError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64, SolverError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64, SolverError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_surface(r: &mut impl Read, nx: usize, nt: usize) -> Result<Vec<f64>, SolverError> {
    // x-major on disk → time-major in memory.
    let mut flat = vec![0.0f64; nx * nt];
    let mut row = vec![0u8; nt * 8];
    for ix in 0..nx {
        r.read_exact(&mut row)?;
        for it in 0..nt {
            let b: [u8; 8] = row[it * 8..it * 8 + 8].try_into().expect("8-byte chunk");
            flat[it * nx + ix] = f64::from_le_bytes(b);
        }
    }
    Ok(flat)
}
