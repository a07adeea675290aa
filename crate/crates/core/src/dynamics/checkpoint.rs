// SPDX-License-Identifier: Apache-2.0

//! Binary SimState checkpoints: magic `MSCK`, u32 version, u64 step, f64 t, u64 count,
//! then count x values and count v values. Little-endian throughout.

use std::io::{Read, Write};

use super::{DynamicsError, SimState};

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"MSCK";

pub fn write_checkpoint(w: &mut impl Write, s: &SimState) -> Result<(), DynamicsError> {
    w.write_all(MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&s.step.to_le_bytes())?;
    w.write_all(&s.t.to_le_bytes())?;
    w.write_all(&(s.x.len() as u64).to_le_bytes())?;
    for v in s.x.iter().chain(&s.v) {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N], DynamicsError> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)
        .map_err(|e| DynamicsError::Checkpoint(format!("truncated: {e}")))?;
    Ok(b)
}

pub fn read_checkpoint(r: &mut impl Read) -> Result<SimState, DynamicsError> {
    if &read_array::<4>(r)? != MAGIC {
        return Err(DynamicsError::Checkpoint("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(r)?);
    if version != CHECKPOINT_VERSION {
        return Err(DynamicsError::Checkpoint(format!(
            "unsupported version {version} (expected {CHECKPOINT_VERSION})"
        )));
    }
    let step = u64::from_le_bytes(read_array(r)?);
    let t = f64::from_le_bytes(read_array(r)?);
    let n = u64::from_le_bytes(read_array(r)?) as usize;
    if n > 1 << 26 {
        return Err(DynamicsError::Checkpoint(format!("implausible mass count {n}")));
    }
    let mut vals = Vec::with_capacity(2 * n);
    for _ in 0..2 * n {
        vals.push(f64::from_le_bytes(read_array(r)?));
    }
    let v = vals.split_off(n);
    Ok(SimState { step, t, x: vals, v })
}
