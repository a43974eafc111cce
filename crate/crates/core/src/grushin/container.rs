//! Binary field container.
//!
//! ```text
//! offset  size  content
//! 0       4     magic "GRSH"
//! 4       2     format version, currently 1
//! 6       1     byte order of every later number: b'L' or b'B'
//! 7       1     reserved, zero
//! 8       4     n (u32)
//! 12      12·n  per axis: half-width (f64), node count (u32, odd)
//! ..      4     N_t (u32, even)
//! ..      8     period T (f64)
//! ..      4     truncation K (u32)
//! ..      16·M  samples (re, im as f64), x axes in order then t fastest
//! ```
//!
//! where `M` is the product of the node counts and `N_t`.

use std::sync::Arc;

use super::field::{SpaceTimeField, TimeGrid};
use crate::hermite::{Axis, AxisRule, GridSpec};
use crate::{Error, Result, C64};

pub const MAGIC: &[u8; 4] = b"GRSH";
pub const VERSION: u16 = 1;
/// Largest sample count a decoder will allocate.
pub const MAX_SAMPLES: usize = 1 << 28;
const MAX_DIM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ByteOrder {
    Little,
    Big,
}

impl ByteOrder {
    fn tag(self) -> u8 {
        match self {
            ByteOrder::Little => b'L',
            ByteOrder::Big => b'B',
        }
    }
}

/// A field together with the truncation it is meant to be used at.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldContainer {
    pub field: SpaceTimeField,
    pub truncation: usize,
}

struct Writer {
    out: Vec<u8>,
    order: ByteOrder,
}

impl Writer {
    fn u32(&mut self, v: u32) {
        match self.order {
            ByteOrder::Little => self.out.extend(v.to_le_bytes()),
            ByteOrder::Big => self.out.extend(v.to_be_bytes()),
        }
    }

    fn f64(&mut self, v: f64) {
        match self.order {
            ByteOrder::Little => self.out.extend(v.to_le_bytes()),
            ByteOrder::Big => self.out.extend(v.to_be_bytes()),
        }
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
    order: ByteOrder,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos.checked_add(N).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| Error::Format(format!("truncated at byte {}", self.pos)))?;
        let mut b = [0u8; N];
        b.copy_from_slice(&self.data[self.pos..end]);
        self.pos = end;
        Ok(b)
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take::<4>()?;
        Ok(match self.order {
            ByteOrder::Little => u32::from_le_bytes(b),
            ByteOrder::Big => u32::from_be_bytes(b),
        })
    }

    fn f64(&mut self) -> Result<f64> {
        let b = self.take::<8>()?;
        Ok(match self.order {
            ByteOrder::Little => f64::from_le_bytes(b),
            ByteOrder::Big => f64::from_be_bytes(b),
        })
    }
}

pub fn encode_field(c: &FieldContainer, order: ByteOrder) -> Result<Vec<u8>> {
    let grid = c.field.x_grid();
    let truncation = u32::try_from(c.truncation).map_err(|_| Error::Format("truncation too large".into()))?;
    let mut w = Writer {
        out: Vec::with_capacity(32 + 16 * c.field.values().len()),
        order,
    };
    w.out.extend(MAGIC);
    match order {
        ByteOrder::Little => w.out.extend(VERSION.to_le_bytes()),
        ByteOrder::Big => w.out.extend(VERSION.to_be_bytes()),
    }
    w.out.push(order.tag());
    w.out.push(0);
    w.u32(grid.dim() as u32);
    for axis in grid.axes() {
        if axis.rule() != AxisRule::Trapezoid {
            return Err(Error::Format("only uniform axes can be stored".into()));
        }
        w.f64(axis.half_width());
        w.u32(axis.len() as u32);
    }
    let t = c.field.t_grid();
    w.u32(t.len() as u32);
    w.f64(t.period());
    w.u32(truncation);
    for v in c.field.values() {
        w.f64(v.re);
        w.f64(v.im);
    }
    Ok(w.out)
}

pub fn decode_field(data: &[u8]) -> Result<FieldContainer> {
    if data.len() < 8 || &data[..4] != MAGIC {
        return Err(Error::Format("missing GRSH magic".into()));
    }
    let order = match data[6] {
        b'L' => ByteOrder::Little,
        b'B' => ByteOrder::Big,
        t => return Err(Error::Format(format!("unknown byte-order tag {t:#04x}"))),
    };
    let version = match order {
        ByteOrder::Little => u16::from_le_bytes([data[4], data[5]]),
        ByteOrder::Big => u16::from_be_bytes([data[4], data[5]]),
    };
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    if data[7] != 0 {
        return Err(Error::Format("reserved byte must be zero".into()));
    }
    let mut r = Reader { data, pos: 8, order };
    let n = r.u32()? as usize;
    if n == 0 || n > MAX_DIM {
        return Err(Error::Format(format!("dimension {n} outside 1..={MAX_DIM}")));
    }
    let mut axes_spec = Vec::with_capacity(n);
    let mut points: usize = 1;
    for _ in 0..n {
        let half = r.f64()?;
        let count = r.u32()? as usize;
        if !(half > 0.0) || !half.is_finite() || count < 3 || count.is_multiple_of(2) {
            return Err(Error::Format(format!("bad axis: half-width {half}, {count} nodes")));
        }
        points = points
            .checked_mul(count)
            .filter(|&p| p <= MAX_SAMPLES)
            .ok_or_else(|| Error::Format("grid too large".into()))?;
        axes_spec.push((half, count));
    }
    let nt = r.u32()? as usize;
    let period = r.f64()?;
    let truncation = r.u32()? as usize;
    let t_grid = TimeGrid::new(period, nt).map_err(|e| Error::Format(e.to_string()))?;
    let samples = points
        .checked_mul(nt)
        .filter(|&p| p <= MAX_SAMPLES)
        .ok_or_else(|| Error::Format("field too large".into()))?;
    let remaining = data.len() - r.pos;
    if remaining != samples * 16 {
        return Err(Error::Format(format!(
            "expected {} sample bytes, found {remaining}",
            samples * 16
        )));
    }
    let axes = axes_spec
        .into_iter()
        .map(|(h, c)| Axis::uniform(h, c))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Format(e.to_string()))?;
    let grid = Arc::new(GridSpec::from_axes(axes).map_err(|e| Error::Format(e.to_string()))?);
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let re = r.f64()?;
        let im = r.f64()?;
        values.push(C64::new(re, im));
    }
    let field = SpaceTimeField::new(grid, t_grid, values).map_err(|e| Error::Format(e.to_string()))?;
    Ok(FieldContainer { field, truncation })
}

pub fn write_field(path: &std::path::Path, c: &FieldContainer) -> Result<()> {
    std::fs::write(path, encode_field(c, ByteOrder::Little)?)?;
    Ok(())
}

pub fn read_field(path: &std::path::Path) -> Result<FieldContainer> {
    decode_field(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FieldContainer {
        let grid = Arc::new(GridSpec::uniform(2, 1.5, 3).unwrap());
        let t = TimeGrid::new(2.0, 4).unwrap();
        let field = SpaceTimeField::from_fn(grid, t, |x, s| C64::new(x[0] + s, x[1] - s));
        FieldContainer { field, truncation: 7 }
    }

    #[test]
    fn round_trip_both_orders() {
        let c = sample();
        for order in [ByteOrder::Little, ByteOrder::Big] {
            let bytes = encode_field(&c, order).unwrap();
            assert_eq!(decode_field(&bytes).unwrap(), c);
        }
    }

    #[test]
    fn rejects_damage() {
        let bytes = encode_field(&sample(), ByteOrder::Little).unwrap();
        assert!(decode_field(&bytes[..bytes.len() - 1]).is_err());
        let mut b = bytes.clone();
        b[0] = b'X';
        assert!(decode_field(&b).is_err());
        let mut b = bytes.clone();
        b[8] = 200;
        assert!(decode_field(&b).is_err());
        let mut b = bytes;
        let last = b.len() - 1;
        b[last] = 0xff;
        b[last - 1] = 0xff;
        assert!(decode_field(&b).is_err());
    }
}
