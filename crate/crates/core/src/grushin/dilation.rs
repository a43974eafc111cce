use super::field::SpaceTimeField;
use crate::hermite::AxisRule;
use crate::{Error, Result, C64};

/// `D_s f(x, t) = f(sx, s²t)` for `s = 2^m`, `m ≥ 0`, taken as zero where
/// `sx` leaves the box. On a uniform grid centred at the origin and a periodic
/// `t`-grid this is exact subsampling, so no interpolation is involved.
pub fn dilate(f: &SpaceTimeField, s: f64) -> Result<SpaceTimeField> {
    let m = s.log2().round();
    if !(s > 0.0) || (2f64.powf(m) - s).abs() > 1e-12 * s || m < 0.0 {
        return Err(Error::Interpolation(format!(
            "dilation factor {s} is not a nonnegative power of 2"
        )));
    }
    let factor = s as usize;
    let grid = f.x_grid();
    for a in 0..grid.dim() {
        let axis = grid.axis(a);
        if axis.rule() != AxisRule::Trapezoid || axis.len().is_multiple_of(2) {
            return Err(Error::Interpolation(
                "dilation needs uniform axes with an odd node count centred at 0".into(),
            ));
        }
    }
    let shape = grid.shape();
    let nt = f.t_grid().len();
    let t_factor = factor * factor;
    let mut out = vec![C64::new(0.0, 0.0); f.values().len()];
    for (i, row) in out.chunks_mut(nt).enumerate() {
        let coords = grid.coords(i);
        let mut src = Vec::with_capacity(coords.len());
        let mut inside = true;
        for (c, &len) in coords.iter().zip(&shape) {
            let mid = (len / 2) as i64;
            let target = mid + (*c as i64 - mid) * factor as i64;
            if target < 0 || target >= len as i64 {
                inside = false;
                break;
            }
            src.push(target as usize);
        }
        if !inside {
            continue;
        }
        let base = grid.flat(&src) * nt;
        for (j, v) in row.iter_mut().enumerate() {
            *v = f.values()[base + (j * t_factor) % nt];
        }
    }
    Ok(SpaceTimeField::from_parts(grid.clone(), f.t_grid(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grushin::TimeGrid;
    use crate::hermite::GridSpec;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn subsampling_is_exact() {
        let grid = Arc::new(GridSpec::uniform_spacing(2, 2.0, 0.25).unwrap());
        let t = TimeGrid::new(2.0 * PI, 16).unwrap();
        let g = |x: &[f64], s: f64| C64::new(x[0] - 2.0 * x[1] + s.sin(), s.cos() * x[0]);
        let f = SpaceTimeField::from_fn(grid.clone(), t, g);
        assert_eq!(dilate(&f, 1.0).unwrap(), f);
        let d = dilate(&f, 2.0).unwrap();
        for i in 0..grid.len() {
            let x = grid.point(i);
            for j in 0..t.len() {
                let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
                let want = if y.iter().all(|v| v.abs() <= 2.0 + 1e-12) { g(&y, 4.0 * t.node(j)) } else { C64::new(0.0, 0.0) };
                assert!((d.at(i, j) - want).norm() < 1e-12);
            }
        }
        assert!(dilate(&f, 3.0).is_err());
        assert!(dilate(&f, 0.5).is_err());
    }
}
