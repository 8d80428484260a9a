//! CSV artifacts. Numbers are written with 17 significant digits so a
//! read-back reproduces every value bit for bit; empty zones are `NaN`.
//!
//! * profiles: `x,value`
//! * 2D fields: `x,y,value`
//! * zone maps: `zone_x,zone_y,value,walker_count`
//! * series: `<key>,value` (energy traces, sigma scans)

use std::path::Path;

use crate::error::{Result, TdqmcError};
use crate::grid::RealField;
use crate::quantum_info::{EntropyMap, ZonePartition};

/// Round-trip formatting of one value.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn csv_error(path: &Path, err: csv::Error) -> TdqmcError {
    if err.is_io_error() {
        match err.into_kind() {
            csv::ErrorKind::Io(e) => TdqmcError::io(path, e),
            _ => unreachable!("checked is_io_error"),
        }
    } else {
        TdqmcError::Format {
            path: path.display().to_string(),
            detail: err.to_string(),
        }
    }
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| TdqmcError::io(parent, e))?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| TdqmcError::io(path, e))
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<Vec<String>>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let found = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(TdqmcError::Format {
            path: path.display().to_string(),
            detail: format!("expected header `{}`, found `{}`", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        });
    }
    r.records()
        .map(|rec| {
            rec.map(|rec| rec.iter().map(str::to_string).collect())
                .map_err(|e| csv_error(path, e))
        })
        .collect()
}

fn parse<T: std::str::FromStr>(path: &Path, field: &str) -> Result<T> {
    field.trim().parse().map_err(|_| TdqmcError::Format {
        path: path.display().to_string(),
        detail: format!("cannot parse `{field}`"),
    })
}

/// Writes `x,value` rows.
pub fn export_profile(xs: &[f64], ys: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if xs.len() != ys.len() {
        return Err(TdqmcError::invalid("profile", "x and value columns differ in length"));
    }
    let rows = xs.iter().zip(ys).map(|(x, y)| vec![format_value(*x), format_value(*y)]);
    write_rows(path, &["x", "value"], rows)
}

pub fn read_profile(path: impl AsRef<Path>) -> Result<Vec<(f64, f64)>> {
    let path = path.as_ref();
    read_rows(path, &["x", "value"])?
        .iter()
        .map(|row| Ok((parse(path, &row[0])?, parse(path, &row[1])?)))
        .collect()
}

/// Writes a grid field: a profile in 1D, `x,y,value` rows in 2D.
pub fn export_field(field: &RealField, path: impl AsRef<Path>) -> Result<()> {
    let grid = field.grid();
    let nodes: Vec<_> = grid.node_positions().collect();
    if grid.dim() == 1 {
        let xs: Vec<f64> = nodes.iter().map(|r| r.coord(0)).collect();
        return export_profile(&xs, field.values(), path);
    }
    let rows = nodes.iter().zip(field.values()).map(|(r, v)| {
        vec![format_value(r.coord(0)), format_value(r.coord(1)), format_value(*v)]
    });
    write_rows(path.as_ref(), &["x", "y", "value"], rows)
}

/// Reads either field layout back as `(x, y, value)`; `y` is zero in 1D.
pub fn read_field(path: impl AsRef<Path>) -> Result<Vec<(f64, f64, f64)>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let columns = r.headers().map_err(|e| csv_error(path, e))?.len();
    drop(r);
    if columns == 2 {
        return Ok(read_profile(path)?.into_iter().map(|(x, v)| (x, 0.0, v)).collect());
    }
    read_rows(path, &["x", "y", "value"])?
        .iter()
        .map(|row| Ok((parse(path, &row[0])?, parse(path, &row[1])?, parse(path, &row[2])?)))
        .collect()
}

/// Writes `zone_x,zone_y,value,walker_count`, one row per zone.
pub fn export_map(map: &EntropyMap, path: impl AsRef<Path>) -> Result<()> {
    let rows = map.values.iter().zip(&map.walker_counts).enumerate().map(|(z, (v, c))| {
        let (zx, zy) = map.partition.zone_coords(z);
        vec![
            zx.to_string(),
            zy.to_string(),
            format_value(v.unwrap_or(f64::NAN)),
            c.to_string(),
        ]
    });
    write_rows(path.as_ref(), &["zone_x", "zone_y", "value", "walker_count"], rows)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapRow {
    pub zone_x: usize,
    pub zone_y: usize,
    /// `None` for empty zones.
    pub value: Option<f64>,
    pub walker_count: usize,
}

pub fn read_map(path: impl AsRef<Path>) -> Result<Vec<MapRow>> {
    let path = path.as_ref();
    read_rows(path, &["zone_x", "zone_y", "value", "walker_count"])?
        .iter()
        .map(|row| {
            let value: f64 = parse(path, &row[2])?;
            Ok(MapRow {
                zone_x: parse(path, &row[0])?,
                zone_y: parse(path, &row[1])?,
                value: (!value.is_nan()).then_some(value),
                walker_count: parse(path, &row[3])?,
            })
        })
        .collect()
}

/// Rebuilds a map from its CSV rows on a known partition.
pub fn map_from_rows(partition: ZonePartition, kind: crate::quantum_info::MapKind, rows: &[MapRow]) -> Result<EntropyMap> {
    if rows.len() != partition.zone_count() {
        return Err(TdqmcError::invalid("map", format!(
            "{} rows for a partition of {} zones",
            rows.len(),
            partition.zone_count()
        )));
    }
    Ok(EntropyMap {
        partition,
        kind,
        values: rows.iter().map(|r| r.value).collect(),
        walker_counts: rows.iter().map(|r| r.walker_count).collect(),
    })
}

/// Writes `<key>,value` rows.
pub fn export_series(key: &str, rows: &[(String, f64)], path: impl AsRef<Path>) -> Result<()> {
    let rows = rows.iter().map(|(k, v)| vec![k.clone(), format_value(*v)]);
    write_rows(path.as_ref(), &[key, "value"], rows)
}

pub fn read_series(key: &str, path: impl AsRef<Path>) -> Result<Vec<(String, f64)>> {
    let path = path.as_ref();
    read_rows(path, &[key, "value"])?
        .iter()
        .map(|row| Ok((row[0].clone(), parse(path, &row[1])?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Field, Grid};
    use crate::quantum_info::MapKind;
    use proptest::prelude::*;

    fn map(partition: ZonePartition) -> EntropyMap {
        let n = partition.zone_count();
        EntropyMap {
            partition,
            kind: MapKind::LocalLinearEntropy,
            values: (0..n).map(|z| if z == 3 { None } else { Some(z as f64 / 37.0) }).collect(),
            walker_counts: (0..n).map(|z| if z == 3 { 0 } else { z + 1 }).collect(),
        }
    }

    #[test]
    fn map_has_header_plus_one_row_per_zone() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let p = ZonePartition::new(Grid::new(1, 10.0, 32).unwrap(), 21).unwrap();
        export_map(&map(p), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 22);
        assert_eq!(text.lines().next().unwrap(), "zone_x,zone_y,value,walker_count");
        assert_eq!(text.lines().nth(4).unwrap(), "3,0,NaN,0");
        let rows = read_map(&path).unwrap();
        assert_eq!(map_from_rows(p, MapKind::LocalLinearEntropy, &rows).unwrap(), map(p));
    }

    #[test]
    fn field_round_trip_2d() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let g = Grid::new(2, 6.0, 8).unwrap();
        let f = Field::from_fn(g, |r| (r.coord(0) * 1.3).sin() + r.coord(1) / 7.0);
        export_field(&f, &path).unwrap();
        let back = read_field(&path).unwrap();
        assert_eq!(back.len(), 64);
        for ((x, y, v), (r, w)) in back.iter().zip(g.node_positions().zip(f.values())) {
            assert_eq!((*x, *y, *v), (r.coord(0), r.coord(1), *w));
        }
    }

    #[test]
    fn header_mismatch_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        let err = read_profile(&path).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        let missing = read_profile(dir.path().join("missing.csv")).unwrap_err();
        assert!(matches!(missing, TdqmcError::Io { .. }));
    }

    proptest! {
        #[test]
        fn profile_round_trip_is_bit_exact(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..40)) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("p.csv");
            let xs: Vec<f64> = (0..values.len()).map(|i| i as f64 * 0.1).collect();
            export_profile(&xs, &values, &path).unwrap();
            let back = read_profile(&path).unwrap();
            for ((x, v), (bx, bv)) in xs.iter().zip(&values).zip(back) {
                prop_assert_eq!(x.to_bits(), bx.to_bits());
                prop_assert_eq!(v.to_bits(), bv.to_bits());
            }
        }
    }
}
