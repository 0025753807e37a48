//! Point cloud ingestion: CSV (one point per row) and JSON (array of
//! coordinate arrays).

use std::io::BufRead;

use crate::error::InputError;
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFormat {
    Csv,
    Json,
}

impl PointFormat {
    /// Guess from a file extension; defaults to CSV.
    pub fn from_path(path: &std::path::Path) -> PointFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => PointFormat::Json,
            _ => PointFormat::Csv,
        }
    }
}

/// Parse CSV rows of coordinates. A header row is optional; the
/// dimension is inferred from the first data row; scientific notation is
/// accepted. Blank lines are skipped.
pub fn read_points_csv<R: BufRead>(reader: R) -> Result<Vec<Point>, InputError> {
    let mut points: Vec<Point> = Vec::new();
    let mut dim: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let row = idx + 1;
        let line = line.map_err(|e| InputError::Parse {
            context: "csv".to_string(),
            row,
            msg: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let mut coords = Vec::with_capacity(fields.len());
        let mut parse_failed = None;
        for (col, field) in fields.iter().enumerate() {
            match field.parse::<f64>() {
                Ok(v) => coords.push(v),
                Err(_) => {
                    parse_failed = Some(col);
                    break;
                }
            }
        }
        if let Some(col) = parse_failed {
            // a non-numeric first row is treated as the optional header
            if points.is_empty() && dim.is_none() {
                continue;
            }
            return Err(InputError::Parse {
                context: "csv".to_string(),
                row,
                msg: format!("column {} is not a number: {:?}", col + 1, fields[col]),
            });
        }
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => {
                return Err(InputError::Parse {
                    context: "csv".to_string(),
                    row,
                    msg: format!("expected {d} columns, found {}", coords.len()),
                });
            }
            _ => {}
        }
        let id = points.len() as u32;
        let point = Point::new(id, coords).map_err(|e| InputError::Parse {
            context: "csv".to_string(),
            row,
            msg: e.to_string(),
        })?;
        points.push(point);
    }
    Ok(points)
}

/// Parse a JSON array of coordinate arrays.
pub fn read_points_json<R: std::io::Read>(reader: R) -> Result<Vec<Point>, InputError> {
    let raw: Vec<Vec<f64>> = serde_json::from_reader(reader).map_err(|e| InputError::Parse {
        context: "json".to_string(),
        row: e.line(),
        msg: e.to_string(),
    })?;
    let mut points = Vec::with_capacity(raw.len());
    for (i, coords) in raw.into_iter().enumerate() {
        if let Some(first) = points.first() {
            let p: &Point = first;
            if coords.len() != p.dim() {
                return Err(InputError::Parse {
                    context: "json".to_string(),
                    row: i + 1,
                    msg: format!("expected {} coordinates, found {}", p.dim(), coords.len()),
                });
            }
        }
        let point = Point::new(i as u32, coords).map_err(|e| InputError::Parse {
            context: "json".to_string(),
            row: i + 1,
            msg: e.to_string(),
        })?;
        points.push(point);
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_with_header_and_scientific_notation() {
        let data = "x,y\n1.0,2.0\n3e-1,-4.5E2\n";
        let pts = read_points_csv(data.as_bytes()).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].coords, vec![1.0, 2.0]);
        assert_eq!(pts[1].coords, vec![0.3, -450.0]);
        assert_eq!(pts[1].id, 1);
    }

    #[test]
    fn csv_reports_offending_row() {
        let data = "1.0,2.0\nfoo,3.0\n";
        match read_points_csv(data.as_bytes()) {
            Err(InputError::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn csv_rejects_ragged_rows() {
        let data = "1.0,2.0\n3.0\n";
        match read_points_csv(data.as_bytes()) {
            Err(InputError::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_csv_is_empty_cloud() {
        assert!(read_points_csv("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn json_array_of_arrays() {
        let pts = read_points_json("[[0.0,1.0],[2.0,3.0]]".as_bytes()).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].coords, vec![2.0, 3.0]);
    }
}
