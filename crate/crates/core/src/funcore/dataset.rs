//! Curve dataset CSV.
//!
//! Header row: the grid abscissae as decimal literals followed by `y`.
//! Each further row holds one observation's grid values and its response.
//! Point files use the same layout; a trailing `y` column is optional there.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::{Error, Result, Scalar};

use super::{Curve, Grid};

#[derive(Debug, Clone)]
pub struct Observation<T> {
    pub x: Curve<T>,
    pub y: T,
}

/// Observations in time order, all on one grid.
#[derive(Debug, Clone)]
pub struct Dataset<T> {
    pub grid: Arc<Grid<T>>,
    pub observations: Vec<Observation<T>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(grid: Arc<Grid<T>>) -> Self {
        Self {
            grid,
            observations: Vec::new(),
        }
    }

    pub fn push(&mut self, x: Curve<T>, y: T) -> Result<()> {
        if !Arc::ptr_eq(x.grid(), &self.grid) && **x.grid() != *self.grid {
            return Err(Error::structural(
                "observation grid differs from dataset grid",
            ));
        }
        if !y.is_finite() {
            return Err(Error::validation("response must be finite"));
        }
        self.observations.push(Observation { x, y });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

fn parse_cell<T: Scalar>(cell: &str, what: &str) -> Result<T> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| Error::validation(format!("cannot parse {what} `{cell}`")))?;
    T::from_f64(v).ok_or_else(|| Error::validation(format!("{what} `{cell}` out of range")))
}

fn parse_header<T: Scalar>(
    header: &csv::StringRecord,
    require_y: bool,
) -> Result<(Arc<Grid<T>>, bool)> {
    let cells: Vec<&str> = header.iter().map(str::trim).collect();
    let has_y = cells.last() == Some(&"y");
    if require_y && !has_y {
        return Err(Error::validation("dataset header must end with `y`"));
    }
    let abscissae = if has_y {
        &cells[..cells.len() - 1]
    } else {
        &cells[..]
    };
    let points = abscissae
        .iter()
        .map(|c| parse_cell(c, "grid abscissa"))
        .collect::<Result<Vec<T>>>()?;
    Ok((Arc::new(Grid::new(points)?), has_y))
}

pub fn read_dataset<T: Scalar, R: Read>(reader: R) -> Result<Dataset<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let (grid, _) = parse_header::<T>(rdr.headers()?, true)?;
    let m = grid.len();
    let mut data = Dataset::new(grid.clone());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != m + 1 {
            return Err(Error::structural(format!(
                "row {} has {} cells, expected {}",
                row + 1,
                rec.len(),
                m + 1
            )));
        }
        let values = rec
            .iter()
            .take(m)
            .map(|c| parse_cell(c, "curve value"))
            .collect::<Result<Vec<T>>>()?;
        let y = parse_cell(&rec[m], "response")?;
        data.push(Curve::new(grid.clone(), values)?, y)?;
    }
    Ok(data)
}

/// Reads evaluation points; any `y` column is ignored.
pub fn read_curves<T: Scalar, R: Read>(reader: R) -> Result<(Arc<Grid<T>>, Vec<Curve<T>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let (grid, has_y) = parse_header::<T>(rdr.headers()?, false)?;
    let m = grid.len();
    let width = m + usize::from(has_y);
    let mut curves = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != width {
            return Err(Error::structural(format!(
                "row {} has {} cells, expected {width}",
                row + 1,
                rec.len()
            )));
        }
        let values = rec
            .iter()
            .take(m)
            .map(|c| parse_cell(c, "curve value"))
            .collect::<Result<Vec<T>>>()?;
        curves.push(Curve::new(grid.clone(), values)?);
    }
    Ok((grid, curves))
}

pub fn write_dataset<T: Scalar, W: Write>(data: &Dataset<T>, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = data
        .grid
        .points()
        .iter()
        .map(|p| p.as_f64().to_string())
        .collect();
    header.push("y".into());
    wtr.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for obs in &data.observations {
        row.clear();
        row.extend(obs.x.values().iter().map(|v| v.as_f64().to_string()));
        row.push(obs.y.as_f64().to_string());
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
