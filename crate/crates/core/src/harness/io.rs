//! CSV ingestion and output.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::Dataset;

/// A parsed training file.
#[derive(Debug, Clone)]
pub struct CsvTraining {
    pub data: Dataset,
    /// Values of the weight column, when one was requested.
    pub weights: Option<Vec<f64>>,
}

fn parse_error(source: &str, row: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source.to_string(),
        row,
        message: message.into(),
    }
}

/// Header plus numeric rows. `row` in errors counts data rows from 1.
fn read_table<R: Read>(reader: R, source: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| parse_error(source, 0, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().any(String::is_empty) {
        return Err(parse_error(source, 0, "empty column name in header"));
    }
    for (i, h) in header.iter().enumerate() {
        if header[..i].contains(h) {
            return Err(parse_error(source, 0, format!("duplicate column `{h}`")));
        }
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| parse_error(source, row, e.to_string()))?;
        if rec.len() != header.len() {
            return Err(parse_error(
                source,
                row,
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        let values = rec
            .iter()
            .zip(&header)
            .map(|(field, name)| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_error(source, row, format!("column `{name}`: `{field}` is not a finite number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(values);
    }
    Ok((header, rows))
}

fn to_matrix(rows: &[Vec<f64>], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |t, j| rows[t][cols[j]])
}

pub fn parse_training<R: Read>(reader: R, source: &str, weight_column: Option<&str>) -> Result<CsvTraining> {
    let (header, rows) = read_table(reader, source)?;
    let y_col = header
        .iter()
        .position(|h| h == "y")
        .ok_or_else(|| parse_error(source, 0, "no column named `y`"))?;
    let w_col = match weight_column {
        Some(name) => Some(
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| parse_error(source, 0, format!("no weight column `{name}`")))?,
        ),
        None => None,
    };
    let cols: Vec<usize> = (0..header.len()).filter(|&j| j != y_col && Some(j) != w_col).collect();
    if cols.is_empty() {
        return Err(parse_error(source, 0, "no covariate columns"));
    }
    if rows.len() < 2 {
        return Err(parse_error(source, rows.len(), "need at least two data rows"));
    }
    let names = cols.iter().map(|&j| header[j].clone()).collect();
    let y = rows.iter().map(|r| r[y_col]).collect();
    let data = Dataset::new(to_matrix(&rows, &cols), y)?.with_feature_names(names)?;
    Ok(CsvTraining {
        data,
        weights: w_col.map(|c| rows.iter().map(|r| r[c]).collect()),
    })
}

/// Test inputs; columns are matched to `names` by header.
pub fn parse_inputs<R: Read>(reader: R, source: &str, names: &[String]) -> Result<DMatrix<f64>> {
    let (header, rows) = read_table(reader, source)?;
    let cols = names
        .iter()
        .map(|n| {
            header
                .iter()
                .position(|h| h == n)
                .ok_or_else(|| parse_error(source, 0, format!("missing covariate column `{n}`")))
        })
        .collect::<Result<Vec<usize>>>()?;
    if rows.is_empty() {
        return Err(parse_error(source, 0, "no data rows"));
    }
    Ok(to_matrix(&rows, &cols))
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))
}

pub fn read_training(path: &Path, weight_column: Option<&str>) -> Result<CsvTraining> {
    parse_training(open(path)?, &path.display().to_string(), weight_column)
}

pub fn read_inputs(path: &Path, names: &[String]) -> Result<DMatrix<f64>> {
    parse_inputs(open(path)?, &path.display().to_string(), names)
}

/// Default covariate names `x1..xp`.
pub fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("x{j}")).collect()
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Numerical(format!("csv writer: {other:?}")),
    }
}

/// Writes `y` followed by the covariates; `{:?}` formatting round-trips exactly.
pub fn write_dataset<W: Write>(out: W, data: &Dataset) -> Result<()> {
    let names = data.feature_names().map(<[String]>::to_vec).unwrap_or_else(|| default_names(data.p()));
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["y".to_string()];
    header.extend(names);
    wtr.write_record(&header).map_err(csv_error)?;
    for t in 0..data.n() {
        let mut rec = vec![format!("{:?}", data.y()[t])];
        rec.extend(data.row(t).iter().map(|v| format!("{v:?}")));
        wtr.write_record(&rec).map_err(csv_error)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_matrix<W: Write>(out: W, names: &[String], x: &DMatrix<f64>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(names).map_err(csv_error)?;
    for t in 0..x.nrows() {
        wtr.write_record(x.row(t).iter().map(|v| format!("{v:?}"))).map_err(csv_error)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Header plus rows of already formatted fields.
pub fn write_rows<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(header).map_err(csv_error)?;
    for r in rows {
        wtr.write_record(r).map_err(csv_error)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_y_anywhere() {
        let text = "a,y,b\n1,2,3\n4,5,6\n";
        let t = parse_training(text.as_bytes(), "mem", None).unwrap();
        assert_eq!(t.data.y(), &[2.0, 5.0]);
        assert_eq!(t.data.column(1), &[3.0, 6.0]);
        assert_eq!(t.data.feature_names().unwrap(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn malformed_row_names_index() {
        let text = "y,x1\n1,2\n3,oops\n";
        match parse_training(text.as_bytes(), "mem", None) {
            Err(Error::Parse { row, message, .. }) => {
                assert_eq!(row, 2);
                assert!(message.contains("oops"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let short = "y,x1\n1,2\n3\n";
        assert!(matches!(
            parse_training(short.as_bytes(), "mem", None),
            Err(Error::Parse { row: 2, .. })
        ));
    }

    #[test]
    fn missing_y_and_weight_column() {
        assert!(parse_training("x1,x2\n1,2\n3,4\n".as_bytes(), "mem", None).is_err());
        let t = parse_training("y,x1,w\n1,2,0.5\n3,4,2\n".as_bytes(), "mem", Some("w")).unwrap();
        assert_eq!(t.data.p(), 1);
        assert_eq!(t.weights.unwrap(), vec![0.5, 2.0]);
    }

    #[test]
    fn inputs_follow_training_order() {
        let names = vec!["a".to_string(), "b".to_string()];
        let x = parse_inputs("b,a\n1,2\n".as_bytes(), "mem", &names).unwrap();
        assert_eq!(x[(0, 0)], 2.0);
        assert!(parse_inputs("a\n1\n".as_bytes(), "mem", &names).is_err());
    }

    #[test]
    fn dataset_round_trip() {
        let data = Dataset::from_rows(&[vec![0.1, -2.5e-7], vec![1.0 / 3.0, 4.0]], vec![0.7, -1.1]).unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &data).unwrap();
        let back = parse_training(buf.as_slice(), "mem", None).unwrap().data;
        assert_eq!(back.x(), data.x());
        assert_eq!(back.y(), data.y());
    }
}
