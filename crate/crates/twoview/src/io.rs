//! CSV formats: two-view tables, label files, long-form returns.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! written table reads back bit-identically.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use twoview_core::features::ReturnSeries;
use twoview_core::Matrix;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Open { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error("{0}")]
    Core(#[from] twoview_core::Error),
}

impl IoError {
    fn format(path: &Path, msg: impl Into<String>) -> Self {
        IoError::Format { path: path.to_path_buf(), msg: msg.into() }
    }
}

pub type IoResult<T> = Result<T, IoError>;

fn reader(path: &Path) -> IoResult<csv::Reader<File>> {
    let file = File::open(path).map_err(|source| IoError::Open { path: path.to_path_buf(), source })?;
    Ok(csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> IoError + '_ {
    move |source| IoError::Csv { path: path.to_path_buf(), source }
}

/// A keyed numeric table; blank cells are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub key_header: String,
    pub columns: Vec<String>,
    pub keys: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

pub fn read_table(path: &Path) -> IoResult<Table> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(csv_err(path))?.clone();
    if headers.len() < 2 {
        return Err(IoError::format(path, "need an identifier column and at least one value column"));
    }
    let mut keys = Vec::new();
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let key = rec[0].to_string();
        if !seen.insert(key.clone()) {
            return Err(IoError::format(path, format!("duplicate key {key:?}")));
        }
        let mut row = Vec::with_capacity(headers.len() - 1);
        for (j, cell) in rec.iter().enumerate().skip(1) {
            if cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan") {
                row.push(None);
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| {
                IoError::format(path, format!("row {}: column {:?}: not a number: {cell:?}", line + 2, &headers[j]))
            })?;
            if !v.is_finite() {
                return Err(IoError::format(path, format!("row {}: non-finite value {cell:?}", line + 2)));
            }
            row.push(Some(v));
        }
        keys.push(key);
        rows.push(row);
    }
    Ok(Table {
        key_header: headers[0].to_string(),
        columns: headers.iter().skip(1).map(String::from).collect(),
        keys,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DroppedRow {
    pub key: String,
    pub reason: String,
}

/// Rows of two views matched by key.
#[derive(Clone, Debug, PartialEq)]
pub struct DataPair {
    pub keys: Vec<String>,
    pub x_columns: Vec<String>,
    pub y_columns: Vec<String>,
    pub x: Matrix,
    pub y: Matrix,
    pub dropped: Vec<DroppedRow>,
}

/// Joins two keyed tables in the X file's row order. Keys present in only
/// one file and rows with blank cells are dropped and reported.
pub fn load_two_view_csv(path_x: &Path, path_y: &Path) -> IoResult<DataPair> {
    let tx = read_table(path_x)?;
    let ty = read_table(path_y)?;
    let y_index: HashMap<&str, usize> = ty.keys.iter().enumerate().map(|(i, k)| (k.as_str(), i)).collect();
    let x_keys: HashSet<&str> = tx.keys.iter().map(String::as_str).collect();
    let mut keys = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut dropped = Vec::new();
    for (i, key) in tx.keys.iter().enumerate() {
        let Some(&j) = y_index.get(key.as_str()) else {
            dropped.push(DroppedRow { key: key.clone(), reason: "missing from Y file".into() });
            continue;
        };
        let xr: Option<Vec<f64>> = tx.rows[i].iter().copied().collect();
        let yr: Option<Vec<f64>> = ty.rows[j].iter().copied().collect();
        match (xr, yr) {
            (Some(a), Some(b)) => {
                keys.push(key.clone());
                xs.push(a);
                ys.push(b);
            }
            _ => dropped.push(DroppedRow { key: key.clone(), reason: "missing value".into() }),
        }
    }
    for key in ty.keys.iter().filter(|k| !x_keys.contains(k.as_str())) {
        dropped.push(DroppedRow { key: key.clone(), reason: "missing from X file".into() });
    }
    if keys.is_empty() {
        return Err(IoError::format(path_x, format!("no complete rows share a key with {}", path_y.display())));
    }
    Ok(DataPair {
        keys,
        x_columns: tx.columns,
        y_columns: ty.columns,
        x: Matrix::from_rows(&xs)?,
        y: Matrix::from_rows(&ys)?,
        dropped,
    })
}

fn writer(path: &Path) -> IoResult<csv::Writer<File>> {
    let file = File::create(path).map_err(|source| IoError::Open { path: path.to_path_buf(), source })?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_table(path: &Path, key_header: &str, columns: &[String], keys: &[String], m: &Matrix) -> IoResult<()> {
    if keys.len() != m.rows() || columns.len() != m.cols() {
        return Err(IoError::format(path, "table shape does not match its keys and columns"));
    }
    let mut w = writer(path)?;
    let err = csv_err(path);
    w.write_record(std::iter::once(key_header).chain(columns.iter().map(String::as_str))).map_err(&err)?;
    for (i, key) in keys.iter().enumerate() {
        let mut rec = vec![key.clone()];
        rec.extend(m.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(&err)?;
    }
    w.flush().map_err(|source| IoError::Open { path: path.to_path_buf(), source })
}

/// `prefix1, prefix2, ...`
pub fn numbered(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

pub fn write_labels(path: &Path, keys: &[String], columns: &[&str], labels: &[&[usize]]) -> IoResult<()> {
    let mut w = writer(path)?;
    let err = csv_err(path);
    w.write_record(std::iter::once("id").chain(columns.iter().copied())).map_err(&err)?;
    for (i, key) in keys.iter().enumerate() {
        let mut rec = vec![key.clone()];
        rec.extend(labels.iter().map(|l| l[i].to_string()));
        w.write_record(&rec).map_err(&err)?;
    }
    w.flush().map_err(|source| IoError::Open { path: path.to_path_buf(), source })
}

/// Keys and one label column; `column` defaults to the last column.
pub fn read_labels(path: &Path, column: Option<&str>) -> IoResult<(Vec<String>, Vec<usize>)> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(csv_err(path))?.clone();
    if headers.len() < 2 {
        return Err(IoError::format(path, "need an identifier column and a label column"));
    }
    let idx = match column {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::format(path, format!("no column named {name:?}")))?,
        None => headers.len() - 1,
    };
    let mut keys = Vec::new();
    let mut labels = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let v: usize = rec[idx]
            .parse()
            .map_err(|_| IoError::format(path, format!("row {}: bad label {:?}", line + 2, &rec[idx])))?;
        keys.push(rec[0].to_string());
        labels.push(v);
    }
    Ok((keys, labels))
}

/// One row of a long-form returns file.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnRecord {
    pub date: String,
    pub ticker: String,
    pub ret: Option<f64>,
    pub volume: Option<f64>,
}

fn valid_date(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && b.iter().enumerate().all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit())
        && (1..=12).contains(&s[5..7].parse::<u32>().unwrap_or(0))
        && (1..=31).contains(&s[8..10].parse::<u32>().unwrap_or(0))
}

/// Reads `date,ticker,<value_column>[,volume]`; dates are `YYYY-MM-DD`.
/// The value column is normally `return`.
pub fn read_returns(path: &Path, value_column: &str) -> IoResult<Vec<ReturnRecord>> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(csv_err(path))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(di), Some(ti), Some(ri)) = (col("date"), col("ticker"), col(value_column)) else {
        return Err(IoError::format(path, format!("returns file needs date, ticker and {value_column} columns")));
    };
    let vi = col("volume");
    let num = |cell: &str, line: usize| -> IoResult<Option<f64>> {
        if cell.is_empty() {
            return Ok(None);
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(IoError::format(path, format!("row {line}: not a finite number: {cell:?}"))),
        }
    };
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let line = i + 2;
        let date = rec[di].to_string();
        if !valid_date(&date) {
            return Err(IoError::format(path, format!("row {line}: bad date {date:?}")));
        }
        let ticker = rec[ti].to_string();
        if !seen.insert((ticker.clone(), date.clone())) {
            return Err(IoError::format(path, format!("row {line}: duplicate {ticker} on {date}")));
        }
        out.push(ReturnRecord {
            ret: num(&rec[ri], line)?,
            volume: match vi {
                Some(v) => num(&rec[v], line)?,
                None => None,
            },
            date,
            ticker,
        });
    }
    Ok(out)
}

/// Per-ticker series for dates in `[start, end]`, in date order, sorted by
/// ticker. Tickers with a blank return in the window are returned separately.
/// Volumes are kept only when every row in the window has one.
pub fn series_in_window(records: &[ReturnRecord], start: &str, end: &str) -> (Vec<ReturnSeries>, Vec<String>) {
    let mut groups: BTreeMap<&str, Vec<&ReturnRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.date.as_str() >= start && r.date.as_str() <= end) {
        groups.entry(r.ticker.as_str()).or_default().push(r);
    }
    let mut series = Vec::new();
    let mut incomplete = Vec::new();
    for (ticker, mut rows) in groups {
        rows.sort_by(|a, b| a.date.cmp(&b.date));
        let Some(returns) = rows.iter().map(|r| r.ret).collect::<Option<Vec<f64>>>() else {
            incomplete.push(ticker.to_string());
            continue;
        };
        let volumes: Option<Vec<f64>> = rows.iter().map(|r| r.volume).collect();
        series.push(ReturnSeries { ticker: ticker.to_string(), returns, volumes });
    }
    (series, incomplete)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> IoResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| IoError::format(path, e.to_string()))?;
    text.push('\n');
    let mut f = File::create(path).map_err(|source| IoError::Open { path: path.to_path_buf(), source })?;
    f.write_all(text.as_bytes()).map_err(|source| IoError::Open { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn put(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn matching_keys_load_fully() {
        let d = tempfile::tempdir().unwrap();
        let x = put(d.path(), "x.csv", "id,a,b\nr1,1,2\nr2,3,4\nr3,5,6\n");
        let y = put(d.path(), "y.csv", "id,c\nr3,9\nr1,7\nr2,8\n");
        let p = load_two_view_csv(&x, &y).unwrap();
        assert_eq!(p.keys, ["r1", "r2", "r3"]);
        assert_eq!(p.y.column(0), [7.0, 8.0, 9.0]);
        assert_eq!(p.x.shape(), (3, 2));
        assert!(p.dropped.is_empty());
    }

    #[test]
    fn missing_key_and_blank_cell_are_dropped() {
        let d = tempfile::tempdir().unwrap();
        let x = put(d.path(), "x.csv", "id,a\nr1,1\nr2,2\nr3,3\n");
        let y = put(d.path(), "y.csv", "id,c\nr1,1\nr2,\n");
        let p = load_two_view_csv(&x, &y).unwrap();
        assert_eq!(p.keys, ["r1"]);
        assert_eq!(p.dropped.len(), 2);
        assert_eq!(p.dropped[0], DroppedRow { key: "r2".into(), reason: "missing value".into() });
        assert_eq!(p.dropped[1].key, "r3");
    }

    #[test]
    fn malformed_tables_are_errors() {
        let d = tempfile::tempdir().unwrap();
        let dup = put(d.path(), "dup.csv", "id,a\nr1,1\nr1,2\n");
        assert!(read_table(&dup).is_err());
        let text = put(d.path(), "text.csv", "id,a\nr1,abc\n");
        assert!(read_table(&text).is_err());
        let y = put(d.path(), "y.csv", "id,a\nq,1\n");
        let x = put(d.path(), "x.csv", "id,a\nr,1\n");
        assert!(load_two_view_csv(&x, &y).is_err());
    }

    #[test]
    fn tables_round_trip_bit_identically() {
        let d = tempfile::tempdir().unwrap();
        let vals = [0.1 + 0.2, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 12345.678901234567];
        let m = Matrix::from_row_major(3, 2, vals.to_vec()).unwrap();
        let keys: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        let p = d.path().join("t.csv");
        write_table(&p, "id", &numbered("x", 2), &keys, &m).unwrap();
        let t = read_table(&p).unwrap();
        let back: Vec<f64> = t.rows.iter().flatten().map(|v| v.unwrap()).collect();
        assert_eq!(back.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), vals.map(f64::to_bits));
    }

    #[test]
    fn labels_round_trip() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("l.csv");
        let keys: Vec<String> = ["0", "1", "2"].map(String::from).to_vec();
        write_labels(&p, &keys, &["spatial_label", "corr_label"], &[&[0, 1, 1], &[1, 1, 0]]).unwrap();
        assert_eq!(read_labels(&p, None).unwrap().1, [1, 1, 0]);
        assert_eq!(read_labels(&p, Some("spatial_label")).unwrap().1, [0, 1, 1]);
        assert!(read_labels(&p, Some("nope")).is_err());
    }

    #[test]
    fn returns_group_by_window() {
        let d = tempfile::tempdir().unwrap();
        let p = put(
            d.path(),
            "r.csv",
            "date,ticker,return,volume\n\
             2005-02-01,AAA,0.02,10\n2005-01-01,AAA,0.01,5\n2005-03-01,AAA,-0.01,\n\
             2005-01-01,BBB,0.03,1\n2005-02-01,BBB,,1\n2010-01-01,AAA,0.5,1\n",
        );
        let recs = read_returns(&p, "return").unwrap();
        let (s, incomplete) = series_in_window(&recs, "2005-01-01", "2005-12-31");
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].ticker, "AAA");
        assert_eq!(s[0].returns, [0.01, 0.02, -0.01]);
        assert_eq!(s[0].volumes, None);
        assert_eq!(incomplete, ["BBB"]);
        let (s, _) = series_in_window(&recs, "2005-01-01", "2005-02-28");
        assert_eq!(s[0].volumes, Some(vec![5.0, 10.0]));
    }

    #[test]
    fn bad_returns_rows_are_errors() {
        let d = tempfile::tempdir().unwrap();
        let bad_date = put(d.path(), "a.csv", "date,ticker,return\n2005/01/01,A,0.1\n");
        assert!(read_returns(&bad_date, "return").is_err());
        let dup = put(d.path(), "b.csv", "date,ticker,return\n2005-01-01,A,0.1\n2005-01-01,A,0.2\n");
        assert!(read_returns(&dup, "return").is_err());
        let no_col = put(d.path(), "c.csv", "day,ticker,return\n2005-01-01,A,0.1\n");
        assert!(read_returns(&no_col, "return").is_err());
    }
}
