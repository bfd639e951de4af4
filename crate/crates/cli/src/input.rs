//! CSV ingestion: comma-separated, header row first, rows in time order.

use std::path::Path;

use anyhow::{bail, Context, Result};
use rho_cusum::Sample;

/// Parsed data plus what was dropped or noticed along the way.
#[derive(Debug, Clone)]
pub struct CsvDataset {
    /// Names of the selected numeric columns.
    pub header: Vec<String>,
    pub sample: Sample,
    /// Row labels (e.g. dates) when a label column was requested.
    pub labels: Option<Vec<String>>,
    /// File line numbers of records skipped because every cell was empty.
    pub skipped_lines: Vec<u64>,
}

/// A column given either by 1-based position or by header name.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl std::str::FromStr for ColumnRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().parse::<usize>() {
            Ok(0) => Err("column positions are 1-based".into()),
            Ok(i) => Ok(ColumnRef::Index(i)),
            Err(_) if !s.trim().is_empty() => Ok(ColumnRef::Name(s.trim().to_string())),
            Err(_) => Err("empty column reference".into()),
        }
    }
}

fn resolve(col: &ColumnRef, header: &[String]) -> Result<usize> {
    match col {
        ColumnRef::Index(i) if *i <= header.len() => Ok(i - 1),
        ColumnRef::Index(i) => bail!("column {i} requested but the header has {} columns", header.len()),
        ColumnRef::Name(name) => header
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("no column named '{name}' in the header")),
    }
}

/// Reads `path`. Without `columns`, every column except the label column is used.
pub fn read_csv(path: &Path, columns: Option<&[ColumnRef]>, label: Option<&ColumnRef>) -> Result<CsvDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let header: Vec<String> = reader
        .headers()
        .with_context(|| format!("cannot read the header of {}", path.display()))?
        .iter()
        .map(str::to_string)
        .collect();

    let label_idx = label.map(|l| resolve(l, &header)).transpose()?;
    let selected: Vec<usize> = match columns {
        Some(cols) => cols.iter().map(|c| resolve(c, &header)).collect::<Result<_>>()?,
        None => (0..header.len()).filter(|&i| Some(i) != label_idx).collect(),
    };
    if selected.len() < 2 {
        bail!("need at least two data columns, found {}", selected.len());
    }

    let mut values = Vec::new();
    let mut labels = label_idx.map(|_| Vec::new());
    let mut skipped_lines = Vec::new();
    let mut n = 0;
    for record in reader.records() {
        let record = record.with_context(|| format!("malformed CSV in {}", path.display()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            skipped_lines.push(line);
            continue;
        }
        if record.len() != header.len() {
            bail!(
                "line {line}: expected {} fields as in the header, found {}",
                header.len(),
                record.len()
            );
        }
        for &c in &selected {
            let cell = &record[c];
            let v: f64 = cell.parse().map_err(|_| {
                anyhow::anyhow!(
                    "line {line}, column {} ('{}'): cannot parse '{cell}' as a number",
                    c + 1,
                    header[c]
                )
            })?;
            if !v.is_finite() {
                bail!("line {line}, column {} ('{}'): value '{cell}' is not finite", c + 1, header[c]);
            }
            values.push(v);
        }
        if let (Some(ls), Some(li)) = (labels.as_mut(), label_idx) {
            ls.push(record[li].to_string());
        }
        n += 1;
    }
    let sample = Sample::from_row_major(n, selected.len(), values)?;
    Ok(CsvDataset {
        header: selected.iter().map(|&c| header[c].clone()).collect(),
        sample,
        labels,
        skipped_lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn selects_columns_and_labels() {
        let f = file("date,a,b,c\n2001-01-01,1,2,3\n2001-01-02,4,5,6\n,,,\n2001-01-03,7,8,9\n");
        let cols = [ColumnRef::Index(2), ColumnRef::Name("c".into())];
        let ds = read_csv(f.path(), Some(&cols), Some(&ColumnRef::Index(1))).unwrap();
        assert_eq!(ds.header, ["a", "c"]);
        assert_eq!(ds.sample.row(2), &[7.0, 9.0]);
        assert_eq!(ds.labels.unwrap()[1], "2001-01-02");
        assert_eq!(ds.skipped_lines, [4]);
    }

    #[test]
    fn default_selection_drops_label_column() {
        let f = file("t,x,y\na,1,2\nb,3,1\nc,2,5\n");
        let ds = read_csv(f.path(), None, Some(&ColumnRef::Name("t".into()))).unwrap();
        assert_eq!(ds.sample.d(), 2);
        assert_eq!(ds.sample.n(), 3);
    }

    #[test]
    fn parse_error_names_line_and_column() {
        let f = file("x,y\n1,2\n3,oops\n");
        let err = read_csv(f.path(), None, None).unwrap_err().to_string();
        assert!(err.contains("line 3, column 2"), "{err}");
        assert!(err.contains("oops"));
    }

    #[test]
    fn rejects_non_finite_and_ragged_rows() {
        let f = file("x,y\n1,2\n3,NaN\n");
        assert!(read_csv(f.path(), None, None).unwrap_err().to_string().contains("not finite"));
        let f = file("x,y\n1,2\n3\n");
        assert!(read_csv(f.path(), None, None).unwrap_err().to_string().contains("line 3"));
    }

    #[test]
    fn column_refs() {
        assert_eq!("3".parse::<ColumnRef>(), Ok(ColumnRef::Index(3)));
        assert_eq!("ret".parse::<ColumnRef>(), Ok(ColumnRef::Name("ret".into())));
        assert!("0".parse::<ColumnRef>().is_err());
    }
}
