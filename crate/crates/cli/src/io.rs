//! CSV input and output.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use mixhist::datagen::{Generated, GENERATOR};
use mixhist::ScenarioSpec;

use crate::CliError;

/// A numeric table read from CSV.
pub struct Table {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

/// Reads a header row plus numeric rows; lines starting with `#` are skipped.
pub fn read_csv(path: &Path) -> Result<Table, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    parse_csv(file, &path.display().to_string())
}

pub fn parse_csv<R: Read>(reader: R, label: &str) -> Result<Table, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let names: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("{label}: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() || names.iter().any(String::is_empty) {
        return Err(CliError::Data(format!("{label}: header row must name every column")));
    }
    let mut columns = vec![Vec::new(); names.len()];
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("{label}: {e}")))?;
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::Data(format!(
                    "{label}: row {}, column `{}`: `{field}` is not a number",
                    row + 1,
                    names[j]
                ))
            })?;
            columns[j].push(v);
        }
    }
    if columns[0].is_empty() {
        return Err(CliError::Data(format!("{label}: no data rows")));
    }
    Ok(Table { names, columns })
}

/// Writes a generated dataset with a comment line naming the generator and spec.
pub fn write_dataset<W: Write>(out: W, spec: &ScenarioSpec, data: &Generated) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    writeln!(
        out,
        "# generator={GENERATOR} scenario={} n={} seed={} k={} x={} y={} z={}",
        spec.id,
        spec.n,
        spec.seed,
        spec.k,
        data.roles.x.join(";"),
        data.roles.y.join(";"),
        data.roles.z.join(";"),
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&data.names)?;
    let n = data.columns.first().map_or(0, Vec::len);
    let mut row = Vec::with_capacity(data.columns.len());
    for i in 0..n {
        row.clear();
        row.extend(data.columns.iter().map(|c| c[i].to_string()));
        w.write_record(&row)?;
    }
    w.flush()
}

/// Writes rows of already-formatted cells.
pub fn write_rows<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}
