use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    /// Written with the shortest representation that round-trips exactly.
    Real(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// A CSV table with a leading `#` provenance comment.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comment: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(comment: &str, header: &[&str]) -> Self {
        Table {
            comment: comment.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        for line in self.comment.lines() {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()
    }
}

pub fn emit_csv(table: &Table, path: &Path) -> io::Result<()> {
    let file = BufWriter::new(File::create(path)?);
    table.write_to(file)
}
