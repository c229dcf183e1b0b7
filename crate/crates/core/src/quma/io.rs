use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use super::record::{app_number, is_likert, Gender, Measure, UserOpinionRecord};
use super::QumaError;

pub const HEADER: [&str; 10] = [
    "app_id",
    "absolute_quality",
    "error_freeness",
    "ui_complexity",
    "rationality",
    "usability",
    "gender",
    "age",
    "community_id",
    "seq",
];

const OPTIONAL: [&str; 2] = ["relative_quality", "accordance"];

/// A rejected row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowDiagnostic {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Loaded {
    pub records: Vec<UserOpinionRecord>,
    pub diagnostics: Vec<RowDiagnostic>,
}

pub fn load_records(path: impl AsRef<Path>) -> Result<Loaded, QumaError> {
    let file = std::fs::File::open(path.as_ref()).map_err(|e| QumaError::Io(path.as_ref().display().to_string(), e))?;
    read_records(file)
}

/// Reads records in file order. Malformed rows are skipped and reported; a
/// bad header fails the whole read.
pub fn read_records<R: Read>(input: R) -> Result<Loaded, QumaError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header.len() < HEADER.len() || header[..HEADER.len()] != HEADER {
        return Err(QumaError::Header(format!("expected `{}`, found `{}`", HEADER.join(","), header.join(","))));
    }
    let mut extra = Vec::new();
    for h in &header[HEADER.len()..] {
        if !OPTIONAL.contains(&h.as_str()) || extra.contains(h) {
            return Err(QumaError::Header(format!("unexpected column `{h}`")));
        }
        extra.push(h.clone());
    }

    let mut out = Loaded::default();
    let mut last_seq: HashMap<(String, String), u64> = HashMap::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        match parse_row(&row, &extra) {
            Err(message) => out.diagnostics.push(RowDiagnostic { line, message }),
            Ok(rec) => {
                let key = (rec.app_id.clone(), rec.community_id.clone());
                if let Some(&prev) = last_seq.get(&key) {
                    if rec.seq <= prev {
                        out.diagnostics.push(RowDiagnostic {
                            line,
                            message: format!(
                                "seq {} does not follow {prev} in community {}/{}",
                                rec.seq, rec.app_id, rec.community_id
                            ),
                        });
                        continue;
                    }
                }
                last_seq.insert(key, rec.seq);
                out.records.push(rec);
            }
        }
    }
    Ok(out)
}

fn likert(row: &csv::StringRecord, i: usize, name: &str) -> Result<u8, String> {
    let raw = row.get(i).unwrap_or("").trim();
    match raw.parse::<u8>() {
        Ok(v) if is_likert(v) => Ok(v),
        _ => Err(format!("{name} must be an integer 1..5, found `{raw}`")),
    }
}

fn parse_row(row: &csv::StringRecord, extra: &[String]) -> Result<UserOpinionRecord, String> {
    if row.len() != HEADER.len() + extra.len() {
        return Err(format!("expected {} fields, found {}", HEADER.len() + extra.len(), row.len()));
    }
    let app_id = row[0].trim().to_string();
    if app_number(&app_id).is_none() {
        return Err(format!("app_id must look like M1, M2, ..., found `{app_id}`"));
    }
    let gender = Gender::parse(&row[6]).ok_or_else(|| format!("unknown gender `{}`", row[6].trim()))?;
    let age = match row[7].trim() {
        "" | "unknown" | "?" => None,
        a => Some(a.parse::<u16>().map_err(|_| format!("age must be a whole number, found `{a}`"))?),
    };
    let community_id = row[8].trim().to_string();
    if community_id.is_empty() {
        return Err("community_id is empty".into());
    }
    let seq = row[9].trim().parse::<u64>().map_err(|_| format!("seq must be a whole number, found `{}`", row[9].trim()))?;
    let mut rec = UserOpinionRecord {
        app_id,
        absolute_quality: likert(row, 1, HEADER[1])?,
        error_freeness: likert(row, 2, HEADER[2])?,
        ui_complexity: likert(row, 3, HEADER[3])?,
        rationality: likert(row, 4, HEADER[4])?,
        usability: likert(row, 5, HEADER[5])?,
        gender,
        age,
        community_id,
        seq,
        relative_quality: None,
        accordance: None,
    };
    for (k, name) in extra.iter().enumerate() {
        let i = HEADER.len() + k;
        if row[i].trim().is_empty() {
            continue;
        }
        let v = likert(row, i, name)?;
        rec.set_score(name.parse::<Measure>().map_err(|e| e.to_string())?, v);
    }
    Ok(rec)
}

/// Writes records with the standard header, adding the optional columns
/// only when some record carries them.
pub fn write_records<W: Write>(out: W, records: &[UserOpinionRecord]) -> Result<(), QumaError> {
    let with_rel = records.iter().any(|r| r.relative_quality.is_some());
    let with_acc = records.iter().any(|r| r.accordance.is_some());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = HEADER.to_vec();
    if with_rel {
        header.push(OPTIONAL[0]);
    }
    if with_acc {
        header.push(OPTIONAL[1]);
    }
    w.write_record(&header)?;
    let opt = |v: Option<u8>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        let mut row = vec![
            r.app_id.clone(),
            r.absolute_quality.to_string(),
            r.error_freeness.to_string(),
            r.ui_complexity.to_string(),
            r.rationality.to_string(),
            r.usability.to_string(),
            r.gender.as_str().to_string(),
            r.age.map(|a| a.to_string()).unwrap_or_default(),
            r.community_id.clone(),
            r.seq.to_string(),
        ];
        if with_rel {
            row.push(opt(r.relative_quality));
        }
        if with_acc {
            row.push(opt(r.accordance));
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| QumaError::Io("<output>".into(), e))?;
    Ok(())
}
