//! Binary field files.
//!
//! Layout: magic `b"VRVW"`, format version (`u32` LE), header length (`u32` LE),
//! UTF-8 JSON header `{grid:{n,h}, fields:[{name,kind,offset,count}]}`, then
//! the payload as little-endian `f64`. `offset` and `count` are measured in
//! `f64` values from the start of the payload.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::field::{
    Connection, ConnectionField, Field, FieldKind, OneForm, OneFormField, PlusForm,
    PlusFormField, Scalar, ScalarLieField,
};
use super::grid::TorusGrid;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"VRVW";
pub const FORMAT_VERSION: u32 = 1;

/// Any field kind that may be stored in a field file.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyField {
    Connection(ConnectionField),
    PlusForm(PlusFormField),
    OneForm(OneFormField),
    Scalar(ScalarLieField),
}

impl AnyField {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyField::Connection(_) => Connection::NAME,
            AnyField::PlusForm(_) => PlusForm::NAME,
            AnyField::OneForm(_) => OneForm::NAME,
            AnyField::Scalar(_) => Scalar::NAME,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        match self {
            AnyField::Connection(f) => f.grid(),
            AnyField::PlusForm(f) => f.grid(),
            AnyField::OneForm(f) => f.grid(),
            AnyField::Scalar(f) => f.grid(),
        }
    }

    fn data(&self) -> &[f64] {
        match self {
            AnyField::Connection(f) => f.data(),
            AnyField::PlusForm(f) => f.data(),
            AnyField::OneForm(f) => f.data(),
            AnyField::Scalar(f) => f.data(),
        }
    }

    fn from_parts(kind: &str, grid: TorusGrid, data: Vec<f64>) -> Result<Self> {
        Ok(match kind {
            Connection::NAME => AnyField::Connection(Field::from_vec(grid, data)?),
            PlusForm::NAME => AnyField::PlusForm(Field::from_vec(grid, data)?),
            OneForm::NAME => AnyField::OneForm(Field::from_vec(grid, data)?),
            Scalar::NAME => AnyField::Scalar(Field::from_vec(grid, data)?),
            other => return Err(Error::Format(format!("unknown field kind {other:?}"))),
        })
    }
}

impl From<ConnectionField> for AnyField {
    fn from(f: ConnectionField) -> Self {
        AnyField::Connection(f)
    }
}

impl From<PlusFormField> for AnyField {
    fn from(f: PlusFormField) -> Self {
        AnyField::PlusForm(f)
    }
}

impl From<OneFormField> for AnyField {
    fn from(f: OneFormField) -> Self {
        AnyField::OneForm(f)
    }
}

impl From<ScalarLieField> for AnyField {
    fn from(f: ScalarLieField) -> Self {
        AnyField::Scalar(f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedField {
    pub name: String,
    pub field: AnyField,
}

impl NamedField {
    pub fn new(name: impl Into<String>, field: impl Into<AnyField>) -> Self {
        NamedField { name: name.into(), field: field.into() }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldEntry {
    name: String,
    kind: String,
    offset: u64,
    count: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    grid: TorusGrid,
    fields: Vec<FieldEntry>,
}

/// Writes `fields` (all on the same grid) to `path`.
pub fn save_fields(path: impl AsRef<Path>, fields: &[NamedField]) -> Result<()> {
    let first = fields
        .first()
        .ok_or_else(|| Error::InvalidParameter("no fields to save".into()))?;
    let grid = *first.field.grid();
    let mut entries = Vec::with_capacity(fields.len());
    let mut offset = 0u64;
    for f in fields {
        grid.ensure_same(f.field.grid())?;
        let count = f.field.data().len() as u64;
        entries.push(FieldEntry {
            name: f.name.clone(),
            kind: f.field.kind().to_string(),
            offset,
            count,
        });
        offset += count;
    }
    let header = serde_json::to_vec(&Header { grid, fields: entries })?;
    let header_len = u32::try_from(header.len())
        .map_err(|_| Error::Format("header longer than u32::MAX bytes".into()))?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&header_len.to_le_bytes())?;
    w.write_all(&header)?;
    for f in fields {
        for x in f.field.data() {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

/// Reads every field stored in `path`, in file order.
pub fn load_fields(path: impl AsRef<Path>) -> Result<(TorusGrid, Vec<NamedField>)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch { expected: FORMAT_VERSION, found: version });
    }
    let header_len = read_u32(&mut r)? as usize;
    let mut header = vec![0u8; header_len];
    r.read_exact(&mut header)?;
    let header: Header = serde_json::from_slice(&header)?;
    let grid = TorusGrid::new(header.grid.n, header.grid.h)?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() % 8 != 0 {
        return Err(Error::Format(format!("payload of {} bytes is not f64-aligned", payload.len())));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let mut out = Vec::with_capacity(header.fields.len());
    for e in header.fields {
        let start = usize::try_from(e.offset).map_err(|_| Error::Format("offset overflow".into()))?;
        let count = usize::try_from(e.count).map_err(|_| Error::Format("count overflow".into()))?;
        let end = start
            .checked_add(count)
            .filter(|&end| end <= values.len())
            .ok_or_else(|| Error::Format(format!("field {:?} exceeds the payload", e.name)))?;
        let field = AnyField::from_parts(&e.kind, grid, values[start..end].to_vec())?;
        out.push(NamedField { name: e.name, field });
    }
    Ok((grid, out))
}
