//! Whitespace-delimited PQR reader.
//!
//! Records look like
//! `ATOM serial name resName [chain] resSeq x y z charge radius`; the chain
//! column may be absent. Lines other than ATOM/HETATM are skipped.

use serde::{Deserialize, Serialize};

use crate::error::{PslError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PqrAtom {
    pub serial: i64,
    pub atom_name: String,
    pub residue_name: String,
    pub chain: String,
    pub residue_seq: i64,
    pub insertion_code: Option<char>,
    pub coords: [f64; 3],
    pub charge: f64,
    pub radius: f64,
    pub element: String,
    pub hetero: bool,
}

const TWO_LETTER_IONS: &[&str] = &[
    "CA", "MG", "ZN", "FE", "MN", "CU", "CO", "NI", "NA", "CL", "BR", "CD", "HG", "LI", "SE",
];

/// Element symbol from a PDB-style atom name. Leading digits (`1HB`) are
/// skipped; two-letter symbols are only used for hetero ions whose residue
/// name equals the atom name (`CA` in residue `CA` is calcium, in `ALA` it is
/// an alpha carbon).
pub fn infer_element(atom_name: &str, residue_name: &str, hetero: bool) -> Option<String> {
    let name = atom_name.trim_start_matches(|c: char| c.is_ascii_digit()).to_ascii_uppercase();
    if hetero {
        let res = residue_name.to_ascii_uppercase();
        if let Some(ion) = TWO_LETTER_IONS.iter().find(|&&ion| name == ion && res == ion) {
            return Some((*ion).to_string());
        }
    }
    name.chars()
        .find(|c| c.is_ascii_alphabetic())
        .map(|c| c.to_string())
}

fn parse_field<T: std::str::FromStr>(s: &str, what: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| PslError::MalformedRecord {
        line,
        reason: format!("{what} '{s}' is not a number"),
    })
}

fn parse_residue_seq(s: &str, line: usize) -> Result<(i64, Option<char>)> {
    if let Ok(v) = s.parse() {
        return Ok((v, None));
    }
    let mut chars = s.chars();
    match chars.next_back() {
        Some(code) if code.is_ascii_alphabetic() => {
            Ok((parse_field(chars.as_str(), "residue number", line)?, Some(code)))
        }
        _ => Err(PslError::MalformedRecord {
            line,
            reason: format!("residue number '{s}' is not an integer"),
        }),
    }
}

pub fn parse_pqr(text: &str) -> Result<Vec<PqrAtom>> {
    let mut atoms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        let hetero = match fields.first() {
            Some(&"ATOM") => false,
            Some(&"HETATM") => true,
            _ => continue,
        };
        let (chain, rest) = match fields.len() {
            11 => (fields[4].to_string(), &fields[5..]),
            10 => (String::new(), &fields[4..]),
            n => {
                return Err(PslError::MalformedRecord {
                    line: line_no,
                    reason: format!("expected 10 or 11 fields, found {n}"),
                })
            }
        };
        let (residue_seq, insertion_code) = parse_residue_seq(rest[0], line_no)?;
        let coords = [
            parse_field(rest[1], "x", line_no)?,
            parse_field(rest[2], "y", line_no)?,
            parse_field(rest[3], "z", line_no)?,
        ];
        let charge: f64 = parse_field(rest[4], "charge", line_no)?;
        let radius: f64 = parse_field(rest[5], "radius", line_no)?;
        if !coords.iter().chain([&charge, &radius]).all(|v| v.is_finite()) || radius < 0.0 {
            return Err(PslError::MalformedRecord {
                line: line_no,
                reason: "non-finite value or negative radius".into(),
            });
        }
        let atom_name = fields[2].to_string();
        let residue_name = fields[3].to_string();
        let element = infer_element(&atom_name, &residue_name, hetero).ok_or_else(|| {
            PslError::MalformedRecord {
                line: line_no,
                reason: format!("cannot infer element from atom name '{atom_name}'"),
            }
        })?;
        atoms.push(PqrAtom {
            serial: parse_field(fields[1], "serial", line_no)?,
            atom_name,
            residue_name,
            chain,
            residue_seq,
            insertion_code,
            coords,
            charge,
            radius,
            element,
            hetero,
        });
    }
    Ok(atoms)
}

pub fn read_pqr(path: &std::path::Path) -> Result<Vec<PqrAtom>> {
    let bytes = std::fs::read(path).map_err(|source| PslError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_pqr(&String::from_utf8_lossy(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_standard_record() {
        let atoms = parse_pqr("ATOM 1 N MET A 1 1.0 2.0 3.0 -0.3 1.55\n").unwrap();
        assert_eq!(atoms.len(), 1);
        let a = &atoms[0];
        assert_eq!(a.element, "N");
        assert_eq!(a.charge, -0.3);
        assert_eq!(a.chain, "A");
        assert_eq!(a.residue_seq, 1);
        assert_eq!(a.coords, [1.0, 2.0, 3.0]);
        assert_eq!(a.radius, 1.55);
    }

    #[test]
    fn empty_and_non_atom_lines() {
        assert!(parse_pqr("").unwrap().is_empty());
        let text = "REMARK generated\nTER\nEND\n";
        assert!(parse_pqr(text).unwrap().is_empty());
    }

    #[test]
    fn nine_fields_is_malformed() {
        let err = parse_pqr("REMARK x\nATOM 1 N MET 1 1.0 2.0 3.0 -0.3\n").unwrap_err();
        assert!(matches!(err, PslError::MalformedRecord { line: 2, .. }));
    }

    #[test]
    fn chainless_and_insertion_codes() {
        let atoms = parse_pqr(
            "ATOM 5 CA GLY 52A 0.0 0.0 0.0 0.1 1.9\nHETATM 9 CA CA B 300 1 1 1 2.0 1.0\n",
        )
        .unwrap();
        assert_eq!(atoms[0].chain, "");
        assert_eq!(atoms[0].residue_seq, 52);
        assert_eq!(atoms[0].insertion_code, Some('A'));
        assert_eq!(atoms[0].element, "C");
        assert_eq!(atoms[1].element, "CA");
    }

    #[test]
    fn non_numeric_coordinate() {
        let err = parse_pqr("ATOM 1 N MET A 1 1.0 abc 3.0 -0.3 1.55").unwrap_err();
        assert!(matches!(err, PslError::MalformedRecord { line: 1, .. }));
    }

    #[test]
    fn element_inference() {
        assert_eq!(infer_element("1HB", "ALA", false).unwrap(), "H");
        assert_eq!(infer_element("OXT", "ALA", false).unwrap(), "O");
        assert_eq!(infer_element("CA", "ALA", true).unwrap(), "C");
        assert_eq!(infer_element("ZN", "ZN", true).unwrap(), "ZN");
        assert!(infer_element("123", "ALA", false).is_none());
    }
}
