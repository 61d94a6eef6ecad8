//! Eight-column lattice files: FROM TO FORM LEMMA CPOSTAG POSTAG FEATS TOKEN.

use std::fmt::Write;

use super::{empty_if_null, null_if_empty, parse_err, sentence_blocks};
use crate::error::{Error, Result};
use crate::types::{LatticeArc, MorphFeatures, MorphPath, SentenceLattice};

fn push_row(out: &mut String, a: &LatticeArc) {
    let _ = writeln!(
        out,
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        a.from,
        a.to,
        a.form,
        null_if_empty(&a.lemma),
        a.pos,
        a.pos,
        a.features,
        a.token
    );
}

pub fn write_lattice(lattices: &[SentenceLattice]) -> String {
    let mut out = String::new();
    for l in lattices {
        for a in l.arcs() {
            push_row(&mut out, a);
        }
        out.push('\n');
    }
    out
}

/// Writes chosen paths in lattice format, keeping their node numbers.
pub fn write_path(paths: &[MorphPath]) -> String {
    let mut out = String::new();
    for p in paths {
        for a in &p.arcs {
            push_row(&mut out, a);
        }
        out.push('\n');
    }
    out
}

fn parse_row(n: usize, line: &str) -> Result<LatticeArc> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 8 {
        return Err(parse_err(
            n,
            format!("expected 8 tab-separated columns, found {}", cols.len()),
        ));
    }
    let int = |i: usize, name: &str| -> Result<usize> {
        cols[i].parse().map_err(|_| {
            parse_err(
                n,
                format!("{name} '{}' is not a non-negative integer", cols[i]),
            )
        })
    };
    let from = int(0, "FROM")?;
    let to = int(1, "TO")?;
    if from >= to {
        return Err(parse_err(
            n,
            format!("FROM {from} is not less than TO {to}"),
        ));
    }
    for (i, name) in [(2, "FORM"), (4, "CPOSTAG"), (5, "POSTAG")] {
        if cols[i].is_empty() || cols[i] == "_" {
            return Err(parse_err(n, format!("{name} is missing")));
        }
    }
    if cols[4] != cols[5] {
        return Err(parse_err(
            n,
            format!("CPOSTAG '{}' differs from POSTAG '{}'", cols[4], cols[5]),
        ));
    }
    let features: MorphFeatures = cols[6]
        .parse()
        .map_err(|e: crate::FormatError| parse_err(n, format!("FEATS: {e}")))?;
    let token = int(7, "TOKEN")?;
    if token == 0 {
        return Err(parse_err(n, "TOKEN indices start at 1"));
    }
    Ok(LatticeArc::new(
        from,
        to,
        cols[2],
        empty_if_null(cols[3]),
        cols[5],
        features,
        token,
    ))
}

/// Parses lattice files. Rows are stably reordered by `(FROM, TO)`.
pub fn read_lattice(text: &str) -> Result<Vec<SentenceLattice>> {
    sentence_blocks(text)?
        .into_iter()
        .map(|block| {
            let arcs = block
                .into_iter()
                .map(|(n, line)| parse_row(n, line))
                .collect::<Result<Vec<_>>>()?;
            Ok(SentenceLattice::from_arcs(arcs))
        })
        .collect()
}

/// The single path of a lattice whose arcs form one chain from the start
/// to the end node, such as a gold `.md` file.
pub fn lattice_path(lattice: &SentenceLattice) -> Result<MorphPath> {
    let mut arcs = Vec::with_capacity(lattice.arcs().len());
    let mut node = lattice.start_node();
    while node != lattice.end_node() {
        let mut out = lattice.outgoing(node);
        let (Some(i), None) = (out.next(), out.next()) else {
            return Err(Error::InvalidLattice(format!(
                "node {node} does not have exactly one outgoing arc"
            )));
        };
        arcs.push(lattice.arc(i).clone());
        node = lattice.arc(i).to;
    }
    if arcs.len() != lattice.arcs().len() {
        return Err(Error::InvalidLattice("arcs off the main chain".into()));
    }
    Ok(MorphPath::new(arcs))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW1: &str = "0\t1\th\th\tDEF\tDEF\t_\t1\n";

    #[test]
    fn row_round_trip() {
        let text = format!("{ROW1}1\t2\tbn\tbn\tNN\tNN\tgen=M|num=S\t1\n\n");
        let l = read_lattice(&text).unwrap();
        assert_eq!(l[0].arcs().len(), 2);
        assert_eq!(l[0].arc(1).features.to_string(), "gen=M|num=S");
        assert_eq!(write_lattice(&l), text);
        assert_eq!(write_lattice(&[]), "");
    }

    #[test]
    fn rows_sorted_stably() {
        let text = "1\t2\tb\tb\tX\tX\t_\t1\n0\t1\ta\ta\tX\tX\t_\t1\n0\t1\tc\tc\tX\tX\t_\t1\n\n";
        let l = read_lattice(text).unwrap();
        let forms: Vec<_> = l[0].arcs().iter().map(|a| a.form.as_str()).collect();
        assert_eq!(forms, ["a", "c", "b"]);
    }

    #[test]
    fn rejects_malformed_rows() {
        for (row, needle) in [
            ("x\t1\th\th\tDEF\tDEF\t_\t1", "FROM"),
            ("1\t1\th\th\tDEF\tDEF\t_\t1", "not less"),
            ("0\t1\th\th\tDEF\tDEF\t_", "8 tab"),
            ("0\t1\th\th\tDEF\tNN\t_\t1", "differs"),
            ("0\t1\th\th\tDEF\tDEF\tgen\t1", "FEATS"),
        ] {
            let err = read_lattice(&format!("{ROW1}{row}\n\n"))
                .unwrap_err()
                .to_string();
            assert!(err.contains("line 2") && err.contains(needle), "{err}");
        }
    }

    #[test]
    fn path_from_chain() {
        let text = "0\t1\tb\tb\tIN\tIN\t_\t1\n1\t2\tbyt\tbyt\tNN\tNN\t_\t1\n\n";
        let l = &read_lattice(text).unwrap()[0];
        assert_eq!(lattice_path(l).unwrap().len(), 2);
        let fork = "0\t1\tb\tb\tIN\tIN\t_\t1\n0\t1\tc\tc\tIN\tIN\t_\t1\n\n";
        assert!(lattice_path(&read_lattice(fork).unwrap()[0]).is_err());
    }
}
