//! Instance generators: the four-cycle worst-case families (skew,
//! diagonal, band), the Zhang-Yeung query, and the fhtw/subw gap
//! hypergraph.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GenKind {
    C4Skew,
    C4Diag,
    C4Band,
    Zy,
    Gap1,
}

impl GenKind {
    pub fn parse(name: &str) -> Option<GenKind> {
        match name {
            "c4-skew" => Some(GenKind::C4Skew),
            "c4-diag" => Some(GenKind::C4Diag),
            "c4-band" => Some(GenKind::C4Band),
            "zy" => Some(GenKind::Zy),
            "gap1" => Some(GenKind::Gap1),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    /// Base size `N` for the c4 families and the Zhang-Yeung query.
    pub n: u64,
    /// Band width `D` for c4-band.
    pub d: u64,
    /// Block size `m` and half-cycle length `k` for gap1.
    pub m: usize,
    pub k: usize,
}

impl Default for GenParams {
    fn default() -> GenParams {
        GenParams {
            n: 16,
            d: 1,
            m: 2,
            k: 2,
        }
    }
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<u64>>) -> io::Result<()> {
    let mut out = String::new();
    writeln!(out, "{}", header.join(",")).unwrap();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    fs::write(path, out)
}

/// The written query file's name for a kind.
pub fn query_file_name(kind: GenKind) -> &'static str {
    match kind {
        GenKind::C4Skew => "c4-skew.ddl",
        GenKind::C4Diag => "c4-diag.ddl",
        GenKind::C4Band => "c4-band.ddl",
        GenKind::Zy => "zy.ddl",
        GenKind::Gap1 => "gap1.ddl",
    }
}

/// Generates the instance files under `out`; returns the query-file path.
pub fn generate_instance(
    kind: GenKind,
    params: GenParams,
    out: &Path,
) -> Result<std::path::PathBuf, String> {
    fs::create_dir_all(out).map_err(|e| e.to_string())?;
    let ddl_path = out.join(query_file_name(kind));
    match kind {
        GenKind::C4Skew => {
            let n = params.n;
            if n == 0 {
                return Err("N must be positive".into());
            }
            write_csv(&out.join("R12.csv"), &["A1", "A2"], (0..n).map(|i| vec![i, 0]))
                .map_err(|e| e.to_string())?;
            write_csv(&out.join("R23.csv"), &["A2", "A3"], (0..n).map(|j| vec![0, j]))
                .map_err(|e| e.to_string())?;
            write_csv(&out.join("R34.csv"), &["A3", "A4"], (0..n).map(|j| vec![j, 0]))
                .map_err(|e| e.to_string())?;
            write_csv(&out.join("R41.csv"), &["A4", "A1"], (0..n).map(|i| vec![0, i]))
                .map_err(|e| e.to_string())?;
            fs::write(&ddl_path, c4_ddl(n, n, n, n)).map_err(|e| e.to_string())?;
        }
        GenKind::C4Diag => {
            let k = (params.n as f64).sqrt() as u64;
            if k == 0 {
                return Err("N must be at least 1".into());
            }
            write_csv(&out.join("R12.csv"), &["A1", "A2"], (0..k).map(|i| vec![i, i]))
                .map_err(|e| e.to_string())?;
            for (name, a, b) in [("R23", "A2", "A3"), ("R34", "A3", "A4"), ("R41", "A4", "A1")] {
                write_csv(
                    &out.join(format!("{name}.csv")),
                    &[a, b],
                    (0..k).flat_map(|x| (0..k).map(move |y| vec![x, y])),
                )
                .map_err(|e| e.to_string())?;
            }
            fs::write(&ddl_path, c4_ddl(k, k * k, k * k, k * k)).map_err(|e| e.to_string())?;
        }
        GenKind::C4Band => {
            let k = (params.n as f64).sqrt() as u64;
            let d = params.d;
            if d == 0 || d > k {
                return Err(format!("band width D={d} out of range 1..={k}"));
            }
            write_csv(
                &out.join("R12.csv"),
                &["A1", "A2"],
                (0..k).flat_map(move |i| {
                    (0..k).filter(move |j| (j + k - i) % k < d).map(move |j| vec![i, j])
                }),
            )
            .map_err(|e| e.to_string())?;
            for (name, a, b) in [("R23", "A2", "A3"), ("R34", "A3", "A4"), ("R41", "A4", "A1")] {
                write_csv(
                    &out.join(format!("{name}.csv")),
                    &[a, b],
                    (0..k).flat_map(|x| (0..k).map(move |y| vec![x, y])),
                )
                .map_err(|e| e.to_string())?;
            }
            fs::write(&ddl_path, c4_ddl(k * d, k * k, k * k, k * k)).map_err(|e| e.to_string())?;
        }
        GenKind::Zy => {
            // Schema-and-constraints fixture: no data files.
            let n = params.n.max(2);
            let n3 = n.pow(3);
            let n2 = n.pow(2);
            let mut ddl = String::new();
            writeln!(ddl, "relation K(A,B,X,Y,C)").unwrap();
            writeln!(ddl, "relation R(X,Y) size {n3}").unwrap();
            writeln!(ddl, "relation S(A,X) size {n3}").unwrap();
            writeln!(ddl, "relation T(A,Y) size {n3}").unwrap();
            writeln!(ddl, "relation U(B,X) size {n3}").unwrap();
            writeln!(ddl, "relation V(B,Y) size {n3}").unwrap();
            writeln!(ddl, "relation W(C) size {n2}").unwrap();
            for key in ["A B", "A X Y", "B X Y", "A C", "X C", "Y C"] {
                writeln!(ddl, "fd K: {key} -> A B X Y C").unwrap();
            }
            writeln!(
                ddl,
                "query Q(A,B,X,Y,C) :- K(A,B,X,Y,C), R(X,Y), S(A,X), T(A,Y), U(B,X), V(B,Y), W(C)"
            )
            .unwrap();
            fs::write(&ddl_path, ddl).map_err(|e| e.to_string())?;
        }
        GenKind::Gap1 => {
            // Cyclically arranged complete bipartite blocks; hypergraph
            // only.
            let (m, k) = (params.m, params.k);
            if m == 0 || k == 0 || 2 * m * k > 10 {
                return Err(format!("gap1 needs 2·m·k in 1..=10, got {}", 2 * m * k));
            }
            let blocks = 2 * k;
            let var = |block: usize, i: usize| format!("V{}", block * m + i);
            let mut ddl = String::new();
            let mut body = Vec::new();
            for b in 0..blocks {
                let nb = (b + 1) % blocks;
                for i in 0..m {
                    for j in 0..m {
                        let name = format!("E{b}_{i}_{j}");
                        writeln!(ddl, "relation {name}({},{}) size 2", var(b, i), var(nb, j))
                            .unwrap();
                        body.push(format!("{name}({},{})", var(b, i), var(nb, j)));
                    }
                }
            }
            let head: Vec<String> = (0..blocks * m).map(|v| format!("V{v}")).collect();
            writeln!(ddl, "query Q({}) :- {}", head.join(","), body.join(", ")).unwrap();
            fs::write(&ddl_path, ddl).map_err(|e| e.to_string())?;
        }
    }
    Ok(ddl_path)
}

fn c4_ddl(s12: u64, s23: u64, s34: u64, s41: u64) -> String {
    format!(
        "relation R12(A1,A2) size {s12}\n\
         relation R23(A2,A3) size {s23}\n\
         relation R34(A3,A4) size {s34}\n\
         relation R41(A4,A1) size {s41}\n\
         query Q(A1,A2,A3,A4) :- R12(A1,A2), R23(A2,A3), R34(A3,A4), R41(A4,A1)\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ingest_csv;
    use crate::query_file::parse_query_file;
    use pandaq_core::relalg::{brute_force_join, Relation};

    fn roundtrip(kind: GenKind, params: GenParams) -> (crate::query_file::QueryFile, pandaq_core::relalg::Database) {
        let dir = std::env::temp_dir().join(format!(
            "pandaq-gen-test-{}-{:?}",
            std::process::id(),
            kind
        ));
        let ddl = generate_instance(kind, params, &dir).unwrap();
        let qf = parse_query_file(&std::fs::read_to_string(ddl).unwrap()).unwrap();
        let (data, _) = ingest_csv(&dir, &qf, false).unwrap();
        std::fs::remove_dir_all(&dir).ok();
        (qf, data)
    }

    #[test]
    fn skew_join_is_n_squared() {
        let (qf, data) = roundtrip(GenKind::C4Skew, GenParams { n: 4, ..Default::default() });
        let rels: Vec<&Relation> = qf
            .rule
            .hypergraph
            .edges
            .iter()
            .map(|(_, id)| &data[id])
            .collect();
        assert_eq!(brute_force_join(&rels).len(), 16);
    }

    #[test]
    fn diag_join_is_k_cubed() {
        let (qf, data) = roundtrip(GenKind::C4Diag, GenParams { n: 9, ..Default::default() });
        let rels: Vec<&Relation> = qf
            .rule
            .hypergraph
            .edges
            .iter()
            .map(|(_, id)| &data[id])
            .collect();
        assert_eq!(brute_force_join(&rels).len(), 27);
    }

    #[test]
    fn band_with_unit_width_is_diagonal() {
        let dir_a = std::env::temp_dir().join(format!("pandaq-band-{}", std::process::id()));
        generate_instance(GenKind::C4Band, GenParams { n: 16, d: 1, ..Default::default() }, &dir_a)
            .unwrap();
        let band = std::fs::read_to_string(dir_a.join("R12.csv")).unwrap();
        let mut rows: Vec<&str> = band.lines().skip(1).collect();
        rows.sort();
        assert_eq!(rows, vec!["0,0", "1,1", "2,2", "3,3"]);
        std::fs::remove_dir_all(&dir_a).ok();
    }

    #[test]
    fn band_rejects_bad_width() {
        let dir = std::env::temp_dir().join("pandaq-badband");
        let err = generate_instance(
            GenKind::C4Band,
            GenParams { n: 16, d: 5, ..Default::default() },
            &dir,
        );
        assert!(err.is_err());
    }

    #[test]
    fn zy_and_gap1_emit_parsable_schemas() {
        let dir = std::env::temp_dir().join(format!("pandaq-zy-{}", std::process::id()));
        let ddl = generate_instance(GenKind::Zy, GenParams::default(), &dir).unwrap();
        let qf = parse_query_file(&std::fs::read_to_string(ddl).unwrap()).unwrap();
        assert_eq!(qf.rule.n(), 5);
        assert_eq!(qf.rule.constraints.len(), 12);
        std::fs::remove_dir_all(&dir).ok();

        let dir = std::env::temp_dir().join(format!("pandaq-gap1-{}", std::process::id()));
        let ddl = generate_instance(
            GenKind::Gap1,
            GenParams { m: 2, k: 2, ..Default::default() },
            &dir,
        )
        .unwrap();
        let qf = parse_query_file(&std::fs::read_to_string(ddl).unwrap()).unwrap();
        assert_eq!(qf.rule.n(), 8);
        assert_eq!(qf.rule.hypergraph.edges.len(), 16);
        std::fs::remove_dir_all(&dir).ok();
    }
}
