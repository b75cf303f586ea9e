//! Line-oriented instance files.
//!
//! ```text
//! # qipm-instance v1
//! SDP n m
//! A k i j v        constraint matrix k, entry (i, j); upper or lower triangle
//! B i j v
//! C i j v          dual anchor; c_k = Tr(C A_k) is derived
//! SEEDX k v        optional primal seed coordinates
//! SEEDY i j v      optional dual seed
//! ```
//!
//! ```text
//! LP n m
//! a k i v          constraint vector k, entry i
//! b i v
//! c k v
//! SEEDX k v
//! SEEDY i v        optional; also used as the dual anchor
//! ```
//!
//! Indices are 0-based, `#` starts a comment, omitted entries are zero. An
//! entry given twice (directly or through its mirror) must repeat the same
//! value.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::instance::{LpInstance, SdpInstance};
use crate::matspace::SymMatrix;

pub const FORMAT_VERSION_LINE: &str = "# qipm-instance v1";

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Sdp(SdpInstance),
    Lp(LpInstance),
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

struct Tokens<'a> {
    line: usize,
    toks: Vec<&'a str>,
}

impl Tokens<'_> {
    fn expect_len(&self, n: usize) -> Result<()> {
        if self.toks.len() != n {
            return Err(perr(
                self.line,
                format!("`{}` expects {} fields, got {}", self.toks[0], n - 1, self.toks.len() - 1),
            ));
        }
        Ok(())
    }

    fn index(&self, pos: usize, bound: usize, what: &str) -> Result<usize> {
        let v: usize = self.toks[pos]
            .parse()
            .map_err(|_| perr(self.line, format!("bad {what} index `{}`", self.toks[pos])))?;
        if v >= bound {
            return Err(perr(self.line, format!("{what} index {v} out of range (must be < {bound})")));
        }
        Ok(v)
    }

    fn value(&self, pos: usize) -> Result<f64> {
        let v: f64 = self.toks[pos]
            .parse()
            .map_err(|_| perr(self.line, format!("bad value `{}`", self.toks[pos])))?;
        if !v.is_finite() {
            return Err(perr(self.line, "value must be finite"));
        }
        Ok(v)
    }
}

/// Symmetric entries keyed by the upper-triangle position.
#[derive(Default)]
struct SymEntries(BTreeMap<(usize, usize), f64>);

impl SymEntries {
    fn insert(&mut self, i: usize, j: usize, v: f64, line: usize, what: &str) -> Result<()> {
        let key = (i.min(j), i.max(j));
        match self.0.get(&key) {
            Some(old) if *old != v => Err(perr(
                line,
                format!("conflicting values for {what} entry ({i}, {j}): {old} vs {v}"),
            )),
            _ => {
                self.0.insert(key, v);
                Ok(())
            }
        }
    }

    fn build(&self, n: usize) -> SymMatrix {
        let mut m = DMatrix::zeros(n, n);
        for (&(i, j), &v) in &self.0 {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        SymMatrix::new(m).expect("mirrored entries are symmetric")
    }
}

#[derive(Default)]
struct VecEntries(BTreeMap<usize, f64>);

impl VecEntries {
    fn insert(&mut self, i: usize, v: f64, line: usize, what: &str) -> Result<()> {
        match self.0.get(&i) {
            Some(old) if *old != v => Err(perr(line, format!("conflicting values for {what} entry {i}"))),
            _ => {
                self.0.insert(i, v);
                Ok(())
            }
        }
    }

    fn build(&self, n: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        for (&i, &x) in &self.0 {
            v[i] = x;
        }
        v
    }
}

fn lines(text: &str) -> impl Iterator<Item = Tokens<'_>> {
    text.lines().enumerate().filter_map(|(ln, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            None
        } else {
            Some(Tokens {
                line: ln + 1,
                toks: body.split_whitespace().collect(),
            })
        }
    })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut it = lines(text);
    let header = it.next().ok_or_else(|| perr(1, "empty instance file"))?;
    if header.toks.len() != 3 || !(header.toks[0] == "SDP" || header.toks[0] == "LP") {
        return Err(perr(header.line, "expected header `SDP n m` or `LP n m`"));
    }
    let dim = |pos: usize| -> Result<usize> {
        header.toks[pos]
            .parse::<usize>()
            .ok()
            .filter(|v| *v > 0)
            .ok_or_else(|| perr(header.line, format!("bad dimension `{}`", header.toks[pos])))
    };
    let (n, m) = (dim(1)?, dim(2)?);
    if header.toks[0] == "SDP" {
        parse_sdp(n, m, it).map(Instance::Sdp)
    } else {
        parse_lp(n, m, it).map(Instance::Lp)
    }
}

fn parse_sdp<'a>(n: usize, m: usize, it: impl Iterator<Item = Tokens<'a>>) -> Result<SdpInstance> {
    let mut a: Vec<SymEntries> = (0..m).map(|_| SymEntries::default()).collect();
    let (mut b, mut c, mut sy) = (SymEntries::default(), SymEntries::default(), SymEntries::default());
    let mut sx = VecEntries::default();
    let (mut seen_c, mut seen_sy, mut seen_sx) = (false, false, false);
    let mut last = 1;
    for t in it {
        last = t.line;
        match t.toks[0] {
            "A" => {
                t.expect_len(5)?;
                let k = t.index(1, m, "constraint")?;
                a[k].insert(t.index(2, n, "row")?, t.index(3, n, "column")?, t.value(4)?, t.line, "A")?;
            }
            "B" | "C" | "SEEDY" => {
                t.expect_len(4)?;
                let (i, j, v) = (t.index(1, n, "row")?, t.index(2, n, "column")?, t.value(3)?);
                let target = match t.toks[0] {
                    "B" => &mut b,
                    "C" => {
                        seen_c = true;
                        &mut c
                    }
                    _ => {
                        seen_sy = true;
                        &mut sy
                    }
                };
                target.insert(i, j, v, t.line, t.toks[0])?;
            }
            "SEEDX" => {
                t.expect_len(3)?;
                seen_sx = true;
                sx.insert(t.index(1, m, "constraint")?, t.value(2)?, t.line, "SEEDX")?;
            }
            other => return Err(perr(t.line, format!("unknown record `{other}` in SDP file"))),
        }
    }
    if !seen_c {
        return Err(perr(last, "SDP file has no dual anchor (`C` entries)"));
    }
    if seen_sy && !seen_sx {
        return Err(perr(last, "SEEDY given without SEEDX"));
    }
    let mats = a.iter().map(|e| e.build(n)).collect();
    SdpInstance::new(
        mats,
        b.build(n),
        c.build(n),
        seen_sx.then(|| sx.build(m)),
        seen_sy.then(|| sy.build(n)),
    )
    .map_err(|e| match e {
        Error::Parse { .. } => e,
        other => perr(last, other.to_string()),
    })
}

fn parse_lp<'a>(n: usize, m: usize, it: impl Iterator<Item = Tokens<'a>>) -> Result<LpInstance> {
    let mut a: Vec<VecEntries> = (0..m).map(|_| VecEntries::default()).collect();
    let (mut b, mut c, mut sx, mut sy) = (
        VecEntries::default(),
        VecEntries::default(),
        VecEntries::default(),
        VecEntries::default(),
    );
    let (mut seen_sx, mut seen_sy) = (false, false);
    let mut last = 1;
    for t in it {
        last = t.line;
        match t.toks[0] {
            "a" => {
                t.expect_len(4)?;
                let k = t.index(1, m, "constraint")?;
                a[k].insert(t.index(2, n, "entry")?, t.value(3)?, t.line, "a")?;
            }
            "b" => {
                t.expect_len(3)?;
                b.insert(t.index(1, n, "entry")?, t.value(2)?, t.line, "b")?;
            }
            "c" => {
                t.expect_len(3)?;
                c.insert(t.index(1, m, "constraint")?, t.value(2)?, t.line, "c")?;
            }
            "SEEDX" => {
                t.expect_len(3)?;
                seen_sx = true;
                sx.insert(t.index(1, m, "constraint")?, t.value(2)?, t.line, "SEEDX")?;
            }
            "SEEDY" => {
                t.expect_len(3)?;
                seen_sy = true;
                sy.insert(t.index(1, n, "entry")?, t.value(2)?, t.line, "SEEDY")?;
            }
            other => return Err(perr(t.line, format!("unknown record `{other}` in LP file"))),
        }
    }
    LpInstance::new(
        a.iter().map(|e| e.build(n)).collect(),
        b.build(n),
        c.build(m),
        seen_sx.then(|| sx.build(m)),
        seen_sy.then(|| sy.build(n)),
    )
    .map_err(|e| perr(last, e.to_string()))
}

fn push_sym(out: &mut String, prefix: &str, a: &SymMatrix, keep_zeros: bool) {
    for i in 0..a.dim() {
        for j in i..a.dim() {
            let v = a[(i, j)];
            if v != 0.0 || keep_zeros {
                writeln!(out, "{prefix} {i} {j} {v}").unwrap();
            }
        }
    }
}

pub fn write_sdp(inst: &SdpInstance) -> String {
    let mut out = String::new();
    writeln!(out, "{FORMAT_VERSION_LINE}").unwrap();
    writeln!(out, "SDP {} {}", inst.n(), inst.m()).unwrap();
    for (k, a) in inst.constraint_mats().iter().enumerate() {
        push_sym(&mut out, &format!("A {k}"), a, false);
    }
    push_sym(&mut out, "B", inst.rhs_mat(), false);
    push_sym(&mut out, "C", inst.dual_anchor(), true);
    if let Some(x) = inst.seed_primal_x() {
        for (k, v) in x.iter().enumerate() {
            writeln!(out, "SEEDX {k} {v}").unwrap();
        }
    }
    if let Some(y) = inst.seed_dual_y() {
        push_sym(&mut out, "SEEDY", y, true);
    }
    out
}

pub fn write_lp(lp: &LpInstance) -> String {
    let mut out = String::new();
    writeln!(out, "{FORMAT_VERSION_LINE}").unwrap();
    writeln!(out, "LP {} {}", lp.n(), lp.m()).unwrap();
    for (k, a) in lp.constraint_vecs().iter().enumerate() {
        for (i, v) in a.iter().enumerate() {
            if *v != 0.0 {
                writeln!(out, "a {k} {i} {v}").unwrap();
            }
        }
    }
    for (i, v) in lp.rhs_vec().iter().enumerate() {
        if *v != 0.0 {
            writeln!(out, "b {i} {v}").unwrap();
        }
    }
    for (k, v) in lp.cost().iter().enumerate() {
        writeln!(out, "c {k} {v}").unwrap();
    }
    if let Some(x) = lp.seed_x() {
        for (k, v) in x.iter().enumerate() {
            writeln!(out, "SEEDX {k} {v}").unwrap();
        }
    }
    if let Some(y) = lp.seed_y() {
        for (i, v) in y.iter().enumerate() {
            writeln!(out, "SEEDY {i} {v}").unwrap();
        }
    }
    out
}

pub fn write_instance(inst: &Instance) -> String {
    match inst {
        Instance::Sdp(s) => write_sdp(s),
        Instance::Lp(l) => write_lp(l),
    }
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_maxcut_sdp, generate_random_lp, generate_random_sdp, WeightedGraph};

    #[test]
    fn sdp_round_trip_is_exact() {
        let inst = generate_random_sdp(4, 5, 3).unwrap();
        let text = write_sdp(&inst);
        assert_eq!(parse_instance(&text).unwrap(), Instance::Sdp(inst));
    }

    #[test]
    fn lp_round_trip_is_exact() {
        let lp = generate_random_lp(5, 2, 3).unwrap();
        assert_eq!(parse_instance(&write_lp(&lp)).unwrap(), Instance::Lp(lp));
    }

    #[test]
    fn maxcut_round_trip() {
        let g = WeightedGraph::new(vec![(0, 1, 1.0), (1, 2, 2.5)]).unwrap();
        let inst = generate_maxcut_sdp(&g).unwrap();
        assert_eq!(parse_instance(&write_sdp(&inst)).unwrap(), Instance::Sdp(inst));
    }

    #[test]
    fn mirrored_duplicates() {
        let ok = "SDP 2 1\nA 0 0 1 1\nA 0 1 0 1\nC 0 0 1\nC 1 1 1\n";
        assert!(parse_instance(ok).is_ok());
        let bad = "SDP 2 1\nA 0 0 1 1\n# comment\nA 0 1 0 2\nC 0 0 1\n";
        match parse_instance(bad) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("conflicting"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn out_of_range_and_malformed() {
        let e = parse_instance("SDP 2 1\nA 0 2 0 1\nC 0 0 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_instance("SDP 2 1\nA 1 0 0 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(parse_instance("QP 2 1\n").is_err());
        assert!(parse_instance("").is_err());
        assert!(parse_instance("LP 2 1\na 0 0 x\n").is_err());
        assert!(parse_instance("SDP 2 1\nA 0 0 0 1\n").is_err());
    }
}
