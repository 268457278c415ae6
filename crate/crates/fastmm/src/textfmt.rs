//! Line-oriented text format for algorithms and decompositions.
//!
//! Grammar (tokens are space-separated; blank lines and lines starting
//! with `#` are skipped; rationals print as `num` when the denominator is
//! one and as `num/den` otherwise, always in lowest terms with a positive
//! denominator):
//!
//! ```text
//! bilinear <name>
//! target mm <m> <k> <n>            (or: target general <da> <db> <dc>)
//! rank <r>
//! U <q> <index> <coeff>            (one line per nonzero, sorted)
//! V <q> <index> <coeff>
//! W <q> <index> <coeff>
//! tensor <a> <b> <c> <coeff>       (general targets only)
//! end
//!
//! trilinear <name>
//! problem <m> <k> <n>              (one per disjoint constituent)
//! rank <r>
//! A <q> <index> <coeff>
//! B <q> <index> <coeff>
//! D <q> <index> <coeff>
//! end
//!
//! apa <name>
//! problem <m> <k> <n>              (exactly the constituent list)
//! borderrank <r>
//! scale <s>
//! degree <d>
//! U <q> <index> <c0> [<c1> ...]    (integer lambda-poly, ascending)
//! V <q> <index> <c0> [<c1> ...]
//! W <q> <index> <c0> [<c1> ...]
//! end
//! ```
//!
//! Writers emit canonical ordering, so write -> parse -> write is the
//! identity on bytes.

use crate::aggregation::DisjointMMTarget;
use crate::apa::{ApaAlgorithm, PolyForm};
use crate::bilinear::{AlgTarget, BilinearAlgorithm, SparseVec};
use crate::error::{Error, Result};
use crate::lambda::LambdaPoly;
use crate::ring::Coeff;
use crate::tensor::{MmShape, TargetTensor};
use crate::trilinear::{TriTerm, TrilinearDecomposition};
use num_bigint::BigInt;
use num_traits::One;
use std::fmt::Write as _;
use std::str::FromStr;

fn write_coeff(c: &Coeff) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn parse_coeff(tok: &str, line: usize) -> Result<Coeff> {
    let parse_int = |s: &str| -> Result<BigInt> {
        BigInt::from_str(s).map_err(|_| Error::Parse {
            line,
            msg: format!("bad integer `{s}`"),
        })
    };
    match tok.split_once('/') {
        None => Ok(Coeff::from_integer(parse_int(tok)?)),
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den == BigInt::from(0) {
                return Err(Error::Parse {
                    line,
                    msg: "zero denominator".into(),
                });
            }
            Ok(Coeff::new(parse_int(n)?, den))
        }
    }
}

pub fn write_bilinear(alg: &BilinearAlgorithm) -> String {
    let mut out = String::new();
    writeln!(out, "bilinear {}", alg.name).unwrap();
    match &alg.target {
        AlgTarget::Mm(s) => writeln!(out, "target mm {} {} {}", s.m, s.k, s.n).unwrap(),
        AlgTarget::General(t) => {
            writeln!(out, "target general {} {} {}", t.dims_a, t.dims_b, t.dims_c).unwrap()
        }
    }
    writeln!(out, "rank {}", alg.rank()).unwrap();
    for (tag, rows) in [
        ("U", alg.u_rows()),
        ("V", alg.v_rows()),
        ("W", alg.w_rows()),
    ] {
        for (q, row) in rows.iter().enumerate() {
            for (idx, c) in row {
                writeln!(out, "{tag} {q} {idx} {}", write_coeff(c)).unwrap();
            }
        }
    }
    if let AlgTarget::General(t) = &alg.target {
        for ((a, b, c), v) in t.iter() {
            writeln!(out, "tensor {a} {b} {c} {}", write_coeff(v)).unwrap();
        }
    }
    out.push_str("end\n");
    out
}

pub fn write_trilinear(tri: &TrilinearDecomposition) -> String {
    let mut out = String::new();
    writeln!(out, "trilinear {}", tri.name).unwrap();
    for p in &tri.problems {
        writeln!(out, "problem {} {} {}", p.m, p.k, p.n).unwrap();
    }
    writeln!(out, "rank {}", tri.rank()).unwrap();
    for (q, term) in tri.terms().iter().enumerate() {
        for (tag, form) in [("A", &term.a), ("B", &term.b), ("D", &term.d)] {
            for (idx, c) in form {
                writeln!(out, "{tag} {q} {idx} {}", write_coeff(c)).unwrap();
            }
        }
    }
    out.push_str("end\n");
    out
}

pub fn write_apa(alg: &ApaAlgorithm) -> String {
    let mut out = String::new();
    writeln!(out, "apa {}", alg.name).unwrap();
    for p in alg.target.problems() {
        writeln!(out, "problem {} {} {}", p.m, p.k, p.n).unwrap();
    }
    writeln!(out, "borderrank {}", alg.border_rank()).unwrap();
    writeln!(out, "scale {}", alg.scale).unwrap();
    writeln!(out, "degree {}", alg.degree).unwrap();
    for (tag, rows) in [
        ("U", alg.u_rows()),
        ("V", alg.v_rows()),
        ("W", alg.w_rows()),
    ] {
        for (q, row) in rows.iter().enumerate() {
            let mut sorted: Vec<_> = row.clone();
            sorted.sort_by_key(|(i, _)| *i);
            for (idx, poly) in sorted {
                let coeffs = if poly.is_zero() {
                    "0".to_string()
                } else {
                    poly.coeffs()
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                writeln!(out, "{tag} {q} {idx} {coeffs}").unwrap();
            }
        }
    }
    out.push_str("end\n");
    out
}

/// Any of the three serializable objects.
#[derive(Debug, Clone)]
pub enum Document {
    Bilinear(BilinearAlgorithm),
    Trilinear(TrilinearDecomposition),
    Apa(ApaAlgorithm),
}

pub fn write_document(doc: &Document) -> String {
    match doc {
        Document::Bilinear(a) => write_bilinear(a),
        Document::Trilinear(t) => write_trilinear(t),
        Document::Apa(a) => write_apa(a),
    }
}

struct Lines<'a> {
    toks: Vec<(usize, Vec<&'a str>)>,
    at: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let toks = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, t)| !t.is_empty() && !t[0].starts_with('#'))
            .collect();
        Self { toks, at: 0 }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.toks.get(self.at)
    }

    fn next(&mut self) -> Option<&(usize, Vec<&'a str>)> {
        let item = self.toks.get(self.at);
        self.at += 1;
        item
    }
}

fn expect_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected a nonnegative integer, got `{tok}`"),
    })
}

/// Parses one document. Parsed bilinear algorithms are unverified; run
/// `verify` before trusting them.
pub fn parse_document(text: &str) -> Result<Document> {
    let mut lines = Lines::new(text);
    let (line, head) = lines
        .peek()
        .map(|(l, t)| (*l, t.clone()))
        .ok_or(Error::Parse {
            line: 0,
            msg: "empty file".into(),
        })?;
    match head[0] {
        "bilinear" => parse_bilinear(&mut lines).map(Document::Bilinear),
        "trilinear" => parse_trilinear(&mut lines).map(Document::Trilinear),
        "apa" => parse_apa(&mut lines).map(Document::Apa),
        other => Err(Error::Parse {
            line,
            msg: format!("unknown document kind `{other}`"),
        }),
    }
}

fn header_name(toks: &[&str], line: usize, kind: &str) -> Result<String> {
    if toks.len() != 2 {
        return Err(Error::Parse {
            line,
            msg: format!("`{kind}` header takes exactly one name token"),
        });
    }
    Ok(toks[1].to_string())
}

fn parse_bilinear(lines: &mut Lines) -> Result<BilinearAlgorithm> {
    let (line, toks) = lines.next().map(|(l, t)| (*l, t.clone())).unwrap();
    let name = header_name(&toks, line, "bilinear")?;

    let (line, toks) = lines
        .next()
        .map(|(l, t)| (*l, t.clone()))
        .ok_or(Error::Parse {
            line,
            msg: "missing target line".into(),
        })?;
    if toks.len() != 5 || toks[0] != "target" {
        return Err(Error::Parse {
            line,
            msg: "expected `target mm|general <d> <d> <d>`".into(),
        });
    }
    let d0 = expect_usize(toks[2], line)?;
    let d1 = expect_usize(toks[3], line)?;
    let d2 = expect_usize(toks[4], line)?;
    let is_mm = match toks[1] {
        "mm" => true,
        "general" => false,
        other => {
            return Err(Error::Parse {
                line,
                msg: format!("unknown target kind `{other}`"),
            })
        }
    };

    let (line, toks) = lines
        .next()
        .map(|(l, t)| (*l, t.clone()))
        .ok_or(Error::Parse {
            line,
            msg: "missing rank line".into(),
        })?;
    if toks.len() != 2 || toks[0] != "rank" {
        return Err(Error::Parse {
            line,
            msg: "expected `rank <r>`".into(),
        });
    }
    let rank = expect_usize(toks[1], line)?;

    let mut u = vec![SparseVec::new(); rank];
    let mut v = vec![SparseVec::new(); rank];
    let mut w = vec![SparseVec::new(); rank];
    let mut tensor = TargetTensor::new(d0, d1, d2);
    loop {
        let (line, toks) = lines
            .next()
            .map(|(l, t)| (*l, t.clone()))
            .ok_or(Error::Parse {
                line: 0,
                msg: "missing `end`".into(),
            })?;
        match toks[0] {
            "end" => break,
            tag @ ("U" | "V" | "W") => {
                if toks.len() != 4 {
                    return Err(Error::Parse {
                        line,
                        msg: format!("`{tag}` lines take `q index coeff`"),
                    });
                }
                let q = expect_usize(toks[1], line)?;
                if q >= rank {
                    return Err(Error::Parse {
                        line,
                        msg: format!("product index {q} outside rank {rank}"),
                    });
                }
                let idx = expect_usize(toks[2], line)?;
                let c = parse_coeff(toks[3], line)?;
                match tag {
                    "U" => u[q].push((idx, c)),
                    "V" => v[q].push((idx, c)),
                    _ => w[q].push((idx, c)),
                }
            }
            "tensor" => {
                if is_mm {
                    return Err(Error::Parse {
                        line,
                        msg: "tensor lines are only valid for general targets".into(),
                    });
                }
                if toks.len() != 5 {
                    return Err(Error::Parse {
                        line,
                        msg: "`tensor` lines take `a b c coeff`".into(),
                    });
                }
                tensor.accumulate(
                    expect_usize(toks[1], line)?,
                    expect_usize(toks[2], line)?,
                    expect_usize(toks[3], line)?,
                    parse_coeff(toks[4], line)?,
                );
            }
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unexpected line `{other}`"),
                })
            }
        }
    }
    let target = if is_mm {
        AlgTarget::Mm(MmShape::new(d0, d1, d2))
    } else {
        AlgTarget::General(tensor)
    };
    BilinearAlgorithm::new(name, target, u, v, w)
}

fn parse_trilinear(lines: &mut Lines) -> Result<TrilinearDecomposition> {
    let (line, toks) = lines.next().map(|(l, t)| (*l, t.clone())).unwrap();
    let name = header_name(&toks, line, "trilinear")?;
    let mut problems = Vec::new();
    while let Some((line, toks)) = lines.peek().map(|(l, t)| (*l, t.clone())) {
        if toks[0] != "problem" {
            break;
        }
        lines.next();
        if toks.len() != 4 {
            return Err(Error::Parse {
                line,
                msg: "`problem` lines take `m k n`".into(),
            });
        }
        problems.push(MmShape::new(
            expect_usize(toks[1], line)?,
            expect_usize(toks[2], line)?,
            expect_usize(toks[3], line)?,
        ));
    }
    if problems.is_empty() {
        return Err(Error::Parse {
            line,
            msg: "trilinear document needs at least one problem".into(),
        });
    }
    let (line, toks) = lines
        .next()
        .map(|(l, t)| (*l, t.clone()))
        .ok_or(Error::Parse {
            line,
            msg: "missing rank line".into(),
        })?;
    if toks.len() != 2 || toks[0] != "rank" {
        return Err(Error::Parse {
            line,
            msg: "expected `rank <r>`".into(),
        });
    }
    let rank = expect_usize(toks[1], line)?;
    let mut a = vec![SparseVec::new(); rank];
    let mut b = vec![SparseVec::new(); rank];
    let mut d = vec![SparseVec::new(); rank];
    loop {
        let (line, toks) = lines
            .next()
            .map(|(l, t)| (*l, t.clone()))
            .ok_or(Error::Parse {
                line: 0,
                msg: "missing `end`".into(),
            })?;
        match toks[0] {
            "end" => break,
            tag @ ("A" | "B" | "D") => {
                if toks.len() != 4 {
                    return Err(Error::Parse {
                        line,
                        msg: format!("`{tag}` lines take `q index coeff`"),
                    });
                }
                let q = expect_usize(toks[1], line)?;
                if q >= rank {
                    return Err(Error::Parse {
                        line,
                        msg: format!("term index {q} outside rank {rank}"),
                    });
                }
                let idx = expect_usize(toks[2], line)?;
                let c = parse_coeff(toks[3], line)?;
                match tag {
                    "A" => a[q].push((idx, c)),
                    "B" => b[q].push((idx, c)),
                    _ => d[q].push((idx, c)),
                }
            }
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unexpected line `{other}`"),
                })
            }
        }
    }
    let terms = a
        .into_iter()
        .zip(b)
        .zip(d)
        .map(|((a, b), d)| TriTerm::new(a, b, d))
        .collect();
    Ok(TrilinearDecomposition::new(name, problems, terms))
}

fn parse_apa(lines: &mut Lines) -> Result<ApaAlgorithm> {
    let (line, toks) = lines.next().map(|(l, t)| (*l, t.clone())).unwrap();
    let name = header_name(&toks, line, "apa")?;
    let mut problems = Vec::new();
    while let Some((line, toks)) = lines.peek().map(|(l, t)| (*l, t.clone())) {
        if toks[0] != "problem" {
            break;
        }
        lines.next();
        if toks.len() != 4 {
            return Err(Error::Parse {
                line,
                msg: "`problem` lines take `m k n`".into(),
            });
        }
        problems.push(MmShape::new(
            expect_usize(toks[1], line)?,
            expect_usize(toks[2], line)?,
            expect_usize(toks[3], line)?,
        ));
    }
    let mut border_rank = None;
    let mut scale: Option<i64> = None;
    let mut degree: Option<usize> = None;
    for _ in 0..3 {
        let (line, toks) = lines
            .next()
            .map(|(l, t)| (*l, t.clone()))
            .ok_or(Error::Parse {
                line,
                msg: "missing apa header lines".into(),
            })?;
        match toks[0] {
            "borderrank" => border_rank = Some(expect_usize(toks[1], line)?),
            "scale" => {
                scale = Some(toks[1].parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad scale `{}`", toks[1]),
                })?)
            }
            "degree" => degree = Some(expect_usize(toks[1], line)?),
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unexpected apa header `{other}`"),
                })
            }
        }
    }
    let rank = border_rank.ok_or(Error::Parse {
        line,
        msg: "missing borderrank".into(),
    })?;
    let scale = scale.ok_or(Error::Parse {
        line,
        msg: "missing scale".into(),
    })?;
    let _stated_degree = degree;
    let mut u = vec![PolyForm::new(); rank];
    let mut v = vec![PolyForm::new(); rank];
    let mut w = vec![PolyForm::new(); rank];
    loop {
        let (line, toks) = lines
            .next()
            .map(|(l, t)| (*l, t.clone()))
            .ok_or(Error::Parse {
                line: 0,
                msg: "missing `end`".into(),
            })?;
        match toks[0] {
            "end" => break,
            tag @ ("U" | "V" | "W") => {
                if toks.len() < 4 {
                    return Err(Error::Parse {
                        line,
                        msg: format!("`{tag}` lines take `q index c0 [c1 ...]`"),
                    });
                }
                let q = expect_usize(toks[1], line)?;
                if q >= rank {
                    return Err(Error::Parse {
                        line,
                        msg: format!("product index {q} outside border rank {rank}"),
                    });
                }
                let idx = expect_usize(toks[2], line)?;
                let coeffs = toks[3..]
                    .iter()
                    .map(|t| {
                        BigInt::from_str(t).map_err(|_| Error::Parse {
                            line,
                            msg: format!("bad integer `{t}`"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let poly = LambdaPoly::from_coeffs(coeffs);
                match tag {
                    "U" => u[q].push((idx, poly)),
                    "V" => v[q].push((idx, poly)),
                    _ => w[q].push((idx, poly)),
                }
            }
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unexpected line `{other}`"),
                })
            }
        }
    }
    ApaAlgorithm::from_parts(name, DisjointMMTarget::new(problems), u, v, w, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregation::{aggregate_three, aggregate_two};
    use crate::apa::apa_aggregate;
    use crate::catalog;

    fn roundtrip(doc: &Document) {
        let text = write_document(doc);
        let parsed = parse_document(&text).unwrap();
        let again = write_document(&parsed);
        assert_eq!(text, again, "round-trip must be bit-exact");
    }

    #[test]
    fn bilinear_roundtrips() {
        roundtrip(&Document::Bilinear(catalog::strassen()));
        roundtrip(&Document::Bilinear(catalog::winograd_mm2()));
        roundtrip(&Document::Bilinear(catalog::complex_mult()));
        roundtrip(&Document::Bilinear(catalog::straightforward(2, 3, 1)));
    }

    #[test]
    fn parsed_strassen_verifies() {
        let text = write_bilinear(&catalog::strassen());
        let Document::Bilinear(mut alg) = parse_document(&text).unwrap() else {
            panic!("wrong kind");
        };
        assert!(!alg.is_verified());
        assert!(alg.verify().is_verified());
    }

    #[test]
    fn trilinear_roundtrips() {
        roundtrip(&Document::Trilinear(aggregate_two(2, 1, 2).unwrap()));
        roundtrip(&Document::Trilinear(
            aggregate_three(2).unwrap().decomposition,
        ));
    }

    #[test]
    fn apa_roundtrips() {
        roundtrip(&Document::Apa(apa_aggregate(2, 1, 2).unwrap()));
        roundtrip(&Document::Apa(apa_aggregate(1, 1, 1).unwrap()));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "bilinear x\ntarget mm 2 2 2\nrank 1\nU 0 zebra 1\nend\n";
        match parse_document(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        let bad = "bilinear x\ntarget mm 2 2 2\nrank 1\nU 3 0 1\nend\n";
        match parse_document(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
