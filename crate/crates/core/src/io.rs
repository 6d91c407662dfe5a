//! Plain-text bundle formats: `.sgp` multiplication tables, `.tsm`
//! twisted-module bundles, `.tpa` twisted-partial-action bundles and
//! `.ext` extension bundles. `#` starts a comment anywhere; tokens are
//! whitespace-separated.

use crate::clifford::{certify_clifford, CliffordAlgebra, Multiplier};
use crate::error::{Error, Result};
use crate::paction::{ExtensionByG, FiniteGroup, TwistedPartialAction, WPair};
use crate::semigroup::{inverse_structure, FiniteSemigroup, InverseSemigroup};
use crate::tmodule::{ExtensionByS, TwistedModule};
use std::fmt::Write as _;

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .map(|l| {
                let l = l.split('#').next().unwrap_or("");
                l.trim()
            })
            .filter(|l| !l.is_empty())
            .collect();
        Lines { lines, pos: 0 }
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Result<&'a str> {
        let l = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::MalformedInput("unexpected end of input".into()))?;
        self.pos += 1;
        Ok(l)
    }
}

fn parse_usizes(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::MalformedInput(format!("expected an integer, got '{tok}'")))
        })
        .collect()
}

/// A pair token "a->b" (the arrow may also be written with the unicode
/// glyph).
fn parse_pair(tok: &str) -> Result<(usize, usize)> {
    let (l, r) = tok
        .split_once("->")
        .or_else(|| tok.split_once('\u{2192}'))
        .ok_or_else(|| Error::MalformedInput(format!("expected a pair 'a->b', got '{tok}'")))?;
    Ok((
        l.trim()
            .parse()
            .map_err(|_| Error::MalformedInput(format!("bad pair '{tok}'")))?,
        r.trim()
            .parse()
            .map_err(|_| Error::MalformedInput(format!("bad pair '{tok}'")))?,
    ))
}

fn parse_sgp_block(lines: &mut Lines) -> Result<FiniteSemigroup> {
    let first = parse_usizes(lines.next()?)?;
    if first.len() != 1 {
        return Err(Error::MalformedInput(
            "expected the element count on a line of its own".into(),
        ));
    }
    let n = first[0];
    let mut table = Vec::with_capacity(n * n);
    for _ in 0..n {
        let row = parse_usizes(lines.next()?)?;
        if row.len() != n {
            return Err(Error::MalformedInput(format!(
                "expected {n} entries per row, got {}",
                row.len()
            )));
        }
        table.extend(row);
    }
    FiniteSemigroup::new(n, table)
}

/// Parses a `.sgp` table: optional comments, the element count, then
/// n rows of n entries. Associativity is verified.
pub fn parse_sgp(text: &str) -> Result<FiniteSemigroup> {
    let mut lines = Lines::new(text);
    let s = parse_sgp_block(&mut lines)?;
    if lines.peek().is_some() {
        return Err(Error::MalformedInput("trailing content after the table".into()));
    }
    Ok(s)
}

pub fn write_sgp(s: &FiniteSemigroup) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", s.n());
    for i in s.elements() {
        let row: Vec<String> = s.elements().map(|j| s.mul(i, j).to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

fn expect_section(lines: &mut Lines, name: &str) -> Result<()> {
    let l = lines.next()?;
    if l != name {
        return Err(Error::MalformedInput(format!(
            "expected section '{name}', got '{l}'"
        )));
    }
    Ok(())
}

/// Parses a `.tsm` bundle: S and A tables, the ALPHA pairing, the
/// LAMBDA endomorphism tables and the F twist table; the result passes
/// full module verification.
pub fn parse_tsm(text: &str) -> Result<TwistedModule> {
    let mut lines = Lines::new(text);
    expect_section(&mut lines, "S")?;
    let s_table = parse_sgp_block(&mut lines)?;
    expect_section(&mut lines, "A")?;
    let a_table = parse_sgp_block(&mut lines)?;
    let s = inverse_structure(&s_table)?;
    let a = certify_clifford(&inverse_structure(&a_table)?)?;
    expect_section(&mut lines, "ALPHA")?;
    let mut alpha = vec![usize::MAX; s.n()];
    for tok in lines.next()?.split_whitespace() {
        let (e, img) = parse_pair(tok)?;
        if e >= s.n() || !s.is_idempotent(e) {
            return Err(Error::MalformedInput(format!(
                "alpha index {e} is not an idempotent of S"
            )));
        }
        alpha[e] = img;
    }
    if s.idempotents().iter().any(|&e| alpha[e] == usize::MAX) {
        return Err(Error::MalformedInput("alpha does not cover E(S)".into()));
    }
    expect_section(&mut lines, "LAMBDA")?;
    let mut lambda = Vec::with_capacity(s.n());
    for _ in s.elements() {
        let row = parse_usizes(lines.next()?)?;
        if row.len() != a.n() {
            return Err(Error::MalformedInput("lambda row has wrong length".into()));
        }
        lambda.push(row);
    }
    expect_section(&mut lines, "F")?;
    let mut f = Vec::with_capacity(s.n());
    for _ in s.elements() {
        let row = parse_usizes(lines.next()?)?;
        if row.len() != s.n() {
            return Err(Error::MalformedInput("f row has wrong length".into()));
        }
        f.push(row);
    }
    TwistedModule::verify(s, a, alpha, lambda, f)
}

pub fn write_tsm(m: &TwistedModule) -> String {
    let mut out = String::new();
    out.push_str("S\n");
    out.push_str(&write_sgp(m.s.base()));
    out.push_str("A\n");
    out.push_str(&write_sgp(m.a.base().base()));
    out.push_str("ALPHA\n");
    let pairs: Vec<String> = m
        .s
        .idempotents()
        .iter()
        .map(|&e| format!("{}->{}", e, m.alpha[e]))
        .collect();
    let _ = writeln!(out, "{}", pairs.join(" "));
    out.push_str("LAMBDA\n");
    for row in &m.lambda {
        let toks: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", toks.join(" "));
    }
    out.push_str("F\n");
    for row in &m.f {
        let toks: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", toks.join(" "));
    }
    out
}

/// Parses a `.tpa` bundle: the group and algebra tables, per-element
/// DOMAIN and THETA lines, and W blocks for the twist (missing W blocks
/// default to the identity multiplier). The result passes the full
/// axiom battery.
pub fn parse_tpa(text: &str) -> Result<TwistedPartialAction> {
    let mut lines = Lines::new(text);
    expect_section(&mut lines, "GROUP")?;
    let g = FiniteGroup::new(parse_sgp_block(&mut lines)?)?;
    expect_section(&mut lines, "ALGEBRA")?;
    let a = certify_clifford(&inverse_structure(&parse_sgp_block(&mut lines)?)?)?;
    let mut domains: Vec<Option<Vec<usize>>> = vec![None; g.n()];
    let mut theta: Vec<Option<Vec<usize>>> = vec![None; g.n()];
    let mut w_lines: Vec<Vec<Option<(Vec<usize>, Vec<usize>)>>> = vec![vec![None; g.n()]; g.n()];
    while let Some(line) = lines.peek() {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("DOMAIN") => {
                let line = lines.next()?;
                let rest = line.strip_prefix("DOMAIN").unwrap();
                let (xs, elems) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::MalformedInput("DOMAIN line without ':'".into()))?;
                let x: usize = xs
                    .trim()
                    .parse()
                    .map_err(|_| Error::MalformedInput("bad DOMAIN index".into()))?;
                if x >= g.n() {
                    return Err(Error::MalformedInput(format!("DOMAIN index {x} out of range")));
                }
                let mut elems = parse_usizes(elems)?;
                elems.sort_unstable();
                domains[x] = Some(elems);
            }
            Some("THETA") => {
                let line = lines.next()?;
                let rest = line.strip_prefix("THETA").unwrap();
                let (xs, pairs) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::MalformedInput("THETA line without ':'".into()))?;
                let x: usize = xs
                    .trim()
                    .parse()
                    .map_err(|_| Error::MalformedInput("bad THETA index".into()))?;
                if x >= g.n() {
                    return Err(Error::MalformedInput(format!("THETA index {x} out of range")));
                }
                let mut row = vec![usize::MAX; a.n()];
                for tok in pairs.split_whitespace() {
                    let (src, dst) = parse_pair(tok)?;
                    if src >= a.n() || dst >= a.n() {
                        return Err(Error::MalformedInput(format!(
                            "THETA pair {src}->{dst} out of range"
                        )));
                    }
                    row[src] = dst;
                }
                theta[x] = Some(row);
            }
            Some("W") => {
                let line = lines.next()?;
                let rest = line.strip_prefix('W').unwrap();
                let head = rest
                    .strip_suffix(':')
                    .ok_or_else(|| Error::MalformedInput("W line must end with ':'".into()))?;
                let idx = parse_usizes(head)?;
                if idx.len() != 2 || idx[0] >= g.n() || idx[1] >= g.n() {
                    return Err(Error::MalformedInput("bad W indices".into()));
                }
                let left = parse_usizes(lines.next()?)?;
                let right = parse_usizes(lines.next()?)?;
                w_lines[idx[0]][idx[1]] = Some((left, right));
            }
            _ => {
                return Err(Error::MalformedInput(format!(
                    "unrecognized line '{line}'"
                )))
            }
        }
    }
    let domains: Vec<Vec<usize>> = domains
        .into_iter()
        .enumerate()
        .map(|(x, d)| d.ok_or_else(|| Error::MalformedInput(format!("missing DOMAIN {x}"))))
        .collect::<Result<_>>()?;
    let theta: Vec<Vec<usize>> = theta
        .into_iter()
        .enumerate()
        .map(|(x, t)| t.ok_or_else(|| Error::MalformedInput(format!("missing THETA {x}"))))
        .collect::<Result<_>>()?;
    let mut w = Vec::with_capacity(g.n());
    for x in g.elements() {
        let mut row = Vec::with_capacity(g.n());
        for y in g.elements() {
            let dom = a.set_product(&domains[x], &domains[g.mul(x, y)]);
            let wp = match w_lines[x][y].take() {
                None => WPair::identity(dom),
                Some((left, right)) => {
                    if left.len() != dom.len() || right.len() != dom.len() {
                        return Err(Error::MalformedInput(format!(
                            "W {x} {y} maps must have {} entries",
                            dom.len()
                        )));
                    }
                    WPair::from_multiplier(&a, Multiplier::new(dom, left, right))?
                }
            };
            row.push(wp);
        }
        w.push(row);
    }
    TwistedPartialAction::verify(g, a, domains, theta, w)
}

pub fn write_tpa(tpa: &TwistedPartialAction) -> String {
    let mut out = String::new();
    out.push_str("GROUP\n");
    out.push_str(&write_sgp(tpa.group.base()));
    out.push_str("ALGEBRA\n");
    out.push_str(&write_sgp(tpa.algebra.base().base()));
    for x in tpa.group.elements() {
        let toks: Vec<String> = tpa.domains[x].iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "DOMAIN {x}: {}", toks.join(" "));
    }
    for x in tpa.group.elements() {
        let xi = tpa.group.inv(x);
        let pairs: Vec<String> = tpa.domains[xi]
            .iter()
            .map(|&v| format!("{}->{}", v, tpa.th(x, v)))
            .collect();
        let _ = writeln!(out, "THETA {x}: {}", pairs.join(" "));
    }
    for x in tpa.group.elements() {
        for y in tpa.group.elements() {
            let wp = &tpa.w[x][y];
            if wp.w.is_identity() {
                continue;
            }
            let _ = writeln!(out, "W {x} {y}:");
            let left: Vec<String> = wp.w.left_table().iter().map(|v| v.to_string()).collect();
            let right: Vec<String> = wp.w.right_table().iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", left.join(" "));
            let _ = writeln!(out, "{}", right.join(" "));
        }
    }
    out
}

/// An extension bundle: by an inverse semigroup when Q has more than
/// one idempotent, by a group otherwise.
pub enum ExtBundle {
    ByS(ExtensionByS),
    ByG(ExtensionByG),
}

/// Parses an `.ext` bundle: A, U, Q tables plus the I and J map lines.
pub fn parse_ext(text: &str) -> Result<ExtBundle> {
    let mut lines = Lines::new(text);
    expect_section(&mut lines, "A")?;
    let a = certify_clifford(&inverse_structure(&parse_sgp_block(&mut lines)?)?)?;
    expect_section(&mut lines, "U")?;
    let u = inverse_structure(&parse_sgp_block(&mut lines)?)?;
    expect_section(&mut lines, "Q")?;
    let q = parse_sgp_block(&mut lines)?;
    let iline = lines.next()?;
    let i = parse_usizes(
        iline
            .strip_prefix("I:")
            .ok_or_else(|| Error::MalformedInput("expected the I: map line".into()))?,
    )?;
    let jline = lines.next()?;
    let j = parse_usizes(
        jline
            .strip_prefix("J:")
            .ok_or_else(|| Error::MalformedInput("expected the J: map line".into()))?,
    )?;
    if q.idempotents().len() == 1 {
        let g = FiniteGroup::new(q)?;
        Ok(ExtBundle::ByG(ExtensionByG::new(a, u, g, i, j)?))
    } else {
        let s = inverse_structure(&q)?;
        Ok(ExtBundle::ByS(ExtensionByS::new(a, u, s, i, j)?))
    }
}

pub fn write_ext_s(ext: &ExtensionByS) -> String {
    write_ext_parts(ext.a.base().base(), ext.u.base(), ext.s.base(), &ext.i, &ext.j)
}

pub fn write_ext_g(ext: &ExtensionByG) -> String {
    write_ext_parts(
        ext.a.base().base(),
        ext.u.base(),
        ext.g.base(),
        &ext.i,
        &ext.j,
    )
}

fn write_ext_parts(
    a: &FiniteSemigroup,
    u: &FiniteSemigroup,
    q: &FiniteSemigroup,
    i: &[usize],
    j: &[usize],
) -> String {
    let mut out = String::new();
    out.push_str("A\n");
    out.push_str(&write_sgp(a));
    out.push_str("U\n");
    out.push_str(&write_sgp(u));
    out.push_str("Q\n");
    out.push_str(&write_sgp(q));
    let itoks: Vec<String> = i.iter().map(|v| v.to_string()).collect();
    let jtoks: Vec<String> = j.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "I: {}", itoks.join(" "));
    let _ = writeln!(out, "J: {}", jtoks.join(" "));
    out
}

/// Convenience: an inverse semigroup straight from `.sgp` text.
pub fn parse_inverse(text: &str) -> Result<InverseSemigroup> {
    inverse_structure(&parse_sgp(text)?)
}

/// Convenience: a certified Clifford algebra straight from `.sgp` text.
pub fn parse_clifford(text: &str) -> Result<CliffordAlgebra> {
    certify_clifford(&parse_inverse(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::paction::{e2_z2_partial, z2_on_z2};
    use crate::tmodule::idempotent_module;

    #[test]
    fn sgp_examples_from_the_format_notes() {
        let e2 = parse_sgp("2\n0 1\n1 1\n").unwrap();
        assert_eq!(e2, instances::e2());
        let z2 = parse_sgp("# a comment\n2\n0 1\n1 0\n").unwrap();
        assert_eq!(z2, instances::z2());
        let band = parse_sgp("2\n0 1\n0 1\n").unwrap();
        assert!(inverse_structure(&band).is_err());
    }

    #[test]
    fn sgp_rejects_malformed_tables() {
        assert!(matches!(parse_sgp("2\n0 1\n"), Err(Error::MalformedInput(_))));
        assert!(matches!(
            parse_sgp("2\n0 5\n1 1\n"),
            Err(Error::MalformedInput(_))
        ));
        // left near-semigroup failing associativity
        let bad = "3\n0 0 0\n2 2 2\n1 1 1\n";
        assert!(matches!(parse_sgp(bad), Err(Error::NotAssociative(..))));
    }

    #[test]
    fn sgp_roundtrip() {
        for s in [instances::e2(), instances::i2(), instances::b2()] {
            assert_eq!(parse_sgp(&write_sgp(&s)).unwrap(), s);
        }
    }

    #[test]
    fn tsm_roundtrip() {
        let a = crate::clifford::certify_clifford(
            &inverse_structure(&instances::three_element_clifford()).unwrap(),
        )
        .unwrap();
        let m = idempotent_module(&a).unwrap();
        let text = write_tsm(&m);
        let back = parse_tsm(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn tpa_roundtrip() {
        for tpa in [e2_z2_partial(), z2_on_z2(true)] {
            let text = write_tpa(&tpa);
            let back = parse_tpa(&text).unwrap();
            assert_eq!(back, tpa);
        }
    }

    #[test]
    fn ext_roundtrip_by_g() {
        let cp = crate::paction::crossed_product_action(&e2_z2_partial()).unwrap();
        let text = write_ext_g(&cp.ext);
        match parse_ext(&text).unwrap() {
            ExtBundle::ByG(ext) => {
                assert_eq!(ext.u.n(), cp.ext.u.n());
                assert_eq!(ext.i, cp.ext.i);
                assert_eq!(ext.j, cp.ext.j);
            }
            _ => panic!("expected a by-group bundle"),
        }
    }
}
