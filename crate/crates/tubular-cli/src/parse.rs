//! Parser for the object-expression grammar and the geometry header.
//!
//! Objects:  `O(<lexpr>)`, `T(<slope>;<tube>;<socle>;<len>)`,
//!           `prufer(<slope>;<tube>;<socle>)`, `adic(<slope>;<tube>;<top>)`,
//!           `generic(<slope>)`; sums with `+`, repetition with `n*`,
//!           the zero object `0`.
//! lexpr:    signed sums of `c` and `x<i>` with integer coefficients.
//! slope:    `inf`, an integer, or `d/r` (reduced on input, `r < 0`
//!           rejected).
//! tube:     `e<i>` for an arm, `o:<label>` for a declared ordinary point.
//! header:   `weights=(2,2,2,2); ordinary=a,b,c` (the ordinary part may
//!           be empty or absent).

use std::fmt;
use tubular::geometry::{make_geometry, Geometry, PointId};
use tubular::homext::{FormalObject, IndecDescriptor};
use tubular::slope::Slope;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownTube(String),
    SlopeParse(String),
    Geometry(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match &self.kind {
            ParseErrorKind::Syntax(m) => format!("syntax error: {m}"),
            ParseErrorKind::UnknownTube(m) => format!("unknown tube: {m}"),
            ParseErrorKind::SlopeParse(m) => format!("bad slope: {m}"),
            ParseErrorKind::Geometry(m) => format!("bad geometry: {m}"),
        };
        write!(f, "at byte {}: {}", self.pos, what)
    }
}

impl std::error::Error for ParseError {}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos,
            kind,
        })
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        self.err(ParseErrorKind::Syntax(msg.into()))
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.syntax(format!("expected `{token}`"))
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut chars = self.rest().char_indices().peekable();
        let mut len = 0usize;
        if let Some((_, '-')) = chars.peek() {
            chars.next();
            len = 1;
        }
        while let Some((i, c)) = chars.peek() {
            if c.is_ascii_digit() {
                len = i + 1;
                chars.next();
            } else {
                break;
            }
        }
        let text = &self.src[start..start + len];
        if text.is_empty() || text == "-" {
            return self.syntax("expected an integer");
        }
        self.pos = start + len;
        text.parse::<i64>()
            .map_err(|_| ParseError {
                pos: start,
                kind: ParseErrorKind::Syntax(format!("integer `{text}` out of range")),
            })
    }

    fn label(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut end = start;
        for (i, c) in self.rest().char_indices() {
            let ok = if i == 0 {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_'
            };
            if ok {
                end = start + i + c.len_utf8();
            } else {
                break;
            }
        }
        if end == start {
            return self.syntax("expected a label");
        }
        self.pos = end;
        Ok(&self.src[start..end])
    }
}

/// Parses `weights=(…); ordinary=a,b` into a validated geometry.
pub fn parse_geometry(header: &str) -> Result<Geometry, ParseError> {
    let mut c = Cursor::new(header);
    c.expect("weights")?;
    c.expect("=")?;
    c.expect("(")?;
    let mut weights = Vec::new();
    loop {
        let w = c.integer()?;
        if !(2..=6).contains(&w) {
            return c.err(ParseErrorKind::Geometry(format!("weight {w} out of range")));
        }
        weights.push(w as u32);
        if c.eat(",") {
            continue;
        }
        c.expect(")")?;
        break;
    }
    let mut labels: Vec<String> = Vec::new();
    if c.eat(";") && c.eat("ordinary") {
        c.expect("=")?;
        while c.peek().is_some_and(|ch| ch.is_ascii_alphabetic() || ch == '_') {
            labels.push(c.label()?.to_string());
            if !c.eat(",") {
                break;
            }
        }
    }
    if !c.at_end() {
        return c.syntax("trailing input in geometry header");
    }
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    make_geometry(&weights, &refs)
        .map_err(|e| ParseError {
            pos: 0,
            kind: ParseErrorKind::Geometry(e.to_string()),
        })
}

/// Parses a formal object expression against a fixed geometry.
pub fn parse_formal(src: &str, geo: &Geometry) -> Result<FormalObject, ParseError> {
    let mut c = Cursor::new(src);
    // the bare zero object
    {
        let save = c.pos;
        if c.eat("0") && c.at_end() {
            return Ok(FormalObject::zero());
        }
        c.pos = save;
    }
    let mut summands = Vec::new();
    loop {
        summands.push(parse_term(&mut c, geo)?);
        if c.eat("+") {
            continue;
        }
        break;
    }
    if !c.at_end() {
        return c.syntax("trailing input after object expression");
    }
    Ok(FormalObject::from_summands(summands))
}

fn parse_term(
    c: &mut Cursor<'_>,
    geo: &Geometry,
) -> Result<(IndecDescriptor, u64), ParseError> {
    let mut mult = 1u64;
    // optional `n*` prefix
    let save = c.pos;
    if c.peek().is_some_and(|ch| ch.is_ascii_digit()) {
        let n = c.integer()?;
        if c.eat("*") {
            if n <= 0 {
                return Err(ParseError {
                    pos: save,
                    kind: ParseErrorKind::Syntax("multiplicity must be positive".into()),
                });
            }
            mult = n as u64;
        } else {
            c.pos = save;
        }
    }
    let d = parse_indec(c, geo)?;
    Ok((d, mult))
}

fn parse_indec(c: &mut Cursor<'_>, geo: &Geometry) -> Result<IndecDescriptor, ParseError> {
    if c.eat("O") {
        c.expect("(")?;
        let x = parse_lexpr(c, geo)?;
        c.expect(")")?;
        return Ok(IndecDescriptor::LineBundle(x));
    }
    if c.eat("T") {
        c.expect("(")?;
        let slope = parse_slope(c)?;
        c.expect(";")?;
        let point = parse_tube(c, geo)?;
        c.expect(";")?;
        let socle = c.integer()?;
        c.expect(";")?;
        let len_pos = c.pos;
        let len = c.integer()?;
        c.expect(")")?;
        if len < 1 {
            return Err(ParseError {
                pos: len_pos,
                kind: ParseErrorKind::Syntax("length must be at least 1".into()),
            });
        }
        let d = geo.tube_rank(&point);
        return Ok(IndecDescriptor::Tube {
            slope,
            point,
            socle: socle.rem_euclid(d as i64) as usize,
            len: len as u32,
        });
    }
    if c.eat("prufer") {
        c.expect("(")?;
        let slope = parse_slope(c)?;
        c.expect(";")?;
        let point = parse_tube(c, geo)?;
        c.expect(";")?;
        let socle = c.integer()?;
        c.expect(")")?;
        let d = geo.tube_rank(&point);
        return Ok(IndecDescriptor::Pruefer {
            slope,
            point,
            socle: socle.rem_euclid(d as i64) as usize,
        });
    }
    if c.eat("adic") {
        c.expect("(")?;
        let slope = parse_slope(c)?;
        c.expect(";")?;
        let point = parse_tube(c, geo)?;
        c.expect(";")?;
        let top = c.integer()?;
        c.expect(")")?;
        let d = geo.tube_rank(&point);
        return Ok(IndecDescriptor::Adic {
            slope,
            point,
            top: top.rem_euclid(d as i64) as usize,
        });
    }
    if c.eat("generic") {
        c.expect("(")?;
        let slope = parse_slope(c)?;
        c.expect(")")?;
        return Ok(IndecDescriptor::Generic { slope });
    }
    c.syntax("expected an object: O(...), T(...), prufer(...), adic(...) or generic(...)")
}

fn parse_slope(c: &mut Cursor<'_>) -> Result<Slope, ParseError> {
    if c.eat("inf") {
        return Ok(Slope::INFINITY);
    }
    let pos = c.pos;
    let num = c.integer()?;
    if c.eat("/") {
        let den = c.integer()?;
        Slope::new(num, den).map_err(|e| ParseError {
            pos,
            kind: ParseErrorKind::SlopeParse(e.to_string()),
        })
    } else {
        Ok(Slope::from_int(num))
    }
}

fn parse_tube(c: &mut Cursor<'_>, geo: &Geometry) -> Result<PointId, ParseError> {
    let pos = c.pos;
    if c.eat("o") {
        c.expect(":")?;
        let label = c.label()?;
        let pt = PointId::Ordinary(label.to_string());
        if !geo.has_point(&pt) {
            return Err(ParseError {
                pos,
                kind: ParseErrorKind::UnknownTube(format!("ordinary label `{label}` not declared")),
            });
        }
        return Ok(pt);
    }
    if c.eat("e") {
        let i = c.integer()?;
        if i < 1 || i as usize > geo.arm_count() {
            return Err(ParseError {
                pos,
                kind: ParseErrorKind::UnknownTube(format!(
                    "arm index e{i} out of range 1..{}",
                    geo.arm_count()
                )),
            });
        }
        return Ok(PointId::Exceptional(i as usize));
    }
    c.syntax("expected a tube: e<i> or o:<label>")
}

fn parse_lexpr(c: &mut Cursor<'_>, geo: &Geometry) -> Result<tubular::LElement, ParseError> {
    let mut l = 0i64;
    let mut lambda = vec![0i64; geo.arm_count()];
    // a lone zero
    {
        let save = c.pos;
        if c.eat("0") {
            if c.peek() == Some(')') {
                return Ok(geo.lzero());
            }
            c.pos = save;
        }
    }
    let mut first = true;
    loop {
        c.skip_ws();
        let sign = if c.eat("-") {
            -1i64
        } else if c.eat("+") || first {
            1
        } else {
            break;
        };
        first = false;
        // optional coefficient
        let coeff = if c.peek().is_some_and(|ch| ch.is_ascii_digit()) {
            c.integer()?
        } else {
            1
        };
        if c.eat("c") {
            l += sign * coeff;
        } else if c.eat("x") {
            let ipos = c.pos;
            let i = c.integer()?;
            if i < 1 || i as usize > geo.arm_count() {
                return Err(ParseError {
                    pos: ipos,
                    kind: ParseErrorKind::Syntax(format!(
                        "arm index x{i} out of range 1..{}",
                        geo.arm_count()
                    )),
                });
            }
            lambda[i as usize - 1] += sign * coeff;
        } else {
            return c.syntax("expected `c` or `x<i>` in twist expression");
        }
        if c.peek() != Some('+') && c.peek() != Some('-') {
            break;
        }
    }
    Ok(geo.lnormalize(l, &lambda))
}

/// Parses a slope given as a standalone argument (`inf`, `2/3`, `-1`).
pub fn parse_slope_arg(src: &str) -> Result<Slope, ParseError> {
    let mut c = Cursor::new(src);
    let s = parse_slope(&mut c)?;
    if !c.at_end() {
        return c.syntax("trailing input after slope");
    }
    Ok(s)
}
