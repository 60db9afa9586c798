//! Walk files: flat `key = value` text with `#` comments, keys `q1`, `q2`,
//! `p`, `y0`. Values for `q1`/`q2` use a small expression grammar:
//!
//! ```text
//! expr     := sign? term (('+'|'-') term)*
//! term     := coeff? 'n' ('^' exponent)? | coeff
//! coeff    := decimal | decimal '/' decimal
//! exponent := positive decimal | fraction
//! ```
//!
//! Decimals parse to exact rationals (`0.99` is `99/100`), so coefficients
//! survive the trip into the analyzer unrounded.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use pastwalk_core::poly::{Rational, TermPoly};
use pastwalk_core::walk::WalkSpec;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("semantic error: {0}")]
    Semantic(String),
}

/// Textual encoding of a walk, as read from a walk file.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkDocument {
    pub q1: String,
    pub q2: String,
    pub p: String,
    pub y0: String,
}

/// Parses the flat key=value document.
pub fn parse_document(text: &str) -> Result<WalkDocument, ParseError> {
    let mut q1 = None;
    let mut q2 = None;
    let mut p = None;
    let mut y0 = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ParseError::Syntax {
                line: line_no,
                col: raw.len(),
                msg: "expected `key = value`".into(),
            });
        };
        let slot = match key.trim() {
            "q1" => &mut q1,
            "q2" => &mut q2,
            "p" => &mut p,
            "y0" => &mut y0,
            other => {
                return Err(ParseError::Syntax {
                    line: line_no,
                    col: raw.find(other).map_or(1, |c| c + 1),
                    msg: format!("unknown key `{other}` (expected q1, q2, p, y0)"),
                })
            }
        };
        if slot.is_some() {
            return Err(ParseError::Syntax {
                line: line_no,
                col: 1,
                msg: format!("duplicate key `{}`", key.trim()),
            });
        }
        *slot = Some((value.trim().to_string(), line_no));
    }
    let need = |opt: Option<(String, usize)>, name: &str| {
        opt.map(|(v, _)| v)
            .ok_or_else(|| ParseError::Semantic(format!("missing key `{name}`")))
    };
    Ok(WalkDocument {
        q1: need(q1, "q1")?,
        q2: need(q2, "q2")?,
        p: need(p, "p")?,
        y0: need(y0, "y0")?,
    })
}

/// Turns a parsed document into an exact-coefficient walk.
pub fn parse_walk(doc: &WalkDocument) -> Result<WalkSpec, ParseError> {
    let q1 = parse_expr(&doc.q1, 1)?;
    let q2 = parse_expr(&doc.q2, 1)?;
    let p = parse_scalar(&doc.p, "p")?;
    let y0 = parse_scalar(&doc.y0, "y0")?;
    if p <= Rational::zero() || p >= Rational::one() {
        return Err(ParseError::Semantic(format!(
            "p must lie strictly between 0 and 1, got {}",
            doc.p
        )));
    }
    if y0 <= Rational::zero() {
        return Err(ParseError::Semantic(format!(
            "y0 must be positive, got {}",
            doc.y0
        )));
    }
    WalkSpec::new(q1, q2, p, y0).map_err(|e| ParseError::Semantic(e.to_string()))
}

fn parse_scalar(s: &str, what: &str) -> Result<Rational, ParseError> {
    let mut cur = Cursor::new(s, 1);
    cur.skip_ws();
    let v = cur.number_or_fraction()?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.error(format!("trailing input after {what}")));
    }
    Ok(v)
}

/// Parses one polynomial expression into a generalized term list.
pub fn parse_expr(s: &str, line: usize) -> Result<TermPoly, ParseError> {
    let mut cur = Cursor::new(s, line);
    let mut terms: Vec<(Rational, Rational)> = Vec::new();
    cur.skip_ws();
    if cur.at_end() {
        return Err(cur.error("empty expression".into()));
    }
    let mut sign = match cur.peek() {
        Some('-') => {
            cur.bump();
            -Rational::one()
        }
        Some('+') => {
            cur.bump();
            Rational::one()
        }
        _ => Rational::one(),
    };
    loop {
        cur.skip_ws();
        let (coeff, expo) = cur.term()?;
        terms.push((sign * coeff, expo));
        cur.skip_ws();
        match cur.peek() {
            None => break,
            Some('+') => {
                cur.bump();
                sign = Rational::one();
            }
            Some('-') => {
                cur.bump();
                sign = -Rational::one();
            }
            Some(c) => return Err(cur.error(format!("expected `+`, `-` or end, found `{c}`"))),
        }
    }
    Ok(TermPoly::new(terms))
}

struct Cursor<'a> {
    chars: Vec<char>,
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            src,
            pos: 0,
            line,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.bump();
        }
    }

    fn error(&self, msg: String) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            col: self.pos + 1,
            msg: format!("{msg} (in `{}`)", self.src.trim()),
        }
    }

    /// `coeff? 'n' ('^' exponent)? | coeff` -> (coefficient, exponent)
    fn term(&mut self) -> Result<(Rational, Rational), ParseError> {
        let coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => Some(self.number_or_fraction()?),
            _ => None,
        };
        self.skip_ws();
        if self.peek() == Some('n') {
            self.bump();
            let expo = if self.peek() == Some('^') {
                self.bump();
                let e = self.number_or_fraction()?;
                if e <= Rational::zero() {
                    return Err(self.error("exponent must be positive".into()));
                }
                e
            } else {
                Rational::one()
            };
            Ok((coeff.unwrap_or_else(Rational::one), expo))
        } else {
            match coeff {
                Some(c) => Ok((c, Rational::zero())),
                None => Err(self.error(match self.peek() {
                    Some(c) => format!("expected a coefficient or `n`, found `{c}`"),
                    None => "expected a coefficient or `n`, found end of input".into(),
                })),
            }
        }
    }

    fn number_or_fraction(&mut self) -> Result<Rational, ParseError> {
        let num = self.decimal()?;
        if self.peek() == Some('/') {
            self.bump();
            let den = self.decimal()?;
            if den.is_zero() {
                return Err(self.error("division by zero in fraction".into()));
            }
            Ok(num / den)
        } else {
            Ok(num)
        }
    }

    /// Unsigned decimal literal as an exact rational.
    fn decimal(&mut self) -> Result<Rational, ParseError> {
        let start = self.pos;
        let mut int_part = String::new();
        let mut frac_part = String::new();
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            int_part.push(self.peek().unwrap());
            self.bump();
        }
        if self.peek() == Some('.') {
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                frac_part.push(self.peek().unwrap());
                self.bump();
            }
        }
        if int_part.is_empty() && frac_part.is_empty() {
            self.pos = start;
            return Err(self.error("expected a number".into()));
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = digits.parse().expect("digits only");
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        Ok(Rational::new(numer, denom))
    }
}

/// Renders a walk back to document form; `parse -> render -> parse` is the
/// identity on the walk.
#[cfg(test)]
pub fn render_document(w: &WalkSpec) -> WalkDocument {
    WalkDocument {
        q1: render_expr(w.q1()),
        q2: render_expr(w.q2()),
        p: w.p().to_string(),
        y0: w.y0().to_string(),
    }
}

#[cfg(test)]
fn render_expr(tp: &TermPoly) -> String {
    use num_traits::Signed;
    if tp.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, t) in tp.terms().iter().rev().enumerate() {
        let coeff = if t.coeff.is_negative() {
            out.push_str(if i == 0 { "-" } else { " - " });
            -t.coeff.clone()
        } else {
            if i > 0 {
                out.push_str(" + ");
            }
            t.coeff.clone()
        };
        if t.expo.is_zero() {
            out.push_str(&coeff.to_string());
        } else {
            if !coeff.is_one() {
                out.push_str(&format!("{coeff}"));
            }
            out.push('n');
            if !t.expo.is_one() {
                out.push_str(&format!("^{}", t.expo));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use pastwalk_core::poly::{rat, Polynomial};

    fn doc(q1: &str, q2: &str, p: &str, y0: &str) -> WalkDocument {
        WalkDocument {
            q1: q1.into(),
            q2: q2.into(),
            p: p.into(),
            y0: y0.into(),
        }
    }

    #[test]
    fn figure_walk_parses() {
        let w = parse_walk(&doc("-n+3", "n+5", "0.5", "1")).unwrap();
        assert_eq!(
            w.q1().as_polynomial().unwrap(),
            Polynomial::from_ints(&[3, -1])
        );
        assert_eq!(
            w.q2().as_polynomial().unwrap(),
            Polynomial::from_ints(&[5, 1])
        );
        assert_eq!(*w.p(), rat(1, 2));
    }

    #[test]
    fn quadratic_with_decimal_probability() {
        let w = parse_walk(&doc("n^2+2n+20", "-n^2+2n+20", "0.5", "1000")).unwrap();
        assert_eq!(
            w.q1().as_polynomial().unwrap(),
            Polynomial::from_ints(&[20, 2, 1])
        );
        assert_eq!(*w.y0(), rat(1000, 1));
    }

    #[test]
    fn fractional_exponent_accepted() {
        let w = parse_walk(&doc("n^0.5", "-n^1/2", "0.5", "1")).unwrap();
        assert_eq!(w.q1().degree(), Some(&rat(1, 2)));
        assert_eq!(w.q2().degree(), Some(&rat(1, 2)));
        assert_eq!(w.degree(), rat(1, 2));
    }

    #[test]
    fn fraction_coefficients_exact() {
        // 1/0.99 n^3 is the exact rational 100/99
        let tp = parse_expr("1/0.99n^3", 1).unwrap();
        assert_eq!(tp.terms()[0].coeff, rat(100, 99));
        assert_eq!(tp.terms()[0].expo, rat(3, 1));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_expr("n^", 3).unwrap_err();
        match err {
            ParseError::Syntax { line, col, .. } => {
                assert_eq!(line, 3);
                assert_eq!(col, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_expr("2x+1", 1).is_err());
        assert!(parse_expr("n^-2", 1).is_err());
    }

    #[test]
    fn semantic_errors() {
        assert!(matches!(
            parse_walk(&doc("n", "-n", "1.5", "1")),
            Err(ParseError::Semantic(_))
        ));
        assert!(matches!(
            parse_walk(&doc("n", "-n", "0.5", "0")),
            Err(ParseError::Semantic(_))
        ));
    }

    #[test]
    fn document_parsing_with_comments() {
        let text = "# the motivating linear walk\nq1 = -n + 3\nq2 = n + 5 # second branch\np = 0.5\ny0 = 1\n";
        let d = parse_document(text).unwrap();
        assert_eq!(d.q1, "-n + 3");
        assert_eq!(d.q2, "n + 5");
        let missing = parse_document("q1 = n\nq2 = -n\np = 0.5\n");
        assert!(missing.is_err());
        let unknown = parse_document("q3 = n\n");
        assert!(matches!(unknown, Err(ParseError::Syntax { line: 1, .. })));
    }

    #[test]
    fn roundtrip_is_identity() {
        for (q1, q2, p, y0) in [
            ("-n+3", "n+5", "0.5", "1"),
            ("n^2+2n+20", "-n^2+2n+20", "0.5", "1000"),
            ("1/0.99n^3", "-100n^3", "0.99", "100000000"),
            ("n^0.5", "-n^0.5", "0.5", "1"),
        ] {
            let w = parse_walk(&doc(q1, q2, p, y0)).unwrap();
            let rendered = render_document(&w);
            let w2 = parse_walk(&rendered).unwrap();
            assert_eq!(w, w2, "roundtrip failed for {q1} / {q2}");
        }
    }
}
