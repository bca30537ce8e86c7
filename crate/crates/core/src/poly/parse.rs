//! Recursive-descent parser for the polynomial text format.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := ('+' | '-') factor | power
//! power  := atom ('^' UINT)?
//! atom   := NUMBER | 'x' UINT | 't' | '(' expr ')'
//! ```
//!
//! Variables are 1-based (`x1..xn`). The deformation parameter `t` is only
//! accepted by [`parse_with_param`], where it becomes variable `n + 1`.

use super::{PolyError, Polynomial};

const MAX_EXPONENT: u32 = 1024;

/// Parses `text` as a polynomial in `x1..x<nvars>`.
pub fn parse(text: &str, nvars: usize) -> Result<Polynomial, PolyError> {
    Parser::new(text, nvars, false).run()
}

/// Parses `text` as a polynomial in `x1..x<nvars>, t`; the result has
/// `nvars + 1` variables with `t` last.
pub fn parse_with_param(text: &str, nvars: usize) -> Result<Polynomial, PolyError> {
    Parser::new(text, nvars, true).run()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
    allow_t: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, nvars: usize, allow_t: bool) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            nvars,
            allow_t,
        }
    }

    fn total_vars(&self) -> usize {
        self.nvars + usize::from(self.allow_t)
    }

    fn run(mut self) -> Result<Polynomial, PolyError> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Err(self.error("empty expression"));
        }
        let p = self.expr()?;
        self.skip_ws();
        if self.pos < self.src.len() {
            return Err(self.error(&format!("unexpected `{}`", self.src[self.pos] as char)));
        }
        if p.terms().any(|(_, c)| !c.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        Ok(p)
    }

    fn error(&self, msg: &str) -> PolyError {
        PolyError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.factor()?;
        while let Some(b'*') = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = &acc * &rhs;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.factor()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if let Some(b'^') = self.peek() {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected a non-negative integer exponent"));
            }
            let e: u32 =
                digits
                    .parse()
                    .ok()
                    .filter(|&e| e <= MAX_EXPONENT)
                    .ok_or(PolyError::Syntax {
                        pos: start,
                        msg: format!("exponent too large (max {MAX_EXPONENT})"),
                    })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        let n = self.total_vars();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                let int = self.digits();
                let mut text = int.clone();
                if self.src.get(self.pos) == Some(&b'.') {
                    self.pos += 1;
                    let frac = self.digits();
                    if int.is_empty() && frac.is_empty() {
                        self.pos = start;
                        return Err(self.error("malformed number"));
                    }
                    text = format!("{int}.{frac}");
                }
                let value: f64 = text.parse().map_err(|_| PolyError::Syntax {
                    pos: start,
                    msg: "malformed number".into(),
                })?;
                Ok(Polynomial::constant(value, n))
            }
            Some(b'x') => {
                let start = self.pos;
                self.pos += 1;
                let digits = self.digits();
                if digits.is_empty() {
                    self.pos = start;
                    return Err(self.error("expected variable index after `x`"));
                }
                let name = format!("x{digits}");
                match digits.parse::<usize>() {
                    Ok(i) if i >= 1 && i <= self.nvars => Ok(Polynomial::variable(i - 1, n)),
                    _ => Err(PolyError::VariableOutOfRange {
                        pos: start,
                        name,
                        nvars: self.nvars,
                    }),
                }
            }
            Some(b't') if self.allow_t => {
                self.pos += 1;
                Ok(Polynomial::variable(self.nvars, n))
            }
            Some(b't') => Err(PolyError::VariableOutOfRange {
                pos: self.pos,
                name: "t".into(),
                nvars: self.nvars,
            }),
            Some(c) => Err(self.error(&format!("unexpected `{}`", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
