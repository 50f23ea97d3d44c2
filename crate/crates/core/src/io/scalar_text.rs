use num_rational::BigRational;

use crate::scalar::{parse_rational, IrrationalBasis, Scalar, ScalarError};

/// Canonical text of a scalar: polynomials with monomials from the leading
/// one down, fractions as `(num)/(den)`.
pub fn format_scalar(x: &Scalar, basis: &IrrationalBasis) -> String {
    x.clone().normalized().display(basis).to_string()
}

/// Parses `+ - * / ^` expressions over rationals, decimals and the symbol
/// names of `basis`, with parentheses.
pub fn parse_scalar(text: &str, basis: &IrrationalBasis) -> Result<Scalar, ScalarError> {
    let mut p = Parser {
        src: text,
        chars: text.char_indices().peekable(),
        basis,
    };
    let v = p.expr()?;
    p.skip_ws();
    match p.chars.peek() {
        None => Ok(v.normalized()),
        Some(&(i, c)) => Err(p.error(&format!("unexpected {:?} at offset {}", c, i))),
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    basis: &'a IrrationalBasis,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ScalarError {
        ScalarError::Parse(format!("{} in {:?}", msg, self.src))
    }

    fn skip_ws(&mut self) {
        while self.chars.next_if(|(_, c)| c.is_whitespace()).is_some() {}
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        self.chars.next_if(|&(_, c)| c == want).is_some()
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = if self.eat('-') { -self.term()? } else { self.term()? };
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc * self.power()?;
            } else if self.eat('/') {
                let d = self.power()?;
                acc = acc.checked_div(&d)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Scalar, ScalarError> {
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let digits = self.take_while(|c| c.is_ascii_digit());
            let k: u32 = digits.parse().map_err(|_| self.error("expected an exponent"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some((_, c)) = self.chars.next_if(|&(_, c)| f(c)) {
            out.push(c);
        }
        out
    }

    fn atom(&mut self) -> Result<Scalar, ScalarError> {
        self.skip_ws();
        match self.chars.peek().map(|&(_, c)| c) {
            Some('(') => {
                self.chars.next();
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("missing ')'"));
                }
                Ok(v)
            }
            Some('-') => {
                self.chars.next();
                Ok(-self.atom()?)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let lit = self.take_while(|c| c.is_ascii_digit() || c == '.');
                let q: BigRational = parse_rational(&lit)?;
                Ok(Scalar::from_rational(q))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                match self.basis.index_of(&name) {
                    Some(i) => Ok(Scalar::symbol(i)),
                    None => Err(self.error(&format!("unknown symbol {:?}", name))),
                }
            }
            _ => Err(self.error("expected a number, symbol or '('")),
        }
    }
}
