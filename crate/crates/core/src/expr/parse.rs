use super::{BinaryOp, Expression, Node, ParseError, UnaryOp};

/// Maximum depth of the syntax tree. Evaluation recurses over the tree, so
/// the bound also caps stack use.
pub const MAX_DEPTH: usize = 256;

/// Parse a function of `x`.
///
/// Precedence from tightest to loosest: `^` (right associative), unary minus,
/// `*` and `/`, then `+` and `-`. Whitespace is ignored between tokens.
pub fn parse(source: &str) -> Result<Expression, ParseError> {
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
        level: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(ParseError::Empty);
    }
    let (root, _) = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(Expression::new(root))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    // Current recursion depth of the descent itself.
    level: usize,
}

type Parsed = (Node, usize);

fn deeper(node: Node, depth: usize) -> Result<Parsed, ParseError> {
    if depth > MAX_DEPTH {
        Err(ParseError::TooDeep)
    } else {
        Ok((node, depth))
    }
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Parsed, ParseError> {
        let (mut lhs, mut depth) = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinaryOp::Add
            } else if self.eat(b'-') {
                BinaryOp::Sub
            } else {
                return Ok((lhs, depth));
            };
            let (rhs, rd) = self.term()?;
            (lhs, depth) = deeper(
                Node::Binary(op, Box::new(lhs), Box::new(rhs)),
                1 + depth.max(rd),
            )?;
        }
    }

    fn term(&mut self) -> Result<Parsed, ParseError> {
        let (mut lhs, mut depth) = self.unary()?;
        loop {
            let op = if self.eat(b'*') {
                BinaryOp::Mul
            } else if self.eat(b'/') {
                BinaryOp::Div
            } else {
                return Ok((lhs, depth));
            };
            let (rhs, rd) = self.unary()?;
            (lhs, depth) = deeper(
                Node::Binary(op, Box::new(lhs), Box::new(rhs)),
                1 + depth.max(rd),
            )?;
        }
    }

    fn unary(&mut self) -> Result<Parsed, ParseError> {
        self.level += 1;
        let out = self.unary_inner();
        self.level -= 1;
        out
    }

    fn unary_inner(&mut self) -> Result<Parsed, ParseError> {
        if self.level > MAX_DEPTH {
            return Err(ParseError::TooDeep);
        }
        if self.eat(b'-') {
            let (inner, d) = self.unary()?;
            return deeper(Node::Unary(UnaryOp::Neg, Box::new(inner)), d + 1);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Parsed, ParseError> {
        let (base, depth) = self.primary()?;
        if !self.eat(b'^') {
            return Ok((base, depth));
        }
        self.skip_ws();
        let at = self.pos;
        let (exponent, _) = self.exponent()?;
        if exponent.contains_var() {
            return Err(ParseError::NonConstantExponent { offset: at });
        }
        let value = Expression::new(exponent)
            .eval(0.0)
            .map_err(|_| ParseError::NonConstantExponent { offset: at })?;
        deeper(Node::pow(base, value), depth + 1)
    }

    // The right operand of `^`: signs bind looser than a nested `^`, so
    // `2^-x^2` is `2^(-(x^2))`.
    fn exponent(&mut self) -> Result<Parsed, ParseError> {
        self.level += 1;
        let out = self.exponent_inner();
        self.level -= 1;
        out
    }

    fn exponent_inner(&mut self) -> Result<Parsed, ParseError> {
        if self.level > MAX_DEPTH {
            return Err(ParseError::TooDeep);
        }
        if self.eat(b'-') {
            let (inner, d) = self.exponent()?;
            return deeper(Node::Unary(UnaryOp::Neg, Box::new(inner)), d + 1);
        }
        if self.eat(b'+') {
            return self.exponent();
        }
        self.power()
    }

    fn primary(&mut self) -> Result<Parsed, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let (inner, d) = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                deeper(inner, d + 1)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Parsed, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let from = p.pos;
            while matches!(p.peek(), Some(c) if c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - from
        };
        let mut mantissa = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            mantissa += digits(self);
        }
        if mantissa == 0 {
            return Err(ParseError::Syntax {
                offset: start,
                message: "malformed number".into(),
            });
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(self.syntax("missing digits in exponent"));
            }
        }
        // Only ASCII digits, signs, `.` and `e` were consumed.
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii literal");
        let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: "malformed number".into(),
        })?;
        if !value.is_finite() {
            return Err(ParseError::NonFiniteLiteral { offset: start });
        }
        Ok((Node::Const(value), 1))
    }

    fn identifier(&mut self) -> Result<Parsed, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        if name == "x" {
            return Ok((Node::Var, 1));
        }
        let Some(op) = UnaryOp::from_name(name) else {
            return Err(ParseError::UnknownIdentifier {
                name: name.to_string(),
                offset: start,
            });
        };
        if !self.eat(b'(') {
            return Err(self.syntax("expected `(` after function name"));
        }
        let (arg, d) = self.expr()?;
        if !self.eat(b')') {
            return Err(self.syntax("expected `)`"));
        }
        deeper(Node::Unary(op, Box::new(arg)), d + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Exponent;

    fn tree(src: &str) -> Node {
        parse(src).unwrap().root().clone()
    }

    #[test]
    fn variable() {
        assert_eq!(tree("x"), Node::Var);
        assert_eq!(tree("  x\t"), Node::Var);
    }

    #[test]
    fn polynomial() {
        assert_eq!(
            tree("x^2 + 1"),
            Node::sum(Node::pow(Node::Var, 2.0), Node::Const(1.0))
        );
    }

    #[test]
    fn rational() {
        assert_eq!(
            tree("1/(1+x)"),
            Node::quotient(Node::Const(1.0), Node::sum(Node::Const(1.0), Node::Var))
        );
    }

    #[test]
    fn power_binds_tighter_than_negation() {
        assert_eq!(
            tree("-x^2"),
            Node::Unary(UnaryOp::Neg, Box::new(Node::pow(Node::Var, 2.0)))
        );
    }

    #[test]
    fn power_is_right_associative_and_folded() {
        assert_eq!(tree("x^2^3"), Node::pow(Node::Var, 8.0));
        assert_eq!(tree("x^-1"), Node::Pow(Box::new(Node::Var), Exponent::Int(-1)));
        assert_eq!(tree("x^(1/2)"), Node::Pow(Box::new(Node::Var), Exponent::Real(0.5)));
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(tree("1.5e-3"), Node::Const(1.5e-3));
        assert_eq!(tree(".5"), Node::Const(0.5));
        assert_eq!(tree("2E+2"), Node::Const(200.0));
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(tree("exp( x )*2"), tree("exp(x)*2"));
    }

    #[test]
    fn errors() {
        assert_eq!(parse(""), Err(ParseError::Empty));
        assert_eq!(parse("   "), Err(ParseError::Empty));
        assert!(matches!(
            parse("x + y"),
            Err(ParseError::UnknownIdentifier { ref name, offset: 4 }) if name == "y"
        ));
        assert!(matches!(parse("abs(x)"), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse("x +"), Err(ParseError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("(x"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("x x"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("exp x"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("1e"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("."), Err(ParseError::Syntax { offset: 0, .. })));
        assert_eq!(parse("1e400"), Err(ParseError::NonFiniteLiteral { offset: 0 }));
        assert_eq!(parse("2^x"), Err(ParseError::NonConstantExponent { offset: 2 }));
        assert_eq!(parse("x^ln(0)"), Err(ParseError::NonConstantExponent { offset: 2 }));
    }

    #[test]
    fn deep_nesting_is_rejected() {
        let src = format!("{}x{}", "(".repeat(10_000), ")".repeat(10_000));
        assert_eq!(parse(&src), Err(ParseError::TooDeep));
        let chain = vec!["x"; 5_000].join("+");
        assert_eq!(parse(&chain), Err(ParseError::TooDeep));
        let minus = format!("{}x", "-".repeat(10_000));
        assert_eq!(parse(&minus), Err(ParseError::TooDeep));
    }
}
