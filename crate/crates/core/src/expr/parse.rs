//! Recursive-descent parser for one-variable expressions.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' INTEGER)*
//! primary := NUMBER | 'pi' | IDENT | FUNC '(' sum ')' | '(' sum ')'
//! ```

use super::{ExprError, Func, Node};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number {v}"),
            Token::Ident(s) => format!("identifier '{s}'"),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Slash => "'/'".into(),
            Token::Caret => "'^'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    offset: usize,
    /// Raw source text of number tokens, used to validate exponents.
    text: String,
}

fn tokenize(src: &str) -> Result<Vec<Spanned>, ExprError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let simple = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(token) = simple {
            tokens.push(Spanned {
                token,
                offset: start,
                text: String::new(),
            });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| ExprError::Syntax {
                offset: start,
                expected: "a valid number".into(),
                found: format!("'{text}'"),
            })?;
            tokens.push(Spanned {
                token: Token::Number(value),
                offset: start,
                text: text.to_string(),
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push(Spanned {
                token: Token::Ident(src[start..i].to_string()),
                offset: start,
                text: String::new(),
            });
            continue;
        }
        let ch = src[start..].chars().next().unwrap_or('?');
        return Err(ExprError::Syntax {
            offset: start,
            expected: "an operator, number, identifier or parenthesis".into(),
            found: format!("'{ch}'"),
        });
    }
    tokens.push(Spanned {
        token: Token::End,
        offset: src.len(),
        text: String::new(),
    });
    Ok(tokens)
}

pub(super) struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    /// Name of the free variable: fixed up front, or taken from the first
    /// identifier seen.
    pub(super) var: Option<String>,
}

impl Parser {
    pub(super) fn new(src: &str, var: Option<&str>) -> Result<Self, ExprError> {
        Ok(Parser {
            tokens: tokenize(src)?,
            pos: 0,
            var: var.map(str::to_string),
        })
    }

    fn peek(&self) -> &Spanned {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ExprError {
        let t = self.peek();
        ExprError::Syntax {
            offset: t.offset,
            expected: expected.into(),
            found: t.token.describe(),
        }
    }

    pub(super) fn parse_all(&mut self) -> Result<Node, ExprError> {
        if self.peek().token == Token::End {
            return Err(ExprError::Empty);
        }
        let node = self.sum()?;
        if self.peek().token != Token::End {
            return Err(self.error("an operator or end of input"));
        }
        Ok(node)
    }

    fn sum(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek().token {
                Token::Plus => {
                    self.advance();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Token::Minus => {
                    self.advance();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().token {
                Token::Star => {
                    self.advance();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Token::Slash => {
                    self.advance();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.peek().token == Token::Minus {
            self.advance();
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let mut base = self.primary()?;
        while self.peek().token == Token::Caret {
            self.advance();
            let t = self.advance();
            let exponent = match t.token {
                Token::Number(_) if t.text.bytes().all(|b| b.is_ascii_digit()) => t
                    .text
                    .parse::<u32>()
                    .map_err(|_| ExprError::BadExponent { offset: t.offset })?,
                _ => return Err(ExprError::BadExponent { offset: t.offset }),
            };
            base = Node::Pow(Box::new(base), exponent);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ExprError> {
        let t = self.advance();
        match t.token {
            Token::Number(v) => Ok(Node::Const(v)),
            Token::LParen => {
                let inner = self.sum()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Token::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    if self.peek().token != Token::LParen {
                        return Err(self.error(&format!("'(' after function '{name}'")));
                    }
                    self.advance();
                    let arg = self.sum()?;
                    self.expect_rparen()?;
                    return Ok(Node::Call(func, Box::new(arg)));
                }
                if name == "pi" {
                    return Ok(Node::Const(std::f64::consts::PI));
                }
                match &self.var {
                    None => {
                        self.var = Some(name);
                        Ok(Node::Var)
                    }
                    Some(v) if *v == name => Ok(Node::Var),
                    Some(_) => Err(ExprError::UnknownIdentifier {
                        name,
                        offset: t.offset,
                    }),
                }
            }
            other => {
                // Report at the offending token, not the one after it.
                self.pos -= usize::from(self.pos > 0 && other != Token::End);
                Err(self.error("a number, identifier, function call or '('"))
            }
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if self.peek().token == Token::RParen {
            self.advance();
            Ok(())
        } else if self.peek().token == Token::End {
            Err(ExprError::Syntax {
                offset: self.peek().offset,
                expected: "')' to close an unclosed parenthesis".into(),
                found: "end of input".into(),
            })
        } else {
            Err(self.error("')'"))
        }
    }
}
