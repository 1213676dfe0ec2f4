use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::ast::{BinOp, CmpOp, Condition, ExprAst, Func};
use super::ExprError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Arrow,
    Cmp(CmpOp),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = |tok| Some((tok, 1));
        let two = |next: u8| bytes.get(i + 1) == Some(&next);
        let simple = match c {
            b'+' => single(Tok::Plus),
            b'-' => single(Tok::Minus),
            b'*' => single(Tok::Star),
            b'/' => single(Tok::Slash),
            b'^' => single(Tok::Caret),
            b'(' => single(Tok::LParen),
            b')' => single(Tok::RParen),
            b'{' => single(Tok::LBrace),
            b'}' => single(Tok::RBrace),
            b',' => single(Tok::Comma),
            b'<' if two(b'=') => Some((Tok::Cmp(CmpOp::Le), 2)),
            b'<' => single(Tok::Cmp(CmpOp::Lt)),
            b'>' if two(b'=') => Some((Tok::Cmp(CmpOp::Ge), 2)),
            b'>' => single(Tok::Cmp(CmpOp::Gt)),
            b'=' if two(b'=') => Some((Tok::Cmp(CmpOp::Eq), 2)),
            b'=' if two(b'>') => Some((Tok::Arrow, 2)),
            b'!' if two(b'=') => Some((Tok::Cmp(CmpOp::Ne), 2)),
            _ => None,
        };
        if let Some((tok, len)) = simple {
            out.push(Token { tok, pos: start });
            i += len;
            continue;
        }
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
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
                position: start,
                expected: vec!["number"],
            })?;
            out.push(Token { tok: Tok::Num(value), pos: start });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), pos: start });
            continue;
        }
        return Err(ExprError::Syntax { position: start, expected: vec!["token"] });
    }
    out.push(Token { tok: Tok::End, pos: src.len() });
    Ok(out)
}

const OPERAND: &[&str] = &["number", "s", "function call", "(", "-", "piece"];

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &'static str) -> Result<(), ExprError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(ExprError::Syntax { position: self.pos(), expected: vec![what] })
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = ExprAst::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = ExprAst::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    // Unary minus sits below `^`: "-2^2" is -(2^2).
    fn factor(&mut self) -> Result<ExprAst, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(ExprAst::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(ExprAst::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<ExprAst, ExprError> {
        let position = self.pos();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(ExprAst::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, ")")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "s" {
                    return Ok(ExprAst::Var);
                }
                if name == "piece" {
                    return self.piecewise();
                }
                if *self.peek() == Tok::LParen {
                    let func = Func::from_name(&name)
                        .ok_or(ExprError::UnknownFunction { name: name.clone(), position })?;
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    if args.len() != func.arity() {
                        return Err(ExprError::Arity {
                            name: func.name(),
                            expected: func.arity(),
                            found: args.len(),
                            position,
                        });
                    }
                    self.expect(Tok::RParen, ")")?;
                    return Ok(ExprAst::Call(func, args));
                }
                Err(ExprError::UnknownVariable { name, position })
            }
            _ => Err(ExprError::Syntax { position, expected: OPERAND.to_vec() }),
        }
    }

    fn piecewise(&mut self) -> Result<ExprAst, ExprError> {
        self.expect(Tok::LBrace, "{")?;
        let mut arms = Vec::new();
        loop {
            if matches!(self.peek(), Tok::Ident(name) if name == "else") {
                self.bump();
                self.expect(Tok::Arrow, "=>")?;
                let otherwise = self.expr()?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                }
                self.expect(Tok::RBrace, "}")?;
                return Ok(ExprAst::Piecewise { arms, otherwise: Box::new(otherwise) });
            }
            let lhs = self.expr()?;
            let op = match self.peek() {
                Tok::Cmp(op) => *op,
                _ => {
                    return Err(ExprError::Syntax {
                        position: self.pos(),
                        expected: vec!["<", "<=", ">", ">=", "==", "!="],
                    })
                }
            };
            self.bump();
            let rhs = self.expr()?;
            self.expect(Tok::Arrow, "=>")?;
            let branch = self.expr()?;
            self.expect(Tok::Comma, ",")?;
            arms.push((Condition { op, lhs, rhs }, branch));
        }
    }
}

pub fn parse(src: &str) -> Result<ExprAst, ExprError> {
    let toks = lex(src)?;
    if toks.len() == 1 {
        return Err(ExprError::Syntax { position: 0, expected: OPERAND.to_vec() });
    }
    let mut p = Parser { toks, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(ExprError::Syntax {
            position: p.pos(),
            expected: vec!["+", "-", "*", "/", "^", "end of input"],
        });
    }
    Ok(e)
}
