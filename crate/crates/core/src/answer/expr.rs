//! Arithmetic answers: `+ - × ÷` over decimal literals, percentages and π.

use std::f64::consts::PI;
use std::fmt;

use crate::error::ExprError;

pub const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "×",
            BinOp::Div => "÷",
        }
    }

    fn apply(self, a: f64, b: f64) -> Result<f64, ExprError> {
        Ok(match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div if b == 0.0 => return Err(ExprError::DivisionByZero),
            BinOp::Div => a / b,
        })
    }
}

/// Expression tree. Parentheses only shape the tree and are not kept.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    /// `n%`, worth `n / 100`.
    Percent(f64),
    Pi,
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
            _ => 1,
        }
    }

    /// Recursive evaluation.
    pub fn eval(&self) -> Result<f64, ExprError> {
        match self {
            Expr::Number(v) => Ok(*v),
            Expr::Percent(v) => Ok(v / 100.0),
            Expr::Pi => Ok(PI),
            Expr::Binary(op, l, r) => op.apply(l.eval()?, r.eval()?),
        }
    }

    /// Post-order instruction list for [`eval_postfix`].
    pub fn to_postfix(&self) -> Vec<Instr> {
        let mut out = Vec::new();
        let mut stack = vec![(self, false)];
        while let Some((node, expanded)) = stack.pop() {
            match node {
                Expr::Number(v) => out.push(Instr::Push(*v)),
                Expr::Percent(v) => out.push(Instr::Push(v / 100.0)),
                Expr::Pi => out.push(Instr::Push(PI)),
                Expr::Binary(op, l, r) => {
                    if expanded {
                        out.push(Instr::Apply(*op));
                    } else {
                        stack.push((node, true));
                        stack.push((r, false));
                        stack.push((l, false));
                    }
                }
            }
        }
        out
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, parent: u8, right: bool) -> fmt::Result {
        match self {
            Expr::Number(v) => write!(f, "{v}"),
            Expr::Percent(v) => write!(f, "{v}%"),
            Expr::Pi => f.write_str("π"),
            Expr::Binary(op, l, r) => {
                let prec = op.precedence();
                let parens = prec < parent || (prec == parent && right);
                if parens {
                    f.write_str("(")?;
                }
                l.write(f, prec, false)?;
                write!(f, " {} ", op.symbol())?;
                r.write(f, prec, true)?;
                if parens {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Renders with the fewest parentheses that keep the tree shape.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Instr {
    Push(f64),
    Apply(BinOp),
}

/// Stack-machine evaluation of a post-order program.
pub fn eval_postfix(program: &[Instr]) -> Result<f64, ExprError> {
    let mut stack: Vec<f64> = Vec::with_capacity(program.len());
    for instr in program {
        match *instr {
            Instr::Push(v) => stack.push(v),
            Instr::Apply(op) => {
                let b = stack.pop().ok_or(ExprError::Empty)?;
                let a = stack.pop().ok_or(ExprError::Empty)?;
                stack.push(op.apply(a, b)?);
            }
        }
    }
    match stack.as_slice() {
        [v] => Ok(*v),
        _ => Err(ExprError::Empty),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    Pi,
    Op(BinOp),
    Percent,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let c = text[i..].chars().next().expect("in bounds");
        let tok = match c {
            c if c.is_whitespace() => {
                i += c.len_utf8();
                continue;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < text.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let lit = &text[start..i];
                let v: f64 = lit
                    .parse()
                    .map_err(|_| ExprError::BadNumber { offset: start })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            'p' | 'P'
                if text
                    .get(i..i + 2)
                    .is_some_and(|w| w.eq_ignore_ascii_case("pi")) =>
            {
                if text[i + 2..].starts_with(|n: char| n.is_alphanumeric()) {
                    return Err(ExprError::UnexpectedChar { ch: c, offset: i });
                }
                out.push((Tok::Pi, i));
                i += 2;
                continue;
            }
            'π' => Tok::Pi,
            '+' => Tok::Op(BinOp::Add),
            '-' | '−' => Tok::Op(BinOp::Sub),
            '*' | '×' => Tok::Op(BinOp::Mul),
            '/' | '÷' => Tok::Op(BinOp::Div),
            '%' | '％' => Tok::Percent,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(ExprError::UnexpectedChar {
                    ch: other,
                    offset: i,
                })
            }
        };
        out.push((tok, i));
        i += c.len_utf8();
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    nesting: usize,
}

impl Parser {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|t| t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(op @ (BinOp::Add | BinOp::Sub))) = self.peek() {
            let at = self.offset();
            self.pos += 1;
            let rhs = self.operand_after(at, Self::term)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        while let Some(Tok::Op(op @ (BinOp::Mul | BinOp::Div))) = self.peek() {
            let at = self.offset();
            self.pos += 1;
            let rhs = self.operand_after(at, Self::factor)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn operand_after(
        &mut self,
        op_offset: usize,
        next: fn(&mut Self) -> Result<Expr, ExprError>,
    ) -> Result<Expr, ExprError> {
        if self.peek().is_none() {
            return Err(ExprError::Dangling { offset: op_offset });
        }
        next(self)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let at = self.offset();
        match self.peek() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(self.percent(v))
            }
            Some(Tok::Op(BinOp::Sub))
                if matches!(self.toks.get(self.pos + 1), Some((Tok::Num(_), _))) =>
            {
                let Some((Tok::Num(v), _)) = self.toks.get(self.pos + 1).copied() else {
                    unreachable!()
                };
                self.pos += 2;
                Ok(self.percent(-v))
            }
            Some(Tok::Pi) => {
                self.pos += 1;
                Ok(Expr::Pi)
            }
            Some(Tok::LParen) => {
                self.nesting += 1;
                if self.nesting > MAX_DEPTH {
                    return Err(ExprError::TooDeep { max: MAX_DEPTH });
                }
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(Tok::RParen) {
                    return Err(ExprError::Unbalanced { offset: at });
                }
                self.pos += 1;
                self.nesting -= 1;
                Ok(inner)
            }
            Some(Tok::RParen) => Err(ExprError::Unbalanced { offset: at }),
            None => Err(ExprError::Empty),
            Some(_) => Err(ExprError::ExpectedOperand { offset: at }),
        }
    }

    fn percent(&mut self, v: f64) -> Expr {
        if self.peek() == Some(Tok::Percent) {
            self.pos += 1;
            Expr::Percent(v)
        } else {
            Expr::Number(v)
        }
    }
}

/// Parses an arithmetic answer such as `10 + 10 × 90%`.
///
/// Multiplication and division bind tighter than addition and subtraction;
/// operators are left-associative. A `-` directly before a number in operand
/// position makes a negative literal.
pub fn parse_expression(text: &str) -> Result<Expr, ExprError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ExprError::Empty);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        nesting: 0,
    };
    let expr = p.expr()?;
    match p.toks.get(p.pos) {
        None => {}
        Some((Tok::RParen, at)) => return Err(ExprError::Unbalanced { offset: *at }),
        Some((Tok::Percent, at)) => {
            return Err(ExprError::UnexpectedChar {
                ch: '%',
                offset: *at,
            })
        }
        Some((_, at)) => return Err(ExprError::ExpectedOperand { offset: *at }),
    }
    if expr.depth() > MAX_DEPTH {
        return Err(ExprError::TooDeep { max: MAX_DEPTH });
    }
    Ok(expr)
}

/// Parses and evaluates.
pub fn eval_expression(text: &str) -> Result<f64, ExprError> {
    parse_expression(text)?.eval()
}
