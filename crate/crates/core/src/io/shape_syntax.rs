//! Compact text form of shapes and schedules used inside scenario files.
//!
//! ```text
//! empty | point(x, y) | ball(x, y, r) | sector(x, y, r0, theta0, theta1)
//! union(shape, shape, ...)
//! ```
//!
//! Schedules use the same `name(args)` form, e.g. `grow(0.3)` or
//! `circle(0.5, 0.5, 0.1, 1, 0)`.

use super::ParseError;
use crate::geometry::{Point, SetShape};

/// A parsed `name(args)` term; arguments are numbers or nested terms.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Term {
    Num(f64),
    Call(String, Vec<Term>),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => Err(ParseError::new(format!(
                "expected '{want}' at offset {} in '{}', found '{c}'",
                self.pos, self.src
            ))),
            None => Err(ParseError::new(format!("expected '{want}' at end of '{}'", self.src))),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let c = self
            .peek()
            .ok_or_else(|| ParseError::new(format!("unexpected end of '{}'", self.src)))?;
        let start = self.pos;
        if c.is_ascii_alphabetic() {
            while let Some(c) = self.src[self.pos..].chars().next() {
                if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            let name = self.src[start..self.pos].to_ascii_lowercase();
            if matches!(name.as_str(), "inf" | "nan") {
                return Err(ParseError::new(format!("non-finite number in '{}'", self.src)));
            }
            let mut args = Vec::new();
            if self.peek() == Some('(') {
                self.expect('(')?;
                if self.peek() != Some(')') {
                    loop {
                        args.push(self.term()?);
                        if self.peek() == Some(',') {
                            self.expect(',')?;
                        } else {
                            break;
                        }
                    }
                }
                self.expect(')')?;
            }
            return Ok(Term::Call(name, args));
        }
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Term::Num)
            .ok_or_else(|| ParseError::new(format!("bad number '{text}' in '{}'", self.src)))
    }
}

pub(crate) fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut lx = Lexer { src, pos: 0 };
    let t = lx.term()?;
    if lx.peek().is_some() {
        return Err(ParseError::new(format!("trailing input after term in '{src}'")));
    }
    Ok(t)
}

/// Numeric arguments of a call, checked against the expected arity.
pub(crate) fn numbers(name: &str, args: &[Term], arity: usize) -> Result<Vec<f64>, ParseError> {
    if args.len() != arity {
        return Err(ParseError::new(format!(
            "{name}(...) takes {arity} arguments, got {}",
            args.len()
        )));
    }
    args.iter()
        .map(|a| match a {
            Term::Num(v) => Ok(*v),
            Term::Call(n, _) => Err(ParseError::new(format!("{name}(...) expects numbers, got {n}"))),
        })
        .collect()
}

fn shape_of(t: &Term) -> Result<SetShape, ParseError> {
    let Term::Call(name, args) = t else {
        return Err(ParseError::new("expected a shape, found a number"));
    };
    Ok(match name.as_str() {
        "empty" => {
            numbers(name, args, 0)?;
            SetShape::Empty
        }
        "point" => {
            let v = numbers(name, args, 2)?;
            SetShape::PointSet(Point::new(v[0], v[1]))
        }
        "ball" => {
            let v = numbers(name, args, 3)?;
            SetShape::Ball {
                center: Point::new(v[0], v[1]),
                radius: v[2],
            }
        }
        "sector" => {
            let v = numbers(name, args, 5)?;
            SetShape::Sector {
                center: Point::new(v[0], v[1]),
                r0: v[2],
                theta0: v[3],
                theta1: v[4],
            }
        }
        "union" => SetShape::Union(args.iter().map(shape_of).collect::<Result<_, _>>()?),
        other => return Err(ParseError::new(format!("unknown shape '{other}'"))),
    })
}

pub fn parse_shape(src: &str) -> Result<SetShape, ParseError> {
    shape_of(&parse_term(src)?)
}

pub fn format_shape(s: &SetShape) -> String {
    match s {
        SetShape::Empty => "empty".into(),
        SetShape::PointSet(p) => format!("point({}, {})", p.x, p.y),
        SetShape::Ball { center, radius } => format!("ball({}, {}, {})", center.x, center.y, radius),
        SetShape::Sector {
            center,
            r0,
            theta0,
            theta1,
        } => format!("sector({}, {}, {}, {}, {})", center.x, center.y, r0, theta0, theta1),
        SetShape::Union(parts) => format!(
            "union({})",
            parts.iter().map(format_shape).collect::<Vec<_>>().join(", ")
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_round_trip() {
        let shapes = [
            SetShape::Empty,
            SetShape::PointSet(Point::new(0.25, -1e-3)),
            SetShape::ball(Point::new(0.5, 0.5), 0.3),
            SetShape::Sector {
                center: Point::new(0.0, 0.0),
                r0: 0.4,
                theta0: 0.0,
                theta1: std::f64::consts::FRAC_PI_2,
            },
            SetShape::Union(vec![
                SetShape::ball(Point::new(0.27, 0.5), 0.2),
                SetShape::Union(vec![SetShape::PointSet(Point::new(0.1, 0.2))]),
            ]),
        ];
        for s in shapes {
            assert_eq!(parse_shape(&format_shape(&s)).unwrap(), s);
        }
    }

    #[test]
    fn whitespace_and_case_are_tolerated() {
        assert_eq!(
            parse_shape("  Ball( 0.5 ,0.5,  0.3 ) ").unwrap(),
            SetShape::ball(Point::new(0.5, 0.5), 0.3)
        );
    }

    #[test]
    fn malformed_shapes_are_rejected() {
        for bad in ["ball(1,2)", "ball(1,2,3", "circle(0,0,1)", "ball(a,b,c)", "ball(1,2,3) x", "", "point(1e999, 0)"] {
            assert!(parse_shape(bad).is_err(), "{bad} parsed");
        }
    }
}
