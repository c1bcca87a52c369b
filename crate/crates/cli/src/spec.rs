//! Group descriptions on the command line: `sym(n)`, `alt(n)`, `agl(n,2)` and
//! `gens:[i,j,..;k,l,..]` (generators as image tables).

use std::fmt;

use ekrlab::affine::Agl;
use ekrlab::group::{alternating_generators, symmetric_generators};
use ekrlab::{GroupTable, Permutation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Sym(usize),
    Alt(usize),
    Agl(usize),
    Gens(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("group spec error at column {}: {message}", .position + 1)]
pub struct SpecError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, SpecError> {
        Err(SpecError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.text[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), SpecError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.error(format!("expected `{token}`"))
        }
    }

    fn number(&mut self) -> Result<usize, SpecError> {
        self.skip_ws();
        let digits = self.text[self.pos..].chars().take_while(char::is_ascii_digit).count();
        if digits == 0 {
            return self.error("expected a number");
        }
        let value = self.text[self.pos..self.pos + digits].parse().or_else(|_| self.error("number too large"))?;
        self.pos += digits;
        Ok(value)
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let len = self.text[self.pos..].chars().take_while(char::is_ascii_alphabetic).count();
        let w = &self.text[self.pos..self.pos + len];
        self.pos += len;
        w
    }

    fn end(&mut self) -> Result<(), SpecError> {
        self.skip_ws();
        if self.pos == self.text.len() {
            Ok(())
        } else {
            self.error("unexpected trailing input")
        }
    }
}

pub fn parse_group_spec(text: &str) -> Result<GroupSpec, SpecError> {
    let mut p = Parser { text, pos: 0 };
    let start = {
        p.skip_ws();
        p.pos
    };
    let name = p.word().to_ascii_lowercase();
    let spec = match name.as_str() {
        "sym" | "alt" => {
            p.expect("(")?;
            let n = p.number()?;
            if n == 0 {
                p.pos -= 1;
                return p.error("degree must be positive");
            }
            p.expect(")")?;
            if name == "sym" {
                GroupSpec::Sym(n)
            } else {
                GroupSpec::Alt(n)
            }
        }
        "agl" => {
            p.expect("(")?;
            let n = p.number()?;
            p.expect(",")?;
            p.skip_ws();
            let q_at = p.pos;
            let q = p.number()?;
            if q != 2 {
                p.pos = q_at;
                return p.error("only the field of order 2 is supported");
            }
            p.expect(")")?;
            GroupSpec::Agl(n)
        }
        "gens" => {
            p.expect(":")?;
            p.expect("[")?;
            let mut gens = Vec::new();
            loop {
                p.skip_ws();
                let row_at = p.pos;
                let mut images = vec![p.number()?];
                while p.eat(",") {
                    images.push(p.number()?);
                }
                if let Some(first) = gens.first().map(Vec::len) {
                    if images.len() != first {
                        p.pos = row_at;
                        return p.error(format!("generator has {} images, expected {first}", images.len()));
                    }
                }
                if let Err(e) = Permutation::from_usize(&images) {
                    p.pos = row_at;
                    return p.error(e.to_string());
                }
                gens.push(images);
                if !p.eat(";") {
                    break;
                }
            }
            p.expect("]")?;
            GroupSpec::Gens(gens)
        }
        _ => {
            p.pos = start;
            return p.error("expected `sym`, `alt`, `agl` or `gens`");
        }
    };
    p.end()?;
    Ok(spec)
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Sym(n) => write!(f, "sym({n})"),
            GroupSpec::Alt(n) => write!(f, "alt({n})"),
            GroupSpec::Agl(n) => write!(f, "agl({n},2)"),
            GroupSpec::Gens(gens) => {
                let rows: Vec<String> = gens
                    .iter()
                    .map(|g| g.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
                    .collect();
                write!(f, "gens:[{}]", rows.join(";"))
            }
        }
    }
}

impl std::str::FromStr for GroupSpec {
    type Err = SpecError;
    fn from_str(s: &str) -> Result<Self, SpecError> {
        parse_group_spec(s)
    }
}

/// A constructed group, keeping the affine structure when there is one.
pub enum Built {
    Affine(Agl),
    Perm(GroupTable),
}

impl Built {
    pub fn group(&self) -> &GroupTable {
        match self {
            Built::Affine(a) => a.group(),
            Built::Perm(g) => g,
        }
    }

    pub fn agl(&self) -> Option<&Agl> {
        match self {
            Built::Affine(a) => Some(a),
            Built::Perm(_) => None,
        }
    }
}

impl GroupSpec {
    pub fn generators(&self) -> Vec<Permutation> {
        match self {
            GroupSpec::Sym(n) => symmetric_generators(*n),
            GroupSpec::Alt(n) => alternating_generators(*n),
            GroupSpec::Agl(n) => Agl::generators(*n),
            GroupSpec::Gens(gens) => gens
                .iter()
                .map(|g| Permutation::from_usize(g).expect("validated while parsing"))
                .collect(),
        }
    }

    /// Enumerates the group, refusing more than `cap` elements.
    pub fn build(&self, cap: usize) -> ekrlab::Result<Built> {
        match self {
            GroupSpec::Agl(n) => {
                let points = 1usize.checked_shl(*n as u32).unwrap_or(usize::MAX);
                if *n <= 4 && ekrlab::gf2::gl_order(*n) * points > cap {
                    return Err(ekrlab::Error::GroupTooLarge { cap });
                }
                Ok(Built::Affine(Agl::build(*n)?))
            }
            _ => Ok(Built::Perm(GroupTable::generate_with_cap(&self.generators(), cap)?)),
        }
    }

    /// Wraps an enumerated table, recovering the affine data for `agl`.
    pub fn adopt(&self, table: GroupTable) -> ekrlab::Result<Built> {
        match self {
            GroupSpec::Agl(n) => Ok(Built::Affine(Agl::from_group(*n, table)?)),
            _ => Ok(Built::Perm(table)),
        }
    }
}
