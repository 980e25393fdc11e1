//! Line-oriented algebra description files.
//!
//! ```text
//! algebra K1 lie super
//! gen v even
//! gen g odd
//! locality v v 3
//! prod v v 0 = 1 d^1 v
//! prod v v 1 = 2 v
//! order sec5
//! bounds deg=8 dpow=6 idx=6
//! ```

use std::collections::BTreeSet;
use std::fmt;

use confenv_core::conformal::{ConformalAlgebraDesc, GeneratorSet, HElement, Kind, LocalityFn, Which};
use confenv_core::ops::{Bounds, OrderKind};
use confenv_core::poly::{fmt_rational, parse_rational, ExactPoly, Rational, Var};
use num_traits::One;

/// Names that would be ambiguous in product lines or expressions.
pub const RESERVED: [&str; 5] = ["d", "prod", "default", "bracket", "comm"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraFile {
    pub desc: ConformalAlgebraDesc,
    pub order: OrderKind,
    pub bounds: Bounds,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

fn parse_u32(line: usize, s: &str, what: &str) -> Result<u32, ParseError> {
    s.parse().or_else(|_| err(line, format!("expected {what}, found `{s}`")))
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Header {
    name: String,
    kind: Kind,
    sup: bool,
    partial: bool,
}

fn parse_header(line: usize, toks: &[&str]) -> Result<Header, ParseError> {
    if toks.len() < 3 {
        return err(line, "expected `algebra <name> <lie|assoc|comm|poisson> [super] [partial]`");
    }
    let kind = match toks[2] {
        "lie" => Kind::Lie,
        "assoc" => Kind::Associative,
        "comm" => Kind::Commutative,
        "poisson" => Kind::Poisson,
        k => return err(line, format!("unknown algebra kind `{k}`")),
    };
    let mut h = Header {
        name: toks[1].to_string(),
        kind,
        sup: false,
        partial: false,
    };
    for t in &toks[3..] {
        match *t {
            "super" => h.sup = true,
            "partial" => h.partial = true,
            f => return err(line, format!("unknown header flag `{f}`")),
        }
    }
    Ok(h)
}

/// `<rational> [d^<s>] <gen>` summands separated by `+`; a lone `0` is the zero entry.
fn parse_rhs(line: usize, rhs: &str, gens: &GeneratorSet) -> Result<HElement, ParseError> {
    let rhs = rhs.trim();
    if rhs == "0" {
        return Ok(HElement::zero());
    }
    let mut out = HElement::zero();
    for term in rhs.split('+') {
        let toks: Vec<&str> = term.split_whitespace().collect();
        let (coef, rest) = match toks.first() {
            None => return err(line, "empty term"),
            Some(t) if !is_ident(t) => match parse_rational(t) {
                Ok(c) => (c, &toks[1..]),
                Err(_) => return err(line, format!("bad coefficient `{t}`")),
            },
            Some(_) => (Rational::one(), &toks[..]),
        };
        let (s, gen) = match rest {
            [g] => (0, *g),
            ["d", g] => (1, *g),
            [dp, g] if dp.starts_with("d^") => (parse_u32(line, &dp[2..], "a d-power")?, *g),
            _ => return err(line, format!("expected `<rational> [d^<s>] <gen>`, found `{}`", term.trim())),
        };
        let a = match gens.index(gen) {
            Some(a) => a,
            None => return err(line, format!("undeclared generator `{gen}`")),
        };
        out.add_term(a, &ExactPoly::var_pow(Var::D, s).scale(&coef));
    }
    Ok(out)
}

fn parse_bounds(line: usize, toks: &[&str]) -> Result<Bounds, ParseError> {
    let mut b = Bounds::default();
    for t in toks {
        let Some((k, v)) = t.split_once('=') else {
            return err(line, format!("expected `key=value`, found `{t}`"));
        };
        let v = parse_u32(line, v, "a bound")?;
        match k {
            "deg" => b.deg = v,
            "dpow" => b.dpow = v,
            "idx" => b.idx = v,
            "len" => b.len = v,
            _ => return err(line, format!("unknown bound `{k}`")),
        }
    }
    Ok(b)
}

pub fn parse_algebra(text: &str) -> Result<AlgebraFile, ParseError> {
    let mut header: Option<Header> = None;
    let mut gens = GeneratorSet::new();
    let mut desc: Option<ConformalAlgebraDesc> = None;
    let mut default_loc: Option<(usize, u32)> = None;
    let mut overrides: Vec<(usize, usize, usize, u32)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut order = OrderKind::Standard;
    let mut bounds = Bounds::default();
    let mut last = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks[0] == "algebra" {
            if header.is_some() {
                return err(line, "second `algebra` header");
            }
            header = Some(parse_header(line, &toks)?);
            continue;
        }
        let Some(h) = &header else {
            return err(line, "the file must start with an `algebra` header");
        };
        match toks[0] {
            "gen" => {
                if desc.is_some() {
                    return err(line, "generators must be declared before products");
                }
                let [_, name, parity] = toks[..] else {
                    return err(line, "expected `gen <name> <even|odd>`");
                };
                if !is_ident(name) || RESERVED.contains(&name) {
                    return err(line, format!("`{name}` is not a valid generator name"));
                }
                let odd = match parity {
                    "even" => false,
                    "odd" if h.sup => true,
                    "odd" => return err(line, "odd generator in an algebra without `super`"),
                    p => return err(line, format!("unknown parity `{p}`")),
                };
                if gens.push(name, odd).is_err() {
                    return err(line, format!("generator `{name}` declared twice"));
                }
            }
            "locality" => match toks[..] {
                [_, "default", n] => default_loc = Some((line, parse_u32(line, n, "a locality")?)),
                [_, a, b, n] => {
                    let lookup = |g: &str| gens.index(g).map_or_else(|| err(line, format!("undeclared generator `{g}`")), Ok);
                    overrides.push((line, lookup(a)?, lookup(b)?, parse_u32(line, n, "a locality")?));
                }
                _ => return err(line, "expected `locality <a> <b> <n>` or `locality default <n>`"),
            },
            "order" => {
                order = match toks[..] {
                    [_, "std"] => OrderKind::Standard,
                    [_, "sec5"] => OrderKind::Shifted,
                    _ => return err(line, "expected `order std|sec5`"),
                }
            }
            "bounds" => bounds = parse_bounds(line, &toks[1..])?,
            "prod" | "bracket" | "comm" => {
                let (prefix, rest) = match toks[..] {
                    ["prod", ..] => (None, &toks[1..]),
                    [p, "prod", ..] => (Some(p), &toks[2..]),
                    _ => return err(line, format!("expected `prod` after `{}`", toks[0])),
                };
                let which = match (h.kind, prefix) {
                    (Kind::Lie, None | Some("bracket")) | (Kind::Poisson, Some("bracket")) => Which::Bracket,
                    (Kind::Associative | Kind::Commutative, None | Some("comm")) | (Kind::Poisson, Some("comm")) => {
                        Which::Product
                    }
                    (Kind::Poisson, None) => return err(line, "poisson tables need a `bracket` or `comm` prefix"),
                    _ => return err(line, format!("`{}` lines do not fit a {} algebra", toks[0], h.kind.keyword())),
                };
                if rest.len() < 4 || rest[3] != "=" {
                    return err(line, "expected `prod <a> <b> <n> = <terms>`");
                }
                let d = desc.get_or_insert_with(|| ConformalAlgebraDesc::new(&h.name, gens.clone(), h.kind));
                let lookup = |g: &str| d.gens.index(g).map_or_else(|| err(line, format!("undeclared generator `{g}`")), Ok);
                let (a, b) = (lookup(rest[0])?, lookup(rest[1])?);
                let n = parse_u32(line, rest[2], "an n-product index")?;
                if !seen.insert((which == Which::Bracket, a, b, n)) {
                    return err(line, "duplicate table entry");
                }
                let rhs = content.split_once('=').map(|(_, r)| r).unwrap_or("");
                let value = parse_rhs(line, rhs, &d.gens)?;
                d.add_nth(which, a, b, n, &value);
            }
            k => return err(line, format!("unknown directive `{k}`")),
        }
    }

    let Some(h) = header else {
        return err(last.max(1), "missing `algebra` header");
    };
    if gens.is_empty() {
        return err(last.max(1), "no generators declared");
    }
    let mut desc = desc.unwrap_or_else(|| ConformalAlgebraDesc::new(&h.name, gens, h.kind));
    desc.partial = h.partial;
    if let Some((_, n)) = default_loc {
        desc.locality = LocalityFn::constant(n);
    } else {
        desc.locality_from_table();
    }
    for &(_, a, b, n) in &overrides {
        desc.locality.set(a, b, n);
    }
    for a in 0..desc.gens.len() {
        for b in 0..desc.gens.len() {
            let need = desc.table_locality(a, b);
            let have = desc.locality.get(a, b);
            if need > have {
                let line = overrides
                    .iter()
                    .rev()
                    .find(|o| o.1 == a && o.2 == b)
                    .map(|o| o.0)
                    .or(default_loc.map(|d| d.0))
                    .unwrap_or(last);
                return err(
                    line,
                    format!(
                        "locality N({}, {}) = {have} but the table has a nonzero {}-product",
                        desc.gens.name(a),
                        desc.gens.name(b),
                        need - 1
                    ),
                );
            }
        }
    }
    Ok(AlgebraFile { desc, order, bounds })
}

fn render_entry(out: &mut String, prefix: &str, desc: &ConformalAlgebraDesc, a: usize, b: usize, e: &HElement) {
    let (na, nb) = (desc.gens.name(a), desc.gens.name(b));
    if e.is_zero() {
        out.push_str(&format!("{prefix}prod {na} {nb} 0 = 0\n"));
        return;
    }
    for n in 0..=e.degree_in(Var::L) {
        let c = e.coefficient_of(Var::L, n, true);
        if c.is_zero() {
            continue;
        }
        let mut terms = Vec::new();
        for (g, p) in c.terms() {
            for (exps, coef) in p.sorted_terms() {
                let r = fmt_rational(&coef);
                terms.push(match exps[0] {
                    0 => format!("{r} {}", desc.gens.name(g)),
                    s => format!("{r} d^{s} {}", desc.gens.name(g)),
                });
            }
        }
        out.push_str(&format!("{prefix}prod {na} {nb} {n} = {}\n", terms.join(" + ")));
    }
}

/// Canonical text of a file; `parse_algebra(render(f)) == f`.
pub fn render(file: &AlgebraFile) -> String {
    let desc = &file.desc;
    let mut out = format!("algebra {} {}", desc.name, desc.kind.keyword());
    let sup = (0..desc.gens.len()).any(|a| desc.gens.is_odd(a));
    if sup {
        out.push_str(" super");
    }
    if desc.partial {
        out.push_str(" partial");
    }
    out.push('\n');
    for a in 0..desc.gens.len() {
        let parity = if desc.gens.is_odd(a) { "odd" } else { "even" };
        out.push_str(&format!("gen {} {parity}\n", desc.gens.name(a)));
    }
    if desc.locality.default != 0 {
        out.push_str(&format!("locality default {}\n", desc.locality.default));
    }
    for (&(a, b), n) in &desc.locality.overrides {
        out.push_str(&format!("locality {} {} {n}\n", desc.gens.name(a), desc.gens.name(b)));
    }
    let tables: &[(&str, Which)] = match desc.kind {
        Kind::Lie => &[("", Which::Bracket)],
        Kind::Associative | Kind::Commutative => &[("", Which::Product)],
        Kind::Poisson => &[("bracket ", Which::Bracket), ("comm ", Which::Product)],
    };
    for (prefix, which) in tables {
        let t = match which {
            Which::Bracket => &desc.bracket,
            Which::Product => &desc.product,
        };
        for (&(a, b), e) in t {
            render_entry(&mut out, prefix, desc, a, b, e);
        }
    }
    if desc.kind == Kind::Lie {
        out.push_str(&format!("order {}\n", file.order.keyword()));
        let b = &file.bounds;
        out.push_str(&format!("bounds deg={} dpow={} idx={} len={}\n", b.deg, b.dpow, b.idx, b.len));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use confenv_core::conformal::{make_neveu_schwarz, make_virasoro};

    const VIR: &str = "algebra Vir lie\ngen v even\nprod v v 0 = 1 d^1 v\nprod v v 1 = 2 v\n";

    #[test]
    fn virasoro_file() {
        let f = parse_algebra(VIR).unwrap();
        assert_eq!(f.desc, make_virasoro());
        assert_eq!(f.order, OrderKind::Standard);
        assert_eq!(f.bounds, Bounds::default());
    }

    #[test]
    fn neveu_schwarz_file() {
        let text = "algebra K1 lie super\ngen v even\ngen g odd\n\
            prod v v 0 = 1 d v\nprod v v 1 = 2 v\n\
            prod g v 0 = 1/2 d g\nprod g v 1 = 3/2 g\n\
            prod v g 0 = d g\nprod v g 1 = 3/2 g\n\
            prod g g 0 = -1/2 v   # odd pair\n";
        assert_eq!(parse_algebra(text).unwrap().desc, make_neveu_schwarz());
    }

    #[test]
    fn round_trip() {
        let mut f = parse_algebra(VIR).unwrap();
        f.desc.locality.set(0, 0, 3);
        f.order = OrderKind::Shifted;
        let back = parse_algebra(&render(&f)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_algebra("algebra A lie\ngen v even\n\nprod v w 0 = 1 v\n").unwrap_err();
        assert_eq!((e.line, e.message.as_str()), (4, "undeclared generator `w`"));
        let e = parse_algebra("algebra A lie\ngen v even\nprod v v 0 = 1 w\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_algebra("gen v even\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_algebra("algebra A lie\ngen g odd\n").unwrap_err();
        assert!(e.message.contains("super"));
        let e = parse_algebra("algebra A lie\ngen v even\nprod v v 1 = 2 v\nprod v v 1 = 2 v\n").unwrap_err();
        assert_eq!(e.line, 4);
    }

    #[test]
    fn locality_inconsistency() {
        let e = parse_algebra(&format!("{VIR}locality v v 1\n")).unwrap_err();
        assert_eq!(e.line, 5);
        let e = parse_algebra(&format!("{VIR}locality default 1\n")).unwrap_err();
        assert_eq!(e.line, 5);
        assert!(parse_algebra(&format!("{VIR}locality v v 3\n")).is_ok());
    }

    #[test]
    fn poisson_needs_prefix() {
        let head = "algebra P poisson\ngen v even\n";
        assert!(parse_algebra(&format!("{head}prod v v 0 = 1 v\n")).is_err());
        let f = parse_algebra(&format!("{head}comm prod v v 0 = 1 v\nbracket prod v v 0 = 0\n")).unwrap();
        assert!(f.desc.bracket[&(0, 0)].is_zero());
        assert_eq!(f.desc.product[&(0, 0)], HElement::gen(0));
    }
}
