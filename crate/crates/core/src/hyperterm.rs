//! Hypergeometric kernels G(n,k): data model, text parser, shift quotients,
//! exact evaluation, and termination analysis.
//!
//! A kernel is a constant times products of Pochhammer symbols
//! `poch(base, runVar)^p`, exponentials `base^(linear exponent)`, and
//! polynomial weights, over a declared variable list whose first entry is the
//! summation variable; the optional free parameter is named `z`.

use std::collections::BTreeMap;

use num::{BigInt, One, Zero};

use crate::error::{Error, Result};
use crate::linform::LinForm;
use crate::mpoly::MPoly;
use crate::rat::{
    as_i64, as_integer, is_nonpositive_integer, pochhammer_signed, rat_pow, render_rat, Rat,
};
use crate::ratfunc::RatFunc;

/// `poch(base, run_var)^power`; base never involves the run variable.
#[derive(Clone, PartialEq, Debug)]
pub struct PochFactor {
    pub base: LinForm,
    pub run_var: String,
    pub power: i32,
}

/// `base^exponent` with a linear integer-coefficient exponent; the base is a
/// nonzero constant or a linear form in the free parameter z.
#[derive(Clone, PartialEq, Debug)]
pub struct ExpFactor {
    pub base: LinForm,
    pub exponent: LinForm,
}

/// `value^power` for a polynomial weight such as 42n+5.
#[derive(Clone, PartialEq, Debug)]
pub struct PolyFactor {
    pub value: MPoly,
    pub power: i32,
}

#[derive(Clone, PartialEq, Debug)]
pub struct HyperTerm {
    /// Declared variables; the first is the summation variable.
    pub vars: Vec<String>,
    pub constant: Rat,
    pub pochs: Vec<PochFactor>,
    pub exps: Vec<ExpFactor>,
    pub polys: Vec<PolyFactor>,
}

impl HyperTerm {
    pub fn sum_var(&self) -> &str {
        &self.vars[0]
    }

    /// Declared variables other than the free parameter z.
    pub fn discrete_vars(&self) -> Vec<&str> {
        self.vars.iter().filter(|v| *v != "z").map(|s| s.as_str()).collect()
    }

    fn check_declared(&self, f: &LinForm) -> Result<()> {
        for v in f.vars() {
            if !self.vars.contains(v) {
                return Err(Error::UndeclaredVariable(v.clone()));
            }
        }
        Ok(())
    }

    /// Structural validation plus canonical ordering/merging of factors.
    fn canonicalize(mut self) -> Result<Self> {
        if Zero::is_zero(&self.constant) {
            return Err(Error::Domain("kernel has zero constant factor".into()));
        }
        for p in &self.pochs {
            if !self.vars.contains(&p.run_var) {
                return Err(Error::UndeclaredVariable(p.run_var.clone()));
            }
            self.check_declared(&p.base)?;
            if !Zero::is_zero(&p.base.coeff(&p.run_var)) {
                return Err(Error::Domain(format!(
                    "Pochhammer base {} involves its own run variable {}",
                    p.base.render(),
                    p.run_var
                )));
            }
        }
        for e in &self.exps {
            self.check_declared(&e.base)?;
            self.check_declared(&e.exponent)?;
            if e.base.is_zero() {
                return Err(Error::Domain("zero base in exponential factor".into()));
            }
            if !e.exponent.has_integer_coeffs() {
                return Err(Error::Domain(format!(
                    "exponent {} has non-integer coefficients",
                    e.exponent.render()
                )));
            }
            for v in e.base.vars() {
                if v != "z" {
                    return Err(Error::Domain(format!(
                        "exponential base {} involves the discrete variable {v}",
                        e.base.render()
                    )));
                }
            }
        }
        for p in &self.polys {
            if p.value.is_zero() {
                return Err(Error::Domain("zero polynomial factor".into()));
            }
            for v in p.value.vars() {
                if !self.vars.contains(v) {
                    return Err(Error::UndeclaredVariable(v.clone()));
                }
            }
        }

        // merge duplicates
        let mut pochs: Vec<PochFactor> = Vec::new();
        for p in std::mem::take(&mut self.pochs) {
            match pochs
                .iter_mut()
                .find(|q| q.base == p.base && q.run_var == p.run_var)
            {
                Some(q) => q.power += p.power,
                None => pochs.push(p),
            }
        }
        pochs.retain(|p| p.power != 0);
        pochs.sort_by(|a, b| (&a.run_var, &a.base).cmp(&(&b.run_var, &b.base)));

        let mut exps: Vec<ExpFactor> = Vec::new();
        for e in std::mem::take(&mut self.exps) {
            match exps.iter_mut().find(|f| f.base == e.base) {
                Some(f) => f.exponent = f.exponent.add(&e.exponent),
                None => exps.push(e),
            }
        }
        // constant-exponent exponentials fold into the constant or become
        // polynomial factors
        let mut polys = std::mem::take(&mut self.polys);
        exps.retain_mut(|e| {
            if let Some(c) = e.exponent.as_constant() {
                if Zero::is_zero(&c) {
                    return false;
                }
                if let Some(exp) = as_i64(&c) {
                    match e.base.as_constant() {
                        Some(b) => {
                            self.constant *= rat_pow(&b, exp).expect("nonzero base");
                        }
                        None => polys.push(PolyFactor {
                            value: e.base.to_mpoly(),
                            power: exp as i32,
                        }),
                    }
                    return false;
                }
            }
            true
        });
        for e in &exps {
            if e.exponent.as_constant().is_some() {
                return Err(Error::Domain(format!(
                    "non-integer constant exponent {}",
                    e.exponent.render()
                )));
            }
        }
        exps.sort_by(|a, b| (&a.base, &a.exponent).cmp(&(&b.base, &b.exponent)));

        let mut merged: Vec<PolyFactor> = Vec::new();
        for p in polys {
            if let Some(c) = p.value.as_constant() {
                self.constant *= rat_pow(&c, p.power as i64)?;
                continue;
            }
            match merged.iter_mut().find(|q| q.value == p.value) {
                Some(q) => q.power += p.power,
                None => merged.push(p),
            }
        }
        merged.retain(|p| p.power != 0);
        merged.sort_by_key(|p| p.value.render());

        self.pochs = pochs;
        self.exps = exps;
        self.polys = merged;
        Ok(self)
    }

    /// The quotient G(..., var+1, ...)/G(..., var, ...) as a constant times
    /// linear-form factors with integer powers.
    pub fn shift_quotient_factors(&self, var: &str) -> Result<(Rat, Vec<(LinForm, i32)>)> {
        if !self.vars.contains(&var.to_string()) {
            return Err(Error::UndeclaredVariable(var.to_string()));
        }
        if var == "z" {
            return Err(Error::Domain("cannot shift the free parameter z".into()));
        }
        let mut constant = Rat::one();
        let mut factors: Vec<(LinForm, i32)> = Vec::new();
        // Pochhammer entries whose base moves under the shift, grouped into
        // classes (same run variable, same non-constant part, constants
        // differing by integers); a class cancels to a rational function.
        let mut moved: Vec<(String, LinForm, i32)> = Vec::new();

        for p in &self.pochs {
            if p.run_var == var {
                // (b)_{v+1}/(b)_v = b + v
                factors.push((p.base.add(&LinForm::var(var)), p.power));
                continue;
            }
            let c = p.base.coeff(var);
            if Zero::is_zero(&c) {
                continue;
            }
            moved.push((p.run_var.clone(), p.base.shifted(&c), p.power));
            moved.push((p.run_var.clone(), p.base.clone(), -p.power));
        }

        // partition `moved` into classes
        while let Some((run, base, power)) = moved.pop() {
            let mut class = vec![(base.clone(), power)];
            let mut i = 0;
            while i < moved.len() {
                let same = moved[i].0 == run
                    && moved[i].1.homogeneous() == base.homogeneous()
                    && as_integer(&(moved[i].1.constant_part() - base.constant_part())).is_some();
                if same {
                    let (_, b, e) = moved.remove(i);
                    class.push((b, e));
                } else {
                    i += 1;
                }
            }
            if class.iter().map(|(_, e)| i64::from(*e)).sum::<i64>() != 0 {
                return Err(Error::Domain(format!(
                    "shift quotient in {var} is not rational: unmatched Pochhammer base {}",
                    base.render()
                )));
            }
            // reference: smallest constant in the class; each member is
            // (beta + m)_run with m >= 0, and
            // (beta + m)_run / (beta)_run = prod_{t<m} (run + beta + t)/(beta + t)
            let beta = class
                .iter()
                .map(|(b, _)| b.constant_part().clone())
                .min()
                .expect("nonempty class");
            let beta = LinForm::constant(beta).add(&base.homogeneous());
            let run_form = LinForm::var(&run);
            for (b, e) in class {
                let m = as_i64(&(b.constant_part() - beta.constant_part()))
                    .ok_or_else(|| Error::Internal("class offset overflow".into()))?;
                for t in 0..m {
                    let off = beta.shifted(&Rat::from_integer(t.into()));
                    factors.push((off.add(&run_form), e));
                    factors.push((off, -e));
                }
            }
        }

        for e in &self.exps {
            let c = e.exponent.coeff(var);
            let Some(step) = as_i64(&c) else {
                return Err(Error::Domain("non-integer exponent coefficient".into()));
            };
            if step == 0 {
                continue;
            }
            match e.base.as_constant() {
                Some(b) => constant *= rat_pow(&b, step)?,
                None => factors.push((e.base.clone(), step as i32)),
            }
        }

        for p in &self.polys {
            if p.value.degree(var) == 0 {
                continue;
            }
            // handled generically downstream; here only linear forms occur
            let shifted = p.value.shift_var(var, &Rat::one());
            let up = to_linform(&shifted)
                .ok_or_else(|| Error::Domain("nonlinear polynomial factor".into()))?;
            let lo = to_linform(&p.value).expect("linear if shift is");
            factors.push((up, p.power));
            factors.push((lo, -p.power));
        }

        // cancel identical factors
        let mut merged: Vec<(LinForm, i32)> = Vec::new();
        for (f, e) in factors {
            if let Some(c) = f.as_constant() {
                if Zero::is_zero(&c) {
                    return Err(Error::Pole(format!(
                        "shift quotient in {var} has an identically zero factor"
                    )));
                }
                constant *= rat_pow(&c, e as i64)?;
                continue;
            }
            match merged.iter_mut().find(|(g, _)| *g == f) {
                Some((_, e0)) => *e0 += e,
                None => merged.push((f, e)),
            }
        }
        merged.retain(|(_, e)| *e != 0);
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        Ok((constant, merged))
    }

    /// The quotient G(..., var+1, ...)/G(..., var, ...), fully normalized.
    /// Unlike the factored form this also supports nonlinear polynomial
    /// factors.
    pub fn shift_quotient(&self, var: &str) -> Result<RatFunc> {
        let mut stripped = self.clone();
        stripped.polys.clear();
        let (constant, factors) = stripped.shift_quotient_factors(var)?;
        let mut num = MPoly::constant(constant);
        let mut den = MPoly::one();
        for (f, e) in &factors {
            let p = f.to_mpoly();
            for _ in 0..e.unsigned_abs() {
                if *e > 0 {
                    num = num.mul(&p);
                } else {
                    den = den.mul(&p);
                }
            }
        }
        let mut q = RatFunc::new(num, den);
        for p in &self.polys {
            if p.value.degree(var) == 0 {
                continue;
            }
            let step = RatFunc::new(p.value.shift_var(var, &Rat::one()), p.value.clone());
            q = q.mul(&step.pow(p.power));
        }
        Ok(q)
    }

    /// Exact value of G at an integer/rational assignment.
    pub fn eval_exact(&self, assignment: &BTreeMap<String, Rat>) -> Result<Rat> {
        let get = |v: &str| -> Result<Rat> {
            assignment
                .get(v)
                .cloned()
                .ok_or_else(|| Error::Domain(format!("no value for variable {v}")))
        };
        // denominators first: any zero there is a pole regardless of the
        // numerator
        let mut poch_vals = Vec::with_capacity(self.pochs.len());
        for p in &self.pochs {
            let base = p
                .base
                .eval(assignment)
                .ok_or_else(|| Error::Domain("incomplete assignment".into()))?;
            let n = as_i64(&get(&p.run_var)?).ok_or_else(|| {
                Error::Domain(format!("non-integer value for discrete variable {}", p.run_var))
            })?;
            let v = pochhammer_signed(&base, n)
                .ok_or_else(|| Error::Pole("Pochhammer pole at negative index".into()))?;
            if p.power < 0 && Zero::is_zero(&v) {
                return Err(Error::Pole(format!(
                    "denominator Pochhammer ({})_{} vanishes",
                    p.base.render(),
                    p.run_var
                )));
            }
            poch_vals.push(v);
        }
        let mut poly_vals = Vec::with_capacity(self.polys.len());
        for p in &self.polys {
            let v = p.value.eval(assignment);
            if p.power < 0 && Zero::is_zero(&v) {
                return Err(Error::Pole("denominator polynomial factor vanishes".into()));
            }
            poly_vals.push(v);
        }
        let mut acc = self.constant.clone();
        for (p, v) in self.pochs.iter().zip(&poch_vals) {
            acc *= rat_pow(v, p.power as i64)?;
        }
        for (p, v) in self.polys.iter().zip(&poly_vals) {
            acc *= rat_pow(v, p.power as i64)?;
        }
        for e in &self.exps {
            let base = e
                .base
                .eval(assignment)
                .ok_or_else(|| Error::Domain("incomplete assignment".into()))?;
            let expo = e
                .exponent
                .eval(assignment)
                .ok_or_else(|| Error::Domain("incomplete assignment".into()))?;
            let Some(ei) = as_i64(&expo) else {
                if base.is_one() {
                    continue;
                }
                return Err(Error::Domain(format!(
                    "fractional exponent {} for base {}",
                    render_rat(&expo),
                    e.base.render()
                )));
            };
            if Zero::is_zero(&base) && ei < 0 {
                return Err(Error::Pole("zero base with negative exponent".into()));
            }
            acc *= rat_pow(&base, ei)?;
        }
        Ok(acc)
    }

    /// Least N with G = 0 for all sumVar >= N given values for the other
    /// discrete variables, or None if no numerator Pochhammer terminates.
    /// Verifies the support 0..N is pole-free.
    pub fn termination_bound(
        &self,
        sum_var: &str,
        assignment: &BTreeMap<String, Rat>,
    ) -> Result<Option<u64>> {
        let mut bound: Option<u64> = None;
        let mut identically_zero = false;
        for p in &self.pochs {
            let base = p.base.subst_partial(assignment);
            let Some(b) = base.as_constant() else {
                return Err(Error::Domain(format!(
                    "Pochhammer base {} not concrete under the assignment",
                    base.render()
                )));
            };
            if p.run_var == sum_var {
                if p.power > 0 && is_nonpositive_integer(&b) {
                    let n = (-as_integer(&b).expect("integer")) + BigInt::one();
                    let n = u64::try_from(&n)
                        .map_err(|_| Error::Internal("termination bound overflow".into()))?;
                    bound = Some(bound.map_or(n, |m| m.min(n)));
                }
            } else {
                // constant with respect to the summation variable
                let run = assignment.get(&p.run_var).and_then(as_i64).ok_or_else(|| {
                    Error::Domain(format!("no integer value for run variable {}", p.run_var))
                })?;
                let v = pochhammer_signed(&b, run)
                    .ok_or_else(|| Error::Pole("Pochhammer pole at negative index".into()))?;
                if Zero::is_zero(&v) {
                    if p.power < 0 {
                        return Err(Error::Pole(format!(
                            "denominator Pochhammer ({})_{} vanishes",
                            p.base.render(),
                            p.run_var
                        )));
                    }
                    identically_zero = true;
                }
            }
        }
        if identically_zero {
            return Ok(Some(0));
        }
        let Some(n) = bound else {
            return Ok(None);
        };
        // no denominator may vanish inside the support 0..n
        for p in &self.pochs {
            if p.power >= 0 || p.run_var != sum_var {
                continue;
            }
            let b = p
                .base
                .subst_partial(assignment)
                .as_constant()
                .expect("checked above");
            if is_nonpositive_integer(&b) {
                let first = (-as_integer(&b).expect("integer")) + BigInt::one();
                if first < BigInt::from(n) {
                    return Err(Error::Pole(format!(
                        "denominator Pochhammer ({})_{} vanishes inside the support",
                        p.base.render(),
                        sum_var
                    )));
                }
            }
        }
        if n > 1_000_000 {
            return Err(Error::Internal("termination bound too large to scan".into()));
        }
        for p in &self.polys {
            if p.power >= 0 {
                continue;
            }
            let mut a = assignment.clone();
            for m in 0..n {
                a.insert(sum_var.to_string(), Rat::from_integer(m.into()));
                if Zero::is_zero(&p.value.eval(&a)) {
                    return Err(Error::Pole(
                        "denominator polynomial factor vanishes inside the support".into(),
                    ));
                }
            }
        }
        Ok(Some(n))
    }

    pub fn render(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        if !self.constant.is_one() || (self.pochs.is_empty() && self.exps.is_empty() && self.polys.is_empty()) {
            parts.push(render_rat(&self.constant));
        }
        for e in &self.exps {
            parts.push(format!(
                "({})^{}",
                e.base.render(),
                render_exponent(&e.exponent)
            ));
        }
        for p in &self.pochs {
            let mut s = format!("poch({},{})", p.base.render(), p.run_var);
            if p.power != 1 {
                s.push_str(&format!("^{}", p.power));
            }
            parts.push(s);
        }
        for p in &self.polys {
            let body = to_linform(&p.value)
                .map(|f| f.render())
                .unwrap_or_else(|| p.value.render());
            let mut s = format!("({body})");
            if p.power != 1 {
                s.push_str(&format!("^{}", p.power));
            }
            parts.push(s);
        }
        format!("vars: {}\n{}", self.vars.join(", "), parts.join(" * "))
    }
}

fn render_exponent(e: &LinForm) -> String {
    let vars: Vec<&String> = e.vars().collect();
    if vars.len() == 1 && Zero::is_zero(e.constant_part()) && e.coeff(vars[0]).is_one() {
        return vars[0].clone();
    }
    if let Some(c) = e.as_constant() {
        return render_rat(&c);
    }
    format!("({})", e.render())
}

/// View a polynomial as a linear form when its degree allows it.
pub fn to_linform(p: &MPoly) -> Option<LinForm> {
    let mut out = LinForm::zero();
    for (exps, coeff) in p.terms() {
        let nz: Vec<usize> = (0..exps.len()).filter(|i| exps[*i] != 0).collect();
        match nz.len() {
            0 => out = out.add(&LinForm::constant(coeff.clone())),
            1 if exps[nz[0]] == 1 => {
                out = out.add(&LinForm::var(&p.vars()[nz[0]]).scale(coeff));
            }
            _ => return None,
        }
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// DSL parser
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

impl Lexer {
    fn new(text: &str, start_line: usize) -> Result<Lexer> {
        let mut toks = Vec::new();
        let mut line = start_line;
        let mut col = 1usize;
        let mut chars = text.chars().peekable();
        while let Some(&ch) = chars.peek() {
            let (l, c) = (line, col);
            match ch {
                '\n' => {
                    chars.next();
                    line += 1;
                    col = 1;
                }
                '#' => {
                    while let Some(&c2) = chars.peek() {
                        if c2 == '\n' {
                            break;
                        }
                        chars.next();
                        col += 1;
                    }
                }
                c2 if c2.is_whitespace() => {
                    chars.next();
                    col += 1;
                }
                '*' | '/' | '^' | '(' | ')' | ',' | '+' | '-' => {
                    chars.next();
                    col += 1;
                    let tok = match ch {
                        '*' => Tok::Star,
                        '/' => Tok::Slash,
                        '^' => Tok::Caret,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        ',' => Tok::Comma,
                        '+' => Tok::Plus,
                        _ => Tok::Minus,
                    };
                    toks.push((tok, l, c));
                }
                c2 if c2.is_ascii_digit() => {
                    let mut s = String::new();
                    while let Some(&d) = chars.peek() {
                        if d.is_ascii_digit() {
                            s.push(d);
                            chars.next();
                            col += 1;
                        } else {
                            break;
                        }
                    }
                    toks.push((Tok::Int(s.parse().expect("digits")), l, c));
                }
                c2 if c2.is_ascii_alphabetic() || c2 == '_' => {
                    let mut s = String::new();
                    while let Some(&d) = chars.peek() {
                        if d.is_ascii_alphanumeric() || d == '_' {
                            s.push(d);
                            chars.next();
                            col += 1;
                        } else {
                            break;
                        }
                    }
                    toks.push((Tok::Ident(s), l, c));
                }
                other => {
                    return Err(Error::SyntaxAt {
                        line: l,
                        col: c,
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            }
        }
        Ok(Lexer {
            toks,
            pos: 0,
            end: (line, col),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::SyntaxAt {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }
}

/// Parse a full kernel definition: a `vars:` header line followed by a
/// factor expression.
pub fn parse_term(text: &str) -> Result<HyperTerm> {
    // split the header (first non-empty, non-comment line) from the body
    let mut header: Option<(usize, String)> = None;
    let mut body_start = text.len();
    let mut offset = 0usize;
    for (i, line) in text.split('\n').enumerate() {
        let stripped = line.split('#').next().unwrap_or("").trim();
        if !stripped.is_empty() {
            header = Some((i + 1, stripped.to_string()));
            body_start = (offset + line.len() + 1).min(text.len());
            break;
        }
        offset += line.len() + 1;
    }
    let Some((hline, htext)) = header else {
        return Err(Error::Syntax("empty kernel definition".into()));
    };
    let htext = htext.as_str();
    let Some(rest) = htext.strip_prefix("vars:") else {
        return Err(Error::SyntaxAt {
            line: hline,
            col: 1,
            msg: "expected `vars:` header".into(),
        });
    };
    let mut vars = Vec::new();
    for name in rest.split(',') {
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::SyntaxAt {
                line: hline,
                col: 1,
                msg: format!("bad variable name `{name}`"),
            });
        }
        if vars.contains(&name.to_string()) {
            return Err(Error::SyntaxAt {
                line: hline,
                col: 1,
                msg: format!("duplicate variable `{name}`"),
            });
        }
        vars.push(name.to_string());
    }
    if vars.is_empty() {
        return Err(Error::SyntaxAt {
            line: hline,
            col: 1,
            msg: "no variables declared".into(),
        });
    }

    let body = text.get(body_start..).unwrap_or("");
    let mut lx = Lexer::new(body, hline + 1)?;
    let mut term = HyperTerm {
        vars: vars.clone(),
        constant: Rat::one(),
        pochs: vec![],
        exps: vec![],
        polys: vec![],
    };
    parse_expr(&mut lx, &vars, &mut term)?;
    if lx.peek().is_some() {
        return Err(lx.err("expected `*`, `/`, or end of input"));
    }
    term.canonicalize()
}

/// `factor (("*" | "/") factor)*`, stopping at `)` or end of input.
fn parse_expr(lx: &mut Lexer, vars: &[String], term: &mut HyperTerm) -> Result<()> {
    let mut sign = 1i64;
    loop {
        parse_factor(lx, vars, term, sign)?;
        match lx.peek() {
            Some(Tok::Star) => {
                lx.next();
                sign = 1;
            }
            Some(Tok::Slash) => {
                lx.next();
                sign = -1;
            }
            Some(Tok::RParen) | None => return Ok(()),
            _ => return Err(lx.err("expected `*`, `/`, or end of input")),
        }
    }
}

/// Fold `sub^e` into `term`.
fn merge_scaled(term: &mut HyperTerm, sub: HyperTerm, e: i64) -> Result<()> {
    term.constant *= rat_pow(&sub.constant, e)?;
    let scale = Rat::from_integer(e.into());
    for mut p in sub.pochs {
        p.power = i32::try_from(i64::from(p.power) * e)
            .map_err(|_| Error::Internal("power overflow".into()))?;
        term.pochs.push(p);
    }
    for mut f in sub.exps {
        f.exponent = f.exponent.scale(&scale);
        term.exps.push(f);
    }
    for mut p in sub.polys {
        p.power = i32::try_from(i64::from(p.power) * e)
            .map_err(|_| Error::Internal("power overflow".into()))?;
        term.polys.push(p);
    }
    Ok(())
}

/// One `atom (^ intlinear)?`, folded into the term under construction with
/// the given numerator/denominator sign.
fn parse_factor(lx: &mut Lexer, vars: &[String], term: &mut HyperTerm, sign: i64) -> Result<()> {
    enum Atom {
        Poch(LinForm, String),
        Form(LinForm),
        Group(HyperTerm),
    }
    let atom = match lx.next() {
        Some(Tok::Ident(id)) if id == "poch" => {
            lx.expect(Tok::LParen, "`(` after poch")?;
            let base = parse_linform(lx, vars)?;
            lx.expect(Tok::Comma, "`,` in poch")?;
            let Some(Tok::Ident(run)) = lx.next() else {
                return Err(lx.err("expected run variable in poch"));
            };
            lx.expect(Tok::RParen, "`)` closing poch")?;
            Atom::Poch(base, run)
        }
        Some(Tok::Ident(id)) => {
            if !vars.contains(&id) {
                return Err(lx.err(format!("undeclared variable `{id}`")));
            }
            Atom::Form(LinForm::var(&id))
        }
        Some(Tok::Int(n)) => {
            let mut r = Rat::from_integer(n);
            // rational literal p/q: only when `/` is followed by an integer
            if lx.peek() == Some(&Tok::Slash) {
                if let Some((Tok::Int(_), _, _)) = lx.toks.get(lx.pos + 1) {
                    lx.next();
                    let Some(Tok::Int(d)) = lx.next() else {
                        unreachable!()
                    };
                    if Zero::is_zero(&d) {
                        return Err(lx.err("zero denominator"));
                    }
                    r /= Rat::from_integer(d);
                }
            }
            Atom::Form(LinForm::constant(r))
        }
        Some(Tok::LParen) => {
            // a parenthesized linear form, or a full sub-expression such as
            // a grouped product of Pochhammer factors
            let save = lx.pos;
            let as_form = parse_linform(lx, vars);
            match as_form {
                Ok(f) if lx.peek() == Some(&Tok::RParen) => {
                    lx.next();
                    Atom::Form(f)
                }
                _ => {
                    lx.pos = save;
                    let mut sub = HyperTerm {
                        vars: vars.to_vec(),
                        constant: Rat::one(),
                        pochs: vec![],
                        exps: vec![],
                        polys: vec![],
                    };
                    parse_expr(lx, vars, &mut sub)?;
                    lx.expect(Tok::RParen, "`)` closing group")?;
                    Atom::Group(sub)
                }
            }
        }
        _ => return Err(lx.err("expected a factor")),
    };

    let exponent: LinForm = if lx.peek() == Some(&Tok::Caret) {
        lx.next();
        parse_intlinear(lx, vars)?
    } else {
        LinForm::constant(Rat::one())
    };

    match atom {
        Atom::Poch(base, run) => {
            if !vars.contains(&run) {
                return Err(lx.err(format!("undeclared variable `{run}`")));
            }
            let Some(p) = exponent.as_constant().as_ref().and_then(as_i64) else {
                return Err(lx.err("Pochhammer power must be a constant integer"));
            };
            term.pochs.push(PochFactor {
                base,
                run_var: run,
                power: i32::try_from(sign * p)
                    .map_err(|_| lx.err("power overflow"))?,
            });
        }
        Atom::Group(sub) => {
            let Some(p) = exponent.as_constant().as_ref().and_then(as_i64) else {
                return Err(lx.err("group power must be a constant integer"));
            };
            merge_scaled(term, sub, sign * p)?;
        }
        Atom::Form(f) => {
            let exponent = if sign < 0 {
                exponent.scale(&Rat::from_integer((-1).into()))
            } else {
                exponent
            };
            if let (Some(c), Some(e)) = (f.as_constant(), exponent.as_constant()) {
                // constant^integer folds straight into the constant
                if let Some(ei) = as_i64(&e) {
                    if Zero::is_zero(&c) && ei != 0 {
                        return Err(lx.err("zero base"));
                    }
                    term.constant *= rat_pow(&c, ei).map_err(|e| lx.err(e.to_string()))?;
                    return Ok(());
                }
            }
            if exponent.as_constant().is_some() {
                // polynomial weight with an integer power
                let Some(p) = exponent.as_constant().as_ref().and_then(as_i64) else {
                    return Err(lx.err("polynomial power must be a constant integer"));
                };
                if p != 0 {
                    term.polys.push(PolyFactor {
                        value: f.to_mpoly(),
                        power: p as i32,
                    });
                }
            } else {
                term.exps.push(ExpFactor {
                    base: f,
                    exponent,
                });
            }
        }
    }
    Ok(())
}

/// Signed rational-coefficient linear form: `term ((+|-) term)*` with
/// `term := rational (* ident)? | ident`.
fn parse_linform(lx: &mut Lexer, vars: &[String]) -> Result<LinForm> {
    let mut acc = LinForm::zero();
    let mut first = true;
    loop {
        let sign = match lx.peek() {
            Some(Tok::Minus) => {
                lx.next();
                -Rat::one()
            }
            Some(Tok::Plus) if !first => {
                lx.next();
                Rat::one()
            }
            _ if first => Rat::one(),
            _ => break,
        };
        let t = match lx.next() {
            Some(Tok::Int(n)) => {
                let mut r = Rat::from_integer(n);
                if lx.peek() == Some(&Tok::Slash) {
                    lx.next();
                    let Some(Tok::Int(d)) = lx.next() else {
                        return Err(lx.err("expected denominator"));
                    };
                    if Zero::is_zero(&d) {
                        return Err(lx.err("zero denominator"));
                    }
                    r /= Rat::from_integer(d);
                }
                if lx.peek() == Some(&Tok::Star) {
                    lx.next();
                    let Some(Tok::Ident(v)) = lx.next() else {
                        return Err(lx.err("expected variable after `*`"));
                    };
                    if !vars.contains(&v) {
                        return Err(lx.err(format!("undeclared variable `{v}`")));
                    }
                    LinForm::var(&v).scale(&r)
                } else {
                    LinForm::constant(r)
                }
            }
            Some(Tok::Ident(v)) => {
                if !vars.contains(&v) {
                    return Err(lx.err(format!("undeclared variable `{v}`")));
                }
                LinForm::var(&v)
            }
            _ => return Err(lx.err("expected a linear-form term")),
        };
        acc = acc.add(&t.scale(&sign));
        first = false;
        match lx.peek() {
            Some(Tok::Plus) | Some(Tok::Minus) => continue,
            _ => break,
        }
    }
    Ok(acc)
}

/// Exponent after `^`: a signed integer, a bare variable, or a parenthesized
/// integer-coefficient linear form.
fn parse_intlinear(lx: &mut Lexer, vars: &[String]) -> Result<LinForm> {
    let f = match lx.peek() {
        Some(Tok::LParen) => {
            lx.next();
            let f = parse_linform(lx, vars)?;
            lx.expect(Tok::RParen, "`)` closing exponent")?;
            f
        }
        Some(Tok::Minus) => {
            lx.next();
            match lx.next() {
                Some(Tok::Int(n)) => LinForm::constant(-Rat::from_integer(n)),
                Some(Tok::Ident(v)) if vars.contains(&v) => {
                    LinForm::var(&v).scale(&(-Rat::one()))
                }
                _ => return Err(lx.err("expected exponent")),
            }
        }
        Some(Tok::Int(_)) => {
            let Some(Tok::Int(n)) = lx.next() else {
                unreachable!()
            };
            LinForm::constant(Rat::from_integer(n))
        }
        Some(Tok::Ident(_)) => {
            let Some(Tok::Ident(v)) = lx.next() else {
                unreachable!()
            };
            if !vars.contains(&v) {
                return Err(lx.err(format!("undeclared variable `{v}`")));
            }
            LinForm::var(&v)
        }
        _ => return Err(lx.err("expected exponent")),
    };
    if !f.has_integer_coeffs() {
        return Err(lx.err("exponent must have integer coefficients"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    const A1: &str = "vars: n, k\n3 * (64/63)^k * poch(-k,n)*poch(1/2,n)^2 / (poch(1/2-k,n)^2*poch(1,n)) * (1/64)^n * (42*n+5)";
    const B1: &str = "vars: n, k\npoch(-k,n)*poch(-1/2*k,n)*poch(1/2-1/2*k,n) / (poch(1/2-k,n)^2*poch(1,n)) * (-1)^n * (16/63)^(2*n) * (130*n-2*k+15)";
    const ANCHOR: &str = "vars: n\npoch(1/2,n)^3 / poch(1,n)^3 * (1/64)^n * (42*n+5)";

    fn assign(pairs: &[(&str, i64)]) -> BTreeMap<String, Rat> {
        pairs
            .iter()
            .map(|(v, x)| (v.to_string(), rat_int(*x)))
            .collect()
    }

    #[test]
    fn parse_a1_structure() {
        let t = parse_term(A1).unwrap();
        assert_eq!(t.vars, vec!["n", "k"]);
        assert_eq!(t.constant, rat_int(3));
        assert_eq!(t.pochs.len(), 4);
        assert_eq!(t.exps.len(), 2);
        assert_eq!(t.polys.len(), 1);
    }

    #[test]
    fn undeclared_variable_rejected() {
        let r = parse_term("vars: k\npoch(1/2,n)");
        assert!(r.is_err());
    }

    #[test]
    fn division_of_parenthesized_group() {
        // division applies factor-by-factor inside a following group
        let t = parse_term("vars: n\npoch(1,n) / (poch(1/2,n) * poch(1,n))").unwrap();
        // poch(1,n) cancels
        assert_eq!(t.pochs.len(), 1);
        assert_eq!(t.pochs[0].power, -1);
    }

    #[test]
    fn render_roundtrip_fixed_point() {
        for src in [A1, B1, ANCHOR] {
            let t = parse_term(src).unwrap();
            let r1 = t.render();
            let t2 = parse_term(&r1).unwrap();
            assert_eq!(t, t2, "round trip changed the term for {src}");
            assert_eq!(t2.render(), r1);
        }
    }

    #[test]
    fn eval_a1_values() {
        let t = parse_term(A1).unwrap();
        assert_eq!(t.eval_exact(&assign(&[("n", 0), ("k", 0)])).unwrap(), rat_int(15));
        assert_eq!(
            t.eval_exact(&assign(&[("n", 1), ("k", 1)])).unwrap(),
            rat(-47, 21)
        );
        let b = parse_term(B1).unwrap();
        assert_eq!(
            b.eval_exact(&assign(&[("n", 1), ("k", 1)])).unwrap(),
            rat_int(0)
        );
        assert_eq!(b.eval_exact(&assign(&[("n", 0), ("k", 0)])).unwrap(), rat_int(15));
    }

    #[test]
    fn shift_quotient_in_n_matches_expected() {
        let t = parse_term(A1).unwrap();
        let q = t.shift_quotient("n").unwrap();
        // (1/64)(n-k)(n+1/2)^2(42n+47) / ((n+1/2-k)^2 (n+1)(42n+5))
        let n = MPoly::var("n");
        let k = MPoly::var("k");
        let half = MPoly::constant(rat(1, 2));
        let num = n
            .sub(&k)
            .mul(&n.add(&half).pow(2))
            .mul(&n.mul_rat(&rat_int(42)).add(&MPoly::constant(rat_int(47))))
            .mul_rat(&rat(1, 64));
        let den = n
            .add(&half)
            .sub(&k)
            .pow(2)
            .mul(&n.add(&MPoly::one()))
            .mul(&n.mul_rat(&rat_int(42)).add(&MPoly::constant(rat_int(5))));
        assert_eq!(q, RatFunc::new(num, den));
    }

    #[test]
    fn shift_quotient_simple_cases() {
        let t = parse_term("vars: n, z\npoch(1/2,n) / poch(1,n) * z^n").unwrap();
        let q = t.shift_quotient("n").unwrap();
        let n = MPoly::var("n");
        let z = MPoly::var("z");
        let want = RatFunc::new(
            z.mul(&n.add(&MPoly::constant(rat(1, 2)))),
            n.add(&MPoly::one()),
        );
        assert_eq!(q, want);
        // a constant kernel has quotient 1
        let c = parse_term("vars: n\n5").unwrap();
        assert_eq!(c.shift_quotient("n").unwrap(), RatFunc::one());
    }

    #[test]
    fn shift_quotient_in_k_class_cancellation() {
        // B1 has bases -k/2 and 1/2-k/2 forming a half-integer class in k
        let b = parse_term(B1).unwrap();
        let q = b.shift_quotient("k").unwrap();
        // validate pointwise against exact evaluation on a grid
        for n in 0..6i64 {
            for k in 0..6i64 {
                let here = b.eval_exact(&assign(&[("n", n), ("k", k)])).unwrap();
                let there = b.eval_exact(&assign(&[("n", n), ("k", k + 1)])).unwrap();
                let qv = q.eval(&assign(&[("n", n), ("k", k)]));
                match qv {
                    Some(v) => assert_eq!(&here * &v, there, "n={n} k={k}"),
                    None => assert!(num::Zero::is_zero(&here), "pole with nonzero term"),
                }
            }
        }
    }

    #[test]
    fn shift_quotient_agrees_with_eval_on_grid() {
        for src in [A1, B1] {
            let t = parse_term(src).unwrap();
            for var in ["n", "k"] {
                let q = t.shift_quotient(var).unwrap();
                let mut checked = 0;
                for n in 0..8i64 {
                    for k in 0..8i64 {
                        let a = assign(&[("n", n), ("k", k)]);
                        let mut a2 = a.clone();
                        a2.insert(var.to_string(), rat_int(if var == "n" { n + 1 } else { k + 1 }));
                        let (Ok(here), Ok(there)) = (t.eval_exact(&a), t.eval_exact(&a2)) else {
                            continue;
                        };
                        if let Some(v) = q.eval(&a) {
                            assert_eq!(&here * &v, there, "{src} {var} n={n} k={k}");
                            checked += 1;
                        } else {
                            assert!(num::Zero::is_zero(&here));
                        }
                    }
                }
                assert!(checked >= 50, "grid too sparse: {checked}");
            }
        }
    }

    #[test]
    fn termination_bounds() {
        let a = parse_term(A1).unwrap();
        assert_eq!(
            a.termination_bound("n", &assign(&[("k", 5)])).unwrap(),
            Some(6)
        );
        let b = parse_term(B1).unwrap();
        assert_eq!(
            b.termination_bound("n", &assign(&[("k", 1)])).unwrap(),
            Some(1)
        );
        let anchor = parse_term(ANCHOR).unwrap();
        assert_eq!(anchor.termination_bound("n", &assign(&[])).unwrap(), None);
        // vanishing beyond the bound (spot check)
        for k in [3i64, 5] {
            let n0 = a
                .termination_bound("n", &assign(&[("k", k)]))
                .unwrap()
                .unwrap() as i64;
            for n in n0..n0 + 10 {
                assert_eq!(
                    a.eval_exact(&assign(&[("n", n), ("k", k)])).unwrap(),
                    rat_int(0)
                );
            }
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let r = parse_term("vars: n\npoch(1/2,n) ^");
        match r {
            Err(Error::SyntaxAt { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected positioned syntax error, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_whitespace_ignored() {
        let t = parse_term(
            "# kernel\nvars: n   # summation variable\n  poch(1/2,n)^3 / poch(1,n)^3\n  * (1/64)^n # weight follows\n  * (42*n+5)",
        )
        .unwrap();
        let plain = parse_term(ANCHOR).unwrap();
        assert_eq!(t, plain);
    }
}
