//! Mini-language for objective templates used in bulk loading.
//!
//! A node template describes the common shape of every node objective; the
//! per-node numbers come from data columns bound at instantiation time.
//!
//! ```text
//! template := term ('+' term)* [';' box]
//! term     := [(NUMBER | SYM) '*'] atom
//! atom     := 'sum_squares(x - SYM)' | 'norm1(x - SYM)' | 'norm2(x - SYM)'
//!           | 'huber(x - SYM, NUMBER)' | 'linear(SYM)' | 'zero()'
//! box      := 'box(' (SYM | NUMBER) ',' (SYM | NUMBER) ')'
//! ```
//!
//! Edge templates are a single term: `zero()`, `sq_diff(w)`, `netlasso(w)`,
//! or `abs_diff(w)` with `w` a number or a column name. Whitespace is
//! insignificant everywhere. Numbers are decimal with optional exponent;
//! there is no expression arithmetic inside templates.

use std::collections::BTreeMap;

use crate::atom::{BoxConstraint, EdgeAtom, NodeAtom};
use crate::error::{Error, Result};

/// A value bound to a column name: a scalar or a vector.
#[derive(Clone, Debug, PartialEq)]
pub enum ColumnValue {
    Scalar(f64),
    Vector(Vec<f64>),
}

/// Named bindings for one data row.
pub type Bindings = BTreeMap<String, ColumnValue>;

/// A number appearing in a template: a literal or a data column reference.
#[derive(Clone, Debug, PartialEq)]
pub enum ValueRef {
    Literal(f64),
    Column(String),
}

impl ValueRef {
    fn render(&self) -> String {
        match self {
            ValueRef::Literal(v) => format!("{v:?}"),
            ValueRef::Column(c) => c.clone(),
        }
    }

    fn resolve_scalar(&self, bindings: &Bindings) -> Result<f64> {
        match self {
            ValueRef::Literal(v) => Ok(*v),
            ValueRef::Column(name) => match bindings.get(name) {
                Some(ColumnValue::Scalar(v)) => Ok(*v),
                Some(ColumnValue::Vector(v)) if v.len() == 1 => Ok(v[0]),
                Some(ColumnValue::Vector(v)) => Err(Error::RowDimensionMismatch(format!(
                    "column `{name}` must be scalar, got a vector of length {}",
                    v.len()
                ))),
                None => Err(Error::MissingColumn(name.clone())),
            },
        }
    }

    fn resolve_param(&self, bindings: &Bindings, dim: usize) -> Result<Vec<f64>> {
        match self {
            ValueRef::Literal(v) => Ok(vec![*v]),
            ValueRef::Column(name) => match bindings.get(name) {
                Some(ColumnValue::Scalar(v)) => Ok(vec![*v]),
                Some(ColumnValue::Vector(v)) if v.len() == dim || v.len() == 1 => Ok(v.clone()),
                Some(ColumnValue::Vector(v)) => Err(Error::RowDimensionMismatch(format!(
                    "column `{name}` has length {}, expected {dim} or 1",
                    v.len()
                ))),
                None => Err(Error::MissingColumn(name.clone())),
            },
        }
    }
}

/// The atom shape of one template term. Shifts and slopes always come from
/// data columns; the Huber threshold is a literal.
#[derive(Clone, Debug, PartialEq)]
pub enum AtomPattern {
    SumSquares { shift: String },
    Norm1 { shift: String },
    Norm2 { shift: String },
    Huber { shift: String, threshold: f64 },
    Linear { slope: String },
    Zero,
}

impl AtomPattern {
    fn render(&self) -> String {
        match self {
            AtomPattern::SumSquares { shift } => format!("sum_squares(x - {shift})"),
            AtomPattern::Norm1 { shift } => format!("norm1(x - {shift})"),
            AtomPattern::Norm2 { shift } => format!("norm2(x - {shift})"),
            AtomPattern::Huber { shift, threshold } => {
                format!("huber(x - {shift}, {threshold:?})")
            }
            AtomPattern::Linear { slope } => format!("linear({slope})"),
            AtomPattern::Zero => "zero()".to_string(),
        }
    }

    fn symbol(&self) -> Option<&str> {
        match self {
            AtomPattern::SumSquares { shift }
            | AtomPattern::Norm1 { shift }
            | AtomPattern::Norm2 { shift }
            | AtomPattern::Huber { shift, .. } => Some(shift),
            AtomPattern::Linear { slope } => Some(slope),
            AtomPattern::Zero => None,
        }
    }
}

/// One weighted term of a node template.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeTerm {
    pub coeff: ValueRef,
    pub atom: AtomPattern,
}

/// A parsed node objective template.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveTemplate {
    pub terms: Vec<NodeTerm>,
    pub bound: Option<(ValueRef, ValueRef)>,
}

impl ObjectiveTemplate {
    /// Template source that parses back to a structurally identical template.
    pub fn render(&self) -> String {
        let mut out = self
            .terms
            .iter()
            .map(|t| {
                let atom = t.atom.render();
                match &t.coeff {
                    ValueRef::Literal(v) if *v == 1.0 => atom,
                    other => format!("{}*{atom}", other.render()),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ");
        if let Some((lo, hi)) = &self.bound {
            out.push_str(&format!("; box({}, {})", lo.render(), hi.render()));
        }
        out
    }

    /// Data symbols referenced by the template, in template order.
    pub fn symbols(&self) -> Vec<&str> {
        let mut syms = Vec::new();
        for t in &self.terms {
            if let ValueRef::Column(c) = &t.coeff {
                syms.push(c.as_str());
            }
            if let Some(s) = t.atom.symbol() {
                syms.push(s);
            }
        }
        if let Some((lo, hi)) = &self.bound {
            for v in [lo, hi] {
                if let ValueRef::Column(c) = v {
                    syms.push(c.as_str());
                }
            }
        }
        syms
    }

    /// Node dimension implied by a data row: the length of the first
    /// vector-valued binding among the template's symbols, else 1.
    pub fn infer_dim(&self, bindings: &Bindings) -> usize {
        for sym in self.symbols() {
            if let Some(ColumnValue::Vector(v)) = bindings.get(sym) {
                if !v.is_empty() {
                    return v.len();
                }
            }
        }
        1
    }

    /// Fills the template with one row's data, producing fully numeric atoms
    /// and an optional box for a node of dimension `dim`.
    pub fn instantiate(
        &self,
        bindings: &Bindings,
        dim: usize,
    ) -> Result<(Vec<NodeAtom>, Option<BoxConstraint>)> {
        let mut atoms = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let weight = term.coeff.resolve_scalar(bindings)?;
            if !weight.is_finite() {
                return Err(Error::InvalidAtom(format!(
                    "term weight must be finite, got {weight}"
                )));
            }
            if weight < 0.0 {
                return Err(Error::NegativeWeight {
                    weight,
                    context: "template term coefficient".to_string(),
                });
            }
            atoms.push(match &term.atom {
                AtomPattern::SumSquares { shift } => NodeAtom::SumSquares {
                    weight,
                    shift: column_vector(shift, bindings, dim)?,
                },
                AtomPattern::Norm1 { shift } => NodeAtom::Norm1 {
                    weight,
                    shift: column_vector(shift, bindings, dim)?,
                },
                AtomPattern::Norm2 { shift } => NodeAtom::Norm2 {
                    weight,
                    shift: column_vector(shift, bindings, dim)?,
                },
                AtomPattern::Huber { shift, threshold } => NodeAtom::Huber {
                    weight,
                    shift: column_vector(shift, bindings, dim)?,
                    threshold: *threshold,
                },
                AtomPattern::Linear { slope } => NodeAtom::Linear {
                    weight,
                    slope: column_vector(slope, bindings, dim)?,
                },
                AtomPattern::Zero => NodeAtom::Zero,
            });
        }
        let bound = match &self.bound {
            None => None,
            Some((lo, hi)) => Some(BoxConstraint::new(
                lo.resolve_param(bindings, dim)?,
                hi.resolve_param(bindings, dim)?,
            )),
        };
        Ok((atoms, bound))
    }
}

fn column_vector(name: &str, bindings: &Bindings, dim: usize) -> Result<Vec<f64>> {
    ValueRef::Column(name.to_string()).resolve_param(bindings, dim)
}

/// A parsed edge objective template: a single coupling atom whose weight is
/// a literal or a per-edge data column.
#[derive(Clone, Debug, PartialEq)]
pub enum EdgeObjectiveTemplate {
    Zero,
    SqDiff(ValueRef),
    NetLasso(ValueRef),
    AbsDiff(ValueRef),
}

impl EdgeObjectiveTemplate {
    pub fn render(&self) -> String {
        match self {
            EdgeObjectiveTemplate::Zero => "zero()".to_string(),
            EdgeObjectiveTemplate::SqDiff(w) => format!("sq_diff({})", w.render()),
            EdgeObjectiveTemplate::NetLasso(w) => format!("netlasso({})", w.render()),
            EdgeObjectiveTemplate::AbsDiff(w) => format!("abs_diff({})", w.render()),
        }
    }

    pub fn instantiate(&self, bindings: &Bindings) -> Result<Vec<EdgeAtom>> {
        let resolve = |w: &ValueRef| -> Result<f64> {
            let weight = w.resolve_scalar(bindings)?;
            if !weight.is_finite() {
                return Err(Error::InvalidAtom(format!(
                    "edge weight must be finite, got {weight}"
                )));
            }
            if weight < 0.0 {
                return Err(Error::NegativeWeight {
                    weight,
                    context: "edge template weight".to_string(),
                });
            }
            Ok(weight)
        };
        Ok(vec![match self {
            EdgeObjectiveTemplate::Zero => EdgeAtom::Zero,
            EdgeObjectiveTemplate::SqDiff(w) => EdgeAtom::sq_diff(resolve(w)?),
            EdgeObjectiveTemplate::NetLasso(w) => EdgeAtom::netlasso(resolve(w)?),
            EdgeObjectiveTemplate::AbsDiff(w) => EdgeAtom::abs_diff(resolve(w)?),
        }])
    }
}

/// Parses a node objective template.
pub fn parse_node_template(src: &str) -> Result<ObjectiveTemplate> {
    let mut p = Parser::new(src);
    p.skip_ws();
    let mut terms = vec![p.node_term()?];
    loop {
        p.skip_ws();
        if p.eat(b'+') {
            terms.push(p.node_term()?);
        } else {
            break;
        }
    }
    let mut bound = None;
    loop {
        p.skip_ws();
        if !p.eat(b';') {
            break;
        }
        p.skip_ws();
        let off = p.pos;
        let name = p.ident()?;
        if name != "box" {
            return Err(p.err_at(off, "expected `box` after `;`"));
        }
        if bound.is_some() {
            return Err(Error::DuplicateBox);
        }
        p.skip_ws();
        p.expect(b'(')?;
        let lo = p.value_ref()?;
        p.skip_ws();
        p.expect(b',')?;
        let hi = p.value_ref()?;
        p.skip_ws();
        p.expect(b')')?;
        bound = Some((lo, hi));
    }
    p.finish()?;
    Ok(ObjectiveTemplate { terms, bound })
}

/// Parses an edge objective template. Multiple terms are grammar-valid but
/// rejected: the catalog supports exactly one coupling atom per edge.
pub fn parse_edge_template(src: &str) -> Result<EdgeObjectiveTemplate> {
    let mut p = Parser::new(src);
    p.skip_ws();
    let first = p.edge_term()?;
    p.skip_ws();
    if p.eat(b'+') {
        // Consume the rest so pure syntax errors still surface as such.
        loop {
            p.edge_term()?;
            p.skip_ws();
            if !p.eat(b'+') {
                break;
            }
        }
        p.finish()?;
        return Err(Error::UnsupportedComposite(
            "edge objectives support a single coupling atom".into(),
        ));
    }
    p.finish()?;
    Ok(first)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn err_at(&self, offset: usize, message: &str) -> Error {
        Error::SyntaxError {
            offset,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err_at(self.pos, &format!("expected `{}`", b as char)))
        }
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.err_at(self.pos, "unexpected trailing input"));
        }
        Ok(())
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        match self.peek() {
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => {}
            _ => return Err(self.err_at(start, "expected identifier")),
        }
        while let Some(b) = self.peek() {
            if b.is_ascii_alphanumeric() || b == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(b) if b.is_ascii_digit() || b == b'.') {
            self.pos += 1;
        }
        if self.pos == start || (self.pos == start + 1 && self.src[start] == b'-') {
            return Err(self.err_at(start, "expected number"));
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            let mut digits = 0;
            while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
                self.pos += 1;
                digits += 1;
            }
            if digits == 0 {
                return Err(self.err_at(self.pos, "expected exponent digits"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos])
            .map_err(|_| self.err_at(start, "invalid number"))?;
        text.parse::<f64>()
            .map_err(|_| self.err_at(start, "invalid number"))
    }

    fn starts_number(&self) -> bool {
        matches!(self.peek(), Some(b) if b.is_ascii_digit() || b == b'.' || b == b'-')
    }

    fn value_ref(&mut self) -> Result<ValueRef> {
        self.skip_ws();
        if self.starts_number() {
            Ok(ValueRef::Literal(self.number()?))
        } else {
            Ok(ValueRef::Column(self.ident()?))
        }
    }

    fn node_term(&mut self) -> Result<NodeTerm> {
        self.skip_ws();
        if self.starts_number() {
            let off = self.pos;
            let coeff = self.number()?;
            if coeff < 0.0 {
                return Err(self.err_at(off, "term coefficient must be nonnegative"));
            }
            self.skip_ws();
            self.expect(b'*')?;
            self.skip_ws();
            let name_off = self.pos;
            let name = self.ident()?;
            let atom = self.atom_pattern(&name, name_off)?;
            return Ok(NodeTerm {
                coeff: ValueRef::Literal(coeff),
                atom,
            });
        }
        let name_off = self.pos;
        let name = self.ident()?;
        self.skip_ws();
        if self.eat(b'*') {
            self.skip_ws();
            let atom_off = self.pos;
            let atom_name = self.ident()?;
            let atom = self.atom_pattern(&atom_name, atom_off)?;
            return Ok(NodeTerm {
                coeff: ValueRef::Column(name),
                atom,
            });
        }
        let atom = self.atom_pattern(&name, name_off)?;
        Ok(NodeTerm {
            coeff: ValueRef::Literal(1.0),
            atom,
        })
    }

    fn atom_pattern(&mut self, name: &str, name_off: usize) -> Result<AtomPattern> {
        let shifted = |p: &mut Self| -> Result<String> {
            p.skip_ws();
            p.expect(b'(')?;
            p.skip_ws();
            let var_off = p.pos;
            let var = p.ident()?;
            if var != "x" {
                return Err(p.err_at(var_off, "expected the variable symbol `x`"));
            }
            p.skip_ws();
            p.expect(b'-')?;
            p.skip_ws();
            p.ident()
        };
        match name {
            "sum_squares" => {
                let shift = shifted(self)?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(AtomPattern::SumSquares { shift })
            }
            "norm1" => {
                let shift = shifted(self)?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(AtomPattern::Norm1 { shift })
            }
            "norm2" => {
                let shift = shifted(self)?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(AtomPattern::Norm2 { shift })
            }
            "huber" => {
                let shift = shifted(self)?;
                self.skip_ws();
                self.expect(b',')?;
                self.skip_ws();
                let off = self.pos;
                let threshold = self.number()?;
                if !(threshold.is_finite() && threshold > 0.0) {
                    return Err(self.err_at(off, "huber threshold must be positive"));
                }
                self.skip_ws();
                self.expect(b')')?;
                Ok(AtomPattern::Huber { shift, threshold })
            }
            "linear" => {
                self.skip_ws();
                self.expect(b'(')?;
                self.skip_ws();
                let slope = self.ident()?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(AtomPattern::Linear { slope })
            }
            "zero" => {
                self.skip_ws();
                self.expect(b'(')?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(AtomPattern::Zero)
            }
            _ => {
                let _ = name_off;
                Err(Error::UnknownAtom(name.to_string()))
            }
        }
    }

    fn edge_term(&mut self) -> Result<EdgeObjectiveTemplate> {
        self.skip_ws();
        let name = self.ident()?;
        self.skip_ws();
        self.expect(b'(')?;
        match name.as_str() {
            "zero" => {
                self.skip_ws();
                self.expect(b')')?;
                Ok(EdgeObjectiveTemplate::Zero)
            }
            "sq_diff" | "netlasso" | "abs_diff" => {
                let off = self.pos;
                let w = self.value_ref()?;
                if let ValueRef::Literal(v) = &w {
                    if *v < 0.0 {
                        return Err(self.err_at(off, "edge weight must be nonnegative"));
                    }
                }
                self.skip_ws();
                self.expect(b')')?;
                Ok(match name.as_str() {
                    "sq_diff" => EdgeObjectiveTemplate::SqDiff(w),
                    "netlasso" => EdgeObjectiveTemplate::NetLasso(w),
                    _ => EdgeObjectiveTemplate::AbsDiff(w),
                })
            }
            _ => Err(Error::UnknownAtom(name)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::eval_node_objective;

    #[test]
    fn minimal_template() {
        let t = parse_node_template("sum_squares(x - a)").unwrap();
        assert_eq!(t.terms.len(), 1);
        assert_eq!(t.terms[0].coeff, ValueRef::Literal(1.0));
        assert_eq!(
            t.terms[0].atom,
            AtomPattern::SumSquares {
                shift: "a".to_string()
            }
        );
        assert!(t.bound.is_none());
    }

    #[test]
    fn composite_with_coefficients() {
        let t = parse_node_template("0.5*huber(x - a, 2.0) + linear(c)").unwrap();
        assert_eq!(t.terms.len(), 2);
        assert_eq!(t.terms[0].coeff, ValueRef::Literal(0.5));
        assert_eq!(
            t.terms[0].atom,
            AtomPattern::Huber {
                shift: "a".to_string(),
                threshold: 2.0
            }
        );
        assert_eq!(t.terms[1].coeff, ValueRef::Literal(1.0));
    }

    #[test]
    fn square_is_not_a_dsl_atom() {
        assert!(matches!(
            parse_node_template("square(x)"),
            Err(Error::UnknownAtom(name)) if name == "square"
        ));
    }

    #[test]
    fn column_coefficient() {
        let t = parse_node_template("w*norm1(x - a)").unwrap();
        assert_eq!(t.terms[0].coeff, ValueRef::Column("w".to_string()));
    }

    #[test]
    fn box_suffix_with_literal_and_column() {
        let t = parse_node_template("sum_squares(x-a); box(lo, 0.0)").unwrap();
        assert_eq!(
            t.bound,
            Some((ValueRef::Column("lo".to_string()), ValueRef::Literal(0.0)))
        );
    }

    #[test]
    fn duplicate_box_rejected() {
        assert!(matches!(
            parse_node_template("zero(); box(0, 1); box(0, 2)"),
            Err(Error::DuplicateBox)
        ));
    }

    #[test]
    fn trailing_garbage_rejected_with_offset() {
        let src = "sum_squares(x - a) garbage";
        match parse_node_template(src) {
            Err(Error::SyntaxError { offset, .. }) => assert_eq!(offset, 19),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn negative_coefficient_rejected() {
        assert!(parse_node_template("-0.5*norm1(x - a)").is_err());
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse_node_template("  0.5 * huber( x - a , 1.5 )+linear( c ) ").unwrap();
        let b = parse_node_template("0.5*huber(x-a,1.5)+linear(c)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn render_round_trips() {
        for src in [
            "sum_squares(x - a)",
            "0.5*huber(x - a, 2.0) + linear(c)",
            "w*norm1(x - a) + 2.0*norm2(x - b)",
            "zero(); box(lo, hi)",
            "1e-3*sum_squares(x - mu); box(-1.5, 1.5)",
        ] {
            let t = parse_node_template(src).unwrap();
            let again = parse_node_template(&t.render()).unwrap();
            assert_eq!(t, again, "round trip failed for `{src}`");
        }
        for src in ["netlasso(w)", "sq_diff(0.75)", "abs_diff(1e2)", "zero()"] {
            let t = parse_edge_template(src).unwrap();
            let again = parse_edge_template(&t.render()).unwrap();
            assert_eq!(t, again, "round trip failed for `{src}`");
        }
    }

    #[test]
    fn edge_templates() {
        assert_eq!(
            parse_edge_template("netlasso(w)").unwrap(),
            EdgeObjectiveTemplate::NetLasso(ValueRef::Column("w".to_string()))
        );
        assert_eq!(
            parse_edge_template("sq_diff(1.0)").unwrap(),
            EdgeObjectiveTemplate::SqDiff(ValueRef::Literal(1.0))
        );
    }

    #[test]
    fn edge_composite_rejected() {
        assert!(matches!(
            parse_edge_template("netlasso(w) + sq_diff(v)"),
            Err(Error::UnsupportedComposite(_))
        ));
    }

    #[test]
    fn edge_unknown_atom() {
        assert!(matches!(
            parse_edge_template("norm1(w)"),
            Err(Error::UnknownAtom(_))
        ));
    }

    #[test]
    fn instantiate_vector_shift() {
        let t = parse_node_template("sum_squares(x - a)").unwrap();
        let mut bindings = Bindings::new();
        bindings.insert("a".to_string(), ColumnValue::Vector(vec![1.0, 2.0, 3.0]));
        let (atoms, bound) = t.instantiate(&bindings, 3).unwrap();
        assert_eq!(atoms, vec![NodeAtom::sum_squares(1.0, vec![1.0, 2.0, 3.0])]);
        assert!(bound.is_none());
    }

    #[test]
    fn instantiate_scalar_broadcast() {
        let t = parse_node_template("sum_squares(x - a)").unwrap();
        let mut bindings = Bindings::new();
        bindings.insert("a".to_string(), ColumnValue::Scalar(0.5));
        assert_eq!(t.infer_dim(&bindings), 1);
        let (atoms, _) = t.instantiate(&bindings, 3).unwrap();
        // A broadcast scalar stays length 1 and applies to every coordinate.
        assert_eq!(atoms, vec![NodeAtom::sum_squares(1.0, vec![0.5])]);
        assert_eq!(eval_node_objective(&atoms, &[0.5, 0.5, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn instantiate_wrong_length_rejected() {
        let t = parse_node_template("sum_squares(x - a)").unwrap();
        let mut bindings = Bindings::new();
        bindings.insert("a".to_string(), ColumnValue::Vector(vec![1.0, 2.0]));
        assert!(matches!(
            t.instantiate(&bindings, 3),
            Err(Error::RowDimensionMismatch(_))
        ));
    }

    #[test]
    fn instantiate_matches_hand_assembled_values() {
        let t = parse_node_template("0.5*huber(x - a, 1.0) + w*norm1(x - b)").unwrap();
        let mut bindings = Bindings::new();
        bindings.insert("a".to_string(), ColumnValue::Vector(vec![1.0, -1.0]));
        bindings.insert("b".to_string(), ColumnValue::Scalar(0.25));
        bindings.insert("w".to_string(), ColumnValue::Scalar(2.0));
        let (atoms, _) = t.instantiate(&bindings, 2).unwrap();
        for x in [[0.0, 0.0], [1.5, -0.5], [-3.0, 2.0]] {
            let got = eval_node_objective(&atoms, &x).unwrap();
            let want = 0.5
                * (crate::atom::huber_value(x[0] - 1.0, 1.0)
                    + crate::atom::huber_value(x[1] + 1.0, 1.0))
                + 2.0 * ((x[0] - 0.25).abs() + (x[1] - 0.25).abs());
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn infer_dim_uses_first_vector_binding() {
        let t = parse_node_template("w*sum_squares(x - a) + linear(c)").unwrap();
        let mut bindings = Bindings::new();
        bindings.insert("w".to_string(), ColumnValue::Scalar(1.0));
        bindings.insert("a".to_string(), ColumnValue::Vector(vec![0.0; 4]));
        bindings.insert("c".to_string(), ColumnValue::Vector(vec![0.0; 4]));
        assert_eq!(t.infer_dim(&bindings), 4);
    }

    #[test]
    fn empty_input_is_a_syntax_error() {
        assert!(matches!(
            parse_node_template(""),
            Err(Error::SyntaxError { offset: 0, .. })
        ));
        assert!(matches!(
            parse_node_template("   "),
            Err(Error::SyntaxError { .. })
        ));
    }

    #[test]
    fn non_ascii_input_is_rejected_not_panicking() {
        for src in ["sum_squares(x − a)", "ζ(x - a)", "sum_squares(x - a)\u{0}"] {
            assert!(parse_node_template(src).is_err());
        }
    }

    #[test]
    fn huber_threshold_must_be_positive_literal() {
        assert!(parse_node_template("huber(x - a, 0.0)").is_err());
        assert!(parse_node_template("huber(x - a, -2)").is_err());
    }
}
