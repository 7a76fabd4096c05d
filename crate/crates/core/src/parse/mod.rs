//! Recursive-descent parser for declaration files.
//!
//! The grammar covers the declarations found in typical DefinitelyTyped
//! files: functions with overloads, classes, interfaces, type aliases,
//! variables, namespaces and `export =`. Type syntax outside the
//! generator's subset (generics, tuples, literal types, ...) is parsed so
//! it can be tagged. Module-system syntax (`import`, `export default`,
//! triple-slash directives, enums, `declare global`) is skipped and
//! recorded as unsupported.

mod lexer;
mod resolve;

use thiserror::Error;

use crate::model::{
    tag_features, ClassDecl, ClassProperty, DeclarationModule, FunctionDecl, InterfaceDecl,
    Modifiers, Scope, TemplateKind, TypeAlias, VariableDecl, Visibility,
};
use crate::types::{IndexSignature, Literal, ObjectShape, Param, Property, Signature, TsType};

pub use resolve::expand_aliases;

use lexer::{tokenize, Tok, Token};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("duplicate declaration `{name}`: {detail}")]
    Duplicate { name: String, detail: String },
    #[error("unresolved type name `{0}`")]
    UnresolvedName(String),
    #[error("type alias `{0}` refers to itself")]
    CyclicAlias(String),
}

impl ParseError {
    pub(crate) fn syntax(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }
}

type PResult<T> = Result<T, ParseError>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    unsupported: Vec<String>,
    export_assignment: Option<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(ParseError::syntax(t.line, t.col, message))
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string '{s}'"),
            Tok::Num(n) => format!("number {n}"),
            Tok::Template(_) => "template literal".into(),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Directive(_) => "directive".into(),
            Tok::Eof => "end of file".into(),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(format!("expected `{p}`, found {}", self.describe()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(format!("expected identifier, found {}", self.describe())),
        }
    }

    /// `a.b.c`
    fn qualified_name(&mut self) -> PResult<String> {
        let mut name = self.ident()?;
        while self.is_punct(".") {
            self.bump();
            name.push('.');
            name.push_str(&self.ident()?);
        }
        Ok(name)
    }

    fn end_of_statement(&mut self) {
        self.eat_punct(";");
    }

    /// Skips a statement the model does not represent and records it.
    fn skip_statement(&mut self) -> PResult<()> {
        let start = self.pos;
        let mut depth = 0usize;
        loop {
            match self.peek().clone() {
                Tok::Eof => {
                    if depth > 0 {
                        return self.error("unbalanced brackets");
                    }
                    break;
                }
                Tok::Punct("{") | Tok::Punct("(") | Tok::Punct("[") => depth += 1,
                Tok::Punct("}") | Tok::Punct(")") | Tok::Punct("]") => {
                    if depth == 0 {
                        return self.error(format!("unexpected {}", self.describe()));
                    }
                    depth -= 1;
                    if depth == 0 && matches!(self.peek(), Tok::Punct("}")) {
                        self.bump();
                        if self.is_word("from") {
                            continue;
                        }
                        self.end_of_statement();
                        break;
                    }
                }
                Tok::Punct(";") if depth == 0 => {
                    self.bump();
                    break;
                }
                _ => {}
            }
            self.bump();
        }
        let text = self.toks[start..self.pos]
            .iter()
            .take(6)
            .map(|t| match &t.tok {
                Tok::Ident(s) | Tok::Num(s) => s.clone(),
                Tok::Str(s) => format!("\"{s}\""),
                Tok::Template(s) => format!("`{s}`"),
                Tok::Punct(p) => (*p).to_string(),
                Tok::Directive(d) => d.clone(),
                Tok::Eof => String::new(),
            })
            .collect::<Vec<_>>()
            .join(" ");
        self.unsupported.push(text);
        Ok(())
    }

    // -----------------------------------------------------------------
    // Statements

    fn parse_file(&mut self) -> PResult<Scope> {
        let mut scope = Scope::default();
        while *self.peek() != Tok::Eof {
            self.statement(&mut scope, true)?;
        }
        Ok(scope)
    }

    fn block(&mut self, scope: &mut Scope, top: bool) -> PResult<()> {
        self.expect_punct("{")?;
        while !self.is_punct("}") {
            if *self.peek() == Tok::Eof {
                return self.error("expected `}`, found end of file");
            }
            self.statement(scope, top)?;
        }
        self.bump();
        Ok(())
    }

    fn statement(&mut self, scope: &mut Scope, top: bool) -> PResult<()> {
        if let Tok::Directive(d) = self.peek().clone() {
            self.bump();
            self.unsupported.push(d);
            return Ok(());
        }
        if self.eat_punct(";") {
            return Ok(());
        }
        if self.is_word("import") {
            return self.skip_statement();
        }
        if self.is_word("export") {
            match self.peek_at(1).clone() {
                Tok::Punct("=") => {
                    self.bump();
                    self.bump();
                    let name = self.qualified_name()?;
                    self.end_of_statement();
                    if top {
                        self.export_assignment = Some(name);
                    }
                    return Ok(());
                }
                Tok::Ident(w) if w == "as" => {
                    // `export as namespace X;` only names a UMD global.
                    self.bump();
                    self.bump();
                    self.eat_word("namespace");
                    self.qualified_name()?;
                    self.end_of_statement();
                    return Ok(());
                }
                Tok::Ident(w) if w == "default" => return self.skip_statement(),
                Tok::Ident(w) if w == "import" => return self.skip_statement(),
                Tok::Punct("{") | Tok::Punct("*") => return self.skip_statement(),
                _ => {
                    self.bump();
                }
            }
        }
        self.eat_word("declare");
        let word = match self.peek().clone() {
            Tok::Ident(w) => w,
            _ => return self.error(format!("expected a declaration, found {}", self.describe())),
        };
        match word.as_str() {
            "function" => {
                self.bump();
                let name = self.ident()?;
                let sig = self.signature()?;
                self.end_of_statement();
                add_function(scope, name, sig)
            }
            "abstract" if matches!(self.peek_at(1), Tok::Ident(w) if w == "class") => {
                self.bump();
                self.class(scope)
            }
            "class" => self.class(scope),
            "interface" => self.interface(scope),
            "type" if matches!(self.peek_at(1), Tok::Ident(_)) => self.alias(scope),
            "namespace" | "module" => {
                self.bump();
                if let Tok::Str(_) = self.peek() {
                    // `declare module "name" { ... }` describes the module
                    // itself; its body merges into the current scope.
                    self.bump();
                    if self.is_punct("{") {
                        self.block(scope, top)?;
                    } else {
                        self.end_of_statement();
                    }
                    return Ok(());
                }
                let name = self.qualified_name()?;
                let mut target = &mut *scope;
                for part in name.split('.') {
                    target = target.namespaces.entry(part.to_string()).or_default();
                }
                self.block(target, false)
            }
            "global" => self.skip_statement(),
            "enum" => self.skip_statement(),
            "const" if matches!(self.peek_at(1), Tok::Ident(w) if w == "enum") => {
                self.skip_statement()
            }
            "const" | "let" | "var" => self.variables(scope),
            _ => self.error(format!("expected a declaration, found {}", self.describe())),
        }
    }

    fn variables(&mut self, scope: &mut Scope) -> PResult<()> {
        let is_const = self.ident()? == "const";
        loop {
            let name = self.ident()?;
            let ty = if self.eat_punct(":") {
                Some(self.ty()?)
            } else {
                None
            };
            if self.eat_punct("=") {
                // Only literal initializers are legal in declaration files.
                self.bump();
            }
            if scope.variables.iter().any(|v| v.name == name)
                || scope.function(&name).is_some()
                || scope.class(&name).is_some()
            {
                return Err(ParseError::Duplicate {
                    name,
                    detail: "variable conflicts with an earlier declaration".into(),
                });
            }
            scope.variables.push(VariableDecl { name, ty, is_const });
            if !self.eat_punct(",") {
                break;
            }
        }
        self.end_of_statement();
        Ok(())
    }

    fn alias(&mut self, scope: &mut Scope) -> PResult<()> {
        self.bump();
        let name = self.ident()?;
        let type_params = self.type_params()?;
        self.expect_punct("=")?;
        let ty = self.ty()?;
        self.end_of_statement();
        if scope.aliases.iter().any(|a| a.name == name) || scope.interface(&name).is_some() {
            return Err(ParseError::Duplicate {
                name,
                detail: "type alias declared twice".into(),
            });
        }
        scope.aliases.push(TypeAlias {
            name,
            type_params,
            ty,
        });
        Ok(())
    }

    fn interface(&mut self, scope: &mut Scope) -> PResult<()> {
        self.bump();
        let name = self.ident()?;
        let type_params = self.type_params()?;
        let mut extends = Vec::new();
        if self.eat_word("extends") {
            loop {
                extends.push(self.type_reference()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        let shape = self.object_body()?;
        if scope.aliases.iter().any(|a| a.name == name) {
            return Err(ParseError::Duplicate {
                name,
                detail: "interface conflicts with a type alias".into(),
            });
        }
        match scope.interfaces.iter_mut().find(|i| i.name == name) {
            Some(existing) => {
                existing.extends.extend(extends);
                existing.shape.properties.extend(shape.properties);
                existing.shape.call_signatures.extend(shape.call_signatures);
                existing
                    .shape
                    .construct_signatures
                    .extend(shape.construct_signatures);
                existing.shape.index_signatures.extend(shape.index_signatures);
            }
            None => scope.interfaces.push(InterfaceDecl {
                name,
                type_params,
                extends,
                shape,
            }),
        }
        Ok(())
    }

    fn class(&mut self, scope: &mut Scope) -> PResult<()> {
        self.bump();
        let name = self.ident()?;
        let type_params = self.type_params()?;
        if self.eat_word("extends") {
            self.type_reference()?;
        }
        if self.eat_word("implements") {
            loop {
                self.type_reference()?;
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        let mut class = ClassDecl {
            name: name.clone(),
            type_params,
            ..Default::default()
        };
        self.expect_punct("{")?;
        while !self.eat_punct("}") {
            if *self.peek() == Tok::Eof {
                return self.error("expected `}`, found end of file");
            }
            if self.eat_punct(";") || self.eat_punct(",") {
                continue;
            }
            self.class_member(&mut class)?;
        }
        if scope.class(&name).is_some() {
            return Err(ParseError::Duplicate {
                name,
                detail: "class declared twice".into(),
            });
        }
        if scope.function(&name).is_some() || scope.variables.iter().any(|v| v.name == name) {
            return Err(ParseError::Duplicate {
                name,
                detail: "class conflicts with a function or variable".into(),
            });
        }
        scope.classes.push(class);
        Ok(())
    }

    fn class_member(&mut self, class: &mut ClassDecl) -> PResult<()> {
        let mut modifiers = Modifiers::default();
        loop {
            // A modifier word followed by `(`, `:`, `?` or `;` is a member name.
            let is_name = matches!(
                self.peek_at(1),
                Tok::Punct("(") | Tok::Punct(":") | Tok::Punct("?") | Tok::Punct(";") | Tok::Punct("<")
            );
            let word = match self.peek() {
                Tok::Ident(w) if !is_name => w.clone(),
                _ => break,
            };
            match word.as_str() {
                "public" => modifiers.visibility = Visibility::Public,
                "private" => modifiers.visibility = Visibility::Private,
                "protected" => modifiers.visibility = Visibility::Protected,
                "static" => modifiers.is_static = true,
                "readonly" => modifiers.readonly = true,
                "abstract" | "declare" | "override" => {}
                "get" | "set" => {}
                _ => break,
            }
            self.bump();
        }
        if self.is_punct("[") {
            return self.skip_member();
        }
        let name = self.member_name()?;
        if name == "constructor" && (self.is_punct("(") || self.is_punct("<")) {
            let mut sig = self.signature()?;
            sig.ret = None;
            class.constructors.push(sig);
            self.eat_punct(";");
            return Ok(());
        }
        let optional = self.eat_punct("?");
        if self.is_punct("(") || self.is_punct("<") {
            let sig = self.signature()?;
            self.eat_punct(";");
            match class
                .methods
                .iter_mut()
                .find(|m| m.name == name && m.modifiers.is_static == modifiers.is_static)
            {
                Some(m) => m.overloads.push(sig),
                None => class.methods.push(FunctionDecl {
                    name,
                    overloads: vec![sig],
                    modifiers,
                }),
            }
            return Ok(());
        }
        let ty = if self.eat_punct(":") {
            self.ty()?
        } else {
            TsType::Any
        };
        self.eat_punct(";");
        class.properties.push(ClassProperty {
            name,
            ty,
            optional,
            modifiers,
        });
        Ok(())
    }

    fn skip_member(&mut self) -> PResult<()> {
        let start = self.pos;
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return self.error("unexpected end of file"),
                Tok::Punct("{") | Tok::Punct("(") | Tok::Punct("[") => depth += 1,
                Tok::Punct("}") | Tok::Punct(")") | Tok::Punct("]") => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                }
                Tok::Punct(";") | Tok::Punct(",") if depth == 0 => {
                    self.bump();
                    break;
                }
                _ => {}
            }
            self.bump();
        }
        self.unsupported
            .push(format!("computed member at token {}", start));
        Ok(())
    }

    fn member_name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Str(s) | Tok::Num(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(format!("expected a member name, found {}", self.describe())),
        }
    }

    // -----------------------------------------------------------------
    // Signatures

    fn type_params(&mut self) -> PResult<Vec<String>> {
        let mut names = Vec::new();
        if !self.eat_punct("<") {
            return Ok(names);
        }
        loop {
            self.eat_word("const");
            names.push(self.ident()?);
            if self.eat_word("extends") {
                self.ty()?;
            }
            if self.eat_punct("=") {
                self.ty()?;
            }
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(">")?;
        Ok(names)
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        while !self.is_punct(")") {
            let rest = self.eat_punct("...");
            while matches!(self.peek(), Tok::Ident(w) if matches!(w.as_str(), "public" | "private" | "protected" | "readonly"))
                && matches!(self.peek_at(1), Tok::Ident(_))
            {
                self.bump();
            }
            let name = match self.peek().clone() {
                Tok::Ident(s) => {
                    self.bump();
                    s
                }
                Tok::Punct("{") | Tok::Punct("[") => {
                    self.skip_balanced()?;
                    format!("arg{}", params.len())
                }
                _ => return self.error(format!("expected a parameter, found {}", self.describe())),
            };
            let optional = self.eat_punct("?");
            let ty = if self.eat_punct(":") {
                self.ty()?
            } else {
                TsType::Any
            };
            params.push(Param {
                name,
                ty,
                optional,
                rest,
            });
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(params)
    }

    fn skip_balanced(&mut self) -> PResult<()> {
        let mut depth = 0usize;
        loop {
            match self.bump() {
                Tok::Punct("{") | Tok::Punct("[") | Tok::Punct("(") => depth += 1,
                Tok::Punct("}") | Tok::Punct("]") | Tok::Punct(")") => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                Tok::Eof => return self.error("unexpected end of file"),
                _ => {}
            }
        }
    }

    /// `<T>(params): R` with an optional return annotation.
    fn signature(&mut self) -> PResult<Signature> {
        let type_params = self.type_params()?;
        let params = self.params()?;
        let ret = if self.eat_punct(":") {
            Some(self.return_type()?)
        } else {
            None
        };
        Ok(Signature {
            type_params,
            params,
            ret,
        })
    }

    /// A return type, which may be a type predicate.
    fn return_type(&mut self) -> PResult<TsType> {
        if self.is_word("asserts") && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            let name = self.ident()?;
            if self.eat_word("is") {
                let t = self.ty()?;
                return Ok(TsType::Opaque(format!("asserts {name} is {t}")));
            }
            return Ok(TsType::Opaque(format!("asserts {name}")));
        }
        if matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Ident(w) if w == "is")
        {
            let name = self.ident()?;
            self.bump();
            let t = self.ty()?;
            return Ok(TsType::Opaque(format!("{name} is {t}")));
        }
        self.ty()
    }

    // -----------------------------------------------------------------
    // Types

    fn ty(&mut self) -> PResult<TsType> {
        let check = self.union_type()?;
        if self.is_word("extends") {
            self.bump();
            let ext = self.union_type()?;
            self.expect_punct("?")?;
            let yes = self.ty()?;
            self.expect_punct(":")?;
            let no = self.ty()?;
            return Ok(TsType::Opaque(format!("{check} extends {ext} ? {yes} : {no}")));
        }
        Ok(check)
    }

    fn union_type(&mut self) -> PResult<TsType> {
        self.eat_punct("|");
        let mut members = vec![self.intersection_type()?];
        while self.eat_punct("|") {
            members.push(self.intersection_type()?);
        }
        Ok(if members.len() == 1 {
            members.pop().unwrap()
        } else {
            TsType::union(members)
        })
    }

    fn intersection_type(&mut self) -> PResult<TsType> {
        self.eat_punct("&");
        let mut members = vec![self.postfix_type()?];
        while self.eat_punct("&") {
            members.push(self.postfix_type()?);
        }
        Ok(if members.len() == 1 {
            members.pop().unwrap()
        } else {
            TsType::Intersection(members)
        })
    }

    fn postfix_type(&mut self) -> PResult<TsType> {
        let mut t = self.primary_type()?;
        while self.is_punct("[") {
            self.bump();
            if self.eat_punct("]") {
                t = TsType::Array(Box::new(t));
            } else {
                let index = self.ty()?;
                self.expect_punct("]")?;
                t = TsType::Opaque(format!("{t}[{index}]"));
            }
        }
        Ok(t)
    }

    /// Looks past a `(` to decide whether a function type follows.
    fn at_function_type(&self) -> bool {
        let mut depth = 0usize;
        let mut i = self.pos;
        loop {
            match &self.toks[i].tok {
                Tok::Punct("(") | Tok::Punct("[") | Tok::Punct("{") => depth += 1,
                Tok::Punct(")") | Tok::Punct("]") | Tok::Punct("}") => {
                    depth -= 1;
                    if depth == 0 {
                        return matches!(
                            self.toks.get(i + 1).map(|t| &t.tok),
                            Some(Tok::Punct("=>"))
                        );
                    }
                }
                Tok::Eof => return false,
                _ => {}
            }
            i += 1;
        }
    }

    fn function_type(&mut self) -> PResult<TsType> {
        let type_params = self.type_params()?;
        let params = self.params()?;
        self.expect_punct("=>")?;
        let ret = self.return_type()?;
        Ok(TsType::Callback(Box::new(Signature {
            type_params,
            params,
            ret: Some(ret),
        })))
    }

    fn primary_type(&mut self) -> PResult<TsType> {
        match self.peek().clone() {
            Tok::Punct("(") => {
                if self.at_function_type() {
                    return self.function_type();
                }
                self.bump();
                let t = self.ty()?;
                self.expect_punct(")")?;
                Ok(t)
            }
            Tok::Punct("<") => self.function_type(),
            Tok::Punct("{") => {
                let mapped = matches!(self.peek_at(1), Tok::Punct("["))
                    && matches!(self.peek_at(3), Tok::Ident(w) if w == "in");
                let mapped = mapped
                    || (matches!(self.peek_at(1), Tok::Ident(w) if w == "readonly" )
                        && matches!(self.peek_at(4), Tok::Ident(w) if w == "in"));
                if mapped {
                    self.skip_balanced()?;
                    return Ok(TsType::Opaque("{ mapped }".into()));
                }
                Ok(TsType::Shape(self.object_body()?))
            }
            Tok::Punct("[") => {
                self.bump();
                let mut members = Vec::new();
                while !self.is_punct("]") {
                    self.eat_punct("...");
                    if matches!(self.peek(), Tok::Ident(_))
                        && matches!(self.peek_at(1), Tok::Punct(":") | Tok::Punct("?"))
                    {
                        self.bump();
                        self.eat_punct("?");
                        self.expect_punct(":")?;
                    }
                    members.push(self.ty()?);
                    self.eat_punct("?");
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.expect_punct("]")?;
                Ok(TsType::Tuple(members))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(TsType::Literal(Literal::String(s)))
            }
            Tok::Template(s) => {
                self.bump();
                Ok(TsType::Opaque(format!("`{s}`")))
            }
            Tok::Num(n) => {
                self.bump();
                Ok(TsType::Literal(Literal::Number(n)))
            }
            Tok::Punct("-") => {
                self.bump();
                match self.bump() {
                    Tok::Num(n) => Ok(TsType::Literal(Literal::Number(format!("-{n}")))),
                    _ => self.error("expected a number after `-`"),
                }
            }
            Tok::Ident(w) => match w.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(TsType::Literal(Literal::Boolean(w == "true")))
                }
                "typeof" => {
                    self.bump();
                    let name = self.qualified_name()?;
                    Ok(TsType::Opaque(format!("typeof {name}")))
                }
                "keyof" => {
                    self.bump();
                    let t = self.postfix_type()?;
                    Ok(TsType::Opaque(format!("keyof {t}")))
                }
                "unique" => {
                    self.bump();
                    let t = self.postfix_type()?;
                    Ok(TsType::Opaque(format!("unique {t}")))
                }
                "readonly" if !matches!(self.peek_at(1), Tok::Punct(_)) => {
                    self.bump();
                    let t = self.postfix_type()?;
                    Ok(TsType::Generic {
                        name: "ReadonlyArray".into(),
                        args: vec![match t {
                            TsType::Array(e) => *e,
                            other => other,
                        }],
                    })
                }
                "infer" => {
                    self.bump();
                    let name = self.ident()?;
                    Ok(TsType::Opaque(format!("infer {name}")))
                }
                "new" => {
                    self.bump();
                    let sig = self.function_type()?;
                    Ok(TsType::Opaque(format!("new {sig}")))
                }
                "abstract" if matches!(self.peek_at(1), Tok::Ident(n) if n == "new") => {
                    self.bump();
                    self.primary_type()
                }
                _ => self.type_reference(),
            },
            _ => self.error(format!("expected a type, found {}", self.describe())),
        }
    }

    /// A keyword type or a possibly qualified, possibly generic name.
    fn type_reference(&mut self) -> PResult<TsType> {
        let name = self.qualified_name()?;
        if self.is_punct("<") {
            self.bump();
            let mut args = Vec::new();
            loop {
                args.push(self.ty()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct(">")?;
            return Ok(TsType::Generic { name, args });
        }
        Ok(match name.as_str() {
            "string" => TsType::String,
            "number" => TsType::Number,
            "boolean" => TsType::Boolean,
            "void" => TsType::Void,
            "null" => TsType::Null,
            "undefined" => TsType::Undefined,
            "any" => TsType::Any,
            "unknown" => TsType::Unknown,
            "never" => TsType::Never,
            "object" => TsType::PlainObject,
            _ => TsType::Named(name),
        })
    }

    /// `{ member; member; ... }` of an interface or type literal.
    fn object_body(&mut self) -> PResult<ObjectShape> {
        self.expect_punct("{")?;
        let mut shape = ObjectShape::default();
        while !self.eat_punct("}") {
            if *self.peek() == Tok::Eof {
                return self.error("expected `}`, found end of file");
            }
            if self.eat_punct(";") || self.eat_punct(",") {
                continue;
            }
            self.object_member(&mut shape)?;
        }
        Ok(shape)
    }

    fn object_member(&mut self, shape: &mut ObjectShape) -> PResult<()> {
        if self.is_punct("(") || self.is_punct("<") {
            shape.call_signatures.push(self.signature()?);
            return Ok(());
        }
        if self.is_word("new") && matches!(self.peek_at(1), Tok::Punct("(") | Tok::Punct("<")) {
            self.bump();
            shape.construct_signatures.push(self.signature()?);
            return Ok(());
        }
        let readonly = self.is_word("readonly")
            && !matches!(
                self.peek_at(1),
                Tok::Punct("(") | Tok::Punct(":") | Tok::Punct("?") | Tok::Punct(";") | Tok::Punct(",")
            );
        if readonly {
            self.bump();
        }
        if self.is_punct("[") {
            let is_index = matches!(self.peek_at(1), Tok::Ident(_))
                && matches!(self.peek_at(2), Tok::Punct(":"));
            if !is_index {
                return self.skip_member();
            }
            self.bump();
            let key_name = self.ident()?;
            self.expect_punct(":")?;
            let key_type = self.ty()?;
            self.expect_punct("]")?;
            self.expect_punct(":")?;
            let value = self.ty()?;
            shape.index_signatures.push(IndexSignature {
                key_name,
                key_type,
                value,
                readonly,
            });
            return Ok(());
        }
        if matches!(self.peek(), Tok::Ident(w) if w == "get" || w == "set")
            && matches!(self.peek_at(1), Tok::Ident(_) | Tok::Str(_))
        {
            self.bump();
        }
        let name = self.member_name()?;
        let optional = self.eat_punct("?");
        if self.is_punct("(") || self.is_punct("<") {
            let sig = self.signature()?;
            shape.properties.push(Property {
                name,
                ty: TsType::Callback(Box::new(sig)),
                optional,
                readonly,
                method: true,
            });
            return Ok(());
        }
        let ty = if self.eat_punct(":") {
            self.ty()?
        } else {
            TsType::Any
        };
        shape.properties.push(Property {
            name,
            ty,
            optional,
            readonly,
            method: false,
        });
        Ok(())
    }
}

fn add_function(scope: &mut Scope, name: String, sig: Signature) -> PResult<()> {
    if scope.class(&name).is_some() || scope.variables.iter().any(|v| v.name == name) {
        return Err(ParseError::Duplicate {
            name,
            detail: "function conflicts with a class or variable".into(),
        });
    }
    match scope.functions.iter_mut().find(|f| f.name == name) {
        Some(f) => f.overloads.push(sig),
        None => scope.functions.push(FunctionDecl::new(name, vec![sig])),
    }
    Ok(())
}

/// Decides the template from the export assignment. An exported namespace
/// with nothing else of that name is a plain module whose members are the
/// namespace's members.
fn classify(module: &mut DeclarationModule) {
    let Some(name) = module.export_assignment.clone() else {
        module.template = TemplateKind::Module;
        return;
    };
    let scope = &mut module.scope;
    if scope.class(&name).is_some() {
        module.template = TemplateKind::ModuleClass;
    } else if scope.function(&name).is_some() {
        module.template = TemplateKind::ModuleFunction;
    } else if let Some(ns) = scope.namespaces.remove(&name) {
        module.template = TemplateKind::Module;
        module.export_assignment = None;
        let Scope {
            functions,
            classes,
            interfaces,
            aliases,
            variables,
            namespaces,
        } = ns;
        scope.functions.extend(functions);
        scope.classes.extend(classes);
        scope.interfaces.extend(interfaces);
        scope.aliases.extend(aliases);
        scope.variables.extend(variables);
        scope.namespaces.extend(namespaces);
        resolve::requalify(scope, &name);
    } else {
        module.template = TemplateKind::Module;
        module
            .unsupported
            .push(format!("export = {name} (not a function, class or namespace)"));
        module.export_assignment = None;
    }
}

/// Parses a declaration file for the package `module_name`.
pub fn parse_module(source: &str, module_name: &str) -> Result<DeclarationModule, ParseError> {
    let mut parser = Parser {
        toks: tokenize(source)?,
        pos: 0,
        unsupported: Vec::new(),
        export_assignment: None,
    };
    let mut scope = parser.parse_file()?;
    resolve::resolve_references(&mut scope);
    let mut module = DeclarationModule::new(module_name, TemplateKind::Module);
    module.scope = scope;
    module.export_assignment = parser.export_assignment;
    module.unsupported = parser.unsupported;
    classify(&mut module);
    module.feature_tags = tag_features(&module);
    Ok(module)
}

pub fn parse(source: &str) -> Result<DeclarationModule, ParseError> {
    parse_module(source, "")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FeatureTag;

    fn tags(m: &DeclarationModule) -> Vec<&'static str> {
        m.feature_tags.iter().map(|t| t.name()).collect()
    }

    #[test]
    fn parses_the_definitely_typed_abs_file() {
        let m = parse("declare function abs(input?: string): string;\nexport = abs;").unwrap();
        assert_eq!(m.template, TemplateKind::ModuleFunction);
        assert_eq!(m.export_assignment.as_deref(), Some("abs"));
        let f = m.scope.function("abs").unwrap();
        assert!(f.overloads[0].params[0].optional);
        assert_eq!(tags(&m), ["type-string", "optional-parameter"]);
    }

    #[test]
    fn records_aliases() {
        let m = parse("type T = string | number; declare function F(a: T);").unwrap();
        assert_eq!(m.scope.aliases[0].name, "T");
        let f = m.scope.function("F").unwrap();
        assert_eq!(f.overloads[0].params[0].ty, TsType::Named("T".into()));
        assert_eq!(f.overloads[0].ret, None);
        assert!(m.feature_tags.contains(&FeatureTag::AliasType));
    }

    #[test]
    fn malformed_input_reports_a_position() {
        let err = parse("declare function f(<<<").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, col: 20, .. }), "{err}");
    }

    #[test]
    fn overloads_group_and_conflicts_fail() {
        let m = parse("declare function f(a: string): string;\ndeclare function f(a: number): number;")
            .unwrap();
        assert_eq!(m.scope.function("f").unwrap().overloads.len(), 2);
        assert!(matches!(
            parse("declare class A {}\ndeclare class A {}"),
            Err(ParseError::Duplicate { .. })
        ));
        assert!(matches!(
            parse("declare function A(): void;\ndeclare class A {}"),
            Err(ParseError::Duplicate { .. })
        ));
        assert!(matches!(
            parse("type A = string;\ntype A = number;"),
            Err(ParseError::Duplicate { .. })
        ));
    }

    #[test]
    fn interfaces_merge_and_resolve_in_namespaces() {
        let m = parse(
            "export = G;\ndeclare function G(o?: G.I__opts): RegExp;\n\
             declare namespace G { export interface I__opts { 'a'?: boolean; } interface I__opts { b: string } }",
        )
        .unwrap();
        let ns = &m.scope.namespaces["G"];
        assert_eq!(ns.interfaces.len(), 1);
        assert_eq!(ns.interfaces[0].shape.properties.len(), 2);
        assert_eq!(
            m.scope.function("G").unwrap().overloads[0].params[0].ty,
            TsType::InterfaceRef("G.I__opts".into())
        );
        assert_eq!(
            m.scope.function("G").unwrap().overloads[0].ret,
            Some(TsType::Named("RegExp".into()))
        );
    }

    #[test]
    fn exported_namespace_becomes_a_module() {
        let m = parse(
            "declare namespace isUuid { function v1(value: string): boolean; interface X { a: string } \
             function f(x: X): void; }\nexport = isUuid;",
        )
        .unwrap();
        assert_eq!(m.template, TemplateKind::Module);
        assert_eq!(m.export_assignment, None);
        assert!(m.scope.function("v1").is_some());
        assert_eq!(
            m.scope.function("f").unwrap().overloads[0].params[0].ty,
            TsType::InterfaceRef("X".into())
        );
    }

    #[test]
    fn classes_and_modifiers() {
        let m = parse(
            "declare class SteamID {\n  constructor(input?: string);\n  static fromIndividualAccountID(id: number | string): SteamID;\n  \
             private x: number;\n  isValid(): boolean;\n}\nexport = SteamID;",
        )
        .unwrap();
        assert_eq!(m.template, TemplateKind::ModuleClass);
        let c = m.scope.class("SteamID").unwrap();
        assert_eq!(c.constructors.len(), 1);
        assert!(c.method("fromIndividualAccountID").unwrap().modifiers.is_static);
        assert_eq!(c.properties[0].modifiers.visibility, Visibility::Private);
        let t = tags(&m);
        assert!(t.contains(&"static") && t.contains(&"private"));
    }

    #[test]
    fn unsupported_syntax_is_skipped_and_tagged() {
        let m = parse(
            "/// <reference types=\"node\" />\nimport { Foo } from 'foo';\nimport fs = require('fs');\n\
             export default function x(): void;\nexport { a, b };\nenum E { A, B }\n\
             declare global { interface Window { x: string } }\nexport function ok(): void;",
        )
        .unwrap();
        assert_eq!(m.template, TemplateKind::Module);
        assert!(m.scope.function("ok").is_some());
        assert!(m.feature_tags.contains(&FeatureTag::UnsupportedSyntax));
        assert_eq!(m.unsupported.len(), 7);
    }

    #[test]
    fn declare_module_body_merges_into_the_file() {
        let m = parse("declare module 'abs' { function abs(input: string): string; export = abs; }")
            .unwrap();
        assert_eq!(m.template, TemplateKind::ModuleFunction);
    }

    #[test]
    fn parses_the_wider_type_surface() {
        let m = parse(
            "interface A<T> { [key: string]: T; readonly r: number; (x: number): string; new (): A<T>; m?(a: 'x' | 1): void; }\n\
             declare function f<T>(...xs: Array<T>): [string, number] & { a: any };\n\
             declare function g(cb: (err: Error | null, data?: Buffer) => void): typeof process;\n\
             declare function h(x: unknown): x is string;\n\
             declare const v: { [K in keyof A<string>]: string };\n\
             declare function k(x: string[][], y: (string | number)[]): undefined;",
        )
        .unwrap();
        let t = tags(&m);
        for expected in [
            "generics-interface",
            "index-signature",
            "readonly",
            "call-signature",
            "type-literals",
            "generics-function",
            "dot-dot-dot-token",
            "type-array",
            "type-tuple",
            "type-intersection",
            "type-any",
            "type-function",
            "type-union",
            "unsupported-syntax",
            "type-undefined",
            "optional-parameter",
        ] {
            assert!(t.contains(&expected), "missing {expected} in {t:?}");
        }
        let k = m.scope.function("k").unwrap();
        assert_eq!(k.overloads[0].params[0].ty.to_string(), "string[][]");
        assert_eq!(k.overloads[0].params[1].ty.to_string(), "(string | number)[]");
    }

    #[test]
    fn comments_are_ignored() {
        let m = parse("// ...\ndeclare class A {\n    // ...\n    isValid(): boolean; /* x */\n}\nexport = A;")
            .unwrap();
        assert_eq!(m.scope.class("A").unwrap().methods.len(), 1);
    }
}
