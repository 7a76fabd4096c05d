//! Tokenizer for declaration files.

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Num(String),
    /// A backquoted template literal, kept raw.
    Template(String),
    Punct(&'static str),
    /// A `/// <...>` directive line.
    Directive(String),
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

// Longest first, so `=>` wins over `=`.
const PUNCTS: &[&str] = &[
    "...", "=>", "?.", "{", "}", "(", ")", "[", "]", "<", ">", ";", ",", ":", "?", "=", "|",
    "&", ".", "*", "@", "!", "+", "-", "#",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c.is_whitespace() || c == '\u{feff}' {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            let end = chars[i..]
                .iter()
                .position(|&c| c == '\n')
                .map_or(chars.len(), |p| i + p);
            let text: String = chars[i..end].iter().collect();
            if let Some(rest) = text.strip_prefix("///") {
                if rest.trim_start().starts_with('<') {
                    out.push(Token {
                        tok: Tok::Directive(text.trim().to_string()),
                        line: tl,
                        col: tc,
                    });
                }
            }
            let n = end - i;
            advance(&mut i, &mut line, &mut col, n);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let mut j = i + 2;
            while j + 1 < chars.len() && !(chars[j] == '*' && chars[j + 1] == '/') {
                j += 1;
            }
            if j + 1 >= chars.len() {
                return Err(ParseError::syntax(tl, tc, "unterminated comment"));
            }
            let n = j + 2 - i;
            advance(&mut i, &mut line, &mut col, n);
            continue;
        }
        if c == '"' || c == '\'' || c == '`' {
            let mut j = i + 1;
            let mut value = String::new();
            loop {
                match chars.get(j) {
                    None => return Err(ParseError::syntax(tl, tc, "unterminated string literal")),
                    Some('\\') => {
                        if let Some(&next) = chars.get(j + 1) {
                            value.push(match next {
                                'n' => '\n',
                                't' => '\t',
                                other => other,
                            });
                        }
                        j += 2;
                    }
                    Some(&q) if q == c => break,
                    Some('\n') if c != '`' => {
                        return Err(ParseError::syntax(tl, tc, "unterminated string literal"))
                    }
                    Some(&other) => {
                        value.push(other);
                        j += 1;
                    }
                }
            }
            let tok = if c == '`' {
                Tok::Template(value)
            } else {
                Tok::Str(value)
            };
            out.push(Token {
                tok,
                line: tl,
                col: tc,
            });
            let n = j + 1 - i;
            advance(&mut i, &mut line, &mut col, n);
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len()
                && (chars[j].is_ascii_alphanumeric() || chars[j] == '.' || chars[j] == '_')
            {
                j += 1;
            }
            out.push(Token {
                tok: Tok::Num(chars[i..j].iter().collect()),
                line: tl,
                col: tc,
            });
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n);
            continue;
        }
        if c.is_alphabetic() || c == '_' || c == '$' {
            let mut j = i;
            while j < chars.len()
                && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '$')
            {
                j += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[i..j].iter().collect()),
                line: tl,
                col: tc,
            });
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n);
            continue;
        }
        let rest: String = chars[i..(i + 3).min(chars.len())].iter().collect();
        match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                out.push(Token {
                    tok: Tok::Punct(p),
                    line: tl,
                    col: tc,
                });
                advance(&mut i, &mut line, &mut col, p.len());
            }
            None => {
                return Err(ParseError::syntax(
                    tl,
                    tc,
                    format!("unexpected character `{c}`"),
                ))
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn skips_comments_and_keeps_directives() {
        assert_eq!(
            toks("/// <reference types=\"node\" />\n// x\n/* y */ a"),
            vec![
                Tok::Directive("/// <reference types=\"node\" />".into()),
                Tok::Ident("a".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn arrows_and_spreads_are_single_tokens() {
        assert_eq!(
            toks("(...a) => 'x'"),
            vec![
                Tok::Punct("("),
                Tok::Punct("..."),
                Tok::Ident("a".into()),
                Tok::Punct(")"),
                Tok::Punct("=>"),
                Tok::Str("x".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn reports_positions() {
        let err = tokenize("a\n  ~").unwrap_err();
        assert_eq!(err.to_string(), "2:3: unexpected character `~`");
    }
}
