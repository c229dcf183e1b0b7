use super::diagnostic::ParseDiagnostic;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Meta(String),
    Num(String),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Star,
    Arrow,
    Eq,
    Colon,
    Eof,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    pub text: String,
}

pub(crate) fn tokenize(src: &str) -> (Vec<Token>, Vec<ParseDiagnostic>) {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc, start) = (line, col, i);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c == '$' {
            bump!();
            let name_start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            if name_start == i {
                diags.push(ParseDiagnostic::error(tl, tc, "expected a metavariable name after `$`", "$"));
                continue;
            }
            Tok::Meta(chars[name_start..i].iter().collect())
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                bump!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
            }
            Tok::Num(chars[start..i].iter().collect())
        } else if c == '"' {
            bump!();
            let mut s = String::new();
            let mut closed = false;
            while i < chars.len() && chars[i] != '\n' {
                match chars[i] {
                    '"' => {
                        bump!();
                        closed = true;
                        break;
                    }
                    '\\' if i + 1 < chars.len() && (chars[i + 1] == '"' || chars[i + 1] == '\\') => {
                        s.push(chars[i + 1]);
                        bump!();
                        bump!();
                    }
                    ch => {
                        s.push(ch);
                        bump!();
                    }
                }
            }
            if !closed {
                diags.push(ParseDiagnostic::error(tl, tc, "unterminated string", chars[start..i].iter().collect::<String>()));
                continue;
            }
            Tok::Str(s)
        } else if c == '=' && chars.get(i + 1) == Some(&'>') {
            bump!();
            bump!();
            Tok::Arrow
        } else {
            let t = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '{' => Some(Tok::LBrace),
                '}' => Some(Tok::RBrace),
                ',' => Some(Tok::Comma),
                '.' => Some(Tok::Dot),
                '*' => Some(Tok::Star),
                '=' => Some(Tok::Eq),
                ':' => Some(Tok::Colon),
                _ => None,
            };
            bump!();
            match t {
                Some(t) => t,
                None => {
                    diags.push(ParseDiagnostic::error(tl, tc, format!("unexpected character `{c}`"), c.to_string()));
                    continue;
                }
            }
        };
        tokens.push(Token { tok, line: tl, col: tc, text: chars[start..i].iter().collect() });
    }
    tokens.push(Token { tok: Tok::Eof, line, col, text: String::new() });
    (tokens, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_tokens() {
        let (toks, diags) = tokenize("2.5 * p(X) => $A(y). # comment\n\"a \\\"q\\\"\"");
        assert!(diags.is_empty());
        let kinds: Vec<Tok> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Num("2.5".into()),
                Tok::Star,
                Tok::Ident("p".into()),
                Tok::LParen,
                Tok::Ident("X".into()),
                Tok::RParen,
                Tok::Arrow,
                Tok::Meta("A".into()),
                Tok::LParen,
                Tok::Ident("y".into()),
                Tok::RParen,
                Tok::Dot,
                Tok::Str("a \"q\"".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn integer_followed_by_statement_dot() {
        let (toks, _) = tokenize("3.");
        assert_eq!(toks[0].tok, Tok::Num("3".into()));
        assert_eq!(toks[1].tok, Tok::Dot);
    }

    #[test]
    fn positions_and_bad_chars() {
        let (toks, diags) = tokenize("a\n  @b");
        assert_eq!((toks[1].line, toks[1].col), (2, 4));
        assert_eq!(diags.len(), 1);
        assert_eq!((diags[0].line, diags[0].column), (2, 3));
    }
}
