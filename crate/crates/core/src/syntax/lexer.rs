use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Arrow,   // ->
    Implies, // =>
    Or,      // \/
    Ne,      // !=
    Sym(char),
    Eof,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '#'
}

const SYMBOLS: &str = ":.,<>(){}[]+-=!~&|@;?*";

pub(crate) fn tokenize(src: &str, file: Option<&std::path::Path>) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| ParseError {
        span: SourceSpan {
            file: file.map(|p| p.to_path_buf()),
            line,
            column: col,
        },
        message: msg,
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: tl, col: tc });
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            col += i - start;
            push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse::<i64>()
                .map_err(|_| err(tl, tc, format!("integer literal `{text}` out of range")))?;
            push(&mut out, Tok::Int(n));
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            i += 1;
            col += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(err(tl, tc, "unterminated string literal".into())),
                    Some('"') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    Some('\\') => {
                        let esc = match chars.get(i + 1) {
                            Some('"') => '"',
                            Some('\\') => '\\',
                            Some('n') => '\n',
                            _ => return Err(err(line, col, "invalid escape in string literal".into())),
                        };
                        s.push(esc);
                        i += 2;
                        col += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                        col += 1;
                    }
                }
            }
            push(&mut out, Tok::Str(s));
            continue;
        }
        let next = chars.get(i + 1).copied();
        let two = match (c, next) {
            ('-', Some('>')) => Some(Tok::Arrow),
            ('=', Some('>')) => Some(Tok::Implies),
            ('\\', Some('/')) => Some(Tok::Or),
            ('!', Some('=')) => Some(Tok::Ne),
            _ => None,
        };
        if let Some(t) = two {
            advance(2, &mut i, &mut col);
            push(&mut out, t);
            continue;
        }
        if SYMBOLS.contains(c) {
            advance(1, &mut i, &mut col);
            push(&mut out, Tok::Sym(c));
            continue;
        }
        return Err(err(tl, tc, format!("unexpected character `{}`", c.escape_default())));
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, None).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn multi_char_operators() {
        assert_eq!(
            toks("A -> B => \\/ != -1"),
            vec![
                Tok::Ident("A".into()),
                Tok::Arrow,
                Tok::Ident("B".into()),
                Tok::Implies,
                Tok::Or,
                Tok::Ne,
                Tok::Sym('-'),
                Tok::Int(1),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn primes_and_fresh_suffix_in_identifiers() {
        assert_eq!(toks("AC' k1#2"), vec![Tok::Ident("AC'".into()), Tok::Ident("k1#2".into()), Tok::Eof]);
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("// hi\n  x", None).unwrap();
        assert_eq!((t[0].line, t[0].col), (2, 3));
    }

    #[test]
    fn errors_carry_positions() {
        let e = tokenize("a\n $", None).unwrap_err();
        assert_eq!((e.span.line, e.span.column), (2, 2));
        assert!(tokenize("\"abc", None).is_err());
    }
}
