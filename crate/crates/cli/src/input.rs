//! Reading sequences in each input mode and writing them back out.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Each byte is an element.
    Bytes,
    /// Each Unicode scalar value is an element.
    Chars,
    /// Whitespace-separated strings.
    Tokens,
    /// Whitespace-separated decimal integers.
    Ints,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sequence {
    Bytes(Vec<u8>),
    Chars(Vec<char>),
    Tokens(Vec<String>),
    Ints(Vec<i64>),
}

/// Expands `$body` once per element type with `$seq` bound to the slice.
#[macro_export]
macro_rules! with_sequence {
    ($input:expr, |$seq:ident| $body:expr) => {
        match $input {
            $crate::input::Sequence::Bytes(v) => {
                let $seq = &v[..];
                $body
            }
            $crate::input::Sequence::Chars(v) => {
                let $seq = &v[..];
                $body
            }
            $crate::input::Sequence::Tokens(v) => {
                let $seq = &v[..];
                $body
            }
            $crate::input::Sequence::Ints(v) => {
                let $seq = &v[..];
                $body
            }
        }
    };
}

pub fn read_source(path: Option<&Path>) -> Result<Vec<u8>> {
    match path {
        Some(p) if p != Path::new("-") => {
            std::fs::read(p).with_context(|| format!("reading {}", p.display()))
        }
        _ => {
            let mut buf = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buf)
                .context("reading stdin")?;
            Ok(buf)
        }
    }
}

/// Parses raw input. In bytes and chars mode one trailing newline is dropped
/// unless `keep_newline` is set.
pub fn parse(raw: Vec<u8>, mode: Mode, keep_newline: bool) -> Result<Sequence> {
    let mut raw = raw;
    if !keep_newline && matches!(mode, Mode::Bytes | Mode::Chars) && raw.last() == Some(&b'\n') {
        raw.pop();
        if raw.last() == Some(&b'\r') {
            raw.pop();
        }
    }
    Ok(match mode {
        Mode::Bytes => Sequence::Bytes(raw),
        Mode::Chars => Sequence::Chars(text(raw)?.chars().collect()),
        Mode::Tokens => {
            Sequence::Tokens(text(raw)?.split_whitespace().map(str::to_owned).collect())
        }
        Mode::Ints => Sequence::Ints(
            text(raw)?
                .split_whitespace()
                .map(|t| {
                    t.parse::<i64>()
                        .with_context(|| format!("not an integer: {t:?}"))
                })
                .collect::<Result<_>>()?,
        ),
    })
}

fn text(raw: Vec<u8>) -> Result<String> {
    String::from_utf8(raw).context("input is not valid UTF-8")
}

/// Writes the elements at the given 1-based positions in the mode's format.
pub fn write_elements(seq: &Sequence, positions: &[usize], out: &mut dyn Write) -> Result<()> {
    match seq {
        Sequence::Bytes(v) => {
            let bytes: Vec<u8> = positions.iter().map(|&i| v[i - 1]).collect();
            out.write_all(&bytes)?;
        }
        Sequence::Chars(v) => {
            let s: String = positions.iter().map(|&i| v[i - 1]).collect();
            writeln!(out, "{s}")?;
        }
        Sequence::Tokens(v) => {
            for &i in positions {
                writeln!(out, "{}", v[i - 1])?;
            }
        }
        Sequence::Ints(v) => {
            for &i in positions {
                writeln!(out, "{}", v[i - 1])?;
            }
        }
    }
    Ok(())
}

/// Writes generated symbols `0..n` (or code points, for periodic sources).
pub fn write_symbols(symbols: &[u32], mode: Mode, out: &mut dyn Write) -> Result<()> {
    match mode {
        Mode::Bytes => {
            let bytes = symbols
                .iter()
                .map(|&s| u8::try_from(s).ok())
                .collect::<Option<Vec<u8>>>();
            let Some(bytes) = bytes else {
                bail!("symbol above 255 cannot be written in bytes mode")
            };
            out.write_all(&bytes)?;
        }
        Mode::Chars => {
            let s = symbols
                .iter()
                .map(|&s| char::from_u32(s))
                .collect::<Option<String>>()
                .context("symbol is not a Unicode scalar value")?;
            out.write_all(s.as_bytes())?;
        }
        Mode::Tokens => {
            let line: Vec<String> = symbols.iter().map(u32::to_string).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Mode::Ints => {
            for s in symbols {
                writeln!(out, "{s}")?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes() {
        assert_eq!(
            parse(b"ab\n".to_vec(), Mode::Bytes, false).unwrap(),
            Sequence::Bytes(b"ab".to_vec())
        );
        assert_eq!(
            parse(b"ab\n".to_vec(), Mode::Bytes, true).unwrap(),
            Sequence::Bytes(b"ab\n".to_vec())
        );
        assert_eq!(
            parse("né\n".as_bytes().to_vec(), Mode::Chars, false).unwrap(),
            Sequence::Chars(vec!['n', 'é'])
        );
        assert_eq!(
            parse(b" x  yy\nz ".to_vec(), Mode::Tokens, false).unwrap(),
            Sequence::Tokens(vec!["x".into(), "yy".into(), "z".into()])
        );
        assert_eq!(
            parse(b"3 -1\n10".to_vec(), Mode::Ints, false).unwrap(),
            Sequence::Ints(vec![3, -1, 10])
        );
        assert!(parse(b"3 x".to_vec(), Mode::Ints, false).is_err());
        assert!(parse(vec![0xff], Mode::Chars, false).is_err());
    }

    #[test]
    fn symbol_output() {
        let mut out = Vec::new();
        write_symbols(&[97, 98, 99], Mode::Chars, &mut out).unwrap();
        assert_eq!(out, b"abc");
        let mut out = Vec::new();
        write_symbols(&[1, 20], Mode::Tokens, &mut out).unwrap();
        assert_eq!(out, b"1 20\n");
        assert!(write_symbols(&[300], Mode::Bytes, &mut Vec::new()).is_err());
    }
}
