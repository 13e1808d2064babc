//! Corpus output writers: Moses, TSV, and TMX.
//!
//! All three writers are byte-deterministic — UTF-8, LF line endings, no
//! timestamps — so identical pair lists produce identical files and the
//! manifest checksums are reproducible. Normalization upstream guarantees
//! texts contain no newlines, tabs, or runs of spaces, which is what
//! makes the line-oriented formats safe.

use std::fs;
use std::io;
use std::path::Path;

use crate::clean::SentencePair;

/// Writes Moses format: two plain-text files whose i-th lines are the two
/// sides of pair i.
pub fn write_moses(pairs: &[SentencePair], src_path: &Path, tgt_path: &Path) -> io::Result<()> {
    let mut src = String::new();
    let mut tgt = String::new();
    for pair in pairs {
        src.push_str(&pair.source_text);
        src.push('\n');
        tgt.push_str(&pair.target_text);
        tgt.push('\n');
    }
    fs::write(src_path, src)?;
    fs::write(tgt_path, tgt)
}

/// Writes one `source<TAB>target` line per pair.
pub fn write_tsv(pairs: &[SentencePair], path: &Path) -> io::Result<()> {
    let mut out = String::new();
    for pair in pairs {
        out.push_str(&pair.source_text);
        out.push('\t');
        out.push_str(&pair.target_text);
        out.push('\n');
    }
    fs::write(path, out)
}

/// Parses TSV content produced by [`write_tsv`] back into pairs; lines
/// without a tab are skipped. Round-tripping is exercised in tests and
/// useful for inspecting shipped corpora.
pub fn read_tsv_str(text: &str, source_lang: &str, target_lang: &str) -> Vec<SentencePair> {
    text.lines()
        .filter_map(|line| line.split_once('\t'))
        .map(|(src, tgt)| SentencePair::new(src, tgt, source_lang, target_lang))
        .collect()
}

/// Writes a TMX 1.4 document: one `<tu>` per pair, each with a source and
/// a target `<tuv>`. No creation date is emitted, keeping the bytes
/// reproducible.
pub fn write_tmx(
    pairs: &[SentencePair],
    path: &Path,
    source_lang: &str,
    target_lang: &str,
) -> io::Result<()> {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<tmx version=\"1.4\">\n");
    out.push_str(&format!(
        "  <header creationtool=\"crisis-corpus\" creationtoolversion=\"{}\" segtype=\"sentence\" o-tmf=\"plaintext\" adminlang=\"en\" srclang=\"{}\" datatype=\"plaintext\"/>\n",
        env!("CARGO_PKG_VERSION"),
        xml_escape(source_lang),
    ));
    out.push_str("  <body>\n");
    for pair in pairs {
        out.push_str("    <tu>\n");
        for (lang, text) in [
            (source_lang, &pair.source_text),
            (target_lang, &pair.target_text),
        ] {
            out.push_str(&format!(
                "      <tuv xml:lang=\"{}\"><seg>{}</seg></tuv>\n",
                xml_escape(lang),
                xml_escape(text),
            ));
        }
        out.push_str("    </tu>\n");
    }
    out.push_str("  </body>\n");
    out.push_str("</tmx>\n");
    fs::write(path, out)
}

/// Escapes the five XML special characters.
pub fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}
