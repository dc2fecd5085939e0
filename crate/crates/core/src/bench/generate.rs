//! Random valid inputs for each format, used to seed mutation corpora and to
//! fuzz the parsers.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::formats::Format;

const WORDS: &[&str] = &[
    "name", "id", "value", "price", "item", "count", "enabled", "path", "user", "host", "port", "tags", "mode", "size",
    "level", "title", "kind",
];

/// Produces a valid input of `format` between `min_len` and `max_len` bytes.
///
/// Draws until the length fits; the bounds must leave room for the smallest
/// document of the format (a few bytes).
pub fn generate(format: Format, rng: &mut ChaCha8Rng, min_len: usize, max_len: usize) -> Vec<u8> {
    assert!(min_len <= max_len && max_len >= 8, "length window {min_len}..={max_len} too small");
    // Depth and breadth grow with the target size.
    let scale = (max_len / 40).clamp(1, 6);
    loop {
        let mut out = Vec::new();
        match format {
            Format::Json => json_value(rng, &mut out, scale, true),
            Format::Ini => ini(rng, &mut out, scale),
            Format::Sexp => sexp(rng, &mut out, scale),
            Format::TinyC => tinyc_program(rng, &mut out, scale),
        }
        if (min_len..=max_len).contains(&out.len()) {
            return out;
        }
    }
}

fn word<'a>(rng: &mut ChaCha8Rng) -> &'a str {
    WORDS.choose(rng).copied().unwrap_or("x")
}

fn ws(rng: &mut ChaCha8Rng, out: &mut Vec<u8>) {
    match rng.gen_range(0..10) {
        0..=5 => {}
        6..=8 => out.push(b' '),
        _ => out.extend_from_slice(b"\n  "),
    }
}

fn json_number(rng: &mut ChaCha8Rng, out: &mut Vec<u8>) {
    if rng.gen_bool(0.2) {
        out.push(b'-');
    }
    let n: u32 = rng.gen_range(0..5000);
    out.extend_from_slice(n.to_string().as_bytes());
    if rng.gen_bool(0.3) {
        out.extend_from_slice(format!(".{}", rng.gen_range(0..100)).as_bytes());
    }
    if rng.gen_bool(0.05) {
        out.extend_from_slice(format!("e{}", rng.gen_range(-5..6)).as_bytes());
    }
}

fn json_string(rng: &mut ChaCha8Rng, out: &mut Vec<u8>) {
    out.push(b'"');
    for i in 0..rng.gen_range(0..3) {
        if i > 0 {
            out.push(if rng.gen_bool(0.5) { b' ' } else { b'_' });
        }
        out.extend_from_slice(word(rng).as_bytes());
    }
    if rng.gen_bool(0.1) {
        out.extend_from_slice(br"\n");
    }
    out.push(b'"');
}

fn json_value(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, depth: usize, top: bool) {
    let container = top || (depth > 0 && rng.gen_bool(0.35));
    if !container {
        match rng.gen_range(0..6) {
            0 | 1 => json_string(rng, out),
            2 | 3 => json_number(rng, out),
            4 => out.extend_from_slice(if rng.gen_bool(0.5) { b"true" } else { b"false" }),
            _ => out.extend_from_slice(b"null"),
        }
        return;
    }
    let object = rng.gen_bool(0.6);
    out.push(if object { b'{' } else { b'[' });
    let items = rng.gen_range(0..=depth + 2);
    for i in 0..items {
        if i > 0 {
            out.push(b',');
        }
        ws(rng, out);
        if object {
            out.push(b'"');
            out.extend_from_slice(word(rng).as_bytes());
            out.extend_from_slice(b"\":");
            ws(rng, out);
        }
        json_value(rng, out, depth.saturating_sub(1), false);
    }
    ws(rng, out);
    out.push(if object { b'}' } else { b']' });
}

fn ini(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, scale: usize) {
    let sections = rng.gen_range(1..=scale + 1);
    if rng.gen_bool(0.3) {
        out.extend_from_slice(b"; generated\n");
    }
    for s in 0..sections {
        if s > 0 || rng.gen_bool(0.8) {
            out.extend_from_slice(format!("[{}]\n", word(rng)).as_bytes());
        }
        for _ in 0..rng.gen_range(1..=3) {
            let key = word(rng);
            let sep = if rng.gen_bool(0.8) { " = " } else { ": " };
            let value = match rng.gen_range(0..3) {
                0 => rng.gen_range(0..10000).to_string(),
                1 => word(rng).to_string(),
                _ => format!("/{}/{}", word(rng), word(rng)),
            };
            out.extend_from_slice(format!("{key}{sep}{value}\n").as_bytes());
        }
        if rng.gen_bool(0.2) {
            out.extend_from_slice(b"# note\n");
        }
        if rng.gen_bool(0.3) {
            out.push(b'\n');
        }
    }
}

fn sexp(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, depth: usize) {
    out.push(b'(');
    out.extend_from_slice(word(rng).as_bytes());
    for _ in 0..rng.gen_range(1..=depth + 2) {
        out.push(if rng.gen_bool(0.85) { b' ' } else { b'\n' });
        if depth > 0 && rng.gen_bool(0.4) {
            sexp(rng, out, depth - 1);
            continue;
        }
        match rng.gen_range(0..4) {
            0 => out.extend_from_slice(rng.gen_range(-50..1000).to_string().as_bytes()),
            1 => out.extend_from_slice(format!("\"{} {}\"", word(rng), word(rng)).as_bytes()),
            2 => out.extend_from_slice(format!(":{}", word(rng)).as_bytes()),
            _ => out.extend_from_slice(word(rng).as_bytes()),
        }
    }
    out.push(b')');
}

fn tinyc_id(rng: &mut ChaCha8Rng) -> u8 {
    // Keyword prefixes are fine as single letters; the lexer splits on length.
    rng.gen_range(b'a'..=b'z')
}

fn tinyc_term(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, depth: usize) {
    match rng.gen_range(0..5) {
        0 if depth > 0 => {
            out.push(b'(');
            tinyc_expr(rng, out, depth - 1);
            out.push(b')');
        }
        0 | 1 => out.extend_from_slice(rng.gen_range(0..100).to_string().as_bytes()),
        _ => out.push(tinyc_id(rng)),
    }
}

fn tinyc_sum(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, depth: usize) {
    tinyc_term(rng, out, depth);
    for _ in 0..rng.gen_range(0..3) {
        out.extend_from_slice(if rng.gen_bool(0.5) { b" + " } else { b" - " });
        tinyc_term(rng, out, depth);
    }
}

fn tinyc_expr(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, depth: usize) {
    if rng.gen_bool(0.3) {
        out.push(tinyc_id(rng));
        out.extend_from_slice(b" = ");
        tinyc_expr(rng, out, depth.saturating_sub(1));
        return;
    }
    tinyc_sum(rng, out, depth);
    if rng.gen_bool(0.3) {
        out.extend_from_slice(b" < ");
        tinyc_sum(rng, out, depth);
    }
}

fn tinyc_paren(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, depth: usize) {
    out.push(b'(');
    tinyc_expr(rng, out, depth);
    out.push(b')');
}

fn tinyc_stmt(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, depth: usize) {
    let pick = if depth == 0 { rng.gen_range(5..8) } else { rng.gen_range(0..8) };
    match pick {
        0 => {
            out.extend_from_slice(b"if ");
            tinyc_paren(rng, out, 1);
            out.push(b' ');
            tinyc_stmt(rng, out, depth - 1);
            if rng.gen_bool(0.4) {
                out.extend_from_slice(b" else ");
                tinyc_stmt(rng, out, depth - 1);
            }
        }
        1 => {
            out.extend_from_slice(b"while ");
            tinyc_paren(rng, out, 1);
            out.push(b' ');
            tinyc_stmt(rng, out, depth - 1);
        }
        2 => {
            out.extend_from_slice(b"do ");
            tinyc_stmt(rng, out, depth - 1);
            out.extend_from_slice(b" while ");
            tinyc_paren(rng, out, 1);
            out.push(b';');
        }
        3 | 4 => tinyc_block(rng, out, depth - 1),
        _ => {
            out.push(tinyc_id(rng));
            out.extend_from_slice(b" = ");
            tinyc_expr(rng, out, 1);
            out.push(b';');
        }
    }
}

fn tinyc_block(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, depth: usize) {
    out.push(b'{');
    for _ in 0..rng.gen_range(1..=3) {
        out.push(if rng.gen_bool(0.7) { b' ' } else { b'\n' });
        tinyc_stmt(rng, out, depth);
    }
    out.extend_from_slice(b" }");
}

fn tinyc_program(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, scale: usize) {
    tinyc_block(rng, out, scale.min(3));
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn outputs_are_valid_and_sized() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for format in Format::ALL {
            for (lo, hi) in [(8, 40), (50, 300)] {
                for _ in 0..50 {
                    let doc = generate(format, &mut rng, lo, hi);
                    assert!((lo..=hi).contains(&doc.len()));
                    assert!(
                        format.classify(&doc).is_complete(),
                        "{format}: {}",
                        String::from_utf8_lossy(&doc)
                    );
                }
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate(Format::Json, &mut ChaCha8Rng::seed_from_u64(9), 20, 200);
        let b = generate(Format::Json, &mut ChaCha8Rng::seed_from_u64(9), 20, 200);
        assert_eq!(a, b);
    }
}
