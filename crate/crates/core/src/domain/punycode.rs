//! Punycode (RFC 3492) for single DNS labels, with the `xn--` ACE prefix.

use thiserror::Error;

pub const ACE_PREFIX: &str = "xn--";

const BASE: u32 = 36;
const TMIN: u32 = 1;
const TMAX: u32 = 26;
const SKEW: u32 = 38;
const DAMP: u32 = 700;
const INITIAL_BIAS: u32 = 72;
const INITIAL_N: u32 = 0x80;
const DELIMITER: char = '-';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PunycodeError {
    #[error("invalid punycode digit {0:?}")]
    InvalidDigit(char),
    #[error("non-ASCII character {0:?} in basic code points")]
    NonBasic(char),
    #[error("truncated punycode integer")]
    Truncated,
    #[error("punycode arithmetic overflow")]
    Overflow,
    #[error("decoded value {0:#x} is not a Unicode scalar value")]
    InvalidCodePoint(u32),
    #[error("label is entirely ASCII and needs no encoding")]
    AllAscii,
}

fn adapt(mut delta: u32, num_points: u32, first_time: bool) -> u32 {
    delta /= if first_time { DAMP } else { 2 };
    delta += delta / num_points;
    let mut k = 0;
    while delta > ((BASE - TMIN) * TMAX) / 2 {
        delta /= BASE - TMIN;
        k += BASE;
    }
    k + (BASE - TMIN + 1) * delta / (delta + SKEW)
}

fn digit_value(c: char) -> Option<u32> {
    match c {
        'a'..='z' => Some(c as u32 - 'a' as u32),
        'A'..='Z' => Some(c as u32 - 'A' as u32),
        '0'..='9' => Some(c as u32 - '0' as u32 + 26),
        _ => None,
    }
}

fn digit_char(d: u32) -> char {
    debug_assert!(d < BASE);
    let b = if d < 26 { b'a' + d as u8 } else { b'0' + (d - 26) as u8 };
    b as char
}

fn threshold(k: u32, bias: u32) -> u32 {
    if k <= bias {
        TMIN
    } else if k >= bias + TMAX {
        TMAX
    } else {
        k - bias
    }
}

/// Decodes a raw punycode string (without the `xn--` prefix).
pub fn decode_raw(input: &str) -> Result<String, PunycodeError> {
    let (basic, extended) = match input.rfind(DELIMITER) {
        Some(pos) => (&input[..pos], &input[pos + 1..]),
        None => ("", input),
    };
    let mut output: Vec<char> = Vec::with_capacity(input.len());
    for c in basic.chars() {
        if !c.is_ascii() {
            return Err(PunycodeError::NonBasic(c));
        }
        output.push(c);
    }

    let mut n = INITIAL_N;
    let mut i: u32 = 0;
    let mut bias = INITIAL_BIAS;
    let mut digits = extended.chars().peekable();
    while digits.peek().is_some() {
        let old_i = i;
        let mut weight: u32 = 1;
        let mut k = BASE;
        loop {
            let c = digits.next().ok_or(PunycodeError::Truncated)?;
            let digit = digit_value(c).ok_or(PunycodeError::InvalidDigit(c))?;
            i = digit.checked_mul(weight).and_then(|v| i.checked_add(v)).ok_or(PunycodeError::Overflow)?;
            let t = threshold(k, bias);
            if digit < t {
                break;
            }
            weight = weight.checked_mul(BASE - t).ok_or(PunycodeError::Overflow)?;
            k += BASE;
        }
        let len = output.len() as u32 + 1;
        bias = adapt(i - old_i, len, old_i == 0);
        n = n.checked_add(i / len).ok_or(PunycodeError::Overflow)?;
        i %= len;
        let ch = char::from_u32(n).ok_or(PunycodeError::InvalidCodePoint(n))?;
        output.insert(i as usize, ch);
        i += 1;
    }
    Ok(output.into_iter().collect())
}

/// Encodes a Unicode string as raw punycode (without the `xn--` prefix).
pub fn encode_raw(input: &str) -> Result<String, PunycodeError> {
    let code_points: Vec<u32> = input.chars().map(|c| c as u32).collect();
    let mut output: String = input.chars().filter(char::is_ascii).collect();
    let basic_len = output.len() as u32;
    let mut handled = basic_len;
    if basic_len > 0 {
        output.push(DELIMITER);
    }

    let mut n = INITIAL_N;
    let mut delta: u32 = 0;
    let mut bias = INITIAL_BIAS;
    let total = code_points.len() as u32;
    while handled < total {
        let m = code_points.iter().copied().filter(|&c| c >= n).min().expect("unhandled code point remains");
        delta = (m - n).checked_mul(handled + 1).and_then(|v| delta.checked_add(v)).ok_or(PunycodeError::Overflow)?;
        n = m;
        for &c in &code_points {
            if c < n {
                delta = delta.checked_add(1).ok_or(PunycodeError::Overflow)?;
            }
            if c == n {
                let mut q = delta;
                let mut k = BASE;
                loop {
                    let t = threshold(k, bias);
                    if q < t {
                        break;
                    }
                    output.push(digit_char(t + (q - t) % (BASE - t)));
                    q = (q - t) / (BASE - t);
                    k += BASE;
                }
                output.push(digit_char(q));
                bias = adapt(delta, handled + 1, handled == basic_len);
                delta = 0;
                handled += 1;
            }
        }
        delta += 1;
        n += 1;
    }
    Ok(output)
}

/// Decodes an `xn--` label to Unicode. Labels without the prefix are
/// returned unchanged.
pub fn punycode_decode(label: &str) -> Result<String, PunycodeError> {
    match strip_ace_prefix(label) {
        Some(rest) => decode_raw(rest),
        None => Ok(label.to_string()),
    }
}

/// Encodes a label containing at least one non-ASCII character into its
/// `xn--` form.
pub fn punycode_encode(label: &str) -> Result<String, PunycodeError> {
    if label.is_ascii() {
        return Err(PunycodeError::AllAscii);
    }
    let mut out = String::from(ACE_PREFIX);
    out.push_str(&encode_raw(label)?);
    Ok(out)
}

pub(crate) fn strip_ace_prefix(label: &str) -> Option<&str> {
    match label.get(..ACE_PREFIX.len()) {
        Some(head) if head.eq_ignore_ascii_case(ACE_PREFIX) => Some(&label[ACE_PREFIX.len()..]),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_mueller() {
        assert_eq!(punycode_decode("xn--mller-kva").unwrap(), "müller");
    }

    #[test]
    fn encodes_mueller() {
        assert_eq!(punycode_encode("müller").unwrap(), "xn--mller-kva");
    }

    #[test]
    fn plain_label_passes_through_decode() {
        assert_eq!(punycode_decode("google").unwrap(), "google");
    }

    #[test]
    fn ascii_only_encode_is_rejected() {
        assert_eq!(punycode_encode("google"), Err(PunycodeError::AllAscii));
    }

    #[test]
    fn rfc_sample_strings() {
        // RFC 3492 section 7.1 (A) Arabic and (L) Japanese samples.
        let arabic = "\u{0644}\u{064A}\u{0647}\u{0645}\u{0627}\u{0628}\u{062A}\u{0643}\u{0644}\
                      \u{0645}\u{0648}\u{0634}\u{0639}\u{0631}\u{0628}\u{064A}\u{061F}";
        assert_eq!(encode_raw(arabic).unwrap(), "egbpdaj6bu4bxfgehfvwxn");
        assert_eq!(decode_raw("egbpdaj6bu4bxfgehfvwxn").unwrap(), arabic);
        let japanese = "3\u{5E74}B\u{7D44}\u{91D1}\u{516B}\u{5148}\u{751F}";
        assert_eq!(encode_raw(japanese).unwrap(), "3B-ww4c5e180e575a65lsy2b");
    }

    #[test]
    fn invalid_digit_and_overflow() {
        assert!(matches!(punycode_decode("xn--abc-!!"), Err(PunycodeError::InvalidDigit('!'))));
        assert_eq!(punycode_decode("xn--99999999999"), Err(PunycodeError::Overflow));
        // truncated variable-length integer
        assert_eq!(punycode_decode("xn--mller-k"), Err(PunycodeError::Truncated));
    }

    #[test]
    fn cyrillic_lookalike() {
        let label = "p\u{0430}ypal";
        let ace = punycode_encode(label).unwrap();
        assert!(ace.starts_with("xn--"));
        assert_eq!(punycode_decode(&ace).unwrap(), label);
    }
}
