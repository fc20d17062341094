use crate::kernel::MultiIndex;
use crate::linalg::{Key, SVec};

/// Largest number of independent variables supported by the key encoding.
pub const MAX_N: usize = 12;

const DEG_SHIFT: u32 = 120;
const TOP_SLOT: u32 = 112;

fn slot_shift(i: usize) -> u32 {
    TOP_SLOT - 8 * i as u32
}

/// Encodes the jet coordinate y^k_μ (k counted from 0) as an ordered key.
///
/// Keys compare by |μ|, then by −μ_1, …, −μ_n, then by k, which puts
/// jets of higher class first among those of equal order.
pub fn jet_key(k: usize, mu: &MultiIndex) -> Key {
    let n = mu.n();
    assert!(
        n <= MAX_N,
        "at most {MAX_N} independent variables are supported"
    );
    assert!(k < 1 << 16, "too many unknowns");
    let mut key: Key = (mu.order() as Key) << DEG_SHIFT;
    for (i, &e) in mu.0.iter().enumerate() {
        assert!(e < 255, "derivative order too large");
        key |= ((255 - e) as Key) << slot_shift(i);
    }
    for i in n..MAX_N {
        key |= 255 << slot_shift(i);
    }
    key | k as Key
}

/// Decodes a key into (unknown index, multi-index).
pub fn decode(key: Key, n: usize) -> (usize, MultiIndex) {
    let k = (key & 0xffff) as usize;
    let mu = (0..n)
        .map(|i| 255 - ((key >> slot_shift(i)) & 0xff) as u16)
        .collect();
    (k, MultiIndex(mu))
}

pub fn key_order(key: Key) -> usize {
    (key >> DEG_SHIFT) as usize
}

pub fn key_unknown(key: Key) -> usize {
    (key & 0xffff) as usize
}

/// Exponent of axis `i` (1-based).
pub fn key_exp(key: Key, i: usize) -> u16 {
    255 - ((key >> slot_shift(i - 1)) & 0xff) as u16
}

/// Class of the multi-index part; `None` at order zero.
pub fn key_class(key: Key, n: usize) -> Option<usize> {
    (1..=n).find(|&i| key_exp(key, i) > 0)
}

/// Key of y^k_{μ+1_i}.
pub fn shift_key(key: Key, i: usize) -> Key {
    key + (1 << DEG_SHIFT) - (1 << slot_shift(i - 1))
}

/// Key of y^k_{μ+ν}.
pub fn shift_key_by(key: Key, nu: &MultiIndex) -> Key {
    let mut k = key;
    for (i, &e) in nu.0.iter().enumerate() {
        for _ in 0..e {
            k = shift_key(k, i + 1);
        }
    }
    k
}

/// Formal derivative d_i of a linear jet form: shifts every jet and adds
/// the derivatives of the coefficients.
pub fn derive_form(v: &SVec, i: usize) -> SVec {
    let shifted = v.rekey_monotone(|k| shift_key(k, i));
    let coeffs = v.map(|c| c.derive(i));
    if coeffs.is_zero() {
        shifted
    } else {
        shifted.add(&coeffs)
    }
}

/// Order-q part of the form obtained by shifting every jet by 1_i.
pub fn shift_form(v: &SVec, i: usize) -> SVec {
    v.rekey_monotone(|k| shift_key(k, i))
}

/// Highest order appearing in a form.
pub fn form_order(v: &SVec) -> usize {
    v.lead_key().map(key_order).unwrap_or(0)
}

/// Renders a jet coordinate: `y12` for one unknown, `y2_12` otherwise.
pub fn jet_name(k: usize, mu: &MultiIndex, m: usize) -> String {
    let idx = mu.to_string();
    if m == 1 {
        format!("y{idx}")
    } else if idx.is_empty() {
        format!("y{}", k + 1)
    } else {
        format!("y{}_{}", k + 1, idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_matches_term_order() {
        let a = jet_key(0, &MultiIndex(vec![0, 0, 2]));
        let b = jet_key(0, &MultiIndex(vec![0, 1, 1]));
        let c = jet_key(0, &MultiIndex(vec![1, 0, 1]));
        let d = jet_key(0, &MultiIndex(vec![0, 0, 3]));
        assert!(d > a && a > b && b > c);
        assert!(jet_key(1, &MultiIndex(vec![0, 0, 2])) > a);
        assert_eq!(
            MultiIndex(vec![0, 0, 2]).cmp(&MultiIndex(vec![0, 1, 1])),
            std::cmp::Ordering::Greater
        );
    }

    #[test]
    fn round_trip_and_shift() {
        let mu = MultiIndex(vec![1, 0, 2]);
        let k = jet_key(3, &mu);
        assert_eq!(decode(k, 3), (3, mu.clone()));
        assert_eq!(decode(shift_key(k, 2), 3), (3, mu.plus_unit(2)));
        assert_eq!(key_class(k, 3), Some(1));
        assert_eq!(key_order(k), 3);
    }
}
