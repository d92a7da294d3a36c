//! Exact integer convolution: three NTT-friendly primes recombined with
//! Garner's algorithm into `u128`.

use crate::error::{Error, Result};

const PRIMES: [u64; 3] = [998_244_353, 167_772_161, 469_762_049];
const ROOT: u64 = 3;
/// Largest transform length supported by every prime (`998244353 = 119·2²³+1`).
const MAX_LEN: usize = 1 << 23;
/// Below this size a schoolbook product is faster than three transforms.
const SCHOOLBOOK_CUTOFF: usize = 48;

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

fn transform(a: &mut [u64], invert: bool, m: u64) {
    let n = a.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(ROOT, (m - 1) / len as u64, m);
        if invert {
            w = pow_mod(w, m - 2, m);
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(len / 2);
            let mut wk = 1u64;
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                let x = *u;
                let y = *v * wk % m;
                *u = if x + y >= m { x + y - m } else { x + y };
                *v = if x >= y { x - y } else { x + m - y };
                wk = wk * w % m;
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = pow_mod(n as u64, m - 2, m);
        for x in a.iter_mut() {
            *x = *x * n_inv % m;
        }
    }
}

fn convolve_mod(a: &[u64], b: &[u64], size: usize, m: u64) -> Vec<u64> {
    let mut fa: Vec<u64> = a.iter().map(|&x| x % m).collect();
    let mut fb: Vec<u64> = b.iter().map(|&x| x % m).collect();
    fa.resize(size, 0);
    fb.resize(size, 0);
    transform(&mut fa, false, m);
    transform(&mut fb, false, m);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % m;
    }
    transform(&mut fa, true, m);
    fa
}

/// Linear convolution of two non-negative integer sequences, exact.
///
/// Fails with [`Error::Overflow`] when an output entry could exceed the CRT
/// range or the transform length is unsupported.
pub fn convolve(a: &[u64], b: &[u64]) -> Result<Vec<u128>> {
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let out_len = a.len() + b.len() - 1;
    // Every output entry is at most (Σa)(Σb).
    let mass_a: u128 = a.iter().map(|&x| x as u128).sum();
    let mass_b: u128 = b.iter().map(|&x| x as u128).sum();
    let bound = mass_a
        .checked_mul(mass_b)
        .ok_or_else(|| Error::Overflow("convolution mass exceeds 128 bits".into()))?;
    let modulus: u128 = PRIMES.iter().map(|&p| p as u128).product();
    if bound >= modulus {
        return Err(Error::Overflow(format!(
            "convolution entries may reach {bound}, beyond the exact range {modulus}"
        )));
    }

    if a.len().min(b.len()) <= SCHOOLBOOK_CUTOFF {
        let mut out = vec![0u128; out_len];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x as u128 * y as u128;
            }
        }
        return Ok(out);
    }

    let size = out_len.next_power_of_two();
    if size > MAX_LEN {
        return Err(Error::Overflow(format!(
            "transform length {size} exceeds {MAX_LEN}"
        )));
    }
    let r: Vec<Vec<u64>> = PRIMES
        .iter()
        .map(|&m| convolve_mod(a, b, size, m))
        .collect();

    let [m0, m1, m2] = PRIMES;
    let inv_m0_mod_m1 = pow_mod(m0, m1 - 2, m1);
    let m01_mod_m2 = m0 % m2 * (m1 % m2) % m2;
    let inv_m01_mod_m2 = pow_mod(m01_mod_m2, m2 - 2, m2);
    let out = (0..out_len)
        .map(|i| {
            let (x0, x1, x2) = (r[0][i], r[1][i], r[2][i]);
            let t1 = (x1 + m1 - x0 % m1) % m1 * inv_m0_mod_m1 % m1;
            let partial = x0 as u128 + t1 as u128 * m0 as u128;
            let partial_mod = (partial % m2 as u128) as u64;
            let t2 = (x2 + m2 - partial_mod) % m2 * inv_m01_mod_m2 % m2;
            partial + t2 as u128 * (m0 as u128 * m1 as u128)
        })
        .collect();
    Ok(out)
}
