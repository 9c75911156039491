//! Row modules over `Z_d` in Howell normal form.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

fn mulmod(a: u64, b: u64, d: u64) -> u64 {
    ((a as u128 * b as u128) % d as u128) as u64
}

fn addmod(a: u64, b: u64, d: u64) -> u64 {
    ((a as u128 + b as u128) % d as u128) as u64
}

fn negmod(a: u64, d: u64) -> u64 {
    (d - a % d) % d
}

/// `(g, s, t)` with `s a + t b = g = gcd(a, b)` as signed integers.
fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let e = a.extended_gcd(&b);
    (e.gcd, e.x, e.y)
}

fn to_mod(x: i128, d: u64) -> u64 {
    x.rem_euclid(d as i128) as u64
}

/// A unit `c` of `Z_d` with `c a = gcd(a, d) (mod d)`.
fn normalizing_unit(a: u64, d: u64) -> u64 {
    let g = a.gcd(&d);
    let dp = d / g;
    if dp == 1 {
        return 1;
    }
    let (_, s, _) = xgcd((a / g) as i128, dp as i128);
    let c0 = to_mod(s, dp);
    let mut c = c0;
    while c.gcd(&d) != 1 {
        c += dp;
    }
    c % d
}

fn combine(r1: &[u64], c1: u64, r2: &[u64], c2: u64, d: u64) -> Vec<u64> {
    r1.iter()
        .zip(r2)
        .map(|(&x, &y)| addmod(mulmod(c1, x, d), mulmod(c2, y, d), d))
        .collect()
}

/// Howell normal form of the row span of `rows` over `Z_d`; zero rows removed.
pub fn howell_form(rows: &[Vec<u64>], ncols: usize, d: u64) -> Vec<Vec<u64>> {
    assert!(d >= 2, "modulus must be at least 2");
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols, "row length mismatch");
            r.iter().map(|x| x % d).collect()
        })
        .filter(|r: &Vec<u64>| r.iter().any(|&x| x != 0))
        .collect();
    let mut r = 0;
    for col in 0..ncols {
        if r >= a.len() {
            break;
        }
        // gcd of the column collected into row r
        for i in r + 1..a.len() {
            if a[i][col] == 0 {
                continue;
            }
            let x = a[r][col] as i128;
            let y = a[i][col] as i128;
            let (g, s, t) = xgcd(x, y);
            let u = to_mod(x / g, d);
            let v = to_mod(y / g, d);
            let new_r = combine(&a[r], to_mod(s, d), &a[i], to_mod(t, d), d);
            let new_i = combine(&a[r], negmod(v, d), &a[i], u, d);
            a[r] = new_r;
            a[i] = new_i;
        }
        if a[r][col] == 0 {
            continue;
        }
        let c = normalizing_unit(a[r][col], d);
        a[r] = a[r].iter().map(|&x| mulmod(c, x, d)).collect();
        let piv = a[r][col];
        for k in 0..r {
            let q = a[k][col] / piv;
            if q != 0 {
                let row = a[r].clone();
                a[k] = combine(&a[k], 1, &row, negmod(q, d), d);
            }
        }
        let ann: Vec<u64> = a[r].iter().map(|&x| mulmod(d / piv, x, d)).collect();
        if ann.iter().any(|&x| x != 0) {
            a.push(ann);
        }
        r += 1;
    }
    a.truncate(r);
    a.retain(|row| row.iter().any(|&x| x != 0));
    a
}

/// Pivot column and pivot value of each row of a Howell form.
pub fn pivots(form: &[Vec<u64>]) -> Vec<(usize, u64)> {
    form.iter()
        .map(|row| {
            let c = row.iter().position(|&x| x != 0).expect("zero row in Howell form");
            (c, row[c])
        })
        .collect()
}

/// Number of elements of the module with the given Howell form.
pub fn cardinality(form: &[Vec<u64>], d: u64) -> BigUint {
    pivots(form)
        .iter()
        .fold(BigUint::one(), |acc, &(_, g)| acc * BigUint::from(d / g))
}

/// Orders `d / g` of the pivots; their product is the cardinality.
pub fn pivot_orders(form: &[Vec<u64>], d: u64) -> Vec<u64> {
    pivots(form).iter().map(|&(_, g)| d / g).collect()
}

/// Membership test by reduction against a Howell form.
pub fn contains(form: &[Vec<u64>], v: &[u64], d: u64) -> bool {
    let mut w: Vec<u64> = v.iter().map(|x| x % d).collect();
    let mut col = 0;
    for (row, &(pc, g)) in form.iter().zip(&pivots(form)) {
        if w[col..pc].iter().any(|&x| x != 0) {
            return false;
        }
        if !w[pc].is_multiple_of(g) {
            return false;
        }
        let q = w[pc] / g;
        w = combine(&w, 1, row, negmod(q, d), d);
        col = pc + 1;
    }
    w.iter().all(|&x| x == 0)
}

/// Basis of the left kernel `{x : x B = 0}` of a `k x m` matrix `B`, as a Howell form.
pub fn left_kernel(b: &[Vec<u64>], m: usize, d: u64) -> Vec<Vec<u64>> {
    let k = b.len();
    let aug: Vec<Vec<u64>> = (0..k)
        .map(|i| {
            let mut row = b[i].clone();
            row.extend((0..k).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    let form = howell_form(&aug, m + k, d);
    let ker: Vec<Vec<u64>> = form
        .into_iter()
        .filter(|row| row[..m].iter().all(|&x| x == 0))
        .map(|row| row[m..].to_vec())
        .collect();
    howell_form(&ker, k, d)
}

/// All elements of the module spanned by `form`, sorted.
pub fn elements(form: &[Vec<u64>], ncols: usize, d: u64) -> Vec<Vec<u64>> {
    let orders = pivot_orders(form, d);
    let mut seen = std::collections::BTreeSet::new();
    let mut coeffs = vec![0u64; form.len()];
    loop {
        let mut v = vec![0u64; ncols];
        for (c, row) in coeffs.iter().zip(form) {
            if *c != 0 {
                v = combine(&v, 1, row, *c, d);
            }
        }
        seen.insert(v);
        let mut i = 0;
        loop {
            if i == coeffs.len() {
                return seen.into_iter().collect();
            }
            coeffs[i] += 1;
            if coeffs[i] < orders[i] {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn span_bruteforce(rows: &[Vec<u64>], m: usize, d: u64) -> BTreeSet<Vec<u64>> {
        let mut set: BTreeSet<Vec<u64>> = BTreeSet::new();
        set.insert(vec![0; m]);
        loop {
            let mut grew = false;
            let current: Vec<Vec<u64>> = set.iter().cloned().collect();
            for v in &current {
                for r in rows {
                    let w = combine(v, 1, r, 1, d);
                    grew |= set.insert(w);
                }
            }
            if !grew {
                return set;
            }
        }
    }

    #[test]
    fn simple_forms() {
        assert!(howell_form(&[], 3, 6).is_empty());
        let id: Vec<Vec<u64>> = (0..3).map(|i| (0..3).map(|j| u64::from(i == j)).collect()).collect();
        assert_eq!(howell_form(&id, 3, 5), id);
        assert_eq!(cardinality(&howell_form(&id, 3, 5), 5), BigUint::from(125u32));
        let dup = vec![vec![1, 2], vec![1, 2], vec![2, 4]];
        assert_eq!(howell_form(&dup, 2, 7), vec![vec![1, 2]]);
        // over Z_4 the span of (2, 1) contains (0, 2)
        let f = howell_form(&[vec![2, 1]], 2, 4);
        assert_eq!(f, vec![vec![2, 1], vec![0, 2]]);
        assert_eq!(cardinality(&f, 4), BigUint::from(4u32));
    }

    #[test]
    fn kernel_example() {
        // x (1, 1) = 0 over Z_6: x_1 + x_2 = 0
        let k = left_kernel(&[vec![1], vec![1]], 1, 6);
        assert_eq!(k, vec![vec![1, 5]]);
    }

    proptest! {
        #[test]
        fn howell_matches_bruteforce(d in prop::sample::select(vec![2u64, 3, 4, 6, 8, 9, 12]),
                                     rows in prop::collection::vec(prop::collection::vec(0u64..12, 3), 0..4)) {
            let m = 3;
            let rows: Vec<Vec<u64>> = rows.into_iter().map(|r| r.into_iter().map(|x| x % d).collect()).collect();
            let form = howell_form(&rows, m, d);
            let brute = span_bruteforce(&rows, m, d);
            prop_assert_eq!(cardinality(&form, d), BigUint::from(brute.len()));
            let elems: BTreeSet<Vec<u64>> = elements(&form, m, d).into_iter().collect();
            prop_assert_eq!(&elems, &brute);
            for x in 0..d.pow(3) {
                let v = vec![x % d, (x / d) % d, x / (d * d)];
                prop_assert_eq!(contains(&form, &v, d), brute.contains(&v));
            }
            // canonical: idempotent and independent of the generating set
            prop_assert_eq!(howell_form(&form, m, d), form.clone());
            let mut alt: Vec<Vec<u64>> = brute.iter().cloned().collect();
            alt.reverse();
            prop_assert_eq!(howell_form(&alt, m, d), form);
        }

        #[test]
        fn kernel_is_exact(d in prop::sample::select(vec![2u64, 4, 6, 9]),
                           b in prop::collection::vec(prop::collection::vec(0u64..9, 2), 3)) {
            let b: Vec<Vec<u64>> = b.into_iter().map(|r| r.into_iter().map(|x| x % d).collect()).collect();
            let ker = left_kernel(&b, 2, d);
            let elems: BTreeSet<Vec<u64>> = elements(&ker, 3, d).into_iter().collect();
            for x in 0..d.pow(3) {
                let v = vec![x % d, (x / d) % d, x / (d * d)];
                let image: Vec<u64> = (0..2).map(|j| (0..3).fold(0, |acc, i| addmod(acc, mulmod(v[i], b[i][j], d), d))).collect();
                prop_assert_eq!(image.iter().all(|&y| y == 0), elems.contains(&v));
            }
        }
    }
}
