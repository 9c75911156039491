//! Named information inequalities.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::functional::Functional;
use crate::subset::{self, brace_label, Subset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    ShannonElemental,
    Ssa,
    WeakMonotonicity,
    NonShannon,
    LinearRank,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedInequality {
    pub name: String,
    pub functional: Functional,
    pub family: Family,
}

fn check_sets(n: usize, sets: &[Subset]) -> Result<()> {
    subset::check_parties(n)?;
    if sets.iter().any(|&s| s >> n != 0) {
        return invalid(format!("subset outside [{n}]"));
    }
    Ok(())
}

/// `Δ[I, J] = S(I) + S(J) - S(I ∪ J) - S(I ∩ J)`.
pub fn ssa(i: Subset, j: Subset, n: usize) -> Result<Functional> {
    check_sets(n, &[i, j])?;
    Ok(Functional::from_terms(n, &[(i, 1), (j, 1), (i | j, -1), (i & j, -1)]))
}

/// `E[I, J] = S(I) + S(J) - S(I \ J) - S(J \ I)`.
pub fn weak_monotonicity(i: Subset, j: Subset, n: usize) -> Result<Functional> {
    check_sets(n, &[i, j])?;
    Ok(Functional::from_terms(n, &[(i, 1), (j, 1), (i & !j, -1), (j & !i, -1)]))
}

/// `I(A : B | C) = H(AC) + H(BC) - H(ABC) - H(C)`.
pub fn conditional_mutual_information(a: Subset, b: Subset, c: Subset, n: usize) -> Result<Functional> {
    check_sets(n, &[a, b, c])?;
    Ok(Functional::from_terms(n, &[(a | c, 1), (b | c, 1), (a | b | c, -1), (c, -1)]))
}

pub fn mutual_information(a: Subset, b: Subset, n: usize) -> Result<Functional> {
    conditional_mutual_information(a, b, 0, n)
}

/// `H(X_i | X_{i^c}) >= 0` and `I(X_i : X_j | X_K) >= 0`.
pub fn elemental_shannon(n: usize) -> Result<Vec<NamedInequality>> {
    subset::check_parties(n)?;
    let full = subset::full(n);
    let mut out = Vec::new();
    for i in 1..=n {
        let rest = subset::complement(subset::singleton(i), n);
        out.push(NamedInequality {
            name: format!("H({i}|{})", brace_label(rest)),
            functional: Functional::from_terms(n, &[(full, 1), (rest, -1)]),
            family: Family::ShannonElemental,
        });
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let others = full & !subset::singleton(i) & !subset::singleton(j);
            for k in subset::subsets_of(others) {
                out.push(NamedInequality {
                    name: format!("I({i}:{}|{})", j, brace_label(k)),
                    functional: conditional_mutual_information(subset::singleton(i), subset::singleton(j), k, n)?,
                    family: Family::ShannonElemental,
                });
            }
        }
    }
    Ok(out)
}

/// Essential strong subadditivity and weak monotonicity instances `(E_Δ, E_E)`.
pub fn pippenger_sets(n: usize) -> Result<(Vec<NamedInequality>, Vec<NamedInequality>)> {
    subset::check_parties(n)?;
    let full = subset::full(n);
    let mut e_delta = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            let others = full & !subset::singleton(i) & !subset::singleton(j);
            for k in subset::subsets_of(others) {
                let a = k | subset::singleton(i);
                let b = k | subset::singleton(j);
                e_delta.push(NamedInequality {
                    name: format!("Delta[{},{}]", brace_label(a), brace_label(b)),
                    functional: ssa(a, b, n)?,
                    family: Family::Ssa,
                });
            }
        }
    }
    let mut e_e = Vec::new();
    for k in 1..=n {
        let next = k % n + 1;
        let others = full & !subset::singleton(k);
        for a_rest in subset::subsets_of(others) {
            if n > 1 && !subset::contains(a_rest, next) {
                continue;
            }
            let a = a_rest | subset::singleton(k);
            let b = (others & !a_rest) | subset::singleton(k);
            e_e.push(NamedInequality {
                name: format!("E[{},{}]", brace_label(a), brace_label(b)),
                functional: weak_monotonicity(a, b, n)?,
                family: Family::WeakMonotonicity,
            });
        }
    }
    Ok((e_delta, e_e))
}

/// All distinct nonzero `Δ[I, J]` and `E[I, J]` over `I, J ⊆ [n]`.
pub fn xi_catalog(n: usize) -> Result<Vec<NamedInequality>> {
    subset::check_parties(n)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (family, build) in [
        (Family::Ssa, ssa as fn(Subset, Subset, usize) -> Result<Functional>),
        (Family::WeakMonotonicity, weak_monotonicity),
    ] {
        for i in 0..1usize << n {
            for j in i..1usize << n {
                let f = build(i, j, n)?;
                if f.is_zero() || !seen.insert(f.to_primitive()) {
                    continue;
                }
                let tag = if family == Family::Ssa { "Delta" } else { "E" };
                out.push(NamedInequality {
                    name: format!("{tag}[{},{}]", brace_label(i), brace_label(j)),
                    functional: f,
                    family,
                });
            }
        }
    }
    Ok(out)
}

/// Zhang-Yeung: `I(1:2) + I(1:34) + 3I(3:4|1) + I(3:4|2) - 2I(3:4) >= 0`.
pub fn zhang_yeung() -> NamedInequality {
    let n = 4;
    let s = subset::singleton;
    let cmi = |a, b, c| conditional_mutual_information(a, b, c, n).expect("valid sets");
    let three = num_rational::BigRational::from_integer(3.into());
    let two = num_rational::BigRational::from_integer(2.into());
    let f = cmi(s(1), s(2), 0)
        .add(&cmi(s(1), s(3) | s(4), 0))
        .add(&cmi(s(3), s(4), s(1)).scale(&three))
        .add(&cmi(s(3), s(4), s(2)))
        .sub(&cmi(s(3), s(4), 0).scale(&two));
    NamedInequality { name: "Zhang-Yeung".into(), functional: f, family: Family::NonShannon }
}

/// Ingleton: `I(1:2|3) + I(1:2|4) + I(3:4) - I(1:2) >= 0`.
pub fn ingleton() -> NamedInequality {
    let n = 4;
    let s = subset::singleton;
    let cmi = |a, b, c| conditional_mutual_information(a, b, c, n).expect("valid sets");
    let f = cmi(s(1), s(2), s(3))
        .add(&cmi(s(1), s(2), s(4)))
        .add(&cmi(s(3), s(4), 0))
        .sub(&cmi(s(1), s(2), 0));
    NamedInequality { name: "Ingleton".into(), functional: f, family: Family::LinearRank }
}

/// Everything the catalog knows for `n` parties.
pub fn full_catalog(n: usize) -> Result<Vec<NamedInequality>> {
    let mut out = elemental_shannon(n)?;
    out.extend(xi_catalog(n)?);
    if n == 4 {
        out.push(zhang_yeung());
        out.push(ingleton());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{entropy_vector_classical, JointDistribution};
    use crate::exact::rat;
    use crate::morphisms::{adjoint_action, correlated_bits_vector, is_balanced};
    use crate::perm::Permutation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(parties: &[usize]) -> Subset {
        subset::from_parties(parties, 4).unwrap()
    }

    #[test]
    fn ssa_examples() {
        let f = ssa(set(&[1, 2]), set(&[2, 3]), 3).unwrap();
        assert_eq!(f, Functional::from_terms(3, &[(0b011, 1), (0b110, 1), (0b111, -1), (0b010, -1)]));
        assert!(ssa(0b11, 0b11, 2).unwrap().is_zero());
        assert_eq!(ssa(1, 2, 2).unwrap(), Functional::from_terms(2, &[(1, 1), (2, 1), (3, -1)]));
    }

    #[test]
    fn weak_monotonicity_examples() {
        let f = weak_monotonicity(set(&[1, 2]), set(&[2, 3]), 3).unwrap();
        assert_eq!(f, Functional::from_terms(3, &[(0b011, 1), (0b110, 1), (0b001, -1), (0b100, -1)]));
        assert_eq!(weak_monotonicity(0b101, 0b101, 3).unwrap(), Functional::from_terms(3, &[(0b101, 2)]));
        let g = weak_monotonicity(0b011, 0b110, 3).unwrap();
        assert_eq!(g.get(0b001), &rat(-1, 1));
    }

    #[test]
    fn cmi_examples() {
        assert_eq!(mutual_information(1, 2, 2).unwrap(), Functional::from_terms(2, &[(1, 1), (2, 1), (3, -1)]));
        assert_eq!(conditional_mutual_information(1, 1, 2, 2).unwrap(), Functional::from_terms(2, &[(3, 1), (2, -1)]));
        assert_eq!(conditional_mutual_information(1, 2, 4, 3).unwrap(), ssa(0b101, 0b110, 3).unwrap());
    }

    #[test]
    fn elemental_counts() {
        assert_eq!(elemental_shannon(1).unwrap().len(), 1);
        assert_eq!(elemental_shannon(2).unwrap().len(), 3);
        assert_eq!(elemental_shannon(3).unwrap().len(), 9);
        assert_eq!(elemental_shannon(4).unwrap().len(), 4 + 6 * 4);
    }

    #[test]
    fn pippenger_counts() {
        for (n, d, e) in [(2, 1, 2), (3, 6, 6), (4, 24, 16)] {
            let (a, b) = pippenger_sets(n).unwrap();
            assert_eq!((a.len(), b.len()), (d, e), "n = {n}");
        }
    }

    #[test]
    fn zhang_yeung_coefficients() {
        let zy = zhang_yeung().functional;
        let expected = Functional::from_terms(
            4,
            &[
                (set(&[1]), -1),
                (set(&[3]), -2),
                (set(&[4]), -2),
                (set(&[1, 2]), -1),
                (set(&[3, 4]), 3),
                (set(&[1, 3]), 3),
                (set(&[1, 4]), 3),
                (set(&[2, 3]), 1),
                (set(&[2, 4]), 1),
                (set(&[1, 3, 4]), -4),
                (set(&[2, 3, 4]), -1),
            ],
        );
        assert_eq!(zy, expected);
        assert_eq!(zy.get(set(&[2])), &rat(0, 1));
        for i in 1..16 {
            assert!(zy.evaluate_exact(&correlated_bits_vector(4, i)).unwrap() >= rat(0, 1));
        }
    }

    #[test]
    fn ingleton_is_balanced() {
        assert!(is_balanced(&ingleton().functional));
    }

    #[test]
    fn zhang_yeung_on_random_distributions() {
        let zy = zhang_yeung().functional;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let dims: Vec<usize> = (0..4).map(|_| rng.gen_range(2..=3)).collect();
            let size: usize = dims.iter().product();
            let w: Vec<u64> = (0..size).map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(1..10) }).collect();
            let total: u64 = w.iter().sum();
            if total == 0 {
                continue;
            }
            let p: Vec<_> = w.iter().map(|&x| rat(x as i64, total as i64)).collect();
            let h = entropy_vector_classical(&JointDistribution::from_rationals(dims, p).unwrap()).unwrap();
            assert!(zy.evaluate(&h).unwrap() >= -1e-8);
        }
    }

    #[test]
    fn adjoint_orbit_examples() {
        let t14 = Permutation::transposition(4, 1, 4).unwrap();
        let e = weak_monotonicity(0b101, 0b110, 3).unwrap();
        assert_eq!(adjoint_action(&t14, &e).unwrap(), ssa(0b011, 0b110, 3).unwrap());
        for n in [3usize, 4] {
            for i in 1..=n {
                for j in 1..=n {
                    if i == j {
                        continue;
                    }
                    let ic = subset::complement(subset::singleton(i), n);
                    let jc = subset::complement(subset::singleton(j), n);
                    let t = Permutation::transposition(n + 1, i, n + 1).unwrap();
                    let lhs = adjoint_action(&t, &ssa(ic, jc, n).unwrap()).unwrap();
                    let rhs = weak_monotonicity(subset::singleton(i) | subset::singleton(j), ic, n).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn orbit_preserves_essential_set() {
        let (a, b) = pippenger_sets(3).unwrap();
        let set: HashSet<Vec<num_bigint::BigInt>> = a.iter().chain(&b).map(|x| x.functional.to_primitive()).collect();
        for pi in Permutation::all(4) {
            for f in a.iter().chain(&b) {
                let g = adjoint_action(&pi, &f.functional).unwrap();
                assert!(set.contains(&g.to_primitive()));
            }
        }
    }
}
