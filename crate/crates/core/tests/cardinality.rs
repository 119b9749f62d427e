use ttsat_core::{encode_at_least, encode_at_most, encode_exactly, BoundKind, CardError, CardRequest, CardScheme, Lit, VarAllocator};

/// Satisfiability by plain backtracking with unit propagation.
fn satisfiable(clauses: &[Vec<Lit>], assignment: &mut Vec<Option<bool>>) -> bool {
    loop {
        let mut changed = false;
        for c in clauses {
            let mut open = None;
            let mut n_open = 0;
            let mut sat = false;
            for &l in c {
                match assignment[l.var() as usize] {
                    Some(v) if v != l.is_negated() => {
                        sat = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        n_open += 1;
                        open = Some(l);
                    }
                }
            }
            if sat {
                continue;
            }
            match n_open {
                0 => return false,
                1 => {
                    let l = open.unwrap();
                    assignment[l.var() as usize] = Some(!l.is_negated());
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let Some(v) = (1..assignment.len()).find(|&v| assignment[v].is_none()) else {
        return true;
    };
    for value in [false, true] {
        let mut trial = assignment.clone();
        trial[v] = Some(value);
        if satisfiable(clauses, &mut trial) {
            *assignment = trial;
            return true;
        }
    }
    false
}

/// Input assignments (as bitmasks over `n` inputs) that extend to a model.
fn projected_models(clauses: &[Vec<Lit>], n: u32, num_vars: u32) -> Vec<u32> {
    (0..1u32 << n)
        .filter(|mask| {
            let mut a = vec![None; num_vars as usize + 1];
            for i in 0..n {
                a[i as usize + 1] = Some(mask >> i & 1 == 1);
            }
            satisfiable(clauses, &mut a)
        })
        .collect()
}

fn check(kind: BoundKind, scheme: CardScheme, k: usize, n: u32) {
    let lits: Vec<Lit> = (1..=n).map(Lit::pos).collect();
    let mut alloc = VarAllocator::new(n);
    let clauses = CardRequest {
        bound_kind: kind,
        k,
        literals: lits,
        scheme,
    }
    .encode(&mut alloc)
    .unwrap();
    let got = projected_models(&clauses, n, alloc.max_var());
    let want: Vec<u32> = (0..1u32 << n)
        .filter(|m| {
            let ones = m.count_ones() as usize;
            match kind {
                BoundKind::AtMost => ones <= k,
                BoundKind::AtLeast => ones >= k,
                BoundKind::Exactly => ones == k,
            }
        })
        .collect();
    assert_eq!(got, want, "{kind:?} {k} of {n} with {scheme:?}");
}

#[test]
fn projections_match_popcount_up_to_five_inputs() {
    for scheme in CardScheme::ALL {
        for kind in [BoundKind::AtMost, BoundKind::AtLeast, BoundKind::Exactly] {
            for n in 1..=5 {
                for k in 0..=n as usize {
                    check(kind, scheme, k, n);
                }
            }
        }
    }
}

#[test]
fn at_most_two_of_four_has_eleven_models() {
    // C(4,0) + C(4,1) + C(4,2)
    for scheme in CardScheme::ALL {
        let lits: Vec<Lit> = (1..=4).map(Lit::pos).collect();
        let mut alloc = VarAllocator::new(4);
        let clauses = encode_at_most(2, &lits, scheme, &mut alloc).unwrap();
        assert_eq!(projected_models(&clauses, 4, alloc.max_var()).len(), 11);
    }
}

#[test]
fn negative_literals_are_counted_as_true_when_false() {
    let lits = [Lit::neg(1), Lit::pos(2), Lit::neg(3)];
    for scheme in CardScheme::ALL {
        let mut alloc = VarAllocator::new(3);
        let clauses = encode_exactly(2, &lits, scheme, &mut alloc).unwrap();
        let got = projected_models(&clauses, 3, alloc.max_var());
        let want: Vec<u32> = (0..8u32)
            .filter(|m| {
                let vals = [m & 1 == 0, m & 2 != 0, m & 4 == 0];
                vals.iter().filter(|&&b| b).count() == 2
            })
            .collect();
        assert_eq!(got, want, "{scheme:?}");
    }
}

#[test]
fn pairwise_needs_no_auxiliaries() {
    let lits: Vec<Lit> = (1..=5).map(Lit::pos).collect();
    let mut alloc = VarAllocator::new(5);
    encode_at_most(2, &lits, CardScheme::Pairwise, &mut alloc).unwrap();
    assert_eq!(alloc.max_var(), 5);
}

#[test]
fn rejects_bad_requests() {
    let mut alloc = VarAllocator::new(3);
    assert_eq!(
        encode_at_least(4, &[Lit::pos(1), Lit::pos(2), Lit::pos(3)], CardScheme::Totalizer, &mut alloc),
        Err(CardError::BoundExceedsLiterals { k: 4, n: 3 })
    );
    assert_eq!(
        encode_at_most(1, &[Lit::pos(1), Lit::neg(1)], CardScheme::Pairwise, &mut alloc),
        Err(CardError::DuplicateVariable(1))
    );
    assert_eq!(
        encode_exactly(1, &[], CardScheme::SequentialCounter, &mut alloc),
        Err(CardError::EmptyLiterals)
    );
}
