//! Built-in multicategories used by the tests, the CLI and the acceptance run.

use rand::Rng;

use super::{Multicat, Op};

fn op(src: Vec<usize>, tgt: usize, name: &str) -> Op {
    Op { src, tgt, name: name.to_string() }
}

fn arity_name(n: usize) -> String {
    if n == 1 {
        "id".to_string()
    } else {
        format!("m{n}")
    }
}

/// One object and exactly one multimap of each arity `1..=a`.
pub fn semigroup_operad(a: usize) -> Multicat {
    let ops = (1..=a).map(|n| op(vec![0; n], 0, &arity_name(n))).collect();
    Multicat::generate(vec!["*".into()], a, ops, vec!["id".into()], |mc, _outer, inners| {
        let total: usize = inners.iter().map(|&i| mc.op(i).src.len()).sum();
        mc.find_op(&vec![0; total], 0, &arity_name(total))
    })
    .expect("semigroup operad is well formed")
}

/// Only identities.
pub fn discrete(objects: &[&str]) -> Multicat {
    let ops = (0..objects.len()).map(|x| op(vec![x], x, "id")).collect();
    Multicat::generate(
        objects.iter().map(|s| s.to_string()).collect(),
        1,
        ops,
        vec!["id".into(); objects.len()],
        |_, _, _| None,
    )
    .expect("discrete multicategory is well formed")
}

/// One object whose only multimaps are unary, forming the given monoid;
/// `table[a][b]` is the index of `a∘b` and index 0 is the unit.
pub fn monoid_multicat(names: &[&str], table: &[Vec<usize>]) -> Multicat {
    let ops = names.iter().map(|n| op(vec![0], 0, n)).collect();
    Multicat::generate(vec!["c".into()], 1, ops, vec![names[0].to_string()], |mc, outer, inners| {
        let a = names.iter().position(|n| *n == mc.op(outer).name)?;
        let b = names.iter().position(|n| *n == mc.op(inners[0]).name)?;
        mc.find_op(&[0], 0, names[table[a][b]])
    })
    .expect("monoid multicategory is well formed")
}

/// One object with a copy of a commutative monoid at every arity `1..=a`;
/// substitution multiplies the labels. Index 0 of `names` is the unit.
pub fn monoid_operad(names: &[&str], table: &[Vec<usize>], a: usize) -> Multicat {
    let ops = (1..=a).flat_map(|n| names.iter().map(move |m| op(vec![0; n], 0, m))).collect();
    Multicat::generate(vec!["c".into()], a, ops, vec![names[0].to_string()], |mc, outer, inners| {
        let idx = |i: usize| names.iter().position(|n| *n == mc.op(i).name).expect("monoid label");
        let acc = inners.iter().fold(idx(outer), |acc, &i| table[acc][idx(i)]);
        let total: usize = inners.iter().map(|&i| mc.op(i).src.len()).sum();
        mc.find_op(&vec![0; total], 0, names[acc])
    })
    .expect("monoid operad is well formed")
}

/// The semigroup operad truncated at arity 3.
pub fn m1() -> Multicat {
    semigroup_operad(3)
}

/// Objects `c, d`, identities and a single binary multimap `b: (c,c) -> d`.
pub fn m3() -> Multicat {
    let ops = vec![op(vec![0], 0, "id"), op(vec![1], 1, "id"), op(vec![0, 0], 1, "b")];
    Multicat::generate(vec!["c".into(), "d".into()], 3, ops, vec!["id".into(), "id".into()], |_, _, _| None)
        .expect("m3 is well formed")
}

/// One object `c`; unary `{id, e}` with `e∘e = e`; one binary `m` absorbing
/// every substitution.
pub fn m4() -> Multicat {
    let ops = vec![op(vec![0], 0, "id"), op(vec![0], 0, "e"), op(vec![0, 0], 0, "m")];
    Multicat::generate(vec!["c".into()], 2, ops, vec!["id".into()], |mc, outer, inners| {
        let total: usize = inners.iter().map(|&i| mc.op(i).src.len()).sum();
        if total == 2 {
            return mc.find_op(&[0, 0], 0, "m");
        }
        let all_id = mc.op(outer).name == "id" && inners.iter().all(|&i| mc.op(i).name == "id");
        mc.find_op(&[0], 0, if all_id { "id" } else { "e" })
    })
    .expect("m4 is well formed")
}

/// The quotient of `m4` identifying `e` with the identity.
pub fn m4_collapsed() -> Multicat {
    let ops = vec![op(vec![0], 0, "id"), op(vec![0, 0], 0, "m")];
    Multicat::generate(vec!["c".into()], 2, ops, vec!["id".into()], |mc, _outer, inners| {
        let total: usize = inners.iter().map(|&i| mc.op(i).src.len()).sum();
        mc.find_op(&vec![0; total], 0, if total == 1 { "id" } else { "m" })
    })
    .expect("collapsed m4 is well formed")
}

/// One object, a binary `m` and two ternary multimaps `t1, t2`; both ways of
/// composing `m` with itself give `t1`, so `t2` is not a composite.
pub fn nonpromonoidal() -> Multicat {
    let ops = vec![
        op(vec![0], 0, "id"),
        op(vec![0, 0], 0, "m"),
        op(vec![0, 0, 0], 0, "t1"),
        op(vec![0, 0, 0], 0, "t2"),
    ];
    Multicat::generate(vec!["c".into()], 3, ops, vec!["id".into()], |mc, outer, inners| {
        let total: usize = inners.iter().map(|&i| mc.op(i).src.len()).sum();
        if mc.op(outer).name == "m" && total == 3 {
            return mc.find_op(&[0, 0, 0], 0, "t1");
        }
        None
    })
    .expect("nonpromonoidal fixture is well formed")
}

/// A random valid multicategory with at most two objects and arity bound at
/// most 3. Homs are copies of a commutative monoid of size at most 2 and
/// substitution multiplies labels; the arity set is random, and samples not
/// closed under substitution are rejected.
pub fn random_multicat<R: Rng>(rng: &mut R) -> Multicat {
    loop {
        let n_obj = rng.gen_range(1..=2usize);
        let a = rng.gen_range(1..=3usize);
        let (elems, table): (Vec<&str>, Vec<Vec<usize>>) = match rng.gen_range(0..3) {
            0 => (vec!["1"], vec![vec![0]]),
            1 => (vec!["1", "a"], vec![vec![0, 1], vec![1, 0]]),
            _ => (vec!["1", "z"], vec![vec![0, 1], vec![1, 1]]),
        };
        let arities: Vec<usize> = (1..=a).filter(|&n| n == 1 || rng.gen_bool(0.6)).collect();
        let full_targets = rng.gen_bool(0.5);
        let objects: Vec<String> = ["c", "d"][..n_obj].iter().map(|s| s.to_string()).collect();
        let mut ops = Vec::new();
        for &n in &arities {
            for code in 0..n_obj.pow(n as u32) {
                let src: Vec<usize> = (0..n).map(|k| (code / n_obj.pow(k as u32)) % n_obj).collect();
                let lo = *src.iter().max().expect("non-empty source");
                for tgt in 0..n_obj {
                    let allowed = if n == 1 { tgt == src[0] || (full_targets && tgt > lo) } else { tgt >= lo };
                    if !allowed {
                        continue;
                    }
                    for e in &elems {
                        ops.push(op(src.clone(), tgt, e));
                    }
                }
            }
        }
        let elems_c = elems.clone();
        let mc = Multicat::generate(objects, a, ops, vec!["1".into(); n_obj], |mc, outer, inners| {
            let idx = |i: usize| elems_c.iter().position(|e| *e == mc.op(i).name).expect("monoid label");
            let mut acc = idx(outer);
            for &i in inners {
                acc = table[acc][idx(i)];
            }
            let src: Vec<usize> = inners.iter().flat_map(|&i| mc.op(i).src.iter().copied()).collect();
            mc.find_op(&src, mc.op(outer).tgt, elems_c[acc])
        });
        if let Ok(mc) = mc {
            if mc.validate().valid {
                return mc;
            }
        }
    }
}
