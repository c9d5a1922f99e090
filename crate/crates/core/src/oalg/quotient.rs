use std::sync::Arc;

use super::{for_each_tuple, Elem, Homomorphism, OrderedAlgebra};
use crate::error::{Error, Result};
use crate::relation::BitRel;

/// A quotient algebra together with its projection.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub algebra: Arc<OrderedAlgebra>,
    pub proj: Homomorphism,
    /// Classes ordered by least member; the least member names the class.
    pub classes: Vec<Vec<Elem>>,
}

/// First pair of `r` not preserved by some translation `f(.., _, ..)`.
fn compatibility_failure(a: &OrderedAlgebra, r: &BitRel) -> Option<String> {
    let n = a.size();
    let pairs: Vec<(Elem, Elem)> = r.pairs().filter(|(x, y)| x != y).collect();
    for (f, k) in a.sig().operations() {
        for i in 0..k {
            let mut found = None;
            for_each_tuple(n, k - 1, |rest| {
                if found.is_some() {
                    return;
                }
                let mut args: Vec<Elem> = rest.to_vec();
                args.insert(i, 0);
                for &(x, y) in &pairs {
                    args[i] = x;
                    let fx = a.apply(f, &args);
                    args[i] = y;
                    let fy = a.apply(f, &args);
                    if !r.contains(fx, fy) {
                        found = Some(format!(
                            "({}, {}) is related but {} at position {} gives ({}, {})",
                            a.elem_name(x),
                            a.elem_name(y),
                            a.sig().name(f),
                            i + 1,
                            a.elem_name(fx),
                            a.elem_name(fy)
                        ));
                        return;
                    }
                }
            });
            if found.is_some() {
                return found;
            }
        }
    }
    None
}

pub fn is_congruence(a: &OrderedAlgebra, theta: &BitRel) -> Result<()> {
    if theta.size() != a.size() || !theta.is_equivalence() {
        return Err(Error::NotACongruence("relation is not an equivalence on the carrier".into()));
    }
    match compatibility_failure(a, theta) {
        Some(why) => Err(Error::NotACongruence(why)),
        None => Ok(()),
    }
}

pub fn is_compatible_quasiorder(a: &OrderedAlgebra, sigma: &BitRel) -> Result<()> {
    if sigma.size() != a.size() || !sigma.is_reflexive() || !sigma.is_transitive() {
        return Err(Error::NotCompatibleQuasiorder("relation is not a quasiorder on the carrier".into()));
    }
    if !a.order().is_subset(sigma) {
        return Err(Error::NotCompatibleQuasiorder("relation does not contain the order".into()));
    }
    match compatibility_failure(a, sigma) {
        Some(why) => Err(Error::NotCompatibleQuasiorder(why)),
        None => Ok(()),
    }
}

/// Transitive closure of `<= ∪ θ`.
pub fn leq_theta(a: &OrderedAlgebra, theta: &BitRel) -> Result<BitRel> {
    is_congruence(a, theta)?;
    Ok(a.order().union(theta).rt_closure())
}

/// The closed chain condition: `a <=_θ b <=_θ a` implies `a θ b`.
pub fn is_order_congruence(a: &OrderedAlgebra, theta: &BitRel) -> Result<bool> {
    let l = leq_theta(a, theta)?;
    Ok(l.intersection(&l.inverse()).is_subset(theta))
}

fn quotient_by(a: &Arc<OrderedAlgebra>, equiv: &BitRel, sigma: &BitRel, name: String) -> Result<Quotient> {
    let classes = equiv.classes();
    let mut class_of = vec![0; a.size()];
    for (i, cl) in classes.iter().enumerate() {
        for &e in cl {
            class_of[e] = i;
        }
    }
    let reps: Vec<Elem> = classes.iter().map(|c| c[0]).collect();
    let m = classes.len();
    let order = BitRel::from_pairs(m, (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).filter(|&(i, j)| sigma.contains(reps[i], reps[j])));
    let mut args = Vec::new();
    let q = OrderedAlgebra::from_fn(
        a.sig().clone(),
        name,
        reps.iter().map(|&r| a.elem_name(r).to_string()).collect(),
        &order,
        |f, xs| {
            args.clear();
            args.extend(xs.iter().map(|&i| reps[i]));
            class_of[a.apply(f, &args)]
        },
        |c| class_of[a.const_val(c)],
    )?;
    let q = Arc::new(q);
    let proj = Homomorphism::new(a.clone(), q.clone(), class_of)?;
    Ok(Quotient { algebra: q, proj, classes })
}

/// `A/θ` ordered by the projection of `<=_θ`.
pub fn regular_quotient(a: &Arc<OrderedAlgebra>, theta: &BitRel) -> Result<Quotient> {
    if !is_order_congruence(a, theta)? {
        return Err(Error::NotOrderCongruence("the closed chain condition fails".into()));
    }
    let l = leq_theta(a, theta)?;
    quotient_by(a, theta, &l, format!("{}/theta", a.name()))
}

/// `A/σ`: classes of `σ ∩ σ⁻¹` ordered by `σ`.
pub fn nonregular_quotient(a: &Arc<OrderedAlgebra>, sigma: &BitRel) -> Result<Quotient> {
    is_compatible_quasiorder(a, sigma)?;
    let equiv = sigma.intersection(&sigma.inverse());
    quotient_by(a, &equiv, sigma, format!("{}/sigma", a.name()))
}

/// The unique `g` with `g ∘ θ♮ = f`, defined on class representatives.
pub fn factor_through(f: &Homomorphism, theta: &BitRel) -> Result<Homomorphism> {
    f.require_hom()?;
    let q = regular_quotient(&f.dom, theta)?;
    let l = leq_theta(&f.dom, theta)?;
    if let Some((a, b)) = l.pairs().find(|&(a, b)| !f.cod.leq(f.map[a], f.map[b])) {
        return Err(Error::PreconditionFailed(format!(
            "({}, {}) lies in <=_theta but not in the directed kernel",
            f.dom.elem_name(a),
            f.dom.elem_name(b)
        )));
    }
    let map = q.classes.iter().map(|c| f.map[c[0]]).collect();
    Homomorphism::new(q.algebra.clone(), f.cod.clone(), map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oalg::fixtures::*;
    use crate::oalg::product;

    fn glue01() -> BitRel {
        BitRel::from_pairs(3, [(0, 1), (1, 0)]).rt_closure()
    }

    #[test]
    fn leq_theta_examples() {
        let a = ch3();
        assert_eq!(&leq_theta(&a, &BitRel::identity(3)).unwrap(), a.order());
        assert_eq!(leq_theta(&a, &BitRel::full(3)).unwrap(), BitRel::full(3));
        let l = leq_theta(&a, &glue01()).unwrap();
        assert!(l.contains(1, 0));
        assert_eq!(l.count(), a.order().count() + 1);
        let not_cong = BitRel::from_pairs(3, [(0, 2), (2, 0)]).rt_closure();
        assert!(matches!(leq_theta(&a, &not_cong), Err(Error::NotACongruence(_))));
    }

    #[test]
    fn order_congruence_examples() {
        let a = ch3();
        assert!(is_order_congruence(&a, &BitRel::identity(3)).unwrap());
        assert!(is_order_congruence(&a, &glue01()).unwrap());
    }

    #[test]
    fn ccc_failure_on_diamond() {
        // Brute force over all partitions of CH2 x CH2 for a congruence violating ccc.
        let sig = sig1();
        let ch2 = chain(&sig, 2, "CH2");
        let d = product(&sig, &[&ch2, &ch2]).unwrap();
        let mut failing = Vec::new();
        for p in crate::enumerate::set_partitions(4) {
            let theta = BitRel::from_pairs(4, (0..4).flat_map(|x| (0..4).map(move |y| (x, y))).filter(|&(x, y)| p[x] == p[y]));
            if is_congruence(&d, &theta).is_ok() && !is_order_congruence(&d, &theta).unwrap() {
                failing.push(p);
            }
        }
        // Every congruence of the join diamond satisfies the chain condition.
        assert!(failing.is_empty());
        // Without operations a chain has one: glue the two ends and leave the middle alone.
        let bare = Arc::new(crate::signature::Signature::parse("const c").unwrap());
        let ch3bare = chain(&bare, 3, "B3");
        let theta = BitRel::from_pairs(3, [(0, 2), (2, 0)]).rt_closure();
        assert!(!is_order_congruence(&ch3bare, &theta).unwrap());
    }

    #[test]
    fn regular_quotients() {
        let a = Arc::new(ch3());
        let q = regular_quotient(&a, &BitRel::identity(3)).unwrap();
        assert_eq!(q.algebra.size(), 3);
        assert_eq!(q.algebra.order(), a.order());
        assert_eq!(regular_quotient(&a, &BitRel::full(3)).unwrap().algebra.size(), 1);
        let q = regular_quotient(&a, &glue01()).unwrap();
        assert_eq!(q.classes, vec![vec![0, 1], vec![2]]);
        assert!(q.algebra.leq(0, 1) && !q.algebra.leq(1, 0));
        assert!(q.algebra.validate().is_empty());
        assert!(q.proj.check().is_hom && q.proj.check().is_monotone);
    }

    #[test]
    fn nonregular_quotients() {
        let a = Arc::new(ch3());
        let q = nonregular_quotient(&a, a.order()).unwrap();
        assert_eq!(q.algebra.size(), 3);
        assert_eq!(nonregular_quotient(&a, &BitRel::full(3)).unwrap().algebra.size(), 1);
        // <= plus (e2,e0) closes to everything: one class.
        let sigma = a.order().union(&BitRel::from_pairs(3, [(2, 0)])).rt_closure();
        let q = nonregular_quotient(&a, &sigma).unwrap();
        assert_eq!(q.classes, vec![vec![0, 1, 2]]);
        let bad = BitRel::identity(3);
        assert!(matches!(nonregular_quotient(&a, &bad), Err(Error::NotCompatibleQuasiorder(_))));
    }

    #[test]
    fn factorization() {
        let a = Arc::new(ch3());
        let collapse = Homomorphism::new(a.clone(), a.clone(), vec![0, 0, 2]).unwrap();
        let g = factor_through(&collapse, &glue01()).unwrap();
        assert_eq!(g.map, vec![0, 2]);
        let q = regular_quotient(&a, &glue01()).unwrap();
        assert_eq!(q.proj.then(&g).map, collapse.map);
        assert!(g.check().is_hom && g.check().is_monotone);
        let id = Homomorphism::identity(a.clone());
        assert!(matches!(factor_through(&id, &glue01()), Err(Error::PreconditionFailed(_))));
        let g = factor_through(&id, &BitRel::identity(3)).unwrap();
        assert_eq!(g.map, vec![0, 1, 2]);
        let g = factor_through(&q.proj, &glue01()).unwrap();
        assert_eq!(g.map, vec![0, 1]);
    }
}
