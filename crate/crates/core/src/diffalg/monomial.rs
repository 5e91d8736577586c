use std::collections::BTreeMap;
use std::fmt;

/// The inner product `<u_i, u_j>` of two x-derivatives of `u`, stored with `i <= j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pairing {
    i: u32,
    j: u32,
}

impl Pairing {
    pub fn new(i: u32, j: u32) -> Self {
        if i <= j {
            Pairing { i, j }
        } else {
            Pairing { i: j, j: i }
        }
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// Scaling weight: `u_k` carries `k + 1`.
    pub fn weight(&self) -> u32 {
        self.i + self.j + 2
    }

    pub fn max_order(&self) -> u32 {
        self.j
    }

    /// `D_x <u_i,u_j> = <u_{i+1},u_j> + <u_i,u_{j+1}>`.
    pub fn d_x(&self) -> [Pairing; 2] {
        [Pairing::new(self.i + 1, self.j), Pairing::new(self.i, self.j + 1)]
    }

    /// Every pairing of the given weight, in ascending order.
    pub fn of_weight(weight: u32) -> impl Iterator<Item = Pairing> {
        let s = weight.saturating_sub(2);
        let valid = weight >= 2;
        (0..=s / 2)
            .filter(move |_| valid)
            .map(move |i| Pairing::new(i, s - i))
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<u{},u{}>", self.i, self.j)
    }
}

/// A product of pairings, kept as a sorted multiset. The empty product is `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<Pairing>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn from_pairings(mut pairings: Vec<Pairing>) -> Self {
        pairings.sort_unstable();
        Monomial(pairings)
    }

    pub fn pairing(i: u32, j: u32) -> Self {
        Monomial(vec![Pairing::new(i, j)])
    }

    pub fn pairings(&self) -> &[Pairing] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of pairing factors; the polynomial degree in `u` is twice this.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(Pairing::weight).sum()
    }

    pub fn max_order(&self) -> Option<u32> {
        self.0.iter().map(Pairing::max_order).max()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => {
                    if x <= y {
                        out.push(**x);
                        a.next();
                    } else {
                        out.push(**y);
                        b.next();
                    }
                }
                (Some(_), None) => out.extend(a.by_ref().copied()),
                (None, Some(_)) => out.extend(b.by_ref().copied()),
                (None, None) => break,
            }
        }
        Monomial(out)
    }

    /// The monomial with the factor at `pos` removed.
    pub fn without(&self, pos: usize) -> Monomial {
        let mut v = self.0.clone();
        v.remove(pos);
        Monomial(v)
    }

    /// Leibniz rule; returns `D_x` of this monomial as integer-weighted monomials.
    pub fn d_x(&self) -> BTreeMap<Monomial, i64> {
        let mut out = BTreeMap::new();
        for pos in 0..self.0.len() {
            let rest = self.without(pos);
            for p in self.0[pos].d_x() {
                *out.entry(rest.mul(&Monomial(vec![p]))).or_insert(0) += 1;
            }
        }
        out
    }

    /// Grouped `(pairing, multiplicity)` view, used for printing powers.
    pub fn powers(&self) -> Vec<(Pairing, usize)> {
        let mut out: Vec<(Pairing, usize)> = Vec::new();
        for p in &self.0 {
            match out.last_mut() {
                Some((q, k)) if q == p => *k += 1,
                _ => out.push((*p, 1)),
            }
        }
        out
    }

    /// All monomials with exactly `count` pairing factors and total weight `weight`.
    pub fn enumerate(weight: u32, count: usize) -> Vec<Monomial> {
        let mut pool: Vec<Pairing> = (2..=weight).flat_map(Pairing::of_weight).collect();
        pool.sort_unstable();
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(count);
        enumerate_rec(&pool, 0, weight, count, &mut current, &mut out);
        out
    }
}

fn enumerate_rec(
    pool: &[Pairing],
    start: usize,
    weight_left: u32,
    count_left: usize,
    current: &mut Vec<Pairing>,
    out: &mut Vec<Monomial>,
) {
    if count_left == 0 {
        if weight_left == 0 {
            out.push(Monomial(current.clone()));
        }
        return;
    }
    // every remaining factor weighs at least 2
    if weight_left < 2 * count_left as u32 {
        return;
    }
    for (idx, p) in pool.iter().enumerate().skip(start) {
        let w = p.weight();
        if w > weight_left {
            continue;
        }
        current.push(*p);
        enumerate_rec(pool, idx, weight_left - w, count_left - 1, current, out);
        current.pop();
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (n, (p, k)) in self.powers().into_iter().enumerate() {
            if n > 0 {
                write!(f, "*")?;
            }
            if k == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{k}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_is_symmetric() {
        assert_eq!(Pairing::new(3, 1), Pairing::new(1, 3));
        assert_eq!(Pairing::new(3, 1).weight(), 6);
    }

    #[test]
    fn d_x_of_norm_squared() {
        let d = Monomial::pairing(0, 0).d_x();
        assert_eq!(d.len(), 1);
        assert_eq!(d[&Monomial::pairing(0, 1)], 2);
    }

    #[test]
    fn enumerate_counts() {
        // weight 6, two factors: {<0,0>,<0,2>}, {<0,0>,<1,1>}, {<0,1>,<0,1>}
        assert_eq!(Monomial::enumerate(6, 2).len(), 3);
        // weight 5, one factor: <0,3>, <1,2>
        assert_eq!(Monomial::enumerate(5, 1).len(), 2);
        assert_eq!(Monomial::enumerate(0, 0), vec![Monomial::one()]);
        assert!(Monomial::enumerate(3, 2).is_empty());
        for m in Monomial::enumerate(9, 2) {
            assert_eq!(m.weight(), 9);
            assert_eq!(m.len(), 2);
        }
    }

    #[test]
    fn display_groups_powers() {
        let m = Monomial::from_pairings(vec![Pairing::new(0, 0), Pairing::new(0, 1), Pairing::new(0, 0)]);
        assert_eq!(m.to_string(), "<u0,u0>^2*<u0,u1>");
    }
}
