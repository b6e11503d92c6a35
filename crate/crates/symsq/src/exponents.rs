//! Exact rational-exponent algebra over monomials in (k, P, L, Y).
//!
//! Everything here happens on the single-parameter slice k = P^t with t
//! rational and P large; constants and epsilon powers are dropped by
//! definition. The optimizer balances bound terms, substitutes the optimal
//! Y and L, and reproduces the subconvexity window endpoints exactly.

use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    K,
    P,
    L,
    Y,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::K => write!(f, "k"),
            Var::P => write!(f, "P"),
            Var::L => write!(f, "L"),
            Var::Y => write!(f, "Y"),
        }
    }
}

/// A monomial k^a P^b L^c Y^d with exact rational exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    e: BTreeMap<Var, Rational>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { e: BTreeMap::new() }
    }

    pub fn var(v: Var) -> Self {
        Monomial::from_pairs(&[(v, Rational::one())])
    }

    pub fn from_pairs(pairs: &[(Var, Rational)]) -> Self {
        let mut e = BTreeMap::new();
        for &(v, r) in pairs {
            if !r.is_zero() {
                *e.entry(v).or_insert_with(Rational::zero) += r;
            }
        }
        e.retain(|_, r| !r.is_zero());
        Monomial { e }
    }

    pub fn exponent(&self, v: Var) -> Rational {
        self.e.get(&v).copied().unwrap_or_else(Rational::zero)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.e.clone();
        for (&v, &r) in &other.e {
            *e.entry(v).or_insert_with(Rational::zero) += r;
        }
        e.retain(|_, r| !r.is_zero());
        Monomial { e }
    }

    pub fn pow(&self, r: Rational) -> Monomial {
        if r.is_zero() {
            return Monomial::one();
        }
        Monomial { e: self.e.iter().map(|(&v, &x)| (v, x * r)).collect() }
    }

    pub fn inv(&self) -> Monomial {
        self.pow(-Rational::one())
    }

    /// true if only k and P appear
    pub fn is_kp(&self) -> bool {
        self.e.keys().all(|&v| v == Var::K || v == Var::P)
    }

    /// Q = k^4 P^3
    pub fn conductor() -> Monomial {
        Monomial::from_pairs(&[(Var::K, Rational::from(4)), (Var::P, Rational::from(3))])
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, r) in &self.e {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if r.is_one() {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^({r})")?;
            }
        }
        Ok(())
    }
}

/// A finite collection of monomials read as their max (equivalently the sum,
/// up to constants). Substitution-closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBound {
    pub terms: Vec<Monomial>,
}

impl MonomialBound {
    pub fn new(terms: Vec<Monomial>) -> Self {
        let mut b = MonomialBound { terms: Vec::new() };
        for t in terms {
            b.push(t);
        }
        b
    }

    pub fn push(&mut self, t: Monomial) {
        if !self.terms.contains(&t) {
            self.terms.push(t);
        }
    }
}

impl fmt::Display for MonomialBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Solves t1 = t2 for `var` exactly, returning the monomial value of `var`.
pub fn equate_terms(t1: &Monomial, t2: &Monomial, var: Var) -> Result<Monomial> {
    let d = t1.exponent(var) - t2.exponent(var);
    if d.is_zero() {
        return Err(Error::InvalidArgument(format!(
            "cannot solve for {var}: it has equal exponents on both sides"
        )));
    }
    let ratio = t2.mul(&t1.inv()); // t2/t1, its var-exponent is -d
    let mut sol = ratio.pow(d.recip());
    sol.e.remove(&var);
    Ok(sol)
}

/// Substitutes var <- value in a monomial.
pub fn substitute(m: &Monomial, var: Var, value: &Monomial) -> Monomial {
    let e = m.exponent(var);
    if e.is_zero() {
        return m.clone();
    }
    let mut base = m.clone();
    base.e.remove(&var);
    base.mul(&value.pow(e))
}

/// Applies the assignments in order to every term and deduplicates.
pub fn substitute_and_reduce(b: &MonomialBound, assignments: &[(Var, Monomial)]) -> MonomialBound {
    let terms = b
        .terms
        .iter()
        .map(|t| {
            let mut t = t.clone();
            for (v, val) in assignments {
                t = substitute(&t, *v, val);
            }
            t
        })
        .collect();
    MonomialBound::new(terms)
}

/// An exact t-interval (k = P^t), open at both ends; None means unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubconvexInterval {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
    pub empty: bool,
}

impl SubconvexInterval {
    pub fn all() -> Self {
        SubconvexInterval { lower: None, upper: None, empty: false }
    }

    pub fn empty() -> Self {
        SubconvexInterval { lower: None, upper: None, empty: true }
    }

    pub fn intersect(&self, other: &SubconvexInterval) -> SubconvexInterval {
        if self.empty || other.empty {
            return SubconvexInterval::empty();
        }
        let lower = match (self.lower, other.lower) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let upper = match (self.upper, other.upper) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if let (Some(lo), Some(hi)) = (lower, upper) {
            if lo >= hi {
                return SubconvexInterval::empty();
            }
        }
        SubconvexInterval { lower, upper, empty: false }
    }
}

/// The t-range where a k^a P^b bound beats the convexity bound k P^{3/4}:
/// (a-1) t < 3/4 - b.
pub fn subconvex_range(bound: &Monomial) -> Result<SubconvexInterval> {
    if !bound.is_kp() {
        return Err(Error::InvalidArgument(format!(
            "bound {bound} must be reduced to k^a P^b form first"
        )));
    }
    let a = bound.exponent(Var::K);
    let b = bound.exponent(Var::P);
    let one = Rational::one();
    let rhs = Rational::new(3, 4) - b;
    if a == one {
        return Ok(if rhs.is_positive() { SubconvexInterval::all() } else { SubconvexInterval::empty() });
    }
    let crit = rhs / (a - one);
    Ok(if a > one {
        SubconvexInterval { lower: None, upper: Some(crit), empty: false }
    } else {
        SubconvexInterval { lower: Some(crit), upper: None, empty: false }
    })
}

/// Intersection over all terms of a bound.
pub fn subconvex_range_bound(bound: &MonomialBound) -> Result<SubconvexInterval> {
    let mut acc = SubconvexInterval::all();
    for t in &bound.terms {
        acc = acc.intersect(&subconvex_range(t)?);
    }
    Ok(acc)
}

/// Outcome of one exponent inequality lhs <= rhs under k = P^t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Always,
    Never,
    /// holds exactly for t <= threshold
    AtMost(Rational),
    /// holds exactly for t >= threshold
    AtLeast(Rational),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Always => write!(f, "always"),
            Verdict::Never => write!(f, "never"),
            Verdict::AtMost(r) => write!(f, "t <= {r}"),
            Verdict::AtLeast(r) => write!(f, "t >= {r}"),
        }
    }
}

impl Verdict {
    pub fn binding_t(&self) -> Option<Rational> {
        match self {
            Verdict::AtMost(r) | Verdict::AtLeast(r) => Some(*r),
            _ => None,
        }
    }

    /// holds throughout the open interval (lo, hi)?
    pub fn holds_on(&self, lo: Rational, hi: Rational) -> bool {
        match self {
            Verdict::Always => true,
            Verdict::Never => false,
            Verdict::AtMost(r) => hi <= *r,
            Verdict::AtLeast(r) => lo >= *r,
        }
    }
}

/// Resolves lhs <= rhs (both k^a P^b monomials) under k = P^t.
pub fn resolve_inequality(lhs: &Monomial, rhs: &Monomial) -> Result<Verdict> {
    let diff = lhs.mul(&rhs.inv());
    if !diff.is_kp() {
        return Err(Error::InvalidArgument(format!(
            "inequality sides must reduce to k^a P^b, got ratio {diff}"
        )));
    }
    let alpha = diff.exponent(Var::K);
    let beta = diff.exponent(Var::P);
    // alpha t + beta <= 0
    Ok(if alpha.is_zero() {
        if beta <= Rational::zero() {
            Verdict::Always
        } else {
            Verdict::Never
        }
    } else if alpha.is_positive() {
        Verdict::AtMost(-beta / alpha)
    } else {
        Verdict::AtLeast(-beta / alpha)
    })
}

#[derive(Clone, Debug)]
pub struct AssumptionCheck {
    pub name: String,
    pub verdict: Verdict,
    pub binding_t: Option<Rational>,
    /// the t-range the assumption is claimed on, if any, and whether it holds there
    pub claimed_range: Option<(Rational, Rational)>,
    pub pass: bool,
}

/// Audits the two standing assumptions for given monomial choices of L and Y
/// (both in k, P form): L <= k^{-2/5} P^{3/20}, and the a-priori gate
/// L^2 sqrt(Y) Q^{1/4} <= P.
pub fn assumption_audit(
    l_choice: &Monomial,
    y_choice: &Monomial,
    claimed_range: Option<(Rational, Rational)>,
) -> Result<Vec<AssumptionCheck>> {
    let q4 = Monomial::conductor().pow(Rational::new(1, 4));
    let cap = Monomial::from_pairs(&[
        (Var::K, Rational::new(-2, 5)),
        (Var::P, Rational::new(3, 20)),
    ]);
    let gate_lhs = l_choice.pow(Rational::from(2)).mul(&y_choice.pow(Rational::new(1, 2))).mul(&q4);
    let p = Monomial::var(Var::P);
    let mut out = Vec::new();
    for (name, lhs, rhs) in [
        ("amplifier length cap", l_choice.clone(), cap),
        ("a priori gate", gate_lhs, p),
    ] {
        let verdict = resolve_inequality(&lhs, &rhs)?;
        let pass = match claimed_range {
            Some((lo, hi)) => verdict.holds_on(lo, hi),
            None => matches!(verdict, Verdict::Always),
        };
        out.push(AssumptionCheck {
            name: name.to_string(),
            binding_t: verdict.binding_t(),
            verdict,
            claimed_range,
            pass,
        });
    }
    Ok(out)
}

/// The complete optimization chain from the twisted-moment bound terms to
/// the final hybrid subconvexity statement.
#[derive(Clone, Debug)]
pub struct ExponentReport {
    /// the two Y-dependent bound terms for the twisted first moment
    pub t1_bound: Monomial,
    pub t2_bound: Monomial,
    /// optimal Y from balancing them
    pub y_opt: Monomial,
    /// twisted-moment bound after the Y substitution (diagonal term + main term)
    pub theorem_bound: MonomialBound,
    /// amplified average over the amplifier support
    pub amplified_bound: MonomialBound,
    /// individual-value bound after positivity, in terms of L
    pub individual_bound: MonomialBound,
    /// optimal L from balancing the individual bound, and the two branches
    pub l_opt: Monomial,
    pub branch1_bound: MonomialBound,
    pub branch2_bound: MonomialBound,
    /// t-threshold below which amplification helps (L >= 1)
    pub lindelof_threshold: Rational,
    /// the subconvexity window and the admissible delta width
    pub window: SubconvexInterval,
    pub delta_max: Rational,
    pub assumptions: Vec<AssumptionCheck>,
}

pub fn theorem_chain() -> Result<ExponentReport> {
    let r = Rational::new;
    let q = Monomial::conductor();
    // T1 <= L^{5/2} Y^{3/8} k Q^{3/16} / P
    let t1_bound = Monomial::from_pairs(&[
        (Var::L, r(5, 2)),
        (Var::Y, r(3, 8)),
        (Var::K, r(1, 1)),
        (Var::P, r(-1, 1)),
    ])
    .mul(&q.pow(r(3, 16)));
    // T2 <= L^4 k Q^{1/4} / (Y^{1/2} P^{3/2})
    let t2_bound = Monomial::from_pairs(&[
        (Var::L, r(4, 1)),
        (Var::Y, r(-1, 2)),
        (Var::K, r(1, 1)),
        (Var::P, r(-3, 2)),
    ])
    .mul(&q.pow(r(1, 4)));
    let y_opt = equate_terms(&t1_bound, &t2_bound, Var::Y)?;
    // diagonal contributes 1/sqrt(ell) <= 1
    let diag = Monomial::one();
    let main = substitute(&t1_bound, Var::Y, &y_opt);
    let theorem_bound = MonomialBound::new(vec![diag.clone(), main.clone()]);
    // trivial averaging over the amplifier support: the diagonal collapses to
    // L, every other term picks up the L^2 pair count
    let l2 = Monomial::from_pairs(&[(Var::L, r(2, 1))]);
    let amplified_bound = MonomialBound::new(
        theorem_bound
            .terms
            .iter()
            .map(|t| if *t == diag { Monomial::var(Var::L) } else { l2.mul(t) })
            .collect(),
    );
    // positivity and |amplifier(g0)| = |support|: multiply by P / L^2
    let pl2 = Monomial::from_pairs(&[(Var::P, r(1, 1)), (Var::L, r(-2, 1))]);
    let individual_bound =
        MonomialBound::new(amplified_bound.terms.iter().map(|t| pl2.mul(t)).collect());
    // balance P/L against the L-growing term
    let l_opt = equate_terms(&individual_bound.terms[0], &individual_bound.terms[1], Var::L)?;
    let branch1_bound = substitute_and_reduce(&individual_bound, &[(Var::L, l_opt.clone())]);
    let branch2_bound = substitute_and_reduce(&individual_bound, &[(Var::L, Monomial::one())]);
    // amplification is active while L >= 1
    let lindelof_threshold = match resolve_inequality(&Monomial::one(), &l_opt)? {
        Verdict::AtMost(t) => t,
        v => {
            return Err(Error::Integrity(format!(
                "optimal L should degenerate at a finite threshold, got {v}"
            )))
        }
    };
    let w1 = subconvex_range_bound(&branch1_bound)?;
    let w2 = subconvex_range_bound(&branch2_bound)?;
    // branch 1 applies below the threshold, branch 2 above: the union window
    let lower = w1
        .lower
        .ok_or_else(|| Error::Integrity("amplified branch should have a lower endpoint".into()))?;
    let upper = w2
        .upper
        .ok_or_else(|| Error::Integrity("L = 1 branch should have an upper endpoint".into()))?;
    let window = SubconvexInterval { lower: Some(lower), upper: Some(upper), empty: false };
    let delta_max = (upper - lower) / Rational::from(2);
    let y_kp1 = substitute(&y_opt, Var::L, &l_opt);
    let mut assumptions = assumption_audit(&l_opt, &y_kp1, Some((lower, lindelof_threshold)))?;
    let y_kp2 = substitute(&y_opt, Var::L, &Monomial::one());
    assumptions
        .extend(assumption_audit(&Monomial::one(), &y_kp2, Some((lindelof_threshold, upper)))?);
    Ok(ExponentReport {
        t1_bound,
        t2_bound,
        y_opt,
        theorem_bound,
        amplified_bound,
        individual_bound,
        l_opt,
        branch1_bound,
        branch2_bound,
        lindelof_threshold,
        window,
        delta_max,
        assumptions,
    })
}

/// The two regimes of the heuristic sketch for a concrete kappa >= 2.
#[derive(Clone, Debug)]
pub struct SketchReport {
    pub kappa: i64,
    /// first regime: diagonal balanced against the S2 envelope
    pub y1: Monomial,
    /// validity conditions for regime one: t > 1/4 and t <= 1/3 - 1/(12 kappa)
    pub regime1_range: (Rational, Rational),
    /// second regime: S1 leftover balanced against the S2 envelope
    pub y2: Monomial,
    pub balanced_value: Monomial,
    /// above this t the balanced value exceeds 1 (regime two takes over)
    pub crossover_t: Rational,
    /// subconvexity holds up to this t, increasing to 3/8 with kappa
    pub subconvex_upper: Rational,
}

pub fn sketch_regimes(kappa: i64) -> Result<SketchReport> {
    if kappa < 2 {
        return Err(Error::InvalidArgument(format!("kappa must be at least 2, got {kappa}")));
    }
    let r = Rational::new;
    let kap = Rational::from(kappa);
    let q = Monomial::conductor();
    // S2 envelope (Q^{1/4}/P) k / sqrt(Y P)
    let s2 = q
        .pow(r(1, 4))
        .mul(&Monomial::from_pairs(&[
            (Var::P, r(-3, 2)),
            (Var::K, r(1, 1)),
            (Var::Y, r(-1, 2)),
        ]));
    let diag = Monomial::one();
    let y1 = equate_terms(&diag, &s2, Var::Y)?;
    // regime-one side conditions: sqrt(P) (Y1 sqrt(Q)/P^2)^kappa <= 1, Q^{1/4} > P
    let inner = y1.mul(&q.pow(r(1, 2))).mul(&Monomial::from_pairs(&[(Var::P, r(-2, 1))]));
    let lhs = Monomial::from_pairs(&[(Var::P, r(1, 2))]).mul(&inner.pow(kap));
    let hi = match resolve_inequality(&lhs, &Monomial::one())? {
        Verdict::AtMost(t) => t,
        v => return Err(Error::Integrity(format!("unexpected regime-one verdict {v}"))),
    };
    let lo = match resolve_inequality(&Monomial::var(Var::P), &q.pow(r(1, 4)))? {
        Verdict::AtLeast(t) => t,
        v => return Err(Error::Integrity(format!("unexpected regime-one floor verdict {v}"))),
    };
    // S1 leftover sqrt(P) (Y sqrt(Q) / P^2)^kappa
    let s1 = Monomial::from_pairs(&[(Var::P, r(1, 2))]).mul(
        &Monomial::var(Var::Y)
            .mul(&q.pow(r(1, 2)))
            .mul(&Monomial::from_pairs(&[(Var::P, r(-2, 1))]))
            .pow(kap),
    );
    let y2 = equate_terms(&s1, &s2, Var::Y)?;
    let balanced_value = substitute(&s2, Var::Y, &y2);
    let crossover_t = match resolve_inequality(&Monomial::one(), &balanced_value)? {
        Verdict::AtLeast(t) => t,
        v => return Err(Error::Integrity(format!("unexpected crossover verdict {v}"))),
    };
    // balanced value stays below the normalized convexity envelope k P^{-1/4}
    let conv = Monomial::from_pairs(&[(Var::K, r(1, 1)), (Var::P, r(-1, 4))]);
    let subconvex_upper = match resolve_inequality(&balanced_value, &conv)? {
        Verdict::AtMost(t) => t,
        v => return Err(Error::Integrity(format!("unexpected sketch window verdict {v}"))),
    };
    Ok(SketchReport {
        kappa,
        y1,
        regime1_range: (lo, hi),
        y2,
        balanced_value,
        crossover_t,
        subconvex_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn kp(a: Rational, b: Rational) -> Monomial {
        Monomial::from_pairs(&[(Var::K, a), (Var::P, b)])
    }

    #[test]
    fn equate_reproduces_y_choice() {
        let rep = theorem_chain().unwrap();
        let want = Monomial::from_pairs(&[
            (Var::L, r(12, 7)),
            (Var::K, r(2, 7)),
            (Var::P, r(-5, 14)),
        ]);
        assert_eq!(rep.y_opt, want);
    }

    #[test]
    fn theorem_main_term() {
        let rep = theorem_chain().unwrap();
        let want = Monomial::from_pairs(&[
            (Var::L, r(22, 7)),
            (Var::K, r(13, 7)),
            (Var::P, r(-4, 7)),
        ]);
        assert!(rep.theorem_bound.terms.contains(&want), "{}", rep.theorem_bound);
        // substituting into the other balanced term agrees
        let alt = substitute(&rep.t2_bound, Var::Y, &rep.y_opt);
        assert_eq!(alt, want);
    }

    #[test]
    fn amplified_and_individual_terms() {
        let rep = theorem_chain().unwrap();
        let l = Monomial::var(Var::L);
        let big = Monomial::from_pairs(&[
            (Var::L, r(36, 7)),
            (Var::K, r(13, 7)),
            (Var::P, r(-4, 7)),
        ]);
        assert_eq!(rep.amplified_bound, MonomialBound::new(vec![l, big]));
        let pl = Monomial::from_pairs(&[(Var::P, r(1, 1)), (Var::L, r(-1, 1))]);
        let ind = Monomial::from_pairs(&[
            (Var::L, r(22, 7)),
            (Var::K, r(13, 7)),
            (Var::P, r(3, 7)),
        ]);
        assert_eq!(rep.individual_bound, MonomialBound::new(vec![pl, ind]));
    }

    #[test]
    fn optimal_l_and_final_bound() {
        let rep = theorem_chain().unwrap();
        assert_eq!(rep.l_opt, kp(r(-13, 29), r(4, 29)));
        assert_eq!(rep.branch1_bound.terms, vec![kp(r(13, 29), r(25, 29))]);
        assert_eq!(
            rep.branch2_bound,
            MonomialBound::new(vec![Monomial::var(Var::P), kp(r(13, 7), r(3, 7))])
        );
        assert_eq!(rep.lindelof_threshold, r(4, 13));
    }

    #[test]
    fn subconvex_window_and_delta() {
        let rep = theorem_chain().unwrap();
        assert_eq!(rep.window.lower, Some(r(13, 64)));
        assert_eq!(rep.window.upper, Some(r(3, 8)));
        assert_eq!(rep.delta_max, r(11, 128));
        // the explicit endpoint checks from the remark
        let w1 = subconvex_range(&kp(r(13, 29), r(25, 29))).unwrap();
        assert_eq!(w1.lower, Some(r(13, 64)));
        let w2 = subconvex_range(&kp(r(13, 7), r(3, 7))).unwrap();
        assert_eq!(w2.upper, Some(r(3, 8)));
        let w3 = subconvex_range(&Monomial::var(Var::P)).unwrap();
        assert_eq!(w3.lower, Some(r(1, 4)));
        // convexity itself is never subconvex
        assert!(subconvex_range(&kp(r(1, 1), r(3, 4))).unwrap().empty);
    }

    #[test]
    fn assumptions_hold_on_both_branches() {
        let rep = theorem_chain().unwrap();
        assert_eq!(rep.assumptions.len(), 4);
        for a in &rep.assumptions {
            assert!(a.pass, "{} fails: {}", a.name, a.verdict);
        }
        // branch 1 checks bind at t >= -1/4, vacuous for positive t
        assert_eq!(rep.assumptions[0].binding_t, Some(r(-1, 4)));
        assert_eq!(rep.assumptions[1].binding_t, Some(r(-1, 4)));
        // L = 1 branch: cap is k^{-2/5} P^{3/20} >= 1 iff t <= 3/8, gate the same
        assert_eq!(rep.assumptions[2].verdict, Verdict::AtMost(r(3, 8)));
        assert_eq!(rep.assumptions[3].verdict, Verdict::AtMost(r(3, 8)));
    }

    #[test]
    fn sketch_regime_one() {
        let s = sketch_regimes(2).unwrap();
        assert_eq!(s.y1, kp(r(4, 1), r(-3, 2)));
        assert_eq!(s.regime1_range.0, r(1, 4));
        assert_eq!(s.regime1_range.1, r(1, 3) - r(1, 24)); // 1/3 - 1/(12 kappa)
    }

    #[test]
    fn sketch_regime_two_symbolic_kappa() {
        for kappa in 2..=10i64 {
            let s = sketch_regimes(kappa).unwrap();
            let want_y2 = kp(
                r(4 - 4 * kappa, 2 * kappa + 1),
                r(2 * kappa - 5, 4 * kappa + 2),
            );
            assert_eq!(s.y2, want_y2, "kappa = {kappa}");
            let want_b = kp(
                r(6 * kappa, 2 * kappa + 1),
                -r(4 * kappa - 1, 4 * kappa + 2),
            );
            assert_eq!(s.balanced_value, want_b);
            assert_eq!(s.crossover_t, r(1, 3) - r(1, 12 * kappa));
            assert_eq!(s.subconvex_upper, r(3 * (2 * kappa - 1), 4 * (4 * kappa - 1)));
        }
        // monotone to 3/8
        let mut prev = sketch_regimes(2).unwrap().subconvex_upper;
        for kappa in 3..=40i64 {
            let cur = sketch_regimes(kappa).unwrap().subconvex_upper;
            assert!(cur > prev && cur < r(3, 8));
            prev = cur;
        }
        assert!(sketch_regimes(1).is_err());
    }

    #[test]
    fn interval_intersection() {
        let a = SubconvexInterval { lower: Some(r(1, 4)), upper: None, empty: false };
        let b = SubconvexInterval { lower: None, upper: Some(r(3, 8)), empty: false };
        let c = a.intersect(&b);
        assert_eq!(c.lower, Some(r(1, 4)));
        assert_eq!(c.upper, Some(r(3, 8)));
        let d = SubconvexInterval { lower: Some(r(1, 2)), upper: None, empty: false };
        assert!(d.intersect(&b).empty);
    }

    #[test]
    fn equate_errors_on_equal_exponents() {
        let a = Monomial::var(Var::K);
        assert!(equate_terms(&a, &a, Var::Y).is_err());
    }

    #[test]
    fn display_contains_exact_strings() {
        let rep = theorem_chain().unwrap();
        let s = rep.branch1_bound.to_string();
        assert!(s.contains("13/29") && s.contains("25/29"), "{s}");
        assert_eq!(rep.window.lower.unwrap().to_string(), "13/64");
        assert_eq!(rep.window.upper.unwrap().to_string(), "3/8");
    }
}
