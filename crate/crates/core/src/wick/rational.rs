//! Exact rational arithmetic for simplex integrals and Bernoulli numbers.
//!
//! Magnitudes stay tiny (denominators are products of small integers), so
//! i128 with eager reduction is plenty; overflow panics rather than
//! corrupting a verification run.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rat {
    num: i128,
    den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl Rat {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den);
        Rat {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn zero() -> Self {
        Rat { num: 0, den: 1 }
    }

    pub fn one() -> Self {
        Rat { num: 1, den: 1 }
    }

    pub fn from_int(v: i128) -> Self {
        Rat { num: v, den: 1 }
    }

    pub fn add(self, other: Rat) -> Rat {
        Rat::new(
            self.num
                .checked_mul(other.den)
                .and_then(|l| {
                    other
                        .num
                        .checked_mul(self.den)
                        .and_then(|r| l.checked_add(r))
                })
                .expect("rational overflow"),
            self.den.checked_mul(other.den).expect("rational overflow"),
        )
    }

    pub fn sub(self, other: Rat) -> Rat {
        self.add(other.neg())
    }

    pub fn neg(self) -> Rat {
        Rat {
            num: -self.num,
            den: self.den,
        }
    }

    pub fn mul(self, other: Rat) -> Rat {
        Rat::new(
            self.num.checked_mul(other.num).expect("rational overflow"),
            self.den.checked_mul(other.den).expect("rational overflow"),
        )
    }

    pub fn div_int(self, v: i128) -> Rat {
        Rat::new(
            self.num,
            self.den.checked_mul(v).expect("rational overflow"),
        )
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// B_0..B_n with B_1 = -1/2, from sum_{j<=m} C(m+1, j) B_j = 0.
pub fn bernoulli(n: usize) -> Vec<Rat> {
    let mut b = vec![Rat::one()];
    for m in 1..=n {
        let mut acc = Rat::zero();
        for (j, bj) in b.iter().enumerate() {
            acc = acc.add(bj.mul(Rat::from_int(binomial(m as i128 + 1, j as i128))));
        }
        b.push(acc.neg().div_int(m as i128 + 1));
    }
    b
}

pub fn binomial(n: i128, k: i128) -> i128 {
    if k < 0 || k > n {
        return 0;
    }
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i).expect("binomial overflow") / (i + 1);
    }
    acc
}

pub fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}
