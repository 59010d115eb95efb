use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::sync::Arc;

/// `(a + b*sqrt(d)) / c` with `b != 0`, `c != 0` and `d > 0` not a perfect square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticIrrational {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl QuadraticIrrational {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        if c.is_zero() {
            return Err(Error::InvalidInput("quadratic irrational with c = 0".into()));
        }
        if b.is_zero() {
            return Err(Error::InvalidInput("quadratic irrational with b = 0 is rational".into()));
        }
        if !d.is_positive() {
            return Err(Error::InvalidInput("quadratic irrational needs d > 0".into()));
        }
        let r = d.sqrt();
        if &r * &r == d {
            return Err(Error::InvalidInput(format!("d = {d} is a perfect square")));
        }
        Ok(QuadraticIrrational { a, b, c, d })
    }

    pub fn to_f64(&self) -> f64 {
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        (self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * d.sqrt())
            / self.c.to_f64().unwrap_or(f64::NAN)
    }

    fn add_integer(&self, k: &BigInt) -> Self {
        QuadraticIrrational { a: &self.a + k * &self.c, ..self.clone() }
    }

    fn negate(&self) -> Self {
        QuadraticIrrational { a: -&self.a, b: -&self.b, ..self.clone() }
    }

    fn scale(&self, k: &BigInt) -> Self {
        QuadraticIrrational { a: &self.a * k, b: &self.b * k, ..self.clone() }
    }
}

/// Partial quotient rule for a continued-fraction stream.
#[derive(Clone)]
pub enum CfRule {
    /// `a_1, a_2, ...` = prefix followed by the period repeated forever.
    Periodic { prefix: Vec<BigInt>, period: Vec<BigInt> },
    /// `a_k = rule(k)` for `k >= 1`.
    Function { name: String, rule: Arc<dyn Fn(usize) -> BigInt + Send + Sync> },
}

impl fmt::Debug for CfRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CfRule::Periodic { prefix, period } => {
                f.debug_struct("Periodic").field("prefix", prefix).field("period", period).finish()
            }
            CfRule::Function { name, .. } => f.debug_struct("Function").field("name", name).finish(),
        }
    }
}

impl PartialEq for CfRule {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (CfRule::Periodic { prefix: a, period: b }, CfRule::Periodic { prefix: c, period: d }) => a == c && b == d,
            (CfRule::Function { name: a, rule: r }, CfRule::Function { name: b, rule: s }) => {
                a == b && Arc::ptr_eq(r, s)
            }
            _ => false,
        }
    }
}

/// Value `±[a0; a_1, a_2, ...]`, negated when `negated` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct CfStream {
    pub a0: BigInt,
    pub rule: CfRule,
    pub negated: bool,
}

impl CfStream {
    pub fn periodic(a0: impl Into<BigInt>, prefix: Vec<BigInt>, period: Vec<BigInt>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidInput("periodic stream needs a nonempty period".into()));
        }
        if prefix.iter().chain(period.iter()).any(|a| a < &BigInt::one()) {
            return Err(Error::InvalidInput("partial quotients must be >= 1".into()));
        }
        Ok(CfStream { a0: a0.into(), rule: CfRule::Periodic { prefix, period }, negated: false })
    }

    pub fn function(a0: impl Into<BigInt>, name: &str, rule: impl Fn(usize) -> BigInt + Send + Sync + 'static) -> Self {
        CfStream {
            a0: a0.into(),
            rule: CfRule::Function { name: name.to_string(), rule: Arc::new(rule) },
            negated: false,
        }
    }

    pub(crate) fn term(&self, k: usize) -> BigInt {
        match &self.rule {
            CfRule::Periodic { prefix, period } => {
                if k <= prefix.len() {
                    prefix[k - 1].clone()
                } else {
                    period[(k - 1 - prefix.len()) % period.len()].clone()
                }
            }
            CfRule::Function { rule, .. } => rule(k),
        }
    }
}

/// Lower bounds `B_k` for the constructed partial quotients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "lowercase")]
pub enum Schedule {
    /// `B_k = slope * k + offset`.
    Linear {
        #[serde(default = "one_u64")]
        slope: u64,
        #[serde(default = "one_u64")]
        offset: u64,
    },
    /// `B_k = value` for every k.
    Constant { value: u64 },
}

fn one_u64() -> u64 {
    1
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Linear { slope: 1, offset: 1 }
    }
}

impl Schedule {
    pub fn bound(&self, k: u64) -> u64 {
        match *self {
            Schedule::Linear { slope, offset } => slope * k + offset,
            Schedule::Constant { value } => value,
        }
    }
}

/// Asymptotically-zero number built from a schedule: value `±[a0; a_1, a_2, ...]`
/// with `a_{k+1} = B_k^{q_k}` and `q_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AzTheta {
    pub schedule: Schedule,
    pub a0: BigInt,
    pub negated: bool,
}

/// `[mid - rad, mid + rad]` with `rad > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatInterval {
    pub mid: f64,
    pub rad: f64,
}

/// An exactly representable real parameter.
#[derive(Clone, Debug, PartialEq)]
pub enum ThetaSpec {
    Rational(BigRational),
    Quadratic(QuadraticIrrational),
    CfStream(CfStream),
    Az(AzTheta),
    FloatInterval(FloatInterval),
}

/// Checks the schedule and returns the constructed asymptotically-zero number.
pub fn make_az_theta(schedule: Schedule) -> Result<ThetaSpec> {
    match schedule {
        Schedule::Constant { value } => {
            Err(Error::ScheduleInvalid(format!("constant bound B_k = {value} is not unbounded")))
        }
        Schedule::Linear { slope, offset } => {
            if slope == 0 {
                return Err(Error::ScheduleInvalid("slope 0 gives a bounded schedule".into()));
            }
            if offset == 0 {
                return Err(Error::ScheduleInvalid("offset 0 gives a_1 = 0".into()));
            }
            if slope + offset < 2 {
                return Err(Error::ScheduleInvalid("need B_1 >= 2".into()));
            }
            Ok(ThetaSpec::Az(AzTheta { schedule, a0: BigInt::zero(), negated: false }))
        }
    }
}

impl ThetaSpec {
    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(ThetaSpec::Rational(BigRational::new(num.into(), den)))
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        ThetaSpec::Rational(BigRational::from_integer(n.into()))
    }

    /// `(sqrt(5) - 1) / 2`.
    pub fn golden() -> Self {
        ThetaSpec::Quadratic(QuadraticIrrational::new(-1, 1, 2, 5).expect("valid"))
    }

    /// `sqrt(2) - 1`.
    pub fn silver() -> Self {
        ThetaSpec::Quadratic(QuadraticIrrational::new(-1, 1, 1, 2).expect("valid"))
    }

    pub fn az_default() -> Self {
        make_az_theta(Schedule::default()).expect("default schedule is valid")
    }

    pub fn float_interval(mid: f64, rad: f64) -> Result<Self> {
        if !mid.is_finite() || !rad.is_finite() || rad <= 0.0 {
            return Err(Error::InvalidInput(format!("bad float interval mid={mid} rad={rad}")));
        }
        Ok(ThetaSpec::FloatInterval(FloatInterval { mid, rad }))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ThetaSpec::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ThetaSpec::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn add_integer(&self, k: &BigInt) -> ThetaSpec {
        match self {
            ThetaSpec::Rational(r) => ThetaSpec::Rational(r + BigRational::from_integer(k.clone())),
            ThetaSpec::Quadratic(q) => ThetaSpec::Quadratic(q.add_integer(k)),
            ThetaSpec::CfStream(s) => {
                let mut s = s.clone();
                if s.negated {
                    s.a0 -= k;
                } else {
                    s.a0 += k;
                }
                ThetaSpec::CfStream(s)
            }
            ThetaSpec::Az(z) => {
                let mut z = z.clone();
                if z.negated {
                    z.a0 -= k;
                } else {
                    z.a0 += k;
                }
                ThetaSpec::Az(z)
            }
            ThetaSpec::FloatInterval(f) => {
                let k = k.to_f64().unwrap_or(f64::NAN);
                let mid = f.mid + k;
                // keep the enclosure valid after the rounded shift
                let rad = f.rad + mid.abs() * f64::EPSILON;
                ThetaSpec::FloatInterval(FloatInterval { mid, rad })
            }
        }
    }

    pub fn negate(&self) -> ThetaSpec {
        match self {
            ThetaSpec::Rational(r) => ThetaSpec::Rational(-r),
            ThetaSpec::Quadratic(q) => ThetaSpec::Quadratic(q.negate()),
            ThetaSpec::CfStream(s) => ThetaSpec::CfStream(CfStream { negated: !s.negated, ..s.clone() }),
            ThetaSpec::Az(z) => ThetaSpec::Az(AzTheta { negated: !z.negated, ..z.clone() }),
            ThetaSpec::FloatInterval(f) => ThetaSpec::FloatInterval(FloatInterval { mid: -f.mid, rad: f.rad }),
        }
    }

    /// `1 - theta`.
    pub fn one_minus(&self) -> ThetaSpec {
        self.negate().add_integer(&BigInt::one())
    }

    /// `k * theta` when the variant can represent it exactly.
    pub fn scaled(&self, k: &BigInt) -> Option<ThetaSpec> {
        match self {
            ThetaSpec::Rational(r) => Some(ThetaSpec::Rational(r * BigRational::from_integer(k.clone()))),
            ThetaSpec::Quadratic(q) if !k.is_zero() => Some(ThetaSpec::Quadratic(q.scale(k))),
            _ if k.is_one() => Some(self.clone()),
            _ => None,
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match self {
            ThetaSpec::Rational(r) => format!("{r}"),
            ThetaSpec::Quadratic(q) => format!("({} + {}*sqrt({}))/{}", q.a, q.b, q.d, q.c),
            ThetaSpec::CfStream(s) => format!("{}cf[{}; {:?}]", if s.negated { "-" } else { "" }, s.a0, s.rule),
            ThetaSpec::Az(z) => format!("{}az[{}; {:?}]", if z.negated { "-" } else { "" }, z.a0, z.schedule),
            ThetaSpec::FloatInterval(f) => format!("{} +- {}", f.mid, f.rad),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Big(String),
}

impl IntRepr {
    fn to_big(&self) -> std::result::Result<BigInt, String> {
        match self {
            IntRepr::Small(v) => Ok(BigInt::from(*v)),
            IntRepr::Big(s) => s.trim().parse().map_err(|_| format!("not an integer: {s:?}")),
        }
    }

    fn from_big(v: &BigInt) -> IntRepr {
        match v.to_i64() {
            Some(x) => IntRepr::Small(x),
            None => IntRepr::Big(v.to_string()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ThetaJson {
    Rational {
        num: IntRepr,
        den: IntRepr,
    },
    Quadratic {
        a: IntRepr,
        b: IntRepr,
        c: IntRepr,
        d: IntRepr,
    },
    Cf {
        #[serde(default = "zero_repr")]
        a0: IntRepr,
        #[serde(default)]
        prefix: Vec<IntRepr>,
        #[serde(default)]
        period: Vec<IntRepr>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        negated: bool,
    },
    Az {
        #[serde(flatten)]
        schedule: Schedule,
        #[serde(default = "zero_repr", skip_serializing_if = "IntRepr::is_zero")]
        a0: IntRepr,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        negated: bool,
    },
    Float {
        mid: f64,
        rad: f64,
    },
}

fn zero_repr() -> IntRepr {
    IntRepr::Small(0)
}

impl IntRepr {
    fn is_zero(&self) -> bool {
        matches!(self, IntRepr::Small(0))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ThetaInput {
    Int(i64),
    Tagged(ThetaJson),
}

impl Serialize for ThetaSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let j = match self {
            ThetaSpec::Rational(r) => {
                ThetaJson::Rational { num: IntRepr::from_big(r.numer()), den: IntRepr::from_big(r.denom()) }
            }
            ThetaSpec::Quadratic(q) => ThetaJson::Quadratic {
                a: IntRepr::from_big(&q.a),
                b: IntRepr::from_big(&q.b),
                c: IntRepr::from_big(&q.c),
                d: IntRepr::from_big(&q.d),
            },
            ThetaSpec::CfStream(cf) => match &cf.rule {
                CfRule::Periodic { prefix, period } => ThetaJson::Cf {
                    a0: IntRepr::from_big(&cf.a0),
                    prefix: prefix.iter().map(IntRepr::from_big).collect(),
                    period: period.iter().map(IntRepr::from_big).collect(),
                    negated: cf.negated,
                },
                CfRule::Function { name, .. } => {
                    return Err(serde::ser::Error::custom(format!("function-rule stream {name:?} has no JSON form")))
                }
            },
            ThetaSpec::Az(z) => {
                ThetaJson::Az { schedule: z.schedule, a0: IntRepr::from_big(&z.a0), negated: z.negated }
            }
            ThetaSpec::FloatInterval(f) => ThetaJson::Float { mid: f.mid, rad: f.rad },
        };
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ThetaSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = match ThetaInput::deserialize(d)? {
            ThetaInput::Int(v) => return Ok(ThetaSpec::integer(v)),
            ThetaInput::Tagged(j) => j,
        };
        let big = |r: &IntRepr| r.to_big().map_err(D::Error::custom);
        let spec = match j {
            ThetaJson::Rational { num, den } => ThetaSpec::rational(big(&num)?, big(&den)?),
            ThetaJson::Quadratic { a, b, c, d } => {
                QuadraticIrrational::new(big(&a)?, big(&b)?, big(&c)?, big(&d)?).map(ThetaSpec::Quadratic)
            }
            ThetaJson::Cf { a0, prefix, period, negated } => {
                let prefix = prefix.iter().map(big).collect::<std::result::Result<Vec<_>, _>>()?;
                let period = period.iter().map(big).collect::<std::result::Result<Vec<_>, _>>()?;
                CfStream::periodic(big(&a0)?, prefix, period).map(|s| ThetaSpec::CfStream(CfStream { negated, ..s }))
            }
            ThetaJson::Az { schedule, a0, negated } => make_az_theta(schedule)
                .map(|t| match t {
                    ThetaSpec::Az(z) => ThetaSpec::Az(AzTheta { negated, ..z }),
                    other => other,
                })
                .and_then(|t| {
                    let a0 = big(&a0).map_err(|e| Error::InvalidInput(e.to_string()))?;
                    let shift = if negated { -a0 } else { a0 };
                    Ok(if shift.is_zero() { t } else { t.add_integer(&shift) })
                }),
            ThetaJson::Float { mid, rad } => ThetaSpec::float_interval(mid, rad),
        };
        spec.map_err(D::Error::custom)
    }
}

/// Floor of a rational.
pub(crate) fn floor_rat(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}
