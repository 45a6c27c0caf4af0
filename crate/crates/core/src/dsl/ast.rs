use std::fmt;

/// Built-in unary functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Log,
    /// Real part. Not complex-analytic.
    Re,
    /// Imaginary part. Not complex-analytic.
    Im,
    /// Complex conjugate. Not complex-analytic.
    Conj,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Log => "log",
            Func::Re => "re",
            Func::Im => "im",
            Func::Conj => "conj",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "log" => Func::Log,
            "re" => Func::Re,
            "im" => Func::Im,
            "conj" => Func::Conj,
            _ => return None,
        })
    }

    pub fn is_analytic(self) -> bool {
        !matches!(self, Func::Re | Func::Im | Func::Conj)
    }
}

/// Expression tree. Coordinates are stored by chart index.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Coord(usize),
    Param { name: String, value: f64 },
    Pi,
    ImagUnit,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn num(x: f64) -> Self {
        Expr::Num(x)
    }

    pub fn add(a: Expr, b: Expr) -> Self {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Self {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Self {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Self {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn call(f: Func, a: Expr) -> Self {
        Expr::Call(f, Box::new(a))
    }

    fn as_num(&self) -> Option<f64> {
        match self {
            Expr::Num(x) => Some(*x),
            _ => None,
        }
    }

    /// Product that folds literal zeros and ones, for generated expressions.
    pub fn times(a: Expr, b: Expr) -> Self {
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) => Expr::Num(x * y),
            (Some(0.0), _) => Expr::Num(0.0),
            (_, Some(0.0)) => Expr::Num(0.0),
            (Some(1.0), _) => b,
            (_, Some(1.0)) => a,
            _ => Expr::mul(a, b),
        }
    }

    /// Sum that drops literal zeros, for generated expressions.
    pub fn plus(a: Expr, b: Expr) -> Self {
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) => Expr::Num(x + y),
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            _ => Expr::add(a, b),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(x) if *x < 0.0 || x.is_sign_negative() => 3,
            _ => 5,
        }
    }

    /// True when the tree mentions the imaginary unit or a non-analytic function.
    pub fn needs_complex(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if matches!(e, Expr::ImagUnit) {
                found = true;
            }
        });
        found
    }

    pub fn is_analytic(&self) -> bool {
        let mut ok = true;
        self.visit(&mut |e| {
            if let Expr::Call(f, _) = e {
                if !f.is_analytic() {
                    ok = false;
                }
            }
        });
        ok
    }

    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.visit(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Replaces every coordinate by the expression `sub(index)`.
    pub fn substitute(&self, sub: &impl Fn(usize) -> Expr) -> Expr {
        let rec = |a: &Expr| Box::new(a.substitute(sub));
        match self {
            Expr::Coord(i) => sub(*i),
            Expr::Neg(a) => Expr::Neg(rec(a)),
            Expr::Pow(a, k) => Expr::Pow(rec(a), *k),
            Expr::Call(f, a) => Expr::Call(*f, rec(a)),
            Expr::Add(a, b) => Expr::Add(rec(a), rec(b)),
            Expr::Sub(a, b) => Expr::Sub(rec(a), rec(b)),
            Expr::Mul(a, b) => Expr::Mul(rec(a), rec(b)),
            Expr::Div(a, b) => Expr::Div(rec(a), rec(b)),
            leaf => leaf.clone(),
        }
    }

    pub(crate) fn write(&self, out: &mut impl fmt::Write, coords: &[String]) -> fmt::Result {
        let child = |out: &mut dyn fmt::Write, e: &Expr, min: u8| -> fmt::Result {
            let mut s = String::new();
            e.write(&mut s, coords)?;
            if e.precedence() < min {
                write!(out, "({s})")
            } else {
                write!(out, "{s}")
            }
        };
        match self {
            Expr::Num(x) => write!(out, "{x:?}"),
            Expr::Coord(i) => write!(out, "{}", coords[*i]),
            Expr::Param { name, .. } => write!(out, "{name}"),
            Expr::Pi => write!(out, "pi"),
            Expr::ImagUnit => write!(out, "i"),
            Expr::Neg(a) => {
                write!(out, "-")?;
                child(out, a, 3)
            }
            Expr::Add(a, b) => {
                child(out, a, 1)?;
                write!(out, " + ")?;
                child(out, b, 2)
            }
            Expr::Sub(a, b) => {
                child(out, a, 1)?;
                write!(out, " - ")?;
                child(out, b, 2)
            }
            Expr::Mul(a, b) => {
                child(out, a, 2)?;
                write!(out, "*")?;
                child(out, b, 3)
            }
            Expr::Div(a, b) => {
                child(out, a, 2)?;
                write!(out, "/")?;
                child(out, b, 3)
            }
            Expr::Pow(a, k) => {
                child(out, a, 5)?;
                if *k < 0 {
                    write!(out, "^({k})")
                } else {
                    write!(out, "^{k}")
                }
            }
            Expr::Call(f, a) => {
                write!(out, "{}(", f.name())?;
                a.write(out, coords)?;
                write!(out, ")")
            }
        }
    }
}
