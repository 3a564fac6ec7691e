use super::{load_manifest, Claim};

/// The builtin claim catalog in manifest form.
pub const BUILTIN_MANIFEST: &str = "\
version 1

claim C-01
desc inner integral of I over y, for several x
cite I, inner integral
param x=0.5
param x=1
param x=2
param x=10
lhs int1d y 0 inf :: 1/(y^2+x^2)
rhs closed :: pi/(2*x)
end

claim C-02
desc outer integral of I after the inner one is done
cite I, outer integral
lhs int1d x 0 inf :: 1/(1+x^2)
rhs closed :: pi/2
end

claim C-03
desc I = pi^2/4, y integrated first
cite I, value
lhs int2d x y [0,inf) [0,inf) order inner-first :: x/((1+x^2)*(y^2+x^2))
rhs closed :: pi^2/4
end

claim C-04
desc inner integral of I over x after swapping the order, for several y
cite I, swapped order
param y=0.25
param y=0.5
param y=2
param y=4
lhs int1d x 0 inf :: x/((1+x^2)*(y^2+x^2))
rhs closed :: -ln(y)/(1-y^2)
end

claim C-05
desc I in the swapped order, cut at the removable point y = 1
cite I, swapped order, value
lhs int1d y 0 inf split 1 :: ln(y)/(1-y^2)
rhs closed :: -pi^2/4
end

claim C-06
desc y -> 1/y maps the [1,inf) half onto the [0,1] half
cite log kernel, two halves
lhs int1d y 1 inf :: ln(y)/(1-y^2)
rhs int1d y 0 1 :: ln(y)/(1-y^2)
end

claim C-07
desc log kernel over the unit interval
cite log kernel, unit interval
lhs int1d y 0 1 :: ln(y)/(1-y^2)
rhs closed :: -pi^2/8
end

claim C-08
desc sum of inverse odd squares, against the closed form and against I/2 by quadrature
cite odd squares
let i int2d x y [0,inf) [0,inf) order inner-first :: x/((1+x^2)*(y^2+x^2))
lhs series odd 2
rhs closed :: pi^2/8
also combo 1/2 * i
end

claim C-09
desc zeta(2) = (4/3) times the odd-square sum
cite zeta(2) corollary
lhs series odd 2 scale 4/3
rhs closed :: pi^2/6
end

claim C-10
desc partial fractions in y, for several (x, z)
cite squared integral, inner integral
param x=1 z=1
param x=1 z=2
param x=0.5 z=3
lhs int1d y 0 inf :: 1/((y^2+x^2)*(y^2+z^2))
rhs closed :: pi/(2*x*z*(x+z))
end

claim C-11
desc encoded as stated; the integral is (pi*z/2 - ln(z))/(1+z^2), equal to the stated form only at z = 1
cite squared integral, x integration
param z=0.5
param z=1
param z=2
lhs int1d x 0 inf :: 1/((1+x^2)*(x+z))
rhs closed :: (pi/2-ln(z))/(1+z^2)
end

claim C-12
desc first integral left after integrating by parts
cite integration by parts, first term
lhs int1d z 0 inf :: z^2/(1+z^2)^2
rhs closed :: pi/4
end

claim C-13
desc second integral left after integrating by parts
cite integration by parts, second term
lhs int1d z 0 inf :: z^2*ln(z)/(1+z^2)^2
rhs closed :: pi/4
end

claim C-14
desc right side solved from (pi/2)*J = pi^3/16 + pi^2/8; both orders give J = pi/2 numerically
cite squared integral, left side
lhs int2d x z [0,inf) [0,inf) order inner-first :: 1/((1+x^2)*(1+z^2)*(x+z))
rhs closed :: pi^2/8+pi/4
end

claim C-15
desc integration by parts on [0,1] with the consistent (1-y^2) denominators; boundary terms vanish
cite squared integral, right side
let a int1d y 0 1 :: ln(y)^2/(1-y^2)
let b int1d y 0 1 :: ln(y)/(1-y^2)
lhs int1d y 0 1 :: y^2*ln(y)^2/(1-y^2)^2
rhs combo -1/2 * a + -1 * b
end

claim C-16
desc encoded as stated; the integral is 7*zeta(3)/4 = 2.1035995805...
cite squared integral, final value
lhs int1d y 0 1 :: ln(y)^2/(1-y^2)
rhs closed :: pi^3/16
end

claim C-17
desc cross term vanishes under x -> 1/x
cite cross term
lhs int1d x 0 inf :: ln(x)/(1+x^2)
rhs closed :: 0
end

claim C-18
desc double integral with ln^2 weight, x integrated first; every form is pi^4/8
cite ln^2 double integral
let c int1d z 0 inf :: ln(z)^2/(1+z^2)
lhs int2d y x [0,inf) [0,inf) order inner-first :: x*ln(y)^2/((1+x^2)*(y^2+x^2))
rhs combo pi * c
also int1d y 0 inf split 1 :: -ln(y)^3/(1-y^2)
also int2d x z [0,inf) [0,inf) order inner-first :: ln(x*z)^2/((1+x^2)*(1+z^2))
end

claim C-19
desc ln^2 kernel on the half line, and twice its unit-interval part
cite ln^2 kernel
let d int1d z 0 1 :: ln(z)^2/(1+z^2)
lhs int1d z 0 inf :: ln(z)^2/(1+z^2)
rhs closed :: pi^3/8
also combo 2 * d
end

claim C-20
desc pi*beta(3) = 3*lambda(4), summed independently, and half the ln^3 kernel on [0,1]
cite series comparison
let e int1d y 0 1 :: -ln(y)^3/(1-y^2)
lhs series altodd 3 scale pi
rhs series odd 4 scale 3
also combo 1/2 * e
end

claim C-21
desc log moments of even powers against their closed form, k = x, p = z; taken over [0,1], where the geometric series converges
cite geometric series moments
param x=0 z=1
param x=1 z=1
param x=2 z=1
param x=3 z=1
param x=4 z=1
param x=5 z=1
param x=0 z=3
param x=1 z=3
param x=2 z=3
param x=3 z=3
param x=4 z=3
param x=5 z=3
lhs int1d y 0 1 :: y^(2*x)*ln(y)^z
rhs moment x z
end
";

/// Parses [`BUILTIN_MANIFEST`].
pub fn builtin_claims() -> Vec<Claim> {
    load_manifest(BUILTIN_MANIFEST).expect("builtin manifest is valid")
}
