#pragma once

namespace leo {

// Regularized lower incomplete gamma P(s, x) = γ(s, x) / Γ(s) for s > 0,
// x >= 0. Series expansion for x < s + 1, Lentz continued fraction otherwise;
// relative accuracy is a small multiple of machine epsilon away from the
// underflow floor.
double gamma_p(double s, double x);

// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x).
double gamma_q(double s, double x);

// Unregularized lower incomplete gamma γ(s, x). Overflows with Γ(s) once
// s ≳ 171; the regularized forms are the workhorses everywhere else.
double lower_inc_gamma(double s, double x);

// P(s, hi) - P(s, lo) for 0 <= lo <= hi, evaluated through whichever of the
// lower/upper pair keeps the subtraction out of the cancellation zone.
double gamma_p_diff(double s, double lo, double hi);

}  // namespace leo
