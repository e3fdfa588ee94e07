#pragma once

#include <functional>
#include <span>

namespace gstlab::quad {

struct Tolerance {
  double abs = 1e-8;
  double rel = 1e-6;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
};

using Fn = std::function<double(double)>;

// Adaptive Gauss-Kronrod on [a, b]; b may be +inf. Interior breakpoints split
// the range so that jumps of f never sit inside a panel.
// Throws QuadratureError when the error estimate misses max(abs, rel*|value|).
Result integrate(const Fn& f, double a, double b, Tolerance tol = {},
                 std::span<const double> breaks = {});

// Same as integrate but returns the estimate without throwing.
Result integrate_unchecked(const Fn& f, double a, double b, Tolerance tol = {},
                           std::span<const double> breaks = {});

// int_a^inf g(r) cos(w r) dr and int_a^inf g(r) sin(w r) dr for smooth,
// decaying g (double-exponential Fourier rule). w > 0.
Result cos_tail(const Fn& g, double a, double w);
Result sin_tail(const Fn& g, double a, double w);

// log of int_a^b exp(logf(y)) dy, robust when logf spans thousands of units.
long double log_integrate_exp(const std::function<long double(long double)>& logf,
                              long double a, long double b, double rel = 1e-9);

long double log_add_exp(long double a, long double b);

}  // namespace gstlab::quad
