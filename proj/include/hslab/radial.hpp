#pragma once

#include "hslab/quadrature.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hslab {

/// Power-law behaviour of a radial profile: f ~ r^{at_zero} as r -> 0 and
/// f ~ r^{at_infinity} as r -> infinity. Used for quadrature tails and for
/// extrapolating sampled profiles outside their grid.
struct DecayHints {
    double at_zero = 0.0;
    double at_infinity = 0.0;
};

/// One-sector function u(x) = R(|x|) Y_k(theta): either a closed form with
/// optional analytic derivatives, or samples interpolated monotone-cubically
/// in t = log r.
class RadialFunction {
public:
    enum class Kind { closed_form, sampled };

    RadialFunction() = default;

    static RadialFunction closed_form(int sector, std::function<double(double)> value,
                                      std::function<double(double)> deriv = {},
                                      std::function<double(double)> deriv2 = {},
                                      std::optional<DecayHints> hints = {});

    /// radii must be strictly increasing, positive, and at least 16 of them.
    static RadialFunction sampled(int sector, std::vector<double> radii,
                                  std::vector<double> values,
                                  std::optional<DecayHints> hints = {});

    /// a*f + b*g, same sector required.
    static RadialFunction linear_combination(double a, const RadialFunction& f, double b,
                                             const RadialFunction& g);

    Kind kind() const { return kind_; }
    int sector() const { return sector_; }
    const std::optional<DecayHints>& decay_hints() const { return hints_; }
    void set_decay_hints(std::optional<DecayHints> h) { hints_ = std::move(h); }

    double value(double r) const;
    double operator()(double r) const { return value(r); }
    /// dR/dr; analytic when available, otherwise centered differences in log r.
    double derivative(double r) const;
    double second_derivative(double r) const;
    bool has_analytic_derivatives() const;

    /// Sampled representations expose their grid; closed forms return empty.
    const std::vector<double>& sample_radii() const { return radii_; }
    const std::vector<double>& sample_values() const { return values_; }

private:
    Kind kind_ = Kind::closed_form;
    int sector_ = 0;
    std::optional<DecayHints> hints_;
    std::function<double(double)> value_, deriv_, deriv2_;
    std::vector<double> radii_, values_;
    // interpolation data in t = log r: monotone-cubic slopes for values,
    // centered-difference slopes for reported derivatives
    std::vector<double> t_, slope_, cd_slope_;
    void build_pchip();
    double pchip_value(double t) const;
    double pchip_derivative(double t) const; // d/dt
};

/// Evaluates f (closed form or sampled) on the given log-spaced grid and
/// returns a sampled representation. Sampled inputs outside their grid use
/// decay hints; without hints such a request throws std::domain_error.
RadialFunction resample(const RadialFunction& f, const std::vector<double>& grid);

/// Log-spaced grid helper: n points geometrically spaced on [r_min, r_max].
std::vector<double> log_grid(double r_min, double r_max, int n);

/// CSV format: optional `#` comment lines, then header `r,value`, then
/// strictly increasing radii. Recognized comment keys: sector=k, decay0=a,
/// decayinf=b.
RadialFunction read_radial_csv(std::istream& in);
RadialFunction read_radial_csv_file(const std::string& path);
void write_radial_csv(std::ostream& out, const RadialFunction& f,
                      const std::vector<std::string>& extra_comments = {});
void write_radial_csv_file(const std::string& path, const RadialFunction& f,
                           const std::vector<std::string>& extra_comments = {});

} // namespace hslab
