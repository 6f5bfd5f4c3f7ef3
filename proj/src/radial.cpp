#include "hslab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hslab {

RadialFunction RadialFunction::closed_form(int sector, std::function<double(double)> value,
                                           std::function<double(double)> deriv,
                                           std::function<double(double)> deriv2,
                                           std::optional<DecayHints> hints) {
    if (sector < 0) throw std::domain_error("RadialFunction: sector must be >= 0");
    if (!value) throw std::domain_error("RadialFunction: closed form needs an evaluator");
    RadialFunction f;
    f.kind_ = Kind::closed_form;
    f.sector_ = sector;
    f.value_ = std::move(value);
    f.deriv_ = std::move(deriv);
    f.deriv2_ = std::move(deriv2);
    f.hints_ = hints;
    return f;
}

RadialFunction RadialFunction::sampled(int sector, std::vector<double> radii,
                                       std::vector<double> values,
                                       std::optional<DecayHints> hints) {
    if (sector < 0) throw std::domain_error("RadialFunction: sector must be >= 0");
    if (radii.size() != values.size())
        throw std::domain_error("RadialFunction: radii/values size mismatch");
    if (radii.size() < 16)
        throw std::domain_error("RadialFunction: sampled representation needs >= 16 points");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw std::domain_error("RadialFunction: radii must be positive");
        if (i > 0 && !(radii[i] > radii[i - 1]))
            throw std::domain_error("RadialFunction: radii must be strictly increasing");
    }
    RadialFunction f;
    f.kind_ = Kind::sampled;
    f.sector_ = sector;
    f.radii_ = std::move(radii);
    f.values_ = std::move(values);
    f.hints_ = hints;
    f.build_pchip();
    return f;
}

RadialFunction RadialFunction::linear_combination(double a, const RadialFunction& f, double b,
                                                  const RadialFunction& g) {
    if (f.sector() != g.sector())
        throw std::domain_error("linear_combination: sectors differ");
    auto fv = f, gv = g; // copies keep the combination self-contained
    auto val = [a, fv, b, gv](double r) { return a * fv.value(r) + b * gv.value(r); };
    std::function<double(double)> d1, d2;
    if (f.has_analytic_derivatives() && g.has_analytic_derivatives()) {
        d1 = [a, fv, b, gv](double r) { return a * fv.derivative(r) + b * gv.derivative(r); };
        d2 = [a, fv, b, gv](double r) {
            return a * fv.second_derivative(r) + b * gv.second_derivative(r);
        };
    }
    return closed_form(f.sector(), val, d1, d2, std::nullopt);
}

bool RadialFunction::has_analytic_derivatives() const {
    return kind_ == Kind::closed_form && deriv_ && deriv2_;
}

void RadialFunction::build_pchip() {
    const std::size_t n = radii_.size();
    t_.resize(n);
    for (std::size_t i = 0; i < n; ++i) t_[i] = std::log(radii_[i]);
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = t_[i + 1] - t_[i];
        delta[i] = (values_[i + 1] - values_[i]) / h[i];
    }
    // Fritsch-Carlson slopes for the value interpolant
    slope_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] == 0.0 || delta[i] == 0.0 || (delta[i - 1] > 0) != (delta[i] > 0)) {
            slope_[i] = 0.0;
        } else {
            const double w1 = 2 * h[i] + h[i - 1];
            const double w2 = h[i] + 2 * h[i - 1];
            slope_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // one-sided ends (shape-preserving endpoint formula)
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double m = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0)
            m = 0.0;
        else if (d0 * d1 <= 0.0 && std::abs(m) > 3 * std::abs(d0))
            m = 3 * d0;
        return m;
    };
    slope_[0] = endpoint(h[0], h[1], delta[0], delta[1]);
    slope_[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    // centered differences on the log grid for reported derivatives
    cd_slope_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = h[i - 1], hp = h[i];
        cd_slope_[i] = (hm * hm * values_[i + 1] - hp * hp * values_[i - 1] +
                        (hp * hp - hm * hm) * values_[i]) /
                       (hm * hp * (hm + hp));
    }
    cd_slope_[0] = delta[0] - h[0] * (delta[1] - delta[0]) / (h[0] + h[1]);
    cd_slope_[n - 1] =
        delta[n - 2] + h[n - 2] * (delta[n - 2] - delta[n - 3]) / (h[n - 2] + h[n - 3]);
}

double RadialFunction::pchip_value(double t) const {
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    if (i >= t_.size() - 1) i = t_.size() - 2;
    const double h = t_[i + 1] - t_[i];
    const double x = (t - t_[i]) / h;
    const double y0 = values_[i], y1 = values_[i + 1];
    const double m0 = slope_[i] * h, m1 = slope_[i + 1] * h;
    const double x2 = x * x, x3 = x2 * x;
    return y0 * (2 * x3 - 3 * x2 + 1) + m0 * (x3 - 2 * x2 + x) + y1 * (-2 * x3 + 3 * x2) +
           m1 * (x3 - x2);
}

double RadialFunction::pchip_derivative(double t) const {
    // centered-difference slopes at the nodes, linearly interpolated
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    if (i >= t_.size() - 1) i = t_.size() - 2;
    const double x = (t - t_[i]) / (t_[i + 1] - t_[i]);
    return (1.0 - x) * cd_slope_[i] + x * cd_slope_[i + 1];
}

double RadialFunction::value(double r) const {
    if (!(r > 0.0)) throw std::domain_error("RadialFunction: r must be positive");
    if (kind_ == Kind::closed_form) return value_(r);
    const double t = std::log(r);
    if (t < t_.front()) {
        if (!hints_) return 0.0;
        return values_.front() * std::pow(r / radii_.front(), hints_->at_zero);
    }
    if (t > t_.back()) {
        if (!hints_) return 0.0;
        return values_.back() * std::pow(r / radii_.back(), hints_->at_infinity);
    }
    return pchip_value(t);
}

double RadialFunction::derivative(double r) const {
    if (!(r > 0.0)) throw std::domain_error("RadialFunction: r must be positive");
    if (kind_ == Kind::closed_form) {
        if (deriv_) return deriv_(r);
        const double h = 1e-5;
        return (value_(r * std::exp(h)) - value_(r * std::exp(-h))) / (2.0 * h * r);
    }
    const double t = std::log(r);
    if (t < t_.front()) {
        if (!hints_) return 0.0;
        return hints_->at_zero * value(r) / r;
    }
    if (t > t_.back()) {
        if (!hints_) return 0.0;
        return hints_->at_infinity * value(r) / r;
    }
    return pchip_derivative(t) / r;
}

double RadialFunction::second_derivative(double r) const {
    if (!(r > 0.0)) throw std::domain_error("RadialFunction: r must be positive");
    if (kind_ == Kind::closed_form && deriv2_) return deriv2_(r);
    // centered differences in t = log r: u'' = (f_tt - f_t)/r^2
    const double h = kind_ == Kind::closed_form ? 1e-4 : 1e-3;
    const double fm = value(r * std::exp(-h)), f0 = value(r), fp = value(r * std::exp(h));
    const double ftt = (fp - 2 * f0 + fm) / (h * h);
    const double ft = (fp - fm) / (2 * h);
    return (ftt - ft) / (r * r);
}

std::vector<double> log_grid(double r_min, double r_max, int n) {
    if (!(r_min > 0.0) || !(r_max > r_min) || n < 2)
        throw std::domain_error("log_grid: need 0 < r_min < r_max and n >= 2");
    std::vector<double> g(n);
    const double a = std::log(r_min), b = std::log(r_max);
    for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1.0));
    return g;
}

RadialFunction resample(const RadialFunction& f, const std::vector<double>& grid) {
    if (f.kind() == RadialFunction::Kind::sampled && !f.decay_hints()) {
        const double lo = f.sample_radii().front(), hi = f.sample_radii().back();
        for (double r : grid)
            if (r < lo || r > hi)
                throw std::domain_error(
                    "resample: grid point outside sampled range and no decay hints");
    }
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = f.value(grid[i]);
    return RadialFunction::sampled(f.sector(), grid, std::move(values), f.decay_hints());
}

RadialFunction read_radial_csv(std::istream& in) {
    std::string line;
    int sector = 0;
    std::optional<double> d0, dinf;
    std::vector<double> radii, values;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto grab = [&](const std::string& key) -> std::optional<double> {
                const auto pos = line.find(key + "=");
                if (pos == std::string::npos) return std::nullopt;
                return std::stod(line.substr(pos + key.size() + 1));
            };
            if (auto v = grab("sector")) sector = static_cast<int>(*v);
            if (auto v = grab("decay0")) d0 = *v;
            if (auto v = grab("decayinf")) dinf = *v;
            continue;
        }
        if (!header_seen) {
            if (line.rfind("r,value", 0) != 0)
                throw std::domain_error("radial csv: expected header 'r,value'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::domain_error("radial csv: malformed row '" + line + "'");
        radii.push_back(std::stod(line.substr(0, comma)));
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    std::optional<DecayHints> hints;
    if (d0 && dinf) hints = DecayHints{*d0, *dinf};
    return RadialFunction::sampled(sector, std::move(radii), std::move(values), hints);
}

RadialFunction read_radial_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("cannot open '" + path + "'");
    return read_radial_csv(in);
}

void write_radial_csv(std::ostream& out, const RadialFunction& f,
                      const std::vector<std::string>& extra_comments) {
    if (f.kind() != RadialFunction::Kind::sampled)
        throw std::domain_error("write_radial_csv: resample closed forms first");
    for (const auto& line : extra_comments) out << "# " << line << "\n";
    out << "# sector=" << f.sector() << "\n";
    if (f.decay_hints()) {
        out << "# decay0=" << std::setprecision(17) << f.decay_hints()->at_zero << "\n";
        out << "# decayinf=" << std::setprecision(17) << f.decay_hints()->at_infinity << "\n";
    }
    out << "r,value\n";
    out << std::setprecision(17);
    const auto& r = f.sample_radii();
    const auto& v = f.sample_values();
    for (std::size_t i = 0; i < r.size(); ++i) out << r[i] << "," << v[i] << "\n";
}

void write_radial_csv_file(const std::string& path, const RadialFunction& f,
                           const std::vector<std::string>& extra_comments) {
    std::ofstream out(path);
    if (!out) throw std::domain_error("cannot open '" + path + "' for writing");
    write_radial_csv(out, f, extra_comments);
}

} // namespace hslab
