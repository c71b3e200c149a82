#include "tavc/processes.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kv.hpp"
#include "tavc/errors.hpp"

namespace tavc {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

ProcessSpec ProcessSpec::parse(std::string_view text) {
  const auto parsed = detail::split_spec(text);
  ProcessSpec spec;
  if (parsed.kind == "iid") {
    spec.kind = IidNormal{detail::optional_double(parsed, "mean", 0.0), detail::optional_double(parsed, "sd", 1.0)};
  } else if (parsed.kind == "ar1") {
    spec.kind = Ar1{detail::require_double(parsed, "phi"), detail::optional_double(parsed, "sd", 1.0),
                    detail::optional_double(parsed, "mean", 0.0)};
  } else if (parsed.kind == "ma1") {
    spec.kind = Ma1{detail::require_double(parsed, "b"), detail::optional_double(parsed, "sd", 1.0)};
  } else if (parsed.kind == "linabs") {
    spec.kind = LinearAbs{detail::require_double(parsed, "rho")};
  } else if (parsed.kind == "cantor") {
    CantorChain c;
    auto it = parsed.args.find("obs");
    const std::string obs = it == parsed.args.end() ? "identity" : it->second;
    if (obs == "identity") {
      c.observable = CantorChain::Observable::kIdentity;
    } else if (obs == "ind") {
      c.observable = CantorChain::Observable::kIndicator;
      c.y0 = detail::require_double(parsed, "y0");
    } else {
      throw ParameterError("cantor: obs must be identity or ind");
    }
    spec.kind = c;
  } else {
    throw ParameterError("unknown process kind '" + parsed.kind + "' (expected iid, ar1, ma1, linabs or cantor)");
  }
  spec.validate();
  return spec;
}

void ProcessSpec::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  std::visit(Overloaded{
                 [&](const IidNormal& p) {
                   if (!finite(p.mean) || !finite(p.sd) || p.sd < 0.0) throw ParameterError("iid: need finite mean, sd >= 0");
                 },
                 [&](const Ar1& p) {
                   if (!(std::fabs(p.phi) < 1.0)) throw ParameterError("ar1: |phi| must be < 1");
                   if (!finite(p.sd) || p.sd < 0.0 || !finite(p.mean)) throw ParameterError("ar1: need sd >= 0, finite mean");
                 },
                 [&](const Ma1& p) {
                   if (!finite(p.b) || !finite(p.sd) || p.sd < 0.0) throw ParameterError("ma1: need finite b, sd >= 0");
                 },
                 [&](const LinearAbs& p) {
                   if (!(std::fabs(p.rho) < 1.0)) throw ParameterError("linabs: |rho| must be < 1");
                 },
                 [&](const CantorChain& p) {
                   if (!finite(p.y0)) throw ParameterError("cantor: y0 must be finite");
                 },
             },
             kind);
}

std::string ProcessSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const IidNormal& p) { os << "iid:sd=" << p.sd << ",mean=" << p.mean; },
                 [&](const Ar1& p) { os << "ar1:phi=" << p.phi << ",sd=" << p.sd << ",mean=" << p.mean; },
                 [&](const Ma1& p) { os << "ma1:b=" << p.b << ",sd=" << p.sd; },
                 [&](const LinearAbs& p) { os << "linabs:rho=" << p.rho; },
                 [&](const CantorChain& p) {
                   if (p.observable == CantorChain::Observable::kIdentity) {
                     os << "cantor:obs=identity";
                   } else {
                     os << "cantor:obs=ind,y0=" << p.y0;
                   }
                 },
             },
             kind);
  return os.str();
}

std::optional<double> true_tavc(const ProcessSpec& spec) {
  return std::visit(Overloaded{
                        [](const IidNormal& p) -> std::optional<double> { return p.sd * p.sd; },
                        [](const Ar1& p) -> std::optional<double> {
                          return p.sd * p.sd / ((1.0 - p.phi) * (1.0 - p.phi));
                        },
                        [](const Ma1& p) -> std::optional<double> { return p.sd * p.sd * (1.0 + p.b) * (1.0 + p.b); },
                        [](const LinearAbs&) -> std::optional<double> { return std::nullopt; },
                        [](const CantorChain& p) -> std::optional<double> {
                          // Y = sum_i (2/3) 3^{-i} eps_{n-i}: coefficients sum to 1, Var(eps) = 1/4.
                          if (p.observable == CantorChain::Observable::kIdentity) return 0.25;
                          return std::nullopt;
                        },
                    },
                    spec.kind);
}

std::optional<double> true_theta(const ProcessSpec& spec) {
  return std::visit(Overloaded{
                        [](const IidNormal&) -> std::optional<double> { return 0.0; },
                        [](const Ar1& p) -> std::optional<double> {
                          // gamma(k) = sd^2 phi^k / (1 - phi^2), sum k phi^k = phi / (1 - phi)^2
                          const double om = 1.0 - p.phi;
                          return -2.0 * p.sd * p.sd * p.phi / ((1.0 - p.phi * p.phi) * om * om);
                        },
                        [](const Ma1& p) -> std::optional<double> { return -2.0 * p.b * p.sd * p.sd; },
                        [](const LinearAbs&) -> std::optional<double> { return std::nullopt; },
                        [](const CantorChain&) -> std::optional<double> { return std::nullopt; },
                    },
                    spec.kind);
}

double cantor_cdf(double y) {
  if (y < 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  double result = 0.0;
  double weight = 0.5;
  for (int i = 0; i < 64 && weight > 0.0; ++i) {
    y *= 3.0;
    if (y >= 2.0) {
      result += weight;
      y -= 2.0;
    } else if (y >= 1.0) {
      return result + weight;  // inside a removed middle third
    }
    weight *= 0.5;
  }
  return result;
}

std::optional<double> true_mean(const ProcessSpec& spec) {
  return std::visit(Overloaded{
                        [](const IidNormal& p) -> std::optional<double> { return p.mean; },
                        [](const Ar1& p) -> std::optional<double> { return p.mean; },
                        [](const Ma1&) -> std::optional<double> { return 0.0; },
                        [](const LinearAbs& p) -> std::optional<double> {
                          return std::sqrt(2.0 / (std::numbers::pi * (1.0 - p.rho * p.rho)));
                        },
                        [](const CantorChain& p) -> std::optional<double> {
                          if (p.observable == CantorChain::Observable::kIdentity) return 0.5;
                          return cantor_cdf(p.y0);
                        },
                    },
                    spec.kind);
}

ProcessStream::ProcessStream(const ProcessSpec& spec, std::uint64_t seed, std::uint64_t stream)
    : spec_(spec), rng_(seed, stream) {
  spec_.validate();
  if (const auto* p = std::get_if<Ar1>(&spec_.kind)) {
    state_ = normal_(rng_) * p->sd / std::sqrt(1.0 - p->phi * p->phi);
  } else if (std::get_if<Ma1>(&spec_.kind)) {
    state_ = normal_(rng_);
  } else if (const auto* p = std::get_if<LinearAbs>(&spec_.kind)) {
    state_ = normal_(rng_) / std::sqrt(1.0 - p->rho * p->rho);
  } else if (std::get_if<CantorChain>(&spec_.kind)) {
    state_ = 0.0;
    for (int i = 0; i < kCantorBurnIn; ++i) cantor_step();
  }
}

double ProcessStream::cantor_step() {
  const double eps = (rng_() >> 63) ? 1.0 : 0.0;
  state_ = (state_ + 2.0 * eps) / 3.0;
  return state_;
}

double ProcessStream::next() {
  switch (spec_.kind.index()) {
    case 0: {
      const auto& p = *std::get_if<IidNormal>(&spec_.kind);
      return p.mean + p.sd * normal_(rng_);
    }
    case 1: {
      const auto& p = *std::get_if<Ar1>(&spec_.kind);
      state_ = p.phi * state_ + p.sd * normal_(rng_);
      return p.mean + state_;
    }
    case 2: {
      const auto& p = *std::get_if<Ma1>(&spec_.kind);
      const double e = normal_(rng_);
      const double x = p.sd * (e + p.b * state_);
      state_ = e;
      return x;
    }
    case 3: {
      const auto& p = *std::get_if<LinearAbs>(&spec_.kind);
      state_ = p.rho * state_ + normal_(rng_);
      return std::fabs(state_);
    }
    default: {
      const auto& p = *std::get_if<CantorChain>(&spec_.kind);
      const double y = cantor_step();
      if (p.observable == CantorChain::Observable::kIdentity) return y;
      return y <= p.y0 ? 1.0 : 0.0;
    }
  }
}

std::vector<double> generate(const ProcessSpec& spec, std::int64_t n, std::uint64_t seed, std::uint64_t stream) {
  if (n < 0) throw ParameterError("generate: n must be >= 0");
  ProcessStream s(spec, seed, stream);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& x : out) x = s.next();
  return out;
}

}  // namespace tavc
