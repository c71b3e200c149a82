#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tavc/rng.hpp"

namespace tavc {

struct IidNormal {
  double mean = 0.0;
  double sd = 1.0;
};

// X_n = mean + Y_n,  Y_n = phi Y_{n-1} + sd e_n.
struct Ar1 {
  double phi = 0.5;
  double sd = 1.0;
  double mean = 0.0;
};

// X_n = sd (e_n + b e_{n-1}).
struct Ma1 {
  double b = 0.5;
  double sd = 1.0;
};

// X_n = |e_n| with e_n = sum_i rho^i eps_{n-i}, eps standard normal.
struct LinearAbs {
  double rho = 0.7;
};

// Y_n = (Y_{n-1} + 2 eps_n) / 3 with eps_n uniform on {0, 1}; the stationary
// law is the Cantor measure and the chain is not Harris recurrent.
// Observed either as Y_n itself or as 1{Y_n <= y0}.
struct CantorChain {
  enum class Observable { kIdentity, kIndicator };
  Observable observable = Observable::kIdentity;
  double y0 = 0.5;
};

struct ProcessSpec {
  std::variant<IidNormal, Ar1, Ma1, LinearAbs, CantorChain> kind;

  // "iid:sd=1[,mean=0]", "ar1:phi=0.5,sd=1[,mean=0]", "ma1:b=0.5[,sd=1]",
  // "linabs:rho=0.7", "cantor:obs=identity" or "cantor:obs=ind,y0=0.3".
  static ProcessSpec parse(std::string_view spec);

  // Throws ParameterError outside the stationarity region.
  void validate() const;

  std::string describe() const;
};

// sum_k gamma(k), where a closed form is known.
std::optional<double> true_tavc(const ProcessSpec& spec);

// theta = -2 sum_{k>=1} k gamma(k), where a closed form is known.
std::optional<double> true_theta(const ProcessSpec& spec);

// E X_0.
std::optional<double> true_mean(const ProcessSpec& spec);

// Distribution function of the Cantor measure.
double cantor_cdf(double y);

// A replayable stream of one process: the output depends only on
// (spec, seed, stream id). Stationary start where the marginal law can be
// sampled exactly; the Cantor chain is burned in for 200 steps (contraction
// 1/3 per step leaves an initialisation bias far below double precision).
class ProcessStream {
 public:
  static constexpr int kCantorBurnIn = 200;

  ProcessStream(const ProcessSpec& spec, std::uint64_t seed, std::uint64_t stream);

  double next();

 private:
  ProcessSpec spec_;
  CounterRng rng_;
  NormalSource normal_;
  double state_ = 0.0;  // AR/linear state, previous MA innovation, or Cantor Y

  double cantor_step();
};

// The first n values of ProcessStream(spec, seed, stream).
std::vector<double> generate(const ProcessSpec& spec, std::int64_t n, std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace tavc
